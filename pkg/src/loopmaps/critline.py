"""Non-generic critical line of the bending-energy loop model on triangulations.

At non-generic criticality the cut endpoint gamma_+ hits the fixed point
1/((a+1)h) of the involution, the elliptic parametrization degenerates and
everything is expressed through

    zeta(v) = cosh(b v) coth v - sinh(b v),     pi b = arccos(n/2).

For a != 1 the line is parametrized by v_inf, or equivalently by ``c = cosh v_inf``.
For a given c the two endpoint conditions are linear in G = g/h^3 and H = 1/h^2.
At a = 1 the parameter is rho = 1 - 2 h gamma_-.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .ringgen import Bending, involution_of


class PoleError(ValueError):
    pass


class OutOfRangeError(ValueError):
    """Parameter outside the physical range (negative g or h^2, kappa(2-b) < 0)."""


class NoDilutePointError(OutOfRangeError):
    """The line is absent: a >= a_c(n)."""


def b_of_n(n: float) -> float:
    if not 0 <= n < 2:
        raise ValueError("need 0 <= n < 2")
    return math.acos(n / 2) / math.pi


def n_of_b(b: float) -> float:
    return 2 * math.cos(math.pi * b)


# -- the fundamental solution ------------------------------------------------------------------


def zeta(b: float, v, d: int = 0) -> complex:
    """``zeta^(d)(v)`` in closed form, d = 0..4.

    Written with E = coth v - 1 and e^{-bv} = cosh bv - sinh bv split off, so that large Re v
    does not cancel; Re v < 0 goes through the parity zeta^(d)(-v) = (-1)^(d+1) zeta^(d)(v).
    """
    v = complex(v)
    if d not in (0, 1, 2, 3, 4):
        raise ValueError("derivative order must be 0..4")
    if v.real < 0:
        return (-1) ** (d + 1) * zeta(b, -v, d)
    sh_v = cmath.sinh(v)
    if abs(sh_v) < 1e-12:
        raise PoleError(f"zeta has a pole at v = {v}")
    c, s = cmath.cosh(b * v), cmath.sinh(b * v)
    e = cmath.exp(-b * v)
    C = cmath.cosh(v) / sh_v
    E = C - 1 if v.real < 1 else 2 / (cmath.exp(2 * v) - 1)
    K = 1 / (sh_v * sh_v)
    if d == 0:
        return e + c * E
    if d == 1:
        return -b * e + b * s * E - c * K
    if d == 2:
        return b * b * e + b * b * c * E - 2 * b * s * K + 2 * c * K * C
    if d == 3:
        return (
            -(b**3) * e + b**3 * s * E - 3 * b * b * c * K + 6 * b * s * K * C
            - 4 * c * K * C * C - 2 * c * K * K
        )
    return (
        b**4 * e + b**4 * c * E - 4 * b**3 * s * K + 12 * b * b * c * K * C
        - 16 * b * s * K * C * C - 8 * b * s * K * K + 8 * c * K * C**3 + 16 * c * K * K * C
    )


# -- trigonometric parametrization ---------------------------------------------------------------


def _vinf_of_c(c: float) -> complex:
    # boundary path [0, inf) u i[0, pi] u ([0, inf) + i pi)
    if c >= 1:
        return complex(math.acosh(c), 0.0)
    if c > -1:
        return complex(0.0, math.acos(c))
    return complex(math.acosh(-c), math.pi)


def path_point(s: float) -> tuple[float, complex]:
    """(cosh v_inf, v_inf) at path coordinate s: v_inf = s for s >= 0, i|s| for s < 0."""
    if s >= 0:
        return math.cosh(s), complex(s, 0.0)
    return math.cos(s), complex(0.0, -s)


def _path_coord(c: float) -> float:
    return math.acosh(c) if c >= 1 else -math.acos(c)


def c_from_gamma(a: float, h: float, gamma_minus: float) -> float:
    return (1 - a) * (1 - (1 + a) * h * gamma_minus) / ((1 + a) * (1 + (1 - a) * h * gamma_minus))


def gamma_from_c(a: float, h: float, c: float) -> float:
    return ((1 - a) - (1 + a) * c) / ((1 - a * a) * (1 + c) * h)


def v_infinity(a: float, h: float, gamma_minus: float) -> complex:
    if a == 1:
        raise ValueError("a = 1: v_inf = i pi / 2")
    if (1 + (1 - a) * h * gamma_minus) == 0:
        raise PoleError("gamma_- = 1/((a-1)h): the point at infinity falls on the cut")
    return _vinf_of_c(c_from_gamma(a, h, gamma_minus))


def _x_c(a, h, c, v):
    ch = cmath.cosh(complex(v))
    if abs(ch - c) < 1e-14:
        raise PoleError("x has a pole where cosh v = cosh v_inf")
    return ((1 - a) * ch + (1 + a) * c) / ((1 - a * a) * h * (ch - c))


def _dx_c(a, h, c, v):
    v = complex(v)
    return -2 * c * cmath.sinh(v) / ((1 - a * a) * h * (cmath.cosh(v) - c) ** 2)


def x_of_v(a: float, h: float, gamma_minus: float, v) -> complex:
    """x(v), with x(i pi) = gamma_- and x(+inf) = gamma_+ = 1/((a+1)h); a != 1."""
    if a == 1:
        raise ValueError("a = 1 uses x_of_v_a1")
    return _x_c(a, h, c_from_gamma(a, h, gamma_minus), v)


def dx_of_v(a: float, h: float, gamma_minus: float, v) -> complex:
    return _dx_c(a, h, c_from_gamma(a, h, gamma_minus), v)


def x_of_v_a1(h: float, rho: float, v) -> complex:
    """a = 1: x(v) = (1 + rho / cosh v) / (2h), with v_inf = i pi/2."""
    return (1 + rho / cmath.cosh(complex(v))) / (2 * h)


def dx_of_v_a1(h: float, rho: float, v) -> complex:
    v = complex(v)
    return -rho * cmath.sinh(v) / (2 * h * cmath.cosh(v) ** 2)


# -- omega --------------------------------------------------------------------------------------------


def expansion_coefficients(a: float, n: float, c: float) -> dict:
    """A3, A2, B2, A1, B1, C0 of the Laurent expansion of omega at v_inf."""
    vi = _vinf_of_c(c)
    ct = cmath.cosh(vi) / cmath.sinh(vi)
    csch2 = 1 / cmath.sinh(vi) ** 2
    return {
        "A3": 8 * ct**3 / 3,
        "A2": 8 * ct**2 * (a + csch2),
        "B2": 4 * ct**2 * (1 - a * a),
        "A1": 4 * ct / 3 * (6 * ct**4 + (6 * a - 8) * ct**2 + 3 * (1 - a) ** 2),
        "B1": 4 * ct * (1 - a * a) * (ct**2 - (1 - a)),
        "C0": 2 * (1 - a * a) ** 3 * (n - 2),
    }


@dataclass(frozen=True)
class OmegaFunction:
    """``omega(v) = sum_k a_k (zeta^(k)(v - v_inf) - zeta^(k)(-v - v_inf))``."""

    b: float
    v_inf: complex
    coeffs: tuple  # a_0 .. a_3

    def _sum(self, v, shift: int, sign: int) -> complex:
        v = complex(v)
        return sum(
            ak * (zeta(self.b, v - self.v_inf, k + shift)
                  + sign * zeta(self.b, -v - self.v_inf, k + shift))
            for k, ak in enumerate(self.coeffs)
            if ak != 0
        )

    def __call__(self, v) -> complex:
        return self._sum(v, 0, -1)

    def derivative(self, v) -> complex:
        return self._sum(v, 1, +1)

    def kappa(self, beta: float) -> complex:
        """Coefficient of exp(-beta v) in the large-v expansion."""
        e_p, e_m = cmath.exp(beta * self.v_inf), cmath.exp(-beta * self.v_inf)
        return sum(ak * beta**k * ((-1) ** k * e_p + e_m) for k, ak in enumerate(self.coeffs))


def omega_coeffs(a: float, n: float, c: float, G: float, H: float) -> tuple:
    co = expansion_coefficients(a, n, c)
    pref = 1 / ((4 - n * n) * (1 - a * a) ** 3)
    return (
        pref * co["C0"],
        pref * (co["A1"] * G + co["B1"] * H),
        pref * (co["A2"] * G + co["B2"] * H),
        pref * co["A3"] * G,
    )


def omega_build(a: float, n: float, g: float, h: float, gamma_minus: float) -> OmegaFunction:
    if a == 1:
        raise ValueError("a = 1: use omega_matched")
    c = c_from_gamma(a, h, gamma_minus)
    return OmegaFunction(b_of_n(n), _vinf_of_c(c), omega_coeffs(a, n, c, g / h**3, 1 / h**2))


def kappa(a: float, n: float, c: float, G: float, H: float, beta: float) -> complex:
    """Closed-form kappa(beta) for V'_0 = x - g x^2, with G = g/h^3 and H = 1/h^2."""
    co = expansion_coefficients(a, n, c)
    vi = _vinf_of_c(c)
    pref = 1 / ((4 - n * n) * (1 - a * a) ** 3)
    sh, ch = cmath.sinh(beta * vi), cmath.cosh(beta * vi)
    return pref * (
        co["A3"] * G * (-2 * beta**3 * sh)
        + (co["A2"] * G + co["B2"] * H) * 2 * beta**2 * ch
        + (co["A1"] * G + co["B1"] * H) * (-2 * beta * sh)
        + co["C0"] * 2 * ch
    )


# -- omega from principal-part matching (used at a = 1, and as a check elsewhere) ------------------


def laurent_coefficients(f, v0: complex, r: float = 0.05, M: int = 256) -> np.ndarray:
    """Principal part of f at v0: coefficients of (v - v0)^-4 .. (v - v0)^-1 (trapezoid rule)."""
    th = 2 * np.pi * np.arange(M) / M
    z = r * np.exp(1j * th)
    vals = np.array([f(v0 + zz) for zz in z])
    return np.array([np.mean(vals * z ** (-m)) for m in (-4, -3, -2, -1)])


def target(a: float, n: float, g: float, h: float, p: float, v) -> complex:
    """x'(v) times the part of -W_part(x) + 1/x that is singular at v_inf.

    ``p`` is c = cosh v_inf for a != 1 and rho = 1 - 2 h gamma_- at a = 1.
    """
    if a == 1:
        x, dx = x_of_v_a1(h, p, v), dx_of_v_a1(h, p, v)
        y = 1 / h - x
        Wp = (2 * (x - g * x * x) - n * (y - g * y * y)) / (4 - n * n)
        return dx * (-Wp + 1 / x)
    x, dx = _x_c(a, h, p, v), _dx_c(a, h, p, v)
    return dx * (-2 * (x - g * x * x) / (4 - n * n) + 2 / ((n + 2) * x))


def omega_matched(a: float, n: float, g: float, h: float, p: float) -> OmegaFunction:
    """omega whose principal part at v_inf matches ``target``, solved numerically."""
    b = b_of_n(n)
    vi = 0.5j * math.pi if a == 1 else _vinf_of_c(p)
    others = (0, 1j * math.pi, -1j * math.pi, -vi, 2j * math.pi - vi, -2j * math.pi - vi)
    dist = min(abs(vi - s) for s in others if abs(vi - s) > 1e-9)
    r = min(0.25, 0.3 * dist)
    rhs = laurent_coefficients(lambda v: target(a, n, g, h, p, v), vi, r)
    cols = []
    for k in range(4):
        basis = OmegaFunction(b, vi, tuple(1.0 if j == k else 0.0 for j in range(4)))
        cols.append(laurent_coefficients(basis, vi, r))
    coeffs = np.linalg.solve(np.array(cols).T, rhs)
    return OmegaFunction(b, vi, tuple(complex(c) for c in coeffs))


# -- critical solutions ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EndpointConditions:
    omega_at_ipi: complex
    kappa_b: float
    kappa_2mb: float
    kappa_2pb: float


@dataclass(frozen=True)
class CriticalSolution:
    a: float
    n: float
    g: float
    h: float
    v_inf: complex
    gamma_minus: float
    coefficients: dict | None
    kappa_b: float
    kappa_2mb: float
    kappa_2pb: float
    phase: str
    omega: OmegaFunction = field(repr=False, compare=False)
    rho: float | None = None  # a = 1 parameter

    @property
    def b(self) -> float:
        return b_of_n(self.n)

    @property
    def gamma_plus(self) -> float:
        return 1 / ((self.a + 1) * self.h)

    @property
    def c_inf(self) -> float:
        return cmath.cosh(self.v_inf).real

    def x(self, v) -> complex:
        if self.a == 1:
            return x_of_v_a1(self.h, self.rho, v)
        return _x_c(self.a, self.h, self.c_inf, v)

    def dx(self, v) -> complex:
        if self.a == 1:
            return dx_of_v_a1(self.h, self.rho, v)
        return _dx_c(self.a, self.h, self.c_inf, v)

    def v_of_x(self, x) -> complex:
        """Preimage of x on the physical sheet (Re v >= 0, |Im v| <= pi)."""
        x = complex(x)
        if self.a == 1:
            ch = self.rho / (2 * self.h * x - 1)
        else:
            a, h, c = self.a, self.h, self.c_inf
            ch = c * (1 + a + x * (1 - a * a) * h) / (x * (1 - a * a) * h - (1 - a))
        return complex(np.arccosh(ch))


def endpoint_conditions(sol: CriticalSolution) -> EndpointConditions:
    """omega(i pi) by direct evaluation; kappa(beta) at b, 2-b, 2+b."""
    om = sol.omega
    b = sol.b
    if sol.a == 1:
        ks = [om.kappa(beta) for beta in (b, 2 - b, 2 + b)]
    else:
        G, H = sol.g / sol.h**3, 1 / sol.h**2
        ks = [kappa(sol.a, sol.n, sol.c_inf, G, H, beta) for beta in (b, 2 - b, 2 + b)]
    return EndpointConditions(om(1j * math.pi), *(k.real for k in ks))


def _affine_conditions(a: float, n: float, c: float):
    """(const, d/dG, d/dH) of the pair (omega(i pi), kappa(b)), affine in (G, H)."""
    b = b_of_n(n)
    vi = _vinf_of_c(c)

    def conds(G, H):
        om = OmegaFunction(b, vi, omega_coeffs(a, n, c, G, H))
        return np.array([om(1j * math.pi), om.kappa(b)])

    base = conds(0.0, 0.0)
    return base, conds(1.0, 0.0) - base, conds(0.0, 1.0) - base


def _solve_GH(a: float, n: float, c: float) -> tuple[float, float]:
    base, dG, dH = _affine_conditions(a, n, c)
    M = np.array([[dG[0], dH[0]], [dG[1], dH[1]]])
    M = np.vstack([M.real, M.imag])
    rhs = -np.concatenate([base.real, base.imag])
    if not np.all(np.isfinite(M)) or np.linalg.cond(M) > 1e15:
        raise OutOfRangeError(f"singular endpoint system at cosh v_inf = {c}")
    (G, H), *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return float(G), float(H)


def _raw(a: float, n: float, s: float):
    """(G, H, kappa(2-b) scaled to unit C0 term) at path coordinate s; no range checks."""
    c, vi = path_point(s)
    G, H = _solve_GH(a, n, c)
    b = b_of_n(n)
    k2 = kappa(a, n, c, G, H, 2 - b).real
    scale = abs(2 * (n - 2) / (4 - n * n))  # the C0 contribution to kappa at beta = 0
    return G, H, k2 / scale


_PHASE_TOL = 1e-8


def _phase(k2mb: float, k2pb: float) -> str:
    if abs(k2mb) <= _PHASE_TOL:
        if k2pb < 0:
            return "dilute"
        raise OutOfRangeError("kappa(2-b) = 0 but kappa(2+b) >= 0")
    if k2mb > 0:
        return "dense"
    raise OutOfRangeError(f"kappa(2-b) = {k2mb:.3g} < 0: beyond the dilute endpoint")


def _finish(a, n, c, G, H, phase=None) -> CriticalSolution:
    if not H > 0:
        raise OutOfRangeError(f"1/h^2 = {H:.6g} is not positive at cosh v_inf = {c}")
    h = 1 / math.sqrt(H)
    g = G * h**3
    if g < -1e-13:
        raise OutOfRangeError(f"g = {g:.6g} is negative at cosh v_inf = {c}")
    g = max(g, 0.0)
    G = g / h**3
    b = b_of_n(n)
    om = OmegaFunction(b, _vinf_of_c(c), omega_coeffs(a, n, c, G, H))
    k = [kappa(a, n, c, G, H, beta).real for beta in (b, 2 - b, 2 + b)]
    return CriticalSolution(
        a, n, g, h, _vinf_of_c(c), gamma_from_c(a, h, c), expansion_coefficients(a, n, c),
        k[0], k[1], k[2], phase or _phase(k[1], k[2]), om,
    )


def solve_critical_point(a: float, n: float, v_inf) -> CriticalSolution:
    """Point of the non-generic line at the given v_inf (a != 1)."""
    if a == 1:
        raise ValueError("a = 1: use critical_point_a1")
    if not 0 <= n < 2:
        raise ValueError("need 0 <= n < 2")
    c = cmath.cosh(complex(v_inf)).real
    if c <= -1 or abs(c - 1) < 1e-12 or abs(c) < 1e-14:
        raise OutOfRangeError(f"cosh v_inf = {c} is outside the admissible range")
    G, H = _solve_GH(a, n, c)
    return _finish(a, n, c, G, H)


def solve_critical_point_c(a: float, n: float, c: float) -> CriticalSolution:
    return solve_critical_point(a, n, _vinf_of_c(c))


# -- a = 1 closed forms ------------------------------------------------------------------------------


def critical_line_a1(n: float, rho: float) -> tuple[float, float]:
    """(g, h) on the a = 1 line, rho = 1 - 2 h gamma_-."""
    b = b_of_n(n)
    sp, sm = math.sqrt(2 + n), math.sqrt(2 - n)
    D = 2 * b * sp * rho - sm * (1 + (1 - b * b) * rho**2 / 2)
    if D == 0:
        raise OutOfRangeError("rho at a pole of the parametrization")
    g_over_h = (2 * b * sp * rho - 2 * sm) / D
    h2 = (
        b * rho**2 / (48 * math.sqrt(4 - n * n))
        * (b * sp * (6 + (1 - b * b) * rho**2) - 4 * (1 - b * b) * sm * rho) / D
    )
    if rho < 0 or h2 <= 0 or g_over_h < -1e-14:
        raise OutOfRangeError(f"rho = {rho} gives g/h = {g_over_h:.4g}, h^2 = {h2:.4g}")
    h = math.sqrt(h2)
    return max(g_over_h, 0.0) * h, h


def rho_g0_a1(n: float) -> float:
    """rho at the g = 0 end of the a = 1 line."""
    return math.sqrt(2 - n) / (b_of_n(n) * math.sqrt(2 + n))


def dilute_point_a1_closed(n: float) -> tuple[float, float]:
    b = b_of_n(n)
    q = math.sqrt((2 - n) * (6 + n))
    h2 = (2 - b) * b / (12 * (1 - b) ** 2) * (4 - q) / ((2 + n) * q)
    h = math.sqrt(h2)
    return (1 + math.sqrt((2 - n) / (6 + n))) * h, h


def critical_point_a1(n: float, rho: float, phase: str | None = None) -> CriticalSolution:
    g, h = critical_line_a1(n, rho)
    om = omega_matched(1.0, n, g, h, rho)
    b = b_of_n(n)
    k = [om.kappa(beta).real for beta in (b, 2 - b, 2 + b)]
    return CriticalSolution(
        1.0, n, g, h, 0.5j * math.pi, (1 - rho) / (2 * h), None,
        k[0], k[1], k[2], phase or _phase(k[1], k[2]), om, rho,
    )


def _kappa_a1(n: float, rho: float) -> float:
    g, h = critical_line_a1(n, rho)
    return omega_matched(1.0, n, g, h, rho).kappa(2 - b_of_n(n)).real


# -- the physical segment of the line, a != 1 ------------------------------------------------------


_S_LO = -math.pi + 1e-3


def _scan_grid(a: float = 0.0) -> np.ndarray:
    grid = [np.linspace(_S_LO, -1e-3, 700), np.linspace(1e-3, 6.0, 300)]
    if abs(a - 1) < 0.1:
        # near a = 1 the line shrinks onto v_inf = i pi/2 + i (a-1) rho/2
        w = 1.5 * abs(a - 1)
        grid.append(np.linspace(-math.pi / 2 - w, -math.pi / 2 + w, 400))
    return np.unique(np.concatenate(grid))


def _G_at(a, n, s):
    return _solve_GH(a, n, path_point(s)[0])[0]


def _true_zero(G0: float, H0: float) -> bool:
    # a sign change of G through a pole leaves |G| large
    return H0 > 0 and abs(G0) <= 1e-8 * max(1.0, H0**1.5)


def _g_zero_candidates(a: float, n: float) -> list[float]:
    """Path coordinates where G = g/h^3 vanishes with H = 1/h^2 > 0 (true zeros, not poles)."""
    grid = _scan_grid(a)
    vals = []
    for s in grid:
        try:
            vals.append(_solve_GH(a, n, path_point(s)[0]))
        except OutOfRangeError:
            vals.append((math.nan, math.nan))
    out = []
    for (s1, (G1, H1)), (s2, (G2, H2)) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if not (G1 * G2 < 0 and H1 > 0 and H2 > 0) or s1 < 0 < s2:
            continue
        s0 = optimize.brentq(lambda s: _G_at(a, n, s), s1, s2, xtol=1e-15)
        if _true_zero(*_solve_GH(a, n, path_point(s0)[0])):
            out.append(s0)
    return out


def _g_zero(a: float, n: float, guess: float | None = None) -> float:
    if guess is not None:
        for w in (1e-3, 1e-2, 5e-2):
            lo, hi = max(guess - w, _S_LO), guess + w
            if lo < 0 < hi:
                lo, hi = (lo, -1e-6) if guess < 0 else (1e-6, hi)
            try:
                if _G_at(a, n, lo) * _G_at(a, n, hi) < 0:
                    s0 = optimize.brentq(lambda s: _G_at(a, n, s), lo, hi, xtol=1e-15)
                    if _true_zero(*_solve_GH(a, n, path_point(s0)[0])):
                        return s0
            except OutOfRangeError:
                pass
    cands = _g_zero_candidates(a, n)
    if not cands:
        raise NoDilutePointError(f"no g = 0 end of the line found for a = {a}, n = {n}")
    # nearest to the n -> 0 location c = (1-a)/a
    c0 = (1 - a) / a if a > 0 else 1e6
    ref = _path_coord(min(max(c0, -1 + 1e-9), 1e6))
    return min(cands, key=lambda s: abs(s - ref))


def _dense_direction(a: float, n: float, s0: float) -> float:
    for eps in (1e-6, 1e-5, 1e-4):
        for d in (1.0, -1.0):
            G, H = _solve_GH(a, n, path_point(s0 + d * eps)[0])
            if G > 0 and H > 0:
                return d
    raise OutOfRangeError("no admissible side at the g = 0 end")


@dataclass(frozen=True)
class LineSegment:
    """Physical part of the line in path coordinates, from g = 0 (s_g0) to the dilute end."""

    a: float
    n: float
    s_g0: float
    s_dilute: float


def _scan(a: float, n: float):
    out = []
    for s in _scan_grid(a):
        try:
            out.append((s, *_raw(a, n, s)))
        except OutOfRangeError:
            out.append((s, math.nan, math.nan, math.nan))
    return out


def _admissible(G, H) -> bool:
    return G > 0 and H > 0


def _dilute_candidates(a: float, n: float) -> list[tuple[float, float]]:
    """(s*, direction towards the dense side) for each admissible sign change of kappa(2-b)."""
    rows = _scan(a, n)
    out = []
    for (s1, G1, H1, k1), (s2, G2, H2, k2) in zip(rows, rows[1:]):
        if s1 < 0 < s2 or not (_admissible(G1, H1) and _admissible(G2, H2)) or not k1 * k2 < 0:
            continue
        f = lambda t: _raw(a, n, t)[2]
        st = optimize.brentq(f, s1, s2, xtol=1e-15, rtol=1e-15)
        G, H, k = _raw(a, n, st)
        if _admissible(G, H) and abs(k) <= 1e-9:
            out.append((st, 1.0 if k2 > 0 else -1.0))
    return out


_S_GAP = 2e-3  # the endpoint system degenerates as v_inf -> 0


def _walk_to_g0(a: float, n: float, s_star: float, d: float) -> float:
    step, s_prev = 1e-4, s_star
    while True:
        s = s_prev + d * step
        if abs(s) < _S_GAP:
            s = d * _S_GAP
        if s <= _S_LO or s > 12:
            raise NoDilutePointError("no g = 0 end inside the parameter range")
        G, H, _ = _raw(a, n, s)
        if G <= 0 and H > 0:
            break
        if H <= 0:
            raise OutOfRangeError("1/h^2 changes sign before g reaches 0")
        s_prev, step = s, min(step * 2, 0.02)
    if s_prev * s < 0:
        # root inside the degenerate window around v_inf = 0: interpolate across it
        G1, G2 = _G_at(a, n, s_prev), _G_at(a, n, s)
        return s_prev + (s - s_prev) * G1 / (G1 - G2)
    return optimize.brentq(lambda t: _G_at(a, n, t), min(s_prev, s), max(s_prev, s), xtol=1e-15)


def line_segment(a: float, n: float) -> LineSegment:
    """Locate the dilute end by scanning, then walk to g = 0 along the dense side."""
    if a == 1:
        raise ValueError("a = 1: the line is parametrized by rho")
    cands = _dilute_candidates(a, n)
    if not cands:
        raise NoDilutePointError(f"no dilute end for a = {a}, n = {n}: line absent")
    good = []
    for st, d in cands:
        try:
            good.append(LineSegment(a, n, _walk_to_g0(a, n, st, d), st))
        except OutOfRangeError:
            continue
    if not good:
        raise NoDilutePointError(f"no line reaching g = 0 for a = {a}, n = {n}")
    return min(good, key=lambda seg: abs(seg.s_g0 - seg.s_dilute))


def dilute_point(a: float, n: float) -> CriticalSolution:
    """End point of the non-generic line, where kappa(2-b) vanishes as well."""
    if not 0 < n < 2:
        raise ValueError("need 0 < n < 2")
    if a == 1:
        hi = rho_g0_a1(n)
        lo = hi
        while _kappa_a1(n, lo) > 0:
            hi, lo = lo, lo * 0.97
            if lo < 1e-3:
                raise NoDilutePointError("no dilute point on the a = 1 line")
        rho = optimize.brentq(lambda r: _kappa_a1(n, r), lo, hi, xtol=1e-15, rtol=1e-15)
        return critical_point_a1(n, rho, phase="dilute")
    seg = line_segment(a, n)
    c = path_point(seg.s_dilute)[0]
    G, H = _solve_GH(a, n, c)
    sol = _finish(a, n, c, G, H, phase="dilute")
    if sol.kappa_2pb >= 0:
        raise OutOfRangeError("kappa(2+b) >= 0 at the dilute end")
    return sol


def trace_line(a: float, n: float, points: int = 40, max_move: float = 0.01) -> list[CriticalSolution]:
    """Points of the physical line from g = 0 to the dilute end.

    Steps are halved whenever (g, h) moves by more than ``max_move`` relative.
    """
    if a == 1:
        r_end = dilute_point(a, n).rho
        rhos = np.linspace(rho_g0_a1(n), r_end, points)
        return [critical_point_a1(n, r, "dilute" if i == points - 1 else "dense")
                for i, r in enumerate(rhos)]
    seg = line_segment(a, n)
    c0 = path_point(seg.s_g0)[0]
    out = [_finish(a, n, c0, 0.0, _solve_GH(a, n, c0)[1], "dense")]
    s, base = seg.s_g0, (seg.s_dilute - seg.s_g0) / (points - 1)
    while s != seg.s_dilute:
        step = base
        while True:
            t = s + step
            if (t - seg.s_dilute) * base >= 0:
                t = seg.s_dilute
            c = path_point(t)[0]
            sol = _finish(a, n, c, *_solve_GH(a, n, c), "dilute" if t == seg.s_dilute else "dense")
            prev = out[-1]
            move = math.hypot(sol.g - prev.g, sol.h - prev.h) / math.hypot(prev.g, prev.h)
            if move <= max_move or abs(step) < 1e-9:
                break
            step /= 2
        out.append(sol)
        s = t
    return out


def solution_at(a: float, n: float, param: float) -> CriticalSolution:
    """Solved point at a line parameter as used by ``line_points`` (rho at a = 1, else s)."""
    if a == 1:
        return critical_point_a1(n, param)
    if abs(param) < _S_GAP:
        raise OutOfRangeError("parameter inside the degenerate window around v_inf = 0")
    c = path_point(param)[0]
    return _finish(a, n, c, *_solve_GH(a, n, c))


def line_points(a: float, n: float, points: int = 200) -> list[tuple[float, CriticalSolution]]:
    """Exactly ``points`` (param, solution) pairs, uniform in the line parameter, g = 0 end first.

    The parameter is rho at a = 1 and the path coordinate s otherwise.
    """
    if points < 2:
        raise ValueError("need at least 2 points")
    if a == 1:
        return [(s.rho, s) for s in trace_line(a, n, points)]
    seg = line_segment(a, n)
    out = []
    for i, t in enumerate(np.linspace(seg.s_g0, seg.s_dilute, points)):
        last = i == points - 1
        if i == 0:
            t = seg.s_g0
        elif last:
            t = seg.s_dilute
        elif abs(t) < _S_GAP:
            t = math.copysign(_S_GAP, seg.s_dilute)
        c = path_point(t)[0]
        G, H = (0.0, _solve_GH(a, n, c)[1]) if i == 0 else _solve_GH(a, n, c)
        out.append((float(t), _finish(a, n, c, G, H, "dilute" if last else "dense")))
    return out


def a_c_threshold(n: float, tol: float = 1e-7) -> float:
    """Bisection for the a at which the dilute end reaches g = 0."""
    if not 0 < n < 2:
        raise ValueError("need 0 < n < 2")
    state = {"s": None}

    def exists(a):
        try:
            s0 = _g_zero(a, n, state["s"])
        except NoDilutePointError:
            return False
        state["s"] = s0
        return _raw(a, n, s0)[2] > 0

    lo, hi = 1.0 + 1e-3, 2.0
    if not exists(lo):
        raise RuntimeError("line already absent just above a = 1")
    s_lo = state["s"]
    while exists(hi):
        lo, hi, s_lo = hi, hi * 1.5, state["s"]
        if hi > 1e4:
            raise RuntimeError("no threshold below a = 1e4")
    while hi - lo > tol * hi:
        mid = (lo + hi) / 2
        state["s"] = s_lo
        if exists(mid):
            lo, s_lo = mid, state["s"]
        else:
            hi = mid
    return (lo + hi) / 2


# -- n -> 0 closed forms ------------------------------------------------------------------------------


SIGMA_STAR = (3 - math.sqrt(3)) / 6


@dataclass(frozen=True)
class NZeroPoint:
    g: float
    h: float
    sigma: float
    c_inf: float | None
    g_sigma: float
    h_sigma: float
    coalescence_residual: float

    @property
    def residual(self) -> float:
        """Mismatch between the c_inf and sigma parametrizations."""
        return max(abs(self.g - self.g_sigma), abs(self.h - self.h_sigma))


def _Q(a, c, sign):
    return 2 * (a - 1) ** 2 + 4 * a * (a - 1) * c + (2 * a * a + sign) * c * c


def nzero_line_c(a: float, c: float) -> tuple[float, float]:
    g_over_h = 2 * (a * a - 1) * (c + 1) * (a * c + a - 1) / _Q(a, c, 1)
    h2 = -c * c / (4 * (a * a - 1) ** 2 * (c + 1) ** 2) * _Q(a, c, -1) / _Q(a, c, 1)
    if g_over_h < -1e-14 or h2 <= 0:
        raise OutOfRangeError(f"c_inf = {c} gives g/h = {g_over_h:.4g}, h^2 = {h2:.4g}")
    h = math.sqrt(h2)
    return max(g_over_h, 0.0) * h, h


def sigma_of_c(a: float, c: float) -> float:
    return 2 * (a * c + a - 1) ** 2 / _Q(a, c, 1)


def nzero_line_sigma(a: float, sigma: float) -> tuple[float, float]:
    if not 0 < sigma <= SIGMA_STAR + 1e-15:
        raise OutOfRangeError(f"sigma = {sigma} outside (0, sigma*]")
    g = math.sqrt(max(sigma * (1 - sigma) * (1 - 2 * sigma) / 2, 0.0))
    return g, g / ((1 + a) * (math.sqrt(2 * sigma * (1 - sigma)) + sigma))


def _coalescence_residual(a: float, g: float, h: float, sigma: float) -> float:
    # pure triangulations: R = 1 + 2 g R S, S = g (2R + S^2), with sigma = g S
    S = sigma / g
    R = 1 / (1 - 2 * sigma)
    rel = max(abs(S - g * (2 * R + S * S)), abs(R - 1 - 2 * g * R * S))
    return max(rel, abs(1 / ((a + 1) * h) - (S + 2 * math.sqrt(R))))


def nzero_closed_forms(
    a: float, c_inf: float | None = None, sigma: float | None = None, rho: float | None = None
) -> NZeroPoint:
    """n -> 0 line: both parametrizations, their mismatch and the coalescence check.

    At a = 1 the c_inf form is 0/0; pass ``rho`` instead, with c_inf ~ -(a-1) rho / 2.
    """
    if sum(p is not None for p in (c_inf, sigma, rho)) != 1:
        raise ValueError("give exactly one of c_inf, sigma, rho")
    if rho is not None:
        if a != 1:
            raise ValueError("rho parametrizes the a = 1 line only")
        g, h = critical_line_a1(0.0, rho)
        sigma = 2 * (1 - rho / 2) ** 2 / (2 - 2 * rho + 0.75 * rho * rho)
        gs, hs = nzero_line_sigma(a, sigma)
    elif c_inf is not None:
        if a == 1:
            raise ValueError("a = 1: use the rho parametrization")
        g, h = nzero_line_c(a, c_inf)
        sigma = sigma_of_c(a, c_inf)
        gs, hs = nzero_line_sigma(a, sigma)
    else:
        g, h = gs, hs = nzero_line_sigma(a, sigma)
    return NZeroPoint(g, h, sigma, c_inf, gs, hs, _coalescence_residual(a, gs, hs, sigma))


def nzero_dilute_point(a: float) -> tuple[float, float]:
    return 1 / (2 * 3**0.75), 1 / ((1 + a) * (3**0.75 + 3**0.25))


# -- density and resolvent on the line ----------------------------------------------------------------


def density_v_max(sol: CriticalSolution) -> float:
    """Largest v at which the cancellation in omega(v + i pi) - omega(v - i pi) leaves 8 digits."""
    # the surviving term decays faster than the cancelled e^{-b v} by e^{-2(1-b) v} (dense)
    # or e^{-2 v} (dilute)
    return 9.0 if sol.phase == "dilute" else 9.0 / (1 - sol.b)


def density_on_line(sol: CriticalSolution, v: float) -> tuple[float, float]:
    """(x, rho(x)) at x = x(v + i pi) on the cut, v > 0."""
    if not v > 0:
        raise ValueError("need v > 0")
    if v > density_v_max(sol):
        raise ValueError("v too large: x is indistinguishable from gamma_+")
    up, dn = complex(v, math.pi), complex(v, -math.pi)
    x = sol.x(up)
    rho = (sol.omega(up) - sol.omega(dn)) / (2j * math.pi * sol.dx(up))
    return x.real, rho.real


def particular_resolvent(sol: CriticalSolution, x) -> complex:
    """W_part: polynomial-type solution of the one-pole equation."""
    n, g = sol.n, sol.g
    V = lambda y: y - g * y * y
    s = involution_of(Bending(sol.a, sol.h))
    sx = s(x)
    return (2 * V(x) + n * s.deriv(x) * V(sx)) / (4 - n * n) - n * s.deriv2(x) / (
        2 * (n + 2) * s.deriv(x)
    )


def resolvent_on_line(sol: CriticalSolution, x) -> complex:
    """W = W_part + omega(v(x)) / x'(v(x)) off the cut."""
    v = sol.v_of_x(x)
    return particular_resolvent(sol, x) + sol.omega(v) / sol.dx(v)
