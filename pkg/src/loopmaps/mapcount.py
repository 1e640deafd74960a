"""Maps with controlled face degrees: the (R, S) system, disk series, cut and resolvent.

Conventions: ``g[k-1]`` is the weight of a face of degree ``k``; the potential is
``V(x) = x^2/2 - sum_k g_k x^k / k``; ``F_p`` counts rooted maps with a boundary of
length ``p`` and ``F_0 = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import integrate

from .qseries import InsufficientOrderError, TruncatedSeries


class InadmissibleWeightsError(RuntimeError):
    """The (R, S) fixed point does not exist (weights beyond criticality) or was not found."""


class CriticalityError(RuntimeError):
    pass


class QuadratureError(RuntimeError):
    pass


T_LABEL = ("t",)


# -- weights ---------------------------------------------------------------------------------


def _formal_weight(spec, order) -> TruncatedSeries:
    order = (None,) if order is None else order
    if isinstance(spec, TruncatedSeries):
        if spec.labels != T_LABEL:
            raise ValueError("formal weights must be series in the size marker 't'")
        if spec.constant_term() != 0:
            raise ValueError("formal weights need a vanishing constant term")
        return spec
    if isinstance(spec, tuple):
        c, m = spec
    else:
        c, m = spec, 1
    if m < 1:
        raise ValueError("size-marker power must be >= 1")
    return TruncatedSeries({(m,): Fraction(c)}, T_LABEL, order)


@dataclass(frozen=True)
class WeightProfile:
    """Face weights g_1..g_D.

    Numeric profiles carry floats.  Formal profiles carry series in the size
    marker ``t`` with zero constant term; ``formal({3: 1})`` means ``g_3 = t``.
    """

    g: tuple
    mode: str = "numeric"

    def __post_init__(self):
        if self.mode not in ("numeric", "formal"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "numeric" and any(v < 0 for v in self.g):
            raise ValueError("numeric face weights must be non-negative")

    @classmethod
    def numeric(cls, weights: Mapping[int, float] | Sequence[float]) -> "WeightProfile":
        if isinstance(weights, Mapping):
            D = max(weights, default=0)
            seq = [float(weights.get(k, 0.0)) for k in range(1, D + 1)]
        else:
            seq = [float(v) for v in weights]
        while seq and seq[-1] == 0:
            seq.pop()
        return cls(tuple(seq), "numeric")

    @classmethod
    def formal(cls, weights: Mapping[int, object], order: int | None = None) -> "WeightProfile":
        D = max(weights, default=0)
        zero = TruncatedSeries({}, T_LABEL, (None,) if order is None else order)
        seq = [
            _formal_weight(weights[k], order) if k in weights else zero for k in range(1, D + 1)
        ]
        return cls(tuple(seq), "formal")

    @property
    def D(self) -> int:
        return len(self.g)

    def weight(self, k: int):
        if 1 <= k <= self.D:
            return self.g[k - 1]
        return 0.0 if self.mode == "numeric" else TruncatedSeries({}, T_LABEL, (None,))

    def nonzero(self):
        for k, gk in enumerate(self.g, start=1):
            if (gk != 0) if self.mode == "numeric" else not gk.is_zero():
                yield k, gk

    @property
    def has_odd(self) -> bool:
        return any(k % 2 for k, _ in self.nonzero())

    def potential_derivative(self, x):
        """``V'(x) = x - sum_k g_k x^(k-1)``."""
        self._need_numeric()
        return x - sum(gk * x ** (k - 1) for k, gk in self.nonzero())

    def _need_numeric(self):
        if self.mode != "numeric":
            raise ValueError("operation needs a numeric weight profile")


# -- Motzkin path polynomials ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _motzkin_coeffs(p: int) -> tuple:
    return tuple(math.comb(p, 2 * i) * math.comb(2 * i, i) for i in range(p // 2 + 1))


def motzkin_poly(p: int, R, S):
    """Weighted count of paths (0,0) -> (p,0) with up/down steps weighted R (per pair) and flat S."""
    if p < 0:
        raise ValueError("path length must be >= 0")
    return sum(c * R**i * S ** (p - 2 * i) for i, c in enumerate(_motzkin_coeffs(p)))


def _motzkin_all(pmax: int, R, S) -> list:
    """[P_0, ..., P_pmax] sharing the powers of R and S (works for series too)."""
    Rp = [R**0]
    for _ in range(pmax // 2):
        Rp.append(Rp[-1] * R)
    Sp = [S**0]
    for _ in range(pmax):
        Sp.append(Sp[-1] * S)
    out = []
    for p in range(pmax + 1):
        cs = _motzkin_coeffs(p)
        acc = Rp[0] * 0
        for i, c in enumerate(cs):
            acc = acc + Rp[i] * Sp[p - 2 * i] * c
        out.append(acc)
    return out


@lru_cache(maxsize=None)
def _motzkin_table(pmax: int):
    """Coefficient matrix C[p, i] with the matching S exponents p - 2i (masked where i > p/2)."""
    imax = pmax // 2
    C = np.zeros((pmax + 1, imax + 1))
    E = np.zeros((pmax + 1, imax + 1), dtype=int)
    for p in range(pmax + 1):
        for i, c in enumerate(_motzkin_coeffs(p)):
            C[p, i] = c
            E[p, i] = p - 2 * i
    return C, E, np.arange(imax + 1)


def _motzkin_float(pmax: int, R: float, S: float):
    """Arrays of P_p, dP_p/dR, dP_p/dS for p = 0..pmax."""
    C, E, I = _motzkin_table(pmax)
    Spow = S ** np.arange(pmax + 1)
    Rpow = R**I
    terms = C * Spow[E]
    P = terms @ Rpow
    dRpow = np.zeros_like(Rpow)
    dRpow[1:] = I[1:] * R ** (I[1:] - 1)
    dR = terms @ dRpow
    dS = np.zeros(pmax + 1)
    dS[1:] = np.arange(1, pmax + 1) * P[:-1]
    return P, dR, dS


# -- (R, S) system: numeric ------------------------------------------------------------------


@dataclass(frozen=True)
class RSState:
    u: float
    R: object
    S: object
    iterations: int = 0
    residual: float = 0.0
    dR_du: float = float("nan")
    condition: float = float("nan")
    critical: bool = False


def _system(w: WeightProfile, u: float, R: float, S: float):
    g = np.asarray(w.g, dtype=float)
    D = w.D
    P, dPR, dPS = _motzkin_float(D, R, S)
    ks = np.arange(1, D + 1)
    F1 = S - g @ P[ks - 1]
    F2 = R - u + S * S / 2 - 0.5 * (g @ P[ks])
    J = np.array(
        [
            [-(g @ dPR[ks - 1]), 1 - g @ dPS[ks - 1]],
            [1 - 0.5 * (g @ dPR[ks]), S - 0.5 * (g @ dPS[ks])],
        ]
    )
    return np.array([F1, F2]), J


def _picard_map(w: WeightProfile, u: float, R: float, S: float):
    g = np.asarray(w.g, dtype=float)
    D = w.D
    P, _, _ = _motzkin_float(D, R, S)
    ks = np.arange(1, D + 1)
    S_new = g @ P[ks - 1]
    R_new = u - S_new * S_new / 2 + 0.5 * (g @ P[ks])
    return R_new, S_new


def _newton(w, u, z, maxiter=60, tol=1e-14):
    """Newton with a doubled step once convergence is seen to be linear (double root)."""
    steps = []
    double = False
    for it in range(1, maxiter + 1):
        F, J = _system(w, u, *z)
        try:
            dz = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return z, it, double, False
        if not np.all(np.isfinite(dz)):
            return z, it, double, False
        nrm = float(np.max(np.abs(dz)))
        steps.append(nrm)
        if len(steps) >= 4 and not double:
            ratios = [steps[-i] / steps[-i - 1] for i in (1, 2, 3) if steps[-i - 1] > 0]
            if len(ratios) == 3 and all(0.4 < r < 0.6 for r in ratios):
                double = True
        z = z + (2.0 if double else 1.0) * dz
        if nrm <= tol * max(1.0, float(np.max(np.abs(z)))):
            return z, it, double, True
        if double and len(steps) > 1 and nrm > steps[-2]:
            # doubled steps stop helping once rounding dominates
            return z - 2.0 * dz, it, double, True
    return z, maxiter, double, False


def _diagnose(w, u, z):
    F, J = _system(w, u, *z)
    resid = float(np.max(np.abs(F)))
    cond = float(np.linalg.cond(J))
    try:
        d = np.linalg.solve(J, np.array([0.0, 1.0]))
        dRdu = float(d[0])
    except np.linalg.LinAlgError:
        dRdu = math.inf
    return resid, cond, dRdu


def _solve_numeric(w: WeightProfile, u: float, guess=None) -> RSState:
    if w.D == 0:
        return RSState(u, float(u), 0.0, 0, 0.0, 1.0, 1.0, False)
    its = 0
    if guess is None:
        R, S = float(u), 0.0
        bound = 1e8
        for its in range(1, 4001):
            Rn, Sn = _picard_map(w, u, R, S)
            if not (np.isfinite(Rn) and np.isfinite(Sn)) or abs(Rn) > bound or abs(Sn) > bound:
                raise InadmissibleWeightsError(f"(R, S) iteration diverges at u = {u}")
            step = max(abs(Rn - R), abs(Sn - S))
            R, S = Rn, Sn
            if step < 1e-9 * max(1.0, abs(R)):
                break
        lower = np.array([R, S])
    else:
        lower = None
        R, S = guess
    z, nits, double, ok = _newton(w, u, np.array([R, S], dtype=float))
    its += nits
    if not ok or not np.all(np.isfinite(z)) or (u > 0 and z[0] <= 0):
        raise InadmissibleWeightsError(f"no admissible (R, S) solution at u = {u}")
    if lower is not None and np.any(z < lower - 1e-6 * np.maximum(1.0, np.abs(lower))):
        raise InadmissibleWeightsError("Newton left the monotone Picard branch")
    resid, cond, dRdu = _diagnose(w, u, z)
    if resid > 1e-12 * max(1.0, abs(z[0])):
        raise InadmissibleWeightsError(f"(R, S) residual {resid:.3g} above tolerance at u = {u}")
    critical = double or cond > 1e10 or abs(dRdu) > 1e8
    return RSState(u, float(z[0]), float(z[1]), its, resid, dRdu, cond, critical)


# -- (R, S) system: formal -------------------------------------------------------------------


def _lift(gk: TruncatedSeries, order: int) -> TruncatedSeries:
    return TruncatedSeries({(e[0], 0): c for e, c in gk.items()}, ("t", "u"), (order, None))


def solve_rs_formal(w: WeightProfile, order: int):
    """R[u], S[u] as exact series in (t, u), truncated at t^order, polynomial in u."""
    if w.mode != "formal":
        raise ValueError("solve_rs_formal needs a formal weight profile")
    box = (order, None)
    u = TruncatedSeries.variable("u", ("t", "u"), box)
    R = u
    S = TruncatedSeries({}, ("t", "u"), box)
    gs = [(k, _lift(gk, order)) for k, gk in w.nonzero()]
    if not gs:
        return R, S
    D = max(k for k, _ in gs)
    prev = None
    for _ in range(order + 2):
        P = _motzkin_all(D, R, S)
        S_new = TruncatedSeries({}, ("t", "u"), box)
        half = TruncatedSeries({}, ("t", "u"), box)
        for k, gk in gs:
            S_new = S_new + gk * P[k - 1]
            half = half + gk * P[k]
        R = u - S_new * S_new * Fraction(1, 2) + half * Fraction(1, 2)
        S = S_new
        if prev is not None and prev == (R, S):
            break
        prev = (R, S)
    return R, S


def solve_rs(w: WeightProfile, u, order: int = 8, guess=None) -> RSState:
    """Solve the (R, S) system at ``u``.

    Numeric profiles: Picard iteration from (u, 0), then Newton.  Formal profiles:
    exact series in the size marker up to ``order``.
    """
    if w.mode == "formal":
        R, S = solve_rs_formal(w, order)
        uval = Fraction(u)
        return RSState(float(uval), R.substitute("u", uval), S.substitute("u", uval))
    if not 0 <= u <= 1:
        raise ValueError("u must lie in [0, 1]")
    return _solve_numeric(w, float(u), guess)


# -- disk series -----------------------------------------------------------------------------------


def _tutte_table(w: WeightProfile, pmax: int, order: int) -> list:
    """Coefficient lists F[m][f] for m <= pmax, f <= order, from Tutte's equation."""
    gs = []
    for k, gk in w.nonzero():
        cs = [(e[0], c) for e, c in gk.items() if e[0] <= order]
        if cs:
            gs.append((k, cs))
    # largest boundary length needed at each order: a weight of degree k and
    # size j, used at order f, reads F_{m+k-2} at order f - j
    need = [pmax] * (order + 1)
    for f in range(order, -1, -1):
        if f < order:
            need[f] = max(need[f], need[f + 1])
        for k, cs in gs:
            for j, _ in cs:
                if f - j >= 0:
                    need[f - j] = max(need[f - j], need[f] + k - 2)
    F = [[Fraction(0)] * (order + 1) for _ in range(need[0] + 1)]
    F[0][0] = Fraction(1)
    for f in range(order + 1):
        for m in range(1, need[f] + 1):
            acc = Fraction(0)
            for k in range(0, m - 1):
                a, b = F[k], F[m - 2 - k]
                for f1 in range(f + 1):
                    if a[f1] and b[f - f1]:
                        acc += a[f1] * b[f - f1]
            for k, cs in gs:
                idx = m + k - 2
                if idx < 0:
                    continue
                for j, c in cs:
                    if j <= f:
                        acc += c * F[idx][f - j]
            F[m][f] = acc
    return F[: pmax + 1]


def disk_series(w: WeightProfile, p: int, order: int, method: str = "rs_integration") -> TruncatedSeries:
    """Exact series of F_p in the size marker, truncated at ``t^order``."""
    if w.mode != "formal":
        raise ValueError("disk_series needs a formal weight profile; see disk_values")
    if p < 0:
        raise ValueError("boundary length must be >= 0")
    if p == 0:
        return TruncatedSeries.constant(1, T_LABEL, order)
    for _, gk in w.nonzero():
        if isinstance(gk.order, int) and gk.order < order:
            raise InsufficientOrderError(f"weights known to t^{gk.order} only, asked for t^{order}")
    if method == "tutte":
        F = _tutte_table(w, p, order)
        return TruncatedSeries({(f,): F[p][f] for f in range(order + 1)}, T_LABEL, order)
    if method != "rs_integration":
        raise ValueError(f"unknown method {method!r}")
    R, S = solve_rs_formal(w, order)
    return motzkin_poly(p, R, S).integrate_unit("u")


def disk_series_all(w: WeightProfile, pmax: int, order: int) -> list:
    """[F_0, ..., F_pmax] as exact series, sharing one Tutte table."""
    if w.mode != "formal":
        raise ValueError("disk_series_all needs a formal weight profile")
    F = _tutte_table(w, pmax, order)
    return [
        TruncatedSeries({(f,): F[m][f] for f in range(order + 1)}, T_LABEL, order)
        for m in range(pmax + 1)
    ]


# -- numeric path u -> (R[u], S[u]) -----------------------------------------------------------------


class RSPath:
    """R[u], S[u] on [0, 1] for a numeric profile.

    Solutions at Chebyshev nodes in ``t = sqrt(1 - u)`` (which smooths the square
    root that R develops at u = 1 at criticality) give an interpolant; values
    are then polished by Newton.
    """

    def __init__(self, w: WeightProfile, nodes: int = 40):
        w._need_numeric()
        self.w = w
        k = np.arange(nodes)
        t = 0.5 * (1 - np.cos(np.pi * (k + 0.5) / nodes))
        t = np.sort(t)[::-1]  # u ascending
        us = 1 - t * t
        Rs, Ss = [], []
        prev = None
        for u in us:
            st = _solve_numeric(w, float(u), prev)
            prev = (st.R, st.S)
            Rs.append(st.R)
            Ss.append(st.S)
        self.end = _solve_numeric(w, 1.0, prev)
        tt = np.append(t, 0.0)
        self._R = Chebyshev.fit(tt, np.append(Rs, self.end.R), nodes, domain=[0, 1])
        self._S = Chebyshev.fit(tt, np.append(Ss, self.end.S), nodes, domain=[0, 1])
        # skip Newton polishing when the interpolant already solves the system
        probe = 1 - np.linspace(0.013, 0.987, 23) ** 2
        worst = max(
            float(np.max(np.abs(_system(w, u, *self(u, polish=False))[0]))) for u in probe
        )
        self.smooth = worst < 1e-13

    @property
    def critical(self) -> bool:
        return self.end.critical

    def __call__(self, u: float, polish: bool = True) -> tuple[float, float]:
        t = math.sqrt(max(0.0, 1 - u))
        z = (float(self._R(t)), float(self._S(t)))
        if u >= 1:
            return self.end.R, self.end.S
        if not polish or self.smooth:
            return z
        if u <= 0 and self.w.weight(1) == 0:
            return 0.0, 0.0
        zz, _, _, ok = _newton(self.w, u, np.array(z), maxiter=30)
        if not ok or zz[0] < 0:
            st = _solve_numeric(self.w, u)
            return st.R, st.S
        return float(zz[0]), float(zz[1])

    def edges(self, u: float) -> tuple[float, float]:
        R, S = self(u)
        r = 2 * math.sqrt(max(R, 0.0))
        return S - r, S + r


@lru_cache(maxsize=32)
def rs_path(w: WeightProfile, nodes: int = 40) -> RSPath:
    return RSPath(w, nodes)


def disk_values(w: WeightProfile, pmax: int, nodes: int = 64) -> np.ndarray:
    """Numeric F_0..F_pmax as the u-integral of P_p, using u = 1 - t^2."""
    w._need_numeric()
    x, wt = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1)
    wt = 0.5 * wt
    out = np.zeros(pmax + 1)
    prev = None
    for ti, wi in sorted(zip(t, wt), reverse=True):
        u = 1 - ti * ti
        st = _solve_numeric(w, float(u), prev)
        prev = (st.R, st.S)
        P, _, _ = _motzkin_float(pmax, st.R, st.S)
        out += 2 * ti * wi * P
    out[0] = 1.0
    return out


# -- cut, resolvent, density ----------------------------------------------------------------------


@dataclass(frozen=True)
class Cut:
    gamma_minus: float
    gamma_plus: float
    critical: bool = False
    state: RSState | None = field(default=None, compare=False)

    def __contains__(self, x) -> bool:
        return self.gamma_minus < x < self.gamma_plus


@lru_cache(maxsize=64)
def cut_endpoints(w: WeightProfile) -> Cut:
    st = solve_rs(w, 1.0)
    r = 2 * math.sqrt(st.R)
    return Cut(st.S - r, st.S + r, st.critical, st)


def _quad(f, a, b, what: str, epsabs=1e-13, epsrel=1e-11, limit=200):
    val, err, *_ = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise QuadratureError(f"{what}: quadrature reached only {err:.2g}")
    return val, err


def _u_of_x(path: RSPath, x: float, tol: float = 1e-12) -> float:
    """Smallest u with x inside [S - 2 sqrt R, S + 2 sqrt R]."""
    side = 1 if x >= path(0.0)[1] else 0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        e = path.edges(mid)[side]
        inside = e >= x if side else e <= x
        if inside:
            hi = mid
        else:
            lo = mid
    return hi


def _disc(path: RSPath, x: float, u: float) -> float:
    R, S = path(u)
    return (x - S) ** 2 - 4 * R


def density(w: WeightProfile, x: float, path: RSPath | None = None) -> float:
    """Spectral density on the cut (zero outside)."""
    path = path or rs_path(w)
    cut = cut_endpoints(w)
    if not cut.gamma_minus < x < cut.gamma_plus:
        return 0.0
    us = _u_of_x(path, x)
    span = math.sqrt(max(0.0, 1 - us))

    def f(t):
        d = -_disc(path, x, us + t * t)
        return 2 * t / math.sqrt(d) if d > 0 else 0.0

    val, _ = _quad(f, 0.0, span, "density")
    return val / math.pi


def _boundary_sum(w: WeightProfile, x: float, path: RSPath) -> float:
    """W(x + i0) + W(x - i0) for x inside the cut."""
    us = _u_of_x(path, x)
    span = math.sqrt(max(0.0, us))

    def f(t):
        u = us - t * t
        R, S = path(u)
        d = (x - S) ** 2 - 4 * R
        return math.copysign(2 * t / math.sqrt(d), x - S) if d > 0 else 0.0

    val, _ = _quad(f, 0.0, span, "boundary value")
    return 2 * val


def resolvent(w: WeightProfile, x: complex, path: RSPath | None = None) -> complex:
    """W(x) off the cut, from the u-integral with the branch sqrt(x - a) sqrt(x - b)."""
    path = path or rs_path(w)
    xc = complex(x)
    if xc.imag == 0:
        cut = cut_endpoints(w)
        if cut.gamma_minus <= xc.real <= cut.gamma_plus:
            raise ValueError("x lies on the cut; use resolvent_and_density")

    def g(t):
        u = 1 - t * t
        R, S = path(u)
        r = 2 * math.sqrt(max(R, 0.0))
        return 2 * t / (np.sqrt(xc - (S - r)) * np.sqrt(xc - (S + r)))

    re, _ = _quad(lambda t: g(t).real, 0.0, 1.0, "resolvent")
    if xc.imag == 0:
        return complex(re, 0.0)
    im, _ = _quad(lambda t: g(t).imag, 0.0, 1.0, "resolvent")
    return complex(re, im)


@dataclass(frozen=True)
class ResolventResult:
    W: complex
    rho: float | None = None
    residual: float | None = None


def resolvent_and_density(w: WeightProfile, x: complex) -> ResolventResult:
    """W(x); for real x inside the cut, W(x + i0) together with rho(x) and the
    residual ``|W(x+i0) + W(x-i0) - V'(x)|``."""
    w._need_numeric()
    path = rs_path(w)
    xc = complex(x)
    cut = cut_endpoints(w)
    if xc.imag == 0 and cut.gamma_minus < xc.real < cut.gamma_plus:
        xr = xc.real
        rho = density(w, xr, path)
        total = _boundary_sum(w, xr, path)
        resid = abs(total - w.potential_derivative(xr))
        return ResolventResult(complex(total / 2, -math.pi * rho), rho, resid)
    return ResolventResult(resolvent(w, xc, path))


# -- derivative identity ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RSDerivatives:
    dS: float
    dR: float
    L0: float
    L1: float
    identity_residual: float


def rs_derivatives(w: WeightProfile, u: float) -> RSDerivatives:
    """dS/du and dR/du via the cos-averaged system, plus the residual of
    ``(2 dT)^2 - dS^2 = dS / (T L1)`` with ``T = sqrt(R)``."""
    w._need_numeric()
    if not 0 < u <= 1:
        raise ValueError("u must lie in (0, 1]")
    st = solve_rs(w, u)
    T = math.sqrt(st.R)
    # U'(xi) is a polynomial of degree D - 2, so Gauss-Chebyshev is exact with D + 2 nodes
    n = w.D + 2
    phi = (np.arange(n) + 0.5) * np.pi / n
    xi = st.S + 2 * T * np.cos(phi)
    dU = sum(gk * (k - 1) * xi ** (k - 2) for k, gk in w.nonzero() if k >= 2)
    dU = np.broadcast_to(np.asarray(dU, dtype=float), phi.shape)
    L0 = float(np.mean(dU))
    L1 = float(np.mean(dU * np.cos(phi)))
    M = np.array([[1 - L0, -2 * L1], [-T * L1, 2 * T * (1 - L0)]])
    if abs(np.linalg.det(M)) < 1e-14 * max(1.0, float(np.max(np.abs(M)))) ** 2:
        raise CriticalityError(f"singular derivative system at u = {u}")
    dS, dT = np.linalg.solve(M, np.array([0.0, 1.0]))
    if L1 != 0:
        resid = (2 * dT) ** 2 - dS**2 - dS / (T * L1)
    else:
        # no odd weights: S stays 0 and the identity is void
        resid = 0.0 if dS == 0 else math.nan
    return RSDerivatives(float(dS), float(2 * T * dT), L0, L1, float(resid))
