"""Twisting loop model on quadrangulations, solved through the bipartite variable X = x^2.

Only even faces occur, so W(x) = x Wt(x^2).  Wt has a cut [0, Gamma] and obeys

    Wt(X + i0) + Wt(X - i0) = 1 - g X - 2n Wt(1/h2 - X).

The non-generic critical case is Gamma = 1/(2 h2), the fixed point of X -> 1/h2 - X.
Here b is defined by  pi b = arccos(n), NOT arccos(n/2) as for the bending model; the value
is carried on each solution object.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .critline import OutOfRangeError, PoleError, zeta
from .mapcount import WeightProfile, cut_endpoints
from .ringgen import Homography, Twisting, ring_coeff

__all__ = [
    "BipartiteReduction",
    "EmptyLineError",
    "TwistSolution",
    "b_twist",
    "n_twist",
    "nzero_line_residual",
    "twist_critical_line",
    "twist_cut_residual",
    "twist_density",
    "twist_density_weight",
    "twist_dilute_point",
    "twist_involution",
    "twist_kappa",
    "twist_omega",
    "twist_parabola",
    "twist_particular",
    "twist_positivity_bound",
    "twist_principal_part",
    "twist_resolvent",
    "twist_solution",
    "twist_x_of_v",
]

_HALF = 1j * math.pi / 2
_DILUTE_TOL = 1e-10


class EmptyLineError(OutOfRangeError):
    """No admissible h2 in the requested grid."""


def _check(n: float, h2: float | None = None) -> None:
    if not 0 <= n < 1:
        raise OutOfRangeError("twisting criticality needs 0 <= n < 1 (n = 0 as a limit)")
    if h2 is not None and not h2 > 0:
        raise OutOfRangeError("h2 must be positive")


def b_twist(n: float) -> float:
    """pi b = arccos n; 0 < b < 1/2 for 0 < n < 1."""
    _check(n)
    return math.acos(n) / math.pi


def n_twist(b: float) -> float:
    return math.cos(math.pi * b)


def twist_involution(h2: float) -> Homography:
    """X -> 1/h2 - X as a homography (alpha, beta, delta) = (1/h2, 1, 0)."""
    return Homography(1 / h2, 1.0, 0.0)


@dataclass(frozen=True)
class BipartiteReduction:
    """Passage between W(x) and Wt(X) with W(x) = x Wt(x^2), and the reduced ring function."""

    h2: float

    @property
    def fixed_point(self) -> float:
        return 1 / (2 * self.h2)

    def s(self, X):
        return 1 / self.h2 - X

    def ring_kernel(self, X, Y):
        # At(X, Y) = A^twist(sqrt X, sqrt Y), one simple pole at Y = 1/h2 - X
        return 2 * self.h2 * X / (1 - self.h2 * (X + Y))

    def ring_coeff(self, k: int, kp: int):
        """[X^k Y^k'] At, read off the ring family in the original variable."""
        return ring_coeff(Twisting(self.h2), 2 * k, 2 * kp)

    def kernel_series(self, order: int) -> dict:
        """{(k, k'): coefficient} of At for k + k' <= order, from the geometric expansion."""
        h = self.h2 if isinstance(self.h2, Fraction) else Fraction(self.h2)
        return {
            (k, kp): 2 * math.comb(k + kp - 1, kp) * h ** (k + kp)
            for k in range(1, order + 1)
            for kp in range(0, order + 1 - k)
        }

    @staticmethod
    def lift(Wt, x):
        return x * Wt(x * x)

    @staticmethod
    def reduce(W, X):
        x = cmath.sqrt(X)
        return W(x) / x


# -- parametrization --------------------------------------------------------------------------


def twist_x_of_v(h2: float, v) -> complex:
    ch = cmath.cosh(v)
    if abs(ch) < 1e-14:
        raise PoleError(f"X(v) has a pole at v = {v}")
    return (1 + 1 / ch) / (2 * h2)


def twist_dx_of_v(h2: float, v) -> complex:
    ch = cmath.cosh(v)
    if abs(ch) < 1e-14:
        raise PoleError(f"X(v) has a pole at v = {v}")
    return -cmath.sinh(v) / (ch * ch) / (2 * h2)


def twist_v_of_x(h2: float, X) -> complex:
    """The preimage with Re v > 0, |Im v| < pi (the physical sheet)."""
    d = 2 * h2 * X - 1
    if d == 0:
        raise PoleError("X = 1/(2 h2) is the branch point v = infinity")
    return cmath.acosh(1 / d)


# -- particular and homogeneous parts ---------------------------------------------------------


def twist_particular(n: float, g: float, h2: float, X):
    return ((1 - g * X) - n * (1 - g * (1 / h2 - X))) / (2 * (1 - n * n))


def twist_principal_part(n: float, g: float, h2: float) -> tuple:
    """Coefficients of (v - i pi/2)^-3, ^-2, ^-1 required of omega-tilde."""
    return (g / (8 * h2 * h2 * (1 - n)), 1j * (g - 2 * h2) / (8 * h2 * h2 * (1 + n)), -1.0)


def _omega_coeffs(n, g, h2):
    q = 1 - n * n
    return (g / (16 * h2 * h2 * q), -1j * (g - 2 * h2) / (8 * h2 * h2 * q), -1 / (1 + n))


def twist_omega(n: float, g: float, h2: float, v) -> complex:
    _check(n, h2)
    b = b_twist(n)
    c2, c1, c0 = _omega_coeffs(n, g, h2)
    v = complex(v)
    return sum(
        c * (zeta(b, v - _HALF, d) - zeta(b, -v - _HALF, d)) for c, d in ((c2, 2), (c1, 1), (c0, 0))
    )


def twist_kappa(n: float, g: float, h2: float, beta: float) -> float:
    """Coefficient of e^{-beta v} in omega-tilde, for beta in {b, 2-b, 2+b}."""
    _check(n, h2)
    cs, sn = math.cos(math.pi * beta / 2), math.sin(math.pi * beta / 2)
    num = (g * beta * beta + 16 * h2 * h2 * (n - 1)) * cs - 2 * beta * (g - 2 * h2) * sn
    return num / (8 * h2 * h2 * (1 - n * n))


# -- critical parabola ------------------------------------------------------------------------


def twist_parabola(n: float, h2: float) -> float:
    """g solving kappa(b) = 0 at given h2."""
    _check(n)
    b = b_twist(n)
    r = math.sqrt((1 + n) / (1 - n))
    return (4 * b * h2 - 16 * math.sqrt(1 - n * n) * h2 * h2) / (b * (2 - b * r))


def twist_positivity_bound(n: float, h2: float) -> float:
    """Largest g with kappa(2 - b) >= 0."""
    _check(n)
    b2 = 2 - b_twist(n)
    r = math.sqrt((1 + n) / (1 - n))
    return (4 * b2 * h2 + 16 * math.sqrt(1 - n * n) * h2 * h2) / (b2 * (2 + b2 * r))


def twist_dilute_point(n: float) -> tuple[float, float]:
    _check(n)
    b = b_twist(n)
    g = b * (2 - b) / (4 * (math.sqrt(1 - n) + (1 - b) * math.sqrt(1 + n)) ** 2)
    h2 = b * (2 - b) / (8 * (1 - n + (1 - b) * math.sqrt(1 - n * n)))
    return g, h2


def _h2_g_zero(n: float) -> float:
    return b_twist(n) / (4 * math.sqrt(1 - n * n))


@dataclass(frozen=True)
class TwistSolution:
    n: float
    g: float
    h2: float
    kappa_b: float
    kappa_2mb: float
    phase: str

    @property
    def b(self) -> float:
        return b_twist(self.n)

    @property
    def Gamma(self) -> float:
        return 1 / (2 * self.h2)

    def x(self, v):
        return twist_x_of_v(self.h2, v)

    def omega(self, v):
        return twist_omega(self.n, self.g, self.h2, v)


def _phase(n, g, h2, k2):
    scale = max(1.0, abs(twist_kappa(n, g, h2, 2 + b_twist(n))))
    if abs(k2) <= _DILUTE_TOL * scale:
        return "dilute"
    if k2 > 0:
        return "dense"
    raise OutOfRangeError(f"kappa(2-b) = {k2:.3g} < 0 at h2 = {h2}: beyond the dilute point")


def twist_solution(n: float, h2: float) -> TwistSolution:
    """The point of the critical parabola at h2, if admissible."""
    _check(n, h2)
    g = twist_parabola(n, h2)
    if g < -1e-15:
        raise OutOfRangeError(f"g = {g:.3g} < 0 at h2 = {h2}")
    g = max(g, 0.0)
    b = b_twist(n)
    k2 = twist_kappa(n, g, h2, 2 - b)
    return TwistSolution(n, g, h2, twist_kappa(n, g, h2, b), k2, _phase(n, g, h2, k2))


def twist_critical_line(n: float, h2_grid=None, points: int = 41) -> list:
    """Admissible parabola points, ordered by h2.

    Without a grid the whole segment is sampled, from the dilute end to g = 0.  With a grid,
    inadmissible h2 are dropped and the dilute point is inserted when the grid reaches it.
    """
    if not 0 < n < 1:
        raise OutOfRangeError("twisting critical line needs 0 < n < 1")
    h_dil = twist_dilute_point(n)[1]
    h_end = _h2_g_zero(n)
    if h2_grid is None:
        h2_grid = np.linspace(h_dil, h_end, points)
    grid = sorted(float(h) for h in h2_grid)
    out = []
    for h in grid:
        try:
            out.append(twist_solution(n, h))
        except OutOfRangeError:
            continue
    if grid and grid[0] <= h_dil <= grid[-1] and not any(s.phase == "dilute" for s in out):
        g_d, _ = twist_dilute_point(n)
        b = b_twist(n)
        dil = TwistSolution(n, g_d, h_dil, twist_kappa(n, g_d, h_dil, b), 0.0, "dilute")
        out = sorted(out + [dil], key=lambda s: s.h2)
    if not out:
        raise EmptyLineError(f"no admissible h2 in the grid at n = {n}")
    return out


# -- resolvent and density --------------------------------------------------------------------


def _wt_at_v(sol: TwistSolution, v) -> complex:
    X = sol.x(v)
    return twist_particular(sol.n, sol.g, sol.h2, X) + sol.omega(v) / twist_dx_of_v(sol.h2, v)


def twist_resolvent(sol: TwistSolution, X) -> complex:
    """Wt(X) off the cut [0, Gamma]."""
    return _wt_at_v(sol, twist_v_of_x(sol.h2, X))


def twist_cut_residual(sol: TwistSolution, X: float) -> float:
    """|Wt(X+i0) + Wt(X-i0) + 2n Wt(1/h2 - X) - 1 + g X| for 0 < X < Gamma."""
    if not 0 < X < sol.Gamma:
        raise ValueError("X must lie inside the cut")
    r = twist_v_of_x(sol.h2, X).real
    lhs = _wt_at_v(sol, r + 1j * math.pi) + _wt_at_v(sol, r - 1j * math.pi)
    lhs += 2 * sol.n * _wt_at_v(sol, r)
    return abs(lhs - (1 - sol.g * X))


def twist_density(sol: TwistSolution, v: float) -> tuple[float, float]:
    """(x, rho(x)) at x = sqrt(X(v + i pi)), v > 0; rho is even, so -x carries the same value."""
    if not v > 0:
        raise ValueError("need v > 0")
    w = v + 1j * math.pi
    Xw = sol.x(w)
    jump = (sol.omega(w) - sol.omega(v - 1j * math.pi)) / (2j * math.pi)
    rho = cmath.sqrt(Xw) / twist_dx_of_v(sol.h2, w) * jump
    return math.sqrt(max(Xw.real, 0.0)), rho.real


def twist_density_weight(sol: TwistSolution, v: float) -> float:
    """rho(x(v)) dx/dv, for quadrature in v; integrates to 1/2 over v > 0."""
    w = v + 1j * math.pi
    return ((sol.omega(w) - sol.omega(v - 1j * math.pi)) / (4j * math.pi)).real


def nzero_line_residual(h2: float) -> float:
    """|4R - 1/(2 h2)| on the n = 0 parabola, R from the pure-quadrangulation (R, S) system."""
    g = twist_parabola(0.0, h2)
    R = cut_endpoints(WeightProfile.numeric({4: g})).state.R
    return abs(4 * R - 1 / (2 * h2))
