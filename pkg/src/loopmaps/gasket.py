"""Gasket reduction of the O(n) loop model to maps with effective face weights.

Removing the outermost loops of a loop configuration leaves a map (the gasket)
whose holes of degree k are filled by a ring of outer length k and a new disk
with boundary k'.  The effective weights therefore solve

    g_k = g0_k + n * sum_k' A[k, k'] F_k'(g).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import mapcount
from .mapcount import InadmissibleWeightsError, WeightProfile
from .qseries import TruncatedSeries
from .ringgen import (
    Bending,
    InadmissibleGeometryError,
    RingFamily,
    Triangular,
    UnsupportedModelError,
    involution_of,
    ring_coeff,
    ring_matrix,
)


class BeyondCriticalError(InadmissibleWeightsError):
    """The effective-weight iteration diverged: parameters lie beyond the critical surface."""


class TruncationError(RuntimeError):
    """The tail estimate for hole degrees above K exceeds the tolerance."""


@dataclass(frozen=True)
class LoopModel:
    n: float
    g0: WeightProfile
    rings: RingFamily

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("loop fugacity n must be >= 0")


@dataclass(frozen=True)
class EffectiveWeights:
    g: tuple
    mode: str = "numeric"
    iterations: int = 0
    residual: float = 0.0
    tail: float = 0.0
    order: int | None = None

    @property
    def profile(self) -> WeightProfile:
        if self.mode == "numeric":
            return WeightProfile.numeric(self.g)
        return WeightProfile(tuple(self.g), "formal")


def _ring_faces(rings: RingFamily, k: int, kp: int) -> int:
    if isinstance(rings, (Triangular, Bending)):
        return k + kp
    return (k + kp) // 2


# -- numeric fixed point ----------------------------------------------------------------------


def _loop_term(n, A, g, K, nodes):
    F = mapcount.disk_values(WeightProfile.numeric(g), K, nodes)
    return n * (A @ F), F


def picard_step(m: LoopModel, g, K: int = 40, nodes: int = 64) -> np.ndarray:
    """One undamped update ``g0 + n A F(g)`` on hole degrees 1..K."""
    g = np.zeros(K) if g is None else np.pad(np.asarray(g, float), (0, max(0, K - len(g))))
    g0 = np.zeros(K)
    g0[: m.g0.D] = m.g0.g
    return g0 + _loop_term(m.n, ring_matrix(m.rings, K, K), g, K, nodes)[0]


def _tail_estimate(m: LoopModel, A, F, g, K, gamma_plus) -> float:
    try:
        y0 = involution_of(m.rings).zero
    except UnsupportedModelError:
        y0 = None
    # neglected inner lengths k' > K, geometric beyond the last kept column
    last = np.abs(A[:, K] * F[K])
    prev = np.abs(A[:, K - 1] * F[K - 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(prev > 0, last / prev, 0.0)
    if y0:
        q = np.maximum(q, gamma_plus / abs(y0))
    if np.any((q >= 1) & (last > 0)):
        return math.inf
    inner = float(np.max(m.n * last * q / np.where(q < 1, 1 - q, 1)))
    # neglected hole degrees k > K, as seen by V'(x) on the cut
    scaled = np.abs(g[-2:]) * gamma_plus ** np.array([K - 2, K - 1])
    if scaled[1] == 0:
        return inner
    r = scaled[1] / scaled[0] if scaled[0] else 1.0
    if r >= 1:
        return math.inf
    return max(inner, float(scaled[1] * r / (1 - r)))


def _fixed_point_numeric(m, K, tol, tail_tol, max_iter, nodes) -> EffectiveWeights:
    g0 = np.zeros(K)
    if m.g0.D > K:
        raise ValueError("bare weights exceed the hole-degree truncation K")
    g0[: m.g0.D] = m.g0.g
    if m.n == 0:
        return EffectiveWeights(tuple(g0), "numeric", 1, 0.0, 0.0)
    A = ring_matrix(m.rings, K, K)
    if not np.any(A):
        return EffectiveWeights(tuple(g0), "numeric", 1, 0.0, 0.0)
    g = g0.copy()
    theta, last_res = 1.0, math.inf
    try:
        for it in range(1, max_iter + 1):
            term, F = _loop_term(m.n, A, g, K, nodes)
            new = g0 + term
            res = float(np.max(np.abs(new - g)))
            if res <= tol:
                g = new
                break
            if res > last_res:
                theta = 0.5
            last_res = res
            g = g + theta * (new - g)
            if not np.all(np.isfinite(g)) or np.max(g) > 1e6:
                raise BeyondCriticalError("effective weights blow up")
        else:
            g, it, res = _newton(m, A, g0, g, K, tol, nodes)
    except InadmissibleWeightsError as exc:
        raise BeyondCriticalError(f"fixed point left the admissible region: {exc}") from exc
    term, F = _loop_term(m.n, A, g, K, nodes)
    res = float(np.max(np.abs(g0 + term - g)))
    cut = mapcount.cut_endpoints(WeightProfile.numeric(g))
    tail = _tail_estimate(m, A, F, g, K, max(abs(cut.gamma_minus), cut.gamma_plus))
    if tail > tail_tol:
        raise TruncationError(f"tail estimate {tail:.3g} above {tail_tol:.1g}; increase K")
    return EffectiveWeights(tuple(g), "numeric", it, res, tail)


def _newton(m, A, g0, g, K, tol, nodes, max_iter=20):
    # finite-difference Newton on the truncated K-dimensional system
    for it in range(1, max_iter + 1):
        G = g - g0 - _loop_term(m.n, A, g, K, nodes)[0]
        res = float(np.max(np.abs(G)))
        if res <= tol:
            return g, it, res
        J = np.eye(K)
        for j in range(K):
            dg = g.copy()
            step = 1e-7 * max(abs(g[j]), 1e-8)
            dg[j] += step
            J[:, j] -= (_loop_term(m.n, A, dg, K, nodes)[0] - (g - g0 - G)) / step
        g = g - np.linalg.solve(J, G)
    raise BeyondCriticalError("Newton on the effective weights did not converge")


# -- formal fixed point -------------------------------------------------------------------------


def _exact_family(rings):
    fields = rings.__dataclass_fields__
    return type(rings)(*(Fraction(getattr(rings, f)) for f in fields))


def _formal_ring_table(rings: RingFamily, K: int, order: int) -> dict:
    """{(k, k'): (coefficient, face count)} restricted to face count <= order."""
    ex = _exact_family(rings)
    table = {}
    for k in range(1, K + 1):
        for kp in range(0, K + 1):
            f = _ring_faces(rings, k, kp)
            if f < 1 or f > order:
                continue
            c = ring_coeff(ex, k, kp)
            if c:
                table[(k, kp)] = (c, f)
    return table


def _fixed_point_formal(m: LoopModel, order: int) -> EffectiveWeights:
    n = Fraction(m.n)
    square = not isinstance(m.rings, (Triangular, Bending))
    K = max(2 * order if square else order, m.g0.D)
    zero = TruncatedSeries({}, ("t",), order)
    g0 = [m.g0.weight(k).truncate(order) if k <= m.g0.D else zero for k in range(1, K + 1)]
    if m.g0.mode != "formal":
        raise ValueError("formal fixed point needs a formal bare weight profile")
    table = _formal_ring_table(m.rings, K, order)
    g = list(g0)

    def step(g):
        F = mapcount.disk_series_all(WeightProfile(tuple(g), "formal"), K, order)
        out = list(g0)
        for (k, kp), (c, f) in table.items():
            out[k - 1] = out[k - 1] + TruncatedSeries({(f,): n * c}, ("t",), order) * F[kp]
        return out

    if n == 0 or not table:
        return EffectiveWeights(tuple(g0), "formal", 1, 0.0, 0.0, order)
    its = 0
    for its in range(1, order + 2):
        new = step(g)
        if new == g:
            break
        g = new
    if step(g) != g:
        raise RuntimeError("formal fixed point did not stabilize")
    return EffectiveWeights(tuple(g), "formal", its, 0.0, 0.0, order)


def fixed_point_weights(
    m: LoopModel,
    K: int = 40,
    mode: str = "numeric",
    order: int = 8,
    tol: float = 1e-10,
    tail_tol: float = 1e-8,
    max_iter: int = 500,
    nodes: int = 64,
) -> EffectiveWeights:
    """Effective face weights of the gasket."""
    if mode == "numeric":
        m.g0._need_numeric()
        return _fixed_point_numeric(m, K, tol, tail_tol, max_iter, nodes)
    if mode == "formal":
        return _fixed_point_formal(m, order)
    raise ValueError(f"unknown mode {mode!r}")


def loop_disk_series(m: LoopModel, p: int, order: int) -> TruncatedSeries:
    """F_p of the loop model as an exact series in the size marker."""
    ew = fixed_point_weights(m, mode="formal", order=order)
    return mapcount.disk_series(ew.profile, p, order, method="tutte")


# -- potentials and the one-pole functional equation -------------------------------------------------


@dataclass(frozen=True)
class LoopPotential:
    bare: float
    effective: float
    contour: float


def loop_potential(m: LoopModel, ew: EffectiveWeights, x: float) -> LoopPotential:
    """V'_0(x), V'(x) at the effective weights, and the contour term
    ``-x s'(x) W(s(x)) + x s''(x) / (2 s'(x))`` (zero at n = 0)."""
    bare = m.g0.potential_derivative(x)
    prof = ew.profile
    eff = prof.potential_derivative(x)
    if m.n == 0:
        return LoopPotential(bare, eff, 0.0)
    s = involution_of(m.rings)
    if s.pole is not None and math.isclose(x, s.pole):
        raise ValueError("x sits at the pole of the involution")
    sx = s(x)
    W = mapcount.resolvent(prof, sx).real
    contour = -x * s.deriv(x) * W + x * s.deriv2(x) / (2 * s.deriv(x))
    return LoopPotential(bare, eff, contour)


def one_pole_residual(m: LoopModel, ew: EffectiveWeights, x: float) -> float:
    """``|W(x+i0) + W(x-i0) - n s'(x) W(s(x)) - V'_0(x) + n s''(x)/(2 s'(x))|``."""
    prof = ew.profile
    cut = mapcount.cut_endpoints(prof)
    if not cut.gamma_minus < x < cut.gamma_plus:
        raise ValueError("x must lie strictly inside the cut")
    s = involution_of(m.rings)
    sx = s(x)
    if cut.gamma_minus <= sx <= cut.gamma_plus:
        raise InadmissibleGeometryError(f"s({x}) = {sx} falls on the cut")
    both = 2 * mapcount.resolvent_and_density(prof, x).W.real
    lhs = both - m.n * s.deriv(x) * mapcount.resolvent(prof, sx).real
    rhs = m.g0.potential_derivative(x) - m.n * s.deriv2(x) / (2 * s.deriv(x))
    return abs(lhs - rhs)
