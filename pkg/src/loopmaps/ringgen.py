"""Ring generating functions, homographic involutions and the configuration classifier.

A ring is the annulus of faces visited by one loop.  ``A[k, k']`` counts rings
with outer length ``k`` and inner length ``k'`` rooted on the outer contour,
and ``H(x, y)`` is the unrooted generating function with ``A = x d/dx log H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .qseries import TruncatedSeries

Number = Union[int, float, Fraction]


class UnsupportedModelError(ValueError):
    """Raised for ring families that do not have a single-pole ring function."""


class InadmissibleGeometryError(ValueError):
    pass


# -- families -----------------------------------------------------------------------


@dataclass(frozen=True)
class Triangular:
    h: Number

    def __post_init__(self):
        _nonneg(self.h)


@dataclass(frozen=True)
class Quadrangular:
    """Squares crossed on opposite sides (weight h1) or adjacent sides (weight h2)."""

    h1: Number
    h2: Number

    def __post_init__(self):
        _nonneg(self.h1, self.h2)


@dataclass(frozen=True)
class Rigid:
    h1: Number

    def __post_init__(self):
        _nonneg(self.h1)


@dataclass(frozen=True)
class Twisting:
    h2: Number

    def __post_init__(self):
        _nonneg(self.h2)


@dataclass(frozen=True)
class Bending:
    """Triangles with weight h, and a per pair of equally oriented successive triangles."""

    a: Number
    h: Number

    def __post_init__(self):
        _nonneg(self.a, self.h)


RingFamily = Union[Triangular, Quadrangular, Rigid, Twisting, Bending]
FAMILIES = (Triangular, Quadrangular, Rigid, Twisting, Bending)


def _nonneg(*vals):
    for v in vals:
        if v < 0:
            raise ValueError(f"ring parameters must be non-negative, got {v}")


def _params(family) -> tuple:
    return tuple(getattr(family, f) for f in family.__dataclass_fields__)


def _is_exact(family) -> bool:
    return all(isinstance(p, (int, Fraction)) for p in _params(family))


def _exact(family):
    """Same family with every parameter converted exactly to a Fraction."""
    return type(family)(*(Fraction(p) for p in _params(family)))


def _finish(value: Fraction, exact: bool):
    return value if exact else float(value)


# -- closed-form ring coefficients --------------------------------------------------------


def _quad_coeff(h1, h2, k: int, kp: int):
    # m_b opposite-crossed squares (x y each), the rest turn outward (x^2) or inward (y^2)
    total = 0
    for mb in range(min(k, kp) + 1):
        if (k - mb) % 2 or (kp - mb) % 2:
            continue
        mo, mi = (k - mb) // 2, (kp - mb) // 2
        faces = mb + mo + mi
        if faces == 0:
            continue
        count = Fraction(k, faces) * math.factorial(faces)
        count /= math.factorial(mb) * math.factorial(mo) * math.factorial(mi)
        total += count * h1**mb * h2 ** (mo + mi)
    return total


@lru_cache(maxsize=64)
def _bending_table(a: Fraction, h: Fraction, kmax: int, kpmax: int) -> tuple:
    """Coefficients of A(x, y) for the bending model, by expanding its closed form.

    ``A = ahx/(1-ahx) + x d/dx [-log(1 - U(x) V(y))]`` with ``U = hx/(1-ahx)`` and
    ``V = hy/(1-ahy)``; the logarithm is expanded as ``sum_c (UV)^c / c``.
    """
    x1 = TruncatedSeries.from_univariate([0, 1], "x", kmax)
    y1 = TruncatedSeries.from_univariate([0, 1], "y", kpmax)
    U = (x1 * h) * (1 - x1 * (a * h)).reciprocal()
    V = (y1 * h) * (1 - y1 * (a * h)).reciprocal()
    table = [[Fraction(0)] * (kpmax + 1) for _ in range(kmax + 1)]
    for k in range(1, kmax + 1):
        table[k][0] = (a * h) ** k
    Uc = TruncatedSeries.constant(1, ("x",), kmax)
    Vc = TruncatedSeries.constant(1, ("y",), kpmax)
    for c in range(1, min(kmax, kpmax) + 1):
        Uc = Uc * U
        Vc = Vc * V
        ux = Uc.euler(0)
        for k in range(c, kmax + 1):
            uk = ux.coeff(k)
            if not uk:
                continue
            for kp in range(c, kpmax + 1):
                table[k][kp] += uk * Vc.coeff(kp) / c
    return tuple(tuple(row) for row in table)


def _bending_coeff(a, h, k: int, kp: int):
    # explicit coefficient of the expansion above
    if kp == 0:
        return (a * h) ** k
    total = 0
    for c in range(1, min(k, kp) + 1):
        total += Fraction(k, c) * math.comb(k - 1, c - 1) * math.comb(kp - 1, c - 1) * a ** (k + kp - 2 * c)
    return total * h ** (k + kp)


def _native(family):
    return _exact(family) if _is_exact(family) else type(family)(*(float(p) for p in _params(family)))


def ring_coeff(family: RingFamily, k: int, kp: int):
    """Weight of rings with outer length ``k >= 1`` and inner length ``kp >= 0``.

    Rational parameters give an exact Fraction, float parameters a float.
    """
    if k < 1 or kp < 0:
        raise ValueError("need k >= 1 and k' >= 0")
    f = _native(family)
    if isinstance(f, Triangular):
        val = math.comb(k + kp - 1, kp) * f.h ** (k + kp)
    elif isinstance(f, Rigid):
        val = f.h1**k if k == kp else 0
    elif isinstance(f, Twisting):
        if k % 2 or kp % 2:
            val = 0
        else:
            K, Kp = k // 2, kp // 2
            val = 2 * math.comb(K + Kp - 1, Kp) * f.h2 ** (K + Kp)
    elif isinstance(f, Quadrangular):
        val = _quad_coeff(f.h1, f.h2, k, kp)
    elif isinstance(f, Bending):
        val = _bending_coeff(f.a, f.h, k, kp)
    else:
        raise TypeError(f"unknown ring family {family!r}")
    return Fraction(val) if _is_exact(family) else float(val)


def bending_series_table(a, h, kmax: int, kpmax: int) -> tuple:
    """Bending coefficients obtained by multiplying out the closed form as series."""
    return _bending_table(Fraction(a), Fraction(h), kmax, kpmax)


def ring_matrix(family: RingFamily, kmax: int, kpmax: int) -> np.ndarray:
    """Float array ``M[k-1, k'] = A[k, k']`` for ``1 <= k <= kmax``, ``0 <= k' <= kpmax``."""
    f = type(family)(*(float(p) for p in _params(family)))
    return np.array(
        [[ring_coeff(f, k, kp) for kp in range(kpmax + 1)] for k in range(1, kmax + 1)]
    )


# -- grand generating functions ----------------------------------------------------------


def h_series(family: RingFamily, order: int) -> TruncatedSeries:
    """Unrooted ring generating function H(x, y) as an exact bivariate series."""
    f = _exact(family)
    lab = ("x", "y")
    x = TruncatedSeries.variable("x", lab, order)
    y = TruncatedSeries.variable("y", lab, order)
    if isinstance(f, Triangular):
        den = 1 - (x + y) * f.h
    elif isinstance(f, Quadrangular):
        den = 1 - x * y * f.h1 - (x * x + y * y) * f.h2
    elif isinstance(f, Rigid):
        den = 1 - x * y * f.h1
    elif isinstance(f, Twisting):
        den = 1 - (x * x + y * y) * f.h2
    elif isinstance(f, Bending):
        den = 1 - (x + y) * (f.a * f.h) - x * y * ((1 - f.a**2) * f.h**2)
    else:
        raise TypeError(f"unknown ring family {family!r}")
    return den.reciprocal()


def ring_series(family: RingFamily, order: int) -> TruncatedSeries:
    """A(x, y) assembled from :func:`ring_coeff` (total degree <= order)."""
    f = _exact(family)
    c = {}
    for k in range(1, order + 1):
        for kp in range(0, order - k + 1):
            c[(k, kp)] = ring_coeff(f, k, kp)
    return TruncatedSeries(c, ("x", "y"), order)


def ring_gf(family: RingFamily, x: complex, y: complex) -> complex:
    """Closed-form rational A(x, y), evaluated numerically."""
    if isinstance(family, Triangular):
        h = float(family.h)
        return h * x / (1 - h * (x + y))
    if isinstance(family, Quadrangular):
        h1, h2 = float(family.h1), float(family.h2)
        return (h1 * x * y + 2 * h2 * x * x) / (1 - h1 * x * y - h2 * (x * x + y * y))
    if isinstance(family, Rigid):
        h1 = float(family.h1)
        return h1 * x * y / (1 - h1 * x * y)
    if isinstance(family, Twisting):
        h2 = float(family.h2)
        return 2 * h2 * x * x / (1 - h2 * (x * x + y * y))
    if isinstance(family, Bending):
        a, h = float(family.a), float(family.h)
        U = h * x / (1 - a * h * x)
        V = h * y / (1 - a * h * y)
        dU = h / (1 - a * h * x) ** 2
        return a * h * x / (1 - a * h * x) + x * dU * V / (1 - U * V)
    raise TypeError(f"unknown ring family {family!r}")


# -- brute-force enumeration ---------------------------------------------------------------


def _triangle_words(k: int, kp: int):
    """Binary words (1 = outward) of length k+k' with k ones, starting with an outward triangle."""
    n = k + kp
    for rest in _combinations_mask(n - 1, k - 1):
        yield (1,) + rest


def _combinations_mask(n: int, ones: int):
    if ones < 0 or ones > n:
        return
    if n == 0:
        yield ()
        return
    for tail in _combinations_mask(n - 1, ones - 1):
        yield (1,) + tail
    for tail in _combinations_mask(n - 1, ones):
        yield (0,) + tail


_SQUARES = (("b", 1, 1), ("out", 2, 0), ("in", 0, 2))


def _square_words(k: int, kp: int, prefix=()):
    if k == 0 and kp == 0:
        yield prefix
        return
    for name, dx, dy in _SQUARES:
        if dx <= k and dy <= kp:
            if not prefix and dx == 0:
                continue
            yield from _square_words(k - dx, kp - dy, prefix + (name,))


def ring_bruteforce(family: RingFamily, k: int, kp: int, bound: int = 14):
    """Sum of ring weights over explicitly listed rooted rings.

    Triangle rings are words of outward/inward triangles read from the rooted
    outward triangle; square rings are words of squares read from the square
    carrying the root, times the number of outer edges that square offers.
    """
    if k + kp > bound:
        raise ValueError(f"k + k' = {k + kp} exceeds the enumeration bound {bound}")
    if k < 1 or kp < 0:
        raise ValueError("need k >= 1 and k' >= 0")
    exact = _is_exact(family)
    f = _exact(family)
    total = Fraction(0)
    if isinstance(f, (Triangular, Bending)):
        a = f.a if isinstance(f, Bending) else Fraction(1)
        for word in _triangle_words(k, kp):
            n = len(word)
            same = sum(1 for i in range(n) if word[i] == word[(i + 1) % n])
            total += f.h**n * a**same
    else:
        if isinstance(f, Quadrangular):
            h1, h2 = f.h1, f.h2
        elif isinstance(f, Rigid):
            h1, h2 = f.h1, Fraction(0)
        elif isinstance(f, Twisting):
            h1, h2 = Fraction(0), f.h2
        else:
            raise TypeError(f"unknown ring family {family!r}")
        weight = {"b": h1, "out": h2, "in": h2}
        roots = {"b": 1, "out": 2}
        for word in _square_words(k, kp):
            w = Fraction(roots[word[0]])
            for sq in word:
                w *= weight[sq]
            total += w
    return _finish(total, exact)


# -- homographic involutions -----------------------------------------------------------------


@dataclass(frozen=True)
class Homography:
    """``s(x) = (alpha - beta x) / (beta - delta x)``, an involution."""

    alpha: float
    beta: float
    delta: float

    def __call__(self, x):
        return (self.alpha - self.beta * x) / (self.beta - self.delta * x)

    @property
    def discriminant(self) -> float:
        return self.beta**2 - self.alpha * self.delta

    @property
    def decreasing(self) -> bool:
        return self.discriminant > 0

    def deriv(self, x):
        return -self.discriminant / (self.beta - self.delta * x) ** 2

    def deriv2(self, x):
        return -2 * self.delta * self.discriminant / (self.beta - self.delta * x) ** 3

    @property
    def pole(self) -> float | None:
        return None if self.delta == 0 else self.beta / self.delta

    @property
    def zero(self) -> float | None:
        """Where s vanishes, i.e. the pole of ``y -> s(y)^-k``."""
        return None if self.beta == 0 else self.alpha / self.beta

    @property
    def at_infinity(self) -> float | None:
        return None if self.delta == 0 else self.beta / self.delta

    def fixed_points(self) -> tuple:
        d = self.discriminant
        if d <= 0:
            return ()
        if self.delta == 0:
            return (self.alpha / (2 * self.beta),)
        r = math.sqrt(d)
        return tuple(sorted(((self.beta - r) / self.delta, (self.beta + r) / self.delta)))

    def scaled(self, lam: float) -> "Homography":
        return Homography(lam * self.alpha, lam * self.beta, lam * self.delta)


def involution_of(family: RingFamily) -> Homography:
    if isinstance(family, Triangular):
        return Homography(1 / float(family.h), 1.0, 0.0)
    if isinstance(family, Rigid):
        return Homography(1.0, 0.0, -float(family.h1))
    if isinstance(family, Bending):
        a, h = float(family.a), float(family.h)
        return Homography(1.0, a * h, (a * a - 1) * h * h)
    if isinstance(family, Quadrangular):
        if family.h2 == 0:
            return involution_of(Rigid(family.h1))
        if family.h1 == 0:
            family = Twisting(family.h2)
        else:
            raise UnsupportedModelError(
                "quadrangular rings with h1*h2 != 0 have two poles; no single involution"
            )
    if isinstance(family, Twisting):
        raise UnsupportedModelError(
            "the twisting model is one-pole only in the bipartite variable X = x^2; "
            "use loopmaps.twistline.twist_involution"
        )
    raise TypeError(f"unknown ring family {family!r}")


@dataclass(frozen=True)
class ExponentiationCheck:
    partial_sum: float
    target: float
    tail_bound: float
    roundoff: float = 0.0

    @property
    def error(self) -> float:
        return abs(self.partial_sum - self.target)

    @property
    def within_bound(self) -> bool:
        return self.error <= self.tail_bound + self.roundoff


def exponentiation_check(family: RingFamily, k: int, y: float, K: int) -> ExponentiationCheck:
    """Compare ``sum_{k' <= K} A[k, k'] y^k'`` with ``s(y)^-k`` and bound the tail.

    Writing ``s(y)^-k = (beta/alpha)^k p(z) / (1 - z)^k`` with ``z = y / y0`` and
    ``y0 = alpha/beta``, the coefficients are dominated by
    ``|beta/alpha|^k p(1-abs) C(j+k-1, k-1)``; the tail of that majorant is
    geometric beyond K with ratio ``r (K+1+k)/(K+2)``, ``r = |y/y0|``.
    """
    s = involution_of(family)
    y0 = s.zero
    if y0 is not None and abs(y) >= abs(y0):
        raise InadmissibleGeometryError(f"|y|={abs(y)} outside the convergence disk |y| < {abs(y0)}")
    fam = type(family)(*(float(p) for p in _params(family)))
    coeffs = [ring_coeff(fam, k, kp) for kp in range(K + 1)]
    terms = [c * y**kp for kp, c in enumerate(coeffs)]
    partial = math.fsum(terms)
    target = float(s(y)) ** (-k)
    # each term and the target carry a few ulps of relative error
    eps = 8 * (k + K) * np.finfo(float).eps
    roundoff = eps * (math.fsum(map(abs, terms)) + abs(target))
    if y0 is None:
        tail = 0.0 if K >= k else math.inf
        return ExponentiationCheck(partial, target, tail, roundoff)
    r = abs(y / y0)
    lead = abs(s.beta / s.alpha) ** k
    p_abs = (1 + abs(s.delta * s.alpha / s.beta**2)) ** k
    q = r * (K + 1 + k) / (K + 2)
    if q >= 1:
        return ExponentiationCheck(partial, target, math.inf, roundoff)
    first = lead * p_abs * math.comb(K + k, k - 1) * r ** (K + 1)
    return ExponentiationCheck(partial, target, first / (1 - q), roundoff)


# -- configuration classifier ------------------------------------------------------------------


@dataclass(frozen=True)
class ConfigurationCase:
    label: str

    @property
    def decreasing(self) -> bool:
        return self.label.endswith("-")


def classify_configuration(s: Homography, cut: tuple[float, float]) -> ConfigurationCase:
    lo, hi = cut
    if not lo < hi:
        raise ValueError("cut must be a proper interval")
    d = s.discriminant
    if d == 0:
        raise ValueError("degenerate homography (beta^2 = alpha*delta)")
    sign = "-" if d > 0 else "+"
    pole = s.pole
    if pole is not None and (math.isclose(pole, lo) or math.isclose(pole, hi)):
        raise ValueError("pole of s at an endpoint of the cut")
    if pole is not None and lo < pole < hi:
        return ConfigurationCase("3" + sign)
    img = sorted((s(lo), s(hi)))
    if img[0] >= hi:
        return ConfigurationCase("1" + sign)
    if img[1] <= lo:
        return ConfigurationCase("2" + sign)
    raise InadmissibleGeometryError(f"cut {cut} overlaps its image {tuple(img)}")
