"""Exact-rational truncated power series in one to three variables.

Two truncation styles are supported:

* ``order=N`` (an int) keeps monomials of total degree <= N;
* ``order=(N1, N2, ...)`` keeps monomials with exponent i <= Ni, where an
  entry ``None`` leaves that variable untruncated (only ring operations are
  then available, since inversion would produce infinitely many terms).

Both truncation sets are monomial ideals' complements, so products truncate
consistently.  Orders are never extended silently: combining two series keeps
the smaller order, and asking for a coefficient outside the truncation set
raises :class:`InsufficientOrderError`.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence, Union

Order = Union[int, tuple]
Scalar = Union[int, Fraction]


class SeriesError(ValueError):
    pass


class IncompatibleSeriesError(SeriesError):
    pass


class InsufficientOrderError(SeriesError):
    pass


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


def _min_order(a: Order, b: Order) -> Order:
    if isinstance(a, int) and isinstance(b, int):
        return min(a, b)
    # one variable: total degree and box truncation coincide
    if isinstance(a, int) and isinstance(b, tuple) and len(b) == 1:
        return _squeeze(_min_order((a,), b))
    if isinstance(b, int) and isinstance(a, tuple) and len(a) == 1:
        return _squeeze(_min_order(a, (b,)))
    if isinstance(a, tuple) and isinstance(b, tuple) and len(a) == len(b):
        out = []
        for x, y in zip(a, b):
            if x is None:
                out.append(y)
            elif y is None:
                out.append(x)
            else:
                out.append(min(x, y))
        return tuple(out)
    raise IncompatibleSeriesError(f"cannot combine truncation orders {a!r} and {b!r}")


def _squeeze(order: Order) -> Order:
    if isinstance(order, tuple) and len(order) == 1 and order[0] is not None:
        return order[0]
    return order


class TruncatedSeries:
    """Immutable truncated series with exact :class:`~fractions.Fraction` coefficients."""

    __slots__ = ("labels", "order", "_c")

    def __init__(self, coeffs: Mapping[tuple, Scalar], labels: Sequence[str], order: Order):
        labels = tuple(labels)
        if not 1 <= len(labels) <= 3:
            raise SeriesError("between one and three variables are supported")
        if isinstance(order, tuple):
            if len(order) != len(labels):
                raise SeriesError("one truncation order per variable expected")
            if any(o is not None and o < 0 for o in order):
                raise SeriesError("negative truncation order")
        elif not isinstance(order, int) or order < 0:
            raise SeriesError("order must be a non-negative int or a tuple")
        self.labels = labels
        self.order = order
        c = {}
        for e, v in coeffs.items():
            e = tuple(e)
            if len(e) != len(labels) or any(k < 0 for k in e):
                raise SeriesError(f"bad exponent {e!r}")
            v = _to_fraction(v)
            if v and self._keeps(e):
                c[e] = c.get(e, 0) + v
        self._c = {e: v for e, v in c.items() if v}

    # -- construction -----------------------------------------------------------

    @classmethod
    def constant(cls, value: Scalar, labels: Sequence[str], order: Order) -> "TruncatedSeries":
        return cls({(0,) * len(labels): value}, labels, order)

    @classmethod
    def variable(cls, name: str, labels: Sequence[str], order: Order) -> "TruncatedSeries":
        labels = tuple(labels)
        e = tuple(1 if lab == name else 0 for lab in labels)
        if sum(e) != 1:
            raise SeriesError(f"unknown variable {name!r}")
        return cls({e: 1}, labels, order)

    @classmethod
    def from_univariate(cls, coeffs: Iterable[Scalar], label: str = "x", order: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        return cls({(k,): c for k, c in enumerate(coeffs)}, (label,), order)

    def _keeps(self, e: tuple) -> bool:
        if isinstance(self.order, int):
            return sum(e) <= self.order
        return all(o is None or k <= o for k, o in zip(e, self.order))

    def _like(self, coeffs: Mapping[tuple, Fraction], order: Order | None = None) -> "TruncatedSeries":
        out = object.__new__(TruncatedSeries)
        out.labels = self.labels
        out.order = self.order if order is None else order
        out._c = {e: v for e, v in coeffs.items() if v and out._keeps(e)}
        return out

    # -- inspection ---------------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.labels)

    def items(self) -> Iterator[tuple[tuple, Fraction]]:
        return iter(sorted(self._c.items(), key=lambda kv: (sum(kv[0]), kv[0])))

    def support(self) -> list[tuple]:
        return [e for e, _ in self.items()]

    def coeff(self, exponents) -> Fraction:
        if isinstance(exponents, int):
            exponents = (exponents,)
        e = tuple(exponents)
        if len(e) != self.nvars:
            raise SeriesError(f"expected {self.nvars} exponents, got {len(e)}")
        if not self._keeps(e):
            raise InsufficientOrderError(
                f"coefficient {e} lies beyond truncation order {self.order!r}"
            )
        return self._c.get(e, Fraction(0))

    __getitem__ = coeff

    def constant_term(self) -> Fraction:
        return self._c.get((0,) * self.nvars, Fraction(0))

    def valuation(self) -> int | None:
        """Smallest total degree with a nonzero coefficient (None for zero)."""
        return min((sum(e) for e in self._c), default=None)

    def monomials(self) -> list[tuple]:
        """All exponent tuples inside the truncation set, by total degree."""
        if isinstance(self.order, int):
            n, N = self.nvars, self.order
            out = [e for e in itertools.product(range(N + 1), repeat=n) if sum(e) <= N]
        else:
            if any(o is None for o in self.order):
                raise SeriesError("an untruncated variable has infinitely many monomials")
            out = list(itertools.product(*(range(o + 1) for o in self.order)))
        out.sort(key=lambda e: (sum(e), e))
        return out

    def is_zero(self) -> bool:
        return not self._c

    def __repr__(self) -> str:
        if not self._c:
            body = "0"
        else:
            terms = []
            for e, v in self.items():
                mono = "*".join(
                    lab if k == 1 else f"{lab}^{k}" for lab, k in zip(self.labels, e) if k
                )
                terms.append(f"({v})" + (f"*{mono}" if mono else ""))
            body = " + ".join(terms)
        return f"TruncatedSeries({body}, order={self.order!r})"

    # -- ring operations ------------------------------------------------------------

    def _check(self, other: "TruncatedSeries") -> Order:
        if other.labels != self.labels:
            raise IncompatibleSeriesError(f"variables {self.labels} vs {other.labels}")
        return _min_order(self.order, other.order)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return TruncatedSeries.constant(other, self.labels, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        order = self._check(other)
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0) + v
        return self._like(c, order)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            f = Fraction(other)
            return self._like({e: v * f for e, v in self._c.items()})
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        order = self._check(other)
        probe = self._like({}, order)
        c: dict[tuple, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if probe._keeps(e):
                    c[e] = c.get(e, 0) + v1 * v2
        return self._like(c, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            return self * (1 / Fraction(other))
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SeriesError("only non-negative integer powers")
        result = TruncatedSeries.constant(1, self.labels, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.labels == other.labels and self.order == other.order and self._c == other._c

    def __hash__(self):
        return hash((self.labels, self.order, frozenset(self._c.items())))

    def agrees_with(self, other: "TruncatedSeries") -> bool:
        """Equality of coefficients in the common truncation set."""
        order = self._check(other)
        return self.truncate(order)._c == other.truncate(order)._c

    # -- derived operations ---------------------------------------------------------

    def truncate(self, order: Order) -> "TruncatedSeries":
        new = _min_order(self.order, order)
        return self._like(self._c, new)

    def derivative(self, var: int | str) -> "TruncatedSeries":
        i = self.labels.index(var) if isinstance(var, str) else var
        c = {}
        for e, v in self._c.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                c[tuple(e2)] = v * e[i]
        # d/dx lowers the order in x by one; total-degree order drops by one too
        if isinstance(self.order, int):
            order = max(self.order - 1, 0)
        else:
            order = tuple(
                o if (j != i or o is None) else max(o - 1, 0) for j, o in enumerate(self.order)
            )
        return self._like(c, order)

    def euler(self, var: int | str) -> "TruncatedSeries":
        """``x d/dx`` in the given variable; keeps the order."""
        i = self.labels.index(var) if isinstance(var, str) else var
        return self._like({e: v * e[i] for e, v in self._c.items()})

    def reciprocal(self) -> "TruncatedSeries":
        a0 = self.constant_term()
        if a0 == 0:
            raise SeriesError("reciprocal needs a nonzero constant term")
        inv0 = 1 / a0
        rest = [(e, v) for e, v in self._c.items() if any(e)]
        b: dict[tuple, Fraction] = {}
        for m in self.monomials():
            if not any(m):
                b[m] = inv0
                continue
            s = Fraction(0)
            for e, v in rest:
                d = tuple(x - y for x, y in zip(m, e))
                if min(d) >= 0:
                    bd = b.get(d)
                    if bd:
                        s += v * bd
            if s:
                b[m] = -inv0 * s
        return self._like(b)

    def log(self) -> "TruncatedSeries":
        if self.constant_term() != 1:
            raise SeriesError("log needs constant term 1")
        num = self.euler(0)
        for i in range(1, self.nvars):
            num = num + self.euler(i)
        q = num * self.reciprocal()
        return self._like({e: v / sum(e) for e, v in q._c.items() if any(e)})

    def compose_into(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """Evaluate this univariate series at ``inner`` (which must vanish at 0)."""
        if self.nvars != 1:
            raise SeriesError("outer series of a composition must be univariate")
        if inner.constant_term() != 0:
            raise SeriesError("inner series of a composition needs zero constant term")
        N = self.order
        if isinstance(inner.order, int):
            order = min(N, inner.order)
        else:
            if any(o is None for o in inner.order) or sum(inner.order) > N:
                raise SeriesError("outer order too small for this box truncation")
            order = inner.order
        inner = inner.truncate(order)
        result = TruncatedSeries.constant(self.coeff((N,)), inner.labels, order)
        for k in range(N - 1, -1, -1):
            result = result * inner + self.coeff((k,))
        return result

    def substitute(self, var: int | str, value: Scalar) -> "TruncatedSeries":
        """Set one variable to a rational value; it must be truncated or polynomial."""
        i = self.labels.index(var) if isinstance(var, str) else var
        if self.nvars == 1:
            raise SeriesError("cannot eliminate the only variable; use evaluate()")
        value = _to_fraction(value)
        labels = self.labels[:i] + self.labels[i + 1 :]
        if isinstance(self.order, int):
            order: Order = self.order
        else:
            order = self.order[:i] + self.order[i + 1 :]
        c: dict[tuple, Fraction] = {}
        for e, v in self._c.items():
            e2 = e[:i] + e[i + 1 :]
            c[e2] = c.get(e2, 0) + v * value ** e[i]
        return TruncatedSeries(c, labels, _squeeze(order))

    def integrate_unit(self, var: int | str) -> "TruncatedSeries":
        """Integrate over ``var`` in [0, 1] term by term (``v^m -> 1/(m+1)``)."""
        i = self.labels.index(var) if isinstance(var, str) else var
        if self.nvars == 1:
            raise SeriesError("cannot integrate out the only variable")
        if isinstance(self.order, tuple) and self.order[i] is not None:
            raise SeriesError("integration needs the variable to be exactly polynomial")
        labels = self.labels[:i] + self.labels[i + 1 :]
        order = self.order if isinstance(self.order, int) else self.order[:i] + self.order[i + 1 :]
        c: dict[tuple, Fraction] = {}
        for e, v in self._c.items():
            e2 = e[:i] + e[i + 1 :]
            c[e2] = c.get(e2, 0) + v / (e[i] + 1)
        return TruncatedSeries(c, labels, _squeeze(order))

    def evaluate(self, *values) -> Fraction:
        """Exact value of the truncated polynomial at rational point(s)."""
        if len(values) != self.nvars:
            raise SeriesError("one value per variable expected")
        vals = [_to_fraction(x) for x in values]
        total = Fraction(0)
        for e, v in self._c.items():
            term = v
            for x, k in zip(vals, e):
                term *= x**k
            total += term
        return total

    def to_float_dict(self) -> dict[tuple, float]:
        return {e: float(v) for e, v in self._c.items()}


# -- functional surface ---------------------------------------------------------------


def series_arith(op: str, a: TruncatedSeries, b) -> TruncatedSeries:
    """``op`` in {add, sub, mul, scalar-mul}; ``b`` is a series or (for scalar-mul) a rational."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        if not isinstance(b, TruncatedSeries):
            raise IncompatibleSeriesError("mul expects two series")
        return a * b
    if op == "scalar-mul":
        return a * _to_fraction(b)
    raise ValueError(f"unknown op {op!r}")


def series_compose_recip(mode: str, a: TruncatedSeries, inner: TruncatedSeries | None = None):
    if mode == "reciprocal":
        return a.reciprocal()
    if mode == "log":
        return a.log()
    if mode == "compose":
        if inner is None:
            raise SeriesError("compose needs an inner series")
        return a.compose_into(inner)
    raise ValueError(f"unknown mode {mode!r}")


def coeff(a: TruncatedSeries, exponents) -> Fraction:
    return a.coeff(exponents)


def geometric(label: str = "x", order: int = 8) -> TruncatedSeries:
    """``1/(1 - label)`` to the given order."""
    return TruncatedSeries.from_univariate([1] * (order + 1), label, order)
