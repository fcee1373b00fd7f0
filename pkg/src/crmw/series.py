"""Exact truncated multivariate power series over the Gaussian rationals.

Variables are laid out in a fixed order inside every exponent vector::

    z_1..z_s, zbar_1..zbar_s, zeta_1..zeta_r, zetabar_1..zetabar_r, [t]

A variable is addressed as ``(kind, position)`` with ``kind`` one of
``"z", "zbar", "zeta", "zetabar", "t"`` and a 0-based position.

Two gradings are supported.  Under ``"total"`` every variable has degree 1.
Under ``"weighted"`` z and zbar have weight 1, zeta and zetabar weight 0 and
t weight 2.  A series only knows its terms up to its ``order``; the order is
part of equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

Exponent = Tuple[int, ...]
Var = Tuple[str, int]

KINDS = ("z", "zbar", "zeta", "zetabar", "t")
TOTAL = "total"
WEIGHTED = "weighted"


class SeriesError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Gaussian rationals


def _q(x) -> mpq:
    if isinstance(x, type(mpq(0))):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return _parse_rat(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


_INT = r"-?[0-9]+"
_RAT = rf"{_INT}(?:/{_INT})?"
_GR_RE = re.compile(
    rf"^(?:(?P<re>{_RAT})(?:(?P<sign>[+-])(?P<im>{_RAT})i)?|(?P<pure>{_RAT})i)$"
)


def _parse_rat(text: str) -> mpq:
    if not re.fullmatch(_RAT, text):
        raise SeriesError(f"malformed rational {text!r}")
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise SeriesError(f"zero denominator in {text!r}")
        return mpq(int(num), int(den))
    return mpq(int(text))


def _fmt_rat(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("imaginary part given twice")
            self.re, self.im = re.re, re.im
            return
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "GaussianRational":
        g = object.__new__(cls)
        g.re = re
        g.im = im
        return g

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        m = _GR_RE.match(text)
        if m is None:
            raise SeriesError(f"malformed Gaussian rational {text!r}")
        if m.group("pure") is not None:
            return cls._raw(mpq(0), _parse_rat(m.group("pure")))
        re_part = _parse_rat(m.group("re"))
        if m.group("im") is None:
            return cls._raw(re_part, mpq(0))
        im_text = m.group("im")
        im_part = _parse_rat(im_text)
        if m.group("sign") == "-":
            im_part = -im_part
        return cls._raw(re_part, im_part)

    def __str__(self) -> str:
        if not self.im:
            return _fmt_rat(self.re)
        if not self.re:
            return _fmt_rat(self.im) + "i"
        sign = "-" if self.im < 0 else "+"
        return f"{_fmt_rat(self.re)}{sign}{_fmt_rat(abs(self.im))}i"

    def __repr__(self) -> str:
        return f"GR({self})"

    # arithmetic ------------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)) or isinstance(x, type(mpq(0))):
            return GaussianRational._raw(_q(x), mpq(0))
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational._raw(self.re / n, -self.im / n)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def norm2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((int(self.re.numerator), int(self.re.denominator),
                     int(self.im.numerator), int(self.im.denominator)))


GR = GaussianRational
ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def gr(x) -> GaussianRational:
    """Coerce ints, Fractions, strings and GaussianRationals."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, str):
        return GaussianRational.parse(x)
    return GaussianRational(x)


# ---------------------------------------------------------------------------
# variable spaces


@dataclass(frozen=True)
class VarSpace:
    s: int
    r: int
    has_t: bool = False

    def __post_init__(self):
        if self.s < 1 or self.r < 0:
            raise SeriesError(f"invalid variable space s={self.s}, r={self.r}")

    @property
    def nvars(self) -> int:
        return 2 * self.s + 2 * self.r + (1 if self.has_t else 0)

    def index(self, var: Var) -> int:
        kind, pos = var
        s, r = self.s, self.r
        if kind == "z" and 0 <= pos < s:
            return pos
        if kind == "zbar" and 0 <= pos < s:
            return s + pos
        if kind == "zeta" and 0 <= pos < r:
            return 2 * s + pos
        if kind == "zetabar" and 0 <= pos < r:
            return 2 * s + r + pos
        if kind == "t" and pos == 0 and self.has_t:
            return 2 * s + 2 * r
        raise SeriesError(f"variable {var!r} not in {self}")

    def var_at(self, idx: int) -> Var:
        s, r = self.s, self.r
        if idx < s:
            return ("z", idx)
        if idx < 2 * s:
            return ("zbar", idx - s)
        if idx < 2 * s + r:
            return ("zeta", idx - 2 * s)
        if idx < 2 * s + 2 * r:
            return ("zetabar", idx - 2 * s - r)
        if idx == 2 * s + 2 * r and self.has_t:
            return ("t", 0)
        raise SeriesError(f"index {idx} out of range for {self}")

    def weights(self, grading: str) -> Tuple[int, ...]:
        return _weights(self, grading)

    def conj_perm(self) -> Tuple[int, ...]:
        return _conj_perm(self)

    def with_t(self) -> "VarSpace":
        return VarSpace(self.s, self.r, True)


@lru_cache(maxsize=None)
def _weights(space: VarSpace, grading: str) -> Tuple[int, ...]:
    if grading == TOTAL:
        return (1,) * space.nvars
    if grading == WEIGHTED:
        w = [1] * (2 * space.s) + [0] * (2 * space.r)
        if space.has_t:
            w.append(2)
        return tuple(w)
    raise SeriesError(f"unknown grading {grading!r}")


@lru_cache(maxsize=None)
def _conj_perm(space: VarSpace) -> Tuple[int, ...]:
    # position k of the conjugate exponent reads position perm[k] of the original
    s, r = space.s, space.r
    perm = list(range(s, 2 * s)) + list(range(s))
    perm += list(range(2 * s + r, 2 * s + 2 * r)) + list(range(2 * s, 2 * s + r))
    if space.has_t:
        perm.append(2 * s + 2 * r)
    return tuple(perm)


# ---------------------------------------------------------------------------
# truncated series


class TruncatedSeries:
    """Sparse truncated series; immutable once built."""

    __slots__ = ("space", "order", "grading", "terms", "_bydeg")

    def __init__(self, space: VarSpace, order: int,
                 terms: Optional[Mapping[Exponent, object]] = None,
                 grading: str = TOTAL, *, _trusted: bool = False):
        if order < 0:
            raise SeriesError("truncation order must be non-negative")
        self.space = space
        self.order = order
        self.grading = grading
        self._bydeg = None
        if _trusted:
            self.terms = terms if terms is not None else {}
            return
        w = space.weights(grading)
        n = space.nvars
        clean: Dict[Exponent, GaussianRational] = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n or any(k < 0 for k in e):
                raise SeriesError(f"bad exponent {e!r} for {space}")
            c = gr(c)
            if not c:
                continue
            if sum(a * b for a, b in zip(e, w)) > order:
                continue
            clean[e] = c
        self.terms = clean

    # constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, space: VarSpace, order: int, grading: str = TOTAL):
        return cls(space, order, {}, grading, _trusted=True)

    @classmethod
    def const(cls, space: VarSpace, c, order: int, grading: str = TOTAL):
        c = gr(c)
        terms = {(0,) * space.nvars: c} if c else {}
        return cls(space, order, terms, grading, _trusted=True)

    @classmethod
    def var(cls, space: VarSpace, var: Var, order: int, grading: str = TOTAL):
        e = [0] * space.nvars
        e[space.index(var)] = 1
        return cls(space, order, {tuple(e): ONE}, grading)

    # basic queries ---------------------------------------------------------
    def degree(self, e: Exponent) -> int:
        w = self.space.weights(self.grading)
        if self.grading == TOTAL:
            return sum(e)
        return sum(a * b for a, b in zip(e, w))

    def coeff(self, e: Exponent) -> GaussianRational:
        return self.terms.get(tuple(e), ZERO)

    def constant(self) -> GaussianRational:
        return self.terms.get((0,) * self.space.nvars, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Optional[int]:
        if not self.terms:
            return None
        return min(self.degree(e) for e in self.terms)

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            for k, a in enumerate(e):
                if a:
                    used.add(self.space.var_at(k))
        return used

    def sorted_terms(self):
        """Terms in the fixed monomial order: by degree, then exponent tuple."""
        return sorted(self.terms.items(), key=lambda kv: (self.degree(kv[0]), kv[0]))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{_mono_str(self.space, e)}" for e, c in self.sorted_terms())
        return f"<series order={self.order} {self.grading}: {body or '0'}>"

    # comparison ------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.space == other.space and self.order == other.order
                and self.grading == other.grading and self.terms == other.terms)

    __hash__ = None

    def equal_to_order(self, other: "TruncatedSeries", order: Optional[int] = None) -> bool:
        """Compare the known parts of two series up to a common order."""
        d = min(self.order, other.order) if order is None else order
        return self.truncate(d).terms == other.truncate(d).terms

    # helpers ---------------------------------------------------------------
    def _check(self, other: "TruncatedSeries"):
        if self.space != other.space:
            raise SeriesError(f"variable-space mismatch: {self.space} vs {other.space}")
        if self.grading != other.grading:
            raise SeriesError("grading mismatch")

    def _lift(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        c = GaussianRational._coerce(other)
        if c is None:
            return None
        return TruncatedSeries.const(self.space, c, self.order, self.grading)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            if order == self.order:
                return self
            raise SeriesError("cannot raise the truncation order of a series")
        terms = {e: c for e, c in self.terms.items() if self.degree(e) <= order}
        return TruncatedSeries(self.space, order, terms, self.grading, _trusted=True)

    def with_order(self, order: int) -> "TruncatedSeries":
        """Declare a new order.  Raising it asserts that the series is exact."""
        if order <= self.order:
            return self.truncate(order)
        return TruncatedSeries(self.space, order, dict(self.terms), self.grading, _trusted=True)

    def _by_degree(self):
        if self._bydeg is None:
            groups: Dict[int, list] = {}
            for e, c in self.terms.items():
                groups.setdefault(self.degree(e), []).append((e, c.re, c.im))
            self._bydeg = sorted(groups.items())
        return self._bydeg

    # ring operations -------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        terms = {}
        for src in (self, o):
            for e, c in src.terms.items():
                if src.degree(e) > order:
                    continue
                prev = terms.get(e)
                terms[e] = c if prev is None else prev + c
        terms = {e: c for e, c in terms.items() if c}
        return TruncatedSeries(self.space, order, terms, self.grading, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.space, self.order,
                               {e: -c for e, c in self.terms.items()},
                               self.grading, _trusted=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "TruncatedSeries":
        c = gr(c)
        if not c:
            return TruncatedSeries.zero(self.space, self.order, self.grading)
        return TruncatedSeries(self.space, self.order,
                               {e: v * c for e, v in self.terms.items()},
                               self.grading, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = GaussianRational._coerce(other)
            if c is None:
                return NotImplemented
            return self.scale(c)
        self._check(other)
        order = min(self.order, other.order)
        acc: Dict[Exponent, list] = {}
        groups = other._by_degree()
        for da, items_a in self._by_degree():
            room = order - da
            if room < 0:
                break
            for db, items_b in groups:
                if db > room:
                    break
                for ea, ar, ai in items_a:
                    for eb, br, bi in items_b:
                        e = tuple(x + y for x, y in zip(ea, eb))
                        slot = acc.get(e)
                        if slot is None:
                            acc[e] = [ar * br - ai * bi, ar * bi + ai * br]
                        else:
                            slot[0] += ar * br - ai * bi
                            slot[1] += ar * bi + ai * br
        terms = {e: GaussianRational._raw(v[0], v[1]) for e, v in acc.items() if v[0] or v[1]}
        return TruncatedSeries(self.space, order, terms, self.grading, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = GaussianRational._coerce(other)
        if c is None:
            return NotImplemented
        return self.scale(c.inverse())

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = TruncatedSeries.const(self.space, ONE, self.order, self.grading)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; needs a nonzero constant term and total grading."""
        c0 = self.constant()
        if not c0:
            raise SeriesError("series with zero constant term is not invertible")
        if self.grading != TOTAL:
            raise SeriesError("inverse is only defined under total grading")
        n = TruncatedSeries.const(self.space, ONE, self.order) - self * c0.inverse()
        acc = TruncatedSeries.const(self.space, ONE, self.order)
        power = acc
        for _ in range(self.order):
            power = power * n
            if power.is_zero():
                break
            acc = acc + power
        return acc * c0.inverse()

    # involution and calculus -----------------------------------------------
    def conjugate(self) -> "TruncatedSeries":
        perm = self.space.conj_perm()
        terms = {tuple(e[k] for k in perm): c.conjugate() for e, c in self.terms.items()}
        return TruncatedSeries(self.space, self.order, terms, self.grading, _trusted=True)

    def real_part(self) -> "TruncatedSeries":
        return (self + self.conjugate()) * GaussianRational._raw(mpq(1, 2), mpq(0))

    def differentiate(self, var: Var) -> "TruncatedSeries":
        k = self.space.index(var)
        wk = self.space.weights(self.grading)[k]
        order = self.order - wk
        if order < 0:
            raise SeriesError("differentiation would leave no known terms")
        terms = {}
        for e, c in self.terms.items():
            a = e[k]
            if a:
                ne = e[:k] + (a - 1,) + e[k + 1:]
                terms[ne] = c * a
        out = TruncatedSeries(self.space, order, terms, self.grading, _trusted=True)
        return out if wk == 0 else out._drop_above()

    def _drop_above(self) -> "TruncatedSeries":
        if all(self.degree(e) <= self.order for e in self.terms):
            return self
        return TruncatedSeries(self.space, self.order,
                               {e: c for e, c in self.terms.items() if self.degree(e) <= self.order},
                               self.grading, _trusted=True)

    def set_zero(self, kinds: Iterable[str]) -> "TruncatedSeries":
        """Substitute 0 for every variable of the given kinds."""
        kinds = set(kinds)
        idx = [k for k in range(self.space.nvars) if self.space.var_at(k)[0] in kinds]
        terms = {e: c for e, c in self.terms.items() if not any(e[k] for k in idx)}
        return TruncatedSeries(self.space, self.order, terms, self.grading, _trusted=True)

    def restrict_degree(self, degree: int) -> "TruncatedSeries":
        """Homogeneous component of the given degree (same order)."""
        terms = {e: c for e, c in self.terms.items() if self.degree(e) == degree}
        return TruncatedSeries(self.space, self.order, terms, self.grading, _trusted=True)

    def embed(self, space: VarSpace) -> "TruncatedSeries":
        """Re-express in a larger space with the same s and r (e.g. adding t)."""
        if (space.s, space.r) != (self.space.s, self.space.r):
            raise SeriesError("embedding needs matching s and r")
        if self.space.has_t and not space.has_t:
            if any(e[-1] for e in self.terms):
                raise SeriesError("series depends on t")
            terms = {e[:-1]: c for e, c in self.terms.items()}
        elif space.has_t and not self.space.has_t:
            terms = {e + (0,): c for e, c in self.terms.items()}
        else:
            terms = dict(self.terms)
        return TruncatedSeries(space, self.order, terms, self.grading, _trusted=True)

    def compose(self, subst: Mapping[Var, "TruncatedSeries"]) -> "TruncatedSeries":
        return compose(self, subst)


def _mono_str(space: VarSpace, e: Exponent) -> str:
    parts = []
    for k, a in enumerate(e):
        if a:
            kind, pos = space.var_at(k)
            name = f"{kind}{pos + 1}" if kind != "t" else "t"
            parts.append(name if a == 1 else f"{name}^{a}")
    return "*".join(parts) or "1"


# ---------------------------------------------------------------------------
# functional interface


def arith(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise SeriesError(f"unknown operation {op!r}")


def conjugate(a: TruncatedSeries) -> TruncatedSeries:
    return a.conjugate()


def differentiate(a: TruncatedSeries, var: Var) -> TruncatedSeries:
    return a.differentiate(var)


def compose(a: TruncatedSeries, subst: Mapping[Var, TruncatedSeries]) -> TruncatedSeries:
    """Substitute series for variables; unmapped variables stay put."""
    space = a.space
    w = space.weights(a.grading)
    order = a.order
    table = {}
    for var, sub in subst.items():
        k = space.index(var)
        if sub.space != space or sub.grading != a.grading:
            raise SeriesError(f"substitute for {var!r} lives in a different space or grading")
        v = sub.valuation()
        if w[k] > 0 and v is not None and v < w[k]:
            raise SeriesError(
                f"ill-founded substitution: {var!r} has weight {w[k]} but its substitute "
                f"has a term of degree {v}")
        order = min(order, sub.order)
        table[k] = sub
    one = TruncatedSeries.const(space, ONE, order, a.grading)
    powers: Dict[Tuple[int, int], TruncatedSeries] = {}

    def power(k: int, n: int) -> TruncatedSeries:
        key = (k, n)
        if key not in powers:
            if n == 0:
                powers[key] = one
            else:
                base = table[k].truncate(order) if table[k].order > order else table[k]
                powers[key] = power(k, n - 1) * base
        return powers[key]

    acc: Dict[Exponent, GaussianRational] = {}
    for e, c in a.terms.items():
        kept = tuple(0 if k in table else x for k, x in enumerate(e))
        prod = TruncatedSeries(space, order, {kept: c}, a.grading)
        if prod.is_zero():
            # the kept monomial alone already exceeds the order
            continue
        for k in table:
            if e[k]:
                prod = prod * power(k, e[k])
                if prod.is_zero():
                    break
        for pe, pc in prod.terms.items():
            prev = acc.get(pe)
            acc[pe] = pc if prev is None else prev + pc
    terms = {e: c for e, c in acc.items() if c}
    return TruncatedSeries(space, order, terms, a.grading, _trusted=True)


def linear_part_zeta(F: Sequence[TruncatedSeries]):
    """Jacobian at 0 of a map in the zeta variables, rows indexed by the map."""
    if not F:
        return []
    space = F[0].space
    n = space.nvars
    jac = []
    for f in F:
        row = []
        for a in range(space.r):
            e = [0] * n
            e[space.index(("zeta", a))] = 1
            row.append(f.coeff(tuple(e)))
        jac.append(row)
    return jac


def invert_map(F: Sequence[TruncatedSeries]) -> Tuple[TruncatedSeries, ...]:
    """Two-sided inverse of a map zeta -> F(zeta) with F(0)=0 and invertible Jacobian.

    Fixed-point iteration G <- J^{-1}(zeta - N(G)) where F = J zeta + N; each
    pass fixes one more degree.
    """
    from . import linalg

    if not F:
        return ()
    space = F[0].space
    r = space.r
    if len(F) != r:
        raise SeriesError(f"expected {r} component functions, got {len(F)}")
    order = min(f.order for f in F)
    for f in F:
        if f.space != space or f.grading != TOTAL:
            raise SeriesError("invert_map needs total-graded series in one space")
        if any(kind != "zeta" for kind, _ in f.variables()):
            raise SeriesError("invert_map takes series in zeta only")
        if f.constant():
            raise SeriesError("map does not fix the origin")
    J = linear_part_zeta(F)
    try:
        Jinv = linalg.inverse(J)
    except linalg.SingularMatrixError:
        raise SeriesError("singular linear part") from None
    zeta = [TruncatedSeries.var(space, ("zeta", a), order) for a in range(r)]
    lin = [sum((zeta[b] * J[a][b] for b in range(r)), TruncatedSeries.zero(space, order))
           for a in range(r)]
    N = [f.truncate(order) - lin[a] for a, f in enumerate(F)]

    def apply_jinv(vec):
        return [sum((vec[b] * Jinv[a][b] for b in range(r)), TruncatedSeries.zero(space, order))
                for a in range(r)]

    G = apply_jinv(zeta)
    for _ in range(order):
        sub = {("zeta", b): G[b] for b in range(r)}
        NG = [compose(n, sub) for n in N]
        G = apply_jinv([zeta[a] - NG[a] for a in range(r)])
    return tuple(G)


def compose_maps(F: Sequence[TruncatedSeries], G: Sequence[TruncatedSeries]) -> Tuple[TruncatedSeries, ...]:
    """(F o G)(zeta) = F(G(zeta)) for maps in the zeta variables."""
    sub = {("zeta", b): g for b, g in enumerate(G)}
    return tuple(compose(f, sub) for f in F)


# ---------------------------------------------------------------------------
# series matrices


class SeriesMatrix:
    """Rectangular matrix of series sharing one space, grading and order."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[TruncatedSeries]]):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise SeriesError("empty series matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise SeriesError("ragged series matrix")
        first = rows[0][0]
        order = min(x.order for r in rows for x in r)
        fixed = []
        for r in rows:
            out = []
            for x in r:
                if not isinstance(x, TruncatedSeries):
                    raise SeriesError("series matrix entries must be series")
                if x.space != first.space or x.grading != first.grading:
                    raise SeriesError("series matrix entries disagree on space or grading")
                out.append(x.truncate(order) if x.order != order else x)
            fixed.append(tuple(out))
        self.entries = tuple(fixed)
        self.rows = len(fixed)
        self.cols = ncols

    # constructors ----------------------------------------------------------
    @classmethod
    def from_constant(cls, M, space: VarSpace, order: int, grading: str = TOTAL):
        return cls([[TruncatedSeries.const(space, gr(x), order, grading) for x in row] for row in M])

    @classmethod
    def identity(cls, n: int, space: VarSpace, order: int, grading: str = TOTAL):
        return cls.from_constant([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                                 space, order, grading)

    @classmethod
    def zeros(cls, rows: int, cols: int, space: VarSpace, order: int, grading: str = TOTAL):
        return cls.from_constant([[0] * cols for _ in range(rows)], space, order, grading)

    # properties ------------------------------------------------------------
    @property
    def space(self) -> VarSpace:
        return self.entries[0][0].space

    @property
    def order(self) -> int:
        return self.entries[0][0].order

    @property
    def grading(self) -> str:
        return self.entries[0][0].grading

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> TruncatedSeries:
        i, j = ij
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    __hash__ = None

    def __repr__(self) -> str:
        return f"<SeriesMatrix {self.rows}x{self.cols} order={self.order}>"

    def map(self, f) -> "SeriesMatrix":
        return SeriesMatrix([[f(x) for x in row] for row in self.entries])

    def constant(self):
        return [[x.constant() for x in row] for row in self.entries]

    def truncate(self, order: int) -> "SeriesMatrix":
        return self.map(lambda x: x.truncate(order))

    # algebra ---------------------------------------------------------------
    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise SeriesError(f"dimension mismatch {self.shape} + {other.shape}")
        return SeriesMatrix([[a + b for a, b in zip(ra, rb)]
                             for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise SeriesError(f"dimension mismatch {self.shape} - {other.shape}")
        return SeriesMatrix([[a - b for a, b in zip(ra, rb)]
                             for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self) -> "SeriesMatrix":
        return self.map(lambda x: -x)

    def __mul__(self, c) -> "SeriesMatrix":
        if isinstance(c, SeriesMatrix):
            return NotImplemented
        return self.map(lambda x: x * c)

    __rmul__ = __mul__

    def __matmul__(self, other) -> "SeriesMatrix":
        if not isinstance(other, SeriesMatrix):
            # constant matrix on the right
            other = SeriesMatrix.from_constant(other, self.space, self.order, self.grading)
        if self.cols != other.rows:
            raise SeriesError(f"dimension mismatch {self.shape} @ {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return SeriesMatrix(out)

    def __rmatmul__(self, other) -> "SeriesMatrix":
        # constant matrix on the left
        return SeriesMatrix.from_constant(other, self.space, self.order, self.grading) @ self

    @property
    def T(self) -> "SeriesMatrix":
        return SeriesMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def conjugate(self) -> "SeriesMatrix":
        return self.map(lambda x: x.conjugate())

    def adjoint(self) -> "SeriesMatrix":
        return self.conjugate().T

    def differentiate(self, var: Var) -> "SeriesMatrix":
        return self.map(lambda x: x.differentiate(var))

    def set_zero(self, kinds) -> "SeriesMatrix":
        return self.map(lambda x: x.set_zero(kinds))

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def is_symmetric(self) -> bool:
        return self == self.T

    def is_hermitian(self) -> bool:
        return self == self.adjoint()

    def neumann_inverse(self) -> "SeriesMatrix":
        """Inverse of Id - N with N constant-term free, as sum of N^k for k <= order."""
        if self.rows != self.cols:
            raise SeriesError("neumann_inverse needs a square matrix")
        ident = SeriesMatrix.identity(self.rows, self.space, self.order, self.grading)
        N = ident - self
        if any(x.constant() for row in N.entries for x in row):
            raise SeriesError("neumann_inverse input is not unipotent (N has a constant part)")
        acc = ident
        power = ident
        for _ in range(self.order):
            power = power @ N
            if power.is_zero():
                break
            acc = acc + power
        return acc

    def inverse(self) -> "SeriesMatrix":
        """Inverse of a matrix with invertible constant part."""
        from . import linalg

        if self.rows != self.cols:
            raise SeriesError("inverse needs a square matrix")
        try:
            c0inv = linalg.inverse(self.constant())
        except linalg.SingularMatrixError:
            raise SeriesError("constant part is singular") from None
        unip = c0inv @ self  # Id - N
        return unip.neumann_inverse() @ c0inv


def mat_ops(A: SeriesMatrix, B: Optional[SeriesMatrix], op: str) -> SeriesMatrix:
    if op == "mul":
        return A @ B
    if op == "add":
        return A + B
    if op == "transpose":
        return A.T
    if op == "conjugate":
        return A.conjugate()
    if op == "neumann_inverse":
        return A.neumann_inverse()
    raise SeriesError(f"unknown matrix operation {op!r}")
