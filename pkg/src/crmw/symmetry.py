"""Explicit holomorphic infinitesimal symmetries and an exact tangency check.

A field is stored as three groups of coefficients, each a polynomial in w
whose coefficients are truncated series in (z, zeta).  Only the Euler field
actually uses w.  Tangency is tested by writing w = P + i t on the
hypersurface Re w = P and checking that Re X(Re w - P) vanishes identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from . import linalg
from .lie import CspElement, LieError, bracket, sigma
from .model import DefiningEquation, assemble_P
from .series import (
    I,
    ONE,
    ZERO,
    GaussianRational,
    SeriesMatrix,
    TruncatedSeries,
    VarSpace,
    gr,
)


class SymmetryError(ValueError):
    pass


# polynomials in w ------------------------------------------------------------

class WPoly:
    """sum_k c_k w^k with series coefficients in a common VarSpace."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: VarSpace, coeffs: Optional[Dict[int, TruncatedSeries]] = None):
        self.space = space
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if not c.is_zero()}

    @classmethod
    def of(cls, series: TruncatedSeries) -> "WPoly":
        return cls(series.space, {0: series})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __add__(self, other: "WPoly") -> "WPoly":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return WPoly(self.space, out)

    def __neg__(self) -> "WPoly":
        return WPoly(self.space, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "WPoly") -> "WPoly":
        return self + (-other)

    def scale(self, c) -> "WPoly":
        return WPoly(self.space, {k: v * gr(c) for k, v in self.coeffs.items()})

    def __mul__(self, other: "WPoly") -> "WPoly":
        out: Dict[int, TruncatedSeries] = {}
        for k, a in self.coeffs.items():
            for l, b in other.coeffs.items():
                p = a * b
                out[k + l] = out[k + l] + p if k + l in out else p
        return WPoly(self.space, out)

    def d_w(self) -> "WPoly":
        return WPoly(self.space, {k - 1: c * k for k, c in self.coeffs.items() if k})

    def d(self, var) -> "WPoly":
        return WPoly(self.space, {k: c.differentiate(var) for k, c in self.coeffs.items()})

    def evaluate(self, W: TruncatedSeries) -> TruncatedSeries:
        """Substitute a series for w (coefficients are embedded into W's space)."""
        out = TruncatedSeries.zero(W.space, W.order)
        zero = TruncatedSeries.zero(self.space, W.order)
        for k in range(self.degree(), -1, -1):
            out = out * W + self.coeffs.get(k, zero).embed(W.space)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, WPoly):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            a, b = self.coeffs.get(k), other.coeffs.get(k)
            if a is None or b is None:
                return False
            if not a.equal_to_order(b):
                return False
        return True

    __hash__ = None


@dataclass
class HoloVectorField:
    """X = Xw d/dw + sum_j Xz[j] d/dz_j + sum_a Xzeta[a] d/dzeta_a."""

    Xw: WPoly
    Xz: List[WPoly]
    Xzeta: List[WPoly]

    def __post_init__(self):
        sp = self.Xw.space
        if sp.has_t or len(self.Xz) != sp.s or len(self.Xzeta) != sp.r:
            raise SymmetryError("field components do not match VarSpace(s, r)")
        for comp in [self.Xw, *self.Xz, *self.Xzeta]:
            for c in comp.coeffs.values():
                if {v[0] for v in c.variables()} & {"zbar", "zetabar", "t"}:
                    raise SymmetryError("field coefficients must be holomorphic")

    @property
    def space(self) -> VarSpace:
        return self.Xw.space

    @property
    def s(self) -> int:
        return self.space.s

    @property
    def r(self) -> int:
        return self.space.r

    @classmethod
    def zero(cls, space: VarSpace) -> "HoloVectorField":
        z = lambda: WPoly(space)
        return cls(z(), [z() for _ in range(space.s)], [z() for _ in range(space.r)])

    def components(self) -> List[WPoly]:
        return [self.Xw, *self.Xz, *self.Xzeta]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components())

    def apply(self, f: WPoly) -> WPoly:
        """Derivative of a holomorphic function f(w, z, zeta) along the field."""
        out = self.Xw * f.d_w()
        for j, c in enumerate(self.Xz):
            if not c.is_zero():
                out = out + c * f.d(("z", j))
        for a, c in enumerate(self.Xzeta):
            if not c.is_zero():
                out = out + c * f.d(("zeta", a))
        return out

    def __add__(self, other):
        return HoloVectorField(self.Xw + other.Xw, [a + b for a, b in zip(self.Xz, other.Xz)],
                               [a + b for a, b in zip(self.Xzeta, other.Xzeta)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "HoloVectorField":
        return HoloVectorField(self.Xw.scale(c), [a.scale(c) for a in self.Xz],
                               [a.scale(c) for a in self.Xzeta])

    def __eq__(self, other) -> bool:
        if not isinstance(other, HoloVectorField):
            return NotImplemented
        return all(a == b for a, b in zip(self.components(), other.components()))

    __hash__ = None


def field_bracket(X: HoloVectorField, Y: HoloVectorField) -> HoloVectorField:
    """[X, Y] with components X(Y^k) - Y(X^k)."""
    comp = lambda a, b: X.apply(b) - Y.apply(a)
    return HoloVectorField(comp(X.Xw, Y.Xw), [comp(a, b) for a, b in zip(X.Xz, Y.Xz)],
                           [comp(a, b) for a, b in zip(X.Xzeta, Y.Xzeta)])


# constructors -----------------------------------------------------------------

def _holo_part(M: SeriesMatrix) -> SeriesMatrix:
    """M(zeta, 0)."""
    return M.set_zero({"zetabar"})


def _conj_antiholo_part(M: SeriesMatrix) -> SeriesMatrix:
    """conj(M(0, zeta-bar)) viewed as a holomorphic function of zeta."""
    return M.set_zero({"zeta"}).conjugate()


def _row(vec, sp, order):
    return SeriesMatrix([[TruncatedSeries.const(sp, gr(x), order) for x in vec]])


def _z_column(sp, order) -> SeriesMatrix:
    return SeriesMatrix([[TruncatedSeries.var(sp, ("z", j), order)] for j in range(sp.s)])


def transversal_symmetry(eq: DefiningEquation, a: Sequence, b, normalized: Optional[bool] = None
                         ) -> HoloVectorField:
    """Symmetry transversal to the Levi kernel attached to a in C^s and real b.

    With normalized=None the short form is used exactly when H(zeta, 0) is
    constant and S(0, zeta-bar) vanishes; both forms agree there.
    """
    b = gr(b)
    if b.im:
        raise SymmetryError("b must be real")
    a = [gr(x) for x in a]
    if len(a) != eq.s:
        raise SymmetryError(f"a must have length {eq.s}")
    sp, d = eq.space, eq.order
    Hz = _holo_part(eq.Hfull)
    Sz = _holo_part(eq.Sfull)
    H0 = eq.Hfull.constant()
    if normalized is None:
        normalized = _is_normalized(eq)
    abar = [x.conjugate() for x in a]
    zcol = _z_column(sp, d)
    if normalized:
        bold_S = _normalized_S(eq)
        HT = linalg.transpose(H0)
        wlin = _row(linalg.matmul([abar], HT)[0], sp, d) @ zcol
        zrow = _row(a, sp, d) - _row(linalg.matmul([abar], HT)[0], sp, d) @ bold_S
    else:
        S0 = eq.Sfull.constant()
        R = (_row(linalg.matmul([a], H0)[0], sp, d) - _row(abar, sp, d) @ Sz
             + _row(linalg.matmul([abar], S0)[0], sp, d))
        zrow = R @ Hz.inverse()
        wrow = _row(abar, sp, d) @ _conj_antiholo_part(eq.Hfull) + zrow @ _conj_antiholo_part(eq.Sfull)
        wlin = wrow @ zcol
    Xw = (wlin[0, 0] + TruncatedSeries.const(sp, b * I, d)) * 2
    return HoloVectorField(WPoly.of(Xw), [WPoly.of(zrow[0, j]) for j in range(eq.s)],
                           [WPoly(sp) for _ in range(eq.r)])


def _is_normalized(eq: DefiningEquation) -> bool:
    Hz = _holo_part(eq.Hfull)
    const = SeriesMatrix.from_constant(eq.Hfull.constant(), eq.space, eq.order)
    return Hz == const and eq.Sfull.set_zero({"zeta"}).is_zero()


def _normalized_S(eq: DefiningEquation) -> SeriesMatrix:
    """Bold S(zeta) = H0^{-T} (S(zeta, 0) - S(0, 0)) H0^{-1}."""
    H0 = eq.Hfull.constant()
    Sz = _holo_part(eq.Sfull)
    S0 = SeriesMatrix.from_constant(eq.Sfull.constant(), eq.space, eq.order)
    return linalg.inverse(linalg.transpose(H0)) @ (Sz - S0) @ linalg.inverse(H0)


def _symbol_basis(symbol) -> List[CspElement]:
    s = symbol.s
    return [CspElement(s, ZERO, L=O, S02=S) for S, O in symbol.pairs]


def isotropy_symmetry(symbol, x: CspElement, order: int) -> HoloVectorField:
    """Degree-zero isotropy field for the model realized from a symbol input.

    symbol is a realize.SymbolInput; x must carry only an L block and its
    averaged adjoint action must map span{e_a} into itself.
    """
    s, r = symbol.s, symbol.r
    if x.s != s:
        raise SymmetryError("x has the wrong size")
    only_L = CspElement(s, ZERO, L=x.L)
    if not (x - only_L).is_zero():
        raise SymmetryError("x must have only the L block")
    xs = (x + sigma(symbol.inv, x)).scale(gr("1/2"))
    basis = _symbol_basis(symbol)
    flat = [e.flat() for e in basis]
    c = []
    for alpha, e in enumerate(basis):
        coeffs = linalg.span_coefficients(flat, bracket(xs, e).flat())
        if coeffs is None:
            raise SymmetryError(
                f"x does not preserve the decomposition: bracket with e_{alpha} leaves span(e)")
        c.append(coeffs)
    sp = VarSpace(s, r)
    zs = [TruncatedSeries.var(sp, ("z", j), order) for j in range(s)]
    zetas = [TruncatedSeries.var(sp, ("zeta", b), order) for b in range(r)]
    Lp = xs.L
    zero = TruncatedSeries.zero(sp, order)
    # index placement fixed by the tangency check: d/dz_j gets (L' z)_j and
    # d/dzeta_b gets sum_a c[a][b] zeta_a
    Xz = []
    for j in range(s):
        acc = zero
        for i in range(s):
            if Lp[j][i]:
                acc = acc + zs[i] * Lp[j][i]
        Xz.append(WPoly.of(acc))
    Xzeta = []
    for beta in range(r):
        acc = zero
        for alpha in range(r):
            if c[alpha][beta]:
                acc = acc + zetas[alpha] * c[alpha][beta]
        Xzeta.append(WPoly.of(acc))
    return HoloVectorField(WPoly(sp), Xz, Xzeta)


def euler_symmetry(s: int, r: int, order: int) -> HoloVectorField:
    """2 w d/dw + sum_j z_j d/dz_j."""
    sp = VarSpace(s, r)
    Xw = WPoly(sp, {1: TruncatedSeries.const(sp, 2, order)})
    Xz = [WPoly.of(TruncatedSeries.var(sp, ("z", j), order)) for j in range(s)]
    return HoloVectorField(Xw, Xz, [WPoly(sp) for _ in range(r)])


def translation_field(s: int, r: int, order: int) -> HoloVectorField:
    """2i d/dw, the centre of the transversal algebra."""
    sp = VarSpace(s, r)
    return HoloVectorField(WPoly.of(TruncatedSeries.const(sp, 2 * I, order)),
                           [WPoly(sp) for _ in range(s)], [WPoly(sp) for _ in range(r)])


# tangency -------------------------------------------------------------------------

@dataclass
class TangencyReport:
    passed: bool
    order: int
    monomial: Optional[str] = None
    coefficient: Optional[str] = None
    bidegree: Optional[List[int]] = None

    def to_json(self) -> dict:
        out = {"passed": self.passed, "order": self.order}
        if not self.passed:
            out.update(monomial=self.monomial, coefficient=self.coefficient, bidegree=self.bidegree)
        return out


def tangency_residual(eq: DefiningEquation, X: HoloVectorField) -> TruncatedSeries:
    """Re X(Re w - P) on w = P + i t, as a series in (z, z-bar, zeta, zeta-bar, t)."""
    if (X.s, X.r) != (eq.s, eq.r):
        raise SymmetryError("field and equation have different dimensions")
    spt = eq.space.with_t()
    P = assemble_P(eq, spt)
    W = P + TruncatedSeries.var(spt, ("t", 0), P.order) * I
    R = X.Xw.evaluate(W) * gr("1/2")
    for j, c in enumerate(X.Xz):
        if not c.is_zero():
            R = R - c.evaluate(W) * P.differentiate(("z", j))
    for a, c in enumerate(X.Xzeta):
        if not c.is_zero():
            R = R - c.evaluate(W) * P.differentiate(("zeta", a))
    return R.real_part()


def verify_tangency(eq: DefiningEquation, X: HoloVectorField) -> TangencyReport:
    res = tangency_residual(eq, X)
    if res.is_zero():
        return TangencyReport(True, res.order)
    e, c = next(iter(res.sorted_terms()))
    s = eq.s
    mono = TruncatedSeries(res.space, res.order, {e: ONE})
    return TangencyReport(False, res.order, repr(mono), str(c), [sum(e[:s]), sum(e[s:2 * s])])
