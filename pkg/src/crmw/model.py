"""Defining equations Re(w) = z^T H z-bar + Re(z-bar^T S z-bar) of model hypersurfaces.

All series here live in ``VarSpace(s, r)`` under total grading.  ``ModelData``
holds the classification pair (H0, S(zeta)); ``DefiningEquation`` holds the
full blocks H(zeta, zeta-bar) and S(zeta, zeta-bar).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import linalg
from .series import (
    TOTAL,
    WEIGHTED,
    GaussianRational,
    SeriesError,
    SeriesMatrix,
    TruncatedSeries,
    VarSpace,
    gr,
)

HALF = GaussianRational(1) / 2


class ModelError(ValueError):
    pass


def _only_kinds(M: SeriesMatrix, kinds) -> bool:
    return all(kind in kinds for row in M for x in row for kind, _ in x.variables())


@dataclass
class ModelData:
    """The pair (H0, S(zeta)) with H0 Hermitian nondegenerate and S symmetric, S(0)=0."""

    H0: list
    Sz: SeriesMatrix

    def __post_init__(self):
        self.H0 = linalg.mat(self.H0)
        s = len(self.H0)
        if not linalg.is_hermitian(self.H0):
            raise ModelError("H0 must be Hermitian")
        if linalg.rank(self.H0) != s:
            raise ModelError("H0 must be nondegenerate")
        if self.Sz.shape != (s, s):
            raise ModelError(f"S must be {s}x{s}")
        if self.Sz.space.s != s or self.Sz.space.has_t or self.Sz.grading != TOTAL:
            raise ModelError("S must live in VarSpace(s, r) with total grading")
        if not self.Sz.is_symmetric():
            raise ModelError("S must be symmetric")
        if not _only_kinds(self.Sz, {"zeta"}):
            raise ModelError("S must depend on zeta only")
        if any(self.Sz.constant()[i][j] for i in range(s) for j in range(s)):
            raise ModelError("S(0) must vanish")

    @property
    def s(self) -> int:
        return len(self.H0)

    @property
    def r(self) -> int:
        return self.Sz.space.r

    @property
    def order(self) -> int:
        return self.Sz.order

    @property
    def space(self) -> VarSpace:
        return self.Sz.space

    def s02(self) -> List[list]:
        """The linear coefficients S_{zeta_alpha}(0)."""
        return [self.Sz.differentiate(("zeta", a)).constant() for a in range(self.r)]

    def is_two_nondegenerate(self) -> bool:
        mats = self.s02()
        return bool(mats) and linalg.linearly_independent([linalg.flatten(m) for m in mats])

    def truncate(self, order: int) -> "ModelData":
        return ModelData(self.H0, self.Sz.truncate(order))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelData):
            return NotImplemented
        return linalg.equal(self.H0, other.H0) and self.Sz == other.Sz

    __hash__ = None


@dataclass
class DefiningEquation:
    Hfull: SeriesMatrix
    Sfull: SeriesMatrix

    def __post_init__(self):
        s = self.Hfull.rows
        if self.Hfull.shape != (s, s) or self.Sfull.shape != (s, s):
            raise ModelError("H and S must be square of equal size")
        if self.Hfull.space != self.Sfull.space or self.Hfull.space.s != s:
            raise ModelError("H and S must share VarSpace(s, r)")
        if self.Hfull.space.has_t or self.Hfull.grading != TOTAL or self.Sfull.grading != TOTAL:
            raise ModelError("defining equations use total grading without t")
        if self.Hfull.order != self.Sfull.order:
            order = min(self.Hfull.order, self.Sfull.order)
            self.Hfull = self.Hfull.truncate(order)
            self.Sfull = self.Sfull.truncate(order)
        if not (_only_kinds(self.Hfull, {"zeta", "zetabar"}) and _only_kinds(self.Sfull, {"zeta", "zetabar"})):
            raise ModelError("H and S must depend on (zeta, zeta-bar) only")
        if not self.Hfull.is_hermitian():
            raise ModelError("H must be Hermitian as a series matrix")
        if not self.Sfull.is_symmetric():
            raise ModelError("S must be symmetric")
        if linalg.rank(self.Hfull.constant()) != s:
            raise ModelError("H(0,0) must be nondegenerate")

    @property
    def s(self) -> int:
        return self.Hfull.rows

    @property
    def r(self) -> int:
        return self.Hfull.space.r

    @property
    def order(self) -> int:
        return self.Hfull.order

    @property
    def space(self) -> VarSpace:
        return self.Hfull.space

    def __eq__(self, other) -> bool:
        if not isinstance(other, DefiningEquation):
            return NotImplemented
        return self.Hfull == other.Hfull and self.Sfull == other.Sfull

    __hash__ = None

    def P(self, space: Optional[VarSpace] = None) -> TruncatedSeries:
        return assemble_P(self, space)


def build_model(data: ModelData) -> DefiningEquation:
    """Closed formulas for H(zeta, zeta-bar) and S(zeta, zeta-bar) from (H0, S)."""
    s, sp, d = data.s, data.space, data.order
    H = SeriesMatrix.from_constant(data.H0, sp, d)
    HT = H.T
    S = data.Sz
    Sb = S.conjugate()
    ident = SeriesMatrix.identity(s, sp, d)
    inv1 = (ident - Sb @ HT @ S @ H).neumann_inverse()
    inv2 = (ident - H @ Sb @ HT @ S).neumann_inverse()
    inv3 = (ident - S @ H @ Sb @ HT).neumann_inverse()
    Hfull = (H @ inv1 + inv2 @ H) * HALF
    Sfull = HT @ inv3 @ S @ H
    return DefiningEquation(Hfull, Sfull)


def pseudoconvex_equation(Sz: SeriesMatrix) -> DefiningEquation:
    """The H0 = Id specialization: H = (Id - conj(S) S)^{-1}, S_full = (Id - S conj(S))^{-1} S."""
    s = Sz.rows
    ident = SeriesMatrix.identity(s, Sz.space, Sz.order)
    Sb = Sz.conjugate()
    return DefiningEquation((ident - Sb @ Sz).inverse(), (ident - Sz @ Sb).inverse() @ Sz)


# PDE check ------------------------------------------------------------------

@dataclass
class RankReport:
    passed: bool
    order: int
    failure: Optional[dict] = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "checked_order": self.order, "failure": self.failure}


def _zeta(a: int):
    return ("zeta", a)


def _zetabar(a: int):
    return ("zetabar", a)


class _PdeTerms:
    """Derivatives and inverse of (H, S) shared by all (alpha, beta) checks."""

    def __init__(self, eq: DefiningEquation):
        H, S = eq.Hfull, eq.Sfull
        self.Hinv = H.inverse()
        self.HinvT = self.Hinv.T
        self.Ha = [H.differentiate(_zeta(a)) for a in range(eq.r)]
        self.Hbb = [H.differentiate(_zetabar(b)) for b in range(eq.r)]
        self.Sa = [S.differentiate(_zeta(a)) for a in range(eq.r)]
        self.Sa_bar = [x.conjugate() for x in self.Sa]

    def sides(self, alpha: int, beta: int):
        Ha, Hbb, Sa = self.Ha[alpha], self.Hbb[beta], self.Sa[alpha]
        lhs1 = Ha.differentiate(_zetabar(beta))
        rhs1 = Ha @ self.Hinv @ Hbb + self.Sa_bar[beta] @ self.HinvT @ Sa
        lhs2 = Sa.differentiate(_zetabar(beta))
        rhs2 = Hbb.T @ self.HinvT @ Sa + Sa @ self.Hinv @ Hbb
        d = lhs1.order
        return (lhs1, rhs1.truncate(d)), (lhs2, rhs2.truncate(d))


def rank_condition_sides(eq: DefiningEquation, alpha: int, beta: int):
    """Both sides of the two PDEs for one (alpha, beta), truncated to a common order."""
    return _PdeTerms(eq).sides(alpha, beta)


def verify_rank_condition(eq: DefiningEquation) -> RankReport:
    if eq.order < 2:
        raise ModelError("the PDE check needs order >= 2")
    d = eq.order - 2
    best = None
    terms = _PdeTerms(eq) if eq.r else None
    for alpha in range(eq.r):
        for beta in range(eq.r):
            for k, (lhs, rhs) in enumerate(terms.sides(alpha, beta), start=1):
                for i in range(eq.s):
                    for j in range(eq.s):
                        diff = lhs[i, j] - rhs[i, j]
                        if diff.is_zero():
                            continue
                        e, _ = diff.sorted_terms()[0]
                        key = (diff.degree(e), e, k, alpha, beta, i, j)
                        if best is None or key < best[0]:
                            best = (key, {
                                "equation": k, "alpha": alpha, "beta": beta, "entry": [i, j],
                                "monomial": list(e),
                                "lhs": str(lhs[i, j].coeff(e)), "rhs": str(rhs[i, j].coeff(e)),
                            })
    if best is None:
        return RankReport(True, d)
    return RankReport(False, d, best[1])


# P and the Levi form ----------------------------------------------------------

def assemble_P(eq: DefiningEquation, space: Optional[VarSpace] = None) -> TruncatedSeries:
    """P = z^T H z-bar + 1/2 (z-bar^T S z-bar + z^T S-bar z), total order d + 2."""
    sp = space or eq.space
    s = eq.s
    d = eq.order + 2
    n = sp.nvars
    Sb = eq.Sfull.conjugate()
    terms: Dict[tuple, GaussianRational] = {}

    def put(e, c):
        prev = terms.get(e)
        terms[e] = c if prev is None else prev + c

    def lift(e, bumps):
        # e is an exponent in eq.space; copy zeta block and add z bumps
        out = [0] * n
        for k in range(2 * s, 2 * s + 2 * eq.r):
            out[k] = e[k]
        for k in bumps:
            out[k] += 1
        return tuple(out)

    for i in range(s):
        for j in range(s):
            for e, c in eq.Hfull[i, j].terms.items():
                put(lift(e, (i, s + j)), c)
            for e, c in eq.Sfull[i, j].terms.items():
                put(lift(e, (s + i, s + j)), c * HALF)
            for e, c in Sb[i, j].terms.items():
                put(lift(e, (i, j)), c * HALF)
    terms = {e: c for e, c in terms.items() if c}
    return TruncatedSeries(sp, d, terms)


@dataclass
class LeviForm:
    matrix: SeriesMatrix
    schur: SeriesMatrix

    def blocks(self, s: int):
        M = self.matrix
        n = M.rows
        take = lambda r0, r1, c0, c1: SeriesMatrix([[M[i, j] for j in range(c0, c1)] for i in range(r0, r1)])
        return take(0, s, 0, s), take(0, s, s, n), take(s, n, 0, s), take(s, n, s, n)


def levi_form_series(eq: DefiningEquation) -> LeviForm:
    """Complex Hessian of P in (z, zeta) x (z-bar, zeta-bar) and its Schur complement."""
    P = assemble_P(eq)
    s, r = eq.s, eq.r
    holo = [("z", i) for i in range(s)] + [("zeta", a) for a in range(r)]
    anti = [("zbar", i) for i in range(s)] + [("zetabar", a) for a in range(r)]
    first = [P.differentiate(u) for u in holo]
    M = SeriesMatrix([[f.differentiate(v) for v in anti] for f in first])
    levi = LeviForm(M, None)
    if r == 0:
        return levi
    A, B, C, D = levi.blocks(s)
    levi.schur = D - C @ A.inverse() @ B
    return levi


# weighted extraction ----------------------------------------------------------

@dataclass
class DefiningSeries:
    """P (weight 2, total grading of order zeta_order + 2) and Q (weight > 2, weighted)."""

    P: TruncatedSeries
    Q: Optional[TruncatedSeries] = None

    def __post_init__(self):
        w = self.P.space.weights(WEIGHTED)
        for e in self.P.terms:
            if sum(a * b for a, b in zip(e, w)) != 2:
                raise ModelError("P must be weighted-homogeneous of degree 2")
        if self.Q is not None:
            if self.Q.grading != WEIGHTED:
                raise ModelError("Q must be weighted-graded")
            for e in self.Q.terms:
                if self.Q.degree(e) <= 2:
                    raise ModelError("every term of Q must have weighted degree > 2")

    @classmethod
    def split(cls, F: TruncatedSeries, zeta_order: int) -> "DefiningSeries":
        """Split a weighted series into its degree-2 part P and the rest Q."""
        if F.grading != WEIGHTED:
            raise ModelError("split expects a weighted series")
        low = [e for e in F.terms if F.degree(e) < 2]
        if low:
            raise ModelError(f"terms of weighted degree < 2 are out of scope: {low[0]}")
        p_terms = {e: c for e, c in F.terms.items() if F.degree(e) == 2}
        q_terms = {e: c for e, c in F.terms.items() if F.degree(e) > 2}
        P = TruncatedSeries(F.space, zeta_order + 2, p_terms)
        if any(sum(e) > zeta_order + 2 for e in p_terms):
            raise ModelError("P has terms beyond the declared zeta order")
        Q = TruncatedSeries(F.space, F.order, q_terms, WEIGHTED)
        return cls(P, Q)


def _quadratic_blocks(F: TruncatedSeries, s: int, r: int, order: int, strict: bool):
    """Read H_ij and S_ij from the z-quadratic, t-free terms of F.

    With ``strict`` every term must have one of the model shapes; otherwise
    other terms are ignored (they vanish on z = 0, t = 0 after two z-derivatives).
    """
    sp = VarSpace(s, r)
    has_t = F.space.has_t
    H = [[{} for _ in range(s)] for _ in range(s)]
    S = [[{} for _ in range(s)] for _ in range(s)]
    conj_part: Dict[tuple, GaussianRational] = {}
    for e, c in F.terms.items():
        t = e[2 * s + 2 * r] if has_t else 0
        z, zb = e[:s], e[s:2 * s]
        ze = e[2 * s:2 * s + 2 * r]
        shape = (sum(z), sum(zb))
        key = (0,) * (2 * s) + tuple(ze)
        if t or shape not in ((1, 1), (0, 2), (2, 0)):
            if strict:
                raise ModelError(f"P has a term outside the model shape: exponent {list(e)}")
            continue
        if sum(ze) > order:
            continue
        if shape == (1, 1):
            i, j = z.index(1), zb.index(1)
            H[i][j][key] = c
        elif shape == (0, 2):
            idx = [k for k in range(s) for _ in range(zb[k])]
            i, j = idx
            val = c * 2 if i == j else c
            S[i][j][key] = val
            S[j][i][key] = val
        else:
            conj_part[e] = c
    mk = lambda blocks: SeriesMatrix([[TruncatedSeries(sp, order, blocks[i][j]) for j in range(s)]
                                      for i in range(s)])
    return mk(H), mk(S), conj_part


def extract_weighted_model(full: DefiningSeries) -> DefiningEquation:
    P = full.P
    sp = P.space
    s, r = sp.s, sp.r
    if P.grading != TOTAL:
        raise ModelError("P must carry total grading")
    if not P.equal_to_order(P.conjugate()):
        raise ModelError("P must be real")
    order = P.order - 2
    H, S, _ = _quadratic_blocks(P, s, r, order, strict=True)
    return DefiningEquation(H, S)


def leaf_data(F: TruncatedSeries, zeta_order: int) -> DefiningEquation:
    """Second z-derivatives of a defining series along z = 0, t = 0.

    This works directly on a perturbed series; terms of weighted degree above
    two drop out on their own.
    """
    sp = F.space
    H, S, _ = _quadratic_blocks(F, sp.s, sp.r, zeta_order, strict=False)
    return DefiningEquation(H, S)


def model_P_weighted(eq: DefiningEquation, weighted_order: int = 2) -> TruncatedSeries:
    """P of an equation re-expressed as a weighted series in the space with t."""
    P = assemble_P(eq)
    sp = eq.space.with_t()
    terms = {e + (0,): c for e, c in P.terms.items()}
    return TruncatedSeries(sp, weighted_order, terms, WEIGHTED)


# order-by-order oracle --------------------------------------------------------

class OracleInconsistency(ModelError):
    pass


def pde_propagate_oracle(data: ModelData) -> DefiningEquation:
    """Solve the rank-condition PDE degree by degree from the normalized boundary data.

    Boundary: H(zeta, 0) = H(0, zeta-bar) = H0, S(zeta, 0) = H0^T S(zeta) H0 and
    S(0, zeta-bar) = 0.  The mixed coefficients of total degree m only depend on
    data of degree < m, so each level is integrated from the PDE right-hand sides.
    """
    s, r, d, sp = data.s, data.r, data.order, data.space
    H0 = SeriesMatrix.from_constant(data.H0, sp, d)
    Hc: List[List[Dict[tuple, GaussianRational]]] = [[dict(H0[i, j].terms) for j in range(s)] for i in range(s)]
    S0 = H0.T @ data.Sz @ H0
    Sc = [[dict(S0[i, j].terms) for j in range(s)] for i in range(s)]
    zoff = 2 * s

    def as_matrix(blocks, order):
        return SeriesMatrix([[TruncatedSeries(sp, order, blocks[i][j]) for j in range(s)] for i in range(s)])

    for m in range(2, d + 1):
        H = as_matrix(Hc, m - 1)
        S = as_matrix(Sc, m - 1)
        Hinv = H.truncate(m - 2).inverse()
        HinvT = Hinv.T
        new_H: Dict[tuple, GaussianRational] = {}
        new_S: Dict[tuple, GaussianRational] = {}
        rhs_all = {}
        for alpha in range(r):
            Ha = H.differentiate(_zeta(alpha))
            Sa = S.differentiate(_zeta(alpha))
            for beta in range(r):
                Hbb = H.differentiate(_zetabar(beta))
                Sb_bar = S.differentiate(_zeta(beta)).conjugate()
                rhs1 = Ha @ Hinv @ Hbb + Sb_bar @ HinvT @ Sa
                rhs2 = Hbb.T @ HinvT @ Sa + Sa @ Hinv @ Hbb
                rhs_all[alpha, beta] = (rhs1, rhs2)
                for store, rhs in ((new_H, rhs1), (new_S, rhs2)):
                    for i in range(s):
                        for j in range(s):
                            for e, c in rhs[i, j].terms.items():
                                if sum(e) != m - 2:
                                    continue
                                t = list(e)
                                t[zoff + alpha] += 1
                                t[zoff + r + beta] += 1
                                val = c / (t[zoff + alpha] * t[zoff + r + beta])
                                key = (i, j, tuple(t))
                                prev = store.get(key)
                                if prev is None:
                                    store[key] = val
                                elif prev != val:
                                    raise OracleInconsistency(
                                        f"conflicting coefficients at degree {m}, entry {(i, j)}")

        def bidegree(key):
            e = key[2]
            return (sum(e[zoff:zoff + r]), key)

        for blocks, store in ((Hc, new_H), (Sc, new_S)):
            for key in sorted(store, key=bidegree):
                i, j, e = key
                if store[key]:
                    blocks[i][j][e] = store[key]
        # every mixed monomial of degree m must be consistent with all (alpha, beta)
        H = as_matrix(Hc, m)
        S = as_matrix(Sc, m)
        for (alpha, beta), (rhs1, rhs2) in rhs_all.items():
            lhs1 = H.differentiate(_zeta(alpha)).differentiate(_zetabar(beta))
            lhs2 = S.differentiate(_zeta(alpha)).differentiate(_zetabar(beta))
            for lhs, rhs in ((lhs1, rhs1), (lhs2, rhs2)):
                for i in range(s):
                    for j in range(s):
                        a = lhs[i, j].restrict_degree(m - 2)
                        b = rhs[i, j].restrict_degree(m - 2)
                        if a.terms != b.terms:
                            raise OracleInconsistency(f"PDE not solvable at degree {m}")
    return DefiningEquation(as_matrix(Hc, d), as_matrix(Sc, d))
