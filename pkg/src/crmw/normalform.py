"""Normal forms: removing holomorphic H terms, closed-form reconstruction,
pivot normalization of S(zeta), and verification of equivalence witnesses."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from . import linalg
from .model import DefiningEquation, ModelData, build_model
from .series import (
    GaussianRational,
    SeriesError,
    SeriesMatrix,
    TruncatedSeries,
    VarSpace,
    compose,
    invert_map,
    linear_part_zeta,
)
from .symbols import BigradedSymbol

HALF = GaussianRational(1, 0) / 2


class NormalFormError(ValueError):
    pass


# holomorphic H-terms --------------------------------------------------------

@dataclass
class NormalizationRecord:
    """Substitutions used: z_old = (Id + A(zeta))^{-1} z_new, then the pluriharmonic part removed."""

    A: SeriesMatrix
    removed_pluriharmonic: SeriesMatrix
    equation: DefiningEquation

    def is_identity(self) -> bool:
        return self.A.is_zero() and self.removed_pluriharmonic.is_zero()


def _bold_S(H0, Sz: SeriesMatrix) -> SeriesMatrix:
    S0 = SeriesMatrix.from_constant(Sz.constant(), Sz.space, Sz.order)
    return linalg.inverse(linalg.transpose(H0)) @ (Sz - S0) @ linalg.inverse(H0)


def normalize_holomorphic(eq: DefiningEquation) -> Tuple[ModelData, NormalizationRecord]:
    """Kill the non-constant holomorphic part of H and the antiholomorphic part of S."""
    H0 = eq.Hfull.constant()
    sp, d, s = eq.space, eq.order, eq.s
    Hz = eq.Hfull.set_zero({"zetabar"})
    const = SeriesMatrix.from_constant(H0, sp, d)
    At = (Hz - const) @ linalg.inverse(H0)
    A = At.T
    ident = SeriesMatrix.identity(s, sp, d)
    Pm = (ident + A).inverse()
    Pb = Pm.conjugate()
    Hn = Pm.T @ eq.Hfull @ Pb
    Sn = Pb.T @ eq.Sfull @ Pb
    plh = Sn.set_zero({"zeta"})
    Sn = Sn - plh
    normalized = DefiningEquation(Hn, Sn)
    data = ModelData(H0, _bold_S(H0, eq.Sfull.set_zero({"zetabar"})))
    return data, NormalizationRecord(A, plh, normalized)


def forward_transform(eq: DefiningEquation, A: SeriesMatrix,
                      pluriharmonic: Optional[SeriesMatrix] = None) -> DefiningEquation:
    """Inverse of normalize_holomorphic: substitute z -> (Id + A(zeta)) z and add conj-holomorphic S terms.

    A must be holomorphic with A(0) = 0; pluriharmonic must be symmetric in zeta-bar only.
    """
    ident = SeriesMatrix.identity(eq.s, eq.space, eq.order)
    M = ident + A
    Mb = M.conjugate()
    H = M.T @ eq.Hfull @ Mb
    S = Mb.T @ eq.Sfull @ Mb
    if pluriharmonic is not None:
        S = S + pluriharmonic
    return DefiningEquation(H, S)


def linear_change(eq: DefiningEquation, V) -> DefiningEquation:
    """Equation in coordinates z' with z = V z'."""
    V = linalg.mat(V)
    Vb = linalg.conj(V)
    return DefiningEquation(linalg.transpose(V) @ eq.Hfull @ Vb, linalg.transpose(Vb) @ eq.Sfull @ Vb)


# closed form with the normalized leading part explicit ----------------------

def _power_sum(N: SeriesMatrix) -> SeriesMatrix:
    """sum_{k >= 1} N^k for N without constant term."""
    if any(x for row in N.constant() for x in row):
        raise NormalFormError("power sum needs a nilpotent-at-0 argument")
    out = SeriesMatrix.zeros(N.rows, N.cols, N.space, N.order)
    term = N
    while not term.is_zero():
        out = out + term
        term = term @ N
    return out


def reconstruct_from_HS(data: ModelData) -> DefiningEquation:
    """H = H0 + 1/2 (H0 C1 + C2 H0), S = H0^T S H0 + H0^T C3 S H0 with C_k the correction sums."""
    sp, d = data.space, data.order
    H = SeriesMatrix.from_constant(data.H0, sp, d)
    HT = H.T
    S = data.Sz
    Sb = S.conjugate()
    C1 = _power_sum(Sb @ HT @ S @ H)
    C2 = _power_sum(H @ Sb @ HT @ S)
    C3 = _power_sum(S @ H @ Sb @ HT)
    lead_S = HT @ S @ H
    Hfull = H + (H @ C1 + C2 @ H) * HALF
    Sfull = lead_S + HT @ C3 @ S @ H
    return DefiningEquation(Hfull, Sfull)


# pivots ---------------------------------------------------------------------

def position_sequence(s: int) -> List[Tuple[int, int]]:
    """Upper-triangular positions sorted by (min, max); 0-based."""
    return sorted(((j, k) for j in range(s) for k in range(j, s)), key=lambda p: (p[0], p[1]))


@dataclass(frozen=True)
class PivotTuple:
    positions: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        order = position_sequence(max((max(p) for p in self.positions), default=0) + 1)
        idx = [order.index((min(p), max(p))) for p in self.positions]
        if idx != sorted(set(idx)):
            raise NormalFormError("pivot positions must be strictly increasing")

    def one_based(self) -> List[List[int]]:
        return [[j + 1, k + 1] for j, k in self.positions]


def _pivot_matrix(mats, positions):
    return [[M[j][k] for M in mats] for j, k in positions]


def pivot_select(base) -> PivotTuple:
    """First tuple (in lexicographic order of the position sequence) with a nonsingular entry map."""
    mats = base.s02()
    r = len(mats)
    s = len(mats[0]) if mats else 0
    seq = position_sequence(s)
    for combo in itertools.combinations(seq, r):
        if linalg.det(_pivot_matrix(mats, combo)):
            return PivotTuple(tuple(combo))
    raise NormalFormError("no pivot tuple: the symbol is not 2-nondegenerate")


def normal_form_reduce(data: ModelData) -> ModelData:
    """Reparametrize zeta so that S(zeta) has entry zeta_a at the a-th pivot."""
    piv = pivot_select(data)
    F = [data.Sz[j, k] for j, k in piv.positions]
    try:
        G = invert_map(F)
    except SeriesError as exc:
        raise NormalFormError(str(exc)) from None
    sub = {("zeta", b): g for b, g in enumerate(G)}
    return ModelData(data.H0, data.Sz.map(lambda x: compose(x, sub)))


# equivalence witnesses --------------------------------------------------------

@dataclass
class EquivalenceWitness:
    U: list
    g: Tuple[TruncatedSeries, ...]

    def __post_init__(self):
        self.U = linalg.mat(self.U)
        self.g = tuple(self.g)
        if linalg.rank(self.U) != len(self.U):
            raise NormalFormError("U must be invertible")
        if not self.g:
            return
        for f in self.g:
            if any(kind != "zeta" for kind, _ in f.variables()):
                raise NormalFormError("g must depend on zeta only")
            if f.constant():
                raise NormalFormError("g must fix the origin")
        if linalg.rank(linear_part_zeta(self.g)) != len(self.g):
            raise NormalFormError("g must have invertible linear part")

    def inverse(self) -> "EquivalenceWitness":
        return EquivalenceWitness(linalg.inverse(self.U), invert_map(self.g))


@dataclass
class EquivalenceReport:
    passed: bool
    failure: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"passed": self.passed}
        if self.failure:
            out["failure"] = self.failure
        return out


def verify_equivalence_witness(m1: ModelData, m2: ModelData, w: EquivalenceWitness) -> EquivalenceReport:
    """Check H2 = U^T H1 conj(U) and S2(zeta) = U^T S1(g(zeta)) U exactly."""
    if (m1.s, m1.r) != (m2.s, m2.r) or len(w.U) != m1.s or len(w.g) != m1.r:
        return EquivalenceReport(False, {"quantity": "dimensions"})
    U = w.U
    H_pred = linalg.mul_all(linalg.transpose(U), m1.H0, linalg.conj(U))
    for i in range(m1.s):
        for j in range(m1.s):
            if H_pred[i][j] != m2.H0[i][j]:
                return EquivalenceReport(False, {"quantity": "H", "entry": [i, j],
                                                 "expected": str(m2.H0[i][j]),
                                                 "got": str(H_pred[i][j])})
    sp = m1.space
    g = [f.embed(sp) if f.space != sp else f for f in w.g]
    sub = {("zeta", b): f for b, f in enumerate(g)}
    S_g = m1.Sz.map(lambda x: compose(x, sub))
    S_pred = linalg.transpose(U) @ S_g @ U
    order = min(S_pred.order, m2.order)
    for i in range(m1.s):
        for j in range(m1.s):
            a, b = S_pred[i, j].truncate(order), m2.Sz[i, j].truncate(order)
            diff = a - b
            if not diff.is_zero():
                e, c = diff.sorted_terms()[0]
                mono = TruncatedSeries(sp, order, {e: 1})
                return EquivalenceReport(False, {"quantity": "S", "entry": [i, j],
                                                 "monomial": repr(mono),
                                                 "expected": str(b.coeff(e)), "got": str(a.coeff(e))})
    return EquivalenceReport(True)
