"""Symbols at the origin: bigraded symbol, frame Omega, first-order constancy, g'_00, realizability.

Throughout, S02_a = e^{-ih} Xi_a H^{-1} is the (0,2) block attached to Xi_a and
T_a = H conj(S02_a) H^T is its image under the involution.  Brackets of an
L-block with symmetric blocks follow the csp convention:

    [L, S02]  = L S + S L^T
    [L, S0m2] = -(L^T T + T L)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from . import linalg
from .lie import GroupElement00, Involution, act
from .model import DefiningEquation
from .series import ONE, ZERO, GaussianRational, SeriesMatrix


def _bracket02(L, S):
    return linalg.add(linalg.matmul(L, S), linalg.matmul(S, linalg.transpose(L)))


def _bracket0m2(L, T):
    # sign dropped: only span membership is ever tested
    return linalg.add(linalg.matmul(linalg.transpose(L), T), linalg.matmul(T, L))


@dataclass
class BigradedSymbol:
    inv: Involution
    Xi: List[list]

    def __post_init__(self):
        self.Xi = [linalg.mat(X) for X in self.Xi]
        Hinv = linalg.inverse(self.inv.H)
        for X in self.Xi:
            if not linalg.is_symmetric(linalg.matmul(X, Hinv)):
                raise ValueError("Xi H^{-1} must be symmetric")

    @classmethod
    def from_s02(cls, inv: Involution, S02s) -> "BigradedSymbol":
        return cls(inv, [linalg.scale(linalg.matmul(linalg.mat(S), inv.H), inv.eih) for S in S02s])

    @property
    def s(self) -> int:
        return self.inv.s

    @property
    def r(self) -> int:
        return len(self.Xi)

    def s02(self) -> List[list]:
        Hinv = linalg.inverse(self.inv.H)
        e = self.inv.eih.inverse()
        return [linalg.scale(linalg.matmul(X, Hinv), e) for X in self.Xi]

    def t_mats(self) -> List[list]:
        H = self.inv.H
        HT = linalg.transpose(H)
        return [linalg.mul_all(H, linalg.conj(S), HT) for S in self.s02()]

    def is_two_nondegenerate(self) -> bool:
        return self.r > 0 and linalg.linearly_independent([linalg.flatten(X) for X in self.Xi])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BigradedSymbol):
            return NotImplemented
        return (self.inv == other.inv and len(self.Xi) == len(other.Xi)
                and all(linalg.equal(a, b) for a, b in zip(self.Xi, other.Xi)))

    __hash__ = None


def bigraded_symbol_at_zero(eq: DefiningEquation) -> BigradedSymbol:
    H = eq.Hfull.constant()
    HTinv = linalg.inverse(linalg.transpose(H))
    Xi = [linalg.matmul(HTinv, eq.Sfull.differentiate(("zeta", a)).constant()) for a in range(eq.r)]
    return BigradedSymbol(Involution(H, ONE), Xi)


def frame_omega(eq: DefiningEquation) -> List[SeriesMatrix]:
    HinvT = eq.Hfull.inverse().T
    return [HinvT @ eq.Hfull.differentiate(("zeta", b)).T for b in range(eq.r)]


# g'_00 ----------------------------------------------------------------------

def _matrix_units(s):
    return [linalg.unit(s, k, l) for k in range(s) for l in range(s)]


def g00_prime(base: BigradedSymbol) -> List[list]:
    """Basis of {B : [B, T_a] in span T, [B, S02_a] in span S02 for all a}."""
    s, r = base.s, base.r
    S = base.s02()
    T = base.t_mats()
    units = _matrix_units(s)
    n_b = s * s
    n = n_b + 2 * r * r
    rows = []
    # equations: for each alpha, entries (i, j) of both conditions
    for alpha in range(r):
        for cond, mats, br in ((0, T, _bracket0m2), (1, S, _bracket02)):
            images = [br(E, mats[alpha]) for E in units]
            for i in range(s):
                for j in range(s):
                    row = [ZERO] * n
                    for k in range(n_b):
                        row[k] = images[k][i][j]
                    off = n_b + cond * r * r + alpha * r
                    for gamma in range(r):
                        row[off + gamma] = -mats[gamma][i][j]
                    rows.append(row)
    if not rows:
        return units
    null = linalg.nullspace(rows)
    projected = [v[:n_b] for v in null]
    basis = linalg.row_basis([v for v in projected if any(v)])
    return [linalg.unflatten(v, s, s) for v in basis]


def in_g00_prime(B, base: BigradedSymbol) -> bool:
    S = base.s02()
    T = base.t_mats()
    flatS = [linalg.flatten(m) for m in S]
    flatT = [linalg.flatten(m) for m in T]
    return all(linalg.in_span(flatT, linalg.flatten(_bracket0m2(B, T[a])))
               and linalg.in_span(flatS, linalg.flatten(_bracket02(B, S[a])))
               for a in range(base.r))


# modified symbols -----------------------------------------------------------

@dataclass
class ModifiedSymbol:
    base: BigradedSymbol
    Omega: List[list]
    g00prime: Optional[List[list]] = None

    def __post_init__(self):
        self.Omega = [linalg.mat(O) for O in self.Omega]
        if len(self.Omega) != self.base.r:
            raise ValueError("need one Omega per Xi")
        if self.g00prime is None:
            self.g00prime = g00_prime(self.base)
        else:
            self.g00prime = [linalg.mat(B) for B in self.g00prime]

    @property
    def s(self) -> int:
        return self.base.s

    @property
    def r(self) -> int:
        return self.base.r

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModifiedSymbol):
            return NotImplemented
        return self.base == other.base and all(
            linalg.equal(a, b) for a, b in zip(self.Omega, other.Omega))

    __hash__ = None


@dataclass
class RealizabilityCertificate:
    realizable: bool
    coefficients: dict = field(default_factory=dict)
    violation: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "realizable": self.realizable,
            "coefficients": {f"{k[0]},{k[1]},{k[2]}": [str(c) for c in v]
                             for k, v in sorted(self.coefficients.items())},
            "violation": self.violation,
        }


def check_realizable(sym: ModifiedSymbol):
    """Both span conditions for every (alpha, beta); returns (verdict, certificate)."""
    base = sym.base
    H = base.inv.H
    HXb = [linalg.matmul(H, linalg.conj(X)) for X in base.Xi]
    S = base.s02()
    flatHX = [linalg.flatten(m) for m in HXb]
    flatS = [linalg.flatten(m) for m in S]
    Om = sym.Omega
    cert = RealizabilityCertificate(True)
    for alpha in range(sym.r):
        for beta in range(sym.r):
            first = linalg.add(linalg.matmul(linalg.transpose(Om[beta]), HXb[alpha]),
                               linalg.matmul(HXb[alpha], Om[beta]))
            c1 = linalg.span_coefficients(flatHX, linalg.flatten(first))
            if c1 is None:
                cert.realizable = False
                cert.violation = {"condition": 1, "alpha": alpha, "beta": beta,
                                  "matrix": [[str(x) for x in row] for row in first]}
                return False, cert
            second = linalg.sub(_bracket02(Om[alpha], S[beta]), _bracket02(Om[beta], S[alpha]))
            c2 = linalg.span_coefficients(flatS, linalg.flatten(second))
            if c2 is None:
                cert.realizable = False
                cert.violation = {"condition": 2, "alpha": alpha, "beta": beta,
                                  "matrix": [[str(x) for x in row] for row in second]}
                return False, cert
            cert.coefficients[(1, alpha, beta)] = c1
            cert.coefficients[(2, alpha, beta)] = c2
    return True, cert


def act_on_modified_symbol(g: GroupElement00, sym: ModifiedSymbol) -> ModifiedSymbol:
    inv = act(g, sym.base.inv)
    Xi = [act(g, X, kind="xi") for X in sym.base.Xi]
    Om = [act(g, O, kind="omega") for O in sym.Omega]
    return ModifiedSymbol(BigradedSymbol(inv, Xi), Om)


# first-order constancy -----------------------------------------------------

@dataclass
class FocReport:
    constant_to_first_order: bool
    B: List[list]
    obstructions: Optional[dict] = None
    symbol: Optional[ModifiedSymbol] = None
    frame_omega0: Optional[List[list]] = None

    def to_json(self) -> dict:
        fmt = lambda M: [[str(x) for x in row] for row in M]
        return {
            "constant_to_first_order": self.constant_to_first_order,
            "B": [fmt(M) for M in self.B],
            "obstructions": None if self.obstructions is None else {
                key: [[fmt(M) for M in row] for row in blocks]
                for key, blocks in sorted(self.obstructions.items())},
        }


class _FocSystem:
    """Linear system in (lambda, mu, B) for the two normalization conditions at 0."""

    def __init__(self, base: BigradedSymbol, omega0: List[list], D: List[List[list]]):
        self.base = base
        s, r = base.s, base.r
        self.s, self.r = s, r
        S = base.s02()
        T = base.t_mats()
        units = _matrix_units(s)
        nl = r * r * r
        self.n_span = 2 * nl
        self.n = 2 * nl + r * s * s
        rows, rhs_c, rhs_d = [], [], []
        self.d_rows = []
        # condition (c): [B_a, T_b] - sum lambda T_g = -[Omega0_a, T_b]
        for a in range(r):
            for b in range(r):
                br_units = [_bracket0m2(E, T[b]) for E in units]
                base_term = _bracket0m2(omega0[a], T[b])
                for i in range(s):
                    for j in range(s):
                        row = [ZERO] * self.n
                        for g in range(r):
                            row[(a * r + b) * r + g] = -T[g][i][j]
                        for k in range(s * s):
                            row[2 * nl + a * s * s + k] = br_units[k][i][j]
                        rows.append(row)
                        rhs_c.append(-base_term[i][j])
        n_c = len(rows)
        # condition (d): [B_a, S_b] + sum mu S_g = D_ab - [Omega0_a, S_b]
        for a in range(r):
            for b in range(r):
                br_units = [_bracket02(E, S[b]) for E in units]
                base_term = _bracket02(omega0[a], S[b])
                for i in range(s):
                    for j in range(s):
                        row = [ZERO] * self.n
                        for g in range(r):
                            row[nl + (a * r + b) * r + g] = S[g][i][j]
                        for k in range(s * s):
                            row[2 * nl + a * s * s + k] = br_units[k][i][j]
                        rows.append(row)
                        rhs_d.append(D[a][b][i][j] - base_term[i][j])
        self.rows = rows
        self.n_c = n_c
        self.rhs = rhs_c + rhs_d

    def solve(self, rhs=None):
        return linalg.solve(self.rows, self.rhs if rhs is None else rhs)

    def unpack_B(self, x) -> List[list]:
        s, r = self.s, self.r
        off = self.n_span
        return [linalg.unflatten(x[off + a * s * s: off + (a + 1) * s * s], s, s) for a in range(r)]

    def reduce_rhs(self):
        """Canonical residual of the right-hand side modulo the column space.

        Entries of condition (c) come first, so the (c) part of the residual is
        nonzero only when (c) alone is infeasible; the (d) part is then reduced
        modulo what (c)-admissible B together with the spans can reach.
        """
        columns = linalg.transpose(self.rows)
        return linalg.reduce_mod(columns, self.rhs)

    def blocks(self, flat, start):
        s, r = self.s, self.r
        out = []
        for a in range(r):
            row = []
            for b in range(r):
                off = start + (a * r + b) * s * s
                row.append(linalg.unflatten(flat[off:off + s * s], s, s))
            out.append(row)
        return out


def first_order_constancy(eq: DefiningEquation) -> FocReport:
    base = bigraded_symbol_at_zero(eq)
    s, r = base.s, base.r
    H = base.inv.H
    HTinv = linalg.inverse(linalg.transpose(H))
    Hinv = linalg.inverse(H)
    omega0 = [O.constant() for O in frame_omega(eq)]
    D = []
    for a in range(r):
        Sa = eq.Sfull.differentiate(("zeta", a))
        D.append([linalg.mul_all(HTinv, Sa.differentiate(("zeta", b)).constant(), Hinv) for b in range(r)])
    if r == 0:
        return FocReport(True, [], None, ModifiedSymbol(base, []), [])
    system = _FocSystem(base, omega0, D)
    x = system.solve()
    if x is not None:
        B = system.unpack_B(x)
        Omega = [linalg.add(o, b) for o, b in zip(omega0, B)]
        return FocReport(True, B, None, ModifiedSymbol(base, Omega), omega0)
    resid = system.reduce_rhs()
    x = system.solve([t - o for t, o in zip(system.rhs, resid)])
    B = system.unpack_B(x)
    obstructions = {"O0m2": system.blocks(resid, 0), "O02": system.blocks(resid, system.n_c)}
    Omega = [linalg.add(o, b) for o, b in zip(omega0, B)]
    return FocReport(False, B, obstructions, ModifiedSymbol(base, Omega), omega0)


def foc_residuals(eq: DefiningEquation, B: List[list]):
    """Exact residuals of both conditions after substituting B (zero when feasible)."""
    base = bigraded_symbol_at_zero(eq)
    S = base.s02()
    T = base.t_mats()
    omega0 = [O.constant() for O in frame_omega(eq)]
    H = base.inv.H
    HTinv = linalg.inverse(linalg.transpose(H))
    Hinv = linalg.inverse(H)
    flatS = [linalg.flatten(m) for m in S]
    flatT = [linalg.flatten(m) for m in T]
    out = []
    for a in range(base.r):
        C = linalg.add(omega0[a], B[a])
        Sa = eq.Sfull.differentiate(("zeta", a))
        for b in range(base.r):
            c_term = linalg.flatten(_bracket0m2(C, T[b]))
            D = linalg.mul_all(HTinv, Sa.differentiate(("zeta", b)).constant(), Hinv)
            d_term = linalg.flatten(linalg.sub(D, _bracket02(C, S[b])))
            out.append((linalg.reduce_mod(flatT, c_term), linalg.reduce_mod(flatS, d_term)))
    return out
