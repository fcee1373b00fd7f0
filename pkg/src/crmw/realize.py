"""Realize a realizable modified symbol as a model: S(zeta) = log(exp(X) exp(-pi_00 X))."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import linalg
from .lie import CspElement, Involution, mat_exp, mat_log_unipotent, project
from .model import ModelData, build_model
from .series import SeriesMatrix, TruncatedSeries, VarSpace
from .symbols import (
    BigradedSymbol,
    ModifiedSymbol,
    bigraded_symbol_at_zero,
    check_realizable,
    first_order_constancy,
    in_g00_prime,
)


class RealizationError(ValueError):
    pass


@dataclass
class SymbolInput:
    inv: Involution
    pairs: List[Tuple[list, list]]

    def __post_init__(self):
        self.pairs = [(linalg.mat(S), linalg.mat(O)) for S, O in self.pairs]
        for S, _ in self.pairs:
            if not linalg.is_symmetric(S):
                raise RealizationError("S02 blocks must be symmetric")
        if not linalg.linearly_independent([linalg.flatten(S) for S, _ in self.pairs]):
            raise RealizationError("S02 blocks must be linearly independent")

    @classmethod
    def from_modified_symbol(cls, sym: ModifiedSymbol) -> "SymbolInput":
        return cls(sym.base.inv, list(zip(sym.base.s02(), sym.Omega)))

    @property
    def s(self) -> int:
        return self.inv.s

    @property
    def r(self) -> int:
        return len(self.pairs)

    def modified_symbol(self) -> ModifiedSymbol:
        base = BigradedSymbol.from_s02(self.inv, [S for S, _ in self.pairs])
        return ModifiedSymbol(base, [O for _, O in self.pairs])


def symbol_element(inp: SymbolInput, order: int) -> CspElement:
    """X(zeta) = sum_a zeta_a e_a with e_a carrying L = Omega_a and S02 = S02_a."""
    s, r = inp.s, inp.r
    sp = VarSpace(s, r)
    zeta = [TruncatedSeries.var(sp, ("zeta", a), order) for a in range(r)]
    zero = TruncatedSeries.zero(sp, order)

    def combo(mats):
        out = [[zero] * s for _ in range(s)]
        for a, M in enumerate(mats):
            for i in range(s):
                for j in range(s):
                    if M[i][j]:
                        out[i][j] = out[i][j] + zeta[a] * M[i][j]
        return out

    return CspElement(s, zero, L=combo([O for _, O in inp.pairs]), S02=combo([S for S, _ in inp.pairs]))


def realize_S_from_symbol(inp: SymbolInput, order: int, check: bool = True) -> ModelData:
    if check:
        ok, cert = check_realizable(inp.modified_symbol())
        if not ok:
            raise RealizationError(f"symbol is not realizable: {cert.violation}")
    s = inp.s
    X = symbol_element(inp, order)
    prod = mat_exp(X) @ mat_exp(-project(X, (0, 0)))
    log = mat_log_unipotent(prod)
    n = 2 * s + 2
    ident = SeriesMatrix.identity(n, prod.space, prod.order)
    N = prod - ident
    for i in range(n):
        for j in range(n):
            in_block = 1 <= i <= s and s + 1 <= j <= 2 * s
            if not in_block and not N[i, j].is_zero():
                raise RealizationError(f"exp(X)exp(-pi00 X) - Id has an entry outside the S02 block at {(i, j)}")
            if in_block and N[i, j] != log[i, j]:
                raise RealizationError("logarithm disagrees with the nilpotent block")
    K = SeriesMatrix([[N[1 + i, 1 + s + j] for j in range(s)] for i in range(s)])
    if not K.is_symmetric():
        raise RealizationError("realized S(zeta) is not symmetric")
    return ModelData(inp.inv.H, K)


@dataclass
class RoundtripReport:
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"passed": self.passed, **self.details}


def verify_roundtrip(inp: SymbolInput, order: int) -> RoundtripReport:
    data = realize_S_from_symbol(inp, order)
    eq = build_model(data)
    base = bigraded_symbol_at_zero(eq)
    fmt = lambda M: [[str(x) for x in row] for row in M]
    if not linalg.equal(base.inv.H, inp.inv.H):
        return RoundtripReport(False, {"mismatch": "H", "recovered": fmt(base.inv.H)})
    for a, (S_in, _) in enumerate(inp.pairs):
        if not linalg.equal(base.s02()[a], S_in):
            return RoundtripReport(False, {"mismatch": f"S02[{a}]", "recovered": fmt(base.s02()[a])})
    foc = first_order_constancy(eq)
    if not foc.constant_to_first_order:
        return RoundtripReport(False, {"mismatch": "first-order constancy", "foc": foc.to_json()})
    for a, (_, Om) in enumerate(inp.pairs):
        diff = linalg.sub(foc.B[a], Om)
        if not in_g00_prime(diff, base):
            return RoundtripReport(False, {"mismatch": f"Omega[{a}]", "B": fmt(foc.B[a])})
    return RoundtripReport(True, {"order": order, "B": [fmt(B) for B in foc.B]})
