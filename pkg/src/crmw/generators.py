"""Seeded random instances for the acceptance checks and the test suite."""

from __future__ import annotations

import random
from typing import List, Optional

from . import linalg
from .lie import GroupElement00, Involution
from .model import ModelData
from .realize import SymbolInput
from .series import GaussianRational, SeriesMatrix, TruncatedSeries, VarSpace, gr
from .symbols import BigradedSymbol, ModifiedSymbol, check_realizable, g00_prime


def rand_gr(rng: random.Random, span: int = 3, imag: bool = True) -> GaussianRational:
    re = GaussianRational(rng.randint(-span, span)) / rng.randint(1, 3)
    if not imag:
        return re
    return re + GaussianRational(0, rng.randint(-span, span)) / rng.randint(1, 2)


def rand_matrix(rng, m, n, span=3) -> list:
    return [[rand_gr(rng, span) for _ in range(n)] for _ in range(m)]


def rand_invertible(rng, s) -> list:
    while True:
        M = rand_matrix(rng, s, s)
        if linalg.det(M):
            return M


def rand_hermitian(rng, s) -> list:
    while True:
        H = [[None] * s for _ in range(s)]
        for i in range(s):
            H[i][i] = GaussianRational(rng.choice([-2, -1, 1, 1, 2, 3]))
            for j in range(i + 1, s):
                H[i][j] = rand_gr(rng, 2)
                H[j][i] = H[i][j].conjugate()
        if linalg.det(H):
            return H


def rand_symmetric(rng, s, span=3) -> list:
    S = [[None] * s for _ in range(s)]
    for i in range(s):
        for j in range(i, s):
            S[i][j] = S[j][i] = rand_gr(rng, span)
    return S


def rand_independent_symmetric(rng, s, r) -> List[list]:
    if r > s * (s + 1) // 2:
        raise ValueError("too many independent symmetric matrices requested")
    while True:
        mats = [rand_symmetric(rng, s) for _ in range(r)]
        if linalg.linearly_independent([linalg.flatten(M) for M in mats]):
            return mats


def rand_zeta_series(rng, space: VarSpace, order: int, nterms: int = 3, max_deg: int = 3,
                     min_deg: int = 1) -> TruncatedSeries:
    terms = {}
    for _ in range(nterms):
        e = [0] * space.nvars
        for _ in range(rng.randint(min_deg, max_deg)):
            e[space.index(("zeta", rng.randrange(space.r)))] += 1
        terms[tuple(e)] = rand_gr(rng)
    return TruncatedSeries(space, order, terms)


def rand_model_data(rng, s: int, r: int, order: int, nondegenerate: bool = True) -> ModelData:
    """Random (H0, S): linear part from independent symmetric matrices, then random higher terms."""
    sp = VarSpace(s, r)
    H0 = rand_hermitian(rng, s)
    lin = rand_independent_symmetric(rng, s, r) if nondegenerate else [rand_symmetric(rng, s) for _ in range(r)]
    zeta = [TruncatedSeries.var(sp, ("zeta", a), order) for a in range(r)]
    S = [[None] * s for _ in range(s)]
    for i in range(s):
        for j in range(i, s):
            acc = rand_zeta_series(rng, sp, order, nterms=2, max_deg=3, min_deg=2)
            for a in range(r):
                acc = acc + zeta[a] * lin[a][i][j]
            S[i][j] = S[j][i] = acc
    return ModelData(H0, SeriesMatrix(S))


def rand_realizable_symbol(rng, s: int, r: int, tries: int = 50) -> Optional[SymbolInput]:
    """Random H, independent S02 blocks and Omega drawn from g'_00 plus random multiples of Id."""
    for _ in range(tries):
        H = rand_hermitian(rng, s)
        inv = Involution(H)
        S02 = rand_independent_symmetric(rng, s, r)
        base = BigradedSymbol.from_s02(inv, S02)
        basis = g00_prime(base)
        Om = []
        for _ in range(r):
            M = linalg.zeros(s, s)
            for B in basis:
                M = linalg.add(M, linalg.scale(B, rand_gr(rng, 2)))
            Om.append(M)
        inp = SymbolInput(inv, list(zip(S02, Om)))
        if check_realizable(inp.modified_symbol())[0]:
            return inp
    return None


def rand_group_element(rng, s: int) -> GroupElement00:
    b = rand_gr(rng)
    while not b:
        b = rand_gr(rng)
    return GroupElement00(b, rand_invertible(rng, s))
