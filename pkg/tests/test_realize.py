import random
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crmw import linalg
from crmw.generators import rand_hermitian, rand_independent_symmetric, rand_realizable_symbol
from crmw.lie import Involution
from crmw.realize import RealizationError, SymbolInput, realize_S_from_symbol, verify_roundtrip
from crmw.series import GaussianRational, SeriesMatrix, TruncatedSeries, VarSpace

from conftest import series, var

E11 = [[1, 0], [0, 0]]
ID2 = [[1, 0], [0, 1]]


def test_zero_omega_is_linear():
    rng = random.Random(1)
    for s, r in ((1, 1), (2, 2), (3, 3)):
        inv = Involution(rand_hermitian(rng, s))
        S02 = rand_independent_symmetric(rng, s, r)
        data = realize_S_from_symbol(SymbolInput(inv, [(S, linalg.zeros(s, s)) for S in S02]), 5)
        sp = data.space
        want = SeriesMatrix.zeros(s, s, sp, 5)
        for a, S in enumerate(S02):
            want = want + SeriesMatrix([[var(sp, "zeta", a, 5) * x for x in row] for row in S])
        assert data.Sz == want


def test_diag_example_closed_form():
    # The relevant 2x2 block of X is zeta [[1, 1], [0, -1]]; exp(X) exp(-pi00 X) has
    # off-diagonal entry sinh(zeta) e^zeta = (e^{2 zeta} - 1) / 2.
    order = 6
    data = realize_S_from_symbol(SymbolInput(Involution(ID2), [(E11, [[1, 0], [0, 0]])]), order)
    sp = data.space
    coeffs = {(0, 0, 0, 0, k, 0): GaussianRational(2 ** k) / (2 * factorial(k)) for k in range(1, order + 1)}
    f = TruncatedSeries(sp, order, coeffs)
    zero = TruncatedSeries.zero(sp, order)
    assert data.Sz == SeriesMatrix([[f, zero], [zero, zero]])
    assert f.coeff((0, 0, 0, 0, 3, 0)) == GaussianRational(2) / 3


def test_non_realizable_rejected():
    with pytest.raises(RealizationError):
        realize_S_from_symbol(SymbolInput(Involution(ID2), [(E11, [[0, 1], [0, 0]])]), 4)


def test_symbol_input_validation():
    with pytest.raises(RealizationError):
        SymbolInput(Involution(ID2), [([[0, 1], [0, 0]], ID2)])
    with pytest.raises(RealizationError):
        SymbolInput(Involution(ID2), [(E11, ID2), ([[2, 0], [0, 0]], ID2)])


def test_roundtrip_examples():
    assert verify_roundtrip(SymbolInput(Involution(ID2), [(E11, [[1, 0], [0, 0]])]), 5).passed
    assert verify_roundtrip(SymbolInput(Involution(ID2), [(E11, linalg.zeros(2, 2))]), 5).passed


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10**6))
def test_roundtrip_random_s2_r2(seed):
    inp = rand_realizable_symbol(random.Random(seed), 2, 2)
    if inp is not None:
        assert verify_roundtrip(inp, 5).passed


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 3))
def test_second_order_expansion(seed, s):
    inp = rand_realizable_symbol(random.Random(seed), s, 1)
    if inp is None:
        return
    data = realize_S_from_symbol(inp, 3)
    (S, Om), = inp.pairs
    assert data.s02() == [S]
    quad = data.Sz.differentiate(("zeta", 0)).differentiate(("zeta", 0)).constant()
    # quadratic term 1/2 [Om, S] zeta^2, so the second derivative is [Om, S]
    bracket = linalg.add(linalg.matmul(Om, S), linalg.matmul(S, linalg.transpose(Om)))
    assert quad == bracket
