import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crmw import linalg
from crmw.generators import rand_model_data
from crmw.model import (
    DefiningEquation,
    DefiningSeries,
    ModelData,
    ModelError,
    build_model,
    extract_weighted_model,
    leaf_data,
    levi_form_series,
    pde_propagate_oracle,
    pseudoconvex_equation,
    verify_rank_condition,
)
from crmw.series import WEIGHTED, SeriesMatrix, TruncatedSeries, VarSpace, gr

from conftest import series, var


def light_cone(order):
    sp = VarSpace(1, 1)
    return ModelData([[1]], SeriesMatrix([[var(sp, "zeta", 0, order)]]))


def geometric(order):
    """H = sum (zeta zetabar)^k and S = zeta sum (zeta zetabar)^k, written out term by term."""
    sp = VarSpace(1, 1)
    H = series(sp, order, {(0, 0, k, k): 1 for k in range(order + 1)})
    S = series(sp, order, {(0, 0, k + 1, k): 1 for k in range(order + 1)})
    return SeriesMatrix([[H]]), SeriesMatrix([[S]])


def test_light_cone_geometric_series():
    eq = build_model(light_cone(8))
    H, S = geometric(8)
    assert eq.Hfull == H and eq.Sfull == S


def test_zero_S_gives_quadric():
    sp = VarSpace(2, 1)
    H0 = [[1, gr("1i")], [gr("-1i"), -1]]
    data = ModelData(H0, SeriesMatrix.zeros(2, 2, sp, 5))
    eq = build_model(data)
    assert eq.Hfull == SeriesMatrix.from_constant(H0, sp, 5)
    assert eq.Sfull.is_zero()
    assert verify_rank_condition(eq).passed
    assert pde_propagate_oracle(data) == eq


def test_model_data_validation():
    sp = VarSpace(1, 1)
    z = var(sp, "zeta", 0, 3)
    with pytest.raises(ModelError):
        ModelData([[0]], SeriesMatrix([[z]]))
    with pytest.raises(ModelError):
        ModelData([[1]], SeriesMatrix([[z + TruncatedSeries.const(sp, 1, 3)]]))
    with pytest.raises(ModelError):
        ModelData([[1]], SeriesMatrix([[var(sp, "zetabar", 0, 3)]]))
    with pytest.raises(ModelError):
        ModelData([[gr("1i")]], SeriesMatrix([[z]]))


def test_rank_condition_light_cone_order8():
    rep = verify_rank_condition(build_model(light_cone(8)))
    assert rep.passed and rep.order == 6


def test_rank_condition_hand_broken():
    # H = 1 + zeta + zetabar, S = zeta.  First equation, alpha = beta = 1, constant term:
    # LHS H_{zeta zetabar} = 0, RHS H_zeta H^{-1} H_zetabar + conj(S_zeta) H^{-T} S_zeta = 1 + 1 = 2.
    sp = VarSpace(1, 1)
    one = TruncatedSeries.const(sp, 1, 3)
    z, zb = var(sp, "zeta", 0, 3), var(sp, "zetabar", 0, 3)
    eq = DefiningEquation(SeriesMatrix([[one + z + zb]]), SeriesMatrix([[z]]))
    rep = verify_rank_condition(eq)
    assert not rep.passed
    f = rep.failure
    assert (f["equation"], f["alpha"], f["beta"], f["monomial"]) == (1, 0, 0, [0, 0, 0, 0])
    assert (f["lhs"], f["rhs"]) == ("0", "2")


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_built_models_pass_rank_condition(seed, s):
    data = rand_model_data(random.Random(seed), s, 1, 5)
    assert verify_rank_condition(build_model(data)).passed


def test_oracle_light_cone_order8():
    data = light_cone(8)
    assert pde_propagate_oracle(data) == build_model(data)


@pytest.mark.parametrize("seed", range(3))
def test_oracle_random_s2_r2(seed):
    data = rand_model_data(random.Random(100 + seed), 2, 2, 5)
    assert pde_propagate_oracle(data) == build_model(data)


@pytest.mark.parametrize("seed", range(3))
def test_pseudoconvex_specialization(seed):
    rng = random.Random(200 + seed)
    data = rand_model_data(rng, 2, 2, 5)
    data = ModelData(linalg.eye(2), data.Sz)
    assert build_model(data) == pseudoconvex_equation(data.Sz)


def test_levi_form_light_cone():
    eq = build_model(light_cone(6))
    levi = levi_form_series(eq)
    assert levi.schur.is_zero()
    A, B, C, D = levi.blocks(1)
    assert A.constant() == [[1]]


def test_levi_form_quadric():
    sp = VarSpace(2, 1)
    eq = DefiningEquation(SeriesMatrix.from_constant([[1, 0], [0, -1]], sp, 4), SeriesMatrix.zeros(2, 2, sp, 4))
    A, B, C, D = levi_form_series(eq).blocks(2)
    assert B.is_zero() and C.is_zero()
    assert A.constant() == [[1, 0], [0, -1]]


def _weighted_example(order_w=6):
    """P = z zbar + Re(zeta zbar^2) and Q = z^2 zbar zetabar t, in (z, zbar, zeta, zetabar, t)."""
    sp = VarSpace(1, 1, True)
    half = gr("1/2")
    P = {(1, 1, 0, 0, 0): 1, (0, 2, 1, 0, 0): half, (2, 0, 0, 1, 0): half}
    Q = {(2, 1, 0, 1, 1): 1}
    F = TruncatedSeries(sp, order_w, {**P, **Q}, WEIGHTED)
    return sp, F


def test_extract_weighted_model_example():
    sp, F = _weighted_example()
    full = DefiningSeries.split(F, 2)
    eq = extract_weighted_model(full)
    sp2 = VarSpace(1, 1)
    assert eq.Hfull == SeriesMatrix.from_constant([[1]], sp2, 2)
    assert eq.Sfull == SeriesMatrix([[var(sp2, "zeta", 0, 2)]])
    assert leaf_data(F, 2) == eq


def test_extract_rejects_non_model_terms():
    sp = VarSpace(1, 1, True)
    P = TruncatedSeries(sp, 4, {(1, 1, 0, 0, 0): 1, (1, 0, 1, 1, 0): 1, (0, 1, 1, 1, 0): 1})
    with pytest.raises(ModelError):
        extract_weighted_model(DefiningSeries(P))


def test_extract_roundtrip_without_Q():
    from crmw.model import model_P_weighted

    eq = build_model(light_cone(4))
    F = model_P_weighted(eq, 2)
    assert extract_weighted_model(DefiningSeries.split(F, 4)) == eq
