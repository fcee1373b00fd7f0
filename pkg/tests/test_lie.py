import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crmw import linalg
from crmw.generators import rand_gr, rand_hermitian, rand_invertible, rand_matrix, rand_symmetric
from crmw.lie import (
    CspElement,
    GroupElement00,
    Involution,
    LieError,
    act,
    bracket,
    mat_exp_log,
    project,
    sigma,
)
from crmw.series import SeriesMatrix, TruncatedSeries, VarSpace, gr

GRADES = [(-2, 0), (-1, 1), (-1, -1), (0, 0), (0, 2), (0, -2)]


def rand_elem(rng, s):
    return CspElement(s, rand_gr(rng), rand_matrix(rng, s, s), rand_symmetric(rng, s),
                      rand_symmetric(rng, s), [rand_gr(rng) for _ in range(s)],
                      [rand_gr(rng) for _ in range(s)], rand_gr(rng))


seeds = st.integers(0, 10**6)
sizes = st.integers(1, 3)


@given(seeds, sizes)
def test_alternating(seed, s):
    x = rand_elem(random.Random(seed), s)
    assert bracket(x, x).is_zero()


@settings(max_examples=30, deadline=None)
@given(seeds, sizes)
def test_jacobi(seed, s):
    rng = random.Random(seed)
    x, y, z = (rand_elem(rng, s) for _ in range(3))
    total = bracket(bracket(x, y), z) + bracket(bracket(y, z), x) + bracket(bracket(z, x), y)
    assert total.is_zero()


def test_bracket_L_with_S02():
    Om = linalg.mat([[1, 2], [0, 3]])
    Sig = linalg.mat([[1, 1], [1, 0]])
    got = bracket(CspElement(2, L=Om), CspElement(2, S02=Sig))
    want = linalg.add(linalg.matmul(Om, Sig), linalg.matmul(Sig, linalg.transpose(Om)))
    assert got == CspElement(2, S02=want)


def test_sigma_on_v1():
    inv = Involution([[1]], 1)
    got = sigma(inv, CspElement.from_rationals(1, v1=[1]))
    assert got == CspElement.from_rationals(1, v2=[1])


@settings(max_examples=30, deadline=None)
@given(seeds, sizes)
def test_sigma_involutive_automorphism(seed, s):
    rng = random.Random(seed)
    inv = Involution(rand_hermitian(rng, s), gr("3/5+4/5i"))
    x, y = rand_elem(rng, s), rand_elem(rng, s)
    assert sigma(inv, sigma(inv, x)) == x
    assert sigma(inv, bracket(x, y)) == bracket(sigma(inv, x), sigma(inv, y))


@given(seeds, sizes)
def test_projections(seed, s):
    rng = random.Random(seed)
    x = rand_elem(rng, s)
    total = CspElement(s)
    for g in GRADES:
        total = total + project(x, g)
    assert total == x
    assert project(x, (0, 2)) == CspElement(s, S02=x.S02)
    inv = Involution(rand_hermitian(rng, s))
    assert sigma(inv, project(x, (0, 2))) == project(sigma(inv, x), (0, -2))
    with pytest.raises(LieError):
        project(x, (1, 1))


def test_act_examples():
    inv = Involution([[1]])
    assert act(GroupElement00(1, [[2]]), inv).H == [[4]]
    assert act(GroupElement00(gr("1i"), [[1]]), [[1]], kind="xi") == [[-1]]
    ident = GroupElement00.identity(2)
    H = linalg.mat([[1, gr("1i")], [gr("-1i"), 3]])
    assert act(ident, Involution(H)) == Involution(H)
    assert act(ident, [[1, 2], [3, 4]], kind="omega") == linalg.mat([[1, 2], [3, 4]])


@settings(max_examples=25, deadline=None)
@given(seeds, sizes)
def test_right_action_composition(seed, s):
    rng = random.Random(seed)
    g1 = GroupElement00(rand_gr(rng) or 1, rand_invertible(rng, s))
    g2 = GroupElement00(rand_gr(rng) or 1, rand_invertible(rng, s))
    inv = Involution(rand_hermitian(rng, s), 1)
    assert act(g2, act(g1, inv)) == act(g1 * g2, inv)
    X = rand_matrix(rng, s, s)
    for kind in ("xi", "omega"):
        assert act(g2, act(g1, X, kind=kind), kind=kind) == act(g1 * g2, X, kind=kind)


def _series_elem(space, order, s02):
    z = TruncatedSeries.var(space, ("zeta", 0), order)
    zero = TruncatedSeries.zero(space, order)
    S = [[z * c if c else zero for c in row] for row in s02]
    return CspElement(2, zero, L=[[zero] * 2 for _ in range(2)], S02=S,
                      S0m2=[[zero] * 2 for _ in range(2)], v1=[zero] * 2, v2=[zero] * 2, u=zero)


def test_exp_log_nilpotent():
    sp = VarSpace(2, 1)
    x = _series_elem(sp, 4, [[1, 2], [2, 0]])
    M = x.assemble()
    N = SeriesMatrix([[e if isinstance(e, TruncatedSeries) else TruncatedSeries.const(sp, e, 4) for e in row]
                      for row in M])
    ident = SeriesMatrix.identity(N.rows, sp, 4)
    E = mat_exp_log(x, "exp")
    assert E == ident + N
    assert mat_exp_log(E, "log_unipotent") == N
    zero = _series_elem(sp, 4, [[0, 0], [0, 0]])
    assert mat_exp_log(zero, "exp") == ident


def test_exp_times_exp_minus():
    sp = VarSpace(1, 2)
    rng = random.Random(5)
    z = [TruncatedSeries.var(sp, ("zeta", a), 4) for a in range(2)]
    A = SeriesMatrix([[z[0] * rand_gr(rng) + z[1] * z[0] * rand_gr(rng) for _ in range(3)] for _ in range(3)])
    assert mat_exp_log(A, "exp") @ mat_exp_log(-A, "exp") == SeriesMatrix.identity(3, sp, 4)
    assert mat_exp_log(mat_exp_log(A, "exp"), "log_unipotent") == A


def test_exp_needs_nilpotent_input():
    sp = VarSpace(1, 1)
    with pytest.raises(LieError):
        mat_exp_log(SeriesMatrix.identity(2, sp, 3), "exp")
