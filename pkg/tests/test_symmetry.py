import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crmw import linalg
from crmw.battery import flipped_field, heisenberg_check
from crmw.generators import rand_gr, rand_model_data
from crmw.lie import CspElement, Involution
from crmw.model import ModelData, build_model
from crmw.normalform import forward_transform
from crmw.realize import SymbolInput, realize_S_from_symbol
from crmw.series import GaussianRational, SeriesMatrix, TruncatedSeries, VarSpace, gr
from crmw.symmetry import (
    HoloVectorField,
    SymmetryError,
    WPoly,
    euler_symmetry,
    field_bracket,
    isotropy_symmetry,
    tangency_residual,
    translation_field,
    transversal_symmetry,
    verify_tangency,
)

from conftest import var

E11 = [[1, 0], [0, 0]]
ID2 = [[1, 0], [0, 1]]


def light_cone_eq(order=6):
    sp = VarSpace(1, 1)
    return build_model(ModelData([[1]], SeriesMatrix([[var(sp, "zeta", 0, order)]])))


def test_translation():
    eq = light_cone_eq()
    X = transversal_symmetry(eq, [0], 1)
    assert X == translation_field(1, 1, eq.order)
    assert X.Xw.coeffs[0].constant() == gr("2i")


def test_light_cone_a1():
    # X = 2 z d/dw + (1 - zeta) d/dz
    eq = light_cone_eq()
    sp, d = eq.space, eq.order
    X = transversal_symmetry(eq, [1], 0)
    one = TruncatedSeries.const(sp, 1, d)
    want = HoloVectorField(WPoly.of(var(sp, "z", 0, d) * 2), [WPoly.of(one - var(sp, "zeta", 0, d))],
                           [WPoly(sp)])
    assert X == want
    assert verify_tangency(eq, X).passed


def test_real_b_required():
    with pytest.raises(SymmetryError):
        transversal_symmetry(light_cone_eq(), [1], gr("1i"))


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_transversal_tangency_random(seed, s):
    rng = random.Random(seed)
    eq = build_model(rand_model_data(rng, s, 1, 4))
    a = [rand_gr(rng) for _ in range(s)]
    b = GaussianRational(rng.randint(-3, 3))
    assert verify_tangency(eq, transversal_symmetry(eq, a, b)).passed
    assert verify_tangency(eq, euler_symmetry(s, 1, eq.order)).passed


def test_transversal_general_form_on_nonnormalized():
    eq = light_cone_eq(5)
    sp = eq.space
    zero = TruncatedSeries.zero(sp, 5)
    A = SeriesMatrix([[var(sp, "zeta", 0, 5) * 3]])
    moved = forward_transform(eq, A, SeriesMatrix([[var(sp, "zetabar", 0, 5) * gr("1i") + zero]]))
    X = transversal_symmetry(moved, [gr("1+1i")], 2)
    assert verify_tangency(moved, X).passed


def test_quadric_heisenberg_translation():
    sp = VarSpace(2, 1)
    from crmw.model import DefiningEquation

    eq = DefiningEquation(SeriesMatrix.from_constant([[1, 0], [0, -1]], sp, 4), SeriesMatrix.zeros(2, 2, sp, 4))
    assert verify_tangency(eq, transversal_symmetry(eq, [gr("2-1i"), 3], 0)).passed


def test_negative_control_bidegree():
    # flipped field: Re(-z - zbar + ...) = -z - zbar + ..., first monomial zbar with coefficient -1
    eq = light_cone_eq()
    rep = verify_tangency(eq, flipped_field(transversal_symmetry(eq, [1], 0)))
    assert not rep.passed
    assert rep.bidegree == [0, 1]
    assert rep.coefficient == "-1"
    assert not tangency_residual(eq, flipped_field(transversal_symmetry(eq, [1], 0))).is_zero()


def test_euler_brackets():
    eq = light_cone_eq(5)
    E = euler_symmetry(1, 1, 5)
    X = transversal_symmetry(eq, [gr("1/2+2i")], 0)
    assert field_bracket(E, X) == X.scale(-1)
    Z = translation_field(1, 1, 5)
    assert field_bracket(E, Z) == Z.scale(-2)


def test_bracket_antisymmetric():
    eq = light_cone_eq(5)
    X = transversal_symmetry(eq, [1], 0)
    Y = transversal_symmetry(eq, [gr("1i")], 0)
    assert field_bracket(X, Y) == field_bracket(Y, X).scale(-1)


@pytest.mark.parametrize("H", [[[1]], [[1, 0], [0, -1]], [[2, gr("1+1i")], [gr("1-1i"), 3]]])
def test_heisenberg_closure(H):
    s = len(H)
    rng = random.Random(s)
    data = rand_model_data(rng, s, 1, 4)
    data = ModelData(H, data.Sz)
    rep = heisenberg_check(build_model(data))
    assert rep["errors"] == []
    assert rep["dimension"] == 2 * s + 1


def _symbol(Om):
    return SymbolInput(Involution(ID2), [(E11, Om)])


def test_isotropy_zero():
    inp = _symbol([[1, 0], [0, 0]])
    X = isotropy_symmetry(inp, CspElement(2), 4)
    assert X.is_zero()


@pytest.mark.parametrize("Om,L", [
    ([[1, 0], [0, 0]], [[0, 0], [0, "1i"]]),
    ([[0, 0], [0, 0]], [["1i", 0], [0, "1i"]]),
])
def test_isotropy_tangency(Om, L):
    inp = _symbol(Om)
    eq = build_model(realize_S_from_symbol(inp, 5))
    X = isotropy_symmetry(inp, CspElement.from_rationals(2, L=L), 5)
    assert not X.is_zero()
    assert verify_tangency(eq, X).passed


def test_isotropy_trio():
    inp = SymbolInput(Involution(ID2), [(E11, linalg.zeros(2, 2)), ([[0, 1], [1, 0]], linalg.zeros(2, 2)),
                                        ([[0, 0], [0, 1]], linalg.zeros(2, 2))])
    eq = build_model(realize_S_from_symbol(inp, 5))
    x = CspElement.from_rationals(2, L=[["1i", "2+1i"], ["-2+1i", "3i"]])
    assert verify_tangency(eq, isotropy_symmetry(inp, x, 5)).passed


def test_isotropy_precondition():
    # diag(i, 0) on the diag symbol does not preserve span{e_1}
    inp = _symbol([[1, 0], [0, 0]])
    with pytest.raises(SymmetryError):
        isotropy_symmetry(inp, CspElement.from_rationals(2, L=[["1i", 0], [0, 0]]), 4)
    # i Id brackets e = (Omega, S02) to (0, 2i S02), outside span{e} when Omega != 0
    with pytest.raises(SymmetryError):
        isotropy_symmetry(inp, CspElement.from_rationals(2, L=[["1i", 0], [0, "1i"]]), 4)
    with pytest.raises(SymmetryError):
        isotropy_symmetry(inp, CspElement.from_rationals(2, S02=E11), 4)


def test_field_rejects_antiholomorphic():
    sp = VarSpace(1, 1)
    with pytest.raises(SymmetryError):
        HoloVectorField(WPoly.of(var(sp, "zbar", 0, 3)), [WPoly(sp)], [WPoly(sp)])


def test_wpoly_evaluate():
    sp = VarSpace(1, 1)
    z = var(sp, "z", 0, 4)
    p = WPoly(sp, {2: z})  # z w^2, constant and linear coefficients absent
    W = var(sp, "zeta", 0, 4)
    assert p.evaluate(W) == z * W * W
