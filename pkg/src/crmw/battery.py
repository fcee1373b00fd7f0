"""Acceptance checks shared by the ``battery`` subcommand and the test suite.

Each check takes the loaded fixtures and returns a CriterionResult.  All
randomness is seeded, so reports are reproducible byte for byte.
"""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Dict, List, Optional

from . import io, linalg
from .generators import (
    rand_gr,
    rand_group_element,
    rand_invertible,
    rand_model_data,
    rand_realizable_symbol,
    rand_zeta_series,
)
from .lie import CspElement, GroupElement00, act
from .model import (
    DefiningSeries,
    ModelData,
    build_model,
    extract_weighted_model,
    leaf_data,
    model_P_weighted,
    pde_propagate_oracle,
    pseudoconvex_equation,
    verify_rank_condition,
)
from .normalform import (
    EquivalenceWitness,
    linear_change,
    normal_form_reduce,
    pivot_select,
    reconstruct_from_HS,
    verify_equivalence_witness,
)
from .realize import SymbolInput, realize_S_from_symbol, verify_roundtrip
from .series import I, ONE, ZERO, GaussianRational, SeriesMatrix, TruncatedSeries, VarSpace, WEIGHTED
from .symbols import (
    act_on_modified_symbol,
    bigraded_symbol_at_zero,
    check_realizable,
    first_order_constancy,
    in_g00_prime,
)
from .symmetry import (
    HoloVectorField,
    WPoly,
    euler_symmetry,
    field_bracket,
    isotropy_symmetry,
    translation_field,
    transversal_symmetry,
    verify_tangency,
)


class FixtureError(ValueError):
    """A fixture exists but cannot be decoded."""


class MissingFixture(KeyError):
    pass


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "details": self.details}


# fixtures -------------------------------------------------------------------

MODEL_FIXTURES = ["light_cone", "pseudoconvex_s2", "indefinite_s2", "mixed_s3"]
SYMBOL_FIXTURES = ["symbol_diag", "symbol_zero", "symbol_trio"]


def shipped_fixture_names() -> List[str]:
    pkg = resources.files("crmw") / "fixtures"
    return sorted(p.name[:-5] for p in pkg.iterdir() if p.name.endswith(".json"))


def shipped_fixture_path(name: str):
    return resources.files("crmw") / "fixtures" / f"{name}.json"


def decode_fixture(name: str, obj):
    """Typed object from a fixture's JSON."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FixtureError(f"fixture {name}: missing 'kind'")
    kind = obj["kind"]
    try:
        if kind == "model":
            return io.model_data_from_json(obj)
        if kind == "equation":
            return io.equation_from_json(obj)
        if kind == "symbol":
            return SymbolInput.from_modified_symbol(io.modified_symbol_from_json(obj))
        if kind == "witness":
            return io.witness_from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise FixtureError(f"fixture {name}: {exc}") from None
    raise FixtureError(f"fixture {name}: unknown kind {kind!r}")


def load_shipped_fixtures(names: Optional[List[str]] = None) -> Dict[str, object]:
    out = {}
    for name in names or shipped_fixture_names():
        path = shipped_fixture_path(name)
        if not path.is_file():
            raise MissingFixture(name)
        out[name] = decode_fixture(name, json.loads(path.read_text()))
    return out


def _get(fx, name):
    if name not in fx:
        raise MissingFixture(name)
    return fx[name]


# criteria --------------------------------------------------------------------

def _fmt(M):
    return [[str(x) for x in row] for row in M]


def criterion_1(fx, seed: int = 1, count: int = 20) -> CriterionResult:
    rng = random.Random(seed)
    bad = []
    shapes = []
    for k in range(count):
        s = 1 + k % 3
        r = 1 + (k // 3) % min(3, s * (s + 1) // 2)
        data = rand_model_data(rng, s, r, 5)
        shapes.append([s, r])
        eq = build_model(data)
        if pde_propagate_oracle(data) != eq or reconstruct_from_HS(data) != eq:
            bad.append(k)
    return CriterionResult(1, "closed form equals the PDE oracle", not bad,
                           {"instances": count, "shapes": shapes, "mismatches": bad})


def criterion_2(fx, seed: int = 2, count: int = 6) -> CriterionResult:
    rng = random.Random(seed)
    checked, bad = [], []
    datas = [(name, _get(fx, name)) for name in MODEL_FIXTURES]
    for k in range(count):
        s = 1 + k % 3
        datas.append((f"random{k}", rand_model_data(rng, s, 1 + k % 2 if s > 1 else 1, 8 if s == 1 else 5)))
    for name, data in datas:
        rep = verify_rank_condition(build_model(data))
        checked.append([name, rep.order])
        if not rep.passed:
            bad.append(name)
    broken = verify_rank_condition(_get(fx, "hand_broken"))
    ok = not bad and not broken.passed and broken.failure is not None
    return CriterionResult(2, "built models solve the rank PDE; the hand-broken input fails", ok,
                           {"checked": checked, "failures": bad, "hand_broken": broken.to_json()})


def _geometric_light_cone(order):
    sp = VarSpace(1, 1)
    H, S = {}, {}
    for k in range(order + 1):
        if 2 * k <= order:
            H[(0, 0, k, k)] = 1
        if 2 * k + 1 <= order:
            S[(0, 0, k + 1, k)] = 1
    return (SeriesMatrix([[TruncatedSeries(sp, order, H)]]), SeriesMatrix([[TruncatedSeries(sp, order, S)]]))


def criterion_3(fx, seed: int = 3, count: int = 5) -> CriterionResult:
    rng = random.Random(seed)
    bad = []
    for k in range(count):
        s = 1 + k % 3
        data = rand_model_data(rng, s, 1, 5)
        data = ModelData(linalg.eye(s), data.Sz)
        if build_model(data) != pseudoconvex_equation(data.Sz):
            bad.append(k)
    sp = VarSpace(1, 1)
    z = TruncatedSeries.var(sp, ("zeta", 0), 8)
    eq = build_model(ModelData([[1]], SeriesMatrix([[z]])))
    H, S = _geometric_light_cone(8)
    geo = eq.Hfull == H and eq.Sfull == S
    return CriterionResult(3, "pseudoconvex form and the light-cone geometric series", not bad and geo,
                           {"random_mismatches": bad, "light_cone_order8": geo})


def _bracket02(L, S):
    return linalg.add(linalg.matmul(L, S), linalg.matmul(S, linalg.transpose(L)))


def criterion_4(fx, seed: int = 4, count: int = 20) -> CriterionResult:
    rng = random.Random(seed)
    bad, shapes = [], []
    made = 0
    attempts = 0
    while made < count and attempts < 10 * count:
        attempts += 1
        s = 2 + attempts % 2
        r = 1 + attempts % 2
        inp = rand_realizable_symbol(rng, s, r)
        if inp is None:
            continue
        made += 1
        shapes.append([s, r])
        data = realize_S_from_symbol(inp, 4)
        S = [p[0] for p in inp.pairs]
        Om = [p[1] for p in inp.pairs]
        for b in range(r):
            if not linalg.equal(data.Sz.differentiate(("zeta", b)).constant(), S[b]):
                bad.append([made - 1, "linear", b])
            for a in range(r):
                second = data.Sz.differentiate(("zeta", a)).differentiate(("zeta", b)).constant()
                want = linalg.scale(linalg.add(_bracket02(Om[a], S[b]), _bracket02(Om[b], S[a])),
                                   GaussianRational(1) / 2)
                if not linalg.equal(second, want):
                    bad.append([made - 1, "quadratic", a, b])
    ok = made >= count and not bad
    return CriterionResult(4, "realized S matches the second-order expansion", ok,
                           {"instances": made, "shapes": shapes, "mismatches": bad})


def criterion_5(fx, seed: int = 5, count: int = 2) -> CriterionResult:
    rng = random.Random(seed)
    results = {}
    for name in SYMBOL_FIXTURES:
        results[name] = verify_roundtrip(_get(fx, name), 5).passed
    for k in range(count):
        inp = rand_realizable_symbol(rng, 2, 2)
        results[f"random_s2_r2_{k}"] = inp is not None and verify_roundtrip(inp, 5).passed
    return CriterionResult(5, "symbol -> model -> symbol round trip", all(results.values()), results)


def criterion_6(fx) -> CriterionResult:
    diag, _ = check_realizable(_get(fx, "symbol_diag").modified_symbol())
    e12, cert = check_realizable(_get(fx, "symbol_e12").modified_symbol())
    return CriterionResult(6, "realizability verdicts on the two s=2 fixtures", diag and not e12,
                           {"symbol_diag": diag, "symbol_e12": e12, "e12_violation": cert.violation})


ISOTROPY_CASES = {
    "symbol_diag": [[0, 0], [0, "1i"]],
    "symbol_zero": [["1i", 0], [0, "1i"]],
    "symbol_trio": [["1i", "2+1i"], ["-2+1i", "3i"]],
}


def flipped_field(X: HoloVectorField) -> HoloVectorField:
    """Negative control: the w-coefficient with its sign reversed."""
    return HoloVectorField(X.Xw.scale(-1), X.Xz, X.Xzeta)


def criterion_7(fx, seed: int = 7, per_model: int = 2, order: int = 6) -> CriterionResult:
    rng = random.Random(seed)
    eqs = {name: build_model(_get(fx, name).truncate(min(order, _get(fx, name).order)))
           for name in MODEL_FIXTURES}
    eqs["nonnormalized_s2"] = _get(fx, "nonnormalized_s2")
    eqs["realized_diag"] = build_model(realize_S_from_symbol(_get(fx, "symbol_diag"), order))
    bad, transversal = [], 0
    for name, eq in sorted(eqs.items()):
        for _ in range(per_model):
            a = [rand_gr(rng) for _ in range(eq.s)]
            b = GaussianRational(rng.randint(-3, 3))
            transversal += 1
            if not verify_tangency(eq, transversal_symmetry(eq, a, b)).passed:
                bad.append([name, "transversal", [str(x) for x in a], str(b)])
        if not verify_tangency(eq, euler_symmetry(eq.s, eq.r, eq.order)).passed:
            bad.append([name, "euler"])
    for name, L in sorted(ISOTROPY_CASES.items()):
        inp = _get(fx, name)
        eq = build_model(realize_S_from_symbol(inp, order))
        x = CspElement.from_rationals(inp.s, L=L)
        if not verify_tangency(eq, isotropy_symmetry(inp, x, order)).passed:
            bad.append([name, "isotropy"])
    eq = eqs["light_cone"]
    control = verify_tangency(eq, flipped_field(transversal_symmetry(eq, [1], 0)))
    ok = not bad and not control.passed and transversal >= 10 and len(eqs) >= 5
    return CriterionResult(7, "exact tangency of the explicit symmetries", ok,
                           {"models": sorted(eqs), "transversal_fields": transversal, "failures": bad,
                            "negative_control": control.to_json()})


def _const_part(p: WPoly):
    c = p.coeffs.get(0)
    return c.constant() if c is not None else ZERO


def heisenberg_check(eq) -> dict:
    """Structure constants of the transversal fields against the Hermitian form of H0."""
    s = eq.s
    H0 = eq.Hfull.constant()
    basis_a = []
    for j in range(s):
        for c in (ONE, I):
            a = [ZERO] * s
            a[j] = c
            basis_a.append(a)
    fields = [transversal_symmetry(eq, a, 0) for a in basis_a]
    Z = translation_field(s, eq.r, eq.order)
    errors = []
    for p, (a, X) in enumerate(zip(basis_a, fields)):
        for q, (c, Y) in enumerate(zip(basis_a, fields)):
            if q <= p:
                continue
            form = linalg.matmul([a], linalg.matmul(H0, [[x.conjugate()] for x in c]))[0][0]
            want = Z.scale(2 * form.im)
            if field_bracket(X, Y) != want:
                errors.append(["bracket", p, q])
        if not field_bracket(X, Z).is_zero():
            errors.append(["centre", p])
    E = euler_symmetry(s, eq.r, eq.order)
    for p, X in enumerate(fields):
        if field_bracket(E, X) != X.scale(-1):
            errors.append(["euler", p])
    if field_bracket(E, Z) != Z.scale(-2):
        errors.append(["euler", "centre"])
    vecs = []
    for X in fields + [Z]:
        v = [_const_part(X.Xw)] + [_const_part(p) for p in X.Xz]
        vecs.append([GaussianRational(x.re) for x in v] + [GaussianRational(x.im) for x in v])
    dim = linalg.rank(vecs)
    return {"dimension": dim, "expected_dimension": 2 * s + 1, "errors": errors}


def criterion_8(fx) -> CriterionResult:
    out = {}
    for name in MODEL_FIXTURES:
        data = _get(fx, name)
        out[name] = heisenberg_check(build_model(data.truncate(min(5, data.order))))
    ok = all(v["dimension"] == v["expected_dimension"] and not v["errors"] for v in out.values())
    return CriterionResult(8, "transversal fields form a Heisenberg algebra", ok, out)


PIVOT_EXPECTED = {
    "pivot_s1": [[1, 1]],
    "pivot_offdiag": [[1, 2]],
    "pivot_pair": [[1, 1], [1, 2]],
}


def criterion_9(fx) -> CriterionResult:
    out, ok = {}, True
    for name, want in sorted(PIVOT_EXPECTED.items()):
        data = _get(fx, name)
        piv = pivot_select(data)
        red = normal_form_reduce(data)
        fixed = all(red.Sz[j, k] == TruncatedSeries.var(red.space, ("zeta", a), red.order)
                    for a, (j, k) in enumerate(piv.positions))
        idem = normal_form_reduce(red) == red
        same_piv = pivot_select(red) == piv
        two_nd = red.is_two_nondegenerate() == data.is_two_nondegenerate()
        row = {"pivot": piv.one_based(), "expected": want, "pivots_fixed": fixed,
               "idempotent": idem, "pivot_stable": same_piv, "nondegeneracy_kept": two_nd}
        out[name] = row
        ok = ok and piv.one_based() == want and fixed and idem and same_piv and two_nd
    return CriterionResult(9, "pivot normal form", ok, out)


def criterion_10(fx) -> CriterionResult:
    m1, m2 = _get(fx, "scaling_m1"), _get(fx, "scaling_m2")
    w = _get(fx, "scaling_witness")
    forward = verify_equivalence_witness(m1, m2, w)
    ident = EquivalenceWitness(w.U, (TruncatedSeries.var(m1.space, ("zeta", 0), m1.order),))
    negative = verify_equivalence_witness(m1, m2, ident)
    backward = verify_equivalence_witness(m2, m1, w.inverse())
    ok = forward.passed and not negative.passed and backward.passed
    return CriterionResult(10, "equivalence witness verification", ok,
                           {"witness": forward.to_json(), "identity_g": negative.to_json(),
                            "inverse": backward.to_json()})


def _weight3_perturbation(rng, space: VarSpace, order: int) -> TruncatedSeries:
    """Random terms of weighted degree exactly 3 (z-cubic or z times t, any zeta)."""
    s, r = space.s, space.r
    terms = {}
    for _ in range(6):
        e = [0] * space.nvars
        if rng.random() < 0.5:
            for _ in range(3):
                e[rng.randrange(2 * s)] += 1
        else:
            e[rng.randrange(2 * s)] += 1
            e[space.index(("t", 0))] += 1
        for _ in range(rng.randint(0, 2)):
            e[2 * s + rng.randrange(2 * r)] += 1
        terms[tuple(e)] = rand_gr(rng)
    return TruncatedSeries(space, 3, terms, WEIGHTED)


def _symbol_outputs(eq) -> dict:
    foc = first_order_constancy(eq)
    real, _ = check_realizable(foc.symbol)
    base = bigraded_symbol_at_zero(eq)
    return {"H": _fmt(base.inv.H), "Xi": [_fmt(X) for X in base.Xi], "foc": foc.to_json(),
            "realizable": real}


def criterion_11(fx, seed: int = 11) -> CriterionResult:
    rng = random.Random(seed)
    out, ok = {}, True
    for name in MODEL_FIXTURES:
        data = _get(fx, name)
        eq = build_model(data.truncate(min(5, data.order)))
        F = model_P_weighted(eq, 3) + _weight3_perturbation(rng, eq.space.with_t(), eq.order)
        extracted = extract_weighted_model(DefiningSeries.split(F, eq.order))
        leaf = leaf_data(F, eq.order)
        same = extracted == eq and leaf == eq and _symbol_outputs(leaf) == _symbol_outputs(eq)
        out[name] = same
        ok = ok and same
    return CriterionResult(11, "weighted perturbations leave the symbol unchanged", ok, out)


def criterion_12(fx, seed: int = 12, count: int = 4) -> CriterionResult:
    rng = random.Random(seed)
    errors = []
    symbols = {name: _get(fx, name).modified_symbol() for name in SYMBOL_FIXTURES + ["symbol_e12"]}
    for name, sym in sorted(symbols.items()):
        verdict = check_realizable(sym)[0]
        for k in range(count):
            g1, g2 = rand_group_element(rng, sym.s), rand_group_element(rng, sym.s)
            moved = act_on_modified_symbol(g1, sym)
            if check_realizable(moved)[0] != verdict:
                errors.append([name, k, "realizability"])
            two_step = act_on_modified_symbol(g2, moved)
            one_step = act_on_modified_symbol(g1 * g2, sym)
            if two_step != one_step:
                errors.append([name, k, "composition"])
    eqs = {name: build_model(_get(fx, name).truncate(4)) for name in ("indefinite_s2", "pseudoconvex_s2")}
    eqs["realized_diag"] = build_model(realize_S_from_symbol(_get(fx, "symbol_diag"), 4))
    verdicts = {}
    for name, eq in sorted(eqs.items()):
        foc = first_order_constancy(eq)
        verdicts[name] = foc.constant_to_first_order
        for k in range(count):
            V = rand_invertible(rng, eq.s)
            moved = first_order_constancy(linear_change(eq, V))
            if moved.constant_to_first_order != foc.constant_to_first_order:
                errors.append([name, k, "foc verdict"])
                continue
            pred = act_on_modified_symbol(GroupElement00(ONE, V), foc.symbol)
            got = moved.symbol
            if pred.base != got.base or not all(
                    in_g00_prime(linalg.sub(a, b), got.base) for a, b in zip(pred.Omega, got.Omega)):
                errors.append([name, k, "symbol equivariance"])
    return CriterionResult(12, "equivariance under the structure group", not errors,
                           {"errors": errors, "foc_verdicts": verdicts})


CRITERIA: Dict[int, Callable] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}

CRITERION_FIXTURES = {
    1: [], 3: [], 6: ["symbol_diag", "symbol_e12"],
    2: MODEL_FIXTURES + ["hand_broken"],
    4: [], 5: SYMBOL_FIXTURES,
    7: MODEL_FIXTURES + ["nonnormalized_s2"] + SYMBOL_FIXTURES,
    8: MODEL_FIXTURES, 9: sorted(PIVOT_EXPECTED),
    10: ["scaling_m1", "scaling_m2", "scaling_witness"],
    11: MODEL_FIXTURES, 12: SYMBOL_FIXTURES + ["symbol_e12", "indefinite_s2", "pseudoconvex_s2"],
}


def thread_count() -> int:
    raw = os.environ.get("CRMW_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_criteria(fx, numbers: List[int]) -> List[CriterionResult]:
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(lambda n: CRITERIA[n](fx), numbers))
    return sorted(results, key=lambda r: r.number)
