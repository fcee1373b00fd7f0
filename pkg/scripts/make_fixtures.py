"""Regenerate src/crmw/fixtures/*.json from the library itself.

Run from the repository root:  python3 scripts/make_fixtures.py
"""

import pathlib

from crmw import io, linalg
from crmw.lie import Involution
from crmw.model import DefiningEquation, ModelData, build_model
from crmw.normalform import EquivalenceWitness, forward_transform
from crmw.realize import SymbolInput
from crmw.series import GaussianRational, SeriesMatrix, TruncatedSeries, VarSpace

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "crmw" / "fixtures"


def zeta_vars(s, r, order):
    sp = VarSpace(s, r)
    return sp, [TruncatedSeries.var(sp, ("zeta", a), order) for a in range(r)]


def model(kind_note, H0, S):
    return {"kind": "model", "note": kind_note, **io.model_data_to_json(ModelData(H0, SeriesMatrix(S)))}


def main(out=OUT):
    out = pathlib.Path(out)
    q = GaussianRational
    fx = {}

    sp, (z,) = zeta_vars(1, 1, 8)
    fx["light_cone"] = model("s=1 light cone, S = [zeta]", [[1]], [[z]])

    sp, (z1, z2) = zeta_vars(2, 2, 6)
    fx["pseudoconvex_s2"] = model("H = Id, two kernel directions", [[1, 0], [0, 1]],
                                  [[z1 + z2 * z2 * (q(1) / 2), z2], [z2, z1 * z1 * q(0, 1)]])

    sp, (z,) = zeta_vars(2, 1, 6)
    fx["indefinite_s2"] = model("H = diag(1,-1)", [[1, 0], [0, -1]],
                                [[z + z * z * (q(1) / 2), z * z], [z * z, z * z * z]])

    sp, (z1, z2) = zeta_vars(3, 2, 5)
    zero = TruncatedSeries.zero(sp, 5)
    S3 = [[z1, z2 * q(1, 1), zero],
          [z2 * q(1, 1), z1 * z2, z1 * z1 * q(0, 2)],
          [zero, z1 * z1 * q(0, 2), z2 + z1 * z1 * z1]]
    fx["mixed_s3"] = model("s=3, r=2, complex off-diagonal H",
                           [[2, q(1, 1), 0], [q(1, -1), 2, 0], [0, 0, -1]], S3)

    base = build_model(io.model_data_from_json(fx["indefinite_s2"]))
    sp = base.space
    zz = TruncatedSeries.var(sp, ("zeta", 0), base.order)
    zero = TruncatedSeries.zero(sp, base.order)
    A = SeriesMatrix([[zero, zz], [zz * q(0, 1), zero]])
    plh = SeriesMatrix([[zz * q(1, 1), zero], [zero, zero]]).conjugate()
    fx["nonnormalized_s2"] = {"kind": "equation", "note": "indefinite_s2 after z -> (Id + A(zeta)) z",
                              **io.equation_to_json(forward_transform(base, A, plh))}

    sp = VarSpace(1, 1)
    zz = TruncatedSeries.var(sp, ("zeta", 0), 3)
    zb = TruncatedSeries.var(sp, ("zetabar", 0), 3)
    one = TruncatedSeries.const(sp, 1, 3)
    broken = DefiningEquation(SeriesMatrix([[one + zz + zb]]), SeriesMatrix([[zz]]))
    fx["hand_broken"] = {"kind": "equation", "note": "H = 1 + zeta + conj(zeta), S = zeta",
                         **io.equation_to_json(broken)}

    def symbol(note, H, pairs):
        inp = SymbolInput(Involution(linalg.mat(H)), pairs)
        return {"kind": "symbol", "note": note, **io.modified_symbol_to_json(inp.modified_symbol())}

    E11 = [[1, 0], [0, 0]]
    fx["symbol_diag"] = symbol("Xi = E11, Omega = diag(1,0)", [[1, 0], [0, 1]], [(E11, [[1, 0], [0, 0]])])
    fx["symbol_e12"] = symbol("Xi = E11, Omega = E12", [[1, 0], [0, 1]], [(E11, [[0, 1], [0, 0]])])
    fx["symbol_zero"] = symbol("Xi = E11, Omega = 0", [[1, 0], [0, 1]], [(E11, [[0, 0], [0, 0]])])
    fx["symbol_trio"] = symbol("all three symmetric 2x2 directions, Omega = 0", [[1, 0], [0, 1]],
                               [(E11, [[0, 0], [0, 0]]), ([[0, 1], [1, 0]], [[0, 0], [0, 0]]),
                                ([[0, 0], [0, 1]], [[0, 0], [0, 0]])])

    sp, (z,) = zeta_vars(1, 1, 6)
    fx["pivot_s1"] = model("pivot ((1,1)); S = 2 zeta + zeta^2", [[1]], [[z * 2 + z * z]])
    sp, (z,) = zeta_vars(2, 1, 6)
    fx["pivot_offdiag"] = model("pivot ((1,2))", [[1, 0], [0, 1]], [[z * z, z + z * z * z], [z + z * z * z, z * z]])
    sp, (z1, z2) = zeta_vars(2, 2, 6)
    fx["pivot_pair"] = model("pivot ((1,1),(1,2))", [[1, 0], [0, 1]],
                             [[z1 + z2 * z2, z2 + z1 * z2], [z2 + z1 * z2, z1 * z1]])

    sp, (z,) = zeta_vars(1, 1, 6)
    fx["scaling_m1"] = model("H = [1], S = [zeta]", [[1]], [[z]])
    fx["scaling_m2"] = model("H = [4], S = [zeta]", [[4]], [[z]])
    fx["scaling_witness"] = {"kind": "witness", "note": "U = [2], g = zeta/4",
                             **io.witness_to_json(EquivalenceWitness([[2]], (z * (q(1) / 4),)))}

    out.mkdir(parents=True, exist_ok=True)
    for name, obj in sorted(fx.items()):
        (out / f"{name}.json").write_text(io.dumps(obj))
    return sorted(fx)


if __name__ == "__main__":
    for name in main():
        print("wrote", name)
