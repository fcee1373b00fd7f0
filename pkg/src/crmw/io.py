"""JSON encoding of the library's data types.

Decoders raise SchemaError carrying a field path such as ``S[0][1].terms[2].c``
so the command line can point at the offending entry.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, List

from . import linalg
from .lie import CspElement, Involution
from .model import DefiningEquation, ModelData
from .normalform import EquivalenceWitness
from .series import (
    TOTAL,
    WEIGHTED,
    GaussianRational,
    SeriesError,
    SeriesMatrix,
    TruncatedSeries,
    VarSpace,
)
from .symbols import BigradedSymbol, ModifiedSymbol


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _need(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    val = obj[key]
    if kind is not None and not isinstance(val, kind) or isinstance(val, bool) and kind is int:
        raise SchemaError(f"{path}.{key}" if path else key, f"expected {getattr(kind, '__name__', kind)}")
    return val


def _list(val, path) -> list:
    if not isinstance(val, list):
        raise SchemaError(path, "expected a list")
    return val


# scalars and constant matrices ---------------------------------------------

def gr_to_json(x: GaussianRational) -> str:
    return str(x)


def gr_from_json(val, path: str) -> GaussianRational:
    if isinstance(val, int) and not isinstance(val, bool):
        return GaussianRational(val)
    if not isinstance(val, str):
        raise SchemaError(path, "expected a Gaussian rational string")
    try:
        return GaussianRational.parse(val)
    except SeriesError as exc:
        raise SchemaError(path, str(exc)) from None


def matrix_to_json(M) -> list:
    return [[str(x) for x in row] for row in M]


def matrix_from_json(val, path: str, square: bool = True) -> list:
    rows = _list(val, path)
    out = [[gr_from_json(x, f"{path}[{i}][{j}]") for j, x in enumerate(_list(row, f"{path}[{i}]"))]
           for i, row in enumerate(rows)]
    if not out or any(len(row) != len(out[0]) for row in out):
        raise SchemaError(path, "ragged or empty matrix")
    if square and len(out) != len(out[0]):
        raise SchemaError(path, "matrix must be square")
    return out


def vector_from_json(val, path: str) -> list:
    return [gr_from_json(x, f"{path}[{i}]") for i, x in enumerate(_list(val, path))]


# series ----------------------------------------------------------------------

def series_to_json(a: TruncatedSeries) -> dict:
    sp = a.space
    return {
        "vars": {"s": sp.s, "r": sp.r, "t": sp.has_t},
        "order": a.order,
        "grading": a.grading,
        "terms": [{"exp": list(e), "c": str(c)} for e, c in a.sorted_terms()],
    }


def series_from_json(val, path: str) -> TruncatedSeries:
    v = _need(val, "vars", path, dict)
    s = _need(v, "s", f"{path}.vars", int)
    r = _need(v, "r", f"{path}.vars", int)
    t = v.get("t", False)
    if not isinstance(t, bool):
        raise SchemaError(f"{path}.vars.t", "expected a boolean")
    order = _need(val, "order", path, int)
    grading = val.get("grading", TOTAL)
    if grading not in (TOTAL, WEIGHTED):
        raise SchemaError(f"{path}.grading", "must be 'total' or 'weighted'")
    if s < 0 or r < 0 or order < 0:
        raise SchemaError(path, "dimensions and order must be non-negative")
    sp = VarSpace(s, r, t)
    terms = {}
    for k, term in enumerate(_list(_need(val, "terms", path), f"{path}.terms")):
        tp = f"{path}.terms[{k}]"
        exp = _list(_need(term, "exp", tp), f"{tp}.exp")
        if len(exp) != sp.nvars or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in exp):
            raise SchemaError(f"{tp}.exp", f"expected {sp.nvars} non-negative integers")
        c = gr_from_json(_need(term, "c", tp), f"{tp}.c")
        e = tuple(exp)
        if e in terms:
            raise SchemaError(f"{tp}.exp", "duplicate exponent")
        terms[e] = c
    try:
        return TruncatedSeries(sp, order, terms, grading)
    except SeriesError as exc:
        raise SchemaError(path, str(exc)) from None


def series_matrix_to_json(M: SeriesMatrix) -> list:
    return [[series_to_json(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]


def series_matrix_from_json(val, path: str) -> SeriesMatrix:
    rows = _list(val, path)
    entries = [[series_from_json(x, f"{path}[{i}][{j}]") for j, x in enumerate(_list(row, f"{path}[{i}]"))]
               for i, row in enumerate(rows)]
    if not entries or any(len(row) != len(entries[0]) for row in entries):
        raise SchemaError(path, "ragged or empty matrix")
    try:
        return SeriesMatrix(entries)
    except SeriesError as exc:
        raise SchemaError(path, str(exc)) from None


# composite types -------------------------------------------------------------

def _check_dims(obj, s, r, order, path):
    for key, want in (("s", s), ("r", r), ("order", order)):
        if key in obj and obj[key] != want:
            raise SchemaError(f"{path}{key}", f"declared {obj[key]} but data gives {want}")


def model_data_to_json(data: ModelData) -> dict:
    return {"s": data.s, "r": data.r, "order": data.order,
            "H0": matrix_to_json(data.H0), "S": series_matrix_to_json(data.Sz)}


def model_data_from_json(obj) -> ModelData:
    H0 = matrix_from_json(_need(obj, "H0", ""), "H0")
    S = series_matrix_from_json(_need(obj, "S", ""), "S")
    try:
        data = ModelData(H0, S)
    except ValueError as exc:
        raise SchemaError("S", str(exc)) from None
    _check_dims(obj, data.s, data.r, data.order, "")
    return data


def equation_to_json(eq: DefiningEquation) -> dict:
    return {"s": eq.s, "r": eq.r, "order": eq.order,
            "H": series_matrix_to_json(eq.Hfull), "S": series_matrix_to_json(eq.Sfull)}


def equation_from_json(obj) -> DefiningEquation:
    H = series_matrix_from_json(_need(obj, "H", ""), "H")
    S = series_matrix_from_json(_need(obj, "S", ""), "S")
    try:
        eq = DefiningEquation(H, S)
    except ValueError as exc:
        raise SchemaError("H", str(exc)) from None
    _check_dims(obj, eq.s, eq.r, eq.order, "")
    return eq


def involution_to_json(inv: Involution) -> dict:
    return {"H": matrix_to_json(inv.H), "eih": str(inv.eih)}


def involution_from_json(obj, path="") -> Involution:
    H = matrix_from_json(_need(obj, "H", path), f"{path}H")
    eih = gr_from_json(obj.get("eih", "1"), f"{path}eih")
    try:
        return Involution(H, eih)
    except ValueError as exc:
        raise SchemaError(f"{path}H", str(exc)) from None


def modified_symbol_to_json(sym: ModifiedSymbol) -> dict:
    return {
        "H": matrix_to_json(sym.base.inv.H),
        "eih": str(sym.base.inv.eih),
        "Xi": [matrix_to_json(X) for X in sym.base.Xi],
        "Omega": [matrix_to_json(O) for O in sym.Omega],
        "g00prime": [matrix_to_json(B) for B in sym.g00prime],
    }


def modified_symbol_from_json(obj) -> ModifiedSymbol:
    inv = involution_from_json(obj)
    Xi = [matrix_from_json(X, f"Xi[{k}]") for k, X in enumerate(_list(_need(obj, "Xi", ""), "Xi"))]
    Om = [matrix_from_json(O, f"Omega[{k}]") for k, O in enumerate(_list(_need(obj, "Omega", ""), "Omega"))]
    if len(Xi) != len(Om):
        raise SchemaError("Omega", "need one Omega per Xi")
    for name, mats in (("Xi", Xi), ("Omega", Om)):
        for k, M in enumerate(mats):
            if len(M) != inv.s:
                raise SchemaError(f"{name}[{k}]", f"expected {inv.s}x{inv.s}")
    try:
        base = BigradedSymbol(inv, Xi)
    except ValueError as exc:
        raise SchemaError("Xi", str(exc)) from None
    # g00prime is derived data; it is recomputed rather than trusted
    return ModifiedSymbol(base, Om)


def csp_to_json(x: CspElement) -> dict:
    return {"s": x.s, "c": str(x.c), "L": matrix_to_json(x.L), "S02": matrix_to_json(x.S02),
            "S0m2": matrix_to_json(x.S0m2), "v1": [str(a) for a in x.v1],
            "v2": [str(a) for a in x.v2], "u": str(x.u)}


def csp_from_json(obj) -> CspElement:
    s = _need(obj, "s", "", int)
    get_m = lambda k: matrix_from_json(obj[k], k) if k in obj else None
    get_v = lambda k: vector_from_json(obj[k], k) if k in obj else None
    try:
        return CspElement(s, gr_from_json(obj.get("c", "0"), "c"), get_m("L"), get_m("S02"),
                          get_m("S0m2"), get_v("v1"), get_v("v2"), gr_from_json(obj.get("u", "0"), "u"))
    except ValueError as exc:
        raise SchemaError("", str(exc)) from None


def witness_to_json(w: EquivalenceWitness) -> dict:
    return {"U": matrix_to_json(w.U), "g": [series_to_json(f) for f in w.g]}


def witness_from_json(obj) -> EquivalenceWitness:
    U = matrix_from_json(_need(obj, "U", ""), "U")
    g = [series_from_json(f, f"g[{k}]") for k, f in enumerate(_list(_need(obj, "g", ""), "g"))]
    try:
        return EquivalenceWitness(U, tuple(g))
    except ValueError as exc:
        raise SchemaError("g", str(exc)) from None


def wpoly_to_json(p) -> dict:
    return {str(k): series_to_json(c) for k, c in sorted(p.coeffs.items())}


def field_to_json(X) -> dict:
    return {"Xw": wpoly_to_json(X.Xw), "Xz": [wpoly_to_json(p) for p in X.Xz],
            "Xzeta": [wpoly_to_json(p) for p in X.Xzeta]}


# files -----------------------------------------------------------------------

def dumps(obj: Any) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def load_json_file(path: str):
    """Returns (object, sha256 of the raw bytes). json.JSONDecodeError propagates."""
    with open(path, "rb") as fh:
        raw = fh.read()
    return json.loads(raw.decode("utf-8")), sha256_bytes(raw)
