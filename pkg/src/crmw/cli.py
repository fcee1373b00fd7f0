"""Command-line front end.

Every subcommand reads JSON, calls one library routine and prints a canonical
JSON report on stdout.  Exit codes: 0 success, 1 mathematical failure,
2 input error.  A one-line human summary goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, List, Optional

from . import __version__, battery, io
from .model import ModelData, build_model, verify_rank_condition
from .normalform import (
    NormalFormError,
    normal_form_reduce,
    normalize_holomorphic,
    pivot_select,
    verify_equivalence_witness,
)
from .realize import RealizationError, SymbolInput, realize_S_from_symbol
from .symbols import check_realizable, first_order_constancy
from .symmetry import (
    SymmetryError,
    euler_symmetry,
    isotropy_symmetry,
    translation_field,
    transversal_symmetry,
    verify_tangency,
)
from .series import I, ONE, ZERO

DEFAULT_ORDER = 6
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; becomes exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# input helpers -------------------------------------------------------------------

class _Run:
    """Collects input hashes and warnings for one invocation."""

    def __init__(self, command: str):
        self.command = command
        self.inputs: Dict[str, str] = {}
        self.warnings: List[str] = []

    def load(self, flag: str, path: Optional[str]):
        if path is None:
            raise InputError(f"--{flag} is required")
        try:
            obj, sha = io.load_json_file(path)
        except FileNotFoundError:
            raise InputError(f"--{flag}: no such file: {path}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"--{flag}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
                             ) from None
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"--{flag}: cannot read {path}: {exc}") from None
        self.inputs[flag] = sha
        return obj

    def decode(self, flag: str, path: Optional[str], decoder):
        obj = self.load(flag, path)
        try:
            return decoder(obj)
        except io.SchemaError as exc:
            raise InputError(f"--{flag}: schema error at {exc.path or '<root>'}: {exc.message}") from None
        except ValueError as exc:
            raise InputError(f"--{flag}: invalid data: {exc}") from None


def _symbol_input(obj) -> SymbolInput:
    return SymbolInput.from_modified_symbol(io.modified_symbol_from_json(obj))


def _truncated_model(run: _Run, data: ModelData, order: int) -> ModelData:
    if order > data.order:
        run.warnings.append(f"requested order {order} exceeds the input order {data.order}; using {data.order}")
        return data
    return data.truncate(order)


def _equation(run: _Run, args):
    """Equation from --eq, or built from --model at --order."""
    if args.eq is not None:
        eq = run.decode("eq", args.eq, io.equation_from_json)
        if args.order_given and args.order < eq.order:
            eq = type(eq)(eq.Hfull.truncate(args.order), eq.Sfull.truncate(args.order))
        return eq
    if args.model is not None:
        data = run.decode("model", args.model, io.model_data_from_json)
        return build_model(_truncated_model(run, data, args.order))
    raise InputError("one of --eq or --model is required")


def _write_out(path: Optional[str], kind: str, payload: dict):
    if path is None:
        return
    text = io.dumps({"kind": kind, **payload})
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"--out: cannot write {path}: {exc}") from None


# subcommands -------------------------------------------------------------------
# each returns (verdict, result, failure)

def cmd_build(run, args):
    data = run.decode("model", args.model, io.model_data_from_json)
    eq = build_model(_truncated_model(run, data, args.order))
    payload = io.equation_to_json(eq)
    _write_out(args.out, "equation", payload)
    return True, {"equation": payload}, None


def cmd_verify_rank(run, args):
    eq = _equation(run, args)
    rep = verify_rank_condition(eq)
    return rep.passed, {"checked_order": rep.order}, rep.failure


def cmd_symbol(run, args):
    eq = _equation(run, args)
    foc = first_order_constancy(eq)
    sym = io.modified_symbol_to_json(foc.symbol)
    _write_out(args.out, "symbol", sym)
    result = {"symbol": sym}
    if not args.foc:
        return True, result, None
    result["foc"] = foc.to_json()
    failure = None if foc.constant_to_first_order else {"obstructions": result["foc"]["obstructions"]}
    return foc.constant_to_first_order, result, failure


def cmd_realizable(run, args):
    sym = run.decode("symbol", args.symbol, io.modified_symbol_from_json)
    ok, cert = check_realizable(sym)
    return ok, {"certificate": cert.to_json()}, cert.violation


def cmd_realize(run, args):
    inp = run.decode("symbol", args.symbol, _symbol_input)
    try:
        data = realize_S_from_symbol(inp, args.order)
    except RealizationError as exc:
        return False, {}, {"reason": str(exc)}
    payload = io.model_data_to_json(data)
    _write_out(args.out, "model", payload)
    return True, {"model": payload}, None


def cmd_symmetries(run, args):
    eq = _equation(run, args)
    s, r, d = eq.s, eq.r, eq.order
    fields = {}
    for j in range(s):
        for tag, c in (("", ONE), ("i", I)):
            a = [ZERO] * s
            a[j] = c
            fields[f"transversal_{tag}e{j + 1}"] = transversal_symmetry(eq, a, 0)
    fields["translation"] = translation_field(s, r, d)
    fields["euler"] = euler_symmetry(s, r, d)
    if args.isotropy is not None:
        if args.symbol is None:
            raise InputError("--isotropy needs --symbol")
        inp = run.decode("symbol", args.symbol, _symbol_input)
        x = run.decode("isotropy", args.isotropy, io.csp_from_json)
        try:
            fields["isotropy"] = isotropy_symmetry(inp, x, d)
        except SymmetryError as exc:
            raise InputError(f"--isotropy: {exc}") from None
    result = {"fields": {k: io.field_to_json(X) for k, X in fields.items()}}
    if not args.check:
        return True, result, None
    tangency = {k: verify_tangency(eq, X).to_json() for k, X in fields.items()}
    result["tangency"] = tangency
    bad = sorted(k for k, v in tangency.items() if not v["passed"])
    return not bad, result, ({"field": bad[0], **tangency[bad[0]]} if bad else None)


def cmd_normalize(run, args):
    if args.eq is not None:
        eq = run.decode("eq", args.eq, io.equation_from_json)
        data, record = normalize_holomorphic(eq)
        removed = not record.is_identity()
    else:
        data = run.decode("model", args.model, io.model_data_from_json)
        removed = False
    data = _truncated_model(run, data, args.order)
    try:
        piv = pivot_select(data)
        nf = normal_form_reduce(data)
    except NormalFormError as exc:
        return False, {}, {"reason": str(exc)}
    payload = io.model_data_to_json(nf)
    _write_out(args.out, "model", payload)
    return True, {"pivot": piv.one_based(), "holomorphic_terms_removed": removed, "model": payload}, None


def cmd_equiv(run, args):
    m1 = run.decode("m1", args.m1, io.model_data_from_json)
    m2 = run.decode("m2", args.m2, io.model_data_from_json)
    w = run.decode("witness", args.witness, io.witness_from_json)
    rep = verify_equivalence_witness(m1, m2, w)
    return rep.passed, {}, rep.failure


# battery -------------------------------------------------------------------------

def _battery_config(run, path):
    if path is None:
        return None
    obj = run.load("config", path)
    if not isinstance(obj, dict):
        raise InputError("--config: schema error at <root>: expected an object")
    unknown = sorted(set(obj) - {"fixtures", "criteria"})
    if unknown:
        raise InputError(f"--config: schema error at {unknown[0]}: unknown field")
    base = os.path.dirname(os.path.abspath(path))
    fixtures = obj.get("fixtures", {})
    if isinstance(fixtures, list):
        if not all(isinstance(n, str) for n in fixtures):
            raise InputError("--config: schema error at fixtures: expected fixture names")
        fixtures = {n: None for n in fixtures}
    elif isinstance(fixtures, dict):
        for n, p in fixtures.items():
            if p is not None and not isinstance(p, str):
                raise InputError(f"--config: schema error at fixtures.{n}: expected a path")
    else:
        raise InputError("--config: schema error at fixtures: expected a list or an object")
    criteria = obj.get("criteria")
    if criteria is not None:
        if not isinstance(criteria, list) or not all(
                isinstance(c, int) and not isinstance(c, bool) and c in battery.CRITERIA for c in criteria):
            raise InputError(f"--config: schema error at criteria: expected numbers in 1..{len(battery.CRITERIA)}")
    resolved = {n: (p if p is None or os.path.isabs(p) else os.path.join(base, p)) for n, p in fixtures.items()}
    return resolved, criteria


def cmd_battery(run, args):
    if args.order is not None:
        run.warnings.append("--order is ignored by battery; each criterion uses its own fixed orders")
    cfg = _battery_config(run, args.config)
    if cfg is None:
        names = battery.shipped_fixture_names()
        sources = {n: None for n in names}
        criteria = sorted(battery.CRITERIA)
    else:
        sources, criteria = cfg
        if criteria is None:
            criteria = [n for n in sorted(battery.CRITERIA)
                        if all(f in sources for f in battery.CRITERION_FIXTURES[n])] if sources else []
    for name, path in sorted(sources.items()):
        exists = battery.shipped_fixture_path(name).is_file() if path is None else os.path.isfile(path)
        if not exists:
            raise InputError(f"missing fixture: {name}" + ("" if path is None else f" ({path})"))
    if not criteria:
        run.warnings.append("empty battery: nothing to check, vacuous pass")
        return True, {"criteria": [], "fixtures": sorted(sources)}, None
    needed = sorted({f for n in criteria for f in battery.CRITERION_FIXTURES[n]})
    missing = [f for f in needed if f not in sources]
    if missing:
        raise InputError(f"missing fixture: {missing[0]}")
    fx, corrupted = {}, {}
    for name in sorted(sources):
        path = sources[name]
        try:
            if path is None:
                raw = battery.shipped_fixture_path(name).read_bytes()
            else:
                with open(path, "rb") as fh:
                    raw = fh.read()
        except FileNotFoundError:
            raise InputError(f"missing fixture: {name} ({path})") from None
        run.inputs[f"fixture:{name}"] = io.sha256_bytes(raw)
        try:
            fx[name] = battery.decode_fixture(name, json.loads(raw.decode("utf-8")))
        except (ValueError, UnicodeDecodeError) as exc:
            corrupted[name] = str(exc)
    if corrupted:
        name = sorted(corrupted)[0]
        return False, {"corrupted": corrupted}, {"fixture": name, "reason": corrupted[name]}
    results = battery.run_criteria(fx, criteria)
    out = [r.to_json() for r in results]
    bad = [r for r in results if not r.passed]
    failure = {"criterion": bad[0].number, "title": bad[0].title} if bad else None
    return not bad, {"criteria": out, "fixtures": sorted(sources)}, failure


COMMANDS = {
    "build": cmd_build,
    "verify-rank": cmd_verify_rank,
    "symbol": cmd_symbol,
    "realizable": cmd_realizable,
    "realize": cmd_realize,
    "symmetries": cmd_symmetries,
    "normalize": cmd_normalize,
    "equiv": cmd_equiv,
    "battery": cmd_battery,
}


def _nonneg_int(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if val < 0:
        raise argparse.ArgumentTypeError("order must be non-negative")
    return val


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crmw", description="Exact computations with 2-nondegenerate CR models.")
    p.add_argument("--version", action="version", version=f"crmw {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, *flags, help=None):
        sp = sub.add_parser(name, help=help)
        for f in flags:
            sp.add_argument(f"--{f}", default=None, metavar="PATH")
        sp.add_argument("--order", type=_nonneg_int, default=None)
        sp.add_argument("--out", default=None, metavar="PATH")
        sp.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
        return sp

    add("build", "model", help="defining equation from (H0, S)")
    add("verify-rank", "eq", "model", help="check the rank PDE system")
    add("symbol", "eq", "model", help="modified symbol at 0").add_argument("--foc", action="store_true")
    add("realizable", "symbol", help="decide realizability of a modified symbol")
    add("realize", "symbol", help="model realizing a symbol")
    sym = add("symmetries", "model", "eq", "symbol", "isotropy", help="explicit symmetry fields")
    sym.add_argument("--check", action="store_true")
    add("normalize", "model", "eq", help="pivot normal form")
    add("equiv", "m1", "m2", "witness", help="verify an equivalence witness")
    add("battery", "config", help="run the acceptance checks")
    return p


def _summary(command, verdict, failure, warnings) -> str:
    lines = [f"warning: {w}" for w in warnings]
    word = "PASS" if verdict else "FAIL"
    tail = "" if failure is None else f" ({json.dumps(failure, sort_keys=True)[:200]})"
    lines.append(f"crmw {command}: {word}{tail}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    command = argv[0] if argv and not argv[0].startswith("-") else None
    run = _Run(command or "")
    try:
        args = build_parser().parse_args(argv)
        run.command = args.command
        args.order_given = args.order is not None
        if args.order is None:
            args.order = DEFAULT_ORDER
        verdict, result, failure = COMMANDS[args.command](run, args)
    except InputError as exc:
        report = {"command": run.command, "inputs": run.inputs, "verdict": None,
                  "result": None, "failure": {"input_error": str(exc)}}
        sys.stdout.write(io.dumps(report))
        print(f"crmw {run.command}: input error: {exc}".replace("crmw :", "crmw:"), file=sys.stderr)
        return EXIT_INPUT
    report = {"command": run.command, "inputs": run.inputs, "verdict": verdict,
              "result": result, "failure": failure}
    if run.warnings:
        report["warnings"] = run.warnings
    sys.stdout.write(io.dumps(report))
    print(_summary(run.command, verdict, failure, run.warnings), file=sys.stderr)
    return EXIT_OK if verdict else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
