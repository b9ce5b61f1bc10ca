"""Command-line interface.

Exit codes: 0 ok / verified / found, 1 counterexample or violation,
2 inconclusive / not found / budget exhausted, 3 usage, parse or
validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from . import analysis, classify, semantics
from .core import OMEGA, Assign, If, SchemaError, align_subschema, is_subschema
from .paths import segment_dot
from .syntax import parse_file, parse_oracle_file, print_schema

EXIT_OK, EXIT_FOUND, EXIT_OPEN, EXIT_ERROR = 0, 1, 2, 3

DEFAULT_FUEL = 64
DEFAULT_BUDGET = 4096


@dataclass
class CommandResult:
    code: int
    verdict: str
    text: str
    payload: Optional[dict] = None

    def emit(self, as_json: bool, out=None) -> int:
        out = out or sys.stdout
        if as_json:
            body = {"verdict": self.verdict, **(self.payload or {})}
            out.write(json.dumps(body, indent=2, sort_keys=False) + "\n")
        elif self.text:
            out.write(self.text if self.text.endswith("\n") else self.text + "\n")
        return self.code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _criterion(args):
    return OMEGA if args.omega else args.var


def _criterion_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--var", metavar="V", help="slice on the final value of variable V")
    g.add_argument("--omega", action="store_true", help="slice on termination")


def _schema_dict(schema) -> list:
    out = []
    for stmt in schema.statements():
        if isinstance(stmt, Assign):
            out.append({"assign": stmt.target, "fn": stmt.fn, "args": list(stmt.args),
                        "label": stmt.label})
        elif isinstance(stmt, If):
            out.append({"if": stmt.pred, "args": list(stmt.args), "label": stmt.label,
                        "then": _schema_dict(stmt.then), "else": _schema_dict(stmt.orelse)})
        else:
            out.append({"while": stmt.pred, "args": list(stmt.args), "label": stmt.label,
                        "body": _schema_dict(stmt.body)})
    return out


def _outcome_text(outcome) -> str:
    if isinstance(outcome, semantics.Terminated):
        final = ", ".join(f"{k} = {v}" for k, v in outcome.final.to_dict().items()) or "e"
        return f"terminated after {len(outcome.path)} letters; final {final}\n  path {outcome.path}"
    if isinstance(outcome, semantics.Diverged):
        return f"diverges at {outcome.loop_at} after {len(outcome.prefix)} letters"
    return f"fuel exhausted after {len(outcome.prefix)} letters"


def _oracle_text(oracle) -> str:
    lines = [f"  {pt} = {str(v).lower()}" for pt, v in oracle.items()]
    return "\n".join(lines) or "  (empty)"


# -- commands -----------------------------------------------------------------


def cmd_parse(args) -> CommandResult:
    schema = parse_file(args.file)
    text = print_schema(schema, labels=True)
    return CommandResult(EXIT_OK, "ok", text, {"schema": _schema_dict(schema), "text": text})


def cmd_fmt(args) -> CommandResult:
    text = print_schema(parse_file(args.file))
    return CommandResult(EXIT_OK, "ok", text, {"text": text})


def cmd_classify(args) -> CommandResult:
    schema = parse_file(args.file)
    report = classify.classify(schema)
    code = EXIT_OK if report.free_and_liberal else EXIT_FOUND
    verdict = "ok" if report.free_and_liberal else "violation"
    if args.dot:
        text = segment_dot(report.witness.segment, "witness") if report.witness else ""
    else:
        lines = [f"predicate_linear: {str(report.predicate_linear).lower()}",
                 f"function_linear: {str(report.function_linear).lower()}",
                 f"linear: {str(report.linear).lower()}",
                 f"free_and_liberal: {str(report.free_and_liberal).lower()}"]
        if report.witness:
            lines.append(f"witness: {report.witness.segment}")
        lines.append(f"special: {str(report.special).lower()} ({report.reason})")
        text = "\n".join(lines)
    return CommandResult(code, verdict, text, report.to_dict())


def cmd_deps(args) -> CommandResult:
    schema = parse_file(args.file)
    deps = analysis.dependence_graph(schema)
    if args.dot:
        text = analysis.dependence_dot(schema, deps)
    else:
        lines = [f"{l} ⊩ {m}" for l, m in sorted(deps.perc)]
        lines += [f"{l} ⊩-final {v}" for l, v in sorted(deps.perc_final)]
        lines += [f"{p} cont {x} ({part})" for p, x, part in sorted(deps.cont)]
        text = "\n".join(lines)
    payload = {"perc": sorted(map(list, deps.perc)),
               "perc_final": sorted(map(list, deps.perc_final)),
               "cont": sorted(map(list, deps.cont))}
    return CommandResult(EXIT_OK, "ok", text, payload)


def cmd_need(args) -> CommandResult:
    schema = parse_file(args.file)
    labels = sorted(analysis.need(schema, _criterion(args)).labels)
    return CommandResult(EXIT_OK, "ok", " ".join(labels),
                         {"criterion": str(_criterion(args)), "labels": labels})


def cmd_slice(args) -> CommandResult:
    schema = parse_file(args.file)
    text = print_schema(analysis.weiser_slice(schema, _criterion(args)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return CommandResult(EXIT_OK, "ok", "" if args.out else text, {"text": text})


def _verdict_result(verdict) -> CommandResult:
    if isinstance(verdict, semantics.VerifiedUpToBound):
        return CommandResult(EXIT_OK, "verified", f"VerifiedUpToBound (fuel {verdict.bound}, "
                             f"{verdict.branches} terminating branches)", verdict.to_dict())
    if isinstance(verdict, semantics.Inconclusive):
        return CommandResult(EXIT_OPEN, "inconclusive", f"Inconclusive: {verdict.reason}",
                             verdict.to_dict())
    text = "\n".join(["Counterexample", "oracle:", _oracle_text(verdict.oracle),
                      f"S: {_outcome_text(verdict.s_outcome)}",
                      f"T: {_outcome_text(verdict.t_outcome)}"])
    return CommandResult(EXIT_FOUND, "counterexample", text, verdict.to_dict())


def cmd_check_slice(args) -> CommandResult:
    s_schema = parse_file(args.original)
    t_schema = parse_file(args.candidate)
    if not is_subschema(t_schema, s_schema):
        aligned = align_subschema(t_schema, s_schema)
        if aligned is None:
            raise SchemaError(f"{args.candidate} is not a subschema of {args.original}")
        t_schema = aligned
    verdict = semantics.check_slice(s_schema, t_schema, _criterion(args), args.fuel,
                                    check_fuel=args.check_fuel)
    return _verdict_result(verdict)


def cmd_find_couple(args) -> CommandResult:
    schema = parse_file(args.file)
    witness = semantics.find_couple(schema, args.pred, _criterion(args), args.fuel)
    if witness is None:
        return CommandResult(EXIT_OPEN, "not_found", "no couple found up to bound",
                             {"fuel": args.fuel})
    text = "\n".join([f"couple on {witness.term} (base value {str(witness.base[witness.term]).lower()})",
                      "base oracle i:", _oracle_text(witness.base),
                      f"i: {_outcome_text(witness.outcome_i)}",
                      f"j: {_outcome_text(witness.outcome_j)}",
                      f"head: {witness.head}",
                      f"tail(i): {witness.tail_i}", f"tail(j): {witness.tail_j}"])
    return CommandResult(EXIT_OK, "found", text, witness.to_dict())


def _report_text(report) -> str:
    lines = [f"examined {report.examined} subschemas at fuel {report.fuel}"]
    for t in report.minimal:
        lines.append("minimal verified slice:")
        lines.extend("  " + l for l in print_schema(t).splitlines())
    lines.append(f"weiser slice ({report.weiser_verdict.kind}):")
    lines.extend("  " + l for l in print_schema(report.weiser).splitlines())
    if report.inconclusive:
        lines.append(f"{len(report.inconclusive)} inconclusive subschema(s)")
    return "\n".join(lines)


def cmd_min_slice(args) -> CommandResult:
    schema = parse_file(args.file)
    try:
        report = semantics.minimal_slices(schema, _criterion(args), args.fuel, args.budget)
    except semantics.BudgetExhausted as exc:
        return CommandResult(EXIT_OPEN, "budget_exhausted",
                             "budget exhausted; partial report\n" + _report_text(exc.report),
                             exc.report.to_dict())
    return CommandResult(EXIT_OK, "ok", _report_text(report), report.to_dict())


def cmd_run(args) -> CommandResult:
    schema = parse_file(args.file)
    oracle = parse_oracle_file(args.oracle) if args.oracle else semantics.PredicateOracle({}, False)
    outcome = semantics.run(schema, oracle, args.fuel, detect_cycles=args.detect_cycles)
    code = EXIT_OPEN if isinstance(outcome, semantics.FuelExhausted) else EXIT_OK
    return CommandResult(code, outcome.kind, _outcome_text(outcome), outcome.to_dict())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schemaslice", description="Slicing of program schemas.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(fn=fn)
        return p

    def fuel(p):
        p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="letter budget per run")

    p = add("parse", cmd_parse, "parse and print with all labels")
    p.add_argument("file")
    p = add("fmt", cmd_fmt, "print in canonical form")
    p.add_argument("file")
    p = add("classify", cmd_classify, "linearity, free and liberal, special")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="render the witness segment as DOT")
    p = add("deps", cmd_deps, "control and data dependence")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="render as DOT")
    p = add("need", cmd_need, "Weiser's need set")
    p.add_argument("file")
    _criterion_flags(p)
    p = add("slice", cmd_slice, "Weiser slice")
    p.add_argument("file")
    _criterion_flags(p)
    p.add_argument("--out", help="write the slice to this file")
    p = add("check-slice", cmd_check_slice, "bounded slice check of CANDIDATE against ORIGINAL")
    p.add_argument("original")
    p.add_argument("candidate")
    _criterion_flags(p)
    fuel(p)
    p.add_argument("--check-fuel", type=int, default=None,
                   help="fuel for replaying the other schema (default twice --fuel)")
    p = add("find-couple", cmd_find_couple, "search for a predicate couple")
    p.add_argument("file")
    p.add_argument("--pred", required=True)
    _criterion_flags(p)
    fuel(p)
    p = add("min-slice", cmd_min_slice, "minimal verified slices")
    p.add_argument("file")
    _criterion_flags(p)
    fuel(p)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subschemas checked")
    p = add("run", cmd_run, "execute under an oracle file")
    p.add_argument("file")
    p.add_argument("--oracle", help="oracle file (default: every predicate false)")
    p.add_argument("--detect-cycles", action="store_true",
                   help="report divergence when a loop state repeats")
    fuel(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.fn(args)
    except (SchemaError, OSError, ValueError) as exc:
        span = getattr(exc, "span", None)
        if args.json:
            body = {"verdict": "error", "message": str(exc)}
            if span is not None:
                body["span"] = {"file": span.file, "line": span.line, "column": span.column}
            print(json.dumps(body, indent=2))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return result.emit(args.json)


if __name__ == "__main__":
    sys.exit(main())
