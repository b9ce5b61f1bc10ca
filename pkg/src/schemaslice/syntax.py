"""Concrete syntax for schemas, terms and predicate-oracle files.

Schema grammar::

    schema := stmt*
    stmt   := "skip" ";"
            | IDENT ":=" IDENT label? "(" args? ")" ";"
            | "if" IDENT label? "(" args? ")" block ("else" block)?
            | "while" IDENT label? "(" args? ")" block
    block  := "{" stmt* "}"
    args   := IDENT ("," IDENT)*
    label  := "@" LABEL

Line comments start with ``//``.  Unlabelled occurrences get automatic labels
(see :func:`schemaslice.core.auto_labels`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .core import (
    Assign,
    If,
    Schema,
    SchemaError,
    Skip,
    SourceSpan,
    While,
    auto_labels,
    fill_labels,
    seq,
    validate,
)
from .semantics import PredicateOracle
from .terms import PredTerm, Term, app, pred_term, var

KEYWORDS = {"skip", "if", "else", "while"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<assign>:=)
  | (?P<label>@[A-Za-z0-9_.]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),;{}=])
    """,
    re.VERBOSE,
)


class SchemaSyntaxError(SchemaError):
    def __init__(self, span: SourceSpan, expected, found: str):
        self.span = span
        self.expected = frozenset(expected)
        self.found = found
        want = " or ".join(sorted(self.expected))
        super().__init__(f"{span}: expected {want}, found {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "kw" | "label" | "punct" | "eof"
    text: str
    span: SourceSpan

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        span = SourceSpan(file, line, col)
        if m is None:
            raise SchemaSyntaxError(span, {"a token"}, repr(text[pos]))
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            col += len(tok)
        pos = m.end()
        if kind in ("ws", "nl", "comment"):
            continue
        if kind == "ident" and tok in KEYWORDS:
            kind = "kw"
        elif kind in ("assign", "punct"):
            kind = "punct"
        out.append(Token(kind, tok, span))
    out.append(Token("eof", "", SourceSpan(file, line, col)))
    return out


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected):
        raise SchemaSyntaxError(self.tok.span, expected, self.tok.describe())

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("punct", "kw") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            self.fail({repr(text)})
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "ident":
            self.fail({"identifier"})
        self.i += 1
        return tok

    def label(self) -> Optional[str]:
        if self.tok.kind == "label":
            self.i += 1
            return self.toks[self.i - 1].text[1:]
        return None

    def call_args(self) -> tuple:
        self.expect("(")
        args = []
        if self.tok.kind == "ident":
            args.append(self.ident().text)
            while self.accept(","):
                args.append(self.ident().text)
        self.expect(")")
        return tuple(args)

    def stmts(self, closer: str) -> list:
        out = []
        while not (self.tok.kind == "eof" if closer == "eof" else
                   (self.tok.kind == "punct" and self.tok.text == closer)):
            out.append(self.stmt())
        return out

    def block(self) -> Schema:
        self.expect("{")
        body = self.stmts("}")
        self.expect("}")
        return seq(*body)

    def stmt(self) -> Schema:
        tok = self.tok
        if self.accept("skip"):
            self.expect(";")
            return Skip(tok.span)
        if self.accept("if") or self.accept("while"):
            name = self.ident().text
            lab = self.label()
            args = self.call_args()
            if tok.text == "while":
                return While(name, args, self.block(), lab, lab is not None, tok.span)
            then = self.block()
            orelse = self.block() if self.accept("else") else Skip()
            return If(name, args, then, orelse, lab, lab is not None, tok.span)
        if tok.kind == "ident":
            target = self.ident().text
            self.expect(":=")
            fn = self.ident().text
            lab = self.label()
            args = self.call_args()
            self.expect(";")
            return Assign(target, fn, args, lab, lab is not None, tok.span)
        self.fail({"statement"})


def parse(text: str, file: str = "<string>") -> Schema:
    """Parse and validate schema source text."""
    p = _Parser(tokenize(text, file))
    body = seq(*p.stmts("eof"))
    schema = fill_labels(body)
    validate(schema)
    return schema


def parse_file(path) -> Schema:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


# -- printing --------------------------------------------------------------------


def print_schema(schema: Schema, labels: bool = False) -> str:
    """Canonical text: two-space indentation, one statement per line.

    A label is written when it was explicit in the source, when it differs
    from the automatic label, or always if ``labels`` is true.
    """
    autos = iter(auto_labels(schema))
    lines: list[str] = []

    def tag(stmt) -> str:
        auto = next(autos)
        if labels or stmt.explicit or stmt.label != auto:
            return f"@{stmt.label}"
        return ""

    def emit(part: Schema, depth: int) -> None:
        pad = "  " * depth
        stmts = part.statements()
        if not stmts:
            lines.append(pad + "skip;")
            return
        for stmt in stmts:
            args = ", ".join(stmt.args)
            if isinstance(stmt, Assign):
                lines.append(f"{pad}{stmt.target} := {stmt.fn}{tag(stmt)}({args});")
            elif isinstance(stmt, While):
                lines.append(f"{pad}while {stmt.pred}{tag(stmt)}({args}) {{")
                emit(stmt.body, depth + 1)
                lines.append(pad + "}")
            else:
                lines.append(f"{pad}if {stmt.pred}{tag(stmt)}({args}) {{")
                emit(stmt.then, depth + 1)
                if stmt.orelse.statements():
                    lines.append(pad + "} else {")
                    emit(stmt.orelse, depth + 1)
                lines.append(pad + "}")

    emit(schema, 0)
    return "\n".join(lines) + "\n"


# -- terms and oracle files ------------------------------------------------------


def _term(p: _Parser) -> Term:
    name = p.ident().text
    if p.tok.kind == "punct" and p.tok.text == "(":
        p.expect("(")
        args = []
        if not (p.tok.kind == "punct" and p.tok.text == ")"):
            args.append(_term(p))
            while p.accept(","):
                args.append(_term(p))
        p.expect(")")
        return app(name, args)
    return var(name)


def parse_term(text: str) -> Term:
    """Parse a term; identifiers not followed by ``(`` are variables."""
    p = _Parser(tokenize(text))
    t = _term(p)
    if p.tok.kind != "eof":
        p.fail({"end of input"})
    return t


def parse_pred_term(text: str) -> PredTerm:
    t = parse_term(text)
    if t.is_var:
        raise SchemaSyntaxError(SourceSpan("<string>", 1, 1), {"predicate application"}, repr(text))
    return pred_term(t.fn, t.args)


def _bool(text: str, span: SourceSpan) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise SchemaSyntaxError(span, {"'true'", "'false'"}, repr(text))


def parse_oracle(text: str, file: str = "<string>") -> PredicateOracle:
    """Parse lines ``PREDTERM = true|false`` plus an optional ``default`` line."""
    entries: dict = {}
    default = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        span = SourceSpan(file, lineno, 1)
        lhs, eq, rhs = line.rpartition("=")
        if not eq:
            raise SchemaSyntaxError(span, {"'='"}, repr(line))
        lhs, value = lhs.strip(), _bool(rhs.strip(), span)
        if lhs == "default":
            default = value
            continue
        try:
            pt = parse_pred_term(lhs)
        except SchemaSyntaxError as exc:
            raise SchemaSyntaxError(span, exc.expected, exc.found) from None
        if entries.get(pt, value) != value:
            raise SchemaSyntaxError(span, {"a consistent value"}, f"conflicting entry for {pt}")
        entries[pt] = value
    return PredicateOracle(entries, default)


def parse_oracle_file(path) -> PredicateOracle:
    with open(path, encoding="utf-8") as fh:
        return parse_oracle(fh.read(), str(path))


def format_oracle(oracle: PredicateOracle) -> str:
    lines = []
    if oracle.default is not None:
        lines.append(f"default = {str(oracle.default).lower()}")
    for pt, value in oracle.items():
        lines.append(f"{pt} = {str(value).lower()}")
    return "\n".join(lines) + "\n"
