"""Labelled schema syntax trees, symbol bookkeeping and the subschema lattice.

A schema is built from ``Skip``, ``Assign``, ``If``, ``While`` and ``Seq``
nodes.  Every assignment and predicate occurrence carries a label that is
unique within its schema; labels are what slicing operates on.  Nodes are
frozen dataclasses, so structurally equal trees compare equal (source spans
and the "label was written explicitly" flag are excluded from comparison).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class _Omega:
    """The termination slicing criterion."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OMEGA"

    def __str__(self):
        return "ω"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()

#: A slicing criterion: a variable name or ``OMEGA``.
Criterion = Union[str, _Omega]


# -- errors -----------------------------------------------------------------


class SchemaError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SchemaError):
    """A well-formedness violation.  ``violations`` lists every problem found."""

    def __init__(self, message: str, label: Optional[str] = None):
        super().__init__(message)
        self.label = label
        self.violations: list[ValidationError] = [self]


class ArityMismatch(ValidationError):
    pass


class DuplicateLabel(ValidationError):
    pass


class KindConflict(ValidationError):
    pass


class MalformedSchema(ValidationError):
    pass


class NotControlClosed(SchemaError):
    def __init__(self, label: str, controller: str):
        super().__init__(
            f"label {label!r} is kept but its controlling predicate {controller!r} is not"
        )
        self.label = label
        self.controller = controller


class NotASubschema(SchemaError):
    pass


# -- syntax tree --------------------------------------------------------------


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str  # "function" | "predicate"
    arity: int

    def __str__(self):
        return f"{self.name}/{self.arity}"


class Schema:
    """Common base of all schema nodes."""

    __slots__ = ()

    def statements(self) -> tuple:
        """The top-level statement list (empty for ``Skip``)."""
        return ()


@dataclass(frozen=True)
class Skip(Schema):
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def statements(self):
        return ()


@dataclass(frozen=True)
class Assign(Schema):
    target: str
    fn: str
    args: tuple
    label: str
    explicit: bool = field(default=False, compare=False, repr=False)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.fn, "function", len(self.args))

    def statements(self):
        return (self,)


@dataclass(frozen=True)
class If(Schema):
    pred: str
    args: tuple
    then: Schema
    orelse: Schema
    label: str
    explicit: bool = field(default=False, compare=False, repr=False)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.pred, "predicate", len(self.args))

    def statements(self):
        return (self,)


@dataclass(frozen=True)
class While(Schema):
    pred: str
    args: tuple
    body: Schema
    label: str
    explicit: bool = field(default=False, compare=False, repr=False)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.pred, "predicate", len(self.args))

    def statements(self):
        return (self,)


@dataclass(frozen=True)
class Seq(Schema):
    children: tuple

    def statements(self):
        return self.children


Statement = Union[Assign, If, While]


def seq(*parts: Schema) -> Schema:
    """Build a schema in canonical form from a sequence of parts.

    Nested sequences are flattened and ``Skip`` parts dropped; zero parts give
    ``Skip`` and a single part is returned unwrapped.
    """
    flat: list = []
    for part in parts:
        flat.extend(part.statements())
    if not flat:
        return Skip()
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


def walk(schema: Schema) -> Iterator[Statement]:
    """Pre-order traversal of the labelled statements of ``schema``."""
    for stmt in schema.statements():
        yield stmt
        if isinstance(stmt, If):
            yield from walk(stmt.then)
            yield from walk(stmt.orelse)
        elif isinstance(stmt, While):
            yield from walk(stmt.body)


def labels(schema: Schema) -> list[str]:
    """All labels in pre-order; this is ``lsym`` as an ordered list."""
    return [stmt.label for stmt in walk(schema)]


def lsym(schema: Schema) -> frozenset:
    return frozenset(labels(schema))


def variables(schema: Schema) -> list[str]:
    """Variables mentioned anywhere in ``schema``, in order of first mention."""
    seen: dict = {}
    for stmt in walk(schema):
        if isinstance(stmt, Assign):
            seen.setdefault(stmt.target, None)
        for a in stmt.args:
            seen.setdefault(a, None)
    return list(seen)


def auto_labels(schema: Schema) -> list[str]:
    """The labels the parser would assign to each occurrence, in pre-order.

    A symbol occurring once is labelled by its name; the ``k``-th of several
    occurrences of ``g`` is labelled ``g.k``.
    """
    names = [stmt.fn if isinstance(stmt, Assign) else stmt.pred for stmt in walk(schema)]
    counts = Counter(names)
    seen: Counter = Counter()
    out = []
    for name in names:
        seen[name] += 1
        out.append(name if counts[name] == 1 else f"{name}.{seen[name]}")
    return out


def fill_labels(schema: Schema) -> Schema:
    """Give every unlabelled occurrence its automatic label."""
    fresh = iter(auto_labels(schema))

    def go(part: Schema) -> Schema:
        out = []
        for stmt in part.statements():
            auto = next(fresh)
            lab = stmt.label if stmt.label is not None else auto
            if isinstance(stmt, Assign):
                out.append(Assign(stmt.target, stmt.fn, stmt.args, lab, stmt.explicit, stmt.span))
            elif isinstance(stmt, If):
                then, orelse = go(stmt.then), go(stmt.orelse)
                out.append(If(stmt.pred, stmt.args, then, orelse, lab, stmt.explicit, stmt.span))
            else:
                out.append(While(stmt.pred, stmt.args, go(stmt.body), lab, stmt.explicit,
                                 stmt.span))
        return seq(*out)

    return go(schema)


# -- symbol table -------------------------------------------------------------


@dataclass(frozen=True)
class Occurrence:
    label: str
    symbol: Symbol
    node: Statement
    # (predicate label, part) from outermost to innermost; part is
    # "true" | "false" | "body"
    controllers: tuple


@dataclass(frozen=True)
class SymbolTable:
    functions: frozenset
    predicates: frozenset
    occurrences: dict  # label -> Occurrence, in pre-order

    @property
    def lsym(self) -> frozenset:
        return frozenset(self.occurrences)

    @property
    def lfunc(self) -> frozenset:
        return frozenset(l for l, o in self.occurrences.items() if o.symbol.kind == "function")

    @property
    def lpred(self) -> frozenset:
        return frozenset(l for l, o in self.occurrences.items() if o.symbol.kind == "predicate")

    @property
    def lifpred(self) -> frozenset:
        return frozenset(l for l, o in self.occurrences.items() if isinstance(o.node, If))

    @property
    def lwhipred(self) -> frozenset:
        return frozenset(l for l, o in self.occurrences.items() if isinstance(o.node, While))

    @property
    def symbols(self) -> frozenset:
        return self.functions | self.predicates

    def symbol_of(self, label: str) -> Symbol:
        return self.occurrences[label].symbol


def _occurrences(schema: Schema, chain: tuple = ()) -> Iterator[tuple]:
    for stmt in schema.statements():
        yield stmt, chain
        if isinstance(stmt, If):
            yield from _occurrences(stmt.then, chain + ((stmt.label, "true"),))
            yield from _occurrences(stmt.orelse, chain + ((stmt.label, "false"),))
        elif isinstance(stmt, While):
            yield from _occurrences(stmt.body, chain + ((stmt.label, "body"),))


def _check_canonical(schema: Schema, problems: list) -> None:
    if isinstance(schema, Seq):
        if len(schema.children) < 2:
            problems.append(MalformedSchema("sequence with fewer than two children"))
        for child in schema.children:
            if isinstance(child, (Seq, Skip)):
                problems.append(MalformedSchema("sequence child is a sequence or skip"))
            _check_canonical(child, problems)
    elif isinstance(schema, If):
        _check_canonical(schema.then, problems)
        _check_canonical(schema.orelse, problems)
    elif isinstance(schema, While):
        _check_canonical(schema.body, problems)


def validate(schema: Schema) -> SymbolTable:
    """Check well-formedness and return the symbol table.

    Raises the first violation found; all violations are available on its
    ``violations`` attribute.
    """
    problems: list = []
    _check_canonical(schema, problems)
    if problems:
        # occurrences are only well defined on canonical trees
        problems[0].violations = problems
        raise problems[0]
    arity: dict = {}
    kind: dict = {}
    occ: dict = {}
    for stmt, chain in _occurrences(schema):
        sym = stmt.symbol
        if stmt.label in occ:
            problems.append(DuplicateLabel(f"duplicate label {stmt.label!r}", stmt.label))
        else:
            occ[stmt.label] = Occurrence(stmt.label, sym, stmt, chain)
        if sym.name in kind and kind[sym.name] != sym.kind:
            problems.append(
                KindConflict(
                    f"{sym.name!r} used as both function and predicate (at {stmt.label!r})",
                    stmt.label,
                )
            )
        elif sym.name in arity and arity[sym.name] != sym.arity:
            problems.append(
                ArityMismatch(
                    f"{sym.name!r} used with arity {sym.arity} at {stmt.label!r}, "
                    f"earlier with arity {arity[sym.name]}",
                    stmt.label,
                )
            )
        kind.setdefault(sym.name, sym.kind)
        arity.setdefault(sym.name, sym.arity)
    if problems:
        first = problems[0]
        first.violations = problems
        raise first
    functions = frozenset(o.symbol for o in occ.values() if o.symbol.kind == "function")
    predicates = frozenset(o.symbol for o in occ.values() if o.symbol.kind == "predicate")
    return SymbolTable(functions, predicates, occ)


# -- subschemas -----------------------------------------------------------------


def _stmt_is_sub(cand: Statement, parent: Statement) -> bool:
    if type(cand) is not type(parent) or cand.label != parent.label:
        return False
    if isinstance(cand, Assign):
        return cand == parent
    if cand.pred != parent.pred or cand.args != parent.args:
        return False
    if isinstance(cand, If):
        return is_subschema(cand.then, parent.then) and is_subschema(cand.orelse, parent.orelse)
    return is_subschema(cand.body, parent.body)


def is_subschema(candidate: Schema, parent: Schema) -> bool:
    """True iff ``candidate`` arises from ``parent`` by deleting statements.

    Occurrences are matched by label, so the candidate's statements must form
    an order-preserving subsequence of the parent's at every nesting level.
    """
    pos = 0
    pstmts = parent.statements()
    for stmt in candidate.statements():
        while pos < len(pstmts) and pstmts[pos].label != stmt.label:
            pos += 1
        if pos == len(pstmts) or not _stmt_is_sub(stmt, pstmts[pos]):
            return False
        pos += 1
    return True


def _embed_stmt(cand: Statement, parent: Statement) -> Optional[Statement]:
    if type(cand) is not type(parent):
        return None
    if isinstance(cand, Assign):
        same = (cand.target, cand.fn, cand.args) == (parent.target, parent.fn, parent.args)
        return parent if same else None
    if cand.pred != parent.pred or cand.args != parent.args:
        return None
    if isinstance(cand, If):
        then = align_subschema(cand.then, parent.then)
        orelse = align_subschema(cand.orelse, parent.orelse) if then is not None else None
        if orelse is None:
            return None
        return If(parent.pred, parent.args, then, orelse, parent.label, parent.explicit, parent.span)
    body = align_subschema(cand.body, parent.body)
    if body is None:
        return None
    return While(parent.pred, parent.args, body, parent.label, parent.explicit, parent.span)


def align_subschema(candidate: Schema, parent: Schema) -> Optional[Schema]:
    """Relabel ``candidate`` as a subschema of ``parent``, ignoring its labels.

    Statements are embedded structurally, leftmost match first, backtracking
    when a later statement fails to fit.  Returns ``None`` if no embedding
    exists.
    """
    cstmts, pstmts = candidate.statements(), parent.statements()

    def go(i: int, j: int) -> Optional[list]:
        if i == len(cstmts):
            return []
        for k in range(j, len(pstmts)):
            hit = _embed_stmt(cstmts[i], pstmts[k])
            if hit is not None:
                rest = go(i + 1, k + 1)
                if rest is not None:
                    return [hit] + rest
        return None

    found = go(0, 0)
    return None if found is None else seq(*found)


def delete_symbols(schema: Schema, keep) -> Schema:
    """The unique subschema whose labelled symbols are exactly ``keep``.

    ``keep`` must be closed under control: a kept label nested inside a
    predicate requires the predicate to be kept too.
    """
    keep = frozenset(keep)
    unknown = keep - lsym(schema)
    if unknown:
        raise SchemaError(f"unknown labels: {sorted(unknown)}")

    def dropped(part: Schema, controller: str) -> None:
        for stmt in walk(part):
            if stmt.label in keep:
                raise NotControlClosed(stmt.label, controller)

    def go(part: Schema) -> Schema:
        out = []
        for stmt in part.statements():
            if stmt.label not in keep:
                if isinstance(stmt, If):
                    dropped(stmt.then, stmt.label)
                    dropped(stmt.orelse, stmt.label)
                elif isinstance(stmt, While):
                    dropped(stmt.body, stmt.label)
                continue
            if isinstance(stmt, If):
                stmt = If(stmt.pred, stmt.args, go(stmt.then), go(stmt.orelse),
                          stmt.label, stmt.explicit, stmt.span)
            elif isinstance(stmt, While):
                stmt = While(stmt.pred, stmt.args, go(stmt.body), stmt.label,
                             stmt.explicit, stmt.span)
            out.append(stmt)
        return seq(*out)

    return go(schema)


def _count(stmts: tuple) -> int:
    return sum(1 for s in stmts for _ in walk(s))


def _closed_sets_exact(stmts: tuple, k: int) -> Iterator[tuple]:
    """Control-closed label sets of exactly ``k`` labels from a statement list."""
    if k == 0:
        yield ()
        return
    if not stmts:
        return
    head, rest = stmts[0], stmts[1:]
    # sets that delete the head come first
    yield from _closed_sets_exact(rest, k)
    for inner in _closed_stmt_exact(head, k):
        yield from (inner + tail for tail in _closed_sets_exact(rest, k - len(inner)))


def _closed_stmt_exact(stmt: Statement, k: int) -> Iterator[tuple]:
    # sets of size 1..k that keep stmt itself
    if isinstance(stmt, Assign):
        if k >= 1:
            yield (stmt.label,)
        return
    if k < 1:
        return
    parts = (stmt.then, stmt.orelse) if isinstance(stmt, If) else (stmt.body,)
    inner = tuple(s for p in parts for s in p.statements())
    for size in range(0, min(k - 1, _count(inner)) + 1):
        for sub in _closed_sets_exact(inner, size):
            yield (stmt.label,) + sub


def enumerate_subschemas(schema: Schema) -> Iterator[Schema]:
    """Every subschema of ``schema`` exactly once, smallest label sets first.

    Subschemas correspond one-to-one with control-closed label sets, which
    are generated lazily size by size in a fixed order.
    """
    stmts = schema.statements()
    total = _count(stmts)
    for k in range(total + 1):
        for keep in _closed_sets_exact(stmts, k):
            yield delete_symbols(schema, keep)
