"""The alphabet of a schema, paths and path-segments, Herbrand evaluation.

A schema is compiled once into a :class:`FlowGraph` whose nodes are the
labelled statements.  Because labels are unique a control position is just a
label (or :data:`EXIT`), and the letters that may follow a position are read
off the node: one assignment letter, or the true/false pair of a predicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Union

from .core import Assign, If, Schema, SchemaError, seq, validate, walk
from .terms import HerbrandState, PredTerm, app, pred_term, var

EXIT = None


@dataclass(frozen=True)
class AssignLetter:
    label: str
    fn: str
    target: str
    args: tuple

    @property
    def symbol(self) -> str:
        return self.fn

    def __str__(self):
        return f"<{self.target}:={self.fn}({','.join(self.args)})>"


@dataclass(frozen=True)
class PredLetter:
    label: str
    pred: str
    args: tuple
    branch: bool

    @property
    def symbol(self) -> str:
        return self.pred

    def __str__(self):
        return f"<{self.pred}({','.join(self.args)}),{'T' if self.branch else 'F'}>"


Letter = Union[AssignLetter, PredLetter]


def letter_to_dict(letter: Letter) -> dict:
    if isinstance(letter, AssignLetter):
        return {"label": letter.label, "assign": letter.target, "fn": letter.fn,
                "args": list(letter.args)}
    return {"label": letter.label, "pred": letter.pred, "args": list(letter.args),
            "branch": letter.branch}


@dataclass
class Node:
    label: str
    kind: str  # "assign" | "if" | "while"
    stmt: object
    next: Optional[str] = None
    true_next: Optional[str] = None
    false_next: Optional[str] = None
    letters: tuple = ()


class FlowGraph:
    """Control-flow graph of a schema with one node per labelled statement."""

    def __init__(self, schema: Schema):
        self.schema = schema
        self.table = validate(schema)
        self.nodes: dict[str, Node] = {}
        self.entry = self._compile(schema, EXIT)
        self.order = [s.label for s in walk(schema)]
        for node in self.nodes.values():
            st = node.stmt
            if node.kind == "assign":
                node.letters = (AssignLetter(st.label, st.fn, st.target, st.args),)
            else:
                node.letters = (PredLetter(st.label, st.pred, st.args, True),
                                PredLetter(st.label, st.pred, st.args, False))

    def _compile(self, schema: Schema, cont: Optional[str]) -> Optional[str]:
        nxt = cont
        for stmt in reversed(schema.statements()):
            if isinstance(stmt, Assign):
                self.nodes[stmt.label] = Node(stmt.label, "assign", stmt, next=nxt)
            elif isinstance(stmt, If):
                node = Node(stmt.label, "if", stmt)
                self.nodes[stmt.label] = node
                node.true_next = self._compile(stmt.then, nxt)
                node.false_next = self._compile(stmt.orelse, nxt)
            else:
                node = Node(stmt.label, "while", stmt)
                self.nodes[stmt.label] = node
                node.true_next = self._compile(stmt.body, stmt.label)
                node.false_next = nxt
            nxt = stmt.label
        return nxt

    def letters_at(self, pos: Optional[str]) -> tuple:
        return () if pos is EXIT else self.nodes[pos].letters

    def target_of(self, letter: Letter) -> Optional[str]:
        """Position reached after consuming ``letter``."""
        node = self.nodes[letter.label]
        if node.kind == "assign":
            return node.next
        return node.true_next if letter.branch else node.false_next

    def successors(self, letter: Letter) -> tuple:
        return self.letters_at(self.target_of(letter))

    def alphabet(self) -> list:
        return [l for label in self.order for l in self.nodes[label].letters]


def alphabet(schema: Schema) -> list:
    """``Lang(S)``: one letter per assignment, two per predicate, pre-order."""
    return FlowGraph(schema).alphabet()


# -- path segments -------------------------------------------------------------


class InvalidSegment(SchemaError):
    pass


@dataclass(frozen=True)
class PathSegment:
    """A finite word that occurs as a factor of some path of ``origin``."""

    letters: tuple
    origin: Optional[Schema] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.origin is not None and self.letters:
            check_segment(FlowGraph(self.origin), self.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "PathSegment") -> "PathSegment":
        return PathSegment(self.letters + tuple(other.letters), self.origin)

    def __str__(self):
        return "".join(str(l) for l in self.letters) or "λ"

    def to_list(self) -> list:
        return [letter_to_dict(l) for l in self.letters]


def check_segment(graph: FlowGraph, letters: Sequence[Letter]) -> None:
    for letter in letters:
        if letter.label not in graph.nodes or letter not in graph.nodes[letter.label].letters:
            raise InvalidSegment(f"{letter} is not a letter of the schema")
    for a, b in zip(letters, letters[1:]):
        if b not in graph.successors(a):
            raise InvalidSegment(f"{b} cannot follow {a}")


def is_prefix(graph: FlowGraph, letters: Sequence[Letter]) -> bool:
    """True iff ``letters`` is in ``pre(Π(S))``."""
    pos = graph.entry
    for letter in letters:
        if letter not in graph.letters_at(pos):
            return False
        pos = graph.target_of(letter)
    return True


def schema_of(segment) -> Schema:
    """The predicate-free schema of the assignments along ``segment``."""
    return seq(*(Assign(l.target, l.fn, l.args, l.label)
                 for l in segment if isinstance(l, AssignLetter)))


def eval_segment(segment, initial: Optional[HerbrandState] = None) -> HerbrandState:
    """State after the assignments of ``segment``, starting from ``initial``."""
    state = initial if initial is not None else HerbrandState()
    env = {v: state[v] for v in state}
    _apply(segment, env)
    return HerbrandState(env)


def _apply(letters, env: dict) -> None:
    for l in letters:
        if isinstance(l, AssignLetter):
            env[l.target] = app(l.fn, [env.get(a) or var(a) for a in l.args])


def consequences(prefix) -> list:
    """``(predicate term, branch)`` for each predicate letter, evaluated from e."""
    env: dict = {}
    out = []
    for l in prefix:
        if isinstance(l, AssignLetter):
            env[l.target] = app(l.fn, [env.get(a) or var(a) for a in l.args])
        else:
            out.append((pred_term(l.pred, [env.get(a) or var(a) for a in l.args]), l.branch))
    return out


# -- cursors -----------------------------------------------------------------


class ChoiceRequired(SchemaError):
    pass


class ChoiceUnexpected(SchemaError):
    pass


class CursorFinished(SchemaError):
    pass


@dataclass(frozen=True)
class PathCursor:
    graph: FlowGraph = field(repr=False)
    position: Optional[str]
    state: HerbrandState
    letters: tuple = ()
    # variable -> label of the assignment that produced its current value
    origins: tuple = ()

    @property
    def finished(self) -> bool:
        return self.position is EXIT

    def next_letters(self) -> tuple:
        return self.graph.letters_at(self.position)

    def pending_term(self) -> Optional[PredTerm]:
        """The predicate term queried at the current position, if any."""
        if self.finished or self.graph.nodes[self.position].kind == "assign":
            return None
        st = self.graph.nodes[self.position].stmt
        return pred_term(st.pred, [self.state[a] for a in st.args])

    def origin_of(self, v: str) -> Optional[str]:
        return dict(self.origins).get(v)

    def segment(self) -> PathSegment:
        return PathSegment(self.letters)


def cursor_start(schema_or_graph) -> PathCursor:
    graph = schema_or_graph if isinstance(schema_or_graph, FlowGraph) else FlowGraph(schema_or_graph)
    return PathCursor(graph, graph.entry, HerbrandState())


def cursor_step(cursor: PathCursor, choice: Optional[bool] = None) -> PathCursor:
    """Consume one letter; ``choice`` selects the branch at a predicate."""
    if cursor.finished:
        raise CursorFinished("the cursor has reached the end of the schema")
    node = cursor.graph.nodes[cursor.position]
    if node.kind == "assign":
        if choice is not None:
            raise ChoiceUnexpected(f"no branch choice at assignment {node.label!r}")
        letter = node.letters[0]
        st = node.stmt
        value = app(st.fn, [cursor.state[a] for a in st.args])
        origins = dict(cursor.origins)
        origins[st.target] = st.label
        return PathCursor(cursor.graph, node.next, cursor.state.assign(st.target, value),
                          cursor.letters + (letter,), tuple(sorted(origins.items())))
    if choice is None:
        raise ChoiceRequired(f"predicate {node.label!r} needs a branch choice")
    letter = node.letters[0 if choice else 1]
    return PathCursor(cursor.graph, node.true_next if choice else node.false_next,
                      cursor.state, cursor.letters + (letter,), cursor.origins)


def run_choices(schema, choices: Sequence[bool], fuel: int = 10_000) -> PathCursor:
    """Drive a cursor to the end, taking predicate branches from ``choices``."""
    cur = cursor_start(schema)
    it = iter(choices)
    for _ in range(fuel):
        if cur.finished:
            break
        if cur.pending_term() is None:
            cur = cursor_step(cur)
        else:
            cur = cursor_step(cur, next(it))
    return cur


# -- segment enumeration ------------------------------------------------------


def by_symbol(name: str) -> Callable[[Letter], bool]:
    return lambda letter: letter.symbol == name


def enumerate_segments(
    schema,
    start: Optional[Callable[[Letter], bool]] = None,
    end: Optional[Callable[[Letter], bool]] = None,
    *,
    no_repeat: Optional[str] = None,
    max_length: Optional[int] = None,
    min_length: int = 1,
) -> Iterator[PathSegment]:
    """Path-segments whose first letter satisfies ``start`` and last ``end``.

    ``no_repeat`` restricts repetition of labelled symbols (both letters of a
    predicate count as one labelled symbol):

    * ``None``: no restriction, ``max_length`` is then required;
    * ``"segment"``: no labelled symbol occurs twice in the whole segment;
    * ``"ends"``: for a segment ``x μ y``, neither ``x μ`` nor ``μ y``
      repeats a labelled symbol (``x`` and ``y`` may share one).

    Segments are yielded depth-first from each start letter in alphabet order,
    true branches before false ones.
    """
    graph = schema if isinstance(schema, FlowGraph) else FlowGraph(schema)
    if no_repeat not in (None, "segment", "ends"):
        raise ValueError(f"unknown no_repeat mode {no_repeat!r}")
    if no_repeat is None and max_length is None:
        raise ValueError("unrestricted enumeration needs max_length")
    limit = max_length if max_length is not None else len(graph.nodes) + 1

    def extend(word: list, used: set, head: str) -> Iterator[PathSegment]:
        last = word[-1]
        if len(word) >= min_length and (end is None or end(last)):
            yield PathSegment(tuple(word))
        if len(word) >= limit:
            return
        if no_repeat == "ends" and len(word) > 1 and last.label == head:
            return  # y repeated x's labelled symbol; nothing may follow
        for nxt in graph.successors(last):
            repeat = nxt.label in used
            if repeat and (no_repeat == "segment" or (no_repeat == "ends" and nxt.label != head)):
                continue
            word.append(nxt)
            if not repeat:
                used.add(nxt.label)
            yield from extend(word, used, head)
            if not repeat:
                used.discard(nxt.label)
            word.pop()

    for first in graph.alphabet():
        if start is not None and not start(first):
            continue
        yield from extend([first], {first.label}, first.label)


def segment_dot(segment: PathSegment, name: str = "segment") -> str:
    """Render a segment as a DOT chain, one node per letter."""
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i, letter in enumerate(segment.letters):
        shape = "box" if isinstance(letter, AssignLetter) else "diamond"
        text = str(letter).replace('"', '\\"')
        lines.append(f'  n{i} [shape={shape}, label="{text}"];')
    for i in range(len(segment.letters) - 1):
        lines.append(f"  n{i} -> n{i + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"
