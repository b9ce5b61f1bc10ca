"""Oracle-driven Herbrand execution and bounded exhaustive search.

Functions always act freely on terms, so an interpretation is just a
predicate oracle: a map from predicate terms to booleans.  Executions start
from the natural state and spend one unit of fuel per letter consumed.

The search engine forks a partial oracle whenever a run queries a predicate
term it does not fix yet, true branch first.  Slice checks drive one schema
through every oracle branch and replay the other schema under the same
partial oracle, forking only on terms the driver never fixed.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import ClassVar, Iterator, Mapping, Optional, Union

from .core import OMEGA, NotASubschema, Schema, SchemaError, enumerate_subschemas, is_subschema, lsym
from .paths import EXIT, FlowGraph, PathSegment
from .terms import HerbrandState, PredTerm, app, pred_term

DEFAULT_STEPS = 2_000_000


class OracleIncomplete(SchemaError):
    def __init__(self, term: PredTerm):
        self.term = term
        super().__init__(f"oracle has no value for {term} and no default")


class FreenessViolation(AssertionError):
    """A path queried the same predicate term twice."""


class BudgetExhausted(SchemaError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"budget exhausted after {report.examined} subschemas")


class PredicateOracle(Mapping):
    """A partial map from predicate terms to booleans with an optional default.

    Iteration follows insertion order, which for explored oracles is the
    order in which terms were first queried.
    """

    def __init__(self, assignments: Optional[Mapping] = None, default: Optional[bool] = None):
        self._entries = dict(assignments or {})
        self.default = default

    def __getitem__(self, pt):
        return self._entries[pt]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        if isinstance(other, PredicateOracle):
            return self._entries == other._entries and self.default == other.default
        return NotImplemented

    def __hash__(self):
        return hash((frozenset(self._entries.items()), self.default))

    def __repr__(self):
        inner = ", ".join(f"{pt}: {v}" for pt, v in self._entries.items())
        return f"PredicateOracle({{{inner}}}, default={self.default})"

    def lookup(self, pt: PredTerm) -> bool:
        value = self._entries.get(pt)
        if value is not None:
            return value
        if self.default is None:
            raise OracleIncomplete(pt)
        return self.default

    def with_entry(self, pt: PredTerm, value: bool) -> "PredicateOracle":
        entries = dict(self._entries)
        entries[pt] = value
        return PredicateOracle(entries, self.default)

    def to_dict(self) -> dict:
        return {"entries": [[str(pt), v] for pt, v in self._entries.items()],
                "default": self.default}


# -- outcomes ----------------------------------------------------------------


@dataclass(frozen=True)
class Terminated:
    final: HerbrandState
    path: PathSegment
    kind: ClassVar[str] = "terminated"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "final": self.final.to_dict(), "path": self.path.to_list()}


@dataclass(frozen=True)
class FuelExhausted:
    prefix: PathSegment
    kind: ClassVar[str] = "fuel_exhausted"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "prefix": self.prefix.to_list()}


@dataclass(frozen=True)
class Diverged:
    """The run revisited a while predicate in an identical state."""

    prefix: PathSegment
    loop_at: str
    kind: ClassVar[str] = "diverged"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "prefix": self.prefix.to_list(), "loop_at": self.loop_at}


Outcome = Union[Terminated, FuelExhausted, Diverged]


# -- the execution engine -------------------------------------------------------

DONE, FUEL, FORK, CYCLE = "done", "fuel", "fork", "cycle"


class _OutOfBudget(Exception):
    pass


class _Work:
    __slots__ = ("steps", "limit")

    def __init__(self, limit: Optional[int]):
        self.steps = 0
        self.limit = limit

    def charge(self, k: int) -> None:
        self.steps += k
        if self.limit is not None and self.steps > self.limit:
            raise _OutOfBudget


class _Exec:
    """A partial run: the trail is a cons list of letters, newest first."""

    __slots__ = ("pos", "state", "n", "trail", "seen")

    def __init__(self, pos, state, n=0, trail=None, seen=frozenset()):
        self.pos = pos
        self.state = state
        self.n = n
        self.trail = trail
        self.seen = seen

    def letters(self) -> tuple:
        out = []
        cell = self.trail
        while cell is not None:
            out.append(cell[0])
            cell = cell[1]
        return tuple(reversed(out))


def _start(graph: FlowGraph) -> _Exec:
    return _Exec(graph.entry, HerbrandState())


def _advance(graph: FlowGraph, ex: _Exec, lookup, fuel: int, detect: bool,
             work: Optional[_Work] = None):
    """Run until the end, the fuel limit, a fresh predicate term or a cycle.

    ``lookup`` returns a boolean or ``None`` for an unfixed term.
    """
    pos, state, n, trail, seen = ex.pos, ex.state, ex.n, ex.trail, ex.seen
    nodes = graph.nodes
    pt = None
    while True:
        if pos is EXIT:
            status = DONE
            break
        if n >= fuel:
            status = FUEL
            break
        node = nodes[pos]
        st = node.stmt
        if node.kind == "assign":
            state = state.assign(st.target, app(st.fn, [state[a] for a in st.args]))
            trail = (node.letters[0], trail)
            n += 1
            pos = node.next
            continue
        if detect and node.kind == "while":
            key = (pos, state)
            if key in seen:
                status = CYCLE
                break
            seen = seen | {key}
        pt = pred_term(st.pred, [state[a] for a in st.args])
        value = lookup(pt)
        if value is None:
            status = FORK
            break
        trail = (node.letters[0 if value else 1], trail)
        n += 1
        pos = node.true_next if value else node.false_next
    if work is not None:
        work.charge(n - ex.n + 1)
    return _Exec(pos, state, n, trail, seen), status, pt


def _take(graph: FlowGraph, ex: _Exec, value: bool) -> _Exec:
    node = graph.nodes[ex.pos]
    nxt = node.true_next if value else node.false_next
    return _Exec(nxt, ex.state, ex.n + 1, (node.letters[0 if value else 1], ex.trail), ex.seen)


def _outcome(ex: _Exec, status: str) -> Outcome:
    seg = PathSegment(ex.letters())
    if status is DONE:
        return Terminated(ex.state, seg)
    if status is CYCLE:
        return Diverged(seg, ex.pos)
    return FuelExhausted(seg)


def _explore(graph: FlowGraph, fuel: int, oracle: Mapping, *, detect: bool,
             assert_free: bool = False, work: Optional[_Work] = None):
    """Leaves ``(entries, exec, status)`` of the execution tree, depth first."""
    stack = [(_start(graph), dict(oracle))]
    while stack:
        ex, entries = stack.pop()
        if assert_free:
            def lookup(pt, entries=entries):
                if pt in entries:
                    raise FreenessViolation(f"predicate term {pt} queried twice")
                return None
        else:
            lookup = entries.get
        ex, status, pt = _advance(graph, ex, lookup, fuel, detect, work)
        if status is FORK:
            other = dict(entries)
            other[pt] = False
            entries[pt] = True
            stack.append((_take(graph, ex, False), other))
            stack.append((_take(graph, ex, True), entries))
        else:
            yield entries, ex, status


def _graph(schema) -> FlowGraph:
    return schema if isinstance(schema, FlowGraph) else FlowGraph(schema)


def _check_fuel(fuel: int) -> None:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")


def run(schema, oracle: PredicateOracle, fuel: int, *, detect_cycles: bool = False) -> Outcome:
    """Execute deterministically under ``oracle`` for at most ``fuel`` letters."""
    _check_fuel(fuel)
    if not isinstance(oracle, PredicateOracle):
        oracle = PredicateOracle(oracle)
    graph = _graph(schema)
    ex, status, _ = _advance(graph, _start(graph), oracle.lookup, fuel, detect_cycles)
    return _outcome(ex, status)


def explore(schema, fuel: int, *, detect_cycles: bool = False,
            assert_free: bool = False) -> Iterator[tuple]:
    """Every maximal ``(oracle, outcome)`` pair of the bounded execution tree.

    With ``assert_free`` a :class:`FreenessViolation` is raised as soon as a
    path queries a predicate term it has already queried.
    """
    _check_fuel(fuel)
    for entries, ex, status in _explore(_graph(schema), fuel, {}, detect=detect_cycles,
                                        assert_free=assert_free):
        yield PredicateOracle(entries), _outcome(ex, status)


# -- slice verdicts --------------------------------------------------------------


@dataclass(frozen=True)
class VerifiedUpToBound:
    bound: int
    branches: int = 0
    kind: ClassVar[str] = "verified"

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "bound": self.bound, "branches": self.branches}


@dataclass(frozen=True)
class Counterexample:
    oracle: PredicateOracle
    s_outcome: Outcome
    t_outcome: Outcome
    s_fuel: int
    t_fuel: int
    kind: ClassVar[str] = "counterexample"

    def replay(self, s_schema, t_schema) -> bool:
        """Whether both recorded outcomes are reproduced exactly."""
        return (run(s_schema, self.oracle, self.s_fuel, detect_cycles=True) == self.s_outcome
                and run(t_schema, self.oracle, self.t_fuel, detect_cycles=True) == self.t_outcome)

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "oracle": self.oracle.to_dict(),
                "s_outcome": self.s_outcome.to_dict(), "t_outcome": self.t_outcome.to_dict(),
                "s_fuel": self.s_fuel, "t_fuel": self.t_fuel}


@dataclass(frozen=True)
class Inconclusive:
    bound: int
    reason: str
    kind: ClassVar[str] = "inconclusive"

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "bound": self.bound, "reason": self.reason}


SliceVerdict = Union[VerifiedUpToBound, Counterexample, Inconclusive]


class _Found(Exception):
    def __init__(self, entries, ex, status):
        self.entries, self.ex, self.status = entries, ex, status


def _live_table(graph: FlowGraph, at_exit) -> dict:
    from .analysis import live_variables

    return {k: tuple(sorted(v)) for k, v in live_variables(graph, at_exit).items()}


def _memo_key(ex: _Exec, entries: dict, live: dict, fuel_left: int, target) -> tuple:
    # Only oracle entries the rest of the run could still query matter: their
    # arguments must be buildable from the values of live variables.
    vals = tuple(ex.state[v] for v in live[ex.pos])
    have = {t.uid for t in vals}
    cache: dict = {}

    def buildable(t) -> bool:
        r = cache.get(t.uid)
        if r is None:
            r = t.uid in have or (not t.is_var and all(buildable(a) for a in t.args))
            cache[t.uid] = r
        return r

    relevant = frozenset((pt.uid, v) for pt, v in entries.items()
                         if all(buildable(a) for a in pt.args))
    return ex.pos, tuple(t.uid for t in vals), fuel_left, target, relevant


class _SliceSearch:
    """Joint bounded search for one original schema ``S`` and a criterion."""

    def __init__(self, s_schema: Schema, criterion, fuel: int,
                 check_fuel: Optional[int], max_steps: Optional[int],
                 stop_on_open: bool = False):
        _check_fuel(fuel)
        self.stop_on_open = stop_on_open
        self.s_schema = s_schema
        self.s_graph = FlowGraph(s_schema)
        self.criterion = criterion
        self.fuel = fuel
        self.check_fuel = 2 * fuel if check_fuel is None else check_fuel
        self.max_steps = max_steps
        self._s_leaves = None
        self._s_failed = False
        needed = 4 * max(self.fuel, self.check_fuel) + 1000
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)

    def _leaves(self, graph: FlowGraph, work: _Work) -> list:
        return [(entries, ex) for entries, ex, status
                in _explore(graph, self.fuel, {}, detect=True, work=work) if status is DONE]

    def s_leaves(self) -> Optional[list]:
        if self._s_leaves is None and not self._s_failed:
            try:
                self._s_leaves = self._leaves(self.s_graph, _Work(self.max_steps))
            except _OutOfBudget:
                self._s_failed = True
        return self._s_leaves

    def _checked(self, graph, live, memo, ex, entries, target, var, work) -> bool:
        ex, status, pt = _advance(graph, ex, entries.get, self.check_fuel, True, work)
        if status is DONE:
            if var is not None and ex.state[var].uid != target:
                raise _Found(entries, ex, status)
            return False
        if status is FUEL:
            return True
        if status is CYCLE:
            raise _Found(entries, ex, status)
        key = _memo_key(ex, entries, live, self.check_fuel - ex.n, target)
        hit = memo.get(key)
        if hit is not None:
            return hit
        inconclusive = False
        for value in (True, False):
            sub = dict(entries)
            sub[pt] = value
            inconclusive |= self._checked(graph, live, memo, _take(graph, ex, value), sub,
                                          target, var, work)
        memo[key] = inconclusive
        return inconclusive

    def _pass(self, leaves, checked: FlowGraph, var, work, driver_is_s: bool):
        """Replay ``checked`` against each terminated driver leaf."""
        live = _live_table(checked, () if var is None else (var,))
        memo: dict = {}
        open_branches = 0
        for entries, dex in leaves:
            target = None if var is None else dex.state[var].uid
            try:
                open_branches += self._checked(checked, live, memo, _start(checked), entries,
                                               target, var, work)
                if open_branches and self.stop_on_open:
                    break
            except _Found as found:
                d_out = _outcome(dex, DONE)
                c_out = _outcome(found.ex, found.status)
                oracle = PredicateOracle(found.entries, False)
                if driver_is_s:
                    return Counterexample(oracle, d_out, c_out, self.fuel, self.check_fuel)
                return Counterexample(oracle, c_out, d_out, self.check_fuel, self.fuel)
        return open_branches

    def check(self, t_schema: Schema) -> SliceVerdict:
        if not is_subschema(t_schema, self.s_schema):
            raise NotASubschema("candidate is not a subschema of the original")
        out_of_budget = Inconclusive(self.fuel, "search budget exhausted")
        s_leaves = self.s_leaves()
        if s_leaves is None:
            return out_of_budget
        t_graph = FlowGraph(t_schema)
        work = _Work(self.max_steps)
        var = None if self.criterion is OMEGA else self.criterion
        try:
            result = self._pass(s_leaves, t_graph, var, work, True)
            if isinstance(result, Counterexample):
                return result
            open_branches = result
            branches = len(s_leaves)
            if self.criterion is OMEGA and not (open_branches and self.stop_on_open):
                t_leaves = self._leaves(t_graph, work)
                result = self._pass(t_leaves, self.s_graph, None, work, False)
                if isinstance(result, Counterexample):
                    return result
                open_branches += result
                branches += len(t_leaves)
        except _OutOfBudget:
            return out_of_budget
        if open_branches:
            return Inconclusive(self.fuel, f"{open_branches} branch(es) ran out of fuel "
                                           f"in the checked schema")
        return VerifiedUpToBound(self.fuel, branches)


def check_u_slice(s_schema: Schema, t_schema: Schema, u: str, fuel: int, *,
                  check_fuel: Optional[int] = None,
                  max_steps: Optional[int] = DEFAULT_STEPS) -> SliceVerdict:
    """Bounded check that ``t_schema`` is a ``u``-slice of ``s_schema``.

    Every oracle branch on which S terminates within ``fuel`` letters is
    replayed on T with ``check_fuel`` letters (twice ``fuel`` by default).
    """
    return _SliceSearch(s_schema, u, fuel, check_fuel, max_steps).check(t_schema)


def check_omega_slice(s_schema: Schema, t_schema: Schema, fuel: int, *,
                      check_fuel: Optional[int] = None,
                      max_steps: Optional[int] = DEFAULT_STEPS) -> SliceVerdict:
    """Bounded two-sided termination agreement."""
    return _SliceSearch(s_schema, OMEGA, fuel, check_fuel, max_steps).check(t_schema)


def check_slice(s_schema, t_schema, criterion, fuel, **kw) -> SliceVerdict:
    if criterion is OMEGA:
        return check_omega_slice(s_schema, t_schema, fuel, **kw)
    return check_u_slice(s_schema, t_schema, criterion, fuel, **kw)


# -- couples -----------------------------------------------------------------


@dataclass(frozen=True)
class CoupleWitness:
    base: PredicateOracle
    flipped: PredicateOracle
    term: PredTerm
    criterion: object
    outcome_i: Outcome
    outcome_j: Outcome
    fuel: int
    head: PathSegment = field(default=PathSegment(()))
    tail_i: PathSegment = field(default=PathSegment(()))
    tail_j: PathSegment = field(default=PathSegment(()))

    def replay(self, schema) -> bool:
        return (run(schema, self.base, self.fuel, detect_cycles=True) == self.outcome_i
                and run(schema, self.flipped, self.fuel, detect_cycles=True) == self.outcome_j)

    def to_dict(self) -> dict:
        return {"verdict": "found", "term": str(self.term), "criterion": str(self.criterion),
                "base": self.base.to_dict(), "flipped": self.flipped.to_dict(),
                "outcome_i": self.outcome_i.to_dict(), "outcome_j": self.outcome_j.to_dict(),
                "head": self.head.to_list(), "tail_i": self.tail_i.to_list(),
                "tail_j": self.tail_j.to_list(), "fuel": self.fuel}


def _split(a: tuple, b: tuple) -> tuple:
    k = 0
    while k < len(a) and k < len(b) and a[k] == b[k]:
        k += 1
    return PathSegment(a[:k]), PathSegment(a[k:]), PathSegment(b[k:])


def find_couple(schema: Schema, pred: str, criterion, fuel: int, *,
                max_steps: Optional[int] = DEFAULT_STEPS) -> Optional[CoupleWitness]:
    """First oracle pair differing at one ``pred`` term that the criterion tells apart.

    Base oracles are explored in search order; each ``pred`` term a
    terminating base run queried is flipped, in query order.  Returns
    ``None`` when the bounded search finds nothing.
    """
    _check_fuel(fuel)
    graph = FlowGraph(schema)
    if pred not in {s.name for s in graph.table.predicates}:
        raise SchemaError(f"{pred!r} is not a predicate symbol of the schema")
    work = _Work(max_steps)
    try:
        for base, bex, status in _explore(graph, fuel, {}, detect=True, work=work):
            if status is not DONE:
                continue
            for pt in [pt for pt in base if pt.pred == pred]:
                flipped = dict(base)
                flipped[pt] = not base[pt]
                for jentries, jex, jstatus in _explore(graph, fuel, flipped, detect=True, work=work):
                    if criterion is OMEGA:
                        hit = jstatus is CYCLE
                    else:
                        hit = jstatus is DONE and jex.state[criterion] is not bex.state[criterion]
                    if not hit:
                        continue
                    i_full = dict(base)
                    for k, v in jentries.items():
                        i_full.setdefault(k, v)
                    j_full = dict(i_full)
                    j_full[pt] = not base[pt]
                    out_i, out_j = _outcome(bex, DONE), _outcome(jex, jstatus)
                    head, ti, tj = _split(out_i.path.letters, _path_of(out_j).letters)
                    return CoupleWitness(PredicateOracle(i_full, False),
                                         PredicateOracle(j_full, False), pt, criterion,
                                         out_i, out_j, fuel, head, ti, tj)
    except _OutOfBudget:
        return None
    return None


def _path_of(outcome: Outcome) -> PathSegment:
    return outcome.path if isinstance(outcome, Terminated) else outcome.prefix


# -- minimal slices -----------------------------------------------------------


@dataclass
class SliceReport:
    criterion: object
    fuel: int
    minimal: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    weiser: Optional[Schema] = None
    weiser_verdict: Optional[object] = None
    examined: int = 0

    def to_dict(self) -> dict:
        from .syntax import print_schema

        return {"criterion": str(self.criterion), "fuel": self.fuel,
                "minimal": [print_schema(t) for t in self.minimal],
                "inconclusive": [print_schema(t) for t in self.inconclusive],
                "weiser": None if self.weiser is None else print_schema(self.weiser),
                "weiser_verdict": None if self.weiser_verdict is None
                else self.weiser_verdict.to_dict(),
                "examined": self.examined}


def minimal_slices(schema: Schema, criterion, fuel: int, budget: int = 4096, *,
                   check_fuel: Optional[int] = None,
                   max_steps: Optional[int] = DEFAULT_STEPS) -> SliceReport:
    """Subschemas verified up to the bound with inclusion-minimal label sets.

    Subschemas are examined smallest first; supersets of an already verified
    subschema are skipped, since they cannot be minimal.  A candidate is
    abandoned as inconclusive at its first branch that runs out of fuel.
    """
    from .analysis import weiser_slice

    search = _SliceSearch(schema, criterion, fuel, check_fuel, max_steps, stop_on_open=True)
    report = SliceReport(criterion, fuel)
    report.weiser = weiser_slice(schema, criterion)
    report.weiser_verdict = search.check(report.weiser)
    verified: list = []
    for sub in enumerate_subschemas(schema):
        labels = lsym(sub)
        if any(v <= labels for v in verified):
            continue
        if report.examined >= budget:
            raise BudgetExhausted(report)
        report.examined += 1
        verdict = search.check(sub)
        if isinstance(verdict, VerifiedUpToBound):
            verified.append(labels)
            report.minimal.append(sub)
        elif isinstance(verdict, Inconclusive):
            report.inconclusive.append(sub)
    return report
