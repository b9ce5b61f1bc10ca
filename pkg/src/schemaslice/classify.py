"""Schema classes: linearity, the joint free and liberal test, special schemas.

Also random schema generators for property tests.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .core import Assign, If, Schema, SchemaError, While, fill_labels, seq, validate, walk
from .paths import AssignLetter, FlowGraph, PathSegment, PredLetter, enumerate_segments


@dataclass(frozen=True)
class ViolationWitness:
    """A segment ``x mu y`` showing the schema is not both free and liberal."""

    segment: PathSegment
    reason: str = "equal-refvec-no-kill"

    @property
    def x(self):
        return self.segment.letters[0]

    @property
    def y(self):
        return self.segment.letters[-1]

    @property
    def mu(self) -> PathSegment:
        return PathSegment(self.segment.letters[1:-1])

    def check(self, schema: Optional[Schema] = None) -> bool:
        """Whether the witness satisfies its own invariants."""
        letters = self.segment.letters
        if len(letters) < 2:
            return False
        if schema is not None:
            try:
                PathSegment(letters, schema)
            except SchemaError:
                return False
        head, tail = letters[:-1], letters[1:]
        if len({l.label for l in head}) != len(head) or len({l.label for l in tail}) != len(tail):
            return False
        x, y = letters[0], letters[-1]
        if x.symbol != y.symbol or x.args != y.args:
            return False
        refs = set(y.args)
        return not any(isinstance(l, AssignLetter) and l.target in refs for l in head)

    def to_dict(self) -> dict:
        return {"reason": self.reason, "segment": self.segment.to_list(), "text": str(self.segment)}


@dataclass(frozen=True)
class ClassReport:
    predicate_linear: bool
    function_linear: bool
    linear: bool
    free_and_liberal: bool
    witness: Optional[ViolationWitness]
    special: bool
    reason: str

    def to_dict(self) -> dict:
        return {"predicate_linear": self.predicate_linear,
                "function_linear": self.function_linear, "linear": self.linear,
                "free_and_liberal": self.free_and_liberal,
                "witness": None if self.witness is None else self.witness.to_dict(),
                "special": self.special, "reason": self.reason}


def check_linearity(schema: Schema) -> tuple[bool, bool, bool]:
    validate(schema)
    preds = Counter(s.pred for s in walk(schema) if not isinstance(s, Assign))
    funcs = Counter(s.fn for s in walk(schema) if isinstance(s, Assign))
    p_lin = all(c == 1 for c in preds.values())
    f_lin = all(c == 1 for c in funcs.values())
    return p_lin, f_lin, p_lin and f_lin


def _violates(letters: tuple) -> bool:
    x, y = letters[0], letters[-1]
    if x.symbol != y.symbol or x.args != y.args:
        return False
    refs = set(y.args)
    return not any(isinstance(l, AssignLetter) and l.target in refs for l in letters[:-1])


def check_free_liberal(schema: Schema) -> tuple[bool, Optional[ViolationWitness]]:
    """Decide whether the schema is both free and liberal.

    Searches segments ``x mu y`` where neither ``x mu`` nor ``mu y`` repeats
    a labelled symbol, ``x`` and ``y`` share a symbol and argument vector, and
    nothing in ``x mu`` assigns a variable ``y`` references.
    """
    graph = FlowGraph(schema)
    for seg in enumerate_segments(graph, no_repeat="ends", min_length=2):
        letters = seg.letters
        if _violates(letters):
            x, y = letters[0], letters[-1]
            if isinstance(y, PredLetter) and y.label == x.label:
                # the same predicate term comes back: the opposite answer is unrealizable
                letters = letters[:-1] + (PredLetter(y.label, y.pred, y.args, not x.branch),)
            return False, ViolationWitness(PathSegment(letters))
    return True, None


def _parts_clash(schema: Schema) -> Optional[str]:
    for stmt in walk(schema):
        if not isinstance(stmt, If):
            continue
        then = {(s.fn, s.target) for s in walk(stmt.then) if isinstance(s, Assign)}
        for s in walk(stmt.orelse):
            if isinstance(s, Assign) and (s.fn, s.target) in then:
                return (f"{s.fn} assigns {s.target} in both parts of "
                        f"{stmt.pred}@{stmt.label}")
    return None


def check_special(schema: Schema) -> tuple[bool, str]:
    p_lin, _, _ = check_linearity(schema)
    if not p_lin:
        return False, "not predicate-linear"
    ok, witness = check_free_liberal(schema)
    if not ok:
        return False, f"not free and liberal: {witness.segment}"
    clash = _parts_clash(schema)
    if clash:
        return False, clash
    return True, "special"


def classify(schema: Schema) -> ClassReport:
    p_lin, f_lin, lin = check_linearity(schema)
    fl, witness = check_free_liberal(schema)
    if not p_lin:
        special, reason = False, "not predicate-linear"
    elif not fl:
        special, reason = False, f"not free and liberal: {witness.segment}"
    else:
        clash = _parts_clash(schema)
        special, reason = (False, clash) if clash else (True, "special")
    return ClassReport(p_lin, f_lin, lin, fl, witness, special, reason)


# -- generators -----------------------------------------------------------------


class GenerationExhausted(SchemaError):
    pass


VARIABLES = "uvwxyz"
FUNCTIONS = ("f", "g", "h", "k", "m", "n", "r", "s")
PREDICATES = ("p", "q", "t", "b")


class _Builder:
    def __init__(self, rng: random.Random, n_vars: int, predicate_linear: bool,
                 self_ref: float):
        self.rng = rng
        self.vars = VARIABLES[:max(1, n_vars)]
        self.predicate_linear = predicate_linear
        self.self_ref = self_ref
        self.farity: dict = {}
        self.parity: dict = {}

    def assign(self, prefer: Optional[str] = None) -> Assign:
        rng = self.rng
        target = prefer if prefer is not None else rng.choice(self.vars)
        used = list(self.farity)
        if used and rng.random() < 0.3:
            fn = rng.choice(used)
        else:
            fresh = [f for f in FUNCTIONS if f not in self.farity]
            fn = rng.choice(fresh) if fresh else rng.choice(used)
        if fn not in self.farity:
            self.farity[fn] = 0 if rng.random() < 0.15 else rng.choice((1, 1, 1, 2))
        arity = self.farity[fn]
        args = [rng.choice(self.vars) for _ in range(arity)]
        if arity and rng.random() < self.self_ref:
            args[0] = target
        return Assign(target, fn, tuple(args), None)

    def predicate(self):
        rng = self.rng
        used = list(self.parity)
        fresh = [p for p in PREDICATES if p not in self.parity]
        if used and (not fresh or (not self.predicate_linear and rng.random() < 0.3)):
            name = rng.choice(used)
        else:
            name = fresh[0]
        if name not in self.parity:
            self.parity[name] = 0 if rng.random() < 0.05 else 1
        return name, tuple(rng.choice(self.vars) for _ in range(self.parity[name]))

    def block(self, n_a: int, n_p: int, wdepth: int) -> Schema:
        rng = self.rng
        out = []
        while n_a or n_p:
            if n_p and (not n_a or rng.random() < (n_p + 1) / (n_a + n_p + 2)):
                n_p -= 1
                pred, args = self.predicate()
                in_a = rng.randint(0, n_a)
                in_p = rng.randint(0, n_p)
                n_a -= in_a
                n_p -= in_p
                if wdepth < 2 and rng.random() < 0.5:
                    body = []
                    if args and in_a and rng.random() < 0.8:
                        # keep the loop test moving
                        body.append(self.assign(prefer=args[0]))
                        in_a -= 1
                    body.append(self.block(in_a, in_p, wdepth + 1))
                    rng.shuffle(body)
                    out.append(While(pred, args, seq(*body), None))
                else:
                    t_a = rng.randint(0, in_a)
                    t_p = rng.randint(0, in_p)
                    then = self.block(t_a, t_p, wdepth)
                    orelse = self.block(in_a - t_a, in_p - t_p, wdepth)
                    out.append(If(pred, args, then, orelse, None))
            else:
                n_a -= 1
                out.append(self.assign())
        return seq(*out)


def _draw(rng: random.Random, max_predicates: int, max_assignments: int, max_vars: int,
          predicate_linear: bool, self_ref: float) -> Schema:
    if min(max_predicates, max_assignments, max_vars) < 0:
        raise ValueError("limits must be non-negative")
    b = _Builder(rng, max_vars, predicate_linear, self_ref)
    n_a = rng.randint(min(1, max_assignments), max_assignments)
    n_p = rng.randint(0, min(max_predicates, len(PREDICATES)))
    schema = fill_labels(b.block(n_a, n_p, 0))
    validate(schema)
    return schema


def generate_schema(seed: int, max_predicates: int = 4, max_assignments: int = 8,
                    max_vars: int = 4, *, self_ref: float = 0.5) -> Schema:
    """A deterministic pseudo-random schema within the given limits."""
    rng = random.Random(seed)
    return _draw(rng, max_predicates, max_assignments, max_vars, False, self_ref)


def generate_special(seed: int, max_predicates: int = 4, max_assignments: int = 8,
                     max_vars: int = 4, *, max_tries: int = 2000) -> Schema:
    """A deterministic pseudo-random special schema, found by rejection."""
    if max_vars < 1 or max_assignments < 0 or max_predicates < 0:
        raise ValueError("limits must be positive")
    rng = random.Random(seed)
    for _ in range(max_tries):
        cand = _draw(rng, max_predicates, max_assignments, max_vars, True, 0.85)
        if check_special(cand)[0]:
            return cand
    raise GenerationExhausted(f"no special schema after {max_tries} proposals")
