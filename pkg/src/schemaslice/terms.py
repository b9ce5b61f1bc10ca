"""Herbrand terms, predicate terms and Herbrand states.

Terms are hash-consed: every structurally distinct term is built exactly once
and carries a canonical integer ``uid``, so equality is identity and hashing
is constant time.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping, Optional


class Term:
    """A variable or a function symbol applied to argument terms.

    Never instantiate directly; use :func:`var` and :func:`app`.
    """

    __slots__ = ("fn", "args", "name", "uid", "depth", "__weakref__")

    fn: Optional[str]
    args: tuple
    name: Optional[str]
    uid: int
    depth: int

    def __repr__(self):
        return f"Term({self})"

    def __str__(self):
        if self.name is not None:
            return self.name
        return f"{self.fn}({', '.join(str(a) for a in self.args)})"

    def __reduce__(self):
        if self.name is not None:
            return (var, (self.name,))
        return (app, (self.fn, self.args))

    @property
    def is_var(self) -> bool:
        return self.name is not None

    def symbols(self) -> Iterator[str]:
        """Function symbols occurring in the term, outermost first."""
        if self.fn is not None:
            yield self.fn
            for a in self.args:
                yield from a.symbols()

    def contains(self, other: "Term") -> bool:
        if self is other:
            return True
        return any(a.contains(other) for a in self.args)


_table: dict = {}
_uids = itertools.count()


def _make(key, fn, args, name) -> Term:
    t = Term.__new__(Term)
    t.fn = fn
    t.args = args
    t.name = name
    t.uid = next(_uids)
    t.depth = 0 if name is not None else 1 + max((a.depth for a in args), default=0)
    _table[key] = t
    return t


def var(name: str) -> Term:
    key = ("v", name)
    t = _table.get(key)
    return t if t is not None else _make(key, None, (), name)


def app(fn: str, args: Iterable[Term] = ()) -> Term:
    args = tuple(args)
    key = (fn, tuple(a.uid for a in args))
    t = _table.get(key)
    return t if t is not None else _make(key, fn, args, None)


class PredTerm:
    """A predicate symbol applied to a vector of terms (hash-consed too)."""

    __slots__ = ("pred", "args", "uid")

    pred: str
    args: tuple
    uid: int

    def __repr__(self):
        return f"PredTerm({self})"

    def __str__(self):
        return f"{self.pred}({', '.join(str(a) for a in self.args)})"

    def __reduce__(self):
        return (pred_term, (self.pred, self.args))


_ptable: dict = {}


def pred_term(pred: str, args: Iterable[Term] = ()) -> PredTerm:
    args = tuple(args)
    key = (pred, tuple(a.uid for a in args))
    pt = _ptable.get(key)
    if pt is None:
        pt = PredTerm.__new__(PredTerm)
        pt.pred = pred
        pt.args = args
        pt.uid = next(_uids)
        _ptable[key] = pt
    return pt


class HerbrandState(Mapping):
    """A total map from variables to terms stored as overrides of ``e``.

    Looking up a variable that was never assigned gives the variable itself.
    Overrides that map a variable to itself are normalised away, so two
    states are equal exactly when they agree on every variable.
    """

    __slots__ = ("_env",)

    def __init__(self, overrides: Optional[Mapping[str, Term]] = None):
        env = {}
        for k, t in (overrides or {}).items():
            if not (t.is_var and t.name == k):
                env[k] = t
        self._env = env

    @classmethod
    def natural(cls) -> "HerbrandState":
        return cls()

    def __getitem__(self, v: str) -> Term:
        t = self._env.get(v)
        return t if t is not None else var(v)

    def __iter__(self):
        return iter(self._env)

    def __len__(self):
        return len(self._env)

    def __contains__(self, v):
        return v in self._env

    def __eq__(self, other):
        if isinstance(other, HerbrandState):
            return self._env == other._env
        return NotImplemented

    def __hash__(self):
        return hash(frozenset((k, t.uid) for k, t in self._env.items()))

    def __repr__(self):
        inner = ", ".join(f"{k} ↦ {t}" for k, t in sorted(self._env.items()))
        return f"HerbrandState({{{inner}}})"

    def assign(self, v: str, t: Term) -> "HerbrandState":
        env = dict(self._env)
        env[v] = t
        return HerbrandState(env)

    def to_dict(self) -> dict:
        return {k: str(t) for k, t in sorted(self._env.items())}
