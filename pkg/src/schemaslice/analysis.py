"""Control dependence, data dependence, Weiser's need sets and slices.

Data dependence is classic reaching definitions over the flow graph: a
definition at label ``l`` reaches the entry of ``m`` iff some path-segment
runs from the ``l`` assignment to ``m`` without another assignment to the
same variable.  No path needs to be feasible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import OMEGA, Schema, delete_symbols, validate
from .paths import EXIT, FlowGraph


@dataclass(frozen=True)
class DependenceGraph:
    """``cont`` holds direct nesting edges ``(pred, child, part)`` only."""

    cont: frozenset
    perc: frozenset  # (assignment label, label)
    perc_final: frozenset  # (assignment label, variable)
    kinds: tuple  # (label, "assign" | "if" | "while") in pre-order

    def cont_closure(self) -> frozenset:
        """Transitive ``cont`` as ``(pred, label, part)``; part is the tag at ``pred``."""
        parent = {child: (p, part) for p, child, part in self.cont}
        out = set()
        for label, _ in self.kinds:
            node = label
            while node in parent:
                p, part = parent[node]
                out.add((p, label, part))
                node = p
        return frozenset(out)

    def controllers(self, label: str) -> set:
        return {p for p, x, _ in self.cont_closure() if x == label}


def control_relation(schema: Schema) -> frozenset:
    table = validate(schema)
    edges = set()
    for label, occ in table.occurrences.items():
        if occ.controllers:
            p, part = occ.controllers[-1]
            edges.add((p, label, part))
    return frozenset(edges)


def reaching_definitions(graph: FlowGraph) -> tuple[dict, frozenset]:
    """Reaching assignment labels at each node entry, and at the exit."""
    succ = {}
    for label, node in graph.nodes.items():
        succ[label] = {graph.target_of(l) for l in node.letters}
    defs_of: dict = {}
    for label, node in graph.nodes.items():
        if node.kind == "assign":
            defs_of.setdefault(node.stmt.target, set()).add(label)

    rd_in = {label: set() for label in graph.nodes}
    rd_exit: set = set()
    work = list(graph.order)
    while work:
        label = work.pop()
        node = graph.nodes[label]
        out = set(rd_in[label])
        if node.kind == "assign":
            out -= defs_of[node.stmt.target]
            out.add(label)
        for nxt in succ[label]:
            bucket = rd_exit if nxt is EXIT else rd_in[nxt]
            if not out <= bucket:
                bucket |= out
                if nxt is not EXIT:
                    work.append(nxt)
    return {k: frozenset(v) for k, v in rd_in.items()}, frozenset(rd_exit)


def live_variables(graph: FlowGraph, at_exit=()) -> dict:
    """Variables possibly read before being overwritten, at each node entry."""
    live = {label: frozenset() for label in graph.nodes}
    exit_live = frozenset(at_exit)
    changed = True
    while changed:
        changed = False
        for label in reversed(graph.order):
            node = graph.nodes[label]
            out = set()
            for letter in node.letters:
                nxt = graph.target_of(letter)
                out |= exit_live if nxt is EXIT else live[nxt]
            if node.kind == "assign":
                out.discard(node.stmt.target)
            out |= set(node.stmt.args)
            new = frozenset(out)
            if new != live[label]:
                live[label] = new
                changed = True
    return live


def data_dependence(schema: Schema) -> tuple[frozenset, frozenset]:
    graph = FlowGraph(schema)
    rd_in, rd_exit = reaching_definitions(graph)
    perc = set()
    for m, reaching in rd_in.items():
        refs = set(graph.nodes[m].stmt.args)
        for l in reaching:
            if graph.nodes[l].stmt.target in refs:
                perc.add((l, m))
    final = {(l, graph.nodes[l].stmt.target) for l in rd_exit}
    return frozenset(perc), frozenset(final)


def dependence_graph(schema: Schema) -> DependenceGraph:
    graph = FlowGraph(schema)
    perc, final = data_dependence(schema)
    kinds = tuple((label, graph.nodes[label].kind) for label in graph.order)
    return DependenceGraph(control_relation(schema), perc, final, kinds)


@dataclass(frozen=True)
class NeedSet:
    labels: frozenset
    criterion: object  # variable name or OMEGA

    def __contains__(self, label):
        return label in self.labels

    def __iter__(self):
        return iter(sorted(self.labels))

    def __len__(self):
        return len(self.labels)


def _seeds(deps: DependenceGraph, criterion) -> set:
    if criterion is OMEGA:
        return {label for label, kind in deps.kinds if kind == "while"}
    return {l for l, v in deps.perc_final if v == criterion}


def need(schema: Schema, criterion, deps: Optional[DependenceGraph] = None) -> NeedSet:
    """Least set closed under the four need conditions."""
    deps = deps or dependence_graph(schema)
    users: dict = {}
    for l, m in deps.perc:
        users.setdefault(m, set()).add(l)
    parent = {child: p for p, child, _ in deps.cont}
    out = set()
    stack = list(_seeds(deps, criterion))
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out.add(x)
        stack.extend(users.get(x, ()))
        if x in parent:
            stack.append(parent[x])
    return NeedSet(frozenset(out), criterion)


def satisfies_need_conditions(deps: DependenceGraph, labels, criterion) -> bool:
    """Whether ``labels`` is closed under the four conditions (not minimality)."""
    labels = set(labels)
    if not _seeds(deps, criterion) <= labels:
        return False
    if any(m in labels and l not in labels for l, m in deps.perc):
        return False
    return not any(x in labels and p not in labels for p, x, _ in deps.cont)


def weiser_slice(schema: Schema, criterion) -> Schema:
    return delete_symbols(schema, need(schema, criterion).labels)


def dependence_dot(schema: Schema, deps: Optional[DependenceGraph] = None,
                   name: str = "deps") -> str:
    """DOT text: one node per statement plus one sink per finally-defined variable."""
    deps = deps or dependence_graph(schema)
    graph = FlowGraph(schema)
    lines = [f"digraph {name} {{"]
    for label, kind in deps.kinds:
        st = graph.nodes[label].stmt
        if kind == "assign":
            text = f"{st.target} := {st.fn}({', '.join(st.args)}) @{label}"
            shape = "box"
        else:
            text = f"{kind} {st.pred}({', '.join(st.args)}) @{label}"
            shape = "diamond"
        lines.append(f'  "{label}" [shape={shape}, label="{text}"];')
    for v in sorted({v for _, v in deps.perc_final}):
        lines.append(f'  "var:{v}" [shape=ellipse, label="{v}"];')
    for l, m in sorted(deps.perc):
        lines.append(f'  "{l}" -> "{m}";')
    for p, x, part in sorted(deps.cont):
        lines.append(f'  "{p}" -> "{x}" [style=dashed, label="{part}"];')
    for l, v in sorted(deps.perc_final):
        lines.append(f'  "{l}" -> "var:{v}" [style=bold];')
    lines.append("}")
    return "\n".join(lines) + "\n"
