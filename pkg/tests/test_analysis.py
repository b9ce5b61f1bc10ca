from hypothesis import given, settings, strategies as st

from conftest import load
import oracles
from schemaslice.analysis import (
    control_relation,
    data_dependence,
    dependence_dot,
    dependence_graph,
    live_variables,
    need,
    reaching_definitions,
    satisfies_need_conditions,
    weiser_slice,
)
from schemaslice.classify import check_free_liberal, generate_schema
from schemaslice.core import OMEGA, Skip, While, delete_symbols, labels, lsym, variables, walk
from schemaslice.paths import FlowGraph, PredLetter, cursor_start, cursor_step
from schemaslice.semantics import Terminated, explore
from schemaslice.syntax import parse

seeds = st.integers(0, 10_000)


class TestControl:
    def test_linear_loop_closure(self):
        deps = dependence_graph(load("linear_loop"))
        closure = {(p, x) for p, x, _ in deps.cont_closure()}
        assert {x for p, x in closure if p == "q"} == {"h1", "h2", "p", "g1", "f"}
        assert {x for p, x in closure if p == "p"} == {"g1", "f"}
        assert deps.controllers("g1") == {"p", "q"}

    def test_branch_assign_parts(self):
        assert control_relation(load("branch_assign")) == {("p", "f", "true"), ("p", "g", "false")}

    def test_straight_line(self):
        assert control_relation(parse("u := f(u); v := g(u);")) == frozenset()

    def test_closure_keeps_outer_part_tag(self):
        deps = dependence_graph(load("linear_loop"))
        assert ("q", "g1", "body") in deps.cont_closure()


class TestData:
    def test_branch_assign(self):
        perc, final = data_dependence(load("branch_assign"))
        assert perc == {("h", "f")}
        assert final == {("f", "v"), ("g", "v"), ("h", "u")}

    def test_linear_loop(self):
        perc, final = data_dependence(load("linear_loop"))
        assert {("f", "h2"), ("h2", "p"), ("h2", "f"), ("h1", "q"), ("h1", "h1")} <= perc
        assert ("g1", "v") in final
        # the loop may run zero times, so nothing is forced to be last
        assert {v for _, v in final} == {"u", "v", "w"}

    def test_skip(self):
        assert data_dependence(Skip()) == (frozenset(), frozenset())

    def test_reaching_at_exit(self):
        graph = FlowGraph(load("repeated_g"))
        rd_in, rd_exit = reaching_definitions(graph)
        assert rd_in["p"] == {"g.1"} and rd_exit == {"g.1", "g.2"}

    def test_live(self):
        live = live_variables(FlowGraph(load("branch_assign")), at_exit={"v"})
        assert live["h"] == {"w"} and live["p"] == {"u", "w"}
        assert live["g"] == frozenset()


class TestNeed:
    def test_linear_loop(self):
        n = need(load("linear_loop"), "v")
        assert set(n.labels) == {"g1", "p", "h2", "f", "q", "h1"} and "f" in n

    def test_identical_parts(self):
        assert set(need(load("identical_parts"), "u").labels) == {"h", "p", "g.1", "g.2"}

    def test_special_omega_omega(self):
        special_omega = load("special_omega")
        assert set(need(special_omega, OMEGA).labels) == set(labels(special_omega))

    def test_branch_assign(self):
        assert set(need(load("branch_assign"), "v").labels) == {"h", "p", "f", "g"}
        assert set(need(load("branch_assign"), "u").labels) == {"h"}

    def test_unused_variable(self):
        assert len(need(load("linear_loop"), "zz")) == 0
        assert weiser_slice(load("linear_loop"), "zz") == Skip()

    def test_weiser_linear_loop_is_everything(self):
        assert weiser_slice(load("linear_loop"), "v") == load("linear_loop")

    def test_weiser_identical_parts_keeps_h(self):
        assert "h" in lsym(weiser_slice(load("identical_parts"), "u"))


class TestDot:
    def test_linear_loop_nodes(self):
        dot = dependence_dot(load("linear_loop"))
        nodes = [l for l in dot.splitlines() if "[shape=" in l]
        # six statements plus one sink per finally defined variable
        assert len(nodes) == 9
        assert sum("shape=box" in l for l in nodes) == 4
        assert sum("shape=diamond" in l for l in nodes) == 2
        assert sum("shape=ellipse" in l for l in nodes) == 3

    def test_edge_styles(self):
        dot = dependence_dot(load("branch_assign"))
        assert '"h" -> "f";' in dot
        assert '"p" -> "f" [style=dashed, label="true"];' in dot
        assert '"g" -> "var:v" [style=bold];' in dot


def closed_sets(schema):
    from schemaslice.core import enumerate_subschemas

    return [frozenset(lsym(t)) for t in enumerate_subschemas(schema)]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_perc_matches_segment_definition(seed):
    s = generate_schema(seed, 3, 6, 3)
    perc, final = data_dependence(s)
    bound = 2 * oracles.size(s) + 2
    assert (set(perc), set(final)) == oracles.perc_relations(s, bound)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_need_is_least_closed_set(seed):
    s = generate_schema(seed, 3, 6, 3)
    deps = dependence_graph(s)
    for crit in [*variables(s), OMEGA]:
        n = need(s, crit, deps).labels
        assert satisfies_need_conditions(deps, n, crit)
        # removing any one label breaks a condition
        for l in n:
            assert not satisfies_need_conditions(deps, n - {l}, crit)
        for c in closed_sets(s):
            if satisfies_need_conditions(deps, c, crit):
                assert n <= c
        delete_symbols(s, n)


def observed_dependence(schema, fuel):
    """Creator-label flows seen along explored paths."""
    perc, final = set(), set()
    graph = FlowGraph(schema)
    for _, outcome in explore(schema, fuel):
        letters = outcome.path.letters if isinstance(outcome, Terminated) else outcome.prefix.letters
        choices = [l.branch for l in letters if isinstance(l, PredLetter)]
        cur = cursor_start(graph)
        it = iter(choices)
        for letter in letters:
            refs = graph.nodes[letter.label].stmt.args
            perc.update((cur.origin_of(v), letter.label) for v in refs if cur.origin_of(v))
            cur = cursor_step(cur) if cur.pending_term() is None else cursor_step(cur, next(it))
        if isinstance(outcome, Terminated):
            final.update((l, v) for v, l in cur.origins)
    return perc, final


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_perc_against_semantics(seed):
    s = generate_schema(seed, 3, 6, 3)
    if not check_free_liberal(s)[0]:
        return
    perc, final = data_dependence(s)
    looping = any(isinstance(x, While) for x in walk(s))
    fuel = 2 * oracles.size(s) + 2
    seen_perc, seen_final = observed_dependence(s, fuel)
    assert seen_perc <= perc and seen_final <= final
    if not looping:
        assert (seen_perc, seen_final) == (set(perc), set(final))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_need_sets_are_control_closed(seed):
    s = generate_schema(seed)
    for crit in [*variables(s), OMEGA]:
        t = weiser_slice(s, crit)
        assert set(lsym(t)) == set(need(s, crit).labels)
