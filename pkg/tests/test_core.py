import pytest
from hypothesis import given, settings, strategies as st

from conftest import load
from schemaslice.classify import generate_schema
from schemaslice.core import (
    OMEGA,
    ArityMismatch,
    Assign,
    DuplicateLabel,
    If,
    KindConflict,
    MalformedSchema,
    NotControlClosed,
    Seq,
    Skip,
    Symbol,
    align_subschema,
    auto_labels,
    delete_symbols,
    enumerate_subschemas,
    is_subschema,
    labels,
    lsym,
    seq,
    validate,
    variables,
)
from schemaslice.syntax import parse, print_schema

seeds = st.integers(min_value=0, max_value=10_000)


def direct_count(schema) -> int:
    """Number of subschemas, computed from the nesting structure alone."""
    total = 1
    for stmt in schema.statements():
        if isinstance(stmt, Assign):
            total *= 2
        elif isinstance(stmt, If):
            total *= 1 + direct_count(stmt.then) * direct_count(stmt.orelse)
        else:
            total *= 1 + direct_count(stmt.body)
    return total


class TestSymbolTable:
    def test_branch_assign(self):
        table = validate(load("branch_assign"))
        assert table.functions == {Symbol("h", "function", 0), Symbol("f", "function", 1),
                                   Symbol("g", "function", 0)}
        assert table.predicates == {Symbol("p", "predicate", 1)}
        assert table.occurrences["f"].controllers == (("p", "true"),)
        assert table.occurrences["g"].controllers == (("p", "false"),)

    def test_skip_is_empty(self):
        table = validate(Skip())
        assert not table.functions and not table.predicates and not table.occurrences

    def test_label_classes(self):
        table = validate(load("linear_loop"))
        assert table.lfunc == {"h1", "h2", "g1", "f"}
        assert table.lifpred == {"p"}
        assert table.lwhipred == {"q"}
        assert table.lsym == table.lfunc | table.lpred

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            parse("u := f(u); v := f();")

    def test_kind_conflict(self):
        with pytest.raises(KindConflict) as info:
            parse("u := p(u); if p(u) { skip; }")
        assert info.value.label == "p.2"

    def test_duplicate_label(self):
        with pytest.raises(DuplicateLabel):
            parse("u := f@a(u); v := g@a();")

    def test_all_violations_collected(self):
        with pytest.raises(ArityMismatch) as info:
            parse("u := f(u); v := f(); w := f(u, v);")
        assert len(info.value.violations) == 2

    def test_non_canonical_sequence(self):
        bad = Seq((Assign("u", "f", (), "f"), Seq((Assign("v", "g", (), "g"),
                                                   Assign("w", "h", (), "h")))))
        with pytest.raises(MalformedSchema):
            validate(bad)


class TestLabels:
    def test_auto_labels_number_repeats(self):
        assert auto_labels(load("special_omega")) == [
            "c", "p", "g1.1", "g2.1", "g1.2", "g2.2", "f.1", "q", "f.2", "h", "k"]

    def test_explicit_label_kept(self):
        s = parse("v := g@first(); v := g();")
        assert labels(s) == ["first", "g.2"]

    def test_variables_in_order(self):
        assert variables(load("branch_assign")) == ["u", "w", "v"]

    def test_omega_is_singleton(self):
        import pickle

        assert pickle.loads(pickle.dumps(OMEGA)) is OMEGA
        assert str(OMEGA) == "ω"


class TestSeq:
    def test_flattens_and_drops_skip(self):
        a, b = Assign("u", "f", (), "f"), Assign("v", "g", (), "g")
        assert seq(Skip(), seq(a, Skip()), b) == Seq((a, b))
        assert seq(Skip(), a) is a
        assert seq() == Skip()


class TestSubschema:
    def test_skip_and_self(self):
        s = load("linear_loop")
        assert is_subschema(Skip(), s)
        assert is_subschema(s, s)

    def test_linear_loop_minus_f(self):
        s = load("linear_loop")
        t = delete_symbols(s, lsym(s) - {"f"})
        assert is_subschema(t, s)
        assert not is_subschema(s, t)

    def test_reordering_is_not_a_subschema(self):
        s = parse("u := f(); v := g();")
        assert not is_subschema(parse("v := g(); u := f();"), s)

    def test_align_relabels_structurally(self):
        s = load("repeated_g")
        # the candidate's lone g gets the label of the first g in s
        t = align_subschema(parse("v := g();"), s)
        assert labels(t) == ["g.1"] and is_subschema(t, s)
        assert align_subschema(parse("v := h();"), s) is None

    def test_align_backtracks(self):
        s = parse("v := g(); if p(u) { v := g(); u := f(u); }")
        t = align_subschema(parse("if p(u) { v := g(); }"), s)
        assert labels(t) == ["p", "g.2"]


class TestDelete:
    def test_identical_parts_drop_h(self):
        s = load("identical_parts")
        t = delete_symbols(s, {"p", "g.1", "g.2"})
        assert print_schema(t) == "if p(w) {\n  u := g();\n} else {\n  u := g();\n}\n"
        assert labels(t) == ["p", "g.1", "g.2"]

    def test_identity(self):
        s = load("special_omega")
        assert delete_symbols(s, lsym(s)) == s

    def test_branch_assign_keep_h(self):
        assert delete_symbols(load("branch_assign"), {"h"}) == parse("u := h();")

    def test_not_control_closed(self):
        with pytest.raises(NotControlClosed):
            delete_symbols(load("branch_assign"), {"h", "f"})

    def test_unknown_label(self):
        with pytest.raises(Exception, match="unknown labels"):
            delete_symbols(load("branch_assign"), {"zz"})


class TestEnumerate:
    def test_skip(self):
        assert list(enumerate_subschemas(Skip())) == [Skip()]

    def test_single(self):
        s = parse("x := c();")
        assert list(enumerate_subschemas(s)) == [Skip(), s]

    def test_repeated_g_contains_lone_g(self):
        subs = [print_schema(t) for t in enumerate_subschemas(load("repeated_g"))]
        assert "v := g@g.1();\n" in subs

    def test_sizes_nondecreasing(self):
        sizes = [len(lsym(t)) for t in enumerate_subschemas(load("special_omega"))]
        assert sizes == sorted(sizes)

    @pytest.mark.parametrize("n", range(6))
    def test_straight_line_count(self, n):
        s = parse(" ".join(f"x{i} := f{i}();" for i in range(n)))
        assert sum(1 for _ in enumerate_subschemas(s)) == 2 ** n


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_enumeration_is_exact(seed):
    s = generate_schema(seed, 3, 6, 3)
    subs = list(enumerate_subschemas(s))
    assert len(subs) == direct_count(s)
    assert len({frozenset(lsym(t)) for t in subs}) == len(subs)
    assert all(is_subschema(t, s) for t in subs)
    # deletion results always validate again
    for t in subs:
        validate(t)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_delete_everything_and_nothing(seed):
    s = generate_schema(seed)
    assert delete_symbols(s, lsym(s)) == s
    assert delete_symbols(s, ()) == Skip()
