import pickle

from hypothesis import given, strategies as st

from schemaslice.terms import HerbrandState, app, pred_term, var

names = st.sampled_from(["f", "g", "h"])
leaves = st.sampled_from(["u", "v"]).map(var)
terms = st.recursive(leaves, lambda kids: st.builds(app, names, st.lists(kids, max_size=2)),
                     max_leaves=10)


def rebuild(t):
    return var(t.name) if t.is_var else app(t.fn, [rebuild(a) for a in t.args])


@given(terms)
def test_hash_consing(t):
    copy = rebuild(t)
    assert copy is t and copy.uid == t.uid
    assert pickle.loads(pickle.dumps(t)) is t


@given(terms, terms)
def test_identity_is_structural_equality(a, b):
    assert (a is b) == (str(a) == str(b))


def test_depth_and_symbols():
    t = app("h2", [app("f", [app("h2", [var("u")])])])
    assert t.depth == 3
    assert list(t.symbols()) == ["h2", "f", "h2"]
    assert t.contains(var("u")) and not t.contains(var("v"))
    assert str(t) == "h2(f(h2(u)))"


def test_pred_terms_are_shared():
    assert pred_term("p", [var("u")]) is pred_term("p", (var("u"),))
    assert pred_term("p", [var("u")]) is not pred_term("q", [var("u")])


class TestState:
    def test_natural_is_total(self):
        e = HerbrandState()
        assert e["anything"] is var("anything")
        assert len(e) == 0

    def test_assign_is_persistent(self):
        e = HerbrandState()
        d = e.assign("u", app("h"))
        assert e["u"] is var("u") and d["u"] is app("h")

    def test_identity_overrides_are_dropped(self):
        assert HerbrandState({"u": var("u")}) == HerbrandState()
        assert hash(HerbrandState({"u": var("u")})) == hash(HerbrandState())

    def test_to_dict(self):
        d = HerbrandState({"v": app("f", [app("h")])})
        assert d.to_dict() == {"v": "f(h())"}
