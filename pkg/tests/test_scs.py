import random

from hypothesis import given, settings, strategies as st

from idiom_forge import scs as S

from conftest import api
from oracles import A, C, random_tree



def atoms():
    return st.one_of(st.sampled_from(A).map(S.Action), st.just(S.Creation(C)),
                     st.just(S.UNKNOWN), st.just(S.EMPTY))


def trees(max_leaves=12):
    return st.recursive(
        atoms(),
        lambda inner: st.one_of(
            st.lists(inner, max_size=4).map(lambda xs: S.Seq(tuple(xs))),
            st.builds(S.If, inner, inner, inner),
            st.builds(S.While, inner, inner),
        ),
        max_leaves=max_leaves,
    )


def depth(s):
    if isinstance(s, S.Seq):
        return 1 + max((depth(i) for i in s.items), default=0)
    if isinstance(s, S.If):
        return 1 + max(depth(s.cond), depth(s.then), depth(s.else_))
    if isinstance(s, S.While):
        return 1 + max(depth(s.cond), depth(s.body))
    return 0


def is_simplified(s, top=True):
    if isinstance(s, S.Empty):
        return top
    if isinstance(s, S.Seq):
        return (len(s.items) >= 2 and all(not isinstance(i, (S.Seq, S.Empty)) for i in s.items)
                and all(is_simplified(i, False) for i in s.items))
    if isinstance(s, S.If):
        # an Empty condition survives only when both branches carry code
        cond_ok = (isinstance(s.cond, (S.Action, S.Creation, S.Unknown))
                   or not (isinstance(s.then, S.Empty) or isinstance(s.else_, S.Empty)))
        return (cond_ok and not (isinstance(s.then, S.Empty) and isinstance(s.else_, S.Empty))
                and is_simplified(s.then) and is_simplified(s.else_))
    if isinstance(s, S.While):
        cond_ok = isinstance(s.cond, (S.Action, S.Creation, S.Unknown))
        return cond_ok and not isinstance(s.body, S.Empty) and is_simplified(s.body, False)
    return True


def test_if_with_empty_condition_example(reg):
    ch1, ch2 = S.Action(A[0]), S.Action(A[1])
    assert S.simplify(S.Seq((ch1, S.If(S.EMPTY, ch2, S.EMPTY)))) == S.Seq((ch1, ch2))


def test_empty_fixpoint():
    assert S.simplify(S.EMPTY) == S.EMPTY
    assert S.canonical_form(S.EMPTY) == ""


def test_condition_hoisting():
    a1, a2, x, y = (S.Action(a) for a in A)
    got = S.simplify(S.If(S.Seq((a1, a2)), x, y))
    assert got == S.Seq((a1, S.If(a2, x, y)))
    assert S.simplify(got) == got


def test_remaining_rules():
    a, b = S.Action(A[0]), S.Action(A[1])
    assert S.simplify(S.If(S.EMPTY, S.EMPTY, b)) == b
    assert S.simplify(S.While(S.EMPTY, S.EMPTY)) == S.EMPTY
    assert S.simplify(S.While(S.EMPTY, a)) == a
    assert S.simplify(S.If(a, S.EMPTY, S.EMPTY)) == a
    assert S.simplify(S.While(a, S.EMPTY)) == a
    assert S.simplify(S.Seq((S.Seq((a,)), S.EMPTY))) == a


def test_canonical_golden_forms(reg):
    regex_scs = S.Seq((S.Creation(api(reg, "Regex.Match(string)")),
                  S.If(S.Action(api(reg, "get(Match.Success)")), S.Action(api(reg, "get(Match.Groups)")), S.EMPTY)))
    assert S.canonical_form(regex_scs) == "Regex.Match(string);if(get(Match.Success)){get(Match.Groups)}else{}"
    reader_scs = S.Seq((S.Creation(api(reg, "new StreamReader(string)")), S.Action(api(reg, "StreamReader.ReadToEnd()")),
                  S.Action(api(reg, "StreamReader.Close()"))))
    assert S.canonical_form(reader_scs) == "new StreamReader(string);StreamReader.ReadToEnd();StreamReader.Close()"


def test_to_vector_examples(reg):
    regex_scs = S.Seq((S.Creation(api(reg, "Regex.Match(string)")),
                  S.If(S.Action(api(reg, "get(Match.Success)")), S.Action(api(reg, "get(Match.Groups)")), S.EMPTY)))
    v = S.to_vector(regex_scs, reg)
    want = {reg.index_of(api(reg, d)) for d in ("Regex.Match(string)", "get(Match.Success)", "get(Match.Groups)")}
    assert v.entries == dict.fromkeys(want, 1.0)
    assert v.dims == len(reg)
    assert S.to_vector(S.EMPTY, reg).is_zero()
    close = S.Action(api(reg, "StreamReader.Close()"))
    assert S.to_vector(S.Seq((close, close)), reg).entries == {reg.index_of(close.api): 1.0}


def test_rooted():
    c, a = S.Creation(C), S.Action(A[0])
    assert S.is_rooted(S.Seq((c, a)))
    assert not S.is_rooted(S.Seq((a, c)))
    assert not S.is_rooted(S.Seq((c, a, c)))
    assert not S.is_rooted(S.EMPTY)


@settings(max_examples=500, deadline=None)
@given(trees())
def test_simplify_idempotent_and_preserves_actions(t):
    s = S.simplify(t)
    assert S.simplify(s) == s
    assert S.api_multiset(s) == S.api_multiset(t)
    assert is_simplified(s)


@settings(max_examples=200, deadline=None)
@given(trees())
def test_json_round_trip(t):
    assert S.from_json(S.to_json(t)) == t


def test_canonical_form_injective():
    rng = random.Random(7)
    seen = {}
    for _ in range(5000):
        s = S.simplify(random_tree(rng, 5))
        key = S.canonical_form(s)
        assert seen.setdefault(key, s) == s, key


def test_canonical_distinguishes_creation_from_action_position():
    c, a = S.Creation(C), S.Action(C)
    assert S.canonical_form(S.Seq((c, S.Action(A[0])))) != S.canonical_form(S.Seq((a, S.Action(A[0]))))
    assert S.canonical_form(S.Seq((S.Action(A[0]), c))) != S.canonical_form(S.Seq((S.Action(A[0]), a)))


@settings(max_examples=200, deadline=None)
@given(trees())
def test_to_vector_invariant_under_simplify(t):
    from idiom_forge.registry import build_registry, MethodDecl, TypeDecl
    reg = build_registry([TypeDecl("T", "reference", (MethodDecl("new", (), (), "T", True),),
                                   tuple(MethodDecl(f"m{i}", (), (), "int") for i in range(4)))])
    assert S.to_vector(t, reg) == S.to_vector(S.simplify(t), reg)


def test_sparse_vector_validation():
    import pytest
    with pytest.raises(IndexError):
        S.SparseVector(2, {2: 1.0})
    with pytest.raises(ValueError):
        S.SparseVector(2, {0: 0.0})
