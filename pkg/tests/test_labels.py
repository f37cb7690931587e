import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambek_llp.errors import Clash, MixedMode, NotGround, OccursCheck, UnificationFailure
from lambek_llp.formula import Mode, ModeTable
from lambek_llp.labels import (
    At,
    Const,
    Label,
    MatchCounter,
    Plus,
    PosVar,
    QueryContext,
    Span,
    Var,
    apply_subst,
    flatten,
    format_label,
    format_subst,
    format_term,
    is_ground,
    match_assoc,
    match_nonassoc,
    match_span,
    match_terms,
    normalise,
    rebuild,
    solve_equations_nonassoc,
    unify_equations,
    unify_span,
)

k, l, m, r, f = (Const(x) for x in "klmrf")
a, b, c, d = (Var(x) for x in "abcd")
L_MODES = ModeTable.for_calc("l")


def chain(items):
    return rebuild(list(items), "0")


def test_format():
    assert format_term(Plus(m, Plus(k, l))) == "#m+(#k+#l)"
    assert format_term(Plus(Plus(m, k), l)) == "(#m+#k)+#l"
    assert format_term(Plus(k, l, "a")) == "#k+{a}#l"
    assert format_label(Label(Plus(a, k), Span(At(0), PosVar("i")))) == "?a+#k-0-?i"
    assert format_label(Label(None, Span(At(3), At(2)))) == "3-2"


def test_fresh_symbols_are_never_reissued():
    ctx = QueryContext(first_skolem_position=4)
    assert [ctx.fresh_const(), ctx.fresh_const()] == [Const("k0"), Const("k1")]
    assert [ctx.fresh_var(), ctx.fresh_var()] == [Var("a0"), Var("a1")]
    assert ctx.fresh_posvar() == PosVar("i0")
    assert [ctx.fresh_position(), ctx.fresh_position()] == [At(4), At(5)]


def test_apply_subst_reaches_through_labels():
    lab = Label(Plus(a, k), Span(PosVar("i"), At(2)))
    out = apply_subst({a: Plus(m, l), PosVar("i"): At(0)}, lab)
    assert out == Label(Plus(Plus(m, l), k), Span(At(0), At(2)))
    assert is_ground(out)


def test_flatten_and_normalise():
    t = Plus(m, Plus(k, l))
    assert flatten(t, "0") == [m, k, l]
    assert normalise(t, L_MODES) == normalise(Plus(Plus(m, k), l), L_MODES)
    nl = ModeTable.for_calc("nl")
    assert normalise(t, nl) != normalise(Plus(Plus(m, k), l), nl)


# -- associative matching -----------------------------------------------------------


def test_match_assoc_paper_example():
    assert [format_subst(s) for s in match_assoc(Plus(m, Plus(k, l)), Plus(b, l))] == ["?b=#m+#k"]


def test_match_assoc_orders_leftmost_shortest():
    out = [format_subst(s) for s in match_assoc(chain([k, l, m]), Plus(a, b))]
    assert out == ["?a=#k, ?b=#l+#m", "?a=#k+#l, ?b=#m"]


def test_match_assoc_repeated_variable():
    assert [format_subst(s) for s in match_assoc(chain([k, l, k, l]), Plus(a, a))] == ["?a=#k+#l"]
    assert list(match_assoc(chain([k, l, k]), Plus(a, a))) == []


def test_match_assoc_errors():
    with pytest.raises(NotGround):
        list(match_assoc(Plus(a, k), Plus(b, k)))
    with pytest.raises(MixedMode):
        list(match_assoc(Plus(k, l), Plus(b, l), ModeTable.for_calc("nl")))


def _brute_segmentations(ground, pattern):
    """All ways of cutting ``ground`` into len(pattern) nonempty pieces that fit."""
    n, p = len(ground), len(pattern)
    out = set()
    for cuts in itertools.combinations(range(1, n), p - 1):
        bounds = (0,) + cuts + (n,)
        pieces = [tuple(ground[i:j]) for i, j in zip(bounds, bounds[1:])]
        s, ok = {}, True
        for pat, piece in zip(pattern, pieces):
            if isinstance(pat, Const):
                ok = piece == (pat,)
            elif pat in s:
                ok = s[pat] == piece
            else:
                s[pat] = piece
            if not ok:
                break
        if ok:
            out.add(frozenset(s.items()))
    return out


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.sampled_from([k, l, m]), min_size=1, max_size=6),
    st.lists(st.sampled_from([k, l, a, b, c]), min_size=1, max_size=4),
)
def test_match_assoc_is_complete_segmentation(ground, pattern):
    expected = _brute_segmentations(ground, pattern)
    got = set()
    for s in match_assoc(chain(ground), chain(pattern)):
        got.add(frozenset((v, tuple(flatten(t, "0"))) for v, t in s.items()))
    assert got == expected


def test_match_counter_flags_nontrivial():
    counter = MatchCounter()
    list(match_assoc(chain([k, l, m]), Plus(a, m), counter=counter))
    assert (counter.calls, counter.results, counter.nontrivial) == (1, 1, 1)
    counter = MatchCounter()
    list(match_assoc(k, a, counter=counter))
    assert (counter.calls, counter.results, counter.nontrivial) == (1, 1, 0)


def test_mixed_mode_matching_respects_nonassoc_nodes():
    modes = ModeTable.for_calc("nl").with_mode(Mode("a", True))
    g = Plus(Plus(k, l, "a"), m, "0")
    p = Plus(a, m, "0")
    counter = MatchCounter()
    assert [format_subst(s) for s in match_terms(g, p, modes, counter)] == ["?a=#k+{a}#l"]
    assert all(mode == "a" or len(items) <= 2 for _, mode, items in counter.flattened_chains)
    # a non-associative node is never re-bracketed
    assert list(match_terms(Plus(k, Plus(l, m)), Plus(Plus(a, b), c), modes)) == []


# -- non-associative matching, spans --------------------------------------------------


def test_match_nonassoc():
    assert match_nonassoc(Plus(Plus(r, m), l), Plus(b, a)) == {b: Plus(r, m), a: l}
    assert match_nonassoc(Plus(r, Plus(m, l)), Plus(Plus(a, b), c)) is None
    assert match_nonassoc(Plus(k, k), Plus(a, a)) == {a: k}
    assert match_nonassoc(Plus(k, l), Plus(a, a)) is None
    with pytest.raises(NotGround):
        match_nonassoc(a, k)


def test_match_span():
    i, j = PosVar("i"), PosVar("j")
    assert match_span(Span(At(3), At(2)), Span(j, At(2))) == {j: At(3)}
    assert match_span(Span(At(3), At(2)), Span(j, At(1))) is None
    assert match_span(Span(At(3), At(3)), Span(i, i)) == {i: At(3)}
    assert match_span(Span(At(3), At(2)), Span(i, i)) is None
    with pytest.raises(NotGround):
        match_span(Span(i, At(2)), Span(At(0), At(2)))


def test_unify_span():
    i, j = PosVar("i"), PosVar("j")
    assert unify_span(Span(At(0), i), Span(j, At(1)), {}) == {i: At(1), j: At(0)}
    assert unify_span(Span(At(0), i), Span(At(1), j), {}) is None
    s = {i: At(1)}
    assert unify_span(Span(At(0), i), Span(At(0), At(1)), s) is s


# -- deferred unification ----------------------------------------------------------------


def test_solve_paper_log():
    s, root = solve_equations_nonassoc([(d, Plus(b, Plus(m, a))), (b, c), (c, r), (a, f)])
    assert format_term(root) == "#r+(#m+#f)"
    assert s[d] == Plus(r, Plus(m, f))


def test_solve_empty_log():
    assert solve_equations_nonassoc([]) == ({}, None)


def test_solve_failures():
    assert solve_equations_nonassoc([(Plus(a, b), k)]) is None
    with pytest.raises(Clash):
        solve_equations_nonassoc([(Plus(a, b), k)], raise_errors=True)
    with pytest.raises(OccursCheck):
        solve_equations_nonassoc([(a, Plus(a, k))], raise_errors=True)
    # associativity is not available here
    assert solve_equations_nonassoc([(Plus(Plus(a, b), c), Plus(k, Plus(l, m)))]) is None


small_terms = st.recursive(
    st.sampled_from([k, l, a, b, c, d]),
    lambda sub: st.builds(Plus, sub, sub),
    max_leaves=4,
)


def _unifier(eqs):
    try:
        return unify_equations(eqs)
    except UnificationFailure:
        return None


@settings(max_examples=400, deadline=None)
@given(st.lists(st.tuples(small_terms, small_terms), min_size=1, max_size=8))
def test_solving_order_does_not_matter(log):
    forward = _unifier(log)
    solved = solve_equations_nonassoc(log)
    assert (forward is None) == (solved is None)
    if solved is None:
        return
    s, _ = solved
    full = _unifier(list(reversed(log)))
    for lhs, rhs in log:
        assert apply_subst(full, lhs) == apply_subst(full, rhs)
    # most general unifiers agree up to variable renaming: same number of free variables left
    free = lambda u: {v for lhs, rhs in log for v in _vars(apply_subst(u, lhs))}
    assert len(free(forward)) == len(free(full))


def _vars(t):
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Plus):
        return _vars(t.left) | _vars(t.right)
    return set()
