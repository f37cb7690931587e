import dataclasses

import pytest

from lambek_llp.compiler import (
    AtomGoal,
    Clause,
    Hypothetical,
    Regime,
    compile,
    compile_sequent,
    format_program,
    parse_regime,
    sentence_sequents,
)
from lambek_llp.engine import canonical_symbols
from lambek_llp.errors import NegativeProductInGroupoidRegime, PositiveProduct, RegimeMismatch, UnknownWord
from lambek_llp.formula import ModeTable, format_sequent, iter_formulas, parse_formula, parse_lexicon, parse_sequent
from lambek_llp.labels import Label, term_vars
from lambek_llp.sequent_oracle import enumerate_sequents

G, R, GR = Regime.GROUPOID, Regime.RELATIONAL, Regime.SIMULTANEOUS
LEXICON = "the_references : N\nare_missing : ((S/(N\\S))\\S)/PP\nfrom_this_book : PP\n"


def program_text(text, regime, calc="l"):
    return format_program(compile_sequent(parse_sequent(text, calc), regime))


def test_groupoid_composition():
    assert program_text("A\\B, B\\C => A\\C", G) == (
        "database:\n"
        "  c0. ?a0+#k0: B ∘- ?a0: A\n"
        "  c1. ?a1+#k1: C ∘- ?a1: B\n"
        "agenda:\n"
        "  #k2+(#k0+#k1): C ∘- #k2: A"
    )


def test_relational_composition():
    # succedent Skolem positions start after the string's vertices
    assert program_text("A\\B, B\\C => A\\C", R) == (
        "database:\n"
        "  c0. ?i0-1: B ∘- ?i0-0: A\n"
        "  c1. ?i1-2: C ∘- ?i1-1: B\n"
        "agenda:\n"
        "  3-2: C ∘- 3-0: A"
    )


def test_lifting_has_a_hypothetical_goal():
    assert program_text("A => B/(A\\B)", G, "nl") == (
        "database:\n  c0. #k0: A\nagenda:\n  #k0+#k1: B ∘- (?a0+#k1: B ∘- ?a0: A)"
    )


def test_are_missing_groupoid_clause():
    lex = parse_lexicon(LEXICON)
    (_, _, s), = sentence_sequents("the_references are_missing", lex, parse_formula("S/PP"))
    text = format_program(compile_sequent(s, G))
    assert canonical_symbols(text) == canonical_symbols(
        "database:\n"
        "  c0. #r: N\n"
        "  c1. ?b+(#m+?a): S ∘- (?b+#k: S ∘- (?c+#k: S ∘- ?c: N)) ⊗ ?a: PP\n"
        "agenda:\n"
        "  (#r+#m)+#l: S ∘- #l: PP"
    )


def test_are_missing_simultaneous_clause():
    lex = parse_lexicon(LEXICON)
    (_, _, s), = sentence_sequents("the_references are_missing from_this_book", lex, parse_formula("S"))
    text = format_program(compile_sequent(s, GR))
    assert canonical_symbols(text) == canonical_symbols(
        "database:\n"
        "  c0. #r-0-1: N\n"
        "  c1. ?b+(#m+?a)-?i-?k: S ∘- (?b+#k-?i-4: S ∘- (?c+#k-?l-4: S ∘- ?c-?l-1: N)) ⊗ ?a-2-?k: PP\n"
        "  c2. #f-2-3: PP\n"
        "agenda:\n"
        "  ?d-0-3: S"
    )


def test_right_product_in_span_regimes():
    assert program_text("A, B => A*B", R) == (
        "database:\n  c0. 0-1: A\n  c1. 1-2: B\nagenda:\n  0-?i0: A ⊗ ?i0-2: B"
    )
    p = compile_sequent(parse_sequent("A, B => A*B", "nl"), GR)
    assert len(p.equations) == 1
    with pytest.raises(NegativeProductInGroupoidRegime):
        compile_sequent(parse_sequent("[A, B] => A*B", "nl"), G)


@pytest.mark.parametrize("regime", [G, R, GR])
def test_positive_product_rejected_everywhere(regime):
    s = parse_sequent("(VP/PP)/N, N*PP => VP", "nl" if regime is GR else "l")
    with pytest.raises(PositiveProduct):
        compile_sequent(s, regime)


def test_regime_mismatches():
    with pytest.raises(RegimeMismatch):
        compile_sequent(parse_sequent("[A, A\\B] => B", "nl"), R)
    with pytest.raises(RegimeMismatch):
        compile_sequent(parse_sequent("[A, A\\B] => B", "nl"), GR)
    with pytest.raises(RegimeMismatch):
        compile_sequent(parse_sequent("A, A\\B => B", "nl"), G, ModeTable.for_calc("nl"))
    assert parse_regime("relational") is R
    with pytest.raises(ValueError):
        parse_regime("chart")


def test_lexical_ambiguity_in_order():
    lex = parse_lexicon("john : N\nruns : N\\S\nruns : N\\(S/A)\n")
    got = [format_sequent(s) for _, _, s in sentence_sequents("john runs", lex, parse_formula("S"))]
    assert got == ["N, N\\S => S", "N, N\\(S/A) => S"]
    with pytest.raises(UnknownWord):
        list(sentence_sequents("mary runs", lex, parse_formula("S")))


def test_compile_entry_point():
    lex = parse_lexicon(LEXICON)
    progs = list(compile("the_references are_missing from_this_book", "relational", lexicon=lex, target=parse_formula("S")))
    assert len(progs) == 1 and progs[0].words == ("the_references", "are_missing", "from_this_book")
    progs = list(compile("A => A", R))
    assert len(progs) == 1


# -- structural properties over the enumerated space --------------------------------------


def _walk_goals(x):
    if isinstance(x, Clause):
        yield ("head", x.head)
        for g in x.body:
            yield from _walk_goals(g)
    elif isinstance(x, Hypothetical):
        for g in x.inner:
            yield from _walk_goals(g)
        yield from _walk_goals(x.hypothesis)
    else:
        yield ("goal", x)


def _atoms(p):
    out = []
    for x in list(p.database) + list(p.agenda):
        out.extend(_walk_goals(x))
    return out


def _atom_occurrences(s):
    from lambek_llp.formula import Atom, Over, Under

    def count(f):
        return 1 if isinstance(f, Atom) else count(f.left if not isinstance(f, (Under, Over)) else f.argument) + count(
            f.right if not isinstance(f, (Under, Over)) else f.result
        )

    return sum(count(f) for f in iter_formulas(s))


def _sample(calc, n=2):
    return list(enumerate_sequents(("A", "B"), n, calc))


def test_every_atom_occurrence_becomes_one_literal():
    for regime, calc in ((G, "nl"), (R, "l")):
        for s in _sample(calc):
            assert len(_atoms(compile_sequent(s, regime))) == _atom_occurrences(s), format_sequent(s)


def test_polarity_discipline():
    # positive occurrences (database heads) carry variables only where arguments plug in;
    # top-level agenda goals are ground for the groupoid and relational regimes
    for regime, calc in ((G, "nl"), (R, "l")):
        for s in _sample(calc):
            p = compile_sequent(s, regime)
            for g in p.agenda:
                inner = g.inner if isinstance(g, Hypothetical) else (g,)
                for a in inner:
                    if isinstance(a, AtomGoal):
                        assert not _label_vars(a.label), format_sequent(s)


def _label_vars(lab):
    out = set()
    if lab.term is not None:
        out |= term_vars(lab.term)
    if lab.span is not None:
        out |= {x for x in (lab.span.start, lab.span.end) if not hasattr(x, "index")}
    return out


def _range_restricted(c):
    head = _label_vars(c.head.label)
    for g in c.body:
        if isinstance(g, AtomGoal) and not _label_vars(g.label) <= head:
            return False
    return True


def test_groupoid_clauses_are_range_restricted():
    for s in _sample("nl", 2) + _sample("l", 3)[-20000:]:
        for c in compile_sequent(s, G).database:
            assert _range_restricted(c), format_sequent(s)


def test_relational_clauses_need_not_be_range_restricted():
    # curried same-side arguments leave an inner position free in the body
    p = compile_sequent(parse_sequent("A, A, A\\(A\\A) => A"), R)
    assert not all(_range_restricted(c) for c in p.database)


def _erase(x, keep):
    if isinstance(x, AtomGoal):
        lab = Label(x.label.term, None) if keep == "term" else Label(None, x.label.span)
        return dataclasses.replace(x, label=lab)
    if isinstance(x, Clause):
        return dataclasses.replace(x, head=_erase(x.head, keep), body=tuple(_erase(g, keep) for g in x.body))
    return dataclasses.replace(
        x, inner=tuple(_erase(g, keep) for g in x.inner), hypothesis=_erase(x.hypothesis, keep), guard=None
    )


def _shape(p, keep, part="database"):
    from lambek_llp.compiler import format_clause, format_goals

    if part == "database":
        text = "\n".join(format_clause(_erase(c, keep)) for c in p.database)
    else:
        text = format_goals([_erase(g, keep) for g in p.agenda])
    return canonical_symbols(text)


def test_simultaneous_erases_to_relational_and_groupoid():
    nl = ModeTable.for_calc("nl")
    for s in _sample("l", 2):
        sim = compile_sequent(parse_sequent(format_sequent(s), "nl"), GR)
        rel = compile_sequent(s, R, nl.__class__.for_calc("l"))
        assert _shape(sim, "span") == _shape(rel, "span"), format_sequent(s)
        assert _shape(sim, "span", "agenda") == _shape(rel, "span", "agenda"), format_sequent(s)
        if len(s.antecedent) == 1:
            grp = compile_sequent(parse_sequent(format_sequent(s), "nl"), G)
            assert _shape(sim, "term") == _shape(grp, "term"), format_sequent(s)
