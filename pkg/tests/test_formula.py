import pytest
from hypothesis import given

from conftest import formulas
from lambek_llp.errors import ParseError
from lambek_llp.formula import (
    Atom,
    Leaf,
    Mode,
    ModeTable,
    Node,
    Over,
    Prod,
    SequentL,
    SequentNL,
    Under,
    connective_count,
    erase_brackets,
    eventual_range,
    format_formula,
    format_sequent,
    has_product,
    modes_used,
    parse_bracketed_words,
    parse_formula,
    parse_lexicon,
    parse_sequent,
    sequent_connectives,
)

A, B, C = Atom("A"), Atom("B"), Atom("C")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("A", A),
        ("A\\B", Under(A, B)),
        ("B/A", Over(B, A)),
        ("A*B", Prod(A, B)),
        ("A•B", Prod(A, B)),
        ("B/(A\\B)", Over(B, Under(A, B))),
        ("(A\\B)/C", Over(Under(A, B), C)),
        ("((S/(N\\S))\\S)/PP", Over(Under(Over(Atom("S"), Under(Atom("N"), Atom("S"))), Atom("S")), Atom("PP"))),
    ],
)
def test_parse_formula_examples(text, expected):
    assert parse_formula(text) == expected


def test_unparenthesised_chains_are_rejected():
    with pytest.raises(ParseError, match="parentheses"):
        parse_formula("A/B/C")


@pytest.mark.parametrize("text", ["", "A\\", "(A", "A B", "A\\\\B", "1A", "A $ B"])
def test_parse_formula_rejects(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_parse_error_reports_column():
    with pytest.raises(ParseError) as e:
        parse_formula("A\\(B")
    assert e.value.position is not None


@given(formulas())
def test_format_parse_round_trip(f):
    assert parse_formula(format_formula(f)) == f


@given(formulas())
def test_connectives_counted_once(f):
    text = format_formula(f)
    assert connective_count(f) == sum(text.count(c) for c in "\\/*")


def test_moded_connectives():
    modes = ModeTable.for_calc("nl").with_mode(Mode("a", True))
    f = parse_formula("A\\{a}B", modes)
    assert f == Under(A, B, "a")
    assert format_formula(f) == "A\\{a}B"
    assert modes_used(f) == {"a"}
    with pytest.raises(ParseError):
        parse_formula("A\\{zz}B", modes)


def test_helpers():
    f = parse_formula("((A\\B)/C)/A")
    assert eventual_range(f) == B
    assert not has_product(f)
    assert has_product(parse_formula("A/(B*C)"))


def test_parse_sequent_l():
    s = parse_sequent("A\\B, B\\C => A\\C")
    assert s == SequentL((Under(A, B), Under(B, C)), Under(A, C))
    assert format_sequent(s) == "A\\B, B\\C => A\\C"
    assert sequent_connectives(s) == 3
    assert parse_sequent("A ⇒ A") == SequentL((A,), A)


def test_parse_sequent_nl():
    s = parse_sequent("[[A, B], C] => C", "nl")
    assert s == SequentNL(Node(Node(Leaf(A), Leaf(B)), Leaf(C)), C)
    assert format_sequent(s) == "[[A, B], C] => C"
    assert erase_brackets(s) == SequentL((A, B, C), C)
    # bare lists under NL leave the structure to be discovered
    assert isinstance(parse_sequent("A, B => C", "nl"), SequentL)
    assert parse_sequent("A => A", "nl") == SequentNL(Leaf(A), A)


@pytest.mark.parametrize("text", ["[A, B, C] => A", "[A] => A", "[A, B], C => A", "A, B", "A => "])
def test_parse_sequent_rejects(text):
    with pytest.raises(ParseError):
        parse_sequent(text, "nl")


def test_bracketed_words():
    assert parse_bracketed_words("[[the, cat], sleeps]") == ((("the", "cat", "0"), "sleeps", "0"))
    assert parse_bracketed_words("[f, g]{a}") == ("f", "g", "a")
    with pytest.raises(ParseError):
        parse_bracketed_words("[a, b, c]")


def test_lexicon():
    lex = parse_lexicon(
        "# comment\n"
        "mode a assoc\n"
        "john : N\n"
        "likes : (N\\S)/N\n"
        "likes : N\\{a}S  # second reading\n"
    )
    assert lex.lookup("likes") == (Over(Under(Atom("N"), Atom("S")), Atom("N")), Under(Atom("N"), Atom("S"), "a"))
    assert lex.modes.is_assoc("a")
    assert lex.lookup("mary") == ()
    assert "john" in lex and len(lex) == 2


def test_lexicon_errors_carry_line():
    with pytest.raises(ParseError) as e:
        parse_lexicon("john : N\nlikes (N\\S)/N\n")
    assert e.value.line == 2
    with pytest.raises(ParseError) as e:
        parse_lexicon("john : N\\\n")
    assert e.value.line == 1
