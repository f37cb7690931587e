import io
import pathlib
import subprocess
import sys

import pytest

from lambek_llp.cli import main

LEX = pathlib.Path(__file__).resolve().parent.parent / "lexicons"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_prove_derivable_with_trace():
    code, out = run("prove", "--trace", "A\\B, B\\C => A\\C")
    assert code == 0
    assert "regime: relational" in out
    assert "2. 3-2: C | RES ?i1=3" in out
    assert out.rstrip().endswith("derivable (1 trace, first only)")


def test_prove_underivable():
    code, out = run("prove", "--calc", "nl", "[A\\B, B\\C] => A\\C")
    assert code == 1 and "regime: groupoid" in out and out.rstrip().endswith("underivable")


def test_prove_reports_rejected_candidates():
    code, out = run("prove", "--calc", "nl", "A\\B, B\\C => A\\C")
    assert code == 1
    assert "regime: simultaneous" in out
    assert "rejected by term unification" in out


def test_prove_all_counts_traces():
    code, out = run("prove", "--all", "N/CN, CN => S/(N\\S)")
    assert code == 0 and "derivable (1 trace)" in out


def test_words_may_be_given_unquoted():
    code, out = run("prove", "A,", "B", "=>", "A*B")
    assert code == 0


@pytest.mark.parametrize(
    "argv, error",
    [
        (("prove", "A\\ => B"), "ParseError"),
        (("prove", "(VP/PP)/N, N*PP => VP"), "PositiveProduct"),
        (("prove", "--calc", "nl", "--regime", "groupoid", "[A, B] => A*B"), "NegativeProductInGroupoidRegime"),
        (("prove", "--calc", "nl", "--regime", "relational", "[A, B] => A*B"), "RegimeMismatch"),
        (("prove", "--mode", "a=sometimes", "A => A"), "ParseError"),
    ],
)
def test_errors_exit_2(argv, error):
    code, out = run(*argv)
    assert code == 2
    assert out.splitlines()[-1].startswith(f"error: {error}")


def test_bad_arguments_exit_2(capsys):
    assert run("prove")[0] == 2
    assert run("frobnicate", "A")[0] == 2


def test_parse_sentence_simultaneous():
    code, out = run(
        "parse", "--calc", "nl", "--lexicon", str(LEX / "references.lex"), "--target", "S",
        "the_references", "are_missing", "from_this_book",
    )
    assert code == 0
    assert "structure: [the_references, [are_missing, from_this_book]]" in out
    assert "prosodic: #k0+(#k1+#k2)" in out


def test_parse_unknown_word_and_missing_file():
    code, out = run("parse", "--lexicon", str(LEX / "references.lex"), "--target", "S", "the_references", "sleeps")
    assert code == 2 and "UnknownWord" in out
    code, out = run("parse", "--lexicon", str(LEX / "nope.lex"), "--target", "S", "x")
    assert code == 2


def test_parse_multimodal():
    lex = str(LEX / "multimodal.lex")
    code, _ = run("parse", "--calc", "multi", "--lexicon", lex, "--target", "A\\{a}C", "[f, g]{a}")
    assert code == 0
    code, _ = run("parse", "--calc", "multi", "--lexicon", lex, "--target", "A\\C", "[fn, gn]")
    assert code == 1


def test_compile_prints_program():
    code, out = run("compile", "A\\B, B\\C => A\\C")
    assert code == 0
    assert out == (
        "database:\n"
        "  c0. ?i0-1: B ∘- ?i0-0: A\n"
        "  c1. ?i1-2: C ∘- ?i1-1: B\n"
        "agenda:\n"
        "  3-2: C ∘- 3-0: A\n"
    )
    assert run("compile")[0] == 2


def test_oracle():
    code, out = run("oracle", "N/CN, CN, N\\S => S")
    assert code == 0 and "derivable: 2 proofs" in out
    code, out = run("oracle", "--calc", "boxedl", "--all", "N/CN, CN, N\\S => S")
    assert code == 0 and "derivable: 1 proof" in out and "-- proof 1" in out
    code, out = run("oracle", "--calc", "nl", "[A\\B, B\\C] => A\\C")
    assert code == 1 and "underivable: 0 proofs" in out


def test_compare_small():
    code, out = run("compare", "--max-connectives", "2")
    assert code == 0
    assert "exhaustive through 2 connectives" in out and "0 mismatches" in out
    code, out = run("compare", "--calc", "nl", "--regime", "simultaneous", "--max-connectives", "2")
    assert code == 0 and "0 mismatches" in out


def test_compare_sample_is_reproducible():
    a = run("compare", "--max-connectives", "4", "--sample", "20", "--seed", "3")
    b = run("compare", "--max-connectives", "4", "--sample", "20", "--seed", "3")
    assert a[0] == 0 and a[1].splitlines()[-1].split(",")[:3] == b[1].splitlines()[-1].split(",")[:3]
    assert "random sample" in a[1]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "lambek_llp", "prove", "A => B/(A\\B)"], capture_output=True, text=True)
    assert r.returncode == 0 and "derivable" in r.stdout
