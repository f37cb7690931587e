import pytest
from hypothesis import strategies as st

from lambek_llp.formula import Atom, ModeTable, Over, Prod, Under


@pytest.fixture
def l_modes():
    return ModeTable.for_calc("l")


@pytest.fixture
def nl_modes():
    return ModeTable.for_calc("nl")


atoms = st.sampled_from([Atom("A"), Atom("B"), Atom("NP"), Atom("S")])


def formulas(products=True, max_leaves=8):
    ops = [Under, Over, Prod] if products else [Under, Over]
    return st.recursive(
        atoms,
        lambda sub: st.builds(lambda op, a, b: op(a, b), st.sampled_from(ops), sub, sub),
        max_leaves=max_leaves,
    )


def composition_proof(mode):
    """Hand-built NL proof of composition in ``mode``: \\R, Ass, then two \\L steps."""
    from lambek_llp.formula import Leaf, Node, SequentNL
    from lambek_llp.sequent_oracle import ProofTree

    A, B, C = Atom("A"), Atom("B"), Atom("C")
    f, g = Under(A, B, mode), Under(B, C, mode)

    def seq(c, succ):
        return SequentNL(c, succ)

    def ident(x):
        return ProofTree(seq(Leaf(x), x), "id")

    inner = ProofTree(seq(Node(Leaf(A), Leaf(f), mode), B), "\\L", (ident(A), ident(B)))
    outer = ProofTree(seq(Node(Node(Leaf(A), Leaf(f), mode), Leaf(g), mode), C), "\\L", (inner, ident(C)))
    ass = ProofTree(seq(Node(Leaf(A), Node(Leaf(f), Leaf(g), mode), mode), C), "Ass", (outer,))
    return ProofTree(seq(Node(Leaf(f), Leaf(g), mode), Under(A, C, mode)), "\\R", (ass,))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
