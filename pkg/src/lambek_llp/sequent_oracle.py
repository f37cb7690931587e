"""Cut-free backward-chaining sequent provers for L, NL and focused L.

The provers are deliberately naive Gentzen search (generate and test over
antecedent partitions) so that they stay independent of the clausal engine.
``id`` is restricted to atoms throughout, so every rule strictly removes one
connective and every stream is finite.

Pruning uses the atom-count invariant: a product-free or product-containing
sequent can only be derivable when each atom occurs equally often
positively and negatively.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from .errors import ProductNotSupported
from .formula import (
    DEFAULT_MODE,
    Atom,
    Formula,
    Leaf,
    Node,
    Over,
    Prod,
    SequentL,
    SequentNL,
    Under,
    eventual_range,
    format_config,
    format_formula,
    format_sequent,
    has_product,
    leaves,
)


@dataclass(frozen=True)
class FocusSequent:
    """Sequent of the focused calculus.

    ``focus`` indexes the boxed antecedent occurrence (or is None);
    ``boxed_succedent`` marks the right-phase sequents ``G => [A]``.
    """

    antecedent: tuple
    focus: int | None
    boxed_succedent: bool
    succedent: Formula

    def __str__(self):
        items = [
            f"[{format_formula(f)}]" if i == self.focus else format_formula(f)
            for i, f in enumerate(self.antecedent)
        ]
        succ = format_formula(self.succedent)
        return f"{', '.join(items)} => {'[' + succ + ']' if self.boxed_succedent else succ}"


@dataclass(frozen=True)
class ProofTree:
    conclusion: Union[SequentL, SequentNL, FocusSequent]
    rule: str
    premises: tuple = ()


RULE_ARITY = {
    "id": 0, "id*": 0,
    "\\R": 1, "/R": 1, "*L": 1, "P*": 1, "Ass": 1,
    "\\L": 2, "/L": 2, "*R": 2, "\\L*": 2, "/L*": 2,
}


def render_proof(tree: ProofTree) -> str:
    """Indented tree, one sequent per line, rule tags right-aligned."""
    rows = []

    def visit(t, depth):
        c = t.conclusion
        text = str(c) if isinstance(c, FocusSequent) else format_sequent(c)
        rows.append(("  " * depth + text, t.rule))
        for p in t.premises:
            visit(p, depth + 1)

    visit(tree, 0)
    width = max(len(text) for text, _ in rows) + 2
    tag_width = max(len(rule) for _, rule in rows)
    return "\n".join(text.ljust(width) + rule.rjust(tag_width) for text, rule in rows)


# -- atom-count invariant --------------------------------------------------------


@lru_cache(maxsize=None)
def _polar_count(f: Formula) -> tuple:
    """Net (positive - negative) atom occurrences of ``f`` read positively."""
    c: Counter = Counter()
    stack = [(f, 1)]
    while stack:
        g, sign = stack.pop()
        if isinstance(g, Atom):
            c[g.name] += sign
        elif isinstance(g, Prod):
            stack.append((g.left, sign))
            stack.append((g.right, sign))
        else:
            stack.append((g.result, sign))
            stack.append((g.argument, -sign))
    return tuple(sorted((k, v) for k, v in c.items() if v))


def count_balanced(antecedent, succedent: Formula) -> bool:
    total: Counter = Counter()
    for f in antecedent:
        for k, v in _polar_count(f):
            total[k] += v
    for k, v in _polar_count(succedent):
        total[k] -= v
    return not any(total.values())


# -- L --------------------------------------------------------------------------------


def _l_proofs(ante: tuple, succ: Formula) -> Iterator[ProofTree]:
    if not _l_derivable(ante, succ):
        return
    concl = SequentL(ante, succ)
    if len(ante) == 1 and isinstance(succ, Atom) and ante[0] == succ:
        yield ProofTree(concl, "id")
    if isinstance(succ, Under):
        for p in _l_proofs((succ.argument,) + ante, succ.result):
            yield ProofTree(concl, "\\R", (p,))
    elif isinstance(succ, Over):
        for p in _l_proofs(ante + (succ.argument,), succ.result):
            yield ProofTree(concl, "/R", (p,))
    elif isinstance(succ, Prod):
        for i in range(1, len(ante)):
            for p1 in _l_proofs(ante[:i], succ.left):
                for p2 in _l_proofs(ante[i:], succ.right):
                    yield ProofTree(concl, "*R", (p1, p2))
    for idx, f in enumerate(ante):
        if isinstance(f, Under):
            for q in range(idx - 1, -1, -1):
                rest = ante[:q] + (f.result,) + ante[idx + 1:]
                for p1 in _l_proofs(ante[q:idx], f.argument):
                    for p2 in _l_proofs(rest, succ):
                        yield ProofTree(concl, "\\L", (p1, p2))
        elif isinstance(f, Over):
            for r in range(idx + 2, len(ante) + 1):
                rest = ante[:idx] + (f.result,) + ante[r:]
                for p1 in _l_proofs(ante[idx + 1:r], f.argument):
                    for p2 in _l_proofs(rest, succ):
                        yield ProofTree(concl, "/L", (p1, p2))
        elif isinstance(f, Prod):
            for p in _l_proofs(ante[:idx] + (f.left, f.right) + ante[idx + 1:], succ):
                yield ProofTree(concl, "*L", (p,))


@lru_cache(maxsize=1 << 20)
def _l_derivable(ante: tuple, succ: Formula) -> bool:
    if not count_balanced(ante, succ):
        return False
    if len(ante) == 1 and isinstance(succ, Atom) and ante[0] == succ:
        return True
    if isinstance(succ, Under):
        if _l_derivable((succ.argument,) + ante, succ.result):
            return True
    elif isinstance(succ, Over):
        if _l_derivable(ante + (succ.argument,), succ.result):
            return True
    elif isinstance(succ, Prod):
        for i in range(1, len(ante)):
            if _l_derivable(ante[:i], succ.left) and _l_derivable(ante[i:], succ.right):
                return True
    for idx, f in enumerate(ante):
        if isinstance(f, Under):
            for q in range(idx - 1, -1, -1):
                if _l_derivable(ante[q:idx], f.argument) and _l_derivable(
                    ante[:q] + (f.result,) + ante[idx + 1:], succ
                ):
                    return True
        elif isinstance(f, Over):
            for r in range(idx + 2, len(ante) + 1):
                if _l_derivable(ante[idx + 1:r], f.argument) and _l_derivable(
                    ante[:idx] + (f.result,) + ante[r:], succ
                ):
                    return True
        elif isinstance(f, Prod):
            if _l_derivable(ante[:idx] + (f.left, f.right) + ante[idx + 1:], succ):
                return True
    return False


@lru_cache(maxsize=1 << 18)
def _l_count(ante: tuple, succ: Formula) -> int:
    if not _l_derivable(ante, succ):
        return 0
    n = 1 if (len(ante) == 1 and isinstance(succ, Atom) and ante[0] == succ) else 0
    if isinstance(succ, Under):
        n += _l_count((succ.argument,) + ante, succ.result)
    elif isinstance(succ, Over):
        n += _l_count(ante + (succ.argument,), succ.result)
    elif isinstance(succ, Prod):
        for i in range(1, len(ante)):
            n += _l_count(ante[:i], succ.left) * _l_count(ante[i:], succ.right)
    for idx, f in enumerate(ante):
        if isinstance(f, Under):
            for q in range(idx - 1, -1, -1):
                n += _l_count(ante[q:idx], f.argument) * _l_count(ante[:q] + (f.result,) + ante[idx + 1:], succ)
        elif isinstance(f, Over):
            for r in range(idx + 2, len(ante) + 1):
                n += _l_count(ante[idx + 1:r], f.argument) * _l_count(ante[:idx] + (f.result,) + ante[r:], succ)
        elif isinstance(f, Prod):
            n += _l_count(ante[:idx] + (f.left, f.right) + ante[idx + 1:], succ)
    return n


def _limited(stream, limit):
    return stream if not limit else itertools.islice(stream, limit)


def prove_l(s: SequentL, limit: int = 0) -> Iterator[ProofTree]:
    """Cut-free proofs of ``s`` in L (0 = no limit)."""
    return _limited(_l_proofs(tuple(s.antecedent), s.succedent), limit)


# -- NL ------------------------------------------------------------------------------------


def _subconfigs(c):
    """Every subconfiguration with a function plugging a replacement back in."""
    yield c, lambda x: x
    if isinstance(c, Node):
        for sub, plug in _subconfigs(c.left):
            yield sub, (lambda x, plug=plug: Node(plug(x), c.right, c.mode))
        for sub, plug in _subconfigs(c.right):
            yield sub, (lambda x, plug=plug: Node(c.left, plug(x), c.mode))


def _nl_rules(c, succ):
    """Rule instances (tag, premises) applicable to ``c => succ``."""
    if isinstance(c, Leaf) and isinstance(succ, Atom) and c.formula == succ:
        yield "id", ()
    if isinstance(succ, Under):
        yield "\\R", ((Node(Leaf(succ.argument), c, succ.mode), succ.result),)
    elif isinstance(succ, Over):
        yield "/R", ((Node(c, Leaf(succ.argument), succ.mode), succ.result),)
    elif isinstance(succ, Prod):
        if isinstance(c, Node) and c.mode == succ.mode:
            yield "*R", ((c.left, succ.left), (c.right, succ.right))
    for sub, plug in _subconfigs(c):
        if isinstance(sub, Node):
            r = sub.right
            if isinstance(r, Leaf) and isinstance(r.formula, Under) and r.formula.mode == sub.mode:
                f = r.formula
                yield "\\L", ((sub.left, f.argument), (plug(Leaf(f.result)), succ))
            lft = sub.left
            if isinstance(lft, Leaf) and isinstance(lft.formula, Over) and lft.formula.mode == sub.mode:
                f = lft.formula
                yield "/L", ((sub.right, f.argument), (plug(Leaf(f.result)), succ))
        elif isinstance(sub.formula, Prod):
            f = sub.formula
            yield "*L", ((plug(Node(Leaf(f.left), Leaf(f.right), f.mode)), succ),)


@lru_cache(maxsize=1 << 20)
def _nl_derivable(c, succ) -> bool:
    if not count_balanced(leaves(c), succ):
        return False
    for _, prems in _nl_rules(c, succ):
        if all(_nl_derivable(pc, ps) for pc, ps in prems):
            return True
    return False


@lru_cache(maxsize=1 << 18)
def _nl_count(c, succ) -> int:
    if not _nl_derivable(c, succ):
        return 0
    n = 0
    for _, prems in _nl_rules(c, succ):
        k = 1
        for pc, ps in prems:
            k *= _nl_count(pc, ps)
            if not k:
                break
        n += k
    return n


def _nl_proofs(c, succ):
    if not _nl_derivable(c, succ):
        return
    concl = SequentNL(c, succ)
    for tag, prems in _nl_rules(c, succ):
        streams = [lambda pc=pc, ps=ps: _nl_proofs(pc, ps) for pc, ps in prems]
        for subproofs in _product_lazy(streams):
            yield ProofTree(concl, tag, tuple(subproofs))


def _product_lazy(thunks):
    """Cartesian product where later streams are re-created per prefix."""
    if not thunks:
        yield ()
        return
    for first in thunks[0]():
        for rest in _product_lazy(thunks[1:]):
            yield (first,) + rest


def prove_nl(s: SequentNL, limit: int = 0) -> Iterator[ProofTree]:
    """Cut-free proofs of ``s`` in NL; rules respect the bracketing."""
    return _limited(_nl_proofs(s.antecedent, s.succedent), limit)


# -- focused L --------------------------------------------------------------------------------


def _boxed_right(ante: tuple, succ: Formula):
    """Proofs of ``ante => [succ]``: right rules first, then P*."""
    if not _boxed_right_ok(ante, succ):
        return
    concl = FocusSequent(ante, None, True, succ)
    if isinstance(succ, Under):
        for p in _boxed_right((succ.argument,) + ante, succ.result):
            yield ProofTree(concl, "\\R", (p,))
    elif isinstance(succ, Over):
        for p in _boxed_right(ante + (succ.argument,), succ.result):
            yield ProofTree(concl, "/R", (p,))
    else:
        for idx, f in enumerate(ante):
            if eventual_range(f) == succ:
                for p in _focused(ante, idx, succ):
                    yield ProofTree(concl, "P*", (p,))


def _focused(ante: tuple, idx: int, succ: Atom):
    """Proofs of ``G1, [ante[idx]], G2 => succ`` with atomic succedent."""
    if not _focused_ok(ante, idx, succ):
        return
    f = ante[idx]
    concl = FocusSequent(ante, idx, False, succ)
    if isinstance(f, Atom):
        if len(ante) == 1 and f == succ:
            yield ProofTree(concl, "id*")
    elif isinstance(f, Under):
        for q in range(idx - 1, -1, -1):
            for p1 in _boxed_right(ante[q:idx], f.argument):
                for p2 in _focused(ante[:q] + (f.result,) + ante[idx + 1:], q, succ):
                    yield ProofTree(concl, "\\L*", (p1, p2))
    elif isinstance(f, Over):
        for r in range(idx + 2, len(ante) + 1):
            for p1 in _boxed_right(ante[idx + 1:r], f.argument):
                for p2 in _focused(ante[:idx] + (f.result,) + ante[r:], idx, succ):
                    yield ProofTree(concl, "/L*", (p1, p2))


@lru_cache(maxsize=1 << 20)
def _boxed_right_ok(ante, succ) -> bool:
    if not count_balanced(ante, succ):
        return False
    if isinstance(succ, Under):
        return _boxed_right_ok((succ.argument,) + ante, succ.result)
    if isinstance(succ, Over):
        return _boxed_right_ok(ante + (succ.argument,), succ.result)
    return any(eventual_range(f) == succ and _focused_ok(ante, i, succ) for i, f in enumerate(ante))


@lru_cache(maxsize=1 << 20)
def _focused_ok(ante, idx, succ) -> bool:
    f = ante[idx]
    if isinstance(f, Atom):
        return len(ante) == 1 and f == succ
    if isinstance(f, Under):
        return any(
            _boxed_right_ok(ante[q:idx], f.argument)
            and _focused_ok(ante[:q] + (f.result,) + ante[idx + 1:], q, succ)
            for q in range(idx - 1, -1, -1)
        )
    return any(
        _boxed_right_ok(ante[idx + 1:r], f.argument)
        and _focused_ok(ante[:idx] + (f.result,) + ante[r:], idx, succ)
        for r in range(idx + 2, len(ante) + 1)
    )


@lru_cache(maxsize=1 << 18)
def _boxed_count(ante, succ) -> int:
    if not _boxed_right_ok(ante, succ):
        return 0
    if isinstance(succ, Under):
        return _boxed_count((succ.argument,) + ante, succ.result)
    if isinstance(succ, Over):
        return _boxed_count(ante + (succ.argument,), succ.result)
    return sum(_focused_count(ante, i, succ) for i, f in enumerate(ante) if eventual_range(f) == succ)


@lru_cache(maxsize=1 << 18)
def _focused_count(ante, idx, succ) -> int:
    if not _focused_ok(ante, idx, succ):
        return 0
    f = ante[idx]
    if isinstance(f, Atom):
        return 1
    n = 0
    if isinstance(f, Under):
        for q in range(idx - 1, -1, -1):
            n += _boxed_count(ante[q:idx], f.argument) * _focused_count(ante[:q] + (f.result,) + ante[idx + 1:], q, succ)
    else:
        for r in range(idx + 2, len(ante) + 1):
            n += _boxed_count(ante[idx + 1:r], f.argument) * _focused_count(ante[:idx] + (f.result,) + ante[r:], idx, succ)
    return n


def prove_boxed_l(s: SequentL, limit: int = 0) -> Iterator[ProofTree]:
    """Proofs of ``s`` in the focused calculus (product-free L only)."""
    if any(has_product(f) for f in s.antecedent) or has_product(s.succedent):
        raise ProductNotSupported("the focused calculus covers product-free sequents only")
    return _limited(_boxed_right(tuple(s.antecedent), s.succedent), limit)


# -- counting and derivability ----------------------------------------------------------------


def count_proofs(prover, s) -> int:
    """Length of the prover's (finite) proof stream for ``s``."""
    return sum(1 for _ in prover(s))


def proof_count(calc: str, s) -> int:
    """Memoised equivalent of ``count_proofs`` for bulk enumeration."""
    if calc == "l":
        return _l_count(tuple(s.antecedent), s.succedent)
    if calc == "nl":
        return _nl_count(s.antecedent, s.succedent)
    if calc == "boxedl":
        if any(has_product(f) for f in s.antecedent) or has_product(s.succedent):
            raise ProductNotSupported("the focused calculus covers product-free sequents only")
        return _boxed_count(tuple(s.antecedent), s.succedent)
    raise ValueError(f"unknown calculus {calc!r}")


def derivable(calc: str, s) -> bool:
    if calc == "l":
        return _l_derivable(tuple(s.antecedent), s.succedent)
    if calc == "nl":
        return _nl_derivable(s.antecedent, s.succedent)
    if calc == "boxedl":
        if any(has_product(f) for f in s.antecedent) or has_product(s.succedent):
            raise ProductNotSupported("the focused calculus covers product-free sequents only")
        return _boxed_right_ok(tuple(s.antecedent), s.succedent)
    raise ValueError(f"unknown calculus {calc!r}")


PROVERS = {"l": prove_l, "nl": prove_nl, "boxedl": prove_boxed_l}


# -- independent proof checking ----------------------------------------------------------------


def _check_l_step(t: ProofTree) -> bool:
    c = t.conclusion
    ante, succ = tuple(c.antecedent), c.succedent
    prem = [p.conclusion for p in t.premises]
    if any(not isinstance(p, SequentL) for p in prem):
        return False
    r = t.rule
    if r == "id":
        return len(ante) == 1 and isinstance(succ, Atom) and ante[0] == succ
    if r == "\\R":
        return isinstance(succ, Under) and prem[0] == SequentL((succ.argument,) + ante, succ.result)
    if r == "/R":
        return isinstance(succ, Over) and prem[0] == SequentL(ante + (succ.argument,), succ.result)
    if r == "*R":
        a, b = prem
        return isinstance(succ, Prod) and a.succedent == succ.left and b.succedent == succ.right and (
            a.antecedent + b.antecedent == ante
        )
    if r in ("\\L", "/L"):
        arg, main = prem
        if main.succedent != succ:
            return False
        g = arg.antecedent
        for idx, f in enumerate(ante):
            if r == "\\L" and isinstance(f, Under) and f.argument == arg.succedent:
                q = idx - len(g)
                if q >= 0 and ante[q:idx] == g and main.antecedent == ante[:q] + (f.result,) + ante[idx + 1:]:
                    return True
            if r == "/L" and isinstance(f, Over) and f.argument == arg.succedent:
                e = idx + 1 + len(g)
                if ante[idx + 1:e] == g and main.antecedent == ante[:idx] + (f.result,) + ante[e:]:
                    return True
        return False
    if r == "*L":
        (p,) = prem
        return p.succedent == succ and any(
            isinstance(f, Prod) and p.antecedent == ante[:i] + (f.left, f.right) + ante[i + 1:]
            for i, f in enumerate(ante)
        )
    return False


def _reassociations(c, modes):
    """Configurations one associativity step from ``c``, in modes marked associative."""
    for sub, plug in _subconfigs(c):
        if not isinstance(sub, Node) or modes is None or not modes.is_assoc(sub.mode):
            continue
        m = sub.mode
        if isinstance(sub.left, Node) and sub.left.mode == m:
            yield plug(Node(sub.left.left, Node(sub.left.right, sub.right, m), m))
        if isinstance(sub.right, Node) and sub.right.mode == m:
            yield plug(Node(Node(sub.left, sub.right.left, m), sub.right.right, m))


def _check_nl_step(t: ProofTree, modes=None) -> bool:
    c = t.conclusion
    prem = [p.conclusion for p in t.premises]
    if any(not isinstance(p, SequentNL) for p in prem):
        return False
    if t.rule == "Ass":
        return prem[0].succedent == c.succedent and prem[0].antecedent in set(_reassociations(c.antecedent, modes))
    allowed = {(t2, tuple((pc, ps) for pc, ps in ps_)) for t2, ps_ in _nl_rules(c.antecedent, c.succedent)}
    got = (t.rule, tuple((p.antecedent, p.succedent) for p in prem))
    # _nl_rules enumerates instances from the rule schemata; a step is valid iff it is one of them
    return got in allowed


def _check_boxed_step(t: ProofTree) -> bool:
    c = t.conclusion
    prem = [p.conclusion for p in t.premises]
    ante, succ = c.antecedent, c.succedent
    r = t.rule
    if r in ("\\R", "/R"):
        p = prem[0]
        if not (c.boxed_succedent and c.focus is None and p.boxed_succedent and p.focus is None):
            return False
        if r == "\\R":
            return isinstance(succ, Under) and p.antecedent == (succ.argument,) + ante and p.succedent == succ.result
        return isinstance(succ, Over) and p.antecedent == ante + (succ.argument,) and p.succedent == succ.result
    if r == "P*":
        p = prem[0]
        return (
            c.boxed_succedent and c.focus is None and isinstance(succ, Atom)
            and not p.boxed_succedent and p.focus is not None
            and p.antecedent == ante and p.succedent == succ
            and eventual_range(ante[p.focus]) == succ
        )
    if r == "id*":
        return c.focus == 0 and len(ante) == 1 and ante[0] == succ and isinstance(succ, Atom)
    if r in ("\\L*", "/L*"):
        arg, main = prem
        if c.focus is None or c.boxed_succedent or not isinstance(succ, Atom):
            return False
        if not arg.boxed_succedent or arg.focus is not None or main.boxed_succedent:
            return False
        f = ante[c.focus]
        g = arg.antecedent
        if r == "\\L*":
            q = c.focus - len(g)
            return (
                isinstance(f, Under) and arg.succedent == f.argument and len(g) > 0 and q >= 0
                and ante[q:c.focus] == g
                and main.antecedent == ante[:q] + (f.result,) + ante[c.focus + 1:]
                and main.focus == q and main.succedent == succ
            )
        e = c.focus + 1 + len(g)
        return (
            isinstance(f, Over) and arg.succedent == f.argument and len(g) > 0
            and ante[c.focus + 1:e] == g
            and main.antecedent == ante[:c.focus] + (f.result,) + ante[e:]
            and main.focus == c.focus and main.succedent == succ
        )
    return False


def check_proof(tree: ProofTree, modes=None) -> bool:
    """Re-validate every rule instance of ``tree`` bottom-up.

    With a mode table, NL proofs may also use ``Ass`` (rebracketing) steps
    inside nodes of associative modes; the provers never produce them.
    """
    if RULE_ARITY.get(tree.rule) != len(tree.premises):
        return False
    c = tree.conclusion
    if isinstance(c, SequentL):
        ok = _check_l_step(tree)
    elif isinstance(c, SequentNL):
        ok = _check_nl_step(tree, modes)
    else:
        ok = _check_boxed_step(tree)
    return ok and all(check_proof(p, modes) for p in tree.premises)


# -- enumeration -------------------------------------------------------------------------------------


def formulas_of_size(atoms, n: int, products: bool = False) -> list:
    return list(_formulas(tuple(atoms), n, products))


@lru_cache(maxsize=None)
def _formulas(atoms: tuple, n: int, products: bool) -> tuple:
    if n == 0:
        return tuple(Atom(a) for a in atoms)
    out = []
    for left_size in range(n):
        for a in _formulas(atoms, left_size, products):
            for b in _formulas(atoms, n - 1 - left_size, products):
                out.append(Under(a, b))
                out.append(Over(a, b))
                if products:
                    out.append(Prod(a, b))
    return tuple(out)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def bracketings(items: tuple, mode: str = DEFAULT_MODE) -> list:
    """All binary configuration trees over ``items`` in order."""
    if len(items) == 1:
        return [Leaf(items[0])]
    out = []
    for i in range(1, len(items)):
        for left in bracketings(items[:i], mode):
            for right in bracketings(items[i:], mode):
                out.append(Node(left, right, mode))
    return out


def enumerate_sequents(atoms, max_connectives: int, calc: str = "l", products: bool = False, min_connectives: int = 0):
    """Every sequent over ``atoms`` with at most ``max_connectives`` connectives.

    Ordered by total connective count, then antecedent length, then the
    distribution of connectives over positions.  A sequent with ``t``
    connectives has at most ``t + 1`` antecedent types: no longer sequent is
    derivable (every rule keeps types <= connectives + 1), so each level is
    complete for theorems.  For NL each list is expanded into all its binary
    bracketings.
    """
    atoms = tuple(atoms)
    for total in range(min_connectives, max_connectives + 1):
        for k in range(1, total + 2):
            for sizes in _compositions(total, k + 1):
                pools = [_formulas(atoms, n, products) for n in sizes]
                for combo in itertools.product(*pools):
                    ante, succ = combo[:-1], combo[-1]
                    if calc == "nl":
                        for c in bracketings(ante):
                            yield SequentNL(c, succ)
                    else:
                        yield SequentL(ante, succ)


@lru_cache(maxsize=None)
def _formulas_by_signature(atoms: tuple, n: int, products: bool) -> dict:
    groups: dict = {}
    for f in _formulas(atoms, n, products):
        d = dict(_polar_count(f))
        groups.setdefault(tuple(d.get(a, 0) for a in atoms), []).append(f)
    return {k: tuple(v) for k, v in sorted(groups.items())}


def balanced_sequents(atoms, max_connectives: int, calc: str = "l", products: bool = False, min_connectives: int = 0):
    """The count-balanced part of ``enumerate_sequents``, level by level.

    Formulas are grouped by their net atom counts, so unbalanced sequents
    (underivable by the count invariant) are never built.
    """
    atoms = tuple(atoms)
    for total in range(min_connectives, max_connectives + 1):
        for k in range(1, total + 2):
            for sizes in _compositions(total, k + 1):
                ante_groups = [_formulas_by_signature(atoms, n, products) for n in sizes[:-1]]
                succ_groups = _formulas_by_signature(atoms, sizes[-1], products)
                for keys in itertools.product(*ante_groups):
                    net = tuple(map(sum, zip(*keys)))
                    if net not in succ_groups:
                        continue
                    pools = [g[key] for g, key in zip(ante_groups, keys)]
                    for ante in itertools.product(*pools):
                        for succ in succ_groups[net]:
                            if calc == "nl":
                                for c in bracketings(ante):
                                    yield SequentNL(c, succ)
                            else:
                                yield SequentL(ante, succ)


def sequent_space_size(n_atoms: int, max_connectives: int, calc: str = "l", min_connectives: int = 0) -> int:
    """Closed-form count of ``enumerate_sequents`` output (product-free)."""
    from math import comb

    def catalan(n):
        return comb(2 * n, n) // (n + 1)

    f = [catalan(c) * 2 ** c * n_atoms ** (c + 1) for c in range(max_connectives + 1)]
    total = 0
    for t in range(min_connectives, max_connectives + 1):
        for k in range(1, t + 2):
            ways = 0
            for sizes in _compositions(t, k + 1):
                w = 1
                for s in sizes:
                    w *= f[s]
                ways += w
            total += ways * (catalan(k - 1) if calc == "nl" else 1)
    return total


def config_str(c) -> str:
    return format_config(c)


def _formula_count(n_atoms: int, size: int) -> int:
    from math import comb

    return comb(2 * size, size) // (size + 1) * 2 ** size * n_atoms ** (size + 1)


def random_formula(atoms, size: int, rng, products: bool = False) -> Formula:
    """Uniformly random formula with exactly ``size`` connectives."""
    if size == 0:
        return Atom(rng.choice(list(atoms)))
    weights = [_formula_count(len(atoms), i) * _formula_count(len(atoms), size - 1 - i) for i in range(size)]
    left_size = rng.choices(range(size), weights=weights)[0]
    a = random_formula(atoms, left_size, rng, products)
    b = random_formula(atoms, size - 1 - left_size, rng, products)
    ops = (Under, Over, Prod) if products else (Under, Over)
    return rng.choice(ops)(a, b)


@lru_cache(maxsize=None)
def _shape_table(n_atoms: int, total: int, max_length: int, calc: str):
    from math import comb

    shapes, weights = [], []
    for k in range(1, max_length + 1):
        for sizes in _compositions(total, k + 1):
            w = 1
            for s in sizes:
                w *= _formula_count(n_atoms, s)
            if calc == "nl":
                w *= comb(2 * (k - 1), k - 1) // k
            shapes.append(tuple(sizes))
            weights.append(w)
    return shapes, weights


def random_sequent(atoms, total: int, rng, max_length: int | None = None, calc: str = "l"):
    """Uniform draw from the ``enumerate_sequents`` level with ``total`` connectives."""
    max_length = total + 1 if max_length is None else max_length
    shapes, weights = _shape_table(len(atoms), total, max_length, calc)
    sizes = rng.choices(shapes, weights=weights)[0]
    fs = [random_formula(atoms, s, rng) for s in sizes]
    ante, succ = tuple(fs[:-1]), fs[-1]
    if calc == "nl":
        return SequentNL(_random_bracketing(ante, rng), succ)
    return SequentL(ante, succ)


def _random_bracketing(items, rng, mode: str = DEFAULT_MODE):
    """Uniform binary bracketing, by Catalan-weighted split points."""
    from math import comb

    if len(items) == 1:
        return Leaf(items[0])
    k = len(items)
    cat = [comb(2 * i, i) // (i + 1) for i in range(k)]
    split = rng.choices(range(1, k), weights=[cat[i - 1] * cat[k - i - 1] for i in range(1, k)])[0]
    return Node(_random_bracketing(items[:split], rng, mode), _random_bracketing(items[split:], rng, mode), mode)
