"""Compilation of labelled type assignments into linear clauses.

A sequent ``B1, ..., Bn => A`` becomes a Program: one flattened clause per
antecedent type (the database) and the negative unfolding of the succedent
(the agenda).  Three labelling regimes are supported:

* groupoid: prosodic terms built from ``+`` (one operator per mode);
* relational: string-position spans ``i-j``;
* simultaneous: both, with term equations deferred to the end of search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from .errors import (
    NegativeProductInGroupoidRegime,
    ParseError,
    PositiveProduct,
    RegimeMismatch,
    UnknownWord,
)
from .formula import (
    DEFAULT_MODE,
    Atom,
    Formula,
    Leaf,
    Lexicon,
    ModeTable,
    Node,
    Over,
    Prod,
    SequentL,
    SequentNL,
    Under,
    format_sequent,
    iter_formulas,
    leaves,
    modes_used,
    parse_bracketed_words,
    parse_sequent,
)
from .labels import (
    At,
    Const,
    Label,
    Plus,
    QueryContext,
    Span,
    Var,
    format_label,
    format_term,
    substitute,
)


class Regime(Enum):
    GROUPOID = "groupoid"
    RELATIONAL = "relational"
    SIMULTANEOUS = "simultaneous"

    @property
    def has_terms(self):
        return self is not Regime.RELATIONAL

    @property
    def has_spans(self):
        return self is not Regime.GROUPOID


@dataclass(frozen=True)
class AtomGoal:
    predicate: str
    label: Label


@dataclass(frozen=True)
class Clause:
    head: AtomGoal
    body: tuple = ()
    id: str = ""
    skolems: frozenset = frozenset()


@dataclass(frozen=True)
class Hypothetical:
    """``inner ∘- hypothesis``: prove ``inner`` with ``hypothesis`` added.

    ``inner`` is a tuple of goals so that negative products inside the
    result of an implication stay expressible.  ``guard`` is the span of the
    negative implication; it must not be empty (L has no empty antecedents).
    """

    inner: tuple
    hypothesis: Clause
    skolems: frozenset = frozenset()
    guard: Optional[Span] = None


Goal = Union[AtomGoal, Hypothetical]


@substitute.register
def _(x: AtomGoal, s):
    return AtomGoal(x.predicate, substitute(x.label, s))


@substitute.register
def _(x: Clause, s):
    return Clause(substitute(x.head, s), tuple(substitute(g, s) for g in x.body), x.id, x.skolems)


@substitute.register
def _(x: Hypothetical, s):
    guard = substitute(x.guard, s) if x.guard is not None else None
    return Hypothetical(tuple(substitute(g, s) for g in x.inner), substitute(x.hypothesis, s), x.skolems, guard)


@dataclass(frozen=True)
class SignedAssignment:
    formula: Formula
    label: Label
    positive: bool

    def __str__(self):
        from .formula import format_formula

        return f"{format_label(self.label)}: {format_formula(self.formula)}{'+' if self.positive else '-'}"


# -- unfolded formulas ---------------------------------------------------------------------


@dataclass(frozen=True)
class ULeaf:
    goal: AtomGoal


@dataclass(frozen=True)
class UImpl:
    """``result ∘- argument``; skolems are the constants introduced here."""

    result: "Unfolded"
    argument: "Unfolded"
    skolems: frozenset = frozenset()
    span: Optional[Span] = None


@dataclass(frozen=True)
class UTensor:
    left: "Unfolded"
    right: "Unfolded"


Unfolded = Union[ULeaf, UImpl, UTensor]


@dataclass
class Program:
    database: tuple
    agenda: tuple
    regime: Regime
    modes: ModeTable
    root_var: Optional[Var]
    source: object
    equations: tuple = ()
    lexical: tuple = ()  # groupoid constants of the antecedent items, in order
    words: tuple = ()
    ctx: QueryContext = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.database)

    def clause_count(self) -> int:
        """Initial clauses plus every hypothesis that DT can add."""
        n = 0
        stack = list(self.database) + list(self.agenda)
        while stack:
            x = stack.pop()
            if isinstance(x, Clause):
                n += 1
                stack.extend(x.body)
            elif isinstance(x, Hypothetical):
                stack.extend(x.inner)
                stack.append(x.hypothesis)
        return n

    def atom_goals(self) -> list:
        """Every atomic predication in the program (heads and goals)."""
        out = []
        stack = list(self.database) + list(self.agenda)
        while stack:
            x = stack.pop()
            if isinstance(x, Clause):
                out.append(x.head)
                stack.extend(x.body)
            elif isinstance(x, Hypothetical):
                stack.extend(x.inner)
                stack.append(x.hypothesis)
            else:
                out.append(x)
        return out


# -- rendering -------------------------------------------------------------------------------


def format_goal(g: Goal, wrap: bool = False) -> str:
    if isinstance(g, AtomGoal):
        return f"{format_label(g.label)}: {g.predicate}"
    if len(g.inner) == 1:
        inner = format_goal(g.inner[0], wrap=isinstance(g.inner[0], Hypothetical))
    else:
        inner = "(" + format_goals(g.inner) + ")"
    hyp = format_clause(g.hypothesis)
    if g.hypothesis.body:
        hyp = f"({hyp})"
    text = f"{inner} ∘- {hyp}"
    return f"({text})" if wrap else text


def format_goals(goals) -> str:
    many = len(goals) > 1
    return " ⊗ ".join(format_goal(g, wrap=many) for g in goals)


def format_clause(c: Clause) -> str:
    head = format_goal(c.head)
    if not c.body:
        return head
    many = len(c.body) > 1
    body = " ⊗ ".join(format_goal(g, wrap=many or isinstance(g, Hypothetical)) for g in c.body)
    return f"{head} ∘- {body}"


def format_program(p: Program) -> str:
    lines = ["database:"]
    lines += [f"  {c.id}. {format_clause(c)}" for c in p.database]
    lines.append("agenda:")
    lines.append(f"  {format_goals(p.agenda)}")
    if p.equations:
        lines.append("equations:")
        lines += [f"  {format_term(a)} = {format_term(b)}" for a, b in p.equations]
    return "\n".join(lines)


# -- unfolding ---------------------------------------------------------------------------------


class _Unfolder:
    def __init__(self, regime: Regime, ctx: QueryContext):
        self.regime = regime
        self.ctx = ctx
        self.equations: list = []

    def fresh_term(self, positive):
        if not self.regime.has_terms:
            return None
        return self.ctx.fresh_var() if positive else self.ctx.fresh_const()

    def fresh_position(self, positive):
        if not self.regime.has_spans:
            return None
        return self.ctx.fresh_posvar() if positive else self.ctx.fresh_position()

    def unfold(self, f: Formula, label: Label, positive: bool) -> Unfolded:
        if isinstance(f, Atom):
            return ULeaf(AtomGoal(f.name, label))
        if isinstance(f, Prod):
            if positive:
                raise PositiveProduct(f)
            if self.regime is Regime.GROUPOID:
                raise NegativeProductInGroupoidRegime(f)
            a = b = None
            if self.regime.has_terms:
                a, b = self.ctx.fresh_var(), self.ctx.fresh_var()
                self.equations.append((label.term, Plus(a, b, f.mode)))
            j = self.ctx.fresh_posvar()
            sp = label.span
            return UTensor(
                self.unfold(f.left, Label(a, Span(sp.start, j)), False),
                self.unfold(f.right, Label(b, Span(j, sp.end)), False),
            )
        gamma, sp = label.term, label.span
        alpha = self.fresh_term(positive)
        pos = self.fresh_position(positive)
        if isinstance(f, Under):
            # A\B at gamma, j-k:  alpha+gamma, i-k : B  ∘-  alpha, i-j : A
            res_term = Plus(alpha, gamma, f.mode) if alpha is not None else None
            res_span = Span(pos, sp.end) if sp is not None else None
            arg_span = Span(pos, sp.start) if sp is not None else None
            res_f, arg_f = f.result, f.argument
        else:
            # B/A at gamma, i-j:  gamma+alpha, i-k : B  ∘-  alpha, j-k : A
            res_term = Plus(gamma, alpha, f.mode) if alpha is not None else None
            res_span = Span(sp.start, pos) if sp is not None else None
            arg_span = Span(sp.end, pos) if sp is not None else None
            res_f, arg_f = f.result, f.argument
        skolems = frozenset(x for x in (alpha, pos) if x is not None) if not positive else frozenset()
        result = self.unfold(res_f, Label(res_term, res_span), positive)
        argument = self.unfold(arg_f, Label(alpha, arg_span), not positive)
        return UImpl(result, argument, skolems, None if positive else sp)


def unfold(a: SignedAssignment, regime: Regime, ctx: QueryContext) -> Unfolded:
    """Polarity-driven unfolding of one labelled type.

    Fresh symbols are variables under positive polarity and Skolem
    constants under negative polarity; the symbol for a connective is issued
    before its result and argument are unfolded.
    """
    return _Unfolder(regime, ctx).unfold(a.formula, a.label, a.positive)


# -- flattening ----------------------------------------------------------------------------------


class _Flattener:
    def __init__(self):
        self.n_hyp = 0

    def clause(self, u: Unfolded, cid: str = "", skolems=frozenset()) -> Clause:
        args = []
        while isinstance(u, UImpl):
            args.append(u.argument)
            u = u.result
        if not isinstance(u, ULeaf):
            raise PositiveProduct("product")  # unreachable: unfold rejects positive products
        body = tuple(g for a in reversed(args) for g in self.goals(a))
        return Clause(u.goal, body, cid, skolems)

    def goals(self, u: Unfolded) -> tuple:
        if isinstance(u, ULeaf):
            return (u.goal,)
        if isinstance(u, UTensor):
            return self.goals(u.left) + self.goals(u.right)
        cid = f"h{self.n_hyp}"
        self.n_hyp += 1
        hyp = self.clause(u.argument, cid, u.skolems)
        return (Hypothetical(self.goals(u.result), hyp, u.skolems, u.span),)


def flatten(u: Unfolded, cid: str = "") -> Clause:
    """Uncurry a positive unfolding: ``((X ∘- Y1) ∘- ...) ∘- Yn`` to ``X ∘- Y1 ⊗ ... ⊗ Yn``."""
    return _Flattener().clause(u, cid)


# -- sequent translation -----------------------------------------------------------------------------


def parse_regime(regime) -> Regime:
    if isinstance(regime, Regime):
        return regime
    return Regime(str(regime).lower())


def _config_term(c, consts, counter):
    if isinstance(c, Leaf):
        t = consts[counter[0]]
        counter[0] += 1
        return t
    return Plus(_config_term(c.left, consts, counter), _config_term(c.right, consts, counter), c.mode)


def check_regime(s, regime: Regime, modes: ModeTable) -> None:
    used = set()
    for f in iter_formulas(s):
        used |= modes_used(f)
    if isinstance(s, SequentNL):
        stack = [s.antecedent]
        while stack:
            c = stack.pop()
            if isinstance(c, Node):
                used.add(c.mode)
                stack += [c.left, c.right]
    for m in used:
        if m not in modes:
            raise RegimeMismatch(f"mode {m!r} is not declared")
    assoc = {m for m in used if modes.is_assoc(m)}
    nonassoc = used - assoc
    if regime is Regime.RELATIONAL:
        if isinstance(s, SequentNL):
            raise RegimeMismatch("the relational regime labels lists; drop the brackets or use --calc l")
        if nonassoc:
            raise RegimeMismatch(f"the relational regime needs associative modes; {sorted(nonassoc)} are not")
    elif regime is Regime.SIMULTANEOUS:
        if isinstance(s, SequentNL):
            raise RegimeMismatch(
                "the simultaneous regime discovers bracketing; give the antecedent without brackets"
            )
        if assoc:
            raise RegimeMismatch(f"the simultaneous regime needs non-associative modes; {sorted(assoc)} are not")
    elif isinstance(s, SequentL) and nonassoc and len(s.antecedent) > 1:
        raise RegimeMismatch(
            f"modes {sorted(nonassoc)} are non-associative: bracket the antecedent or use the simultaneous regime"
        )


def _chain_mode(s: SequentL, modes: ModeTable) -> str:
    """Mode joining a bracket-free antecedent: its one associative mode if unique."""
    used = set()
    for f in iter_formulas(s):
        used |= modes_used(f)
    if len(used) == 1:
        (m,) = used
        if modes.is_assoc(m):
            return m
    return DEFAULT_MODE


def _unbracket_singleton(s, regime: Regime):
    if regime is not Regime.GROUPOID and isinstance(s, SequentNL) and isinstance(s.antecedent, Leaf):
        return SequentL((s.antecedent.formula,), s.succedent)
    return s


def translate_sequent(s, regime, ctx: QueryContext, modes: ModeTable | None = None):
    """Label a sequent: antecedent items positive, succedent negative.

    Returns ``(antecedent assignments, succedent assignment, root variable)``.
    """
    regime = parse_regime(regime)
    s = _unbracket_singleton(s, regime)
    if modes is None:
        modes = ModeTable.for_calc("nl" if isinstance(s, SequentNL) or regime is Regime.SIMULTANEOUS else "l")
    check_regime(s, regime, modes)
    ante = list(leaves(s.antecedent)) if isinstance(s, SequentNL) else list(s.antecedent)
    n = len(ante)
    consts = [ctx.fresh_const() for _ in ante] if regime.has_terms else [None] * n
    items = []
    for i, f in enumerate(ante):
        span = Span(At(i), At(i + 1)) if regime.has_spans else None
        items.append(SignedAssignment(f, Label(consts[i], span), True))
    root = None
    span = Span(At(0), At(n)) if regime.has_spans else None
    if regime is Regime.GROUPOID:
        if isinstance(s, SequentNL):
            term = _config_term(s.antecedent, consts, [0])
        else:
            mode = _chain_mode(s, modes)
            term = consts[0]
            for c in consts[1:]:
                term = Plus(term, c, mode)
    elif regime is Regime.SIMULTANEOUS:
        root = ctx.fresh_var()
        term = root
    else:
        term = None
    return items, SignedAssignment(s.succedent, Label(term, span), False), root


def compile_sequent(s, regime, modes: ModeTable | None = None, words=()) -> Program:
    regime = parse_regime(regime)
    s = _unbracket_singleton(s, regime)
    if modes is None:
        modes = ModeTable.for_calc("nl" if isinstance(s, SequentNL) or regime is Regime.SIMULTANEOUS else "l")
    n = len(leaves(s.antecedent)) if isinstance(s, SequentNL) else len(s.antecedent)
    ctx = QueryContext(first_skolem_position=n + 1)
    items, goal, root = translate_sequent(s, regime, ctx, modes)
    unf = _Unfolder(regime, ctx)
    flat = _Flattener()
    database = []
    for i, a in enumerate(items):
        database.append(flat.clause(unf.unfold(a.formula, a.label, True), f"c{i}"))
    agenda = flat.goals(unf.unfold(goal.formula, goal.label, False))
    return Program(
        database=tuple(database),
        agenda=agenda,
        regime=regime,
        modes=modes,
        root_var=root,
        source=s,
        equations=tuple(unf.equations),
        lexical=tuple(a.label.term for a in items) if regime.has_terms else (),
        words=tuple(words),
        ctx=ctx,
    )


def _word_tree(text: str):
    """Words of a sentence: a flat tuple, or a nested (left, right, mode) tree if bracketed."""
    if "[" in text:
        return parse_bracketed_words(text)
    words = tuple(text.split())
    if not words:
        raise ParseError("empty sentence")
    return words


def _tree_words(tree) -> list:
    if isinstance(tree, str):
        return [tree]
    return _tree_words(tree[0]) + _tree_words(tree[1])


def _tree_config(tree, formulas, counter):
    if isinstance(tree, str):
        f = formulas[counter[0]]
        counter[0] += 1
        return Leaf(f)
    left = _tree_config(tree[0], formulas, counter)
    right = _tree_config(tree[1], formulas, counter)
    return Node(left, right, tree[2])


def sentence_sequents(text: str, lexicon: Lexicon, target: Formula):
    """One sequent per combination of lexical entries, in lexicographic order."""
    tree = _word_tree(text)
    bracketed = "[" in text
    words = _tree_words(tree) if bracketed else list(tree)
    choices = []
    for w in words:
        entries = lexicon.lookup(w)
        if not entries:
            raise UnknownWord(w)
        choices.append(entries)
    for combo in itertools.product(*choices):
        if bracketed:
            yield words, combo, SequentNL(_tree_config(tree, combo, [0]), target)
        else:
            yield words, combo, SequentL(tuple(combo), target)


def compile(source, regime, modes: ModeTable | None = None, lexicon: Lexicon | None = None,
            target: Formula | None = None) -> Iterator[Program]:
    """Stream Programs for a direct sequent (one) or a sentence (one per reading)."""
    regime = parse_regime(regime)
    if lexicon is None:
        if isinstance(source, str):
            source = parse_sequent(source, "l" if regime is Regime.RELATIONAL else "nl", modes)
        yield compile_sequent(source, regime, modes)
        return
    if modes is None:
        modes = lexicon.modes
    for words, _, s in sentence_sequents(source, lexicon, target):
        yield compile_sequent(s, regime, modes, words=words)


def describe(p: Program) -> str:
    return f"{format_sequent(p.source)}  [{p.regime.value}]"
