"""Resource-conscious resolution over compiled Programs.

Search is depth-first over the leftmost agenda goal:

* a hypothetical goal ``inner ∘- H`` is handled by DT (add H, continue
  with ``inner``), never by resolution;
* an atomic goal is resolved (RES) against an unconsumed clause whose
  head has the same predicate; the clause is then consumed.

A derivation succeeds when the agenda is empty and every clause, initial
or DT-added, has been consumed exactly once.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .compiler import AtomGoal, Clause, Hypothetical, Program, Regime, format_goals
from .errors import Clash, LambekError, OccursCheck
from .formula import Leaf, Node, SequentNL
from .labels import (
    At,
    Const,
    MatchCounter,
    Plus,
    PosVar,
    Span,
    Var,
    apply_subst,
    equation_bindings,
    format_subst,
    format_term,
    is_ground,
    match_assoc,
    match_nonassoc,
    match_span,
    match_terms,
    solve_equations_nonassoc,
    term_consts,
    term_vars,
    term_modes,
    unify_span,
)


class DepthExceeded(LambekError):
    """A search branch ran past ``max_depth``; counted, not raised, by ``solve``."""


@dataclass(frozen=True)
class Step:
    kind: str  # "DT" or "RES"
    agenda: tuple  # agenda before the step, with span bindings applied
    clause_id: str
    bindings: tuple = ()  # ((var, value), ...) shown on the trace line
    equation: Optional[tuple] = None  # (goal term, head term), simultaneous only
    hypothetical_first: bool = False
    goal_ground: bool = True
    exposed: tuple = ()  # DT: inner goals made current
    hypothesis: Optional[Clause] = None  # DT: clause added


@dataclass
class DerivationTrace:
    steps: tuple
    program: Program
    subst: dict
    log: tuple = ()
    prosodic: Optional[object] = None
    accepted: bool = True
    rejection: str = ""

    @property
    def clause_ids(self):
        ids = [c.id for c in self.program.database]
        ids += [s.clause_id for s in self.steps if s.kind == "DT"]
        return ids


@dataclass
class SolveStats:
    res_attempts: int = 0
    matches: int = 0
    dt_steps: int = 0
    depth_exceeded: int = 0
    empty_span_rejections: int = 0
    candidates: int = 0
    accepted: int = 0
    rejected_clash: int = 0
    rejected_occurs: int = 0
    eigen_rejections: int = 0
    pruned: bool = False
    counter: MatchCounter = field(default_factory=MatchCounter)

    @property
    def rejected(self) -> int:
        return self.rejected_clash + self.rejected_occurs


def _label_vars(goals) -> list:
    """Variables in the labels of top-level atomic goals, in order."""
    out = []
    for g in goals:
        if isinstance(g, AtomGoal):
            lab = g.label
            if lab.term is not None:
                out.extend(sorted(term_vars(lab.term), key=lambda v: v.name))
            if lab.span is not None:
                out.extend(x for x in (lab.span.start, lab.span.end) if isinstance(x, PosVar))
    return out


@dataclass(frozen=True)
class _Scopes:
    """Eigenvariable bookkeeping.

    A variable is born when the clause or hypothetical that owns it is opened
    (its own variables always occur at its top level).  A DT step opens a
    window that closes when its inner goals are discharged; the Skolem
    symbols of that hypothetical may only be denoted by variables born inside
    the window.
    """

    born: tuple = ()
    open: tuple = ()  # (skolems, len(born) at DT, agenda length after the inner goals)
    closed: tuple = ()  # (skolems, variables born inside the window)

    def bear(self, goals) -> "_Scopes":
        seen = set(self.born)
        new = [v for v in _label_vars(goals) if not (v in seen or seen.add(v))]
        return _Scopes(self.born + tuple(new), self.open, self.closed) if new else self

    def enter(self, skolems, rest_len) -> "_Scopes":
        return _Scopes(self.born, self.open + ((skolems, len(self.born), rest_len),), self.closed)

    def settle(self, agenda_len) -> "_Scopes":
        sc = self
        while sc.open and sc.open[-1][2] >= agenda_len:
            sk, start, _ = sc.open[-1]
            sc = _Scopes(sc.born, sc.open[:-1], sc.closed + ((sk, frozenset(sc.born[start:])),))
        return sc


def eigen_ok(subst: dict, closed) -> bool:
    """No variable denotes a Skolem symbol of a hypothetical whose subproof it was not born in."""
    if not closed or not subst:
        return True
    owner = {x: allowed for sk, allowed in closed for x in sk}
    for v in subst:
        value = apply_subst(subst, v)
        for x in ({value} if isinstance(value, At) else term_consts(value)):
            if x in owner and v not in owner[x]:
                return False
    return True


def default_max_depth(p: Program) -> int:
    return 4 * max(1, len(p.atom_goals()))


def predicate_balance(p: Program) -> bool:
    """Each predicate has as many clause heads as atomic goals.

    Every RES pairs one goal with one head and consumes both, so an
    imbalanced program has no successful derivation.
    """
    heads: Counter = Counter()
    goals: Counter = Counter()
    stack = [(x, False) for x in p.database] + [(g, True) for g in p.agenda]
    while stack:
        x, _ = stack.pop()
        if isinstance(x, Clause):
            heads[x.head.predicate] += 1
            stack.extend((g, True) for g in x.body)
        elif isinstance(x, Hypothetical):
            stack.extend((g, True) for g in x.inner)
            stack.append((x.hypothesis, False))
        else:
            goals[x.predicate] += 1
    return heads == goals


class _Matcher:
    """Label matching for one Program, chosen by regime and mode table."""

    def __init__(self, p: Program, stats: SolveStats):
        self.regime = p.regime
        self.modes = p.modes
        self.stats = stats
        used = set()
        for g in p.atom_goals():
            if g.label.term is not None:
                used |= term_modes(g.label.term)
        assoc = [m in self.modes and self.modes.is_assoc(m) for m in used]
        if all(assoc):
            self.kind = "assoc"
        elif not any(assoc):
            self.kind = "nonassoc"
        else:
            self.kind = "mixed"

    def terms(self, goal, head):
        counter = self.stats.counter
        if self.kind == "assoc":
            return match_assoc(goal, head, self.modes, counter)
        if self.kind == "mixed":
            return match_terms(goal, head, self.modes, counter)
        counter.calls += 1
        s = match_nonassoc(goal, head)
        if s is None:
            return ()
        counter.results += 1
        if any(isinstance(v, Plus) for v in s.values()):
            counter.nontrivial += 1
        return (s,)

    def spans(self, goal: Span, head: Span, subst: dict):
        """Extend ``subst`` so the spans agree; None on mismatch."""
        counter = self.stats.counter
        counter.calls += 1
        if is_ground(goal):
            s = match_span(goal, head)
            if s is None:
                return None
            out = dict(subst)
            out.update(s)
        else:
            out = unify_span(goal, head, subst)
            if out is None:
                return None
            out = dict(out) if out is subst else out
        counter.results += 1
        # positions are atomic, so a span match never binds a compound value
        return out


def _guard_ok(guard, subst) -> Optional[bool]:
    """True/False for a decided guard, None while undecided."""
    g = apply_subst(subst, guard)
    if g.start == g.end:
        return False
    if is_ground(g):
        return True
    return None


class _Search:
    def __init__(self, p: Program, max_depth: int, stats: SolveStats, include_rejected: bool):
        self.p = p
        self.max_depth = max_depth
        self.stats = stats
        self.include_rejected = include_rejected
        self.matcher = _Matcher(p, stats)
        self.simultaneous = p.regime is Regime.SIMULTANEOUS

    def run(self) -> Iterator[DerivationTrace]:
        db = tuple(self.p.database)
        agenda = tuple(self.p.agenda)
        yield from self.step(agenda, db, 0, {}, tuple(self.p.equations), (), (), _Scopes().bear(agenda))

    def finish(self, db, consumed, subst, log, guards, steps, closed=()):
        if consumed != (1 << len(db)) - 1:
            return None
        for g in guards:
            if _guard_ok(g, subst) is False:
                self.stats.empty_span_rejections += 1
                return None
        if not eigen_ok(subst, closed):
            self.stats.eigen_rejections += 1
            return None
        trace = DerivationTrace(steps, self.p, subst, log)
        if not self.simultaneous:
            return trace
        self.stats.candidates += 1
        try:
            solved = solve_equations_nonassoc(log, raise_errors=True)
        except OccursCheck:
            self.stats.rejected_occurs += 1
            trace.accepted, trace.rejection = False, "occurs-check"
            return trace if self.include_rejected else None
        except Clash:
            self.stats.rejected_clash += 1
            trace.accepted, trace.rejection = False, "clash"
            return trace if self.include_rejected else None
        s, _ = solved
        if not eigen_ok({**subst, **s}, closed):
            self.stats.eigen_rejections += 1
            return None
        trace.subst = {**subst, **s}
        trace.prosodic = apply_subst(s, self.p.root_var)
        return trace

    def step(self, agenda, db, consumed, subst, log, guards, steps, sc):
        if len(steps) >= self.max_depth and agenda:
            self.stats.depth_exceeded += 1
            return
        sc = sc.settle(len(agenda))
        if not agenda:
            t = self.finish(db, consumed, subst, log, guards, steps, sc.closed)
            if t is not None:
                if t.accepted:
                    self.stats.accepted += 1
                yield t
            return
        goal, rest = agenda[0], agenda[1:]
        shown = tuple(apply_subst(subst, g) for g in agenda)
        if isinstance(goal, Hypothetical):
            self.stats.dt_steps += 1
            new_guards = guards
            if goal.guard is not None:
                ok = _guard_ok(goal.guard, subst)
                if ok is False:
                    self.stats.empty_span_rejections += 1
                    return
                if ok is None:
                    new_guards = guards + (goal.guard,)
            hyp = goal.hypothesis
            st = Step("DT", shown, hyp.id, hypothetical_first=True,
                      exposed=tuple(apply_subst(subst, g) for g in goal.inner), hypothesis=hyp)
            inner_sc = sc.enter(goal.skolems, len(rest)).bear(goal.inner)
            yield from self.step(goal.inner + rest, db + (hyp,), consumed, subst, log, new_guards, steps + (st,),
                                 inner_sc)
            return
        label = apply_subst(subst, goal.label)
        for idx, clause in enumerate(db):
            if consumed >> idx & 1 or clause.head.predicate != goal.predicate:
                continue
            self.stats.res_attempts += 1
            head = apply_subst(subst, clause.head.label)
            ground = True
            if self.p.regime is Regime.GROUPOID:
                options = []
                for s in self.matcher.terms(label.term, head.term):
                    s2 = dict(subst)
                    s2.update(s)
                    options.append((s2, _ordered(s, head.term), None))
            else:
                ground = is_ground(label.span)
                s2 = self.matcher.spans(label.span, head.span, subst)
                if s2 is None:
                    continue
                if self.simultaneous:
                    eq = (goal.label.term, clause.head.label.term)
                    shown_b = equation_bindings(*eq) or {}
                    options = [(s2, tuple(shown_b.items()), eq)]
                else:
                    new = {k: v for k, v in s2.items() if k not in subst}
                    options = [(s2, _ordered(new, head.span), None)]
            clause_sc = sc.bear((clause.head,) + clause.body)
            for s2, shown_b, eq in options:
                self.stats.matches += 1
                st = Step("RES", shown, clause.id, shown_b, eq, False, ground)
                yield from self.step(
                    clause.body + rest, db, consumed | (1 << idx), s2,
                    log + ((eq,) if eq is not None else ()), guards, steps + (st,), clause_sc,
                )


def _ordered(s: dict, pattern) -> tuple:
    """Bindings in order of first occurrence in the clause head."""
    order = []
    stack = [pattern]
    while stack:
        x = stack.pop()
        if isinstance(x, (Var, PosVar)):
            if x not in order:
                order.append(x)
        elif isinstance(x, Plus):
            stack.append(x.right)
            stack.append(x.left)
        elif isinstance(x, Span):
            stack.append(x.end)
            stack.append(x.start)
    rest = [k for k in s if k not in order]
    return tuple((k, s[k]) for k in order + rest if k in s)


def solve(p: Program, first_only: bool = False, max_depth: int | None = None, stats: SolveStats | None = None,
          include_rejected: bool = False, prune: bool = True) -> Iterator[DerivationTrace]:
    """Stream derivation traces of ``p`` in deterministic depth-first order.

    Simultaneous candidates whose deferred term equations fail are counted in
    ``stats`` and only yielded (marked ``accepted=False``) with
    ``include_rejected``.
    """
    stats = stats if stats is not None else SolveStats()
    if max_depth is None:
        max_depth = default_max_depth(p)
    if prune and not predicate_balance(p):
        stats.pruned = True
        return
    for t in _Search(p, max_depth, stats, include_rejected).run():
        yield t
        if first_only and t.accepted:
            return


def derivable(p: Program, stats: SolveStats | None = None) -> bool:
    return any(t.accepted for t in solve(p, first_only=True, stats=stats))


def res_step(p: Program, agenda: tuple, db: tuple, consumed: int, subst: dict, idx: int):
    """One RES step against ``db[idx]``; all resulting states (empty if inapplicable)."""
    goal = agenda[0]
    clause = db[idx]
    if isinstance(goal, Hypothetical) or consumed >> idx & 1 or clause.head.predicate != goal.predicate:
        return []
    stats = SolveStats()
    search = _Search(p, 10 ** 9, stats, False)
    out = []
    label = apply_subst(subst, goal.label)
    head = apply_subst(subst, clause.head.label)
    if p.regime is Regime.GROUPOID:
        for s in search.matcher.terms(label.term, head.term):
            s2 = dict(subst)
            s2.update(s)
            out.append((clause.body + agenda[1:], consumed | 1 << idx, s2, _ordered(s, head.term)))
    else:
        s2 = search.matcher.spans(label.span, head.span, subst)
        if s2 is not None:
            if p.regime is Regime.SIMULTANEOUS:
                shown = tuple((equation_bindings(goal.label.term, clause.head.label.term) or {}).items())
            else:
                shown = _ordered({k: v for k, v in s2.items() if k not in subst}, head.span)
            out.append((clause.body + agenda[1:], consumed | 1 << idx, s2, shown))
    return out


def dt_step(agenda: tuple, db: tuple):
    """DT on a hypothetical first goal: returns (agenda, database, added clause)."""
    goal = agenda[0]
    if not isinstance(goal, Hypothetical):
        raise ValueError("DT needs a hypothetical first goal")
    return goal.inner + agenda[1:], db + (goal.hypothesis,), goal.hypothesis


# -- trace rendering -------------------------------------------------------------------------


def _format_binding(k, v) -> str:
    return f"{k}={format_term(v) if isinstance(v, Plus) else v}"


def format_trace(t: DerivationTrace) -> str:
    lines = []
    for i, st in enumerate(t.steps, 1):
        tail = "DT" if st.kind == "DT" else "RES"
        if st.bindings:
            tail += " " + ", ".join(_format_binding(k, v) for k, v in st.bindings)
        lines.append(f"{i}. {format_goals(st.agenda)} | {tail}")
    if t.prosodic is not None:
        lines.append(f"prosodic: {format_term(t.prosodic)}")
    elif not t.accepted:
        lines.append(f"rejected: {t.rejection}")
    return "\n".join(lines)


# -- trace invariants ------------------------------------------------------------------------


def check_linearity(t: DerivationTrace) -> bool:
    """Every clause (initial or DT-added) is resolved exactly once; nothing is left."""
    used = Counter(s.clause_id for s in t.steps if s.kind == "RES")
    ids = t.clause_ids
    if len(set(ids)) != len(ids):
        return False
    live = set(c.id for c in t.program.database)
    for s in t.steps:
        if s.kind == "DT":
            live.add(s.clause_id)
        elif s.clause_id not in live:
            return False
        else:
            live.remove(s.clause_id)
    return not live and all(used[i] == 1 for i in ids) and sum(used.values()) == len(ids)


def check_uniformity(t: DerivationTrace) -> bool:
    """No RES step was taken while the first goal was hypothetical."""
    for s in t.steps:
        first = s.agenda[0]
        if s.kind == "RES" and (s.hypothetical_first or isinstance(first, Hypothetical)):
            return False
        if s.kind == "DT" and not isinstance(first, Hypothetical):
            return False
    return True


def check_groundness(t: DerivationTrace) -> bool:
    return all(s.goal_ground for s in t.steps if s.kind == "RES")


def _symbols(goals) -> set:
    out = set()
    stack = list(goals)
    while stack:
        g = stack.pop()
        if isinstance(g, AtomGoal):
            if g.label.term is not None:
                out |= term_consts(g.label.term)
            if g.label.span is not None:
                out |= {g.label.span.start, g.label.span.end}
        elif isinstance(g, Hypothetical):
            # a Skolem may be shared through a hypothesis nested in the exposed goal
            stack.extend(g.inner)
            stack.append(g.hypothesis)
        elif isinstance(g, Clause):
            stack.append(g.head)
            stack.extend(g.body)
    return out


def check_skolem_sharing(t: DerivationTrace, program: Program | None = None) -> bool:
    """Each DT hypothesis's fresh constants also occur in the goal it exposes."""
    for s in t.steps:
        if s.kind != "DT":
            continue
        sk = s.hypothesis.skolems
        if not sk or not sk <= _symbols(s.exposed):
            return False
    return True


def check_trace(t: DerivationTrace) -> bool:
    return check_linearity(t) and check_uniformity(t) and check_skolem_sharing(t)


# -- instrumentation ----------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchStats:
    total_matches: int
    nontrivial_associative_matches: int
    traces: int
    flattened_chains: tuple = ()


def instrument_matching(p: Program, max_depth: int | None = None) -> MatchStats:
    stats = SolveStats()
    n = sum(1 for _ in solve(p, max_depth=max_depth, stats=stats))
    c = stats.counter
    return MatchStats(c.calls, c.nontrivial, n, tuple(c.flattened_chains))


# -- prosodic structure ----------------------------------------------------------------------------


def prosodic_config(term, program: Program):
    """Read a prosodic term over the lexical constants as a configuration tree."""
    formulas = list(program.source.antecedent)
    index = {c: i for i, c in enumerate(program.lexical)}

    def build(t):
        if isinstance(t, Plus):
            return Node(build(t.left), build(t.right), t.mode)
        if isinstance(t, Const) and t in index:
            return Leaf(formulas[index[t]])
        raise ValueError(f"term {format_term(t)} is not built from the lexical constants")

    return build(term)


def prosodic_sequent(t: DerivationTrace) -> SequentNL:
    return SequentNL(prosodic_config(t.prosodic, t.program), t.program.source.succedent)


def prosodic_words(term, program: Program) -> str:
    """Bracketed word string for a prosodic term, e.g. ``[the, [cat, sleeps]]``."""
    names = program.words or [str(c) for c in program.lexical]
    index = {c: i for i, c in enumerate(program.lexical)}

    def show(x):
        if isinstance(x, Plus):
            suffix = "" if x.mode == "0" else "{" + x.mode + "}"
            return f"[{show(x.left)}, {show(x.right)}]{suffix}"
        if isinstance(x, Const) and x in index:
            return names[index[x]]
        return format_term(x)

    return show(term)


_SYMBOL = re.compile(r"([#?])([A-Za-z_][A-Za-z0-9_]*)")


def canonical_symbols(text: str) -> str:
    """Rename ``#``/``?`` symbols by order of first appearance, per sigil.

    >>> canonical_symbols("?a3=#k1+?a0, ?a0=#k1")
    '?v0=#c0+?v1, ?v1=#c0'
    """
    seen: dict = {}
    counts = {"#": 0, "?": 0}

    def rename(m):
        key = m.group(0)
        if key not in seen:
            sigil = m.group(1)
            seen[key] = f"{sigil}{'c' if sigil == '#' else 'v'}{counts[sigil]}"
            counts[sigil] += 1
        return seen[key]

    return _SYMBOL.sub(rename, text)
