"""Prosodic labels: groupoid terms, string-position spans, and their matchers.

Three procedures are provided, one per labelling regime:

* ``match_assoc``: one-way matching modulo associativity of ``+``
  (string segmentation of a ground term);
* ``match_nonassoc``: one-way structural (tree) matching;
* ``solve_equations_nonassoc``: deferred first-order unification of an
  equation log, processed last-to-first.

Substitutions are plain dicts from ``Var``/``PosVar`` to terms/positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import singledispatch
from typing import Iterator, Optional, Union

from .errors import Clash, MixedMode, NotGround, OccursCheck, UnificationFailure
from .formula import DEFAULT_MODE, ModeTable


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return "#" + self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


@dataclass(frozen=True)
class Plus:
    left: "Term"
    right: "Term"
    mode: str = DEFAULT_MODE

    def __str__(self):
        return format_term(self)


Term = Union[Const, Var, Plus]


@dataclass(frozen=True)
class At:
    index: int

    def __str__(self):
        return str(self.index)


@dataclass(frozen=True)
class PosVar:
    name: str

    def __str__(self):
        return "?" + self.name


Position = Union[At, PosVar]


@dataclass(frozen=True)
class Span:
    start: Position
    end: Position

    def __str__(self):
        return f"{self.start}-{self.end}"


@dataclass(frozen=True)
class Label:
    """Groupoid term, span, or both (the simultaneous regime)."""

    term: Optional[Term] = None
    span: Optional[Span] = None

    @property
    def variant(self) -> str:
        if self.term is not None and self.span is not None:
            return "GR"
        return "G" if self.term is not None else "R"

    def __str__(self):
        return format_label(self)


Substitution = dict
EquationLog = tuple  # of (goal_term, head_term) pairs, in derivation order


class QueryContext:
    """Fresh-symbol source for one query; symbols are never reissued."""

    def __init__(self, first_skolem_position: int = 0):
        self.n_const = 0
        self.n_var = 0
        self.n_posvar = 0
        self.next_position = first_skolem_position

    def fresh_const(self) -> Const:
        c = Const(f"k{self.n_const}")
        self.n_const += 1
        return c

    def fresh_var(self) -> Var:
        v = Var(f"a{self.n_var}")
        self.n_var += 1
        return v

    def fresh_posvar(self) -> PosVar:
        v = PosVar(f"i{self.n_posvar}")
        self.n_posvar += 1
        return v

    def fresh_position(self) -> At:
        """Skolem position: an index beyond the string's own vertices."""
        p = At(self.next_position)
        self.next_position += 1
        return p


# -- rendering -------------------------------------------------------------------


def format_term(t: Term) -> str:
    if isinstance(t, Plus):
        op = "+" if t.mode == DEFAULT_MODE else "+{" + t.mode + "}"
        parts = []
        for side in (t.left, t.right):
            s = format_term(side)
            parts.append("(" + s + ")" if isinstance(side, Plus) else s)
        return parts[0] + op + parts[1]
    return str(t)


def format_label(lab: Label) -> str:
    if lab.term is not None and lab.span is not None:
        return f"{format_term(lab.term)}-{lab.span}"
    if lab.term is not None:
        return format_term(lab.term)
    return str(lab.span)


def format_subst(s: Substitution) -> str:
    return ", ".join(f"{k}={format_term(v) if isinstance(v, Plus) else v}" for k, v in s.items())


# -- structure helpers --------------------------------------------------------------


def term_vars(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.add(x)
        elif isinstance(x, Plus):
            stack.append(x.left)
            stack.append(x.right)
    return out


def term_consts(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Const):
            out.add(x)
        elif isinstance(x, Plus):
            stack.append(x.left)
            stack.append(x.right)
    return out


def is_ground(t) -> bool:
    if isinstance(t, Label):
        return all(is_ground(x) for x in (t.term, t.span) if x is not None)
    if isinstance(t, Span):
        return isinstance(t.start, At) and isinstance(t.end, At)
    if isinstance(t, (At, Const)):
        return True
    if isinstance(t, (Var, PosVar)):
        return False
    return is_ground(t.left) and is_ground(t.right)


def term_modes(t: Term) -> set:
    if isinstance(t, Plus):
        return {t.mode} | term_modes(t.left) | term_modes(t.right)
    return set()


def flatten(t: Term, mode: str) -> list:
    """Leaves of the maximal ``+``-chain of ``mode`` rooted at ``t``.

    Only nodes of exactly ``mode`` are opened; nodes of any other mode are
    kept whole as items.
    """
    out = []
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Plus) and x.mode == mode:
            stack.append(x.right)
            stack.append(x.left)
        else:
            out.append(x)
    return out


def rebuild(items, mode: str) -> Term:
    """Left-nested chain ``((i0+i1)+i2)+...``."""
    acc = items[0]
    for x in items[1:]:
        acc = Plus(acc, x, mode)
    return acc


def normalise(t: Term, modes: ModeTable) -> Term:
    """Canonical representative modulo associativity of the associative modes."""
    if not isinstance(t, Plus):
        return t
    if modes is not None and t.mode in modes and modes.is_assoc(t.mode):
        return rebuild([normalise(x, modes) for x in flatten(t, t.mode)], t.mode)
    return Plus(normalise(t.left, modes), normalise(t.right, modes), t.mode)


# -- substitution ----------------------------------------------------------------------


def walk(x, s: Substitution):
    while (isinstance(x, Var) or isinstance(x, PosVar)) and x in s:
        x = s[x]
    return x


@singledispatch
def substitute(x, s: Substitution):
    """Single-dispatch worker behind ``apply_subst`` (dispatches on ``x``)."""
    raise TypeError(f"cannot substitute into {type(x).__name__}")


def apply_subst(s: Substitution, x):
    """Replace bound variables homomorphically; unbound ones stay."""
    return substitute(x, s)


@substitute.register(Const)
@substitute.register(At)
def _(x, s):
    return x


@substitute.register
def _(x: Var, s):
    y = walk(x, s)
    return y if y is x else substitute(y, s)


@substitute.register
def _(x: PosVar, s):
    return walk(x, s)


@substitute.register
def _(x: Plus, s):
    if not s:
        return x
    left = substitute(x.left, s)
    right = substitute(x.right, s)
    if left is x.left and right is x.right:
        return x
    return Plus(left, right, x.mode)


@substitute.register
def _(x: Span, s):
    a, b = walk(x.start, s), walk(x.end, s)
    if a is x.start and b is x.end:
        return x
    return Span(a, b)


@substitute.register
def _(x: Label, s):
    term = None if x.term is None else substitute(x.term, s)
    span = None if x.span is None else substitute(x.span, s)
    if term is x.term and span is x.span:
        return x
    return Label(term, span)


def occurs(v: Var, t: Term, s: Substitution) -> bool:
    t = walk(t, s)
    if t == v:
        return True
    if isinstance(t, Plus):
        return occurs(v, t.left, s) or occurs(v, t.right, s)
    return False


# -- associative (and mixed-mode) one-way matching -----------------------------------


class MatchCounter:
    """Optional instrumentation sink for the matchers."""

    def __init__(self):
        self.calls = 0
        self.results = 0
        self.nontrivial = 0
        self.flattened_chains = []

    def record_flatten(self, term, mode, items):
        self.flattened_chains.append((term, mode, tuple(items)))


def _equal_mod(a: Term, b: Term, modes) -> bool:
    return normalise(a, modes) == normalise(b, modes)


def _match(g: Term, p: Term, modes, s: dict, counter) -> Iterator[dict]:
    if isinstance(p, Var):
        if p in s:
            if _equal_mod(s[p], g, modes):
                yield s
        else:
            t = dict(s)
            t[p] = g
            yield t
        return
    if isinstance(p, Const):
        if g == p:
            yield s
        return
    if not isinstance(g, Plus) or g.mode != p.mode:
        return
    if modes is not None and p.mode in modes and modes.is_assoc(p.mode):
        g_items = flatten(g, p.mode)
        p_items = flatten(p, p.mode)
        if counter is not None:
            counter.record_flatten(g, p.mode, g_items)
            counter.record_flatten(p, p.mode, p_items)
        yield from _match_chain(g_items, p_items, p.mode, modes, s, counter)
        return
    for s1 in _match(g.left, p.left, modes, s, counter):
        yield from _match(g.right, p.right, modes, s1, counter)


def _match_chain(g_items, p_items, mode, modes, s, counter):
    if not p_items:
        if not g_items:
            yield s
        return
    head, rest = p_items[0], p_items[1:]
    longest = len(g_items) - len(rest)
    if longest < 1:
        return
    if isinstance(head, Var):
        if head in s:
            bound = s[head]
            items = flatten(bound, mode) if isinstance(bound, Plus) else [bound]
            n = len(items)
            if n <= longest and all(_equal_mod(x, y, modes) for x, y in zip(items, g_items[:n])):
                yield from _match_chain(g_items[n:], rest, mode, modes, s, counter)
            return
        # leftmost variable takes the shortest segment first
        for n in range(1, longest + 1):
            seg = g_items[:n]
            t = dict(s)
            t[head] = seg[0] if n == 1 else rebuild(seg, mode)
            yield from _match_chain(g_items[n:], rest, mode, modes, t, counter)
        return
    for s1 in _match(g_items[0], head, modes, s, counter):
        yield from _match_chain(g_items[1:], rest, mode, modes, s1, counter)


def match_terms(ground: Term, pattern: Term, modes: ModeTable, counter: MatchCounter | None = None):
    """One-way matching where each mode is flattened iff it is associative."""
    if not is_ground(ground):
        raise NotGround(f"subject term {format_term(ground)} contains variables")
    if counter is not None:
        counter.calls += 1
    n = 0
    for s in _match(ground, pattern, modes, {}, counter):
        n += 1
        if counter is not None:
            counter.results += 1
            if n == 2 or (n == 1 and any(isinstance(v, Plus) for v in s.values())):
                counter.nontrivial += 1
        yield s


def match_assoc(ground: Term, pattern: Term, modes: ModeTable | None = None, counter=None):
    """All substitutions making ``pattern`` equal ``ground`` modulo associativity.

    Variables bind nonempty segments; results come leftmost-shortest first.

    >>> k, l, m, b = Const("k"), Const("l"), Const("m"), Var("b")
    >>> [format_subst(s) for s in match_assoc(Plus(m, Plus(k, l)), Plus(b, l))]
    ['?b=#m+#k']
    """
    if modes is None:
        modes = ModeTable.for_calc("l")
    if not is_ground(ground):
        raise NotGround(f"subject term {format_term(ground)} contains variables")
    for m in term_modes(ground) | term_modes(pattern):
        if m not in modes or not modes.is_assoc(m):
            raise MixedMode(f"mode {m!r} is not associative")
    return match_terms(ground, pattern, modes, counter)


def match_nonassoc(ground: Term, pattern: Term) -> Optional[dict]:
    """Plain first-order one-way matching; ``+`` is a binary constructor per mode."""
    if not is_ground(ground):
        raise NotGround(f"subject term {format_term(ground)} contains variables")
    s: dict = {}
    stack = [(ground, pattern)]
    while stack:
        g, p = stack.pop()
        if isinstance(p, Var):
            if p in s:
                if s[p] != g:
                    return None
            else:
                s[p] = g
        elif isinstance(p, Const):
            if g != p:
                return None
        else:
            if not isinstance(g, Plus) or g.mode != p.mode:
                return None
            stack.append((g.right, p.right))
            stack.append((g.left, p.left))
    return s


# -- spans -------------------------------------------------------------------------------


def match_span(ground: Span, pattern: Span) -> Optional[dict]:
    """Bind pattern position variables to the ground span's indices."""
    if not is_ground(ground):
        raise NotGround(f"subject span {ground} contains variables")
    s: dict = {}
    for g, p in ((ground.start, pattern.start), (ground.end, pattern.end)):
        if isinstance(p, PosVar):
            if p in s:
                if s[p] != g:
                    return None
            else:
                s[p] = g
        elif p != g:
            return None
    return s


def unify_span(a: Span, b: Span, s: dict) -> Optional[dict]:
    """Two-way unification of flat positions, extending ``s`` (copied)."""
    out = s
    for x, y in ((a.start, b.start), (a.end, b.end)):
        x, y = walk(x, out), walk(y, out)
        if x == y:
            continue
        if out is s:
            out = dict(s)
        if isinstance(x, PosVar):
            out[x] = y
        elif isinstance(y, PosVar):
            out[y] = x
        else:
            return None
    return out


# -- deferred non-associative unification ---------------------------------------------------


def unify_equations(equations, s: dict | None = None) -> dict:
    """Robinson unification with occurs-check over ``equations`` in the given order.

    When both sides are distinct variables the left (goal-side) one is bound.
    Raises Clash or OccursCheck.
    """
    s = dict(s) if s else {}
    for lhs, rhs in equations:
        stack = [(lhs, rhs)]
        while stack:
            a, b = stack.pop()
            a, b = walk(a, s), walk(b, s)
            if a == b:
                continue
            if isinstance(a, Var):
                if occurs(a, b, s):
                    raise OccursCheck(f"{a} occurs in {format_term(apply_subst(s, b))}")
                s[a] = b
            elif isinstance(b, Var):
                if occurs(b, a, s):
                    raise OccursCheck(f"{b} occurs in {format_term(apply_subst(s, a))}")
                s[b] = a
            elif isinstance(a, Plus) and isinstance(b, Plus) and a.mode == b.mode:
                stack.append((a.right, b.right))
                stack.append((a.left, b.left))
            else:
                raise Clash(f"cannot unify {format_term(apply_subst(s, a))} with {format_term(apply_subst(s, b))}")
    return s


def resolve_subst(s: dict) -> dict:
    """Idempotent form: every value fully substituted."""
    return {k: apply_subst(s, v) for k, v in s.items()}


def solve_equations_nonassoc(log, raise_errors: bool = False) -> Optional[tuple]:
    """Unify the log from its last equation to its first.

    Returns ``(substitution, root)`` where root is the fully substituted
    left term of the first equation, or None on clash / occurs failure
    (with ``raise_errors`` the Clash or OccursCheck propagates instead).

    >>> d, b, a, c = Var("d"), Var("b"), Var("a"), Var("c")
    >>> m, r, f = Const("m"), Const("r"), Const("f")
    >>> s, root = solve_equations_nonassoc([(d, Plus(b, Plus(m, a))), (b, c), (c, r), (a, f)])
    >>> format_term(root)
    '#r+(#m+#f)'
    """
    try:
        s = unify_equations(reversed(list(log)))
    except UnificationFailure:
        if raise_errors:
            raise
        return None
    s = resolve_subst(s)
    wanted = set()
    for lhs, rhs in log:
        wanted |= term_vars(lhs) | term_vars(rhs)
    s = {k: v for k, v in s.items() if k in wanted}
    root = apply_subst(s, log[0][0]) if log else None
    return s, root


def equation_bindings(goal: Term, head: Term) -> Optional[dict]:
    """Most general unifier of a single logged equation, for trace display."""
    try:
        return resolve_subst(unify_equations([(goal, head)]))
    except UnificationFailure:
        return None
