"""Categorial types, modes, lexicons and sequents.

Concrete syntax::

    A\\B        under(A, B)     argument A on the left, result B
    B/A         over(B, A)      result B, argument A on the right
    A*B         prod(A, B)
    A\\{m}B     any connective may carry a mode suffix; default mode "0"

There is no precedence: nested compounds must be parenthesised, so
``A\\B\\C`` is rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .errors import ParseError

DEFAULT_MODE = "0"


@dataclass(frozen=True)
class Mode:
    name: str
    associative: bool


class ModeTable(Mapping[str, Mode]):
    """Immutable name -> Mode table."""

    __slots__ = ("_modes",)

    def __init__(self, modes=()):
        table = {}
        for m in modes:
            if m.name in table:
                raise ValueError(f"duplicate mode {m.name!r}")
            table[m.name] = m
        self._modes = table

    @classmethod
    def for_calc(cls, calc: str) -> "ModeTable":
        """Single default mode: associative for L, non-associative otherwise."""
        return cls([Mode(DEFAULT_MODE, calc.lower() in ("l", "boxedl"))])

    def __getitem__(self, name):
        return self._modes[name]

    def __iter__(self):
        return iter(self._modes)

    def __len__(self):
        return len(self._modes)

    def __repr__(self):
        body = ", ".join(f"{m.name}:{'assoc' if m.associative else 'nonassoc'}" for m in self._modes.values())
        return f"ModeTable({body})"

    def is_assoc(self, name: str) -> bool:
        return self._modes[name].associative

    def with_mode(self, mode: Mode) -> "ModeTable":
        """Return a copy with ``mode`` added or redeclared."""
        others = [m for m in self._modes.values() if m.name != mode.name]
        return ModeTable(others + [mode])


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Under:
    """``argument \\ result``: seeks its argument on the left."""

    argument: "Formula"
    result: "Formula"
    mode: str = DEFAULT_MODE

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Over:
    """``result / argument``: seeks its argument on the right."""

    result: "Formula"
    argument: "Formula"
    mode: str = DEFAULT_MODE

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Prod:
    left: "Formula"
    right: "Formula"
    mode: str = DEFAULT_MODE

    def __str__(self):
        return format_formula(self)


Formula = Union[Atom, Under, Over, Prod]


def connective_count(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Under) or isinstance(f, Over):
        return 1 + connective_count(f.argument) + connective_count(f.result)
    return 1 + connective_count(f.left) + connective_count(f.right)


def modes_used(f: Formula) -> set:
    if isinstance(f, Atom):
        return set()
    if isinstance(f, Prod):
        return {f.mode} | modes_used(f.left) | modes_used(f.right)
    return {f.mode} | modes_used(f.argument) | modes_used(f.result)


def has_product(f: Formula) -> bool:
    if isinstance(f, Atom):
        return False
    if isinstance(f, Prod):
        return True
    return has_product(f.argument) or has_product(f.result)


def eventual_range(f: Formula) -> Formula:
    """Strip implication arguments until a non-implication remains."""
    while isinstance(f, (Under, Over)):
        f = f.result
    return f


def _suffix(mode: str) -> str:
    return "" if mode == DEFAULT_MODE else "{" + mode + "}"


def format_formula(f: Formula) -> str:
    def sub(g):
        return g.name if isinstance(g, Atom) else "(" + format_formula(g) + ")"

    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Under):
        return f"{sub(f.argument)}\\{_suffix(f.mode)}{sub(f.result)}"
    if isinstance(f, Over):
        return f"{sub(f.result)}/{_suffix(f.mode)}{sub(f.argument)}"
    return f"{sub(f.left)}*{_suffix(f.mode)}{sub(f.right)}"


# -- configurations and sequents ---------------------------------------------


@dataclass(frozen=True)
class Leaf:
    formula: Formula


@dataclass(frozen=True)
class Node:
    left: "ConfigTree"
    right: "ConfigTree"
    mode: str = DEFAULT_MODE


ConfigTree = Union[Leaf, Node]


@dataclass(frozen=True)
class SequentL:
    antecedent: tuple
    succedent: Formula

    def __post_init__(self):
        if not self.antecedent:
            raise ValueError("antecedent must contain at least one type")
        if not isinstance(self.antecedent, tuple):
            object.__setattr__(self, "antecedent", tuple(self.antecedent))

    def __str__(self):
        return format_sequent(self)


@dataclass(frozen=True)
class SequentNL:
    antecedent: ConfigTree
    succedent: Formula

    def __str__(self):
        return format_sequent(self)


Sequent = Union[SequentL, SequentNL]


def leaves(c: ConfigTree) -> list:
    out = []
    stack = [c]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            out.append(t.formula)
        else:
            stack.append(t.right)
            stack.append(t.left)
    return out


def erase_brackets(s: SequentNL) -> SequentL:
    return SequentL(tuple(leaves(s.antecedent)), s.succedent)


def sequent_connectives(s: Sequent) -> int:
    items = s.antecedent if isinstance(s, SequentL) else leaves(s.antecedent)
    return sum(connective_count(f) for f in items) + connective_count(s.succedent)


def format_config(c: ConfigTree) -> str:
    if isinstance(c, Leaf):
        return format_formula(c.formula)
    return f"[{format_config(c.left)}, {format_config(c.right)}]{_suffix(c.mode)}"


def format_sequent(s: Sequent) -> str:
    if isinstance(s, SequentL):
        ante = ", ".join(format_formula(f) for f in s.antecedent)
    else:
        ante = format_config(s.antecedent)
    return f"{ante} => {format_formula(s.succedent)}"


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z0-9_']+)|(?P<arrow>=>|⇒)|(?P<sym>[\\/*•(){}\[\],]))")
_OPS = {"\\": Under, "/": Over, "*": Prod, "•": Prod}


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", position=bad)
        kind = m.lastgroup
        tok = "=>" if kind == "arrow" else m.group(kind)
        out.append((kind, tok, m.start(kind)))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, modes: ModeTable):
        self.tokens = _tokenize(text)
        self.i = 0
        self.modes = modes

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.next()
        if text != value:
            shown = "end of input" if kind == "eof" else repr(text)
            raise ParseError(f"expected {value!r}, found {shown}", position=pos)

    def at_eof(self):
        return self.peek()[0] == "eof"

    def mode_suffix(self) -> str:
        if self.peek()[1] != "{":
            return DEFAULT_MODE
        self.next()
        kind, name, pos = self.next()
        if kind != "name":
            raise ParseError("expected mode name", position=pos)
        self.expect("}")
        if name not in self.modes:
            raise ParseError(f"unknown mode {name!r}", position=pos)
        return name

    def formula(self) -> Formula:
        left = self.term()
        kind, text, pos = self.peek()
        if kind != "sym" or text not in _OPS:
            return left
        self.next()
        mode = self.mode_suffix()
        right = self.term()
        kind2, text2, pos2 = self.peek()
        if kind2 == "sym" and text2 in _OPS:
            raise ParseError("ambiguous chain of connectives; add parentheses", position=pos2)
        if text == "\\":
            return Under(left, right, mode)
        if text == "/":
            return Over(left, right, mode)
        return Prod(left, right, mode)

    def term(self) -> Formula:
        kind, text, pos = self.next()
        if text == "(":
            f = self.formula()
            self.expect(")")
            return f
        if kind == "name":
            if text[0].isdigit():
                raise ParseError(f"atom names must start with a letter: {text!r}", position=pos)
            return Atom(text)
        shown = "end of input" if kind == "eof" else repr(text)
        raise ParseError(f"expected a type, found {shown}", position=pos)

    def config(self):
        """Bracketed NL configuration, or a bare formula."""
        kind, text, pos = self.peek()
        if text != "[":
            return Leaf(self.formula())
        self.next()
        left = self.config()
        self.expect(",")
        right = self.config()
        kind, text, pos = self.peek()
        if text == ",":
            raise ParseError("configurations must be binary: one comma per bracket pair", position=pos)
        self.expect("]")
        return Node(left, right, self.mode_suffix())

    def finish(self):
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {text!r}", position=pos)


def parse_formula(text: str, modes: ModeTable | None = None) -> Formula:
    """Parse one categorial type.

    >>> parse_formula("N\\\\S")
    Under(argument=Atom(name='N'), result=Atom(name='S'), mode='0')
    """
    p = _Parser(text, modes if modes is not None else ModeTable.for_calc("l"))
    f = p.formula()
    p.finish()
    return f


def parse_sequent(text: str, calc: str = "l", modes: ModeTable | None = None) -> Sequent:
    """Parse ``F1, F2 => G`` (L) or ``[[F1, F2], F3] => G`` (NL, multimodal).

    Under NL a comma list without brackets yields a SequentL: bracket-free
    input whose structure is to be discovered.
    """
    calc = calc.lower()
    if modes is None:
        modes = ModeTable.for_calc(calc)
    p = _Parser(text, modes)
    if calc in ("l", "boxedl"):
        ante = [p.formula()]
        while p.peek()[1] == ",":
            p.next()
            ante.append(p.formula())
        p.expect("=>")
        succ = p.formula()
        p.finish()
        return SequentL(tuple(ante), succ)
    first = p.config()
    if p.peek()[1] == ",":
        if not isinstance(first, Leaf):
            raise ParseError("cannot mix bracketed and bare antecedent items", position=p.peek()[2])
        ante = [first.formula]
        while p.peek()[1] == ",":
            p.next()
            ante.append(p.formula())
        p.expect("=>")
        succ = p.formula()
        p.finish()
        return SequentL(tuple(ante), succ)
    p.expect("=>")
    succ = p.formula()
    p.finish()
    return SequentNL(first, succ)


def parse_bracketed_words(text: str):
    """Parse ``[[w1, w2], w3]`` into a tree of word tokens (leaves are str)."""
    tokens = re.findall(r"\[|\]|,|\{[^}]*\}|[^\s\[\],{}]+", text)
    pos = 0

    def walk():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of bracketed sentence")
        tok = tokens[pos]
        pos += 1
        if tok != "[":
            if tok in ("]", ","):
                raise ParseError(f"unexpected {tok!r} in bracketed sentence")
            return tok
        left = walk()
        if pos >= len(tokens) or tokens[pos] != ",":
            raise ParseError("configurations must be binary: one comma per bracket pair")
        pos += 1
        right = walk()
        if pos >= len(tokens) or tokens[pos] != "]":
            raise ParseError("configurations must be binary: one comma per bracket pair")
        pos += 1
        mode = DEFAULT_MODE
        if pos < len(tokens) and tokens[pos].startswith("{"):
            mode = tokens[pos][1:-1]
            pos += 1
        return (left, right, mode)

    tree = walk()
    if pos != len(tokens):
        raise ParseError(f"unexpected {tokens[pos]!r} after bracketed sentence")
    return tree


# -- lexicons --------------------------------------------------------------------


@dataclass(frozen=True)
class Lexicon:
    entries: Mapping[str, tuple] = field(default_factory=dict)
    modes: ModeTable = field(default_factory=lambda: ModeTable.for_calc("l"))

    def lookup(self, word: str) -> tuple:
        return self.entries.get(word, ())

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)


_MODE_LINE = re.compile(r"mode\s+(\S+)\s+(assoc|nonassoc)\s*$")


def parse_lexicon(text: str, modes: ModeTable | None = None) -> Lexicon:
    """Read ``word : Formula`` lines; ``mode <name> assoc|nonassoc`` declares modes."""
    modes = modes if modes is not None else ModeTable.for_calc("l")
    entries: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _MODE_LINE.match(line)
        if m:
            modes = modes.with_mode(Mode(m.group(1), m.group(2) == "assoc"))
            continue
        if line.startswith("mode ") and ":" not in line:
            raise ParseError("mode declaration must be 'mode <name> assoc|nonassoc'", line=lineno)
        word, sep, rest = line.partition(":")
        word = word.strip()
        if not sep or not word or any(c.isspace() for c in word):
            raise ParseError("expected 'word : Formula'", line=lineno)
        try:
            f = parse_formula(rest, modes)
        except ParseError as e:
            raise ParseError(e.message, position=e.position, line=lineno) from None
        entries.setdefault(word, []).append(f)
    return Lexicon({w: tuple(fs) for w, fs in entries.items()}, modes)


def iter_formulas(s: Sequent) -> Iterator[Formula]:
    yield from (s.antecedent if isinstance(s, SequentL) else leaves(s.antecedent))
    yield s.succedent
