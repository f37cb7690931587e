"""Exception taxonomy shared by every module."""


class LambekError(Exception):
    """Base class for all errors raised by the package."""


class ParseError(LambekError, ValueError):
    """Malformed formula, sequent or lexicon text.

    ``position`` is a character offset into the parsed text (or None),
    ``line`` a 1-based line number for lexicon files (or None).
    """

    def __init__(self, message, position=None, line=None):
        self.message = message
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"col {position}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NotGround(LambekError):
    """A one-way matcher received a non-ground subject term."""


class MixedMode(LambekError):
    """Associative matching was asked to handle a non-associative mode."""


class UnificationFailure(LambekError):
    pass


class Clash(UnificationFailure):
    """Constructor or constant mismatch during unification."""


class OccursCheck(UnificationFailure):
    """A variable would be bound to a term containing itself."""


class RegimeMismatch(LambekError):
    """The sequent shape or modes are incompatible with the labelling regime."""


class PositiveProduct(LambekError):
    """A product occurs at positive polarity (antecedent side); not Horn."""

    def __init__(self, formula):
        self.formula = formula
        from .formula import format_formula

        super().__init__(
            f"positive product {format_formula(formula)} cannot be compiled into a program clause"
        )


class NegativeProductInGroupoidRegime(LambekError):
    """A succedent-side product under pure groupoid labels (split not determined)."""

    def __init__(self, formula):
        self.formula = formula
        from .formula import format_formula

        super().__init__(
            f"negative product {format_formula(formula)} needs relational or simultaneous labels"
        )


class UnknownWord(LambekError):
    def __init__(self, word):
        self.word = word
        super().__init__(f"word not in lexicon: {word!r}")


class ProductNotSupported(LambekError):
    """The focused calculus is only defined for product-free sequents."""
