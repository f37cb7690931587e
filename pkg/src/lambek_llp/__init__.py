"""Lambek categorial deduction by linear logic programming.

Type assignments are compiled into linear clauses labelled with prosodic
terms, string spans, or both, and run by resource-conscious resolution.
A Cut-free sequent prover serves as an independent oracle.
"""

from .compiler import (
    AtomGoal,
    Clause,
    Hypothetical,
    Program,
    Regime,
    compile,
    compile_sequent,
    flatten,
    format_program,
    translate_sequent,
    unfold,
)
from .engine import (
    DerivationTrace,
    MatchStats,
    check_linearity,
    check_skolem_sharing,
    check_uniformity,
    dt_step,
    format_trace,
    instrument_matching,
    res_step,
    solve,
)
from .errors import (
    Clash,
    LambekError,
    MixedMode,
    NegativeProductInGroupoidRegime,
    NotGround,
    OccursCheck,
    ParseError,
    PositiveProduct,
    ProductNotSupported,
    RegimeMismatch,
    UnknownWord,
)
from .formula import (
    Atom,
    ModeTable,
    Over,
    Prod,
    SequentL,
    SequentNL,
    Under,
    erase_brackets,
    format_formula,
    parse_formula,
    parse_lexicon,
    parse_sequent,
)
from .labels import (
    QueryContext,
    apply_subst,
    match_assoc,
    match_nonassoc,
    match_span,
    solve_equations_nonassoc,
)
from .sequent_oracle import (
    count_proofs,
    enumerate_sequents,
    prove_boxed_l,
    prove_l,
    prove_nl,
)

__version__ = "0.1.0"
