"""Engine-versus-oracle cross-validation over enumerated sequents.

Each ``compare_*`` function walks ``balanced_sequents`` in size order and
stops early when a time budget runs out, so a report always says how far the
enumeration got: every level below ``complete_through + 1`` was covered in
full.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .compiler import Regime, compile_sequent
from .engine import (
    SolveStats,
    check_groundness,
    check_linearity,
    check_skolem_sharing,
    check_uniformity,
    prosodic_sequent,
    solve,
)
from .formula import SequentL, SequentNL, erase_brackets, format_sequent, leaves, sequent_connectives
from .sequent_oracle import balanced_sequents, bracketings, count_balanced, derivable, proof_count, sequent_space_size


@dataclass
class Mismatch:
    sequent: str
    check: str
    engine: object
    oracle: object

    def __str__(self):
        return f"{self.check}: {self.sequent}  engine={self.engine} oracle={self.oracle}"


@dataclass
class CompareReport:
    calc: str
    max_connectives: int
    checked: int = 0
    derivable: int = 0
    per_level: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)
    traces: int = 0
    invariant_failures: list = field(default_factory=list)
    nontrivial_matches: int = 0
    total_matches: int = 0
    candidates_rejected: int = 0
    groundness_violations: int = 0
    balance_pruned: int = 0
    complete_through: int = -1
    elapsed: float = 0.0
    exhausted: bool = True
    sampled: bool = False
    space: int = 0  # full enumeration size through complete_through (balanced or not)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.invariant_failures

    def summary(self) -> str:
        if self.sampled:
            reach = f"random sample of atom-balanced sequents at {self.max_connectives} connectives"
        elif self.exhausted:
            reach = f"exhaustive through {self.complete_through} connectives"
        else:
            reach = (
                f"exhaustive through {self.complete_through} connectives, "
                f"partial at {self.complete_through + 1} (budget)"
            )
        of = f" of {self.space} in the space" if self.space else ""
        return (
            f"{self.calc}: {self.checked} sequents checked{of} ({reach}), {self.derivable} derivable, "
            f"{self.traces} traces, {len(self.mismatches)} mismatches, "
            f"{len(self.invariant_failures)} invariant failures"
        )


def _check_traces(report: CompareReport, traces, s, groundness=True):
    for t in traces:
        report.traces += 1
        if groundness and not check_groundness(t):
            report.groundness_violations += 1
        checks = {
            "linearity": check_linearity(t),
            "uniformity": check_uniformity(t),
            "skolem-sharing": check_skolem_sharing(t),
        }
        for name, ok in checks.items():
            if not ok:
                report.invariant_failures.append(Mismatch(format_sequent(s), name, False, True))


class _Budget:
    def __init__(self, seconds):
        self.deadline = None if seconds is None else time.monotonic() + seconds

    def spent(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline


def _balanced(s) -> bool:
    ante = leaves(s.antecedent) if isinstance(s, SequentNL) else s.antecedent
    return count_balanced(ante, s.succedent)


def _walk(report: CompareReport, stream, budget, visit):
    start = time.monotonic()
    level = None
    for i, s in enumerate(stream):
        n = sequent_connectives(s)
        if level is not None and n != level:
            report.complete_through = level
        level = n
        if i % 256 == 0 and budget.spent():
            report.exhausted = False
            break
        report.checked += 1
        report.per_level[n] = report.per_level.get(n, 0) + 1
        if not _balanced(s):
            # both sides reject outright: the oracle by the count invariant, the
            # engine by predicate-balance pruning (same counts, see predicate_balance)
            report.balance_pruned += 1
            continue
        visit(s)
    else:
        report.complete_through = report.max_connectives
    report.elapsed = time.monotonic() - start
    return report


def _enumerated(report, stream, budget, visit, calc, atoms):
    """Walk the balanced enumeration; unbalanced sequents are settled by counting on both sides."""
    _walk(report, stream, budget, visit)
    if report.complete_through >= 0:
        report.space = sequent_space_size(len(atoms), report.complete_through, calc)
    return report


def compare_l(atoms=("A", "B"), max_connectives=3, budget=None, boxed=True, all_traces=True,
              min_connectives=0, sequents=None) -> CompareReport:
    """Relational engine and focused prover against ``prove_l``."""
    report = CompareReport("l", max_connectives)

    def visit(s: SequentL):
        want = derivable("l", s)
        stats = SolveStats()
        traces = list(solve(compile_sequent(s, Regime.RELATIONAL), first_only=not all_traces, stats=stats))
        got = bool(traces)
        report.derivable += want
        report.nontrivial_matches += stats.counter.nontrivial
        report.total_matches += stats.counter.calls
        if got != want:
            report.mismatches.append(Mismatch(format_sequent(s), "relational", got, want))
        _check_traces(report, traces, s, groundness=True)
        if boxed:
            fb = derivable("boxedl", s)
            if fb != want:
                report.mismatches.append(Mismatch(format_sequent(s), "focused", fb, want))
            if want and proof_count("boxedl", s) > proof_count("l", s):
                report.mismatches.append(
                    Mismatch(format_sequent(s), "count", proof_count("boxedl", s), proof_count("l", s))
                )

    if sequents is not None:
        return _walk(report, sequents, _Budget(budget), visit)
    stream = balanced_sequents(atoms, max_connectives, "l", min_connectives=min_connectives)
    return _enumerated(report, stream, _Budget(budget), visit, "l", atoms)


def compare_nl(atoms=("A", "B"), max_connectives=3, budget=None, all_traces=True,
               min_connectives=0, sequents=None) -> CompareReport:
    """Groupoid engine on bracketed sequents against ``prove_nl``; also bracket erasure."""
    report = CompareReport("nl", max_connectives)

    def visit(s: SequentNL):
        want = derivable("nl", s)
        traces = list(solve(compile_sequent(s, Regime.GROUPOID), first_only=not all_traces))
        got = bool(traces)
        report.derivable += want
        if got != want:
            report.mismatches.append(Mismatch(format_sequent(s), "groupoid", got, want))
        if want and not derivable("l", erase_brackets(s)):
            report.mismatches.append(Mismatch(format_sequent(s), "bracket-erasure", False, True))
        _check_traces(report, traces, s, groundness=False)

    if sequents is not None:
        return _walk(report, sequents, _Budget(budget), visit)
    stream = balanced_sequents(atoms, max_connectives, "nl", min_connectives=min_connectives)
    return _enumerated(report, stream, _Budget(budget), visit, "nl", atoms)


def compare_simultaneous(atoms=("A", "B"), max_connectives=3, max_types=5, budget=None,
                         min_connectives=0, sequents=None) -> CompareReport:
    """Simultaneous engine on bracket-free sequents against NL over all bracketings."""
    report = CompareReport("simultaneous", max_connectives)

    def visit(s: SequentL):
        if len(s.antecedent) > max_types:
            return
        nl_any = any(derivable("nl", SequentNL(c, s.succedent)) for c in bracketings(tuple(s.antecedent)))
        l_ok = derivable("l", s)
        stats = SolveStats()
        traces = list(solve(compile_sequent(s, Regime.SIMULTANEOUS), stats=stats, include_rejected=True))
        accepted = [t for t in traces if t.accepted]
        report.derivable += nl_any
        report.candidates_rejected += stats.rejected
        label = format_sequent(s)
        if bool(accepted) != nl_any:
            report.mismatches.append(Mismatch(label, "nl-discovery", bool(accepted), nl_any))
        if bool(traces) != l_ok:
            report.mismatches.append(Mismatch(label, "relational-side", bool(traces), l_ok))
        if l_ok and not nl_any and not stats.rejected:
            report.mismatches.append(Mismatch(label, "term-unification-fails", stats.rejected, ">0"))
        for t in accepted:
            if not derivable("nl", prosodic_sequent(t)):
                report.mismatches.append(Mismatch(label, "prosodic-soundness", format_sequent(prosodic_sequent(t)), True))
        _check_traces(report, traces, s, groundness=True)

    if sequents is not None:
        return _walk(report, sequents, _Budget(budget), visit)
    stream = (
        s for s in balanced_sequents(atoms, max_connectives, "l", min_connectives=min_connectives)
        if len(s.antecedent) <= max_types
    )
    return _enumerated(report, stream, _Budget(budget), visit, "l", atoms)
