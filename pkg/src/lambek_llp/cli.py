"""Command-line interface: prove, parse, compile, oracle, compare.

Exit codes: 0 derivable (or success), 1 underivable (or mismatches), 2 error.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass, field

from . import compare as cmp
from .compiler import Regime, compile_sequent, format_program, sentence_sequents
from .engine import SolveStats, format_trace, prosodic_words, solve
from .errors import LambekError, ParseError
from .formula import (
    Leaf,
    Mode,
    ModeTable,
    SequentL,
    SequentNL,
    format_formula,
    format_sequent,
    leaves,
    parse_formula,
    parse_lexicon,
    parse_sequent,
)
from .sequent_oracle import PROVERS, count_balanced, count_proofs, random_sequent, render_proof, sequent_space_size

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    calc: str = "l"
    regime: str | None = None
    lexicon_path: str | None = None
    target: str | None = None
    all: bool = False
    trace: bool = False
    max_connectives: int = 3
    atoms: list = field(default_factory=lambda: ["A", "B"])
    seed: int = 0
    modes: list = field(default_factory=list)
    budget: float | None = None
    sample: int = 0
    text: str = ""


def mode_table(cfg: RunConfig) -> ModeTable:
    table = ModeTable.for_calc("l" if cfg.calc in ("l", "boxedl") else "nl")
    for spec in cfg.modes:
        name, _, kind = spec.partition("=")
        if kind not in ("assoc", "nonassoc"):
            raise ParseError(f"--mode expects NAME=assoc or NAME=nonassoc, got {spec!r}")
        table = table.with_mode(Mode(name, kind == "assoc"))
    return table


def default_regime(calc: str, s) -> Regime:
    if calc == "l":
        return Regime.RELATIONAL
    if calc == "multi":
        return Regime.GROUPOID
    if isinstance(s, SequentNL) and not isinstance(s.antecedent, Leaf):
        return Regime.GROUPOID
    return Regime.SIMULTANEOUS


def _regime(cfg: RunConfig, s) -> Regime:
    return Regime(cfg.regime) if cfg.regime else default_regime(cfg.calc, s)


def _run_program(p, cfg: RunConfig, out) -> bool:
    stats = SolveStats()
    traces = solve(p, first_only=not cfg.all, stats=stats)
    found = 0
    for t in traces:
        found += 1
        if cfg.trace:
            out.write(f"-- trace {found}\n{format_trace(t)}\n")
        if t.prosodic is not None:
            if not cfg.trace:
                out.write(f"prosodic: {t.prosodic}\n")
            out.write(f"structure: {prosodic_words(t.prosodic, p)}\n")
    if found:
        out.write(f"derivable ({found} trace{'s' if found != 1 else ''}{'' if cfg.all else ', first only'})\n")
    else:
        note = ""
        if stats.rejected:
            note = f" ({stats.rejected} relational derivation(s) rejected by term unification)"
        out.write(f"underivable{note}\n")
    return bool(found)


def cmd_prove(cfg: RunConfig, out=sys.stdout) -> int:
    modes = mode_table(cfg)
    s = parse_sequent(cfg.text, "nl" if cfg.calc == "multi" else cfg.calc, modes)
    regime = _regime(cfg, s)
    out.write(f"sequent: {format_sequent(s)}\nregime: {regime.value}\n")
    p = compile_sequent(s, regime, modes)
    return EXIT_OK if _run_program(p, cfg, out) else EXIT_NO


def _lexicon(cfg: RunConfig):
    if not cfg.lexicon_path:
        raise ParseError("--lexicon is required")
    if not cfg.target:
        raise ParseError("--target is required")
    modes = mode_table(cfg)
    with open(cfg.lexicon_path, encoding="utf-8") as fh:
        lex = parse_lexicon(fh.read(), modes)
    return lex, parse_formula(cfg.target, lex.modes)


def cmd_parse(cfg: RunConfig, out=sys.stdout) -> int:
    lex, target = _lexicon(cfg)
    any_ok = False
    for k, (words, combo, s) in enumerate(sentence_sequents(cfg.text, lex, target), 1):
        regime = _regime(cfg, s)
        out.write(f"reading {k}: " + ", ".join(f"{w} : {format_formula(f)}" for w, f in zip(words, combo)) + "\n")
        out.write(f"sequent: {format_sequent(s)}\nregime: {regime.value}\n")
        p = compile_sequent(s, regime, lex.modes, words=words)
        any_ok |= _run_program(p, cfg, out)
    return EXIT_OK if any_ok else EXIT_NO


def cmd_compile(cfg: RunConfig, out=sys.stdout) -> int:
    if not cfg.text.strip():
        raise ParseError("nothing to compile: give a sequent or a sentence")
    if cfg.lexicon_path:
        lex, target = _lexicon(cfg)
        for words, combo, s in sentence_sequents(cfg.text, lex, target):
            p = compile_sequent(s, _regime(cfg, s), lex.modes, words=words)
            out.write(f"sequent: {format_sequent(s)}\n{format_program(p)}\n")
        return EXIT_OK
    modes = mode_table(cfg)
    s = parse_sequent(cfg.text, "nl" if cfg.calc == "multi" else cfg.calc, modes)
    p = compile_sequent(s, _regime(cfg, s), modes)
    out.write(format_program(p) + "\n")
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, out=sys.stdout) -> int:
    calc = cfg.calc if cfg.calc in PROVERS else "nl"
    s = parse_sequent(cfg.text, "l" if calc == "boxedl" else calc, mode_table(cfg))
    if calc == "nl" and isinstance(s, SequentL):
        if len(s.antecedent) > 1:
            raise ParseError("NL sequents need a bracketed antecedent")
        s = SequentNL(Leaf(s.antecedent[0]), s.succedent)
    prover = PROVERS[calc]
    n = count_proofs(prover, s)
    out.write(f"sequent: {format_sequent(s)}\ncalculus: {calc}\n")
    out.write(f"{'derivable' if n else 'underivable'}: {n} proof{'s' if n != 1 else ''}\n")
    if cfg.all or cfg.trace:
        for i, proof in enumerate(prover(s), 1):
            out.write(f"-- proof {i}\n{render_proof(proof)}\n")
    return EXIT_OK if n else EXIT_NO


def cmd_compare(cfg: RunConfig, out=sys.stdout) -> int:
    atoms = tuple(cfg.atoms)
    if cfg.calc == "l":
        fn, label = cmp.compare_l, "relational vs prove_l, focused vs prove_l"
    elif cfg.regime == "simultaneous":
        fn, label = cmp.compare_simultaneous, "simultaneous vs prove_nl over all bracketings"
    else:
        fn, label = cmp.compare_nl, "groupoid vs prove_nl"
    out.write(f"compare: {label}; atoms {','.join(atoms)}; <= {cfg.max_connectives} connectives\n")
    out.write(f"space: {sequent_space_size(len(atoms), cfg.max_connectives, 'nl' if fn is cmp.compare_nl else 'l')} sequents\n")
    if cfg.sample:
        report = _sampled(fn, atoms, cfg)
    else:
        report = fn(atoms=atoms, max_connectives=cfg.max_connectives, budget=cfg.budget)
    for m in report.mismatches:
        out.write(f"MISMATCH {m}\n")
    for m in report.invariant_failures:
        out.write(f"INVARIANT {m}\n")
    out.write(report.summary() + "\n")
    return EXIT_OK if report.ok else EXIT_NO


def _sampled(fn, atoms, cfg: RunConfig):
    """Uniform random sample of the top level, reproducible from ``--seed``."""
    rng = random.Random(cfg.seed)
    calc = "nl" if fn is cmp.compare_nl else "l"
    level = cfg.max_connectives
    pool = []
    while len(pool) < cfg.sample:
        # unbalanced sequents are decided by counting alone, so draw balanced ones
        s = random_sequent(atoms, level, rng, max_length=level + 1, calc=calc)
        ante = leaves(s.antecedent) if isinstance(s, SequentNL) else s.antecedent
        if count_balanced(ante, s.succedent):
            pool.append(s)
    report = fn(atoms=atoms, max_connectives=level, budget=cfg.budget, sequents=pool)
    report.sampled = True
    return report


COMMANDS = {
    "prove": cmd_prove,
    "parse": cmd_parse,
    "compile": cmd_compile,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lambek-llp", description="Lambek categorial deduction by linear logic programming")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, calcs=("l", "nl", "multi")):
        p.add_argument("--calc", choices=calcs, default="l")
        p.add_argument("--regime", choices=[r.value for r in Regime])
        p.add_argument("--mode", action="append", default=[], metavar="NAME=assoc|nonassoc",
                       help="declare an extra mode (repeatable)")
        p.add_argument("--all", action="store_true", help="all traces/proofs, not just the first")
        p.add_argument("--trace", action="store_true", help="print derivation traces")

    p = sub.add_parser("prove", help="decide a sequent with the clausal engine")
    common(p)
    p.add_argument("text", metavar="SEQUENT", nargs="+")

    p = sub.add_parser("parse", help="parse a sentence against a lexicon")
    common(p)
    p.add_argument("--lexicon", dest="lexicon_path", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("text", metavar="SENTENCE", nargs="+")

    p = sub.add_parser("compile", help="print the compiled program")
    common(p)
    p.add_argument("--lexicon", dest="lexicon_path")
    p.add_argument("--target")
    p.add_argument("text", metavar="INPUT", nargs="*", default=[])

    p = sub.add_parser("oracle", help="Cut-free sequent proof search")
    common(p, calcs=("l", "nl", "boxedl"))
    p.add_argument("text", metavar="SEQUENT", nargs="+")

    p = sub.add_parser("compare", help="engine against oracle over enumerated sequents")
    p.add_argument("--calc", choices=("l", "nl"), default="l")
    p.add_argument("--regime", choices=("groupoid", "simultaneous"))
    p.add_argument("--atoms", default="A,B")
    p.add_argument("--max-connectives", type=int, default=3)
    p.add_argument("--budget", type=float, help="stop after this many seconds")
    p.add_argument("--sample", type=int, default=0, help="check a random sample of the top level instead")
    p.add_argument("--seed", type=int, default=0)
    return ap


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for name in ("calc", "regime", "lexicon_path", "target", "all", "trace", "max_connectives",
                 "seed", "budget", "sample", "text"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if isinstance(cfg.text, list):
        cfg.text = " ".join(cfg.text)
    if hasattr(ns, "mode"):
        cfg.modes = list(ns.mode)
    if hasattr(ns, "atoms"):
        cfg.atoms = [a.strip() for a in ns.atoms.split(",") if a.strip()]
    return cfg


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    cfg = config_from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg, out)
    except (LambekError, OSError) as e:
        out.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_ERROR


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
