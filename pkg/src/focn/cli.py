"""Command-line front end.

Subcommands: learn, eval, check, pac, gen, verify, stats.  Every run that
writes files also writes a JSON manifest next to them (flags, seeds, input
and output digests, local-access counts, wall time) so byte-level
reproducibility can be audited.  Exit codes: 0 success, 1 rejection or failed
verification, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .errors import FocnError
from .generators import (SimpleGraph, gen_encyclopedia, gen_eth, gen_random,
                         gen_thm2)
from .learner import (MODE_CONSISTENT, MODE_MIN_ERROR, LearnerConfig,
                      format_training, learn_bounded, learn_consistent,
                      learn_min_error, load_training, parse_hypothesis,
                      serialize_hypothesis, evaluate_hypothesis,
                      training_error)
from .logic import CompiledFormula, parse_formula, parse_term
from .oracle import brute_force_consistent, brute_force_min_error
from .pac import load_distribution, run_pac_experiment
from .structure import Signature, Structure, load_structure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="focn",
        description="Learn Boolean tuple classifiers over a relational "
                    "structure using local access only.")
    sub = parser.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", help="learn a hypothesis from examples")
    learn.add_argument("--structure", required=True)
    learn.add_argument("--train", required=True)
    learn.add_argument("--k", type=int, required=True)
    learn.add_argument("--ell", type=int, default=0)
    learn.add_argument("--r", type=int, default=1)
    learn.add_argument("--w", type=int, default=1)
    learn.add_argument("--mode", choices=("consistent", "minerr"),
                       default="consistent")
    learn.add_argument("--bounded-degree", type=int, default=None,
                       help="use the degree-bounded learner with this bound")
    learn.add_argument("--degree", type=int, default=None,
                       help="the structure's Gaifman degree (an input, "
                            "not measured)")
    learn.add_argument("--jobs", type=int, default=1)
    learn.add_argument("--out", default=None, help="hypothesis output file")

    evalp = sub.add_parser("eval", help="classify tuples with a hypothesis")
    evalp.add_argument("--structure", required=True)
    evalp.add_argument("--hypothesis", required=True)
    evalp.add_argument("--tuples", required=True,
                       help="file with one tuple of element names per line")
    evalp.add_argument("--out", default=None)

    check = sub.add_parser("check", help="evaluate a formula or counting term")
    check.add_argument("--structure", required=True)
    check.add_argument("--formula", required=True)
    check.add_argument("--assign", default="",
                       help="structure assignment, e.g. c=1,p=8")
    check.add_argument("--nassign", default="",
                       help="number assignment, e.g. kappa=2")

    pac = sub.add_parser("pac", help="run the PAC experiment")
    pac.add_argument("--structure", required=True)
    pac.add_argument("--dist", required=True)
    pac.add_argument("--k", type=int, required=True)
    pac.add_argument("--ell", type=int, default=0)
    pac.add_argument("--r", type=int, default=1)
    pac.add_argument("--w", type=int, default=1)
    pac.add_argument("--bounded-degree", type=int, required=True)
    pac.add_argument("--degree", type=int, required=True)
    pac.add_argument("--eps", type=float, default=0.2)
    pac.add_argument("--delta", type=float, default=0.2)
    pac.add_argument("--trials", type=int, default=100)
    pac.add_argument("--seed", type=int, default=0)

    gen = sub.add_parser("gen", help="generate a named structure")
    gen.add_argument("kind",
                     choices=("encyclopedia", "thm2", "eth", "random"))
    gen.add_argument("--out-prefix", required=True)
    gen.add_argument("--t", type=int, default=6, help="thm2: column count")
    gen.add_argument("--n", type=int, default=3, help="thm2: block size")
    gen.add_argument("--graph-size", type=int, default=6,
                     help="eth: input graph size")
    gen.add_argument("--edge-prob", type=float, default=0.4,
                     help="eth: input graph edge probability")
    gen.add_argument("--q", type=int, default=3, help="eth: clique size")
    gen.add_argument("--size", type=int, default=12, help="random: universe")
    gen.add_argument("--degree-bound", type=int, default=3)
    gen.add_argument("--relations", default="E/2",
                     help="random: comma list of name/arity")
    gen.add_argument("--seed", type=int, default=0)

    verify = sub.add_parser(
        "verify", help="compare the learners against the brute-force oracles")
    verify.add_argument("--structure", required=True)
    verify.add_argument("--train", required=True)
    verify.add_argument("--k", type=int, required=True)
    verify.add_argument("--ell", type=int, default=0)
    verify.add_argument("--r", type=int, default=1)
    verify.add_argument("--w", type=int, default=1)

    stats = sub.add_parser("stats", help="report structure statistics")
    stats.add_argument("--structure", required=True)
    stats.add_argument("--r", type=int, default=1)
    stats.add_argument("--w", type=int, default=1)
    stats.add_argument("--ell", type=int, default=1)

    return parser


# ---------------------------------------------------------------------------
# manifest plumbing

def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_path: Path, command: str, flags: dict,
                    inputs: list, outputs: list, receipt, started: float):
    manifest = {
        "command": command,
        "flags": {key: value for key, value in sorted(flags.items())
                  if key != "command" and value is not None},
        "inputs": {str(p): _digest(Path(p)) for p in inputs},
        "outputs": {str(p): _digest(Path(p)) for p in outputs},
        "access_receipt": {
            "neighbor_queries": receipt.neighbor_queries,
            "tuple_queries": receipt.tuple_queries,
        } if receipt is not None else None,
        "wall_seconds": round(time.monotonic() - started, 6),
    }
    path = out_path.with_name(out_path.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_structure_file(path: str) -> Structure:
    return load_structure(Path(path).read_text())


def _parse_assignment(text: str, structure: Optional[Structure]) -> dict:
    out: dict = {}
    if not text.strip():
        return out
    for piece in text.split(","):
        name, _, value = piece.strip().partition("=")
        if not name or not value:
            raise FocnError(f"bad assignment piece {piece!r}")
        out[name] = structure.uid(value) if structure is not None else int(value)
    return out


# ---------------------------------------------------------------------------
# subcommands

def _cmd_learn(args) -> int:
    started = time.monotonic()
    structure = _load_structure_file(args.structure)
    training = load_training(Path(args.train).read_text(), structure)
    mode = MODE_CONSISTENT if args.mode == "consistent" else MODE_MIN_ERROR
    config = LearnerConfig(args.k, args.ell, args.r, args.w, mode=mode,
                           bounded_degree=args.bounded_degree,
                           degree=args.degree)
    structure.reset_access()
    if args.bounded_degree is not None:
        outcome = learn_bounded(structure, training, config, jobs=args.jobs)
        hypothesis = outcome.hypothesis
    elif mode == MODE_CONSISTENT:
        outcome = learn_consistent(structure, training, config, jobs=args.jobs)
        hypothesis = outcome.hypothesis
    else:
        hypothesis = learn_min_error(structure, training, config,
                                     jobs=args.jobs)
    receipt = structure.access_receipt()
    if hypothesis is None:
        print("Reject")
        return 1
    err = training_error(structure, hypothesis, training) if training.examples \
        else Fraction(0)
    params = " ".join(structure.name(v) for v in hypothesis.parameters) or "-"
    print(f"parameters: {params}")
    print(f"positive types: {len(hypothesis.positive_types)}")
    print(f"radius: {hypothesis.radius}")
    print(f"training error: {err}")
    print(f"neighbor queries: {receipt.neighbor_queries}  "
          f"tuple queries: {receipt.tuple_queries}")
    if args.out:
        out = Path(args.out)
        out.write_text(serialize_hypothesis(hypothesis, structure))
        _write_manifest(out, "learn", vars(args),
                        [args.structure, args.train], [out], receipt, started)
    return 0


def _cmd_eval(args) -> int:
    started = time.monotonic()
    structure = _load_structure_file(args.structure)
    hypothesis = parse_hypothesis(Path(args.hypothesis).read_text(), structure)
    bits = []
    for no, raw in enumerate(Path(args.tuples).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        names = line.split()
        if len(names) != hypothesis.arity:
            raise FocnError(
                f"line {no}: expected {hypothesis.arity} elements")
        entries = tuple(structure.uid(n) for n in names)
        bits.append(evaluate_hypothesis(structure, hypothesis, entries))
    text = "\n".join(str(b) for b in bits) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        _write_manifest(out, "eval", vars(args),
                        [args.structure, args.hypothesis, args.tuples],
                        [out], structure.access_receipt(), started)
    return 0


def _cmd_check(args) -> int:
    structure = _load_structure_file(args.structure)
    nassign = _parse_assignment(args.nassign, None)
    try:
        node = parse_formula(args.formula, structure.signature)
    except FocnError as formula_error:
        try:
            node = parse_term(args.formula, structure.signature)
        except FocnError:
            raise formula_error from None
    assign = _parse_assignment(args.assign, structure)
    compiled = CompiledFormula(structure, node)
    print(compiled(assign, nassign))
    return 0


def _cmd_pac(args) -> int:
    structure = _load_structure_file(args.structure)
    distribution = load_distribution(Path(args.dist).read_text(), structure)
    config = LearnerConfig(args.k, args.ell, args.r, args.w,
                           mode=MODE_MIN_ERROR,
                           bounded_degree=args.bounded_degree,
                           degree=args.degree)
    report = run_pac_experiment(structure, distribution, config, args.eps,
                                args.delta, args.trials, args.seed)
    print(f"class size: {report.class_size}")
    print(f"sample size per trial: {report.sample_size}")
    print(f"class minimum err_D: {report.class_min}")
    print(f"targets: eps={report.eps} delta={report.delta}")
    print("trial  err_T      err_D      success")
    for index, trial in enumerate(report.trials):
        print(f"{index:5d}  {str(trial.training_error):9s}  "
              f"{str(trial.generalization_error):9s}  "
              f"{'yes' if trial.success else 'no'}")
    freq = report.success_frequency
    print(f"success frequency: {freq} ({float(freq):.3f})")
    return 0


def _cmd_gen(args) -> int:
    started = time.monotonic()
    prefix = Path(args.out_prefix)
    outputs: list[Path] = []

    def emit(suffix: str, text: str):
        path = prefix.with_name(prefix.name + suffix)
        path.write_text(text)
        outputs.append(path)

    if args.kind == "encyclopedia":
        bundle = gen_encyclopedia()
        emit(".struct", bundle.structure.to_text())
        emit(".train", format_training(bundle.trainings["examples"],
                                       bundle.structure))
        emit(".formula", bundle.formulas["phi"] + "\n")
    elif args.kind == "thm2":
        bundle = gen_thm2(args.t, args.n)
        emit(".struct", bundle.structure.to_text())
        emit(".t1.train", format_training(bundle.trainings["t1"],
                                          bundle.structure))
        emit(".t2.train", format_training(bundle.trainings["t2"],
                                          bundle.structure))
        emit(".formula", bundle.formulas["phi"] + "\n")
    elif args.kind == "eth":
        import random as _random
        graph = SimpleGraph.random(args.graph_size, args.edge_prob,
                                   _random.Random(args.seed))
        bundle = gen_eth(graph, args.q)
        emit(".struct", bundle.structure.to_text())
        emit(".train", format_training(bundle.trainings["t"],
                                       bundle.structure))
        emit(".formula", bundle.formulas["phi"] + "\n")
    else:
        relations = []
        for piece in args.relations.split(","):
            name, _, arity = piece.strip().partition("/")
            relations.append((name, int(arity)))
        structure = gen_random(args.size, args.degree_bound,
                               Signature(tuple(relations)), args.seed)
        emit(".struct", structure.to_text())

    for path in outputs:
        print(f"wrote {path}")
    _write_manifest(prefix.with_name(prefix.name + ".gen"), "gen", vars(args),
                    [], outputs, None, started)
    return 0


def _cmd_verify(args) -> int:
    structure = _load_structure_file(args.structure)
    training = load_training(Path(args.train).read_text(), structure)
    config = LearnerConfig(args.k, args.ell, args.r, args.w)
    outcome = learn_consistent(structure, training, config)
    reference = brute_force_consistent(structure, training, config)
    agree_consistent = outcome.rejected == (reference is None)
    print(f"learner: {'Reject' if outcome.rejected else 'hypothesis'}")
    print(f"oracle:  {'none' if reference is None else 'hypothesis'}")
    print(f"consistent-mode agreement: {'yes' if agree_consistent else 'NO'}")
    min_config = LearnerConfig(args.k, args.ell, args.r, args.w,
                               mode=MODE_MIN_ERROR)
    best = learn_min_error(structure, training, min_config)
    err = training_error(structure, best, training)
    _, oracle_err = brute_force_min_error(structure, training, min_config)
    agree_min = err == oracle_err
    print(f"min-error learner: {err}")
    print(f"min-error oracle:  {oracle_err}")
    print(f"min-error agreement: {'yes' if agree_min else 'NO'}")
    return 0 if agree_consistent and agree_min else 1


def _cmd_stats(args) -> int:
    structure = _load_structure_file(args.structure)
    config = LearnerConfig(1, args.ell, args.r, args.w)
    print(f"elements: {structure.n}")
    print(f"gaifman degree: {structure.max_degree()}")
    for name, arity in structure.signature.relations:
        print(f"relation {name}/{arity}: {len(structure.relation(name))} tuples")
    print(f"locality radius for (r={args.r}, w={args.w}): {config.rho}")
    print(f"parameter search radius for ell={args.ell}: {config.search_radius}")
    return 0


_COMMANDS = {
    "learn": _cmd_learn,
    "eval": _cmd_eval,
    "check": _cmd_check,
    "pac": _cmd_pac,
    "gen": _cmd_gen,
    "verify": _cmd_verify,
    "stats": _cmd_stats,
}


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except FocnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
