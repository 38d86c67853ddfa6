"""Command-line front end: ``skdist <command> <file-or-corpus-name> [options]``."""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from skdist.common import (
    CommonPartition,
    conditional_common_partition,
    helper_no_comm_key_rate,
    maximal_common_partition,
    no_comm_key_rate,
)
from skdist.config import SolverOptions
from skdist.corpus import get_entry, load_corpus, verify_corpus
from skdist.dist import (
    Channel,
    TripartiteDistribution,
    apply_channel_to_z,
    conditional_mutual_information,
    marginal_xy,
)
from skdist.distill import SimConfig, simulate_privacy_amplification
from skdist.errors import CorpusError, ReductionFailedError
from skdist.fileformat import load
from skdist.rates import (
    AuxiliarySystem,
    ac_rate_optimize,
    check_lemma4_certificate,
    deterministic_certificate_scan,
    intrinsic_information_upper,
    oneway_lower_bounds,
    rate_report,
)
from skdist.structure import (
    THEOREM3_FAIL,
    THEOREM3_PASS,
    StructureReport,
    check_theorem3,
    check_theorem4,
    classify,
    construct_reducing_channel,
    mixing_curve,
)
from skdist.types import Direction, FloatArray

logger = logging.getLogger(__name__)

type Payload = dict[str, Any]
type Command = Callable[[argparse.Namespace], Payload]


# ----- Input -----


def load_input(source: str) -> tuple[str, TripartiteDistribution]:
    """Read a ``.dist`` file, or fall back to the corpus entry of that name."""
    path = Path(source)
    if path.is_file():
        return path.stem, load(path).distribution
    name = path.name.removesuffix(".dist")
    try:
        return name, get_entry(name).distribution
    except CorpusError:
        raise CorpusError(f"{source!r} is neither a file nor a corpus entry") from None


def _options(args: argparse.Namespace) -> SolverOptions:
    return SolverOptions(
        restarts=args.restarts,
        iterations=args.iters,
        seed=args.seed,
        threads=args.threads,
        tol=args.tol,
    )


# ----- Payload builders -----


def _matrix(t: FloatArray) -> list[list[float]]:
    return [[float(v) for v in row] for row in t]


def _channel(c: Channel) -> Payload:
    return {"source": list(c.source), "target": list(c.target), "matrix": _matrix(c.t)}


def _aux(aux: AuxiliarySystem) -> Payload:
    t = aux.tensor()
    return {
        "x": list(aux.x),
        "p_ku_given_x": {
            x: [[float(v) for v in row] for row in t[i]] for i, x in enumerate(aux.x)
        },
    }


def _partition(part: CommonPartition) -> Payload:
    return {
        "blocks": [
            {"x": list(block.xs), "y": list(block.ys), "weight": block.weight}
            for block in part.blocks
        ],
        "entropy": part.entropy,
        "null_x": list(part.null_x),
        "null_y": list(part.null_y),
    }


def _structure(report: StructureReport) -> Payload:
    return {
        "uniform_block": report.is_uniform_block,
        "uniform_block_witness": report.uniform_block_witness,
        "uniform_block_residual": report.uniform_block_residual,
        "ubi": report.is_ubi,
        "theorem3_violations": [
            {
                "z": v.z,
                "block_i": {"x": list(v.block_i.xs), "y": list(v.block_i.ys)},
                "block_j": {"x": list(v.block_j.xs), "y": list(v.block_j.ys)},
                "mass": v.mass,
            }
            for v in report.thm3_violations
        ],
        "theorem4_witnesses": [
            {
                "z0": w.z0,
                "z1": w.z1,
                "case": w.case,
                "swapped": w.swapped,
                "pair": list(w.pair),
            }
            for w in report.thm4_witnesses
        ],
        "verdicts": dict(report.verdicts),
    }


# ----- Commands -----


def cmd_analyze(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    report = classify(d)
    rates = rate_report(d, _options(args))
    return {
        "command": "analyze",
        "input": name,
        "structure": _structure(report),
        "rates": {
            "cmi": rates.cmi,
            "no_comm": rates.no_comm,
            "helper_no_comm": rates.helper_no_comm,
            "intrinsic_upper": rates.intrinsic_upper,
            "oneway_lb_ab": rates.oneway_lb_ab,
            "oneway_lb_ba": rates.oneway_lb_ba,
            "ac_opt_lb": rates.ac_opt_lb,
            "ac_direction": rates.ac_direction,
            "ac_certified": rates.ac_certified,
        },
    }


def cmd_partition(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    cond = conditional_common_partition(d)
    return {
        "command": "partition",
        "input": name,
        "unconditional": _partition(maximal_common_partition(marginal_xy(d))),
        "conditional": {z: _partition(cond[z]) for z in cond},
        "no_comm": no_comm_key_rate(d),
        "helper_no_comm": helper_no_comm_key_rate(d),
    }


def cmd_classify(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    return {"command": "classify", "input": name, "structure": _structure(classify(d))}


def cmd_check_oneway(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    violations = check_theorem3(d)
    lb_ab, lb_ba = oneway_lower_bounds(d)
    payload: Payload = {
        "command": "check-oneway",
        "input": name,
        "cmi": conditional_mutual_information(d),
        "theorem3": THEOREM3_FAIL if violations else THEOREM3_PASS,
        "violations": [
            {"z": v.z, "x": list(v.block_i.xs), "y": list(v.block_j.ys), "mass": v.mass}
            for v in violations
        ],
        "oneway_lb_ab": lb_ab,
        "oneway_lb_ba": lb_ba,
    }
    if args.scan:
        tol = _options(args).tol
        scans: Payload = {}
        directions: tuple[Direction, ...] = ("ab", "ba")
        for direction in directions:
            scan = deterministic_certificate_scan(d, direction, tol)
            found = scan.certified
            scans[direction] = {
                "certified": found is not None,
                "objective": (
                    check_lemma4_certificate(d, found, tol, direction).objective
                    if found is not None
                    else None
                ),
                "min_max_residual": scan.min_max_residual,
                "scanned": scan.scanned,
            }
        payload["certificate_scan"] = scans
    return payload


def cmd_check_twoway(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    result = check_theorem4(d)
    witnesses: list[Payload] = []
    for w in result.witnesses:
        entry: Payload = {
            "z0": w.z0,
            "z1": w.z1,
            "case": w.case,
            "swapped": w.swapped,
            "pair": list(w.pair),
        }
        try:
            found = construct_reducing_channel(d, w.z0, w.z1)
        except ReductionFailedError as exc:
            entry["reduced"] = None
            entry["reduction_error"] = str(exc)
        else:
            entry["epsilon"] = found.epsilon
            entry["reduced"] = conditional_mutual_information(
                apply_channel_to_z(d, found.channel)
            )
        witnesses.append(entry)
    return {
        "command": "check-twoway",
        "input": name,
        "cmi": conditional_mutual_information(d),
        "theorem4": result.verdict,
        "witnesses": witnesses,
    }


def cmd_intrinsic(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    bound = intrinsic_information_upper(d, _options(args))
    return {
        "command": "intrinsic",
        "input": name,
        "cmi": conditional_mutual_information(d),
        "intrinsic_upper": bound.value,
        "channel": _channel(bound.channel),
    }


def cmd_oneway_opt(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    bound = ac_rate_optimize(d, _options(args), args.direction)
    return {
        "command": "oneway-opt",
        "input": name,
        "direction": bound.direction,
        "cmi": conditional_mutual_information(d),
        "ac_opt_lb": bound.value,
        "aux": _aux(bound.aux),
        "certified": bound.certificate.certified,
        "max_residual": bound.certificate.max_residual,
    }


def cmd_simulate_pa(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    cfg = SimConfig(
        n=args.n,
        rate=args.rate,
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        samples=args.samples,
        threads=args.threads,
    )
    result = simulate_privacy_amplification(d, cfg)
    return {
        "command": "simulate-pa",
        "input": name,
        "n": cfg.n,
        "rate": cfg.rate,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "key_size": result.key_size,
        "agreement": result.agreement,
        "leakage": result.leakage,
        "rate_achieved": result.rate_achieved,
        "best_trial": result.best_trial,
    }


def cmd_mixing_curve(args: argparse.Namespace) -> Payload:
    name, d = load_input(args.input)
    curve = mixing_curve(d, args.z0, args.z1, args.grid)
    return {
        "command": "mixing-curve",
        "input": name,
        "z0": curve.z0,
        "z1": curve.z1,
        "f0": curve.f0,
        "f1": curve.f1,
        "chord_gap": curve.chord_gap,
        "gap_at": curve.gap_at,
        "convex_near_zero": curve.convex_near_zero,
        "samples": [list(sample) for sample in curve.samples],
    }


def cmd_corpus_list(args: argparse.Namespace) -> Payload:
    entries = load_corpus(verify=False)
    return {
        "command": "corpus list",
        "entries": [
            {"name": name, "summary": entries[name].description.split("\n")[0]}
            for name in sorted(entries)
        ],
    }


def cmd_corpus_show(args: argparse.Namespace) -> Payload:
    entry = get_entry(args.name)
    d = entry.distribution
    return {
        "command": "corpus show",
        "name": entry.name,
        "description": entry.description,
        "x": list(d.x),
        "y": list(d.y),
        "z": list(d.z),
        "entries": [
            [d.x[i], d.y[j], d.z[k], float(d.p[i, j, k])]
            for i, j, k in np.argwhere(d.p > 0)
        ],
        "predicates": [p.description for p in entry.predicates],
    }


def cmd_corpus_verify(args: argparse.Namespace) -> Payload:
    outcomes = verify_corpus(load_corpus(verify=False))
    return {
        "command": "corpus verify",
        "passed": all(o.passed for o in outcomes),
        "results": [
            {
                "entry": o.entry,
                "predicate": o.predicate,
                "passed": o.passed,
                "error": o.error,
            }
            for o in outcomes
        ],
    }


# ----- Text rendering -----


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    return str(value)


def _render(payload: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(payload, dict):
        for key, value in payload.items():
            if isinstance(value, (dict, list)) and value and not _is_flat(value):
                lines.append(f"{pad}{key}:")
                lines.extend(_render(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_inline(value)}")
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, (dict, list)) and not _is_flat(item):
                lines.append(f"{pad}-")
                lines.extend(_render(item, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(item)}")
    else:
        lines.append(pad + _fmt(payload))
    return lines


def _is_flat(value: dict[str, Any] | list[Any]) -> bool:
    items = value.values() if isinstance(value, dict) else value
    return all(not isinstance(v, (dict, list)) for v in items)


def _inline(value: object) -> str:
    if isinstance(value, dict):
        return ", ".join(f"{k}={_fmt(v)}" for k, v in value.items())
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return _fmt(value)


def _summary(payload: Payload) -> str | None:
    """One-line verdict for ``analyze``."""
    if payload.get("command") != "analyze":
        return None
    structure, rates = payload["structure"], payload["rates"]
    cmi = _fmt(rates["cmi"])
    if structure["ubi"]:
        head = f"K^c.r. = I(X:Y|Z) = {cmi}; UBI: yes"
    else:
        head = f"UBI: no; K^c.r. < I(X:Y|Z) = {cmi}"
    thm3 = "pass" if not structure["theorem3_violations"] else "fail"
    thm4 = (
        f"witness => K < I(X:Y|Z) = {cmi}"
        if structure["theorem4_witnesses"]
        else "no witness"
    )
    return (
        f"{head}; Thm3: {thm3}; Thm4: {thm4}; "
        f"intrinsic upper bound {_fmt(rates['intrinsic_upper'])}"
    )


def emit(payload: Payload, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    summary = _summary(payload)
    if summary:
        print(summary)
    print("\n".join(_render(payload)))


# ----- Parser -----


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--restarts", type=int, default=32)
    common.add_argument("--iters", type=int, default=2000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", type=int, default=101)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="skdist",
        description="Secret-key distillation analysis of tripartite distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Command, summary: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=summary)
        p.set_defaults(func=func)
        return p

    def add_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help="a .dist file or a corpus entry name")

    add_input(add("analyze", cmd_analyze, "structure and rate report"))
    add_input(add("partition", cmd_partition, "maximal common partitions"))
    add_input(add("classify", cmd_classify, "UB / UBI and theorem checks"))
    oneway = add("check-oneway", cmd_check_oneway, "one-way necessary condition")
    add_input(oneway)
    oneway.add_argument(
        "--scan",
        action="store_true",
        help="also scan deterministic Markov-chain certificates",
    )
    add_input(add("check-twoway", cmd_check_twoway, "two-way witnesses"))
    add_input(add("intrinsic", cmd_intrinsic, "intrinsic information upper bound"))
    opt = add("oneway-opt", cmd_oneway_opt, "optimised one-way lower bound")
    add_input(opt)
    opt.add_argument("--direction", choices=["ab", "ba"], default="ab")
    sim = add("simulate-pa", cmd_simulate_pa, "privacy amplification simulation")
    add_input(sim)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--rate", type=float, required=True)
    sim.add_argument("--trials", type=int, default=64)
    sim.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    sim.add_argument("--samples", type=int, default=20_000)
    curve = add("mixing-curve", cmd_mixing_curve, "I(X:Y) along a slice mixture")
    add_input(curve)
    curve.add_argument("--z0", required=True)
    curve.add_argument("--z1", required=True)

    corpus = sub.add_parser("corpus", help="built-in example distributions")
    corpus_sub = corpus.add_subparsers(dest="corpus_command", required=True)
    corpus_sub.add_parser("list", parents=[common]).set_defaults(func=cmd_corpus_list)
    show = corpus_sub.add_parser("show", parents=[common])
    show.add_argument("name")
    show.set_defaults(func=cmd_corpus_show)
    corpus_sub.add_parser("verify", parents=[common]).set_defaults(
        func=cmd_corpus_verify
    )
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        payload = args.func(args)
    except (ValueError, OSError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit(payload, args.json)
    if args.func is cmd_corpus_verify and not payload["passed"]:
        return 1
    return 0
