"""Command-line entry point: ``python -m dft <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .algebra.expr import format_expr
from .analysis.evaluator import AnalyticPlan, ProbResult
from .config import Settings
from .errors import (
    CycleDetected,
    DftError,
    ModelSyntaxError,
    QuadratureFailure,
    Redefined,
    StepCapExceeded,
    TermExplosion,
    Undefined,
    UnmatchedPattern,
)
from .model import CAS_TIMES, DftModel, cas_model, parse_model
from .report import FORMATS, AnalysisReport, PointRecord, emit_report
from .rewrite.engine import RuleSet, default_rules, simplify
from .rewrite.equivalence import check_equiv
from .rewrite.rules import load_rules
from .simulation.simulator import McEstimate, simulate_curve

logger = logging.getLogger("dft.cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_UNMATCHED = 3
EXIT_QUADRATURE = 4

PARSE_ERRORS = (ModelSyntaxError, CycleDetected, Undefined, Redefined)
METHODS = ("analytic", "mc", "both")


def _times(text: str) -> List[float]:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid time list: {text}") from exc
    if not values or any(value < 0 for value in values):
        raise argparse.ArgumentTypeError(f"times must be non-negative: {text}")
    return values


def _rate(text: str) -> tuple:
    name, sep, value = text.partition("=")
    try:
        if not sep:
            raise ValueError
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dft", description="Dynamic fault tree analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    prob = sub.add_parser("prob", help="probability that the top event has occurred by t")
    prob.add_argument("--model", required=True)
    prob.add_argument("--time", required=True, type=_times)
    prob.add_argument("--method", choices=METHODS, default="analytic")
    prob.add_argument("--mode", choices=("exact", "paper"), default=None)
    prob.add_argument("--tol", type=float, default=None)
    prob.add_argument("--samples", type=int, default=None)
    prob.add_argument("--seed", type=int, default=None)
    prob.add_argument("--workers", type=int, default=None)
    prob.add_argument("--format", choices=FORMATS, default="json")
    prob.add_argument("--out", default=None)
    prob.add_argument("--desugar", action="store_true")

    simp = sub.add_parser("simplify", help="print the reduced top expression")
    simp.add_argument("--model", required=True)
    simp.add_argument("--rules", default=None, help="extra rule file")
    simp.add_argument("--desugar", action="store_true")

    sim = sub.add_parser("simulate", help="Monte-Carlo estimate only")
    sim.add_argument("--model", required=True)
    sim.add_argument("--time", required=True, type=_times)
    sim.add_argument("--samples", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--workers", type=int, default=None)
    sim.add_argument("--format", choices=FORMATS, default="json")
    sim.add_argument("--out", default=None)

    verify = sub.add_parser("verify", help="sample the top expression against its simplification")
    verify.add_argument("--model", required=True)
    verify.add_argument("--trials", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--rules", default=None, help="extra rule file")

    bench = sub.add_parser("bench-cas", help="cardiac assist system benchmark")
    bench.add_argument("--time", type=_times, default=None)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--samples", type=int, default=None)
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--rate", type=_rate, action="append", default=[])
    bench.add_argument("--format", choices=("table", "json"), default="table")
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        stream=sys.stderr,
    )


def _load_model(path: str, desugar: bool = False) -> DftModel:
    text = Path(path).read_text(encoding="utf-8")
    return parse_model(text, desugar=desugar)


def _rules(settings: Settings, path: Optional[str]) -> RuleSet:
    rules = default_rules(settings.rewrite_step_cap)
    if path:
        rules = rules.extend(load_rules(Path(path).read_text(encoding="utf-8")))
    return rules


def _write(data: bytes, out: Optional[str]) -> None:
    if out:
        Path(out).write_bytes(data)
        logger.info("Wrote %s", out)
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()


def _mc_by_time(
    model: DftModel, times: Sequence[float], settings: Settings, args: argparse.Namespace
) -> Dict[float, McEstimate]:
    cfg = settings.monte_carlo(args.samples, args.seed, args.workers)
    return dict(simulate_curve(model, sorted(set(times)), cfg))


def _point(
    t: float, analytic: Optional[ProbResult], mc: Optional[McEstimate], mode: str
) -> PointRecord:
    return PointRecord(
        t=t,
        analytic_value=analytic.value if analytic else None,
        quad_error=analytic.quad_error if analytic else None,
        mc_estimate=mc.p_hat if mc else None,
        mc_half_width=mc.half_width if mc else None,
        mode=mode,
        term_count=analytic.term_count if analytic else 0,
    )


def _cmd_prob(args: argparse.Namespace, settings: Settings) -> int:
    model = _load_model(args.model, args.desugar)
    mode = args.mode or settings.intersection_mode
    analytic: Dict[float, ProbResult] = {}
    if args.method in ("analytic", "both"):
        plan = AnalyticPlan(
            model,
            mode=mode,
            max_terms=settings.max_pie_terms,
            rules=default_rules(settings.rewrite_step_cap),
            workers=args.workers or settings.workers,
        )
        cfg = settings.quadrature(args.tol)
        for t in args.time:
            analytic[t] = plan.evaluate(t, cfg)
    mc: Dict[float, McEstimate] = {}
    if args.method in ("mc", "both"):
        mc = _mc_by_time(model, args.time, settings, args)
    report = AnalysisReport(
        model_digest=model.digest(),
        seed=args.seed if args.seed is not None else settings.mc_seed,
        method=args.method,
        points=[_point(t, analytic.get(t), mc.get(t), mode) for t in args.time],
    )
    _write(emit_report(report, args.format), args.out)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    model = _load_model(args.model)
    mc = _mc_by_time(model, args.time, settings, args)
    report = AnalysisReport(
        model_digest=model.digest(),
        seed=args.seed if args.seed is not None else settings.mc_seed,
        method="mc",
        points=[_point(t, None, mc[t], settings.intersection_mode) for t in args.time],
    )
    _write(emit_report(report, args.format), args.out)
    return EXIT_OK


def _cmd_simplify(args: argparse.Namespace, settings: Settings) -> int:
    model = _load_model(args.model, args.desugar)
    result = simplify(model.top_expr(), _rules(settings, args.rules), model.name_order())
    if result.capped:
        logger.warning("Step cap reached; printing the partial result")
    sys.stdout.write(format_expr(result.expr) + "\n")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    model = _load_model(args.model)
    rules = _rules(settings, args.rules)
    top = model.top_expr()
    checks = [
        ("distinct", simplify(top, rules, model.name_order()).expr, True),
        ("general", simplify(top, rules.without_distinct(), model.name_order()).expr, False),
    ]
    failed = False
    for label, reduced, distinct in checks:
        verdict = check_equiv(top, reduced, args.trials, args.seed, distinct=distinct)
        if verdict:
            sys.stdout.write(f"{label}: equivalent over {verdict.trials} trials\n")
        else:
            failed = True
            sys.stdout.write(
                f"{label}: counterexample {json.dumps(verdict.counterexample, sort_keys=True)} "
                f"gives {verdict.left!r} vs {verdict.right!r}\n"
            )
    return EXIT_FAILED if failed else EXIT_OK


def _cmd_bench_cas(args: argparse.Namespace, settings: Settings) -> int:
    try:
        model = cas_model(dict(args.rate))
    except KeyError as exc:
        sys.stderr.write(f"{exc.args[0]}\n")
        return EXIT_PARSE
    times = args.time or list(CAS_TIMES)
    rules = default_rules(settings.rewrite_step_cap)
    workers = args.workers or settings.workers
    exact = AnalyticPlan(model, "exact", settings.max_pie_terms, rules, workers)
    paper = AnalyticPlan(model, "paper", settings.max_pie_terms, rules, workers)
    mc = _mc_by_time(model, times, settings, args)
    cfg = settings.quadrature()
    rows = []
    for t in times:
        e = exact.evaluate(t, cfg)
        p = paper.evaluate(t, cfg)
        rows.append(
            {
                "t": t,
                "exact": e.value,
                "paper": p.value,
                "diff": p.value - e.value,
                "mc": mc[t].p_hat,
                "mcHalfWidth": mc[t].half_width,
                "termCount": e.term_count,
            }
        )
    if args.format == "json":
        sys.stdout.write(json.dumps({"modelDigest": model.digest(), "rows": rows}, indent=2) + "\n")
        return EXIT_OK
    header = f"{'t':>10} {'exact':>14} {'paper':>14} {'diff':>11} {'mc':>10} {'hw':>9} {'terms':>6}"
    lines = [header]
    for row in rows:
        lines.append(
            f"{row['t']:>10g} {row['exact']:>14.10f} {row['paper']:>14.10f} {row['diff']:>11.3e} "
            f"{row['mc']:>10.6f} {row['mcHalfWidth']:>9.2e} {row['termCount']:>6d}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {
    "prob": _cmd_prob,
    "simulate": _cmd_simulate,
    "simplify": _cmd_simplify,
    "verify": _cmd_verify,
    "bench-cas": _cmd_bench_cas,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env()
    except ValueError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_FAILED
    _configure_logging(settings.log_level)
    try:
        return COMMANDS[args.command](args, settings)
    except PARSE_ERRORS as exc:
        logger.error("Model error: %s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (UnmatchedPattern, TermExplosion, StepCapExceeded) as exc:
        logger.error("No analytic solution: %s", exc)
        sys.stderr.write(f"error: {exc}; try --method mc\n")
        return EXIT_UNMATCHED
    except QuadratureFailure as exc:
        logger.error("Quadrature failed: %s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_QUADRATURE
    except (DftError, ValueError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED


def main() -> None:
    sys.exit(run_cli())
