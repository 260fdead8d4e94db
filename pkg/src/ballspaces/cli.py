"""Command-line entry point.

Exit codes: 0 on success, 1 when an expectation block is not met, 2 for
input errors, 3 for internal assertion failures (a solver contradicting a
verified hypothesis, or a sweep counterexample).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import banach, hahn, padics, plots, scenarios, sweeps
from .errors import BallSpaceError, InternalCheckError, ScenarioError


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("human", "structured"), default="human")
    parser.add_argument("--seed", type=int, default=2023, help="seed for randomized runs")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    parser.add_argument("--plots", metavar="DIR", default=None,
                        help="render figures and CSV data into DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ballspaces",
        description="fixed-point solvers and verifiers over ball spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a scenario file and check its expectations")
    p_verify.add_argument("--scenario", required=True, metavar="PATH")
    _common(p_verify)

    p_hensel = sub.add_parser("hensel", help="lift a simple root to the target precision")
    p_hensel.add_argument("--prime", type=int, required=True)
    p_hensel.add_argument("--precision", type=int, required=True)
    p_hensel.add_argument("--poly", required=True, help="coefficients c0,c1,...,ck")
    p_hensel.add_argument("--start", type=int, required=True)
    _common(p_hensel)

    p_banach = sub.add_parser("banach", help="iterate an affine contraction to a certificate ball")
    p_banach.add_argument("--affine", required=True,
                          help="matrix rows ';'-separated with ',' entries, '|', then the offset")
    p_banach.add_argument("--C", required=True, help="contraction constant num/den")
    p_banach.add_argument("--start", required=True, help="start vector, comma-separated rationals")
    p_banach.add_argument("--eps", required=True, help="certificate radius bound num/den")
    p_banach.add_argument("--budget", type=int, default=100_000)
    _common(p_banach)

    p_oag = sub.add_parser("oag", help="orbit iteration in the truncated series group")
    p_oag.add_argument("--map", required=True, dest="map_spec",
                       help="affine:a,b (a rational, b series literal) or constant:c")
    p_oag.add_argument("--ratio", required=True, help="orbit contraction ratio m/n")
    p_oag.add_argument("--start", required=True, help="series literal")
    p_oag.add_argument("--trunc", type=int, default=hahn.DEFAULT_TRUNCATION)
    _common(p_oag)

    p_topo = sub.add_parser("topo", help="finite-topology tools")
    topo_sub = p_topo.add_subparsers(dest="topo_command", required=True)
    p_topo_sweep = topo_sub.add_parser("sweep", help="sweep all topologies and closed self-maps")
    p_topo_sweep.add_argument("--max-points", type=int, default=3)
    _common(p_topo_sweep)

    p_sweep = sub.add_parser("sweep", help="exhaustive solver sweeps")
    p_sweep.add_argument("--family", choices=("nfpt", "gfpt", "topo"), required=True)
    p_sweep.add_argument("--max-points", type=int, default=3)
    p_sweep.add_argument("--max-balls", type=int, default=5)
    p_sweep.add_argument("--budget", type=int, default=64)
    _common(p_sweep)

    return parser


def _emit(args, payload: dict, human_lines: list) -> None:
    if args.format == "structured":
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        for line in human_lines:
            print(line)


def _cmd_verify(args) -> int:
    report = scenarios.run_scenario(args.scenario)
    if args.plots:
        report.plots = plots.render_scenario(report, args.plots)
    _emit(args, report.to_json(), [report.human()])
    return 0 if report.ok else 1


def _cmd_hensel(args) -> int:
    coeffs = [int(c) for c in args.poly.split(",")]
    result = padics.hensel_lift(coeffs, args.start, args.prime, args.precision)
    poly = padics.Polynomial.from_ints(coeffs, args.prime, args.precision)
    exponents = [
        poly.eval(padics.PAdicInt(args.prime, args.precision, r)).valuation().exponent
        for _, r in result.trace
    ]
    payload = {
        "root": result.root.residue,
        "trace": [{"precision": k, "residue": r} for k, r in result.trace],
        "residual_exponents": exponents,
    }
    lines = [f"root {result.root.residue} (mod {args.prime}^{args.precision})"]
    for (k, r), e in zip(result.trace, exponents):
        lines.append(f"  precision {k:>3}: residue {r}  residual exponent {e}")
    written = []
    if args.plots:
        written = plots.render_hensel([k for k, _ in result.trace],
                                      [r for _, r in result.trace], exponents, args.plots)
        lines.extend(f"  wrote {w}" for w in written)
        payload["plots"] = written
    _emit(args, payload, lines)
    return 0


def _parse_vector(text: str) -> tuple:
    return tuple(Fraction(c) for c in text.split(","))


def _cmd_banach(args) -> int:
    matrix_text, offset_text = args.affine.split("|")
    matrix = tuple(tuple(Fraction(a) for a in row.split(",")) for row in matrix_text.split(";"))
    offset = _parse_vector(offset_text)
    affine = banach.AffineMap(matrix, offset)
    spec = banach.ContractionSpec(affine, Fraction(args.C))
    result = banach.solve_banach(spec, _parse_vector(args.start), Fraction(args.eps),
                                 budget=args.budget)
    exact = affine.fixed_point()
    contains = result.certificate.contains(exact)
    payload = {
        "point": [str(c) for c in result.point],
        "certificate_radius": str(result.certificate.radius),
        "iterations": result.iterations,
        "exact_fixed_point": [str(c) for c in exact],
        "certificate_contains_exact": contains,
    }
    lines = [
        f"point ({', '.join(payload['point'])}) after {result.iterations} iterations",
        f"certificate radius {payload['certificate_radius']}",
        f"exact fixed point ({', '.join(payload['exact_fixed_point'])})"
        f" {'inside' if contains else 'OUTSIDE'} the certificate",
    ]
    if args.plots:
        written = plots.render_banach(result.step_distances, Fraction(args.eps), args.plots)
        lines.extend(f"wrote {w}" for w in written)
        payload["plots"] = written
    _emit(args, payload, lines)
    return 0 if contains else 3


def _cmd_oag(args) -> int:
    kind, _, rest = args.map_spec.partition(":")
    if kind == "affine":
        scale_text, _, offset_text = rest.partition(",")
        scale = Fraction(scale_text)
        offset = hahn.parse_series(offset_text)
        f = lambda x: x * scale + offset
    elif kind == "constant":
        constant = hahn.parse_series(rest)
        f = lambda x: constant
    else:
        raise ScenarioError(f"unknown map spec {args.map_spec!r}")
    ratio = Fraction(args.ratio)
    result = hahn.solve_oag(f, ratio.numerator, ratio.denominator,
                            hahn.parse_series(args.start), trunc=args.trunc)
    payload = {
        "outcome": result.outcome,
        "point": hahn.format_series(result.point),
        "steps": result.steps,
        "restarts": result.restarts,
        "gap_exponents": list(result.gap_exponents),
    }
    lines = [
        f"{result.outcome}: {payload['point']}",
        f"steps {result.steps}, restarts {result.restarts}",
    ]
    if args.plots:
        written = plots.render_oag(result.gap_exponents, args.plots)
        lines.extend(f"wrote {w}" for w in written)
        payload["plots"] = written
    _emit(args, payload, lines)
    return 0


def _summary_exit(args, summary) -> int:
    payload = {
        "family": summary.family,
        "instances": summary.instances,
        "counts": summary.counts,
        "counterexamples": [str(c) for c in summary.counterexamples],
        "elapsed_s": round(summary.elapsed, 3),
    }
    lines = [f"{summary.family} sweep: {summary.instances} instances in {summary.elapsed:.2f}s"]
    width = max((len(k) for k in summary.counts), default=0)
    for k in sorted(summary.counts):
        lines.append(f"  {k:<{width}}  {summary.counts[k]}")
    if summary.counterexamples:
        lines.append(f"  THEOREM CONTRADICTIONS: {len(summary.counterexamples)}")
        lines.extend(f"    {c}" for c in summary.counterexamples[:10])
    else:
        lines.append("  zero counterexamples")
    if args.plots:
        written = plots.render_sweep(summary.family, summary.counts, args.plots)
        lines.extend(f"  wrote {w}" for w in written)
        payload["plots"] = written
    _emit(args, payload, lines)
    return 3 if summary.counterexamples else 0


def _cmd_sweep(args) -> int:
    summary = sweeps.run_sweep(args.family, max_points=args.max_points,
                               max_balls=args.max_balls, budget=args.budget, jobs=args.jobs)
    return _summary_exit(args, summary)


def _cmd_topo_sweep(args) -> int:
    summary = sweeps.run_sweep("topo", max_points=args.max_points, jobs=args.jobs)
    return _summary_exit(args, summary)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "hensel":
            return _cmd_hensel(args)
        if args.command == "banach":
            return _cmd_banach(args)
        if args.command == "oag":
            return _cmd_oag(args)
        if args.command == "topo":
            return _cmd_topo_sweep(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        parser.error(f"unknown command {args.command!r}")
    except ScenarioError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except InternalCheckError as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return 3
    except (BallSpaceError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
