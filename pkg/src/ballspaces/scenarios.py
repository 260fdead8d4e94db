"""Scenario files: JSON descriptions of instances, dispatched to the solvers.

Each scenario carries a ``kind`` tag, a kind-specific payload, and an
optional ``expect`` block pinning results for regression runs.  Reports are
JSON-friendly dictionaries plus a human-readable rendering.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import banach, hahn, padics, posets, topology, ultrametric
from .core import (
    BallAssignment,
    BallSpace,
    SelfMap,
    check_c_conditions,
    check_cu_conditions,
    check_sc_axioms,
    solve_gfpt2,
    solve_nfpt1,
    solve_nfpt2,
)
from .errors import BallSpaceError, ScenarioError

KINDS = ("ballspace", "ultrametric", "padic", "banach", "ordered", "topo")


@dataclass
class Scenario:
    kind: str
    name: str
    payload: dict
    expect: dict
    source: str = "<memory>"


@dataclass
class RunReport:
    scenario: str
    kind: str
    name: str
    verdicts: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    diffs: list = field(default_factory=list)
    plots: list = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.diffs

    def add_verdict(self, op: str, check: str, passed: bool, witness=None) -> None:
        self.verdicts.append(
            {"op": op, "check": check, "passed": bool(passed),
             "witness": None if witness is None else str(witness)}
        )

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "kind": self.kind,
            "name": self.name,
            "ok": self.ok,
            "verdicts": self.verdicts,
            "outputs": self.outputs,
            "expectation_diffs": self.diffs,
            "plots": self.plots,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }

    def human(self) -> str:
        lines = [f"scenario {self.name} ({self.kind}) from {self.scenario}"]
        for v in self.verdicts:
            mark = "pass" if v["passed"] else "FAIL"
            extra = f"  [{v['witness']}]" if v["witness"] else ""
            lines.append(f"  {mark}  {v['op']}::{v['check']}{extra}")
        for k, val in self.outputs.items():
            lines.append(f"  out   {k} = {val}")
        if self.diffs:
            for d in self.diffs:
                lines.append(
                    f"  DIFF  {d['key']}: expected {d['expected']!r}, got {d['actual']!r}"
                )
        else:
            lines.append("  all expectations met" if self.verdicts or self.outputs else "  empty report")
        for p in self.plots:
            lines.append(f"  plot  {p}")
        lines.append(f"  elapsed {self.elapsed_ms:.1f} ms")
        return "\n".join(lines)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ScenarioError(message)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return parse_scenario(doc, source=str(path))


def parse_scenario(doc: dict, source: str = "<memory>") -> Scenario:
    _require(isinstance(doc, dict), "scenario must be a JSON object")
    kind = doc.get("kind")
    _require(kind in KINDS, f"'kind' must be one of {', '.join(KINDS)}, got {kind!r}")
    name = doc.get("name", "unnamed")
    _require(isinstance(name, str), "'name' must be a string")
    expect = doc.get("expect", {})
    _require(isinstance(expect, dict), "'expect' must be an object")
    payload = {k: v for k, v in doc.items() if k not in ("kind", "name", "expect")}
    _validators[kind](payload)
    return Scenario(kind=kind, name=name, payload=payload, expect=expect, source=source)


def _validate_ballspace(p: dict) -> None:
    _require(isinstance(p.get("points"), list) and p["points"], "'points' must be a nonempty array")
    _require(isinstance(p.get("balls"), list) and p["balls"], "'balls' must be a nonempty array of arrays")
    for i, b in enumerate(p["balls"]):
        _require(isinstance(b, list) and b, f"balls[{i}] must be a nonempty array")
        for x in b:
            _require(x in p["points"], f"balls[{i}] names unknown point {x!r}")
    _require(isinstance(p.get("map"), dict), "'map' must be an object")
    for k, v in p["map"].items():
        _require(k in p["points"] and v in p["points"], f"map entry {k!r} -> {v!r} leaves the points")
    if "assignment" in p:
        _require(isinstance(p["assignment"], dict), "'assignment' must map points to ball indices")
        for k, v in p["assignment"].items():
            _require(k in p["points"], f"assignment names unknown point {k!r}")
            _require(isinstance(v, int) and 0 <= v < len(p["balls"]),
                     f"assignment[{k!r}] must be a ball index")


def _validate_ultrametric(p: dict) -> None:
    _require(isinstance(p.get("points"), list) and p["points"], "'points' must be a nonempty array")
    values = p.get("values")
    _require(isinstance(values, dict), "'values' must be an object")
    if "total-chain" in values:
        _require(isinstance(values["total-chain"], list) and values["total-chain"],
                 "'total-chain' must list value names from bottom upward")
    else:
        for key in ("values", "leq", "bottom"):
            _require(key in values, f"poset literal needs '{key}'")
    _require(isinstance(p.get("distances"), list), "'distances' must be an array of [x, y, value] triples")
    _require(isinstance(p.get("map"), dict), "'map' must be an object")


def _validate_padic(p: dict) -> None:
    _require(isinstance(p.get("prime"), int) and p["prime"] >= 2, "'prime' must be an integer >= 2")
    _require(isinstance(p.get("precision"), int) and p["precision"] >= 1,
             "'precision' must be a positive integer")
    _require(isinstance(p.get("poly"), list) and p["poly"], "'poly' must list integer coefficients")
    _require(all(isinstance(c, int) for c in p["poly"]), "'poly' entries must be integers")
    _require(isinstance(p.get("start"), int), "'start' must be an integer")


def _validate_banach(p: dict) -> None:
    aff = p.get("affine")
    _require(isinstance(aff, dict) and "matrix" in aff and "offset" in aff,
             "'affine' must carry 'matrix' and 'offset'")
    _require("C" in p, "'C' (rational string) is required")
    _require(isinstance(p.get("start"), list), "'start' must be a vector")
    _require("eps" in p, "'eps' (rational string) is required")


def _validate_ordered(p: dict) -> None:
    m = p.get("map")
    _require(isinstance(m, dict) and ("affine" in m or "constant" in m),
             "'map' must carry 'affine' {scale, offset} or 'constant'")
    _require("ratio" in p, "'ratio' m/n is required")
    _require("start" in p, "'start' series literal is required")


def _validate_topo(p: dict) -> None:
    _require(isinstance(p.get("points"), list) and p["points"], "'points' must be a nonempty array")
    _require(isinstance(p.get("opens"), list), "'opens' must be an array of arrays")
    _require(isinstance(p.get("map"), dict), "'map' must be an object")


_validators = {
    "ballspace": _validate_ballspace,
    "ultrametric": _validate_ultrametric,
    "padic": _validate_padic,
    "banach": _validate_banach,
    "ordered": _validate_ordered,
    "topo": _validate_topo,
}


def _run_ballspace(sc: Scenario, report: RunReport) -> None:
    p = sc.payload
    space = BallSpace(frozenset(p["points"]), tuple(frozenset(b) for b in p["balls"]))
    f = SelfMap(p["map"])
    c_report = check_c_conditions(space, f)
    for c in c_report.checks:
        report.add_verdict("check_c_conditions", c.name, c.passed, c.witness)
    cu_report = check_cu_conditions(space, f)
    for c in cu_report.checks:
        report.add_verdict("check_cu_conditions", c.name, c.passed, c.witness)
    report.outputs["c_conditions"] = c_report.passed
    report.outputs["cu_conditions"] = cu_report.passed
    r1 = solve_nfpt1(space, f)
    report.outputs["nfpt1_outcome"] = r1.outcome
    report.outputs["nfpt1_fixed_point"] = r1.witness
    r2 = solve_nfpt2(space, f)
    report.outputs["nfpt2_outcome"] = r2.outcome
    report.outputs["nfpt2_fixed_point"] = r2.witness
    if "assignment" in p:
        balls = [frozenset(b) for b in p["balls"]]
        assign = BallAssignment({x: balls[i] for x, i in p["assignment"].items()})
        sc_report = check_sc_axioms(space, f, assign)
        for c in sc_report.checks:
            report.add_verdict("check_sc_axioms", c.name, c.passed, c.witness)
        report.outputs["sc_axioms"] = sc_report.passed
        rg = solve_gfpt2(space, f, assign)
        report.outputs["gfpt2_outcome"] = rg.outcome
        report.outputs["gfpt2_fixed_point"] = rg.witness


def _poset_from_literal(values: dict) -> posets.ValuePoset:
    if "total-chain" in values:
        return posets.chain(values["total-chain"])
    return posets.ValuePoset.from_pairs(
        values["values"], [tuple(pair) for pair in values["leq"]], values["bottom"], close=True
    )


def _run_ultrametric(sc: Scenario, report: RunReport) -> None:
    p = sc.payload
    values = _poset_from_literal(p["values"])
    distances = {(x, y): v for x, y, v in p["distances"]}
    space = ultrametric.UltrametricSpace(p["points"], values, distances)
    report.add_verdict("axioms", "U1-U3", True)
    f = SelfMap(p["map"])
    contracting = ultrametric.is_contracting(space, f)
    report.outputs["contracting"] = contracting
    hyp = ultrametric.check_sufpt_hypotheses(space, f)
    for c in hyp.checks:
        report.add_verdict("check_sufpt_hypotheses", c.name, c.passed, c.witness)
    report.outputs["sufpt_hypotheses"] = hyp.passed
    result = ultrametric.solve_sufpt(space, f)
    report.outputs["sufpt_outcome"] = result.outcome
    report.outputs["sufpt_fixed_point"] = result.witness
    if contracting:
        csco = ultrametric.check_csco(space, f)
        for c in csco.checks:
            report.add_verdict("check_csco", c.name, c.passed, c.witness)


def _run_padic(sc: Scenario, report: RunReport) -> None:
    p = sc.payload
    result = padics.hensel_lift(p["poly"], p["start"], p["prime"], p["precision"])
    report.outputs["trace"] = [r for _, r in result.trace]
    report.outputs["precisions"] = [k for k, _ in result.trace]
    report.outputs["root"] = result.root.residue
    poly_full = padics.Polynomial.from_ints(p["poly"], p["prime"], p["precision"])
    report.outputs["residual_exponents"] = [
        poly_full.eval(padics.PAdicInt(p["prime"], p["precision"], r)).valuation().exponent
        for _, r in result.trace
    ]
    residual = poly_full.eval(result.root)
    report.add_verdict("hensel_lift", "root-residual-zero", residual.residue == 0)


def _run_banach(sc: Scenario, report: RunReport) -> None:
    p = sc.payload
    matrix = tuple(tuple(Fraction(a) for a in row) for row in p["affine"]["matrix"])
    offset = tuple(Fraction(c) for c in p["affine"]["offset"])
    affine = banach.AffineMap(matrix, offset)
    spec = banach.ContractionSpec(affine, Fraction(p["C"]))
    start = tuple(Fraction(c) for c in p["start"])
    result = banach.solve_banach(spec, start, Fraction(p["eps"]), budget=p.get("budget", 100_000))
    exact = affine.fixed_point()
    report.outputs["point"] = [str(c) for c in result.point]
    report.outputs["radius"] = str(result.certificate.radius)
    report.outputs["iterations"] = result.iterations
    report.outputs["exact_fixed_point"] = [str(c) for c in exact]
    report.outputs["radius_at_most_eps"] = result.certificate.radius <= Fraction(p["eps"])
    report.outputs["fixed_point_in_certificate"] = result.certificate.contains(exact)
    report.add_verdict("solve_banach", "certificate-contains-exact-fixed-point",
                       report.outputs["fixed_point_in_certificate"])
    report.add_verdict("solve_banach", "radius-at-most-eps", report.outputs["radius_at_most_eps"])
    report.outputs["step_distances"] = [str(d) for d in result.step_distances]


def _run_ordered(sc: Scenario, report: RunReport) -> None:
    p = sc.payload
    ratio = Fraction(p["ratio"])
    trunc = p.get("trunc", hahn.DEFAULT_TRUNCATION)
    if "affine" in p["map"]:
        scale = Fraction(p["map"]["affine"]["scale"])
        offset = hahn.parse_series(p["map"]["affine"]["offset"])
        f = lambda x: x * scale + offset
    else:
        constant = hahn.parse_series(p["map"]["constant"])
        f = lambda x: constant
    start = hahn.parse_series(p["start"])
    result = hahn.solve_oag(f, ratio.numerator, ratio.denominator, start, trunc=trunc)
    report.outputs["outcome"] = result.outcome
    report.outputs["fixed_point"] = hahn.format_series(result.point)
    report.outputs["steps"] = result.steps
    report.outputs["restarts"] = result.restarts
    report.outputs["gap_exponents"] = list(result.gap_exponents)
    report.add_verdict("solve_oag", "terminated", result.outcome in ("fixed-point", "value-passed-bound"))


def _run_topo(sc: Scenario, report: RunReport) -> None:
    p = sc.payload
    t = topology.FiniteTopology(frozenset(p["points"]), frozenset(frozenset(o) for o in p["opens"]))
    f = SelfMap(p["map"])
    closed, witness = topology.is_closed_map(t, f)
    report.add_verdict("is_closed_map", "images-of-closed-sets-closed", closed, witness)
    report.outputs["closed_map"] = closed
    if closed:
        verdict = topology.check_topn_hypotheses(t, f)
        report.outputs["verdict"] = verdict.verdict
        if verdict.verdict != "fails":
            result = topology.solve_topn(t, f)
            report.outputs["fixed_point"] = result.witness
            report.add_verdict("solve_topn", "fixed-point-found", result.found, result.witness)


_runners = {
    "ballspace": _run_ballspace,
    "ultrametric": _run_ultrametric,
    "padic": _run_padic,
    "banach": _run_banach,
    "ordered": _run_ordered,
    "topo": _run_topo,
}


def run_scenario(path_or_scenario) -> RunReport:
    """Load, dispatch, and compare against the expectation block."""
    if isinstance(path_or_scenario, Scenario):
        sc = path_or_scenario
    else:
        sc = load_scenario(path_or_scenario)
    report = RunReport(scenario=sc.source, kind=sc.kind, name=sc.name)
    start = time.perf_counter()
    try:
        _runners[sc.kind](sc, report)
    except BallSpaceError as exc:
        raise ScenarioError(f"{sc.kind} scenario failed: {exc}") from exc
    report.elapsed_ms = (time.perf_counter() - start) * 1000
    for key, expected in sc.expect.items():
        actual = report.outputs.get(key)
        if _normalize(actual) != _normalize(expected):
            report.diffs.append({"key": key, "expected": expected, "actual": actual})
    return report


def _normalize(value):
    if isinstance(value, (list, tuple)):
        return tuple(_normalize(v) for v in value)
    return value
