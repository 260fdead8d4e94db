"""Exhaustive small-instance sweeps cross-validating solvers against brute force.

Instances are enumerated completely up to relabeling: ball collections are
canonicalized over all point permutations and self-maps are deduplicated
under the automorphisms of each canonical collection.  A counterexample in
any sweep means an implementation bug, never new mathematics, so summaries
treat them as failures.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .core import (
    BallAssignment,
    BallSpace,
    SelfMap,
    check_c_conditions,
    check_cu_conditions,
    check_sc_axioms,
    is_spherically_complete,
    solve_gfpt2,
    solve_nfpt1,
    solve_nfpt2,
)
from .errors import PreconditionError
from . import topology as topo

_NAMES = "abcd"
_SWEEP_POINT_CAP = 4
_SWEEP_BALL_CAP = 8


@dataclass
class SweepSummary:
    family: str
    instances: int
    counts: dict
    counterexamples: list
    elapsed: float

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def merge(self, other: "SweepSummary") -> None:
        self.instances += other.instances
        for k, v in other.counts.items():
            self.counts[k] = self.counts.get(k, 0) + v
        self.counterexamples.extend(other.counterexamples)


def _mask_to_ball(mask: int, names: str) -> frozenset:
    return frozenset(names[i] for i in range(len(names)) if mask >> i & 1)


def _apply_perm(mask: int, perm: tuple) -> int:
    out = 0
    for i in range(len(perm)):
        if mask >> i & 1:
            out |= 1 << perm[i]
    return out


def canonical_units(max_points: int, max_balls: int) -> list:
    """(point count, canonical ball-mask tuple, automorphisms) per instance class."""
    if max_points > _SWEEP_POINT_CAP or max_balls > _SWEEP_BALL_CAP:
        raise PreconditionError(
            f"sweeps are capped at {_SWEEP_POINT_CAP} points and {_SWEEP_BALL_CAP} balls"
        )
    units = []
    for n in range(1, max_points + 1):
        perms = list(itertools.permutations(range(n)))
        subsets = list(range(1, 1 << n))
        seen = set()
        for size in range(1, min(max_balls, len(subsets)) + 1):
            for comb in itertools.combinations(subsets, size):
                key = min(tuple(sorted(_apply_perm(m, p) for m in comb)) for p in perms)
                if key in seen:
                    continue
                seen.add(key)
                autos = [
                    p for p in perms
                    if tuple(sorted(_apply_perm(m, p) for m in key)) == key
                ]
                units.append((n, key, tuple(autos)))
    return units


def _maps_up_to_autos(n: int, autos: tuple) -> list:
    maps = []
    seen = set()
    inverse = {p: tuple(sorted(range(n), key=lambda i: p[i])) for p in autos}
    for f in itertools.product(range(n), repeat=n):
        key = min(
            tuple(p[f[inverse[p][i]]] for i in range(n))
            for p in autos
        )
        if key in seen:
            continue
        seen.add(key)
        maps.append(f)
    return maps


def _unit_space(unit) -> tuple:
    n, masks, autos = unit
    names = _NAMES[:n]
    balls = tuple(_mask_to_ball(m, names) for m in masks)
    return names, BallSpace(frozenset(names), balls), autos


def _nfpt_unit(unit, budget: int) -> SweepSummary:
    names, space, autos = _unit_space(unit)
    n = len(names)
    counts = {"instances": 0, "c-pass": 0, "cu-pass": 0}
    bad = []
    for raw in _maps_up_to_autos(n, autos):
        f = SelfMap({names[i]: names[raw[i]] for i in range(n)})
        counts["instances"] += 1
        brute = {x for x in names if f(x) == x}
        c_report = check_c_conditions(space, f)
        if c_report.passed:
            counts["c-pass"] += 1
            result = solve_nfpt1(space, f, budget=budget)
            if not result.found or f(result.witness) != result.witness or not brute:
                bad.append(("nfpt1", unit, raw, result.outcome))
        cu_report = check_cu_conditions(space, f)
        if cu_report.passed:
            counts["cu-pass"] += 1
            result = solve_nfpt2(space, f, budget=budget)
            if not result.found or brute != {result.witness}:
                bad.append(("nfpt2", unit, raw, result.outcome))
    return SweepSummary("nfpt", counts["instances"], counts, bad, 0.0)


def _gfpt_unit(unit, budget: int) -> SweepSummary:
    names, space, autos = _unit_space(unit)
    n = len(names)
    counts = {"instances": 0, "sc-pass": 0}
    bad = []
    complete = bool(is_spherically_complete(space))
    for raw in _maps_up_to_autos(n, autos):
        f = SelfMap({names[i]: names[raw[i]] for i in range(n)})
        for balls in itertools.product(space.balls, repeat=n):
            counts["instances"] += 1
            assign = BallAssignment(dict(zip(names, balls)))
            report = check_sc_axioms(space, f, assign)
            if not report.passed:
                continue
            counts["sc-pass"] += 1
            if not complete:
                bad.append(("completeness", unit, raw, "finite space reported incomplete"))
                continue
            result = solve_gfpt2(space, f, assign, budget=budget)
            if not result.found or f(result.witness) != result.witness:
                bad.append(("gfpt2", unit, raw, tuple(sorted(map(sorted, balls))), result.outcome))
    return SweepSummary("gfpt", counts["instances"], counts, bad, 0.0)


def _nfpt_worker(args):
    return _nfpt_unit(args[0], args[1])


def _gfpt_worker(args):
    return _gfpt_unit(args[0], args[1])


def _run_units(family, units, worker, budget, jobs) -> SweepSummary:
    start = time.perf_counter()
    summary = SweepSummary(family, 0, {}, [], 0.0)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(worker, [(u, budget) for u in units], chunksize=8):
                summary.merge(part)
    else:
        for u in units:
            summary.merge(worker((u, budget)))
    summary.elapsed = time.perf_counter() - start
    return summary


def nfpt_sweep(max_points: int = 3, max_balls: int = 5, budget: int = 64, jobs: int = 1) -> SweepSummary:
    """Existence and uniqueness solvers against brute-force fixed-point scans."""
    units = canonical_units(max_points, max_balls)
    return _run_units("nfpt", units, _nfpt_worker, budget, jobs)


def gfpt_sweep(max_points: int = 3, max_balls: int = 6, budget: int = 64, jobs: int = 1) -> SweepSummary:
    """Orbit solver over every assignment whose strong-contraction axioms hold."""
    units = canonical_units(max_points, max_balls)
    return _run_units("gfpt", units, _gfpt_worker, budget, jobs)


def topo_sweep(max_points: int = 3, budget: int = 64, jobs: int = 1) -> SweepSummary:
    """All labeled topologies and closed self-maps: completeness of the
    closed-set space, fixed points under the weak and strong hypotheses, and
    the smallest-invariant-set assignment passing the orbit axioms."""
    start = time.perf_counter()
    counts = {"topologies": 0, "maps": 0, "weak": 0, "strong": 0, "fails": 0, "top3": 0}
    bad = []
    for n in range(1, max_points + 1):
        for t in topo.enumerate_topologies(n, up_to_homeo=False):
            counts["topologies"] += 1
            if not is_spherically_complete(topo.closed_ball_space(t)):
                bad.append(("cHsc", n, "closed-set space reported incomplete"))
            for f in topo.closed_self_maps(t):
                counts["maps"] += 1
                verdict = topo.check_topn_hypotheses(t, f)
                counts[verdict.verdict] += 1
                brute = {x for x in t.points if f(x) == x}
                if verdict.verdict != "fails":
                    result = topo.solve_topn(t, f, budget=budget)
                    if not result.found or result.witness not in brute:
                        bad.append(("topn", sorted(map(sorted, t.opens)), f.table, result.outcome))
                    elif verdict.verdict == "strong" and len(brute) != 1:
                        bad.append(("topn-unique", sorted(map(sorted, t.opens)), f.table))
                if topo.has_top3_hypothesis(t, f):
                    counts["top3"] += 1
                    assign = topo.invariant_closed_assignment(t, f)
                    space = topo.closed_ball_space(t)
                    sc = check_sc_axioms(space, f, assign)
                    if not sc.passed:
                        bad.append(("top3-sc", sorted(map(sorted, t.opens)), f.table,
                                    [c.name for c in sc.failures()]))
                    else:
                        result = solve_gfpt2(space, f, assign, budget=budget)
                        if not result.found:
                            bad.append(("top3-solve", sorted(map(sorted, t.opens)), f.table,
                                        result.outcome))
                lemmas = topo.check_j_lemmas(t, f)
                preconds = [c for c in lemmas.checks if c.name.startswith("precondition")]
                if all(c.passed for c in preconds):
                    if topo.check_topn_hypotheses(t, f).verdict != "strong":
                        bad.append(("swj-chain", sorted(map(sorted, t.opens)), f.table))
    return SweepSummary("topo", counts["maps"], counts, bad,
                        time.perf_counter() - start)


def run_sweep(family: str, max_points: int = 3, max_balls: int = 5,
              budget: int = 64, jobs: int = 1) -> SweepSummary:
    """Dispatch for the CLI; bounds beyond the documented caps raise."""
    if family == "nfpt":
        return nfpt_sweep(max_points, max_balls, budget, jobs)
    if family == "gfpt":
        return gfpt_sweep(max_points, min(max_balls, 6), budget, jobs)
    if family == "topo":
        if max_points > 3:
            raise PreconditionError("the topology sweep is capped at 3 points")
        return topo_sweep(max_points, budget, jobs)
    raise PreconditionError(f"unknown sweep family {family!r}")
