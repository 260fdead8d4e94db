"""Acceptance suite: one criterion per test, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
Every tolerance is pinned here; the numeric pins were computed by the
independent oracles embedded in each test (brute-force scans, exact linear
solves, exhaustive enumeration).
"""

import itertools
import random
import time
from fractions import Fraction as Q

from ballspaces import hahn, padics, sweeps, topology, ultrametric
from ballspaces.banach import AffineMap, ContractionSpec, chebyshev, orbit_ball, solve_banach
from ballspaces.core import (
    SelfMap,
    is_spherically_complete,
    naturals_tail_nest,
    naturals_tail_space,
    solve_gfpt2,
)
from ballspaces.hahn import HahnSeries
from ballspaces.padics import PAdicInt, Polynomial


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"[criterion {number:>2}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {number}: {detail}"


def test_criterion_01_nfpt_sweep():
    summary = sweeps.nfpt_sweep(max_points=3, max_balls=5)
    ok = summary.ok and summary.elapsed < 60.0
    _report(
        1, ok,
        f"nfpt sweep |X|<=3, <=5 balls: {summary.instances} instances, "
        f"{summary.counts['c-pass']} C-passing, {summary.counts['cu-pass']} CU-passing, "
        f"{len(summary.counterexamples)} counterexamples, {summary.elapsed:.2f}s (< 60s)",
    )


def test_criterion_02_gfpt_sweep():
    summary = sweeps.gfpt_sweep(max_points=3, max_balls=6)
    ok = summary.ok and summary.elapsed < 120.0
    _report(
        2, ok,
        f"gfpt sweep |X|<=3 over all assignments: {summary.instances} triples, "
        f"{summary.counts['sc-pass']} SC-passing, {len(summary.counterexamples)} "
        f"counterexamples, {summary.elapsed:.2f}s (< 120s)",
    )


def _brute_roots(coeffs, p, k):
    mod = p**k
    return sorted(r for r in range(mod) if sum(c * r**i for i, c in enumerate(coeffs)) % mod == 0)


def test_criterion_03_hensel_pin():
    start = time.perf_counter()
    result = padics.hensel_lift([-2, 0, 1], 3, 7, 3)
    trace_ok = [r for _, r in result.trace] == [3, 10, 108]
    brute_ok = all(
        r in _brute_roots([-2, 0, 1], 7, k) and r % 7 == 3 for k, r in result.trace
    )
    deep = padics.hensel_lift([-2, 0, 1], 3, 7, 10)
    residual = Polynomial.from_ints([-2, 0, 1], 7, 10).eval(deep.root).residue
    elapsed = time.perf_counter() - start
    ok = trace_ok and brute_ok and residual == 0 and elapsed < 1.0
    _report(
        3, ok,
        f"hensel trace {[r for _, r in result.trace]} at precisions "
        f"{[k for k, _ in result.trace]}, exact brute-force match, "
        f"P(root) = 0 mod 7^10, {elapsed * 1000:.0f}ms (< 1s)",
    )


def test_criterion_04_fptcbs_shadow():
    poly = Polynomial.from_ints([7, 6, 1], 7, 3)  # (y+3)^2 - 2

    def f(y):
        return padics.newton_map(poly, PAdicInt(7, 3, y)).residue

    hypotheses = padics.check_fptcbs_hypotheses(f, 7, 3)
    table = {y: f(y) for y in range(0, 343, 7)}
    orbit_ok = True
    for start_point in table:
        y = start_point
        for _ in range(32):
            y = table[y]
        orbit_ok = orbit_ok and y == 105
    space, self_map, assign = padics.induced_ideal_ball_space(f, 7, 3)
    solver_ok = all(
        (lambda r: r.found and r.witness == "105")(
            solve_gfpt2(space, self_map, assign, start=s)
        )
        for s in space.points
    )
    ok = hypotheses.passed and orbit_ok and solver_ok
    _report(
        4, ok,
        "stagewise hypotheses hold for the shifted update map at p=7, N=3; "
        "all 49 starts iterate to 105 and the core orbit solver agrees from every start",
    )


def _random_contraction(rng, dim):
    rows = []
    for _ in range(dim):
        weights = [Q(rng.randint(-4, 4), 16) for _ in range(dim)]
        scale = sum(abs(w) for w in weights)
        if scale > Q(1, 2):
            weights = [w / (2 * scale + 1) for w in weights]
        rows.append(tuple(weights))
    offset = tuple(Q(rng.randint(-8, 8), rng.randint(1, 8)) for _ in range(dim))
    return AffineMap(tuple(rows), offset)


def test_criterion_05_banach_certificates():
    start = time.perf_counter()
    rng = random.Random(2023)
    eps = Q(1, 2**20)
    failures = 0
    for _ in range(100):
        dim = rng.randint(1, 3)
        affine = _random_contraction(rng, dim)
        assert affine.lipschitz() <= Q(1, 2)
        spec = ContractionSpec(affine, Q(1, 2))
        x0 = tuple(Q(rng.randint(-4, 4)) for _ in range(dim))
        result = solve_banach(spec, x0, eps)
        exact = affine.fixed_point()
        if result.certificate.radius > eps or not result.certificate.contains(exact):
            failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 10.0
    _report(
        5, ok,
        f"100 seeded affine contractions (dims 1-3, C <= 1/2): exact fixed point "
        f"inside every certificate of radius <= 2^-20, {failures} failures, "
        f"{elapsed:.2f}s (< 10s)",
    )


def test_criterion_06_inequality_suite():
    rng = random.Random(99)
    violations = 0
    for _ in range(40):
        dim = rng.randint(1, 3)
        affine = _random_contraction(rng, dim)
        C = Q(1, 2)
        spec = ContractionSpec(affine, C)
        x0 = tuple(Q(rng.randint(-3, 3)) for _ in range(dim))
        orbit = [x0]
        for _ in range(10):
            orbit.append(spec.f(orbit[-1]))
        d0 = chebyshev(orbit[0], orbit[1])
        bound = d0 / (1 - C)
        balls = [orbit_ball(spec, x) for x in orbit]
        z = orbit[-1]
        z_gap = chebyshev(z, spec.f(z))
        for i in range(len(orbit)):
            if chebyshev(orbit[0], orbit[i]) > bound:
                violations += 1
            if i + 1 < len(balls) and not balls[i].contains_ball(balls[i + 1]):
                violations += 1
            if 1 <= i < len(orbit) - 1:
                if z_gap > C ** (i - 1) * (C + 1) / (1 - C) * d0:
                    violations += 1
    _report(
        6, violations == 0,
        f"geometric-series bound, orbit-ball nesting, and the closing estimate "
        f"C^(i-1)(C+1)/(1-C) d(x,fx) hold exactly along 40 seeded orbits "
        f"({violations} violations)",
    )


def test_criterion_07_ultrametric_ball_laws():
    rng = random.Random(7)
    spaces = []
    for i in range(200):
        n = rng.randint(3, 5)
        if i % 2 == 0:
            spaces.append(ultrametric.random_chain_space(rng, n, rng.randint(2, 3)))
        else:
            spaces.append(ultrametric.random_product_space(rng, n, 2))
    eq2 = eq3 = comp = 0
    for space in spaces:
        pts = space.points
        values = space.values
        table = space._table
        members = {
            (x, y): frozenset(z for z in pts if values.leq_ids(table[(x, z)], table[(x, y)]))
            for x in pts
            for y in pts
        }
        for (x, y), (t, z) in itertools.product(members, repeat=2):
            criterion = values.leq_ids(table[(x, t)], table[(x, y)]) and values.leq_ids(
                table[(t, z)], table[(x, y)]
            )
            if criterion != (members[(t, z)] <= members[(x, y)]):
                eq2 += 1
        for x, y, z in itertools.product(pts, repeat=3):
            dyz, dxy = table[(y, z)], table[(x, y)]
            if values.leq_ids(dyz, dxy) and dyz != dxy:
                if not members[(y, z)] < members[(x, y)]:
                    eq3 += 1
        if values.is_total:
            distinct = sorted(set(members.values()), key=sorted)
            for b1, b2 in itertools.combinations(distinct, 2):
                if b1 & b2 and not (b1 <= b2 or b2 <= b1):
                    comp += 1
    ok = eq2 == 0 and eq3 == 0 and comp == 0
    _report(
        7, ok,
        f"ball laws on 200 seeded spaces (<= 5 points, chain and product values): "
        f"containment criterion == extension ({eq2} violations), strict distance "
        f"drop forces proper inclusion ({eq3}), overlapping balls comparable on "
        f"chains ({comp})",
    )


def test_criterion_08_attractor_pin():
    space = padics.residue_space(7, 3)
    phi = {str(x): str(x * x % 343) for x in range(343)}

    def newton_chooser(x_str):
        x = int(x_str)
        inv = pow(2 * x % 343, -1, 343)
        return str((x - (x * x - 2) * inv) % 343)

    result = ultrametric.solve_attractor(space, space, phi, "2", newton_chooser, start="3")
    brute = sorted(x for x in range(343) if x * x % 343 == 2)
    ok = result.found and result.witness == "108" and 108 in brute
    _report(
        8, ok,
        f"square-root attractor mod 343 from start 3 returns {result.witness}; "
        f"brute-force roots {brute}; every chooser step validated",
    )


def test_criterion_09_oag_pin():
    f = lambda x: x * Q(1, 2) + HahnSeries.t()
    result = hahn.solve_oag(f, 1, 2, HahnSeries.zero(), trunc=32)
    expected = HahnSeries.t(1, 2)
    ok = result.outcome == "fixed-point" and result.point == expected
    _report(
        9, ok,
        f"series orbit solver on x/2 + t at truncation 32 returns "
        f"{hahn.format_series(result.point)} exactly; step inequalities checked "
        f"at every accepted step",
    )


def test_criterion_10_scoscu_containments():
    rng = random.Random(10)
    failures = 0
    for _ in range(50):
        depth = rng.randint(2, 6)
        pairs = []
        x = HahnSeries.constant(rng.randint(-2, 2))
        exps = sorted(rng.sample(range(1, 14), depth))
        for e in exps:
            y = x + HahnSeries.t(e, Q(rng.randint(1, 4)))
            pairs.append((x, y))
            x = x + HahnSeries.t(e, Q(rng.randint(1, 3), 2))
        report = hahn.scoscu_transfer(pairs)
        if not (report.check("order-ball-inside-um-ball").passed
                and report.check("next-um-ball-inside-order-ball").passed):
            failures += 1
    _report(
        10, failures == 0,
        f"both bridge containments hold exactly on 50 seeded strictly descending "
        f"nests of depth <= 6 ({failures} failures)",
    )


def test_criterion_11_topology_sweep():
    summary = sweeps.topo_sweep(max_points=3)
    ok = summary.ok and summary.elapsed < 120.0
    _report(
        11, ok,
        f"topology sweep (<=3 points, all {summary.counts['topologies']} labeled "
        f"topologies, {summary.counts['maps']} closed maps): completeness, "
        f"weak/strong verdicts ({summary.counts['weak']}/{summary.counts['strong']}), "
        f"{summary.counts['top3']} smallest-invariant-set instances, "
        f"{len(summary.counterexamples)} counterexamples, {summary.elapsed:.2f}s (< 120s)",
    )


def test_criterion_12_incompleteness_witnesses():
    verdict = is_spherically_complete(naturals_tail_space(), nests=[naturals_tail_nest()])
    nest_witnessed = not verdict and verdict.witness_nest is not None

    arch = hahn.check_asco("rationals", hahn.sqrt2_bisection_nest(100), budget=40)
    lo, hi, width = arch.witness
    arch_ok = (
        arch.outcome == "empty-so-far"
        and arch.levels == 40
        and width < Q(1, 2**38)
        and lo * lo < 2 < hi * hi
    )
    ok = nest_witnessed and arch_ok
    _report(
        12, ok,
        f"upward-tail nest on the naturals reported incomplete with witness; "
        f"rational bisection nest around the square root of 2 empty-so-far at "
        f"depth 40 with witness width {float(width):.2e} < 2^-38",
    )
