"""Ultrametric spaces over partially ordered value sets.

Distances land in a :class:`~ballspaces.posets.ValuePoset` with bottom 0 and
satisfy identity, symmetry, and the poset form of the ultrametric triangle
law.  The balls B(x,y) = {z : d(x,z) <= d(x,y)} induce a finite ball space,
through which the orbit solvers of :mod:`ballspaces.core` run.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import posets
from .core import (
    BallAssignment,
    BallSpace,
    ConditionCheck,
    ConditionReport,
    DEFAULT_BUDGET,
    FixedPointReport,
    Nest,
    OUTCOME_BUDGET,
    OUTCOME_FOUND,
    OUTCOME_VIOLATED,
    SelfMap,
    check_sc_axioms,
    sc3_over_f_nests,
    solve_gfpt2,
)
from .errors import (
    BudgetError,
    ContractViolationError,
    DomainMismatchError,
    InternalCheckError,
    PreconditionError,
)
from .posets import PosetValue, ValuePoset, comparable, leq, lt

_FULL_AXIOM_CAP = 24


def check_axioms(points, values: ValuePoset, table: Mapping) -> ConditionReport:
    """Axiom report for a candidate distance table (does not raise).

    U1: d(x,y) = 0 exactly on the diagonal.  U3: symmetry.  U2: the triangle
    law quantified over every bound value.  When the value set is totally
    ordered, UT (the max form) is checked as well; U2 and UT must agree.
    """
    points = list(points)
    checks = []
    u1 = next(
        (
            (x, y)
            for x in points
            for y in points
            if (table[(x, y)] == values.bottom) != (x == y)
        ),
        None,
    )
    checks.append(ConditionCheck("U1", u1 is None, witness=u1))
    u3 = next(
        ((x, y) for x in points for y in points if table[(x, y)] != table[(y, x)]), None
    )
    checks.append(ConditionCheck("U3", u3 is None, witness=u3))
    u2 = None
    for x, y, z in itertools.product(points, repeat=3):
        dxy, dyz, dxz = table[(x, y)], table[(y, z)], table[(x, z)]
        for g in values.elements:
            if values.leq_ids(dxy, g) and values.leq_ids(dyz, g) and not values.leq_ids(dxz, g):
                u2 = (x, y, z, g)
                break
        if u2:
            break
    checks.append(ConditionCheck("U2", u2 is None, witness=u2))
    if values.is_total:
        ut = None
        for x, y, z in itertools.product(points, repeat=3):
            dxy, dyz, dxz = table[(x, y)], table[(y, z)], table[(x, z)]
            bound = dxy if values.leq_ids(dyz, dxy) else dyz
            if not values.leq_ids(dxz, bound):
                ut = (x, y, z)
                break
        checks.append(ConditionCheck("UT", ut is None, witness=ut))
        if (ut is None) != (u2 is None):
            raise InternalCheckError("U2 and UT verdicts disagree on a totally ordered value set")
    return ConditionReport(tuple(checks))


class UltrametricSpace:
    """Finite point set with a poset-valued ultrametric, stored as a full table.

    ``distances`` maps unordered point pairs to value names; the diagonal is
    filled with the bottom value automatically.  Axioms are verified
    exhaustively up to ``_FULL_AXIOM_CAP`` points; larger spaces are spot
    checked on seeded samples (constructions such as residue spaces carry
    their own arithmetic law tests).
    """

    def __init__(self, points: Sequence, values: ValuePoset, distances: Mapping, *, seed: int = 7):
        self.points = tuple(points)
        self.values = values
        table = {}
        for p in self.points:
            table[(p, p)] = values.bottom
        for (x, y), v in distances.items():
            if x not in self.points or y not in self.points:
                raise DomainMismatchError(f"distance pair ({x!r}, {y!r}) names unknown points")
            if v not in values.elements:
                raise DomainMismatchError(f"distance value {v!r} is not in the value poset")
            table[(x, y)] = v
            table.setdefault((y, x), v)
        missing = [
            (x, y) for x in self.points for y in self.points if (x, y) not in table
        ]
        if missing:
            raise DomainMismatchError(f"distance table is missing pairs such as {missing[0]}")
        self._table = table
        self._members_cache: dict = {}
        if len(self.points) <= _FULL_AXIOM_CAP:
            report = check_axioms(self.points, values, table)
        else:
            report = self._sampled_axioms(seed)
        bad = report.failures()
        if bad:
            raise DomainMismatchError(f"ultrametric axiom {bad[0].name} fails at {bad[0].witness}")

    def _sampled_axioms(self, seed: int) -> ConditionReport:
        rng = random.Random(seed)
        pts = self.points
        checks = []
        u1 = next((p for p in pts if self._table[(p, p)] != self.values.bottom), None)
        checks.append(ConditionCheck("U1", u1 is None, witness=u1, note="diagonal only"))
        sym = None
        tri = None
        for _ in range(20_000):
            x, y, z = (rng.choice(pts) for _ in range(3))
            if self._table[(x, y)] != self._table[(y, x)]:
                sym = (x, y)
                break
            dxy, dyz, dxz = self._table[(x, y)], self._table[(y, z)], self._table[(x, z)]
            g = dxy if self.values.leq_ids(dyz, dxy) else dyz
            if not self.values.leq_ids(dxz, g):
                tri = (x, y, z)
                break
        checks.append(ConditionCheck("U3", sym is None, witness=sym, note="sampled"))
        checks.append(ConditionCheck("U2", tri is None, witness=tri, note="sampled"))
        return ConditionReport(tuple(checks), sampled=True)

    def d(self, x, y) -> PosetValue:
        try:
            return self.values.value(self._table[(x, y)])
        except KeyError:
            raise DomainMismatchError(f"({x!r}, {y!r}) is not a point pair of this space") from None

    def __repr__(self):
        return f"UltrametricSpace({len(self.points)} points, {len(self.values.elements)} values)"


@dataclass(frozen=True)
class UmBall:
    """Ball B(x,y) given by its center and partner; membership is by distance."""

    x: object
    y: object


def um_ball_contains(space: UltrametricSpace, x, y, z) -> bool:
    """z lies in B(x,y), i.e. d(x,z) <= d(x,y)."""
    table = space._table
    return space.values.leq_ids(table[(x, z)], table[(x, y)])


def um_ball_members(space: UltrametricSpace, x, y) -> frozenset:
    cached = space._members_cache.get((x, y))
    if cached is not None:
        return cached
    members = frozenset(z for z in space.points if um_ball_contains(space, x, y, z))
    swapped = frozenset(z for z in space.points if um_ball_contains(space, y, x, z))
    if members != swapped:
        raise InternalCheckError("B(x,y) and B(y,x) differ extensionally")
    space._members_cache[(x, y)] = members
    space._members_cache[(y, x)] = members
    return members


def um_ball_leq(space: UltrametricSpace, inner: tuple, outer: tuple) -> bool:
    """Containment test for B(t,z) inside B(x,y) by the two-condition criterion.

    Holds exactly when t is in B(x,y) and d(t,z) <= d(x,y); the extensional
    subset relation is recomputed and must agree.
    """
    t, z = inner
    x, y = outer
    verdict = um_ball_contains(space, x, y, t) and leq(space.d(t, z), space.d(x, y))
    extensional = um_ball_members(space, t, z) <= um_ball_members(space, x, y)
    if verdict != extensional:
        raise InternalCheckError(
            f"containment criterion and extension disagree on B({t},{z}) vs B({x},{y})"
        )
    return verdict


def is_contracting(space: UltrametricSpace, f: SelfMap) -> bool:
    """d(fx, fy) <= d(x, y) for every point pair, checked exhaustively."""
    f.validate_on(space.points)
    return _contracting_witness(space, f) is None


def _contracting_witness(space: UltrametricSpace, f: SelfMap):
    for x, y in itertools.combinations(space.points, 2):
        if not leq(space.d(f(x), f(y)), space.d(x, y)):
            return (x, y)
    return None


def sufpt_assignment(space: UltrametricSpace, f: SelfMap) -> BallAssignment:
    """The orbit assignment x -> B(x, fx), extensionally."""
    f.validate_on(space.points)
    return BallAssignment({x: um_ball_members(space, x, f(x)) for x in space.points})


def induced_ball_space(space: UltrametricSpace, f: SelfMap) -> tuple:
    """Finite ball space whose balls are the assigned orbit balls, plus the assignment."""
    assign = sufpt_assignment(space, f)
    balls = {b for _, b in assign.items()}
    return BallSpace(frozenset(space.points), tuple(balls)), assign


def check_sufpt_hypotheses(space: UltrametricSpace, f: SelfMap) -> ConditionReport:
    """Verify the two strong-theorem hypotheses exhaustively.

    orbit-drop: every non-fixed point has some i >= 1 with
    d(f^i x, f^{i+1} x) < d(x, fx); i is searched until the orbit cycles.
    near-step-bound: d(z, fx) <= d(fx, f^2 x) implies d(z, fz) <= d(x, fx),
    over all point pairs (x, z).
    """
    f.validate_on(space.points)
    drop_witness = None
    for x in space.points:
        if f(x) == x:
            continue
        orbit = f.orbit(x)
        budgeted = orbit[1:] + [f(orbit[-1])]
        if not any(lt(space.d(y, f(y)), space.d(x, f(x))) for y in budgeted):
            drop_witness = x
            break
    near_witness = None
    for x, z in itertools.product(space.points, repeat=2):
        if leq(space.d(z, f(x)), space.d(f(x), f(f(x)))):
            if not leq(space.d(z, f(z)), space.d(x, f(x))):
                near_witness = (x, z)
                break
    return ConditionReport(
        (
            ConditionCheck("orbit-drop", drop_witness is None, witness=drop_witness),
            ConditionCheck("near-step-bound", near_witness is None, witness=near_witness),
        )
    )


def solve_sufpt(space: UltrametricSpace, f: SelfMap, budget: int = DEFAULT_BUDGET) -> FixedPointReport:
    """Run the orbit solver with the B(x, fx) assignment.

    The strong-contraction axioms the hypotheses are supposed to deliver are
    re-verified first (exhaustively for small spaces); a violation is
    surfaced as the failed axiom rather than a solver crash.
    """
    ball_space, assign = induced_ball_space(space, f)
    if len(space.points) <= 12:
        axioms = check_sc_axioms(ball_space, f, assign)
        if not axioms.passed:
            failed = axioms.failures()[0]
            return FixedPointReport(
                OUTCOME_VIOLATED, violated=failed.name, counterexample=failed.witness,
                note="derived orbit assignment breaks a strong-contraction axiom",
            )
    return solve_gfpt2(ball_space, f, assign, budget=budget)


def check_csco(space: UltrametricSpace, f: SelfMap) -> ConditionReport:
    """Consequences of plain contraction for the orbit balls B_x = B(x, fx).

    Checks, extensionally: B_z <= B_x for every z in B_x; f(B_x) <= B_x;
    B_fx <= B_x; and SC3 over all f-nests.  A non-contracting map fails the
    precondition entry and nothing else is evaluated.
    """
    f.validate_on(space.points)
    witness = _contracting_witness(space, f)
    if witness is not None:
        return ConditionReport(
            (
                ConditionCheck("contracting-precondition", False, witness=witness,
                               note="d(fx, fy) exceeds d(x, y) on this pair"),
            )
        )
    checks = [ConditionCheck("contracting-precondition", True)]
    assign = sufpt_assignment(space, f)
    members = {x: assign[x] for x in space.points}
    zin = next(
        (
            (x, z)
            for x in space.points
            for z in members[x]
            if not members[z] <= members[x]
        ),
        None,
    )
    checks.append(ConditionCheck("ball-of-member-inside", zin is None, witness=zin))
    f_inside = next(
        (x for x in space.points if not f.image(members[x]) <= members[x]), None
    )
    checks.append(ConditionCheck("image-inside", f_inside is None, witness=f_inside))
    step = next((x for x in space.points if not members[f(x)] <= members[x]), None)
    checks.append(ConditionCheck("step-ball-inside", step is None, witness=step))
    sc3_hit = sc3_over_f_nests(space.points, f, assign)
    checks.append(ConditionCheck("SC3", sc3_hit is None, witness=sc3_hit))
    return ConditionReport(tuple(checks))


def solve_attractor(
    domain: UltrametricSpace,
    codomain: UltrametricSpace,
    phi: Mapping,
    z_prime,
    chooser: Callable,
    budget: int = DEFAULT_BUDGET,
    start=None,
) -> FixedPointReport:
    """Drive phi(x) toward the target z' through validated improvement steps.

    Wherever phi(x) differs from the target, ``chooser(x)`` must supply a
    point y with: UAT1, the image distance to the target strictly drops;
    UAT2, phi maps B(x,y) into B(phi x, z'); UAT3, d(t,x) and d(x,y) are
    comparable for every previously accepted point t whose own step dominated
    x in the same sense.  Each response is validated before it is used and a
    violation raises a contract error naming the condition.  If the walk ever
    revisits a point, a restart point is searched in the intersection of the
    accumulated orbit balls.
    """
    if budget <= 0:
        raise BudgetError("budget must be positive")
    phi_map = dict(phi)
    for p in domain.points:
        if phi_map.get(p) not in codomain.points:
            raise DomainMismatchError(f"phi is not a total map into the codomain at {p!r}")
    if z_prime not in codomain.points:
        raise DomainMismatchError(f"target {z_prime!r} is not a codomain point")
    x = min(domain.points, key=str) if start is None else start
    f_choice: dict = {}
    accepted: list = []
    steps = 0
    while steps < budget:
        steps += 1
        if phi_map[x] == z_prime:
            return FixedPointReport(OUTCOME_FOUND, witness=x, iterations=steps - 1,
                                    note="attractor reached")
        if x in f_choice:
            # the walk has cycled; restart from the orbit-ball intersection
            restart = _attractor_restart(domain, phi_map, z_prime, f_choice, x)
            if restart is None:
                return FixedPointReport(
                    OUTCOME_VIOLATED, violated="SC3", counterexample=x, iterations=steps,
                    note="no restart point keeps its ball inside the orbit intersection",
                )
            x = restart
            continue
        y = chooser(x)
        if y not in domain.points:
            raise ContractViolationError("UAT1", f"chooser left the domain at {y!r}")
        dx = codomain.d(phi_map[x], z_prime)
        dy = codomain.d(phi_map[y], z_prime)
        if not lt(dy, dx):
            raise ContractViolationError(
                "UAT1", f"image distance does not strictly drop at {x!r} -> {y!r}"
            )
        ball_xy = um_ball_members(domain, x, y)
        target_ball = um_ball_members(codomain, phi_map[x], z_prime)
        outside = next((t for t in ball_xy if phi_map[t] not in target_ball), None)
        if outside is not None:
            raise ContractViolationError(
                "UAT2", f"phi({outside!r}) escapes B(phi {x!r}, target)"
            )
        for t in accepted:
            dt = codomain.d(phi_map[t], z_prime)
            if lt(dx, dt):
                ball_tx = um_ball_members(domain, t, x)
                t_target = um_ball_members(codomain, phi_map[t], z_prime)
                if all(phi_map[s] in t_target for s in ball_tx):
                    if not comparable(domain.d(t, x), domain.d(x, y)):
                        raise ContractViolationError(
                            "UAT3",
                            f"d({t!r},{x!r}) and d({x!r},{y!r}) are incomparable",
                        )
        f_choice[x] = y
        accepted.append(x)
        x = y
    return FixedPointReport(OUTCOME_BUDGET, iterations=budget)


def _attractor_restart(domain, phi_map, z_prime, f_choice, x):
    orbit = [x]
    while f_choice.get(orbit[-1]) is not None and f_choice[orbit[-1]] not in orbit:
        orbit.append(f_choice[orbit[-1]])
    balls = [um_ball_members(domain, p, f_choice.get(p, p)) for p in orbit]
    inter = balls[0]
    for b in balls[1:]:
        inter &= b
    for z in sorted(inter, key=str):
        fz = z if phi_map[z] == z_prime else f_choice.get(z)
        if fz is None:
            continue
        if um_ball_members(domain, z, fz) <= inter and z != x:
            return z
    return None


def check_uat3_prime(space: UltrametricSpace, f: SelfMap, phi: Mapping, z_prime) -> ConditionReport:
    """Pairwise check of the alternative third condition for a given step map.

    strict-drop: whenever the image distances strictly drop from x to z and
    B(z,fz) meets B(x,fx), then d(z,fz) < d(x,fx).  comparability: the same
    premise, with the weaker conclusion that the two step distances are
    comparable.
    """
    f.validate_on(space.points)
    phi_map = dict(phi)
    strict_witness = None
    comp_witness = None
    for z, x in itertools.product(space.points, repeat=2):
        dz = space.d(phi_map[z], z_prime)
        dx = space.d(phi_map[x], z_prime)
        if not lt(dz, dx):
            continue
        if not um_ball_members(space, z, f(z)) & um_ball_members(space, x, f(x)):
            continue
        if strict_witness is None and not lt(space.d(z, f(z)), space.d(x, f(x))):
            strict_witness = (z, x)
        if comp_witness is None and not comparable(space.d(z, f(z)), space.d(x, f(x))):
            comp_witness = (z, x)
    return ConditionReport(
        (
            ConditionCheck("strict-drop", strict_witness is None, witness=strict_witness),
            ConditionCheck("comparability", comp_witness is None, witness=comp_witness),
        )
    )


def _partition_levels(rng: random.Random, names: Sequence, levels: int) -> dict:
    """Random merge hierarchy; a pair's distance is the level at which its blocks join."""
    blocks = [[n] for n in names]
    level_of = {}
    for level in range(1, levels + 1):
        if level == levels:
            groups = [list(range(len(blocks)))]
        else:
            order = list(range(len(blocks)))
            rng.shuffle(order)
            groups = []
            i = 0
            while i < len(order):
                size = rng.randint(1, len(order) - i)
                groups.append(order[i : i + size])
                i += size
        new_blocks = []
        for g in groups:
            for j1, j2 in itertools.combinations(g, 2):
                for a in blocks[j1]:
                    for b in blocks[j2]:
                        level_of[frozenset((a, b))] = level
            new_blocks.append([n for j in g for n in blocks[j]])
        blocks = new_blocks
    return level_of


def random_chain_space(rng: random.Random, n_points: int, levels: int = 3) -> UltrametricSpace:
    """Seeded random ultrametric over a totally ordered value chain."""
    names = [chr(ord("a") + i) for i in range(n_points)]
    values = posets.chain([str(i) for i in range(levels + 1)])
    level_of = _partition_levels(rng, names, levels)
    distances = {
        (a, b): str(level_of[frozenset((a, b))])
        for a, b in itertools.combinations(names, 2)
    }
    return UltrametricSpace(names, values, distances)


def random_product_space(rng: random.Random, n_points: int, levels: int = 2) -> UltrametricSpace:
    """Seeded random ultrametric into a product of two chains (a genuinely partial order)."""
    names = [chr(ord("a") + i) for i in range(n_points)]
    chain_a = posets.chain([str(i) for i in range(levels + 1)])
    chain_b = posets.chain([str(i) for i in range(levels + 1)])
    values = posets.product_poset(chain_a, chain_b)
    first = _partition_levels(rng, names, levels)
    second = _partition_levels(rng, names, levels)
    distances = {
        (a, b): posets.pair_id(
            str(first[frozenset((a, b))]), str(second[frozenset((a, b))])
        )
        for a, b in itertools.combinations(names, 2)
    }
    return UltrametricSpace(names, values, distances)
