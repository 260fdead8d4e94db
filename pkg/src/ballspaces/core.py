"""Ball spaces, nests, contracting balls, and the generic fixed-point solvers.

A ball space is a ground set together with a nonempty collection of nonempty
subsets, called balls.  No metric or topology is assumed; everything below
works with set inclusion alone.  Finite spaces enumerate their balls
explicitly and every question about them is decided exhaustively.  Presented
spaces expose only a membership oracle and are probed within budgets, with
every verdict labeled accordingly.

Two solver families live here:

* ``solve_nfpt1`` / ``solve_nfpt2`` descend through f-contracting balls
  (a ball is f-contracting when it is a singleton holding a fixed point or
  its image is a proper subset of it).
* ``solve_gfpt2`` walks the orbit balls of a point assignment x -> B_x and
  restarts from a point of the nest intersection whose ball stays inside it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    BudgetError,
    ContractViolationError,
    DomainMismatchError,
    EmptyPreimageError,
    InternalCheckError,
    InvalidAssignmentError,
    InvalidBallError,
    UnsupportedModeError,
)

DEFAULT_BUDGET = 10_000

OUTCOME_FOUND = "fixed-point-found"
OUTCOME_VIOLATED = "hypothesis-violated"
OUTCOME_BUDGET = "budget-exhausted"


def ball_key(ball: frozenset) -> tuple:
    """Deterministic sort key: smallest cardinality first, then point names."""
    return (len(ball), tuple(sorted(ball)))


def fmt_ball(ball: Iterable) -> str:
    return "{" + ",".join(sorted(str(p) for p in ball)) + "}"


@dataclass(frozen=True)
class BallSpace:
    """Finite ball space with explicitly enumerated points and balls.

    Balls are deduplicated extensionally and stored sorted by
    :func:`ball_key`, so every "pick the smallest candidate" step in the
    solvers is reproducible across runs.
    """

    points: frozenset
    balls: tuple

    def __post_init__(self):
        pts = frozenset(self.points)
        if not pts:
            raise InvalidBallError("ground set is empty")
        normalized = sorted({frozenset(b) for b in self.balls}, key=ball_key)
        if not normalized:
            raise InvalidBallError("ball collection is empty")
        for b in normalized:
            if not b:
                raise InvalidBallError("balls must be nonempty")
            if not b <= pts:
                raise InvalidBallError(f"ball {fmt_ball(b)} is not a subset of the ground set")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "balls", tuple(normalized))
        object.__setattr__(self, "_ball_set", frozenset(normalized))

    def has_ball(self, ball) -> bool:
        return frozenset(ball) in self._ball_set

    def whole(self) -> frozenset:
        return self.points


@dataclass(frozen=True)
class PresentedBallSpace:
    """Ball space given by oracles instead of explicit enumeration.

    ``membership(point, ball_id)`` decides containment, ``ball_ids()`` yields
    ball identifiers, and ``points()`` yields probe points.  Both iterators
    may be infinite; callers bound them with budgets.
    """

    universe: str
    membership: Callable
    ball_ids: Callable
    points: Callable


class SelfMap:
    """Total self-map on a finite ground set, given as an explicit table."""

    def __init__(self, mapping: Mapping):
        self._table = dict(mapping)

    def __call__(self, x):
        try:
            return self._table[x]
        except KeyError:
            raise DomainMismatchError(f"map is undefined at {x!r}") from None

    def __eq__(self, other):
        return isinstance(other, SelfMap) and self._table == other._table

    def __hash__(self):
        return hash(tuple(sorted(self._table.items())))

    def __repr__(self):
        inner = ", ".join(f"{k}->{v}" for k, v in sorted(self._table.items()))
        return f"SelfMap({inner})"

    @property
    def table(self) -> dict:
        return dict(self._table)

    def validate_on(self, points: Iterable) -> None:
        pts = set(points)
        missing = pts - self._table.keys()
        if missing:
            raise DomainMismatchError(f"map is undefined at {sorted(map(str, missing))}")
        escapes = {v for k, v in self._table.items() if k in pts and v not in pts}
        if escapes:
            raise DomainMismatchError(f"map leaves the ground set at {sorted(map(str, escapes))}")

    def image(self, ball: Iterable) -> frozenset:
        return frozenset(self._table[x] for x in ball)

    def orbit(self, x) -> list:
        """Points x, fx, f^2 x, ... in visit order, stopping before the first repeat."""
        seen = []
        seen_set = set()
        cur = x
        while cur not in seen_set:
            seen.append(cur)
            seen_set.add(cur)
            cur = self(cur)
        return seen

    def fixed_points(self, points: Iterable) -> frozenset:
        return frozenset(x for x in points if self._table[x] == x)


class BallAssignment:
    """Assignment x -> B_x of a ball to every point."""

    def __init__(self, table: Mapping):
        self._table = {p: frozenset(b) for p, b in table.items()}

    def __getitem__(self, x) -> frozenset:
        try:
            return self._table[x]
        except KeyError:
            raise InvalidAssignmentError(f"assignment is undefined at {x!r}") from None

    def items(self):
        return self._table.items()

    def validate_on(self, space: BallSpace) -> None:
        missing = space.points - self._table.keys()
        if missing:
            raise InvalidAssignmentError(
                f"assignment is undefined at {sorted(map(str, missing))}"
            )
        for p in space.points:
            if not space.has_ball(self._table[p]):
                raise InvalidAssignmentError(
                    f"assigned ball {fmt_ball(self._table[p])} of {p!r} is not in the collection"
                )


@dataclass(frozen=True)
class Nest:
    """Chain of balls ordered by reverse inclusion, largest first."""

    chain: tuple
    tag: str = ""

    def __post_init__(self):
        balls = tuple(frozenset(b) for b in self.chain)
        if not balls:
            raise InvalidBallError("a nest must contain at least one ball")
        for prev, nxt in zip(balls, balls[1:]):
            if not nxt <= prev:
                raise InvalidBallError(
                    f"not a nest: {fmt_ball(nxt)} does not sit inside {fmt_ball(prev)}"
                )
        object.__setattr__(self, "chain", balls)

    @classmethod
    def from_balls(cls, balls: Iterable, tag: str = "") -> "Nest":
        ordered = sorted((frozenset(b) for b in balls), key=lambda b: (-len(b), tuple(sorted(b))))
        return cls(tuple(ordered), tag)

    def intersection(self) -> frozenset:
        inter = self.chain[0]
        for b in self.chain[1:]:
            inter = inter & b
        return inter

    def minimum(self) -> frozenset:
        return self.chain[-1]

    def __len__(self):
        return len(self.chain)


@dataclass(frozen=True)
class FixedPointReport:
    """Outcome of a solver run.

    Exactly one of the three outcomes applies; ``violated`` names the broken
    condition (C1..C3, CU1..CU3, SC1..SC3) and ``counterexample`` carries the
    offending ball, point, or nest.
    """

    outcome: str
    witness: object = None
    nest: Nest | None = None
    violated: str | None = None
    counterexample: object = None
    iterations: int = 0
    note: str = ""

    @property
    def found(self) -> bool:
        return self.outcome == OUTCOME_FOUND


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    witness: object = None
    note: str = ""


@dataclass(frozen=True)
class ConditionReport:
    checks: tuple
    sampled: bool = False

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> ConditionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> tuple:
        return tuple(c for c in self.checks if not c.passed)


@dataclass(frozen=True)
class SphericalVerdict:
    """Completeness verdict; presented spaces carry the probed evidence."""

    complete: bool
    witness_nest: object = None
    nest_verdicts: tuple = ()
    note: str = ""

    def __bool__(self):
        return self.complete


def _require_finite(space) -> None:
    if not isinstance(space, BallSpace):
        raise UnsupportedModeError("exhaustive checking needs an enumerated finite space")


def is_f_contracting(space: BallSpace, f: SelfMap, ball) -> bool:
    """A ball is f-contracting when it is a singleton fixed point or f(B) is a proper subset."""
    b = frozenset(ball)
    if not space.has_ball(b):
        raise InvalidBallError(f"{fmt_ball(b)} is not a ball of this space")
    if len(b) == 1:
        (x,) = b
        if f(x) == x:
            return True
    return f.image(b) < b


def _contracting_balls(space: BallSpace, f: SelfMap) -> list:
    return [b for b in space.balls if is_f_contracting(space, f, b)]


def _maximal_chains(balls: Sequence[frozenset]) -> Iterator[tuple]:
    """All maximal inclusion-chains among the given distinct balls."""
    balls = list(balls)
    if not balls:
        return
    tops = [b for b in balls if not any(b < c for c in balls)]

    def covers(b):
        subs = [c for c in balls if c < b]
        return [c for c in subs if not any(c < m < b for m in subs)]

    def walk(path):
        below = covers(path[-1])
        if not below:
            yield tuple(path)
            return
        for c in sorted(below, key=ball_key):
            yield from walk(path + [c])

    for top in sorted(tops, key=ball_key):
        yield from walk([top])


def check_c_conditions(space: BallSpace, f: SelfMap) -> ConditionReport:
    """Verify the existence-theorem conditions C1, C2, C3 exhaustively.

    C1: some ball is f-contracting.  C2: the image of every f-contracting
    ball contains an f-contracting ball.  C3: the intersection of every nest
    of f-contracting balls contains one.  C3 is decided on maximal chains;
    any other nest extends to a maximal one with a smaller intersection, so
    the maximal chains are the worst case.
    """
    _require_finite(space)
    f.validate_on(space.points)
    fc = _contracting_balls(space, f)
    checks = []
    checks.append(
        ConditionCheck("C1", bool(fc), note="" if fc else "no f-contracting ball exists")
    )
    c2_witness = None
    for b in fc:
        img = f.image(b)
        if not any(c <= img for c in fc):
            c2_witness = b
            break
    checks.append(
        ConditionCheck(
            "C2",
            c2_witness is None,
            witness=c2_witness,
            note="" if c2_witness is None else f"image of {fmt_ball(c2_witness)} holds no f-contracting ball",
        )
    )
    c3_witness = None
    for chain in _maximal_chains(fc):
        inter = chain[0]
        for b in chain[1:]:
            inter = inter & b
        if not any(c <= inter for c in fc):
            c3_witness = chain
            break
    checks.append(
        ConditionCheck(
            "C3",
            c3_witness is None,
            witness=c3_witness,
            note="" if c3_witness is None else "a maximal nest's intersection holds no f-contracting ball",
        )
    )
    return ConditionReport(tuple(checks))


def _chains_of(balls: Sequence[frozenset]) -> Iterator[tuple]:
    """Every nonempty subset of the given balls that is totally ordered by inclusion."""
    balls = sorted(set(balls), key=ball_key)
    n = len(balls)
    for mask in range(1, 1 << n):
        subset = [balls[i] for i in range(n) if mask >> i & 1]
        subset.sort(key=lambda b: -len(b))
        if all(nxt <= prev for prev, nxt in zip(subset, subset[1:])):
            yield tuple(subset)


def check_cu_conditions(space: BallSpace, f: SelfMap) -> ConditionReport:
    """Verify the uniqueness-theorem conditions CU1, CU2, CU3 exhaustively."""
    _require_finite(space)
    f.validate_on(space.points)
    fc = _contracting_balls(space, f)
    fc_set = set(fc)
    whole = space.whole()
    checks = []
    if not space.has_ball(whole):
        checks.append(ConditionCheck("CU1", False, witness=whole, note="the whole set is not a ball"))
    elif whole not in fc_set:
        checks.append(ConditionCheck("CU1", False, witness=whole, note="the whole set is not f-contracting"))
    else:
        checks.append(ConditionCheck("CU1", True))
    cu2_witness = None
    cu2_note = ""
    for b in fc:
        img = f.image(b)
        if not space.has_ball(img):
            cu2_witness, cu2_note = b, f"f{fmt_ball(b)} = {fmt_ball(img)} is not a ball"
            break
        if img not in fc_set:
            cu2_witness, cu2_note = b, f"f{fmt_ball(b)} = {fmt_ball(img)} is not f-contracting"
            break
    checks.append(ConditionCheck("CU2", cu2_witness is None, witness=cu2_witness, note=cu2_note))
    cu3_witness = None
    cu3_note = ""
    for chain in _chains_of(fc):
        inter = chain[0]
        for b in chain[1:]:
            inter = inter & b
        if not space.has_ball(inter):
            cu3_witness, cu3_note = chain, "a nest intersection is not a ball"
            break
        if inter not in fc_set:
            cu3_witness, cu3_note = chain, "a nest intersection is not f-contracting"
            break
    checks.append(ConditionCheck("CU3", cu3_witness is None, witness=cu3_witness, note=cu3_note))
    return ConditionReport(tuple(checks))


def _check_budget(budget: int) -> None:
    if budget <= 0:
        raise BudgetError("budget must be positive")


def solve_nfpt1(space: BallSpace, f: SelfMap, budget: int = DEFAULT_BUDGET) -> FixedPointReport:
    """Greedy nest descent through f-contracting balls.

    Start from a maximal f-contracting ball and repeatedly descend into an
    f-contracting ball inside the image of the current minimum (C2 step) or
    inside the chain intersection (C3 step), until a singleton fixed point is
    reached.  Each step takes the largest candidate so the produced chain is
    maximal, with ties broken by point names for reproducibility.
    """
    _check_budget(budget)
    _require_finite(space)
    f.validate_on(space.points)
    fc = _contracting_balls(space, f)
    if not fc:
        return FixedPointReport(
            OUTCOME_VIOLATED, violated="C1", note="no f-contracting ball exists"
        )
    biggest_first = lambda b: (-len(b), tuple(sorted(b)))
    nest = [min(fc, key=biggest_first)]
    steps = 0
    while steps < budget:
        cur = nest[-1]
        if len(cur) == 1:
            (x,) = cur
            return FixedPointReport(
                OUTCOME_FOUND, witness=x, nest=Nest(tuple(nest), tag="contracting descent"),
                iterations=steps,
            )
        img = f.image(cur)
        candidates = [b for b in fc if b <= img]
        if not candidates:
            inter = nest[-1]  # finite chains bottom out at their minimum
            candidates = [b for b in fc if b < inter]
        if not candidates:
            return FixedPointReport(
                OUTCOME_VIOLATED,
                violated="C2",
                counterexample=cur,
                nest=Nest(tuple(nest), tag="contracting descent"),
                iterations=steps,
                note=f"image of {fmt_ball(cur)} holds no f-contracting ball",
            )
        nest.append(min(candidates, key=biggest_first))
        steps += 1
    return FixedPointReport(
        OUTCOME_BUDGET, nest=Nest(tuple(nest), tag="contracting descent"), iterations=steps
    )


def solve_nfpt2(space: BallSpace, f: SelfMap, budget: int = DEFAULT_BUDGET) -> FixedPointReport:
    """Image iteration from the whole space down to the unique fixed point.

    Sets B_0 to the whole set and B_{k+1} = f(B_k); each stage must again be
    an f-contracting ball, otherwise the run stops with the violated
    condition and the stage.  The chain strictly descends until it stabilizes
    on a singleton, whose point is the unique fixed point; uniqueness is then
    confirmed by scanning all points.  A finite strictly descending chain
    cannot stall before a singleton, so no limit-stage intersection is ever
    taken; the stage counter still reports how far the descent went.
    """
    _check_budget(budget)
    _require_finite(space)
    f.validate_on(space.points)
    whole = space.whole()
    if not space.has_ball(whole) or not is_f_contracting(space, f, whole):
        return FixedPointReport(
            OUTCOME_VIOLATED, violated="CU1", counterexample=whole, iterations=0,
            note="the whole set must be an f-contracting ball",
        )
    chain = [whole]
    stage = 0
    while stage < budget:
        cur = chain[-1]
        nxt = f.image(cur)
        if nxt == cur:
            if len(cur) != 1:
                raise InternalCheckError(
                    "image iteration stalled on a non-singleton f-contracting ball"
                )
            (x,) = cur
            others = sorted(y for y in space.points if f(y) == y and y != x)
            if others:
                raise InternalCheckError(
                    f"uniqueness scan found further fixed points {others} after a CU-clean descent"
                )
            return FixedPointReport(
                OUTCOME_FOUND, witness=x, nest=Nest(tuple(chain), tag="image iteration"),
                iterations=stage,
            )
        if not space.has_ball(nxt):
            return FixedPointReport(
                OUTCOME_VIOLATED, violated="CU2", counterexample=cur, iterations=stage,
                nest=Nest(tuple(chain), tag="image iteration"),
                note=f"stage {stage}: f{fmt_ball(cur)} = {fmt_ball(nxt)} is not a ball",
            )
        if not is_f_contracting(space, f, nxt):
            return FixedPointReport(
                OUTCOME_VIOLATED, violated="CU2", counterexample=nxt, iterations=stage,
                nest=Nest(tuple(chain), tag="image iteration"),
                note=f"stage {stage}: the image ball is not f-contracting",
            )
        chain.append(nxt)
        stage += 1
    return FixedPointReport(
        OUTCOME_BUDGET, nest=Nest(tuple(chain), tag="image iteration"), iterations=stage
    )


_SC3_POINT_CAP = 16


def f_closed_subsets(points: Sequence, f: SelfMap) -> Iterator[tuple]:
    """All nonempty subsets of the ground set that are closed under f."""
    pts = sorted(points)
    n = len(pts)
    if n > _SC3_POINT_CAP:
        raise UnsupportedModeError(
            f"f-nest enumeration is capped at {_SC3_POINT_CAP} points, got {n}"
        )
    index = {p: i for i, p in enumerate(pts)}
    img = [index[f(p)] for p in pts]
    for mask in range(1, 1 << n):
        closed = True
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            if not mask >> img[i] & 1:
                closed = False
                break
            m &= m - 1
        if closed:
            yield tuple(pts[i] for i in range(n) if mask >> i & 1)


def sc3_over_f_nests(points: Sequence, f: SelfMap, assign: BallAssignment):
    """Check SC3 on every f-nest: the ball of any intersection point stays inside.

    f-nests are the chains of assigned balls generated by f-closed subsets.
    Returns None when SC3 holds, otherwise (generating set, point, nest).
    """
    for subset in f_closed_subsets(points, f):
        balls = sorted({assign[p] for p in subset}, key=lambda b: -len(b))
        if not all(nxt <= prev for prev, nxt in zip(balls, balls[1:])):
            continue  # the assigned balls do not form a nest, so this S generates none
        inter = balls[-1]
        for z in sorted(inter):
            if not assign[z] <= inter:
                return subset, z, tuple(balls)
    return None


def check_sc_axioms(
    space,
    f,
    assign,
    *,
    starts: Sequence | None = None,
    point_budget: int = 64,
    orbit_budget: int = 64,
) -> ConditionReport:
    """Verify SC1 (x in B_x), SC2 (nesting plus eventual strict shrink), SC3.

    Finite spaces are checked exhaustively; SC2's strict-shrink index i is
    searched along each orbit up to its first repetition, beyond which no new
    balls occur.  SC3 enumerates every f-closed subset and tests every point
    of the resulting nest intersections.  Presented spaces are probed along
    the supplied start orbits only and the report is flagged as sampled.
    """
    if isinstance(space, PresentedBallSpace):
        return _check_sc_sampled(space, f, assign, starts or [], point_budget, orbit_budget)
    f.validate_on(space.points)
    assign.validate_on(space)
    checks = []
    sc1_witness = next((x for x in sorted(space.points) if x not in assign[x]), None)
    checks.append(
        ConditionCheck("SC1", sc1_witness is None, witness=sc1_witness,
                       note="" if sc1_witness is None else f"{sc1_witness!r} lies outside its own ball")
    )
    sc2_witness = None
    sc2_note = ""
    for x in sorted(space.points):
        if not assign[f(x)] <= assign[x]:
            sc2_witness, sc2_note = x, f"ball of f({x!r}) escapes the ball of {x!r}"
            break
        if f(x) != x:
            orbit = f.orbit(x)
            if not any(assign[y] < assign[x] for y in orbit[1:] + [f(orbit[-1])]):
                sc2_witness = x
                sc2_note = f"no orbit ball of {x!r} shrinks properly before the orbit cycles"
                break
    checks.append(ConditionCheck("SC2", sc2_witness is None, witness=sc2_witness, note=sc2_note))
    if sc1_witness is None and sc2_witness is None:
        sc3_hit = sc3_over_f_nests(space.points, f, assign)
        checks.append(
            ConditionCheck(
                "SC3",
                sc3_hit is None,
                witness=sc3_hit,
                note="" if sc3_hit is None
                else "a nest intersection point carries its ball outside the intersection",
            )
        )
    else:
        checks.append(ConditionCheck("SC3", False, note="skipped: SC1/SC2 already failed"))
    return ConditionReport(tuple(checks))


def _check_sc_sampled(space, f, assign, starts, point_budget, orbit_budget):
    checks = []
    sc1_witness = None
    sc2_witness = None
    sc3_witness = None
    for start in starts:
        orbit = [start]
        while len(orbit) < orbit_budget:
            nxt = f(orbit[-1])
            if nxt in orbit:
                break
            orbit.append(nxt)
        for x in orbit:
            if not space.membership(x, assign(x)):
                sc1_witness = sc1_witness or x
        for x, y in zip(orbit, orbit[1:]):
            # containment is probed: a sample point inside B_y but outside B_x refutes it
            for probe in itertools.islice(space.points(), point_budget):
                if space.membership(probe, assign(y)) and not space.membership(probe, assign(x)):
                    sc2_witness = sc2_witness or (x, probe)
                    break
        ids = [assign(x) for x in orbit]
        for probe in itertools.islice(space.points(), point_budget):
            if all(space.membership(probe, i) for i in ids):
                for inner in itertools.islice(space.points(), point_budget):
                    if space.membership(inner, assign(probe)) and not all(
                        space.membership(inner, i) for i in ids
                    ):
                        sc3_witness = sc3_witness or (probe, inner)
                        break
                break
    checks.append(ConditionCheck("SC1", sc1_witness is None, witness=sc1_witness))
    checks.append(ConditionCheck("SC2", sc2_witness is None, witness=sc2_witness))
    checks.append(ConditionCheck("SC3", sc3_witness is None, witness=sc3_witness))
    return ConditionReport(tuple(checks), sampled=True)


def solve_gfpt2(
    space,
    f,
    assign,
    budget: int = DEFAULT_BUDGET,
    start=None,
    chooser: Callable | None = None,
) -> FixedPointReport:
    """Orbit-and-restart solver for assignments that contract strongly on orbits.

    From the current point, the orbit balls B_x, B_fx, ... are stacked into a
    nest; when the orbit has cycled, a point z of the nest intersection with
    B_z inside the intersection restarts the walk.  In finite mode z is found
    exhaustively (smallest point name first); a caller-supplied ``chooser``
    overrides the search and is validated, raising a contract violation if its
    point leaves the intersection or its ball escapes.
    """
    _check_budget(budget)
    if isinstance(space, PresentedBallSpace):
        return _solve_gfpt2_presented(space, f, assign, budget, start, chooser)
    f.validate_on(space.points)
    assign.validate_on(space)
    x = min(space.points) if start is None else start
    if x not in space.points:
        raise DomainMismatchError(f"start point {x!r} is not in the ground set")
    chain: list = []
    seen_states = set()
    steps = 0
    while True:
        if f(x) == x:
            if not chain:
                chain = [assign[x]]
            elif assign[x] <= chain[-1] and assign[x] != chain[-1]:
                chain.append(assign[x])
            return FixedPointReport(
                OUTCOME_FOUND, witness=x,
                nest=Nest(tuple(chain), tag=f"orbit of {x!r}"),
                iterations=steps,
            )
        steps += 1
        if steps > budget:
            return FixedPointReport(
                OUTCOME_BUDGET,
                nest=Nest(tuple(chain), tag="orbit walk") if chain else None,
                iterations=steps - 1,
            )
        orbit = f.orbit(x)
        balls = []
        for p in orbit:
            b = assign[p]
            if p not in b:
                return FixedPointReport(
                    OUTCOME_VIOLATED, violated="SC1", counterexample=p, iterations=steps,
                    note=f"{p!r} lies outside its own ball",
                )
            if balls and not b <= balls[-1]:
                return FixedPointReport(
                    OUTCOME_VIOLATED, violated="SC2", counterexample=p, iterations=steps,
                    note="orbit balls do not nest",
                )
            if not balls or b != balls[-1]:
                balls.append(b)
        inter = balls[-1]
        if chooser is not None:
            z = chooser(inter, Nest(tuple(balls), tag=f"orbit of {x!r}"))
            if z not in inter:
                raise ContractViolationError(
                    "intersection-chooser", f"{z!r} lies outside the nest intersection"
                )
            if not assign[z] <= inter:
                raise ContractViolationError(
                    "intersection-chooser",
                    f"the ball assigned to {z!r} escapes the nest intersection",
                )
        else:
            z = next((c for c in sorted(inter) if assign[c] <= inter), None)
            if z is None:
                return FixedPointReport(
                    OUTCOME_VIOLATED, violated="SC3",
                    counterexample=Nest(tuple(balls), tag=f"orbit of {x!r}"),
                    iterations=steps,
                    note="no intersection point keeps its ball inside the nest intersection",
                )
        state = (z, inter)
        if state in seen_states:
            return FixedPointReport(
                OUTCOME_VIOLATED, violated="SC2", counterexample=z, iterations=steps,
                note="restart loops without strict descent",
            )
        seen_states.add(state)
        for b in balls:
            if not chain or b < chain[-1]:
                chain.append(b)
        x = z


def _solve_gfpt2_presented(space, f, assign, budget, start, chooser):
    if chooser is None:
        raise UnsupportedModeError("presented mode needs an intersection chooser")
    if start is None:
        start = next(iter(space.points()))
    x = start
    steps = 0
    while steps < budget:
        steps += 1
        if f(x) == x:
            return FixedPointReport(OUTCOME_FOUND, witness=x, iterations=steps - 1,
                                    note="presented mode: membership probed, not enumerated")
        orbit = [x]
        while f(orbit[-1]) not in orbit and len(orbit) < budget:
            orbit.append(f(orbit[-1]))
        ids = [assign(p) for p in orbit]
        z = chooser(None, tuple(ids))
        if not all(space.membership(z, i) for i in ids):
            raise ContractViolationError(
                "intersection-chooser", f"{z!r} fails a membership probe on the nest"
            )
        if z == x:
            return FixedPointReport(OUTCOME_VIOLATED, violated="SC2", counterexample=z,
                                    iterations=steps, note="restart made no progress")
        x = z
    return FixedPointReport(OUTCOME_BUDGET, iterations=budget)


def is_spherically_complete(
    space,
    nests: Iterable | None = None,
    point_budget: int = 64,
    ball_budget: int = 256,
) -> SphericalVerdict:
    """Decide spherical completeness.

    Finite spaces are always complete: a finite nest contains its minimal
    ball, which is nonempty.  Presented spaces are judged per supplied nest;
    a nest whose probed balls exclude every probed point is reported as an
    incompleteness witness.  The ball budget must exceed the point budget,
    otherwise a strictly shrinking nest can never exclude the deepest probes.
    """
    if ball_budget <= point_budget:
        raise BudgetError("the ball budget must exceed the point budget")
    if isinstance(space, BallSpace):
        return SphericalVerdict(True, note="finite: every nest contains its nonempty minimum")
    if nests is None:
        raise UnsupportedModeError("presented mode needs a stream of nests to test")
    verdicts = []
    witness_nest = None
    for nest in nests:
        ids = list(itertools.islice(iter(nest), ball_budget))
        witness_point = None
        for p in itertools.islice(space.points(), point_budget):
            if all(space.membership(p, i) for i in ids):
                witness_point = p
                break
        verdicts.append(
            ConditionCheck(
                f"nest[{len(verdicts)}]",
                witness_point is not None,
                witness=witness_point if witness_point is not None else ids[: min(4, len(ids))],
                note="probed point in every probed ball" if witness_point is not None
                else "every probed point is excluded by some probed ball",
            )
        )
        if witness_point is None and witness_nest is None:
            witness_nest = ids
    return SphericalVerdict(
        witness_nest is None,
        witness_nest=witness_nest,
        nest_verdicts=tuple(verdicts),
        note=f"probed {point_budget} points against {ball_budget} balls per nest",
    )


def naturals_tail_space() -> PresentedBallSpace:
    """Presented space on the naturals whose ball n is the upward tail {m : m >= n}."""
    return PresentedBallSpace(
        universe="naturals with upward tails",
        membership=lambda point, ball_id: point >= ball_id,
        ball_ids=itertools.count,
        points=itertools.count,
    )


def naturals_tail_nest() -> Iterator[int]:
    return itertools.count()


def preimage_space(f_map: Mapping, target: BallSpace) -> BallSpace:
    """Pull a ball space back along a map; every ball must have nonempty preimage."""
    domain = set(f_map)
    if not domain:
        raise DomainMismatchError("the map has empty domain")
    escapes = {v for v in f_map.values() if v not in target.points}
    if escapes:
        raise DomainMismatchError(f"map values {sorted(map(str, escapes))} miss the target space")
    preimages = []
    empty = []
    for b in target.balls:
        pre = frozenset(x for x in domain if f_map[x] in b)
        if not pre:
            empty.append(b)
        else:
            preimages.append(pre)
    if empty:
        raise EmptyPreimageError(empty)
    return BallSpace(frozenset(domain), tuple(preimages))


def preimage_nest(f_map: Mapping, nest: Nest) -> Nest:
    """Preimages of a nest, verified to form a nest with the order preserved."""
    chain = []
    empty = []
    for b in nest.chain:
        pre = frozenset(x for x in f_map if f_map[x] in b)
        if not pre:
            empty.append(b)
        chain.append(pre)
    if empty:
        raise EmptyPreimageError(empty)
    return Nest(tuple(chain), tag=f"preimage of {nest.tag}" if nest.tag else "preimage")


def completeness_transfer_check(f_map: Mapping, nest: Nest) -> bool:
    """Property helper: a point of the pulled-back intersection maps into every target ball.

    This is the transfer direction: completeness upstairs forces completeness
    downstairs, witnessed one nest at a time.
    """
    pre = preimage_nest(f_map, nest)
    inter = pre.intersection()
    if not inter:
        return False
    x = min(inter)
    return all(f_map[x] in b for b in nest.chain)


def cofinal_subnest(nest) -> Nest:
    """Re-sort a finite nest by reverse inclusion and drop duplicates.

    The intersection is asserted unchanged.
    """
    balls = list(nest.chain) if isinstance(nest, Nest) else [frozenset(b) for b in nest]
    if not balls:
        raise InvalidBallError("a nest must contain at least one ball")
    result = Nest.from_balls(set(balls), tag=getattr(nest, "tag", ""))
    original = balls[0]
    for b in balls[1:]:
        original = original & b
    if original != result.intersection():
        raise InternalCheckError("re-sorting a nest changed its intersection")
    return result
