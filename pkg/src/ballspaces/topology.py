"""Finite topological spaces and the closed-set fixed-point machinery.

Finite spaces are compact, so the nonempty closed sets form a spherically
complete ball space and the contracting-ball solvers apply as soon as every
invariant closed set contains (or is) an f-contracting closed subset.  The
J-contraction checks enumerate open covers outright; that is exponential and
meant for three or four points, which the sweep caps respect.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .core import (
    BallAssignment,
    BallSpace,
    ConditionCheck,
    ConditionReport,
    DEFAULT_BUDGET,
    FixedPointReport,
    SelfMap,
    solve_nfpt1,
    solve_nfpt2,
)
from .errors import InternalCheckError, InvalidBallError, PreconditionError


@dataclass(frozen=True)
class FiniteTopology:
    """Open-set family on a finite point set, validated at construction."""

    points: frozenset
    opens: frozenset

    def __post_init__(self):
        pts = frozenset(self.points)
        opens = frozenset(frozenset(o) for o in self.opens)
        if frozenset() not in opens or pts not in opens:
            raise InvalidBallError("the empty set and the whole set must be open")
        for a, b in itertools.combinations(opens, 2):
            if a | b not in opens:
                raise InvalidBallError(f"union of opens is not open: {sorted(a)} | {sorted(b)}")
            if a & b not in opens:
                raise InvalidBallError(f"intersection of opens is not open: {sorted(a)} & {sorted(b)}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "opens", opens)
        object.__setattr__(self, "_closed", frozenset(pts - o for o in opens))

    @property
    def closed_sets(self) -> frozenset:
        return self._closed

    def is_closed(self, subset) -> bool:
        return frozenset(subset) in self._closed

    def closure(self, subset) -> frozenset:
        s = frozenset(subset)
        return frozenset.intersection(*(c for c in self._closed if s <= c))

    def is_hausdorff(self) -> bool:
        for x, y in itertools.combinations(sorted(self.points), 2):
            if not any(
                x in u and y in v and not u & v
                for u in self.opens
                for v in self.opens
            ):
                return False
        return True

    def is_connected(self) -> bool:
        for o in self.opens:
            if o and o != self.points and (self.points - o) in self.opens:
                return False
        return True


class ClosedMap(SelfMap):
    """Self-map whose closed-set images are verified closed at construction."""

    def __init__(self, topology: FiniteTopology, mapping: Mapping):
        super().__init__(mapping)
        self.validate_on(topology.points)
        ok, witness = is_closed_map(topology, self)
        if not ok:
            raise PreconditionError(
                f"not a closed map: the image of {sorted(witness)} is not closed"
            )


def is_closed_map(topology: FiniteTopology, f: SelfMap) -> tuple:
    """Check f(B) closed for every closed B; returns (verdict, first witness)."""
    f.validate_on(topology.points)
    for b in sorted(topology.closed_sets, key=lambda s: (len(s), tuple(sorted(s)))):
        if b and not topology.is_closed(f.image(b)):
            return False, b
    return True, None


def _is_closed_contracting(topology: FiniteTopology, f: SelfMap, b: frozenset) -> bool:
    # f-contracting among closed sets: singleton fixed point or proper image
    if len(b) == 1:
        (x,) = b
        if f(x) == x:
            return True
    return f.image(b) < b


def invariant_closed_sets(topology: FiniteTopology, f: SelfMap) -> list:
    return [
        b
        for b in sorted(topology.closed_sets, key=lambda s: (len(s), tuple(sorted(s))))
        if b and f.image(b) <= b
    ]


@dataclass(frozen=True)
class TopnReport:
    verdict: str  # "strong" | "weak" | "fails"
    witness: frozenset | None = None
    invariant_count: int = 0


def check_topn_hypotheses(topology: FiniteTopology, f: SelfMap) -> TopnReport:
    """Classify the invariant closed sets.

    strong: every nonempty closed B with f(B) inside B is itself
    f-contracting.  weak: every such B contains a closed f-contracting
    subset.  fails: some invariant closed set contains none; it is returned
    as the witness.
    """
    invariant = invariant_closed_sets(topology, f)
    contracting_closed = [
        c for c in topology.closed_sets if c and _is_closed_contracting(topology, f, c)
    ]
    strong = all(_is_closed_contracting(topology, f, b) for b in invariant)
    if strong:
        return TopnReport("strong", invariant_count=len(invariant))
    for b in invariant:
        if not any(c <= b for c in contracting_closed):
            return TopnReport("fails", witness=b, invariant_count=len(invariant))
    return TopnReport("weak", invariant_count=len(invariant))


def closed_ball_space(topology: FiniteTopology) -> BallSpace:
    """Ball space of all nonempty closed sets."""
    return BallSpace(topology.points, tuple(c for c in topology.closed_sets if c))


def solve_topn(topology: FiniteTopology, f: SelfMap, budget: int = DEFAULT_BUDGET) -> FixedPointReport:
    """Fixed point through the closed-set ball space.

    Strong instances run the unique-descent solver and the scan confirms
    uniqueness; weak instances run the greedy descent.  When the hypothesis
    fails the delegate's violation report is passed through.
    """
    report = check_topn_hypotheses(topology, f)
    space = closed_ball_space(topology)
    if report.verdict == "strong":
        result = solve_nfpt2(space, f, budget=budget)
    else:
        result = solve_nfpt1(space, f, budget=budget)
    if report.verdict != "fails" and not result.found:
        raise InternalCheckError(
            f"{report.verdict} hypothesis holds but the delegate reported {result.outcome}"
        )
    if result.found:
        if f(result.witness) != result.witness:
            raise InternalCheckError("delegate returned a non-fixed witness")
        if report.verdict == "strong":
            others = [x for x in topology.points if f(x) == x and x != result.witness]
            if others:
                raise InternalCheckError(f"strong verdict but extra fixed points {others}")
    return result


def smallest_invariant_closed(topology: FiniteTopology, f: SelfMap, x) -> frozenset:
    """Intersection of every closed invariant set containing x; itself the
    smallest member of that family."""
    family = [b for b in topology.closed_sets if x in b and f.image(b) <= b]
    if not family:
        raise InternalCheckError("the whole set should always be closed and invariant")
    smallest = frozenset.intersection(*family)
    if not (x in smallest and f.image(smallest) <= smallest and topology.is_closed(smallest)):
        raise InternalCheckError("the intersection left the family it came from")
    return smallest


def invariant_closed_assignment(topology: FiniteTopology, f: SelfMap) -> BallAssignment:
    return BallAssignment(
        {x: smallest_invariant_closed(topology, f, x) for x in topology.points}
    )


def has_top3_hypothesis(topology: FiniteTopology, f: SelfMap) -> bool:
    """Every non-fixed x admits a closed B with x in B and x outside f(B) inside B."""
    for x in topology.points:
        if f(x) == x:
            continue
        if not any(
            x in b and x not in f.image(b) and f.image(b) <= b
            for b in topology.closed_sets
            if b
        ):
            return False
    return True


@dataclass(frozen=True)
class JContractionVerdict:
    holds: bool
    partial: bool
    witness: tuple | None = None
    covers_checked: int = 0


def _antichain_covers(topology: FiniteTopology) -> Iterator[tuple]:
    opens = sorted(
        (o for o in topology.opens if o), key=lambda s: (len(s), tuple(sorted(s)))
    )
    n = len(opens)
    for mask in range(1, 1 << n):
        family = [opens[i] for i in range(n) if mask >> i & 1]
        union = frozenset().union(*family)
        if union != topology.points:
            continue
        if any(a < b for a in family for b in family):
            continue
        yield tuple(family)


def check_j_contraction(topology: FiniteTopology, f: SelfMap, cover_cap: int | None = None) -> JContractionVerdict:
    """Search a J-contractive refinement for every open antichain cover.

    A refinement qualifies when each member's closure maps inside some member
    of the same refinement.  Redundant covers reduce to their maximal
    members, so antichains suffice.  A cap on the number of covers yields a
    partial verdict, labeled as such.
    """
    f.validate_on(topology.points)
    opens = sorted(
        (o for o in topology.opens if o), key=lambda s: (len(s), tuple(sorted(s)))
    )
    cap = cover_cap if cover_cap is not None else 1 << len(topology.opens)
    closures = {o: topology.closure(o) for o in opens}
    n = len(opens)
    refinement_pool = []
    for mask in range(1, 1 << n):
        family = tuple(opens[i] for i in range(n) if mask >> i & 1)
        if frozenset().union(*family) == topology.points:
            refinement_pool.append(family)
    checked = 0
    for cover in _antichain_covers(topology):
        if checked >= cap:
            return JContractionVerdict(True, partial=True, covers_checked=checked)
        checked += 1
        found = False
        for family in refinement_pool:
            if not all(any(v <= u for u in cover) for v in family):
                continue
            if all(any(f.image(closures[v]) <= w for w in family) for v in family):
                found = True
                break
        if not found:
            return JContractionVerdict(False, partial=False, witness=cover, covers_checked=checked)
    return JContractionVerdict(True, partial=False, covers_checked=checked)


def check_j_lemmas(topology: FiniteTopology, f: SelfMap) -> ConditionReport:
    """Restriction and surjectivity facts for J-contractions, with their
    preconditions (J-contraction, connected, Hausdorff) reported first.

    Finite spaces that are connected and Hausdorff are singletons, so the
    substantive cases degenerate; the report says so explicitly.
    """
    checks = []
    jc = check_j_contraction(topology, f)
    checks.append(ConditionCheck("precondition-j-contraction", jc.holds, witness=jc.witness))
    connected = topology.is_connected()
    checks.append(ConditionCheck("precondition-connected", connected))
    hausdorff = topology.is_hausdorff()
    checks.append(ConditionCheck("precondition-hausdorff", hausdorff))
    if not (jc.holds and connected and hausdorff):
        return ConditionReport(tuple(checks))
    checks.append(
        ConditionCheck(
            "degenerate-by-finiteness",
            len(topology.points) == 1,
            note="a finite connected Hausdorff space is a singleton",
        )
    )
    j1_witness = None
    for b in invariant_closed_sets(topology, f):
        sub_opens = frozenset(frozenset(o & b) for o in topology.opens)
        sub = FiniteTopology(b, sub_opens)
        restricted = SelfMap({x: f(x) for x in b})
        if not check_j_contraction(sub, restricted).holds:
            j1_witness = b
            break
    checks.append(ConditionCheck("J1-restriction", j1_witness is None, witness=j1_witness))
    onto = f.image(topology.points) == topology.points
    j2_ok = (not onto) or len(topology.points) == 1
    checks.append(ConditionCheck("J2-onto-forces-singleton", j2_ok))
    return ConditionReport(tuple(checks))


_POINT_NAMES = "abcdefgh"


def enumerate_topologies(n_points: int, up_to_homeo: bool = True) -> Iterator[FiniteTopology]:
    """All topologies on n points, by filtering union/intersection-closed
    open families; homeomorphic duplicates are dropped via a canonical form."""
    if n_points < 1 or n_points > 4:
        raise PreconditionError("topology enumeration is meant for 1 to 4 points")
    names = _POINT_NAMES[:n_points]
    pts = frozenset(names)
    proper = [
        frozenset(c)
        for k in range(1, n_points)
        for c in itertools.combinations(names, k)
    ]
    seen = set()
    for mask in range(1 << len(proper)):
        opens = {frozenset(), pts} | {proper[i] for i in range(len(proper)) if mask >> i & 1}
        if any(a | b not in opens or a & b not in opens for a, b in itertools.combinations(opens, 2)):
            continue
        if up_to_homeo:
            key = min(
                tuple(sorted(tuple(sorted(perm[p] for p in o)) for o in opens))
                for perm in (
                    dict(zip(names, image)) for image in itertools.permutations(names)
                )
            )
            if key in seen:
                continue
            seen.add(key)
        yield FiniteTopology(pts, frozenset(opens))


def closed_self_maps(topology: FiniteTopology) -> Iterator[SelfMap]:
    """All self-maps whose closed-set images stay closed, in a stable order."""
    names = sorted(topology.points)
    for image in itertools.product(names, repeat=len(names)):
        f = SelfMap(dict(zip(names, image)))
        if is_closed_map(topology, f)[0]:
            yield f
