"""Contraction iteration over exact rational vectors in the max metric.

The orbit ball of a point has radius d(x, fx) / (1 - C); every inequality
the construction rests on is decidable in exact rational arithmetic, so the
checks below either hold exactly or produce a concrete witness.  The solver
does not assume the ambient space is complete: it terminates by tolerance and
hands back a certificate ball that provably contains the true fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .core import ConditionCheck, ConditionReport
from .errors import (
    BudgetError,
    ContractionBoundError,
    DomainMismatchError,
    NotAFixedPointError,
    PreconditionError,
)

RationalPoint = tuple  # coordinate vector of Fractions

MODE_STRICT = "strict"
MODE_ORBIT = "contracting-plus-orbit-strict"


def rational_point(*coords) -> RationalPoint:
    return tuple(Fraction(c) for c in coords)


def chebyshev(u: RationalPoint, v: RationalPoint) -> Fraction:
    if len(u) != len(v):
        raise DomainMismatchError("points have different dimensions")
    return max(abs(a - b) for a, b in zip(u, v))


@dataclass(frozen=True)
class MetricBall:
    """Closed max-metric ball with exact rational center and radius."""

    center: RationalPoint
    radius: Fraction

    def __post_init__(self):
        if self.radius < 0:
            raise PreconditionError("radius must be nonnegative")
        object.__setattr__(self, "center", tuple(Fraction(c) for c in self.center))
        object.__setattr__(self, "radius", Fraction(self.radius))

    def contains(self, point: RationalPoint) -> bool:
        return chebyshev(self.center, point) <= self.radius

    def contains_ball(self, other: "MetricBall") -> bool:
        # exact for boxes: per-coordinate interval containment
        return chebyshev(self.center, other.center) + other.radius <= self.radius


@dataclass(frozen=True, eq=False)
class ContractionSpec:
    """A self-map with a declared contraction constant 0 < C < 1."""

    f: Callable
    C: Fraction
    mode: str = MODE_ORBIT

    def __post_init__(self):
        object.__setattr__(self, "C", Fraction(self.C))
        if not 0 < self.C < 1:
            raise PreconditionError("the contraction constant must satisfy 0 < C < 1")
        if self.mode not in (MODE_STRICT, MODE_ORBIT):
            raise PreconditionError(f"unknown mode {self.mode!r}")


def orbit_ball(spec: ContractionSpec, x: RationalPoint) -> MetricBall:
    """Ball around x of radius d(x, fx) / (1 - C); it traps the whole orbit."""
    x = tuple(Fraction(c) for c in x)
    return MetricBall(x, chebyshev(x, spec.f(x)) / (1 - spec.C))


def strict_drop_index(C: Fraction) -> int:
    """Smallest i >= 1 with C^i / (1 - C) < 1/2, decided exactly."""
    i = 1
    power = C
    while power / (1 - C) >= Fraction(1, 2):
        i += 1
        power *= C
    return i


def verify_banach_sc(spec: ContractionSpec, x0: RationalPoint, length: int) -> ConditionReport:
    """Exact inequality suite along one orbit.

    Checks, per step: the observed ratio stays within C (a breach raises a
    contraction-bound error naming the step); adjacent images contract;
    x sits in its own ball; the next orbit ball nests inside the current one
    via the sufficient criterion d(x, fx) + radius(B_fx) <= radius(B_x); and
    the strict-drop index i with C^i / (1 - C) < 1/2 certifies a proper
    shrink when it falls inside the orbit.
    """
    if length < 2:
        raise PreconditionError("orbit length must be at least 2")
    x0 = tuple(Fraction(c) for c in x0)
    orbit = [x0]
    for _ in range(length):
        orbit.append(spec.f(orbit[-1]))
    dists = [chebyshev(a, b) for a, b in zip(orbit, orbit[1:])]
    for i in range(len(dists) - 1):
        if dists[i + 1] > spec.C * dists[i]:
            raise ContractionBoundError(
                i, f"observed step ratio exceeds the declared constant {spec.C}"
            )
    pair_witness = None
    for i in range(length):
        for j in range(i + 1, length):
            if chebyshev(orbit[i + 1], orbit[j + 1]) > chebyshev(orbit[i], orbit[j]):
                pair_witness = (i, j)
                break
        if pair_witness:
            break
    checks = [
        ConditionCheck("contracting-on-orbit-pairs", pair_witness is None, witness=pair_witness)
    ]
    balls = [orbit_ball(spec, p) for p in orbit]
    sc1_witness = next((i for i, p in enumerate(orbit) if not balls[i].contains(p)), None)
    checks.append(ConditionCheck("SC1", sc1_witness is None, witness=sc1_witness))
    sc2_witness = next(
        (
            i
            for i in range(length)
            if dists[i] + balls[i + 1].radius > balls[i].radius
        ),
        None,
    )
    checks.append(
        ConditionCheck("SC2-nesting", sc2_witness is None, witness=sc2_witness,
                       note="d(x, fx) + radius(B_fx) <= radius(B_x), exactly")
    )
    i_star = strict_drop_index(spec.C)
    if dists[0] > 0 and i_star < len(balls):
        proper = balls[i_star].radius < dists[0] / 2
        checks.append(
            ConditionCheck("strict-drop", proper, witness=i_star,
                           note=f"radius(B_(f^{i_star} x)) < d(x, fx)/2")
        )
    else:
        checks.append(
            ConditionCheck("strict-drop", True, witness=i_star,
                           note="drop index lies beyond the inspected orbit" if dists[0] > 0
                           else "start is already fixed")
        )
    return ConditionReport(tuple(checks))


@dataclass(frozen=True)
class BanachResult:
    point: RationalPoint
    certificate: MetricBall
    iterations: int
    step_distances: tuple


def solve_banach(
    spec: ContractionSpec,
    x0: RationalPoint,
    epsilon: Fraction,
    budget: int = 100_000,
) -> BanachResult:
    """Iterate until d(x, fx) <= epsilon (1 - C); the certificate ball then has
    radius at most epsilon and contains the true fixed point."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    if budget <= 0:
        raise BudgetError("budget must be positive")
    threshold = epsilon * (1 - spec.C)
    x = tuple(Fraction(c) for c in x0)
    steps = []
    for i in range(budget):
        fx = spec.f(x)
        gap = chebyshev(x, fx)
        if gap <= threshold:
            return BanachResult(x, orbit_ball(spec, x), i, tuple(steps))
        steps.append(gap)
        x = fx
    raise BudgetError(f"tolerance not reached within {budget} iterations")


@dataclass(frozen=True)
class UniquenessVerdict:
    unique: bool
    reason: str
    witness: object = None


def check_uniqueness(spec: ContractionSpec, a: RationalPoint, b: RationalPoint) -> UniquenessVerdict:
    """Two claimed fixed points either coincide or contradict strictness."""
    if spec.mode != MODE_STRICT:
        raise PreconditionError("uniqueness needs the globally strict mode")
    a = tuple(Fraction(c) for c in a)
    b = tuple(Fraction(c) for c in b)
    for cand in (a, b):
        if spec.f(cand) != cand:
            raise NotAFixedPointError(f"{cand} is not fixed: f moves it to {spec.f(cand)}")
    if a == b:
        return UniquenessVerdict(True, "both candidates are the same fixed point")
    gap = chebyshev(a, b)
    return UniquenessVerdict(
        False,
        "distinct fixed points are impossible: d(fa, fb) = d(a, b) would have to "
        f"stay within C d(a, b) = {spec.C * gap}, below d(a, b) = {gap}",
        witness=(a, b, gap),
    )


@dataclass(frozen=True)
class AffineMap:
    """f(v) = A v + b over exact rationals; max-metric Lipschitz bound is the
    largest absolute row sum of A."""

    matrix: tuple
    offset: RationalPoint

    def __post_init__(self):
        rows = tuple(tuple(Fraction(a) for a in row) for row in self.matrix)
        off = tuple(Fraction(c) for c in self.offset)
        n = len(off)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DomainMismatchError("matrix and offset dimensions disagree")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "offset", off)

    def __call__(self, v: RationalPoint) -> RationalPoint:
        if len(v) != len(self.offset):
            raise DomainMismatchError("vector dimension mismatch")
        return tuple(
            sum(a * x for a, x in zip(row, v)) + c
            for row, c in zip(self.matrix, self.offset)
        )

    def lipschitz(self) -> Fraction:
        return max(sum(abs(a) for a in row) for row in self.matrix)

    def fixed_point(self) -> RationalPoint:
        """Exact solution of (I - A) v = b by Gaussian elimination."""
        n = len(self.offset)
        aug = [
            [Fraction(int(i == j)) - self.matrix[i][j] for j in range(n)] + [self.offset[i]]
            for i in range(n)
        ]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise PreconditionError("I - A is singular; the map has no unique fixed point")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [a * inv for a in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    factor = aug[r][col]
                    aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
        return tuple(aug[i][n] for i in range(n))
