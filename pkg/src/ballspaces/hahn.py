"""Truncated formal power series over exact rationals, as an ordered field.

A series is a finite sum of terms c * t^k with rational c and integer k,
where t is a positive infinitesimal: larger exponents are smaller in absolute
size, and the total order is decided by the sign of the coefficient at the
smallest exponent.  The leading exponent is the natural value of a series;
order balls, valuation balls, and hybrid balls are all built on top of these
two orders.  Exponent supports stay in the integers and all coefficient
arithmetic is exact.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .core import ConditionCheck, ConditionReport
from .errors import (
    BudgetError,
    ContractionBoundError,
    DomainMismatchError,
    InvalidBallError,
    PreconditionError,
)

DEFAULT_TRUNCATION = 32


@dataclass(frozen=True)
class HahnSeries:
    """Finitely supported series; ``terms`` holds (exponent, coefficient)
    pairs sorted by ascending exponent with no zero coefficients."""

    terms: tuple

    def __post_init__(self):
        merged: dict = {}
        for e, c in self.terms:
            if not isinstance(e, int):
                raise DomainMismatchError("exponents must be integers")
            c = Fraction(c)
            merged[e] = merged.get(e, Fraction(0)) + c
        cleaned = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def zero(cls) -> "HahnSeries":
        return cls(())

    @classmethod
    def constant(cls, q) -> "HahnSeries":
        return cls(((0, Fraction(q)),))

    @classmethod
    def t(cls, exponent: int = 1, coeff=1) -> "HahnSeries":
        return cls(((exponent, Fraction(coeff)),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def leading(self) -> tuple | None:
        return self.terms[0] if self.terms else None

    def coefficient(self, exponent: int) -> Fraction:
        for e, c in self.terms:
            if e == exponent:
                return c
        return Fraction(0)

    def support(self) -> tuple:
        return tuple(e for e, _ in self.terms)

    def __add__(self, other: "HahnSeries") -> "HahnSeries":
        return HahnSeries(self.terms + other.terms)

    def __sub__(self, other: "HahnSeries") -> "HahnSeries":
        return self + (-other)

    def __neg__(self) -> "HahnSeries":
        return HahnSeries(tuple((e, -c) for e, c in self.terms))

    def __mul__(self, other):
        if isinstance(other, HahnSeries):
            return HahnSeries(
                tuple(
                    (e1 + e2, c1 * c2)
                    for e1, c1 in self.terms
                    for e2, c2 in other.terms
                )
            )
        return HahnSeries(tuple((e, c * Fraction(other)) for e, c in self.terms))

    __rmul__ = __mul__

    def scaled(self, q) -> "HahnSeries":
        return self * Fraction(q)

    def truncate(self, bound: int) -> "HahnSeries":
        """Drop all terms with exponent above the bound."""
        return HahnSeries(tuple((e, c) for e, c in self.terms if e <= bound))

    def invert(self, bound: int = DEFAULT_TRUNCATION) -> "HahnSeries":
        """Multiplicative inverse, truncated at the exponent bound."""
        if self.is_zero:
            raise PreconditionError("the zero series has no inverse")
        e0, c0 = self.terms[0]
        head = HahnSeries(((e0, c0),))
        tail = (self - head) * HahnSeries(((-e0, 1 / c0),))
        # 1/(head (1 + tail)) = head^{-1} sum (-tail)^k
        acc = HahnSeries.constant(1)
        power = HahnSeries.constant(1)
        k = 0
        while not power.is_zero and k < 4 * (bound + abs(e0) + 1):
            power = (power * -tail).truncate(bound + abs(e0) + 1)
            acc = acc + power
            k += 1
        return (HahnSeries(((-e0, 1 / c0),)) * acc).truncate(bound)

    def sign(self) -> int:
        if not self.terms:
            return 0
        return 1 if self.terms[0][1] > 0 else -1

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self) -> "HahnSeries":
        return self if self.sign() >= 0 else -self

    def __repr__(self):
        return f"HahnSeries({format_series(self)!r})"


_TERM_RE = re.compile(
    r"^\s*(?P<coeff>[+-]?\d+(?:/\d+)?|[+-])?\s*(?P<t>t(?:\^(?P<exp>-?\d+))?)?\s*$"
)


def parse_series(text: str) -> HahnSeries:
    """Parse literals such as ``3/2 + 2t^1 - 1/4t^3`` (a bare ``t`` means t^1)."""
    text = text.strip()
    if not text or text == "0":
        return HahnSeries.zero()
    chunks = re.split(r"(?=[+-])", text.replace(" ", ""))
    terms = []
    for chunk in chunks:
        if not chunk:
            continue
        m = _TERM_RE.match(chunk)
        if not m or (m.group("coeff") is None and m.group("t") is None):
            raise PreconditionError(f"cannot parse series term {chunk!r}")
        coeff_text = m.group("coeff")
        if coeff_text in (None, "+", "-"):
            coeff = Fraction(-1 if coeff_text == "-" else 1)
        else:
            coeff = Fraction(coeff_text)
        exponent = 0
        if m.group("t"):
            exponent = int(m.group("exp")) if m.group("exp") else 1
        terms.append((exponent, coeff))
    return HahnSeries(tuple(terms))


def format_series(s: HahnSeries) -> str:
    if s.is_zero:
        return "0"
    parts = []
    for e, c in s.terms:
        body = str(c) if e == 0 else (f"{c}t^{e}" if abs(c) != 1 else f"{'-' if c < 0 else ''}t^{e}")
        parts.append(body)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


@dataclass(frozen=True)
class NaturalValue:
    """Archimedean class of a series: its leading exponent, or bottom for zero.

    The order runs opposite to exponents (smaller exponent means larger
    element, hence larger value) and bottom sits below everything.
    """

    exponent: int | None  # None encodes the value of zero

    @property
    def is_bottom(self) -> bool:
        return self.exponent is None

    def leq(self, other: "NaturalValue") -> bool:
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        return self.exponent >= other.exponent

    def lt(self, other: "NaturalValue") -> bool:
        return self.leq(other) and self != other

    def times(self, other: "NaturalValue") -> "NaturalValue":
        if self.is_bottom or other.is_bottom:
            return NaturalValue(None)
        return NaturalValue(self.exponent + other.exponent)


def natural_valuation(a: HahnSeries) -> NaturalValue:
    """Leading exponent of a nonzero series; bottom for zero."""
    lead = a.leading()
    return NaturalValue(None if lead is None else lead[0])


def archimedean_equivalent(a: HahnSeries, b: HahnSeries) -> bool:
    return natural_valuation(a) == natural_valuation(b)


def infinitesimally_smaller(a: HahnSeries, b: HahnSeries) -> bool:
    """a << b: every integer multiple of |a| stays below |b|."""
    return natural_valuation(a).lt(natural_valuation(b))


@dataclass(frozen=True)
class OrderBall:
    """B_o(g; r) = {z : |g - z| <= r} in the series order."""

    center: HahnSeries
    radius: HahnSeries

    def __post_init__(self):
        if self.radius.sign() < 0:
            raise InvalidBallError("order-ball radius must be nonnegative")

    def contains(self, z: HahnSeries) -> bool:
        return abs(self.center - z) <= self.radius


def order_ball_contains(ball: OrderBall, z: HahnSeries) -> bool:
    return ball.contains(z)


@dataclass(frozen=True)
class UmSeriesBall:
    """Valuation ball B_u(x, y) = {z : v(x - z) <= v(x - y)}."""

    x: HahnSeries
    y: HahnSeries

    def contains(self, z: HahnSeries) -> bool:
        return natural_valuation(self.x - z).leq(natural_valuation(self.x - self.y))

    def contains_ball(self, other: "UmSeriesBall") -> bool:
        # the two-condition criterion; decidable because the value order is total
        return self.contains(other.x) and natural_valuation(other.x - other.y).leq(
            natural_valuation(self.x - self.y)
        )


@dataclass(frozen=True)
class HybridBall:
    """Either a valuation ball or an order ball with rational center and radius."""

    kind: str  # "ultrametric" | "rational-order"
    um: UmSeriesBall | None = None
    center: Fraction | None = None
    radius: Fraction | None = None

    def __post_init__(self):
        if self.kind == "ultrametric":
            if self.um is None:
                raise InvalidBallError("ultrametric arm needs a valuation ball")
        elif self.kind == "rational-order":
            if self.center is None or self.radius is None or Fraction(self.radius) <= 0:
                raise InvalidBallError("rational-order arm needs center and positive radius")
            object.__setattr__(self, "center", Fraction(self.center))
            object.__setattr__(self, "radius", Fraction(self.radius))
        else:
            raise InvalidBallError(f"unknown hybrid arm {self.kind!r}")

    def contains(self, z: HahnSeries) -> bool:
        if self.kind == "ultrametric":
            return self.um.contains(z)
        ball = OrderBall(HahnSeries.constant(self.center), HahnSeries.constant(self.radius))
        return ball.contains(z)


@dataclass(frozen=True)
class OagResult:
    outcome: str  # "fixed-point" | "value-passed-bound" | "budget-exhausted"
    point: HahnSeries
    steps: int
    restarts: int
    gap_exponents: tuple  # leading exponent of |x - fx| after each accepted step


def _aitken(a: HahnSeries, b: HahnSeries, c: HahnSeries) -> HahnSeries | None:
    """Coefficientwise geometric extrapolation of three consecutive iterates."""
    exponents = sorted(set(a.support()) | set(b.support()) | set(c.support()))
    terms = []
    for e in exponents:
        ca, cb, cc = a.coefficient(e), b.coefficient(e), c.coefficient(e)
        d1 = cb - ca
        d2 = cc - 2 * cb + ca
        if d2 == 0:
            if d1 != 0:
                return None
            value = ca
        else:
            value = ca - d1 * d1 / d2
        terms.append((e, value))
    return HahnSeries(tuple(terms))


def solve_oag(
    f: Callable,
    ratio_num: int,
    ratio_den: int,
    x0: HahnSeries,
    drop_target: int | None = None,
    budget: int = 256,
    trunc: int = DEFAULT_TRUNCATION,
) -> OagResult:
    """Orbit iteration in the series group for maps that are o-contracting and
    strictly o-contracting on orbits with ratio m/n < 1.

    Both inequalities |fx - f2x| <= |x - fx| and n |fx - f2x| <= m |x - fx|
    are verified at every step taken; a breach raises a contraction-bound
    error.  When the orbit's gap keeps its leading exponent while the
    coefficients shrink geometrically, the limit at that level is extrapolated
    coefficientwise and accepted only if it is an exact fixed point or its own
    gap sits in a strictly smaller archimedean class, which is exactly the
    strict value drop the restart must deliver.  The run ends with an exact
    fixed point, or with a certificate that the gap's value passed the drop
    target (default: the truncation bound).
    """
    if not (0 < ratio_num < ratio_den):
        raise PreconditionError("the ratio m/n must satisfy 0 < m < n")
    if budget <= 0:
        raise BudgetError("budget must be positive")
    target = trunc if drop_target is None else drop_target
    x = x0.truncate(trunc)
    window: list[HahnSeries] = []
    exponents: list[int] = []
    restarts = 0
    prev_gap: HahnSeries | None = None
    for step in range(1, budget + 1):
        fx = f(x).truncate(trunc)
        gap = abs(x - fx)
        if gap.is_zero:
            return OagResult("fixed-point", x, step, restarts, tuple(exponents))
        lead_e = gap.leading()[0]
        exponents.append(lead_e)
        if lead_e > target:
            return OagResult("value-passed-bound", x, step, restarts, tuple(exponents))
        if prev_gap is not None:
            if not gap <= prev_gap:
                raise ContractionBoundError(step, "|fx - f2x| exceeds |x - fx|")
            if not ratio_den * gap <= ratio_num * prev_gap:
                raise ContractionBoundError(
                    step, f"n |fx - f2x| <= m |x - fx| fails for m/n = {ratio_num}/{ratio_den}"
                )
        window.append(x)
        if len(window) >= 3:
            guess = _aitken(window[-3], window[-2], window[-1])
            if guess is not None:
                guess = guess.truncate(trunc)
                g_gap = abs(guess - f(guess).truncate(trunc))
                if g_gap.is_zero:
                    return OagResult("fixed-point", guess, step, restarts + 1, tuple(exponents))
                if g_gap.leading()[0] > lead_e:
                    x = guess
                    restarts += 1
                    window.clear()
                    prev_gap = None
                    continue
        prev_gap = gap
        x = fx
    return OagResult("budget-exhausted", x, budget, restarts, tuple(exponents))


@dataclass(frozen=True)
class ArchNestVerdict:
    outcome: str  # "complete" | "nonempty" | "empty-so-far"
    witness: object
    levels: int
    note: str = ""


def _dyadic(q: Fraction) -> bool:
    d = q.denominator
    while d % 2 == 0:
        d //= 2
    return d == 1


def check_asco(group: str, nest: Iterable, budget: int = 64) -> ArchNestVerdict:
    """Consume a nest of order balls in an archimedean group and classify it.

    Integer nests always stabilize: strict shrinking is bounded by the first
    width, so the verdict is complete with a witness point.  Rational and
    dyadic nests that keep shrinking past the budget are reported empty so
    far, with the last interval as the witness; a stream that ends is
    nonempty with a point of its final ball.
    """
    if group not in ("integers", "dyadic-rationals", "rationals"):
        raise PreconditionError(f"unsupported group tag {group!r}")
    it = iter(nest)
    lo = hi = None
    last = None
    levels = 0
    exhausted = False
    while levels < budget:
        try:
            center, radius = next(it)
        except StopIteration:
            exhausted = True
            break
        center, radius = Fraction(center), Fraction(radius)
        if radius < 0:
            raise InvalidBallError("order-ball radius must be nonnegative")
        if group == "integers" and (center.denominator != 1 or radius.denominator != 1):
            raise DomainMismatchError("integer nests need integer centers and radii")
        if group == "dyadic-rationals" and not (_dyadic(center) and _dyadic(radius)):
            raise DomainMismatchError("dyadic nests need dyadic centers and radii")
        new_lo, new_hi = center - radius, center + radius
        if lo is not None and (new_lo < lo or new_hi > hi):
            raise InvalidBallError("stream is not a nest: a ball escapes its predecessor")
        lo, hi = new_lo, new_hi
        last = (center, radius)
        levels += 1
    if last is None:
        raise PreconditionError("the nest stream yielded no balls")
    if group == "integers":
        note = "" if exhausted else "remaining strict descent is bounded by the final width"
        return ArchNestVerdict("complete", int(last[0]), levels, note=note)
    if exhausted:
        return ArchNestVerdict("nonempty", last[0], levels, note="stream ended; its minimal ball is nonempty")
    return ArchNestVerdict(
        "empty-so-far",
        (lo, hi, hi - lo),
        levels,
        note="no stabilization within budget; the witness interval keeps shrinking",
    )


def sqrt2_bisection_nest(depth: int) -> Iterator[tuple]:
    """Rational order balls closing in on the positive root of x^2 = 2."""
    lo, hi = Fraction(1), Fraction(2)
    for _ in range(depth):
        mid = (lo + hi) / 2
        if mid * mid < 2:
            lo = mid
        else:
            hi = mid
        yield ((lo + hi) / 2, (hi - lo) / 2)


def stabilizing_nest(point, depth: int, start_radius=Fraction(1)) -> Iterator[tuple]:
    """Nest of rational balls shrinking onto a rational point."""
    point = Fraction(point)
    radius = Fraction(start_radius)
    for _ in range(depth):
        yield (point, radius)
        radius /= 2


@dataclass(frozen=True)
class ScoscuReport:
    checks: tuple
    probes: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> ConditionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def scoscu_transfer(pairs: Sequence[tuple], probes: Sequence[HahnSeries] = ()) -> ScoscuReport:
    """Bridge a strictly descending valuation nest to an order nest.

    For generators (x_u, y_u) with strictly increasing leading exponents of
    x_u - y_u, the order balls B^u = B_o(x_{u+1}; |x_u - y_u|) must squeeze
    between consecutive valuation balls.  On a finite prefix the order-ball
    intersection is therefore sandwiched: it contains the full valuation
    intersection and sits inside the valuation intersection with the last
    ball dropped (exact equality belongs to the unbounded nests).  Both
    containments and the sandwich are checked on the supplied probes plus
    generated ones (centers, boundary points, and half-radius offsets).
    """
    if len(pairs) < 1:
        raise PreconditionError("the nest needs at least one generator pair")
    values = [natural_valuation(x - y) for x, y in pairs]
    for i, (v1, v2) in enumerate(zip(values, values[1:])):
        if not v2.lt(v1):
            raise PreconditionError(f"descent is not strict between stages {i} and {i + 1}")
    um_balls = [UmSeriesBall(x, y) for x, y in pairs]
    for i in range(len(um_balls) - 1):
        if not um_balls[i].contains_ball(um_balls[i + 1]):
            raise PreconditionError(f"the valuation balls do not nest at stage {i}")
    order_balls = [
        OrderBall(pairs[i + 1][0], abs(pairs[i][0] - pairs[i][1]))
        for i in range(len(pairs) - 1)
    ]
    probe_set = list(probes)
    for i, (x, y) in enumerate(pairs):
        probe_set.extend([x, y])
        if i + 1 < len(pairs):
            r = abs(pairs[i][0] - pairs[i][1])
            probe_set.extend(
                [pairs[i + 1][0] + r, pairs[i + 1][0] - r, pairs[i + 1][0] + r.scaled(Fraction(1, 2))]
            )
    inner_witness = None
    outer_witness = None
    for i, ob in enumerate(order_balls):
        for z in probe_set:
            if inner_witness is None and ob.contains(z) and not um_balls[i].contains(z):
                inner_witness = (i, z)
            if outer_witness is None and um_balls[i + 1].contains(z) and not ob.contains(z):
                outer_witness = (i, z)
    sandwich_witness = None
    if order_balls:
        for z in probe_set:
            in_order = all(ob.contains(z) for ob in order_balls)
            in_um_all = all(ub.contains(z) for ub in um_balls)
            in_um_head = all(ub.contains(z) for ub in um_balls[:-1])
            if (in_um_all and not in_order) or (in_order and not in_um_head):
                sandwich_witness = z
                break
    checks = (
        ConditionCheck("order-ball-inside-um-ball", inner_witness is None, witness=inner_witness),
        ConditionCheck("next-um-ball-inside-order-ball", outer_witness is None, witness=outer_witness),
        ConditionCheck(
            "intersection-sandwich",
            sandwich_witness is None,
            witness=sandwich_witness,
            note="full valuation intersection <= order intersection <= head valuation intersection",
        ),
    )
    return ScoscuReport(checks, tuple(probe_set))


@dataclass(frozen=True)
class HybridVerdict:
    outcome: str  # "nonempty" | "empty-so-far"
    cofinal_kind: str
    witness: HahnSeries | None
    interval: tuple | None
    levels: int
    note: str = ""


def check_hybrid(nest: Iterable, budget: int = 64) -> HybridVerdict:
    """Classify a hybrid nest by the arm that carries its tail and decide it.

    A nest drawn from a union of ball families always has a cofinal subnest
    inside one family; on a budgeted prefix the tail arm is the one past the
    other arm's last appearance.  Valuation tails intersect in the deepest
    center (truncated-series honesty); rational-order tails reduce to the
    archimedean interval check, where only stabilized streams produce a
    witness and shrinking streams stay empty-so-far, mirroring the fact that
    rational residues cannot pin an irrational point.
    """
    balls = []
    it = iter(nest)
    exhausted = False
    while len(balls) < budget:
        try:
            balls.append(next(it))
        except StopIteration:
            exhausted = True
            break
    if not balls:
        raise PreconditionError("the nest stream yielded no balls")
    last_kind = balls[-1].kind
    tail_start = 0
    for i, b in enumerate(balls):
        if b.kind != last_kind:
            tail_start = i + 1
    tail = balls[tail_start:]
    if last_kind == "ultrametric":
        for prev, nxt in zip(tail, tail[1:]):
            if not prev.um.contains_ball(nxt.um):
                raise InvalidBallError("valuation tail does not nest")
        witness = tail[-1].um.x
        for b in balls:
            if not b.contains(witness):
                return HybridVerdict(
                    "empty-so-far", last_kind, None, None, len(balls),
                    note="the deepest center already escapes an earlier ball",
                )
        return HybridVerdict(
            "nonempty", last_kind, witness, None, len(balls),
            note="deepest valuation center lies in every ball of the prefix"
            + ("" if exhausted else "; probed up to the budget"),
        )
    intervals = [(b.center - b.radius, b.center + b.radius) for b in tail]
    lo = max(i[0] for i in intervals)
    hi = min(i[1] for i in intervals)
    if lo > hi:
        raise InvalidBallError("rational-order tail does not nest")
    if exhausted:
        witness = HahnSeries.constant(tail[-1].center)
        if all(b.contains(witness) for b in balls):
            return HybridVerdict(
                "nonempty", last_kind, witness, (lo, hi), len(balls),
                note="stream ended; the final center lies in every ball",
            )
    return HybridVerdict(
        "empty-so-far", last_kind, None, (lo, hi), len(balls),
        note="rational-centered residues cannot stabilize within the budget",
    )
