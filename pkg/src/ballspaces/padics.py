"""Exact p-adic residue arithmetic at fixed precision, with Hensel lifting.

A :class:`PAdicInt` is an integer residue modulo p^N.  Its value
:class:`PAdicValue` is the exponent of p dividing it, written so that larger
exponents mean smaller values; the residue 0 sits below resolution and plays
the role of the zero value.  The lifting solver and its hypothesis checker
give the concrete instance of the orbit solver on the valuation ideal, the
set of residues divisible by p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import posets, ultrametric
from .core import BallAssignment, BallSpace, ConditionCheck, ConditionReport, SelfMap
from .errors import (
    DomainMismatchError,
    NonUnitDerivativeError,
    PreconditionError,
    UnsupportedModeError,
)

_PAIR_SWEEP_CAP = 10_000
_DEGREE_CAP = 16


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PAdicInt:
    """Residue modulo p^N with exact arithmetic."""

    p: int
    N: int
    residue: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise DomainMismatchError(f"{self.p} is not prime")
        if self.N < 1:
            raise DomainMismatchError("precision must be at least 1")
        object.__setattr__(self, "residue", self.residue % self.p**self.N)

    def _compat(self, other: "PAdicInt") -> None:
        if self.p != other.p or self.N != other.N:
            raise DomainMismatchError(
                f"mixed residue systems: {self.p}^{self.N} vs {other.p}^{other.N}"
            )

    def __add__(self, other):
        self._compat(other)
        return PAdicInt(self.p, self.N, self.residue + other.residue)

    def __sub__(self, other):
        self._compat(other)
        return PAdicInt(self.p, self.N, self.residue - other.residue)

    def __mul__(self, other):
        self._compat(other)
        return PAdicInt(self.p, self.N, self.residue * other.residue)

    def __neg__(self):
        return PAdicInt(self.p, self.N, -self.residue)

    def inverse(self) -> "PAdicInt":
        if self.residue % self.p == 0:
            raise NonUnitDerivativeError(f"{self.residue} is not a unit modulo {self.p}")
        return PAdicInt(self.p, self.N, pow(self.residue, -1, self.p**self.N))

    def valuation(self) -> "PAdicValue":
        if self.residue == 0:
            return PAdicValue(self.N, self.N)
        e = 0
        r = self.residue
        while r % self.p == 0:
            r //= self.p
            e += 1
        return PAdicValue(self.N, e)

    def in_ideal(self) -> bool:
        return self.residue % self.p == 0


@dataclass(frozen=True)
class PAdicValue:
    """Multiplicative value |p|^e; exponent N encodes below-resolution (zero).

    Larger exponents mean smaller values, so the order reverses exponents.
    Multiplication adds exponents and squaring doubles them, both capped at N.
    """

    N: int
    exponent: int

    def __post_init__(self):
        if not 0 <= self.exponent <= self.N:
            raise DomainMismatchError("value exponent out of range")

    def _compat(self, other):
        if self.N != other.N:
            raise DomainMismatchError("values carry different precisions")

    @property
    def is_below_resolution(self) -> bool:
        return self.exponent == self.N

    def leq(self, other: "PAdicValue") -> bool:
        self._compat(other)
        return self.exponent >= other.exponent

    def lt(self, other: "PAdicValue") -> bool:
        return self.leq(other) and self.exponent != other.exponent

    def times(self, other: "PAdicValue") -> "PAdicValue":
        self._compat(other)
        return PAdicValue(self.N, min(self.exponent + other.exponent, self.N))

    def squared(self) -> "PAdicValue":
        return self.times(self)


def padic_dist(a: PAdicInt, b: PAdicInt) -> PAdicValue:
    """Value of the difference; equal residues land below resolution."""
    a._compat(b)
    return (a - b).valuation()


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial over one residue system, degree capped for desk scale."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise PreconditionError("a polynomial needs at least one coefficient")
        p, n = coeffs[0].p, coeffs[0].N
        for c in coeffs:
            if c.p != p or c.N != n:
                raise DomainMismatchError("mixed residue systems in one polynomial")
        while len(coeffs) > 1 and coeffs[-1].residue == 0:
            coeffs = coeffs[:-1]
        if len(coeffs) - 1 > _DEGREE_CAP:
            raise PreconditionError(f"degree is capped at {_DEGREE_CAP}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_ints(cls, ints: Sequence[int], p: int, N: int) -> "Polynomial":
        return cls(tuple(PAdicInt(p, N, c) for c in ints))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, x: PAdicInt) -> PAdicInt:
        acc = PAdicInt(x.p, x.N, 0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        p, n = self.coeffs[0].p, self.coeffs[0].N
        if self.degree == 0:
            return Polynomial((PAdicInt(p, n, 0),))
        return Polynomial(
            tuple(PAdicInt(p, n, k * c.residue) for k, c in enumerate(self.coeffs) if k >= 1)
        )


def newton_map(P: Polynomial, x: PAdicInt) -> PAdicInt:
    """One update step x - P(x) / P'(x); the derivative must be a unit."""
    d = P.derivative().eval(x)
    if d.residue % d.p == 0:
        raise NonUnitDerivativeError(
            f"P'({x.residue}) = {d.residue} is not a unit modulo {d.p}"
        )
    return x - P.eval(x) * d.inverse()


def _as_table(f, p: int, N: int) -> dict:
    ideal = range(0, p**N, p)
    if callable(f) and not isinstance(f, Mapping):
        table = {x: f(x) for x in ideal}
    else:
        table = {x: f[x] for x in ideal}
    for x, fx in table.items():
        if not isinstance(fx, int) or not 0 <= fx < p**N or fx % p != 0:
            raise DomainMismatchError(
                f"f({x}) = {fx!r} leaves the ideal of multiples of {p} modulo {p}^{N}"
            )
    return table


def check_fptcbs_hypotheses(f, p: int, N: int) -> ConditionReport:
    """Hypotheses of the stagewise fixed-point theorem, on the valuation ideal.

    The map must be contracting on all pairs (exhaustive, capped at
    p^N <= 10^4) and every non-fixed x must reach, within its orbit cycle,
    a step whose value is at most the squared value of the first step
    (exponent doubling, capped at the precision).
    """
    if p**N > _PAIR_SWEEP_CAP:
        raise UnsupportedModeError(f"exhaustive pair sweep is capped at p^N <= {_PAIR_SWEEP_CAP}")
    table = _as_table(f, p, N)
    ideal = sorted(table)
    mk = lambda r: PAdicInt(p, N, r)
    contract_witness = None
    for i, x in enumerate(ideal):
        for y in ideal[i + 1 :]:
            if not padic_dist(mk(table[x]), mk(table[y])).leq(padic_dist(mk(x), mk(y))):
                contract_witness = (x, y)
                break
        if contract_witness:
            break
    drop_witness = None
    drops = {}
    for x in ideal:
        if table[x] == x:
            continue
        target = padic_dist(mk(x), mk(table[x])).squared()
        j = 0
        cur = x
        seen = set()
        found = None
        while cur not in seen:
            seen.add(cur)
            nxt = table[cur]
            if padic_dist(mk(cur), mk(nxt)).leq(target):
                found = j
                break
            cur = nxt
            j += 1
        if found is None:
            drop_witness = x
            break
        drops[x] = found
    return ConditionReport(
        (
            ConditionCheck("contracting", contract_witness is None, witness=contract_witness),
            ConditionCheck(
                "squared-step-drop",
                drop_witness is None,
                witness=drop_witness if drop_witness is not None else drops,
                note="witness maps each non-fixed start to its step index" if drop_witness is None else "",
            ),
        )
    )


@dataclass(frozen=True)
class HenselResult:
    root: PAdicInt
    trace: tuple  # (precision, residue) per stage


def hensel_lift(coeffs: Sequence[int], x0: int, p: int, N: int) -> HenselResult:
    """Lift a simple root modulo p to a root modulo p^N, doubling the precision.

    Requires P(x0) = 0 mod p and P'(x0) a unit mod p.  The returned trace
    lists the residue at each working precision 1, 2, 4, ... capped at N; the
    final residue satisfies P(root) = 0 mod p^N and is the unique root
    congruent to x0 modulo p.
    """
    if not _is_prime(p):
        raise DomainMismatchError(f"{p} is not prime")
    if N < 1:
        raise PreconditionError("target precision must be at least 1")
    if Polynomial.from_ints(coeffs, p, 1).eval(PAdicInt(p, 1, x0)).residue != 0:
        raise PreconditionError(f"{x0} is not a root modulo {p}")
    d1 = Polynomial.from_ints(coeffs, p, 1).derivative().eval(PAdicInt(p, 1, x0))
    if d1.residue == 0:
        raise NonUnitDerivativeError(f"P'({x0}) vanishes modulo {p}")
    precisions = [1]
    while precisions[-1] < N:
        precisions.append(min(2 * precisions[-1], N))
    x = x0 % p
    trace = [(1, x)]
    for k in precisions[1:]:
        poly = Polynomial.from_ints(coeffs, p, k)
        x = newton_map(poly, PAdicInt(p, k, x)).residue
        trace.append((k, x))
    root = PAdicInt(p, N, x)
    if Polynomial.from_ints(coeffs, p, N).eval(root).residue != 0:
        raise PreconditionError("lifting did not converge to a root at the target precision")
    return HenselResult(root=root, trace=tuple(trace))


def is_distinguished_nest(pairs: Sequence[tuple], p: int, N: int) -> bool:
    """Every generator pair must be beaten by one whose value is at most its square."""
    balls = []
    for x, y in pairs:
        x._compat(y)
        if x.p != p or x.N != N:
            raise DomainMismatchError("nest pairs carry the wrong residue system")
        if not (x.in_ideal() and y.in_ideal()):
            raise PreconditionError("nest generators must lie in the valuation ideal")
        balls.append(padic_dist(x, y))
    return all(any(w.leq(v.squared()) for w in balls) for v in balls)


def check_cbs_equivalence(p: int, N: int, nests: Sequence) -> ConditionReport:
    """Nonempty intersection for each sample nest, the finite-precision shadow
    of completeness by stages.

    Each nest is a sequence of generator pairs; its balls are residue classes
    and a common residue is produced as the witness.
    """
    if not nests:
        raise PreconditionError("at least one sample nest is required")
    checks = []
    for idx, pairs in enumerate(nests):
        distinguished = is_distinguished_nest(pairs, p, N)
        classes = []
        for x, y in pairs:
            e = padic_dist(x, y).exponent
            classes.append((x.residue % p**e, e))
        deep_res, deep_e = max(classes, key=lambda c: c[1])
        compatible = all(deep_res % p**e == r for r, e in classes)
        checks.append(
            ConditionCheck(
                f"nest[{idx}]",
                distinguished and compatible,
                witness=(deep_res, deep_e),
                note=f"intersection contains the class {deep_res} mod {p}^{deep_e}"
                if compatible
                else "residue classes are inconsistent, not a nest",
            )
        )
    return ConditionReport(tuple(checks))


def residue_value_chain(p: int, N: int) -> posets.ValuePoset:
    """Chain of value names |p|^N < ... < |p|^0 with the below-resolution bottom."""
    names = [f"|{p}|^{e}" for e in range(N, -1, -1)]
    return posets.chain(names)


def residue_space(p: int, N: int, *, ideal_only: bool = False) -> ultrametric.UltrametricSpace:
    """Ultrametric space of residues mod p^N (or just the ideal) under the value chain."""
    if p**N > 100_000:
        raise UnsupportedModeError("residue space construction is capped at p^N <= 1e5")
    residues = list(range(0, p**N, p)) if ideal_only else list(range(p**N))
    points = [str(r) for r in residues]
    values = residue_value_chain(p, N)
    modulus = p**N

    def exponent(delta: int) -> int:
        delta %= modulus
        if delta == 0:
            return N
        e = 0
        while delta % p == 0:
            delta //= p
            e += 1
        return e

    distances = {}
    for i, a in enumerate(residues):
        for b in residues[i + 1 :]:
            distances[(str(a), str(b))] = f"|{p}|^{exponent(a - b)}"
    return ultrametric.UltrametricSpace(points, values, distances)


def induced_ideal_ball_space(f, p: int, N: int) -> tuple:
    """Finite ball space on the valuation ideal with the orbit balls B(x, fx).

    Returns (space, map, assignment) ready for the core orbit solver.
    """
    table = _as_table(f, p, N)
    ideal = sorted(table)
    mk = lambda r: PAdicInt(p, N, r)
    members = {}
    for x in ideal:
        e = padic_dist(mk(x), mk(table[x])).exponent
        members[x] = frozenset(str(z) for z in ideal if (x - z) % p**e == 0)
    points = frozenset(str(x) for x in ideal)
    assignment = BallAssignment({str(x): members[x] for x in ideal})
    space = BallSpace(points, tuple(set(members.values())))
    self_map = SelfMap({str(x): str(table[x]) for x in ideal})
    return space, self_map, assignment
