"""Finite partially ordered value sets with a least element.

These posets carry the distance values of generalized ultrametric spaces.
The only queries the rest of the package needs are ``leq`` and
``comparable``; totally ordered value sets are just posets whose order
happens to be total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainMismatchError, OrderRelationError


def _closure(elements: Sequence[str], pairs: Iterable[tuple[str, str]]) -> frozenset:
    rel = {(e, e) for e in elements}
    rel.update((a, b) for a, b in pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return frozenset(rel)


@dataclass(frozen=True)
class ValuePoset:
    """Finite poset with bottom element; ``relation`` holds all pairs (a, b) with a <= b.

    The stored relation must already be reflexive and transitive; use
    :meth:`from_pairs` with ``close=True`` to build one from a sparse pair list.
    Construction rejects anything that is not a partial order, and rejects a
    bottom element that does not sit below every other element.
    """

    elements: tuple[str, ...]
    relation: frozenset
    bottom: str

    def __post_init__(self):
        elems = tuple(self.elements)
        if len(set(elems)) != len(elems) or not elems:
            raise OrderRelationError("elements must be nonempty and distinct")
        eset = set(elems)
        if self.bottom not in eset:
            raise OrderRelationError(f"bottom {self.bottom!r} is not an element")
        for a, b in self.relation:
            if a not in eset or b not in eset:
                raise OrderRelationError(f"relation pair ({a!r}, {b!r}) leaves the element set")
        for e in elems:
            if (e, e) not in self.relation:
                raise OrderRelationError(f"relation is not reflexive at {e!r}")
        for a, b in self.relation:
            if (b, a) in self.relation and a != b:
                raise OrderRelationError(f"antisymmetry fails on {a!r}, {b!r}")
            for c in elems:
                if (b, c) in self.relation and (a, c) not in self.relation:
                    raise OrderRelationError(f"transitivity fails on {a!r} <= {b!r} <= {c!r}")
        for e in elems:
            if (self.bottom, e) not in self.relation:
                raise OrderRelationError(f"bottom {self.bottom!r} is not below {e!r}")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def from_pairs(cls, elements, pairs, bottom, *, close: bool = False) -> "ValuePoset":
        elements = tuple(elements)
        pairs = [(a, b) for a, b in pairs]
        rel = _closure(elements, pairs) if close else frozenset(pairs) | frozenset((e, e) for e in elements)
        return cls(elements, rel, bottom)

    def value(self, name: str) -> "PosetValue":
        return PosetValue(self, name)

    def leq_ids(self, a: str, b: str) -> bool:
        return (a, b) in self.relation

    @property
    def is_total(self) -> bool:
        return all(
            self.leq_ids(a, b) or self.leq_ids(b, a)
            for a in self.elements
            for b in self.elements
        )


@dataclass(frozen=True)
class PosetValue:
    """One value of a :class:`ValuePoset`."""

    poset: ValuePoset
    id: str

    def __post_init__(self):
        if self.id not in self.poset.elements:
            raise OrderRelationError(f"{self.id!r} is not an element of the poset")

    @property
    def is_bottom(self) -> bool:
        return self.id == self.poset.bottom


def _same_poset(a: PosetValue, b: PosetValue) -> None:
    if a.poset != b.poset:
        raise DomainMismatchError("values belong to different posets")


def leq(a: PosetValue, b: PosetValue) -> bool:
    """a <= b in the shared poset."""
    _same_poset(a, b)
    return a.poset.leq_ids(a.id, b.id)


def lt(a: PosetValue, b: PosetValue) -> bool:
    return leq(a, b) and a.id != b.id


def comparable(a: PosetValue, b: PosetValue) -> bool:
    """True when the two values are related in either direction."""
    return leq(a, b) or leq(b, a)


def chain(names: Sequence[str]) -> ValuePoset:
    """Total order with the listed names ranked from bottom upward."""
    names = tuple(names)
    pairs = [(names[i], names[j]) for i in range(len(names)) for j in range(i, len(names))]
    return ValuePoset.from_pairs(names, pairs, names[0])


def trivial() -> ValuePoset:
    return chain(("0",))


def pair_id(a: str, b: str) -> str:
    return f"({a},{b})"


def product_poset(p: ValuePoset, q: ValuePoset) -> ValuePoset:
    """Componentwise order on pairs; bottom is the pair of bottoms."""
    elements = [pair_id(a, b) for a in p.elements for b in q.elements]
    pairs = [
        (pair_id(a1, b1), pair_id(a2, b2))
        for a1 in p.elements
        for b1 in q.elements
        for a2 in p.elements
        for b2 in q.elements
        if p.leq_ids(a1, a2) and q.leq_ids(b1, b2)
    ]
    return ValuePoset.from_pairs(elements, pairs, pair_id(p.bottom, q.bottom))
