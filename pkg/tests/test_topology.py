import itertools

import pytest

from ballspaces.core import SelfMap, check_sc_axioms, is_spherically_complete, solve_gfpt2
from ballspaces.errors import InvalidBallError, PreconditionError
from ballspaces.topology import (
    ClosedMap,
    FiniteTopology,
    check_j_contraction,
    check_j_lemmas,
    check_topn_hypotheses,
    closed_ball_space,
    closed_self_maps,
    enumerate_topologies,
    has_top3_hypothesis,
    invariant_closed_assignment,
    is_closed_map,
    smallest_invariant_closed,
    solve_topn,
)


def topo(points, *opens):
    return FiniteTopology(
        frozenset(points), frozenset(frozenset(o) for o in opens)
    )


@pytest.fixture
def sierpinski():
    # o is open, c is closed
    return topo("oc", "", "o", "oc")


@pytest.fixture
def discrete2():
    return topo("ab", "", "a", "b", "ab")


def test_topology_validation():
    with pytest.raises(InvalidBallError):
        topo("ab", "", "a")  # missing whole set
    with pytest.raises(InvalidBallError):
        topo("abc", "", "a", "b", "abc")  # union {a,b} missing


def test_closure(sierpinski):
    assert sierpinski.closure({"o"}) == frozenset("oc")
    assert sierpinski.closure({"c"}) == frozenset("c")


def test_is_closed_map(sierpinski, discrete2):
    assert is_closed_map(sierpinski, SelfMap({"o": "o", "c": "c"}))[0]
    ok, witness = is_closed_map(sierpinski, SelfMap({"o": "o", "c": "o"}))
    assert not ok and witness == frozenset("c")
    assert is_closed_map(sierpinski, SelfMap({"o": "c", "c": "c"}))[0]
    for image in itertools.product("ab", repeat=2):
        f = SelfMap(dict(zip("ab", image)))
        assert is_closed_map(discrete2, f)[0]


def test_closed_map_constructor(sierpinski):
    ClosedMap(sierpinski, {"o": "c", "c": "c"})
    with pytest.raises(PreconditionError):
        ClosedMap(sierpinski, {"o": "o", "c": "o"})


def test_topn_hypotheses(sierpinski, discrete2):
    drop = SelfMap({"o": "c", "c": "c"})
    assert check_topn_hypotheses(sierpinski, drop).verdict == "strong"

    ident = SelfMap({"a": "a", "b": "b"})
    assert check_topn_hypotheses(discrete2, ident).verdict == "weak"

    swap = SelfMap({"a": "b", "b": "a"})
    report = check_topn_hypotheses(discrete2, swap)
    assert report.verdict == "fails" and report.witness == frozenset("ab")


def test_solve_topn(sierpinski, discrete2):
    drop = SelfMap({"o": "c", "c": "c"})
    result = solve_topn(sierpinski, drop)
    assert result.found and result.witness == "c"

    single = topo("a", "", "a")
    assert solve_topn(single, SelfMap({"a": "a"})).found

    swap = SelfMap({"a": "b", "b": "a"})
    failed = solve_topn(discrete2, swap)
    assert failed.outcome == "hypothesis-violated"


def test_smallest_invariant_closed(sierpinski):
    drop = SelfMap({"o": "c", "c": "c"})
    assert smallest_invariant_closed(sierpinski, drop, "c") == frozenset("c")
    # the only closed set containing o is the whole space
    assert smallest_invariant_closed(sierpinski, drop, "o") == frozenset("oc")

    chain3 = topo("abc", "", "a", "ab", "abc", "b", "c", "bc", "ac")
    f = SelfMap({"a": "b", "b": "c", "c": "c"})
    assert smallest_invariant_closed(chain3, f, "a") == frozenset("abc")


def test_top3_assignment_passes_sc(sierpinski):
    drop = SelfMap({"o": "c", "c": "c"})
    assert has_top3_hypothesis(sierpinski, drop)
    assign = invariant_closed_assignment(sierpinski, drop)
    space = closed_ball_space(sierpinski)
    assert check_sc_axioms(space, drop, assign).passed
    result = solve_gfpt2(space, drop, assign)
    assert result.found and result.witness == "c"


def test_j_contraction(discrete2):
    single = topo("a", "", "a")
    assert check_j_contraction(single, SelfMap({"a": "a"})).holds

    ident = SelfMap({"a": "a", "b": "b"})
    assert check_j_contraction(discrete2, ident).holds

    # a fixed-point-free J-contraction exists on a disconnected space
    swap = SelfMap({"a": "b", "b": "a"})
    assert check_j_contraction(discrete2, swap).holds
    assert not any(swap(x) == x for x in "ab")

    capped = check_j_contraction(discrete2, ident, cover_cap=1)
    assert capped.partial


def test_j_lemmas_preconditions(sierpinski, discrete2):
    single = topo("a", "", "a")
    report = check_j_lemmas(single, SelfMap({"a": "a"}))
    assert report.passed

    swap = SelfMap({"a": "b", "b": "a"})
    disc = check_j_lemmas(discrete2, swap)
    assert not disc.check("precondition-connected").passed
    assert disc.check("precondition-hausdorff").passed

    drop = SelfMap({"o": "c", "c": "c"})
    sier = check_j_lemmas(sierpinski, drop)
    assert sier.check("precondition-connected").passed
    assert not sier.check("precondition-hausdorff").passed
    # the strong route still works without Hausdorff
    assert check_topn_hypotheses(sierpinski, drop).verdict == "strong"


def test_enumeration_counts():
    assert sum(1 for _ in enumerate_topologies(2, up_to_homeo=False)) == 4
    assert sum(1 for _ in enumerate_topologies(3, up_to_homeo=False)) == 29
    assert sum(1 for _ in enumerate_topologies(3)) == 9
    assert sum(1 for _ in enumerate_topologies(4, up_to_homeo=False)) == 355
    assert sum(1 for _ in enumerate_topologies(4)) == 33


def test_closed_set_spaces_spherically_complete_up_to_four_points():
    for n in (1, 2, 3, 4):
        for t in enumerate_topologies(n):
            assert is_spherically_complete(closed_ball_space(t))


def test_closed_self_maps_on_discrete_space(discrete2):
    assert sum(1 for _ in closed_self_maps(discrete2)) == 4
