import itertools

import pytest

from ballspaces.core import (
    BallAssignment,
    BallSpace,
    Nest,
    PresentedBallSpace,
    SelfMap,
    check_c_conditions,
    check_cu_conditions,
    check_sc_axioms,
    cofinal_subnest,
    completeness_transfer_check,
    is_f_contracting,
    is_spherically_complete,
    naturals_tail_nest,
    naturals_tail_space,
    preimage_nest,
    preimage_space,
    solve_gfpt2,
    solve_nfpt1,
    solve_nfpt2,
)
from ballspaces.errors import (
    BudgetError,
    ContractViolationError,
    EmptyPreimageError,
    InvalidAssignmentError,
    InvalidBallError,
    UnsupportedModeError,
)


def ball(*pts):
    return frozenset(pts)


@pytest.fixture
def descent():
    space = BallSpace(ball("a", "b", "c"), (ball("a", "b", "c"), ball("b", "c"), ball("c")))
    f = SelfMap({"a": "b", "b": "c", "c": "c"})
    return space, f


def brute_fixed_points(space, f):
    return {x for x in space.points if f(x) == x}


def test_space_normalizes_and_validates():
    space = BallSpace(ball("a", "b"), (ball("b", "a"), ball("a"), ball("a")))
    assert space.balls == (ball("a"), ball("a", "b"))
    with pytest.raises(InvalidBallError):
        BallSpace(ball("a"), ())
    with pytest.raises(InvalidBallError):
        BallSpace(ball("a"), (frozenset(),))
    with pytest.raises(InvalidBallError):
        BallSpace(ball("a"), (ball("a", "z"),))


def test_is_f_contracting_cases():
    space = BallSpace(ball("a", "b", "c"), (ball("c"), ball("a", "b"), ball("a", "b", "c")))
    fixed_c = SelfMap({"a": "b", "b": "b", "c": "c"})
    assert is_f_contracting(space, fixed_c, ball("c"))
    assert is_f_contracting(space, fixed_c, ball("a", "b"))  # image {b} proper
    swap = SelfMap({"a": "b", "b": "a", "c": "c"})
    assert not is_f_contracting(space, swap, ball("a", "b"))
    with pytest.raises(InvalidBallError):
        is_f_contracting(space, swap, ball("b", "c"))


def test_check_c_conditions(descent):
    space, f = descent
    report = check_c_conditions(space, f)
    assert report.passed
    assert [c.name for c in report.checks] == ["C1", "C2", "C3"]

    swap_space = BallSpace(ball("a", "b"), (ball("a", "b"),))
    swap = SelfMap({"a": "b", "b": "a"})
    swap_report = check_c_conditions(swap_space, swap)
    assert not swap_report.check("C1").passed

    single = BallSpace(ball("a"), (ball("a"),))
    assert check_c_conditions(single, SelfMap({"a": "a"})).passed


def test_check_c_requires_finite_mode():
    with pytest.raises(UnsupportedModeError):
        check_c_conditions(naturals_tail_space(), SelfMap({}))


def test_check_cu_conditions(descent):
    space, f = descent
    assert check_cu_conditions(space, f).passed

    space2 = BallSpace(ball("a", "b"), (ball("a", "b"), ball("a")))
    to_a = SelfMap({"a": "a", "b": "a"})
    assert check_cu_conditions(space2, to_a).passed

    space3 = BallSpace(ball("a", "b"), (ball("a", "b"),))
    report = check_cu_conditions(space3, to_a)
    assert not report.check("CU2").passed  # f(X) = {a} is not a ball


def test_solve_nfpt1_nest_matches_thorough_descent(descent):
    space, f = descent
    report = solve_nfpt1(space, f)
    assert report.found and report.witness == "c"
    assert report.nest.chain == (ball("a", "b", "c"), ball("b", "c"), ball("c"))
    assert brute_fixed_points(space, f) == {"c"}


def test_solve_nfpt1_identity_on_singletons():
    points = ball("a", "b")
    space = BallSpace(points, (ball("a"), ball("b")))
    ident = SelfMap({"a": "a", "b": "b"})
    report = solve_nfpt1(space, ident)
    assert report.found and report.witness in points
    # deterministic: the largest-then-lex start rule picks {a}
    assert report.witness == "a"


def test_solve_nfpt1_violations_and_budget(descent):
    space, f = descent
    swap_space = BallSpace(ball("a", "b"), (ball("a", "b"),))
    swap = SelfMap({"a": "b", "b": "a"})
    report = solve_nfpt1(swap_space, swap)
    assert report.outcome == "hypothesis-violated" and report.violated == "C1"
    with pytest.raises(BudgetError):
        solve_nfpt1(space, f, budget=0)


def test_solve_nfpt2(descent):
    space, f = descent
    report = solve_nfpt2(space, f)
    assert report.found and report.witness == "c" and report.iterations == 2
    assert brute_fixed_points(space, f) == {"c"}

    single = BallSpace(ball("a"), (ball("a"),))
    r2 = solve_nfpt2(single, SelfMap({"a": "a"}))
    assert r2.found and r2.iterations == 0

    multi = BallSpace(ball("a", "b"), (ball("a", "b"), ball("a"), ball("b")))
    ident = SelfMap({"a": "a", "b": "b"})
    r3 = solve_nfpt2(multi, ident)
    assert r3.outcome == "hypothesis-violated" and r3.violated == "CU1"


@pytest.fixture
def sc_instance(descent):
    space, f = descent
    assign = BallAssignment({"a": ball("a", "b", "c"), "b": ball("b", "c"), "c": ball("c")})
    return space, f, assign


def test_check_sc_axioms(sc_instance):
    space, f, assign = sc_instance
    assert check_sc_axioms(space, f, assign).passed

    # constant assignment with a 2-cycle: no proper descent
    cyc_space = BallSpace(ball("a", "b"), (ball("a", "b"),))
    swap = SelfMap({"a": "b", "b": "a"})
    const = BallAssignment({"a": ball("a", "b"), "b": ball("a", "b")})
    report = check_sc_axioms(cyc_space, swap, const)
    assert not report.check("SC2").passed

    # identity with singleton balls passes vacuously
    sing_space = BallSpace(ball("a", "b"), (ball("a"), ball("b")))
    ident = SelfMap({"a": "a", "b": "b"})
    sing = BallAssignment({"a": ball("a"), "b": ball("b")})
    assert check_sc_axioms(sing_space, ident, sing).passed


def test_check_sc_rejects_partial_assignment(sc_instance):
    space, f, _ = sc_instance
    with pytest.raises(InvalidAssignmentError):
        check_sc_axioms(space, f, BallAssignment({"a": ball("a", "b", "c")}))
    with pytest.raises(InvalidAssignmentError):
        check_sc_axioms(
            space, f,
            BallAssignment({"a": ball("a", "b"), "b": ball("b", "c"), "c": ball("c")}),
        )


def test_solve_gfpt2(sc_instance):
    space, f, assign = sc_instance
    report = solve_gfpt2(space, f, assign, start="a")
    assert report.found and report.witness == "c"

    fixed_start = solve_gfpt2(space, f, assign, start="c")
    assert fixed_start.found and fixed_start.witness == "c" and fixed_start.iterations == 0

    cyc_space = BallSpace(ball("a", "b"), (ball("a", "b"),))
    swap = SelfMap({"a": "b", "b": "a"})
    const = BallAssignment({"a": ball("a", "b"), "b": ball("a", "b")})
    r = solve_gfpt2(cyc_space, swap, const)
    assert r.outcome == "hypothesis-violated"


def test_solve_gfpt2_chooser_contract(sc_instance):
    space, f, assign = sc_instance
    good = solve_gfpt2(space, f, assign, start="a", chooser=lambda inter, nest: min(inter))
    assert good.found and good.witness == "c"
    with pytest.raises(ContractViolationError):
        solve_gfpt2(space, f, assign, start="a", chooser=lambda inter, nest: "a")


def test_spherical_completeness_finite_and_presented():
    space = BallSpace(ball("a", "b"), (ball("a"), ball("a", "b")))
    assert is_spherically_complete(space)

    verdict = is_spherically_complete(naturals_tail_space(), nests=[naturals_tail_nest()])
    assert not verdict
    assert verdict.witness_nest[:3] == [0, 1, 2]

    stabilizing = [0, 1, 2, 2, 2]
    ok = is_spherically_complete(naturals_tail_space(), nests=[iter(stabilizing)])
    assert ok


def test_preimage_space_and_nest():
    target = BallSpace(ball("a", "b"), (ball("a"), ball("a", "b")))
    fmap = {"1": "a", "2": "a", "3": "b", "4": "b"}
    pre = preimage_space(fmap, target)
    assert set(pre.balls) == {ball("1", "2"), ball("1", "2", "3", "4")}

    nest = Nest((ball("a", "b"), ball("a")))
    pulled = preimage_nest(fmap, nest)
    assert pulled.chain == (ball("1", "2", "3", "4"), ball("1", "2"))
    assert completeness_transfer_check(fmap, nest)

    constant = {"1": "a", "2": "a"}
    with pytest.raises(EmptyPreimageError):
        preimage_space(constant, BallSpace(ball("a", "b"), (ball("b"), ball("a", "b"))))


def test_preimage_preserves_nonempty_intersections():
    target = BallSpace(ball("a", "b", "c"), (ball("a"), ball("a", "b"), ball("a", "b", "c")))
    fmap = {str(i): x for i, x in enumerate(["a", "a", "b", "c"])}
    nest = Nest((ball("a", "b", "c"), ball("a", "b"), ball("a")))
    pulled = preimage_nest(fmap, nest)
    assert all(n <= p for p, n in zip(pulled.chain, pulled.chain[1:]))
    assert pulled.intersection()


def test_cofinal_subnest():
    chain = [ball("a"), ball("a", "b", "c"), ball("a", "b")]
    result = cofinal_subnest(chain)
    assert result.chain == (ball("a", "b", "c"), ball("a", "b"), ball("a"))
    assert result.intersection() == ball("a")

    single = cofinal_subnest([ball("a")])
    assert single.chain == (ball("a"),)

    dupes = cofinal_subnest([ball("a"), ball("a", "b"), ball("a")])
    assert dupes.chain == (ball("a", "b"), ball("a"))


def test_nest_validation():
    with pytest.raises(InvalidBallError):
        Nest((ball("a"), ball("b")))
    with pytest.raises(InvalidBallError):
        Nest(())
