import itertools
import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from ballspaces.errors import (
    ContractionBoundError,
    InvalidBallError,
    PreconditionError,
)
from ballspaces.hahn import (
    ArchNestVerdict,
    HahnSeries,
    HybridBall,
    NaturalValue,
    OrderBall,
    UmSeriesBall,
    archimedean_equivalent,
    check_asco,
    check_hybrid,
    format_series,
    infinitesimally_smaller,
    natural_valuation,
    order_ball_contains,
    parse_series,
    scoscu_transfer,
    solve_oag,
    sqrt2_bisection_nest,
    stabilizing_nest,
)

T = HahnSeries.t()


def series_strategy():
    term = st.tuples(
        st.integers(min_value=0, max_value=8),
        st.fractions(min_value=-4, max_value=4),
    )
    return st.lists(term, max_size=4).map(lambda ts: HahnSeries(tuple(ts)))


def test_parse_and_format_roundtrip():
    s = parse_series("3/2 + 2t^1 - 1/4t^3")
    assert s.terms == ((0, Q(3, 2)), (1, Q(2)), (3, Q(-1, 4)))
    assert parse_series(format_series(s)) == s
    assert parse_series("t") == T
    assert parse_series("-t^2") == HahnSeries.t(2, -1)
    assert parse_series("0").is_zero
    with pytest.raises(PreconditionError):
        parse_series("t^^2")


def test_natural_valuation_examples():
    assert natural_valuation(HahnSeries.zero()).is_bottom
    assert natural_valuation(parse_series("3 + 2t")).exponent == 0
    v = natural_valuation(parse_series("t^2 - 5t^3"))
    assert v.exponent == 2
    # class order: v(t^2) < v(t), checked against the n-multiples oracle
    assert v.lt(natural_valuation(T))
    assert all(HahnSeries.t(2, n) < T for n in range(1, 100))


def test_valuation_group_laws_random():
    rng = random.Random(4)
    for _ in range(200):
        a = HahnSeries(tuple((rng.randint(0, 8), Q(rng.randint(-5, 5))) for _ in range(3)))
        b = HahnSeries(tuple((rng.randint(0, 8), Q(rng.randint(-5, 5))) for _ in range(3)))
        va, vb = natural_valuation(a), natural_valuation(b)
        assert natural_valuation(a * b) == va.times(vb)
        bound = va if vb.leq(va) else vb
        assert natural_valuation(a - b).leq(bound)
        assert va.is_bottom == a.is_zero


def test_archimedean_relations():
    assert archimedean_equivalent(HahnSeries.constant(5), HahnSeries.constant(7))
    assert infinitesimally_smaller(T, HahnSeries.constant(1))
    assert archimedean_equivalent(parse_series("t + t^2"), T)
    assert not infinitesimally_smaller(HahnSeries.constant(1), HahnSeries.constant(2))


@settings(max_examples=120, deadline=None)
@given(series_strategy(), series_strategy(), series_strategy())
def test_total_order_laws(a, b, c):
    # trichotomy
    assert (a < b) + (a == b) + (b < a) == 1
    # compatibility with addition
    if a < b:
        assert a + c < b + c
    # transitivity through subtraction signs
    if a < b and b < c:
        assert a < c


def test_order_ball_examples():
    ball = OrderBall(HahnSeries.zero(), T)
    assert order_ball_contains(ball, HahnSeries.zero())
    assert order_ball_contains(ball, HahnSeries.t(2))  # t^2 << t
    assert not order_ball_contains(ball, HahnSeries.constant(1))
    with pytest.raises(InvalidBallError):
        OrderBall(HahnSeries.zero(), -T)


def test_um_series_ball_coset_invariance():
    x = parse_series("1 + t")
    y = parse_series("1 + t + t^2")
    ball = UmSeriesBall(x, y)
    # membership is stable under adding anything of value at most v(x - y)
    members = [x, y, x + HahnSeries.t(2, 7), x + HahnSeries.t(5)]
    for z in members:
        assert ball.contains(z)
        assert ball.contains(z + HahnSeries.t(2, Q(3, 2)))
        assert ball.contains(z + HahnSeries.t(9))
    assert not ball.contains(x + T)


def test_series_inverse():
    a = parse_series("2 + t")
    prod = (a * a.invert(10)).truncate(10)
    assert prod == HahnSeries.constant(1)
    b = HahnSeries.t(1, Q(1, 2))  # pure monomial: exact inverse
    assert (b * b.invert(10)) == HahnSeries.constant(1)
    with pytest.raises(PreconditionError):
        HahnSeries.zero().invert(4)


def exact_affine_fixed_point(scale, offset):
    """Oracle: solve x = scale x + offset term by term."""
    return HahnSeries(tuple((e, c / (1 - scale)) for e, c in offset.terms))


def test_solve_oag_affine_pin():
    f = lambda x: x * Q(1, 2) + T
    result = solve_oag(f, 1, 2, HahnSeries.zero())
    assert result.outcome == "fixed-point"
    assert result.point == parse_series("2t^1")
    assert result.point == exact_affine_fixed_point(Q(1, 2), T)


def test_solve_oag_constant():
    c = parse_series("5 + t")
    result = solve_oag(lambda x: c, 1, 2, HahnSeries.zero())
    assert result.outcome == "fixed-point" and result.point == c


def test_solve_oag_rejects_isometric_shift():
    with pytest.raises(ContractionBoundError):
        solve_oag(lambda x: x + T, 1, 2, HahnSeries.zero())


def test_solve_oag_random_affine_cross_check():
    rng = random.Random(17)
    for _ in range(20):
        scale = Q(rng.randint(1, 3), rng.randint(4, 8))
        offset = HahnSeries(
            tuple((rng.randint(0, 6), Q(rng.randint(-3, 3))) for _ in range(2))
        )
        f = lambda x: x * scale + offset
        ratio = Q(1, 2) if scale <= Q(1, 2) else Q(3, 4)
        result = solve_oag(f, ratio.numerator, ratio.denominator,
                           HahnSeries.constant(rng.randint(-2, 2)))
        assert result.outcome == "fixed-point"
        assert result.point == exact_affine_fixed_point(scale, offset)


def test_check_asco_integers():
    verdict = check_asco("integers", [(5, 3), (5, 1), (5, 0)])
    assert verdict.outcome == "complete" and verdict.witness == 5
    with pytest.raises(InvalidBallError):
        check_asco("integers", [(0, 1), (5, 1)])


def test_check_asco_sqrt2_nest():
    verdict = check_asco("rationals", sqrt2_bisection_nest(100), budget=40)
    assert verdict.outcome == "empty-so-far"
    lo, hi, width = verdict.witness
    assert width < Q(1, 2**38)
    assert lo * lo < 2 < hi * hi
    assert verdict.levels == 40


def test_check_asco_stabilizing():
    verdict = check_asco("rationals", stabilizing_nest(Q(3, 2), 12))
    assert verdict.outcome == "nonempty" and verdict.witness == Q(3, 2)


def test_check_asco_dyadic_validation():
    ok = check_asco("dyadic-rationals", [(Q(1, 2), Q(1, 4))])
    assert ok.outcome == "nonempty"
    with pytest.raises(Exception):
        check_asco("dyadic-rationals", [(Q(1, 3), Q(1, 4))])
    with pytest.raises(PreconditionError):
        check_asco("reals", [(Q(0), Q(1))])


def partial_sum_nest(depth):
    pairs = []
    s = HahnSeries.zero()
    for k in range(1, depth + 1):
        s = s + HahnSeries.t(k)
        pairs.append((s, s + HahnSeries.t(k)))
    return pairs


def test_scoscu_transfer_partial_sums():
    deep = sum((HahnSeries.t(i) for i in range(1, 20)), HahnSeries.zero())
    report = scoscu_transfer(partial_sum_nest(6), probes=[deep])
    assert report.passed
    # the deep partial sum lies in the order-nest intersection
    pairs = partial_sum_nest(6)
    for i in range(5):
        ball = OrderBall(pairs[i + 1][0], abs(pairs[i][0] - pairs[i][1]))
        assert ball.contains(deep)


def test_scoscu_single_ball_vacuous():
    report = scoscu_transfer(partial_sum_nest(1))
    assert report.passed


def test_scoscu_requires_strict_descent():
    s = HahnSeries.constant(1)
    pairs = [(s, s + T), (s + T, s + T + T)]  # same leading exponent twice
    with pytest.raises(PreconditionError):
        scoscu_transfer(pairs)


def test_scoscu_random_nests():
    rng = random.Random(23)
    for _ in range(25):
        depth = rng.randint(2, 6)
        pairs = []
        x = HahnSeries.constant(rng.randint(-2, 2))
        exps = sorted(rng.sample(range(1, 12), depth))
        for e in exps:
            y = x + HahnSeries.t(e, Q(rng.randint(1, 4)))
            pairs.append((x, y))
            x = x + HahnSeries.t(e, Q(rng.randint(1, 3), 2))
        assert scoscu_transfer(pairs).passed


def um_hybrid(x, y):
    return HybridBall("ultrametric", um=UmSeriesBall(x, y))


def rat_hybrid(center, radius):
    return HybridBall("rational-order", center=center, radius=radius)


def test_check_hybrid_um_tail():
    one = HahnSeries.constant(1)
    nest = [um_hybrid(one, one + T), um_hybrid(one + T, one + T + HahnSeries.t(2))]
    verdict = check_hybrid(nest)
    assert verdict.outcome == "nonempty"
    assert verdict.cofinal_kind == "ultrametric"
    assert verdict.witness == one + T


def test_check_hybrid_rational_tail_stabilizing():
    wide = um_hybrid(HahnSeries.constant(1), HahnSeries.constant(9))
    nest = [wide, rat_hybrid(Q(3, 2), Q(1)), rat_hybrid(Q(3, 2), Q(1, 2))]
    verdict = check_hybrid(nest)
    assert verdict.outcome == "nonempty"
    assert verdict.cofinal_kind == "rational-order"
    assert verdict.witness == HahnSeries.constant(Q(3, 2))


def test_check_hybrid_sqrt2_tail_empty():
    balls = (rat_hybrid(c, r) for c, r in sqrt2_bisection_nest(200))
    verdict = check_hybrid(balls, budget=40)
    assert verdict.outcome == "empty-so-far"
    lo, hi = verdict.interval
    assert hi - lo < Q(1, 2**36)


def test_hybrid_ball_validation():
    with pytest.raises(InvalidBallError):
        HybridBall("rational-order", center=Q(1), radius=Q(0))
    with pytest.raises(InvalidBallError):
        HybridBall("mystery")
