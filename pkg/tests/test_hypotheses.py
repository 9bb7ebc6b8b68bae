import random
from fractions import Fraction as F

import pytest

from randmaps.hypotheses import (
    StochasticSystem,
    certify,
    check_above_diagonal_right,
    check_below_diagonal_left,
    check_condition_A,
    check_mu_injectivity,
    example22_system,
    injectivity_profile,
    interval_complement,
    interval_union,
    reflect_system,
    sublevel_set,
    superlevel_set,
)
from randmaps.pwlin import PwlError, PwlMap, RatInterval, affine, eval, identity, preimage_count

from strategies import random_map, random_system, random_unit_rational

THIRD = F(1, 3)


def grid(den=360):
    return [F(i, den) for i in range(den + 1)]


def weighted_count(sys, x):
    # independent of the step-function machinery: count roots piece by piece
    return sum(w * preimage_count(m, x) for w, m in zip(sys.weights, sys.maps))


def in_union(x, ivs):
    return any(x in iv for iv in ivs)


class TestSystem:
    def test_rejects_nonpositive_weight(self, phis):
        with pytest.raises(PwlError):
            StochasticSystem(phis, (1, 0, 0))

    def test_rejects_bad_sum(self, phis):
        with pytest.raises(PwlError, match="sum"):
            StochasticSystem(phis, (F(1, 3), F(1, 3), F(1, 4)))

    def test_rejects_duplicate_labels(self, phis):
        with pytest.raises(PwlError):
            StochasticSystem(phis, (F(1, 3),) * 3, ("a", "a", "b"))


@pytest.mark.parametrize(
    "p, weights",
    [(F(2, 5), (F(1, 5), F(2, 5), F(2, 5))), (F(1, 4), (F(1, 2), F(1, 4), F(1, 4))), (F(1, 10), (F(4, 5), F(1, 10), F(1, 10)))],
)
def test_example22_weights(p, weights):
    assert example22_system(p).weights == weights


@pytest.mark.parametrize("p", [0, F(1, 2), F(-1, 3), 1])
def test_example22_range(p):
    with pytest.raises(PwlError):
        example22_system(p)


def test_sublevel_set_examples(phis):
    phi1, phi2, _ = phis
    assert sublevel_set(phi2) == [RatInterval(0, 1, False, True)]
    assert sublevel_set(identity()) == []
    assert sublevel_set(phi1) == [RatInterval(F(1, 2), F(2, 3), False, False), RatInterval(F(2, 3), 1, False, False)]


def test_sublevel_and_superlevel_against_grid():
    rnd = random.Random(1)
    for _ in range(60):
        m = random_map(rnd)
        sub, sup = sublevel_set(m), superlevel_set(m)
        for iv in sub:
            for x in (iv.lo, iv.hi, (iv.lo + iv.hi) / 2):
                if x in iv:
                    assert 0 < eval(m, x) < x
        for x in grid(240):
            assert in_union(x, sub) == (x > 0 and 0 < eval(m, x) < x)
            assert in_union(x, sup) == (x < 1 and x < eval(m, x) < 1)


def test_interval_algebra():
    a = RatInterval(0, F(1, 2), True, False)
    b = RatInterval(F(1, 2), 1, True, True)
    assert interval_union([a, b]) == [RatInterval(0, 1)]
    c = RatInterval(F(1, 2), 1, False, True)
    assert interval_union([a, c]) == [a, c]
    assert interval_complement([a, c], RatInterval(0, 1)) == [RatInterval(F(1, 2), F(1, 2))]
    assert interval_complement([], RatInterval(0, 1, False, True)) == [RatInterval(0, 1, False, True)]


class TestConditionA:
    def test_example22(self):
        for p in (F(1, 10), F(1, 5), F(2, 5), F(49, 100)):
            res = check_condition_A(example22_system(p))
            assert res.holds and res.uncovered == []

    def test_identity(self):
        res = check_condition_A(StochasticSystem((identity(),), (1,)))
        assert not res.holds
        assert res.uncovered_left == [RatInterval(0, 1, False, True)]

    def test_phi2_only(self, phis):
        res = check_condition_A(StochasticSystem((phis[1],), (1,)))
        assert not res.holds
        assert res.uncovered_left == []
        assert res.uncovered_right == [RatInterval(0, 1, True, False)]

    def test_gap_is_exact(self):
        # g2 fixes 0 and sends x to (0, x) only for x > 1/2: (0, 1/2] stays uncovered on the left
        g1 = PwlMap([0, F(1, 2), 1], [0, F(1, 2), F(1, 4)])
        g2 = affine(F(1, 2), F(1, 2))
        res = check_condition_A(StochasticSystem((g1, g2), (F(1, 2), F(1, 2))))
        assert res.uncovered_left == [RatInterval(0, F(1, 2), False, True)]

    def test_monotone_under_adding_maps(self):
        rnd = random.Random(2)
        base = example22_system(F(2, 5))
        for _ in range(30):
            extra = random_map(rnd)
            w = F(rnd.randint(1, 9), 10)
            bigger = StochasticSystem(
                base.maps + (extra,), tuple(x * (1 - w) for x in base.weights) + (w,), base.labels + ("extra",)
            )
            assert check_condition_A(bigger).holds


def test_diagonal_examples(phis, ex22):
    phi1, phi2, _ = phis
    assert check_below_diagonal_left(ex22) == (True, "phi2")
    assert check_above_diagonal_right(ex22) == (True, "phi3")
    ident = StochasticSystem((identity(),), (1,), ("id",))
    assert check_below_diagonal_left(ident) == (False, None)
    assert check_above_diagonal_right(ident) == (False, None)
    assert check_below_diagonal_left(StochasticSystem((phi1,), (1,))) == (False, None)
    assert check_above_diagonal_right(StochasticSystem((phi2,), (1,))) == (False, None)


def test_diagonal_slope_test_matches_definition():
    rnd = random.Random(4)
    for _ in range(100):
        m = random_map(rnd)
        sys = StochasticSystem((m,), (1,))
        eps = m.xs[1] / 7
        near0 = [eps * F(k, 5) for k in range(1, 6)]
        assert check_below_diagonal_left(sys)[0] == (m.ys[0] == 0 and all(eval(m, x) < x for x in near0))
        eps = (1 - m.xs[-2]) / 7
        near1 = [1 - eps * F(k, 5) for k in range(1, 6)]
        assert check_above_diagonal_right(sys)[0] == (m.ys[-1] == 1 and all(eval(m, x) > x for x in near1))


def test_reflection_swaps_sides(ex22):
    r = reflect_system(ex22)
    assert check_below_diagonal_left(r) == (True, "phi3")
    assert check_above_diagonal_right(r) == (True, "phi2")
    assert check_mu_injectivity(r)[1] == check_mu_injectivity(ex22)[1]


class TestInjectivity:
    def test_profile_example22(self):
        for p in (F(1, 10), F(2, 5), F(3, 7)):
            prof = injectivity_profile(example22_system(p))
            q = 1 - 2 * p
            assert prof(F(1, 6)) == 3 * q + p
            assert prof(F(1, 2)) == 3 * q
            assert prof(F(5, 6)) == 3 * q + p
            assert prof(0) == 2 * q + p

    def test_identity(self):
        ok, margin, where = check_mu_injectivity(StochasticSystem((identity(),), (1,)))
        assert (ok, margin, where) == (True, 1, RatInterval(0, 1))

    def test_examples(self):
        ok, margin, where = check_mu_injectivity(example22_system(F(2, 5)))
        assert ok and margin == 1
        assert where.lo == 0 and where.hi <= THIRD and not where.lo_closed
        ok, margin, where = check_mu_injectivity(example22_system(F(1, 5)))
        assert not ok and margin == 2
        assert where.lo == 0 and where.hi <= THIRD

    def test_threshold(self):
        eps = F(1, 1000)
        assert check_mu_injectivity(example22_system(F(2, 5)))[0]
        assert check_mu_injectivity(example22_system(F(2, 5) + eps))[0]
        assert not check_mu_injectivity(example22_system(F(2, 5) - eps))[0]

    def test_closed_form_sup(self):
        rnd = random.Random(9)
        ps = {F(rnd.randint(1, 499), 1000) for _ in range(19)} | {F(2, 5)}
        for p in sorted(ps):
            assert check_mu_injectivity(example22_system(p))[1] == 3 - 5 * p

    def test_margin_matches_grid_oracle(self):
        rnd = random.Random(6)
        for _ in range(25):
            sys = random_system(rnd)
            crit = {y for m in sys.maps for y in m.ys} | {F(0), F(1)}
            crit = sorted(crit)
            probes = crit + [(a + b) / 2 for a, b in zip(crit, crit[1:])]
            best = max(weighted_count(sys, x) for x in probes)
            ok, margin, where = check_mu_injectivity(sys)
            assert margin == best
            assert ok == (best <= 1)
            witness = where.lo if where.lo_closed else (where.lo + where.hi) / 2
            assert weighted_count(sys, witness) == margin
            prof = injectivity_profile(sys)
            for _ in range(50):
                x = random_unit_rational(rnd)
                assert prof(x) == weighted_count(sys, x)

    def test_monotone_families_are_injective(self):
        rnd = random.Random(8)
        for _ in range(40):
            sys = random_system(rnd, max_pieces=1)
            assert check_mu_injectivity(sys)[1] <= 1


def test_certify_report(ex22):
    rep = certify(ex22)
    assert rep.ok and rep.below_witness == "phi2" and rep.above_witness == "phi3"
    assert not certify(example22_system(F(1, 5))).ok
