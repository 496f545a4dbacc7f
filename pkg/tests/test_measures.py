import math

import pytest
from hypothesis import given, settings, strategies as st

from opinion_merge.extmath import INF
from opinion_merge.measures import (
    BettingFunction,
    Distribution,
    ExceptionalPair,
    MeasureError,
    OutcomeSpace,
    betting_mean,
    constant_one,
    exceptional_pair,
    is_absolutely_continuous,
    is_c_timid,
    is_valid_exceptional,
    mixture_densities,
    validate_betting,
)


def _normalize(raw):
    # drop sub-1e-9 dust: probabilities that small are either exact zeros or
    # numerical noise, and subnormal divisions would defeat any tolerance
    raw = [x if x >= 1e-9 else 0.0 for x in raw]
    total = sum(raw)
    return [x / total for x in raw]


def simplex_pair(m_min=2, m_max=6, allow_zero=True):
    """Hypothesis strategy for two probability vectors of equal length."""
    low = 0.0 if allow_zero else 1e-6
    vec = lambda m: st.lists(st.floats(low, 1.0), min_size=m, max_size=m).filter(
        lambda raw: sum(x if x >= 1e-9 else 0.0 for x in raw) > 1e-6).map(_normalize)
    return st.integers(m_min, m_max).flatmap(lambda m: st.tuples(vec(m), vec(m)))


class TestOutcomeSpace:
    def test_size_floor(self):
        with pytest.raises(MeasureError):
            OutcomeSpace(1)

    def test_labels(self):
        sp = OutcomeSpace(2, labels=("heads", "tails"))
        assert sp.label(1) == "tails"
        assert OutcomeSpace(2).label(0) == "w0"


class TestDistribution:
    def test_normalizes_small_drift(self):
        d = Distribution([0.5, 0.5 + 4e-10])
        assert sum(d.tolist()) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_large_drift(self):
        with pytest.raises(MeasureError):
            Distribution([0.5, 0.6])

    def test_rejects_negative_and_nan(self):
        with pytest.raises(MeasureError):
            Distribution([1.1, -0.1])
        with pytest.raises(MeasureError):
            Distribution([math.nan, 1.0])

    def test_immutable(self):
        d = Distribution([0.4, 0.6])
        with pytest.raises(AttributeError):
            d.probs = None
        with pytest.raises(ValueError):
            d.probs[0] = 1.0


class TestMixtureDensities:
    def test_worked_example(self):
        dp = mixture_densities(Distribution([0.5, 0.5]), Distribution([0.9, 0.1]))
        assert dp.q.tolist() == pytest.approx([0.7, 0.3], abs=1e-15)
        assert dp.beta_i.tolist() == pytest.approx([0.714286, 1.666667], abs=1e-6)
        assert dp.beta_ii.tolist() == pytest.approx([1.285714, 0.333333], abs=1e-6)

    def test_identical_measures(self):
        d = Distribution([0.25, 0.75])
        dp = mixture_densities(d, d)
        assert dp.beta_i.tolist() == [1.0, 1.0]
        assert dp.beta_ii.tolist() == [1.0, 1.0]
        assert not dp.has_zeros

    def test_disjoint_supports(self):
        dp = mixture_densities(Distribution([1.0, 0.0]), Distribution([0.0, 1.0]))
        assert dp.beta_i.tolist() == [2.0, 0.0]
        assert dp.beta_ii.tolist() == [0.0, 2.0]
        assert dp.zero_i == {1} and dp.zero_ii == {0}

    def test_dimension_mismatch(self):
        with pytest.raises(MeasureError):
            mixture_densities(Distribution([0.5, 0.5]), Distribution([0.2, 0.3, 0.5]))

    @given(simplex_pair())
    @settings(max_examples=150)
    def test_density_times_q_recovers_probabilities(self, pair):
        a, b = pair
        d_a, d_b = Distribution(a), Distribution(b)
        dp = mixture_densities(d_a, d_b)
        bi, bii, qv = dp.lists()
        for w in range(dp.m):
            assert bi[w] * qv[w] == pytest.approx(d_a[w], abs=1e-12)
            assert bii[w] * qv[w] == pytest.approx(d_b[w], abs=1e-12)
            # the two densities sum to 2 wherever q is positive
            if qv[w] > 0:
                assert bi[w] + bii[w] == pytest.approx(2.0, abs=1e-12)


class TestBetting:
    def test_fair_bet(self):
        assert validate_betting(BettingFunction([1.5, 0.5]), Distribution([0.5, 0.5]))

    def test_constant_one_is_fair_for_anything(self):
        for probs in ([0.5, 0.5], [0.9, 0.1], [1.0, 0.0]):
            assert validate_betting(constant_one(2), Distribution(probs))

    def test_infinite_payoff_on_null_outcome(self):
        assert validate_betting(BettingFunction([INF, 1.0]), Distribution([0.0, 1.0]))

    def test_infinite_payoff_on_charged_outcome_fails(self):
        assert not validate_betting(BettingFunction([INF, 1.0]), Distribution([0.5, 0.5]))

    def test_unfair_mean_fails(self):
        assert not validate_betting(BettingFunction([1.5, 1.5]), Distribution([0.5, 0.5]))

    def test_negative_payoff_rejected_at_construction(self):
        with pytest.raises(MeasureError):
            BettingFunction([1.5, -0.5])

    def test_mean_uses_zero_times_infinity_convention(self):
        f = BettingFunction([INF, 2.0])
        assert betting_mean(f, Distribution([0.0, 1.0])) == 2.0


class TestExceptionalPair:
    def test_zero_sets(self):
        dp = mixture_densities(Distribution([0.5, 0.5, 0.0]), Distribution([0.0, 0.5, 0.5]))
        pair = exceptional_pair(dp)
        assert pair.e_i == {2} and pair.e_ii == {0}
        assert is_valid_exceptional(pair, dp)

    def test_identical_measures_give_empty_pair(self):
        d = Distribution([0.3, 0.7])
        pair = exceptional_pair(mixture_densities(d, d))
        assert pair.e_i == frozenset() and pair.e_ii == frozenset()

    def test_mutually_singular(self):
        dp = mixture_densities(Distribution([1.0, 0.0]), Distribution([0.0, 1.0]))
        pair = exceptional_pair(dp)
        assert pair.e_i == {1} and pair.e_ii == {0}

    def test_invalid_pair_detected(self):
        dp = mixture_densities(Distribution([0.5, 0.5]), Distribution([0.9, 0.1]))
        bad = ExceptionalPair(e_i=frozenset({0}), e_ii=frozenset())
        assert not is_valid_exceptional(bad, dp)

    @given(simplex_pair())
    @settings(max_examples=150)
    def test_canonical_pair_always_valid(self, pair):
        a, b = pair
        dp = mixture_densities(Distribution(a), Distribution(b))
        assert is_valid_exceptional(exceptional_pair(dp), dp)


class TestTimidity:
    def test_worked_example(self):
        dp = mixture_densities(Distribution([0.5, 0.5]), Distribution([0.9, 0.1]))
        assert is_c_timid(dp, 5.0)
        assert not is_c_timid(dp, 4.0)

    def test_identical_always_timid(self):
        d = Distribution([0.2, 0.8])
        assert is_c_timid(mixture_densities(d, d), 1.0001)

    def test_requires_c_above_one(self):
        d = Distribution([0.5, 0.5])
        with pytest.raises(MeasureError):
            is_c_timid(mixture_densities(d, d), 1.0)

    def test_one_sided_zero_is_never_timid(self):
        dp = mixture_densities(Distribution([0.5, 0.5]), Distribution([1.0, 0.0]))
        assert not is_c_timid(dp, 100.0)

    @given(simplex_pair(allow_zero=False), st.floats(1.1, 10.0))
    @settings(max_examples=100)
    def test_timid_implies_mutual_absolute_continuity(self, pair, c):
        a, b = pair
        d_a, d_b = Distribution(a), Distribution(b)
        if is_c_timid(mixture_densities(d_a, d_b), c):
            assert is_absolutely_continuous(d_a, d_b)
            assert is_absolutely_continuous(d_b, d_a)


class TestAbsoluteContinuity:
    def test_examples(self):
        assert is_absolutely_continuous(Distribution([0.5, 0.5]), Distribution([0.9, 0.1]))
        assert not is_absolutely_continuous(Distribution([0.5, 0.5]), Distribution([1.0, 0.0]))
        assert is_absolutely_continuous(Distribution([1.0, 0.0]), Distribution([0.5, 0.5]))
