import math

import numpy as np
import pytest
from scipy.special import ndtr

from conftest import ORACLE_PATHS, ORACLE_SEED, ORACLE_STEPS
from ecce.errors import ValidationError
from ecce.pvalues import (
    CROSSOVER,
    TailKind,
    brownian_extremes,
    expected_null_constants,
    mc_oracle,
    tail_maxabs,
    tail_range,
)

TAILS = [tail_maxabs, tail_range]

# reference points, two significant figures: (statistic, P-value)
MAXABS_ANCHORS = [(4.274, 3.8e-5), (5.512, 7.1e-8), (6.607, 7.8e-11)]
RANGE_ANCHORS = [(5.186, 8.6e-7), (6.780, 4.8e-11)]


@pytest.mark.parametrize("x, p", MAXABS_ANCHORS)
def test_maxabs_anchors(x, p):
    assert tail_maxabs(x).p == pytest.approx(p, rel=0.05)


@pytest.mark.parametrize("x, p", RANGE_ANCHORS)
def test_range_anchors(x, p):
    assert tail_range(x).p == pytest.approx(p, rel=0.05)


@pytest.mark.parametrize("tail", TAILS)
def test_zero_and_limits(tail):
    assert tail(0).p == 1.0
    assert tail(10).p < 1e-20
    assert tail(60).p == 0.0


@pytest.mark.parametrize("tail", TAILS)
@pytest.mark.parametrize("bad", [-0.1, math.inf, math.nan, "abc"])
def test_rejects_bad_input(tail, bad):
    with pytest.raises(ValidationError):
        tail(bad)


@pytest.mark.parametrize("tail", TAILS)
def test_monotone_on_grid(tail):
    xs = np.linspace(0, 8, 1000)
    p = np.array([tail(x).p for x in xs])
    assert np.all(np.diff(p) <= 0)
    assert np.all((p >= 0) & (p <= 1))


def test_range_dominates_maxabs():
    for x in np.linspace(0, 8, 1000):
        assert tail_range(x).p >= tail_maxabs(x).p


@pytest.mark.parametrize("tail", TAILS)
def test_truncation_bound(tail):
    for x in np.linspace(0.01, 12, 300):
        r = tail(x)
        assert r.truncation_bound <= 1e-16 * max(r.p, 1e-300)
        assert 0 < r.terms_used < 20 or r.p in (0.0, 1.0)


@pytest.mark.parametrize("tail", TAILS)
def test_continuous_across_crossover(tail):
    eps = 1e-9
    assert tail(CROSSOVER - eps).p == pytest.approx(tail(CROSSOVER).p, abs=1e-8)


def test_range_large_x_matches_leading_term():
    for x in np.linspace(5, 12, 30):
        assert tail_range(x).p == pytest.approx(8 * ndtr(-x), rel=0.01)


def test_maxabs_small_x_matches_leading_term():
    # P(max|B| <= x) ~ (4/pi) exp(-pi^2 / (8 x^2)) as x -> 0
    for x in (0.2, 0.3, 0.4):
        lead = 4 / math.pi * math.exp(-(math.pi**2) / (8 * x * x))
        assert 1 - tail_maxabs(x).p == pytest.approx(lead, rel=1e-6)


def test_means_by_integrating_tails():
    # E[X] = integral of P(X > x) dx, an independent check of each series
    from scipy.integrate import quad

    mean_maxabs, mean_range = expected_null_constants()
    assert quad(lambda x: tail_maxabs(x).p, 0, 20, limit=200)[0] == pytest.approx(mean_maxabs, rel=1e-9)
    assert quad(lambda x: tail_range(x).p, 0, 20, limit=200)[0] == pytest.approx(mean_range, rel=1e-9)


def test_expected_null_constants():
    a, b = expected_null_constants()
    assert (round(a, 4), round(b, 4)) == (1.2533, 1.5958)
    assert a**2 == pytest.approx(math.pi / 2)
    assert a * b == pytest.approx(2)


class TestOracle:
    def test_zero_threshold(self):
        est = mc_oracle(TailKind.MAX_ABS, 0.0, paths=10**4, steps=10**3, seed=3)
        assert est.estimate == 1.0 and est.std_error == 0.0

    def test_parameter_validation(self):
        with pytest.raises(ValidationError):
            mc_oracle("maxabs", 1.0, paths=100, steps=10**3)
        with pytest.raises(ValidationError):
            mc_oracle("range", 1.0, paths=10**4, steps=10)

    def test_deterministic(self):
        a = mc_oracle("range", [1.0, 2.0], paths=10**4, steps=10**3, seed=11)
        brownian_extremes.cache_clear()
        b = mc_oracle("range", [1.0, 2.0], paths=10**4, steps=10**3, seed=11)
        np.testing.assert_array_equal(a.estimate, b.estimate)

    def test_extremes_bracket_zero(self):
        hi, lo = brownian_extremes(10**4, 10**3, 4)
        assert np.all(hi >= 0) and np.all(lo <= 0)

    def test_small_run_agrees(self):
        xs = np.array([0.75, 1.25, 2.0])
        for kind, tail in ((TailKind.MAX_ABS, tail_maxabs), (TailKind.RANGE, tail_range)):
            est = mc_oracle(kind, xs, paths=50_000, steps=1024, seed=9)
            for x, p, se in zip(xs, est.estimate, est.std_error):
                assert abs(p - tail(x).p) <= 4 * se

    @pytest.mark.slow
    @pytest.mark.parametrize("kind, target", [(TailKind.MAX_ABS, math.sqrt(math.pi / 2)),
                                              (TailKind.RANGE, 2 * math.sqrt(2 / math.pi))])
    def test_mean_statistic(self, kind, target):
        est = mc_oracle(kind, 1.0, ORACLE_PATHS, ORACLE_STEPS, ORACLE_SEED)
        assert abs(est.mean_statistic - target) < 0.01
