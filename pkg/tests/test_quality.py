import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import linear_sse, naive_pearson, naive_ranks, naive_srcc, pair_tau_b
from mogpfusion.quality import (
    average_ranks,
    evaluate_report,
    krcc,
    logistic,
    logistic_fit,
    pcc,
    rmse,
    srcc,
)


def tied_vector(rng, n):
    return rng.integers(0, max(2, n // 3), n).astype(float) if rng.random() < 0.5 else rng.normal(size=n)


class TestRanks:
    def test_average_ranks(self):
        np.testing.assert_array_equal(average_ranks([10, 20, 20, 5]), [2, 3.5, 3.5, 1])

    def test_matches_counting_oracle(self, rng):
        for _ in range(100):
            x = tied_vector(rng, int(rng.integers(2, 50)))
            np.testing.assert_array_equal(average_ranks(x), naive_ranks(x))


class TestSRCC:
    def test_identical(self):
        assert srcc([1, 2, 3], [1, 2, 3]) == 1.0

    def test_reversed(self):
        assert srcc([1, 2, 3], [3, 2, 1]) == -1.0

    def test_ties_match_oracle(self, rng):
        for _ in range(300):
            n = int(rng.integers(3, 80))
            a, b = tied_vector(rng, n), tied_vector(rng, n)
            if np.ptp(a) == 0 or np.ptp(b) == 0:
                continue
            assert srcc(a, b) == pytest.approx(naive_srcc(a, b), abs=1e-12)

    def test_constant_input(self):
        with pytest.raises(ValueError):
            srcc([1, 1, 1], [1, 2, 3])


class TestKRCC:
    def test_one_swap(self):
        assert krcc([1, 2, 3], [1, 3, 2]) == 1 / 3

    def test_identical_and_reversed(self):
        assert krcc([4, 1, 7, 2], [4, 1, 7, 2]) == 1.0
        assert krcc([1, 2, 3, 4], [4, 3, 2, 1]) == -1.0

    def test_matches_pair_oracle_exactly(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 120))
            a, b = tied_vector(rng, n), tied_vector(rng, n)
            if np.ptp(a) == 0 or np.ptp(b) == 0:
                continue
            assert krcc(a, b) == pair_tau_b(list(a), list(b))

    def test_all_tied(self):
        with pytest.raises(ValueError):
            krcc([2, 2, 2], [1, 2, 3])


class TestPCCandRMSE:
    def test_identical(self):
        assert pcc([1, 2, 5], [1, 2, 5]) == pytest.approx(1.0)
        assert rmse([1, 2, 5], [1, 2, 5]) == 0.0

    def test_affine(self, rng):
        a = rng.normal(size=30)
        assert pcc(a, 2 * a + 7) == pytest.approx(1.0, abs=1e-15)

    def test_rmse_hand_value(self):
        assert rmse([0, 0], [3, 4]) == pytest.approx(math.sqrt(12.5), abs=1e-15)

    def test_pcc_oracle(self, rng):
        for _ in range(100):
            a, b = rng.normal(size=40), rng.normal(size=40)
            assert pcc(a, b) == pytest.approx(naive_pearson(list(a), list(b)), abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(ValueError):
            pcc([1, 1, 1], [1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rmse([1, 2], [1, 2, 3])


@given(st.lists(st.integers(-20, 20), min_size=3, max_size=30), st.integers(0, 2**31))
@settings(max_examples=200, deadline=None)
def test_rank_indices_invariant_under_monotone_maps(vals, seed):
    rng = np.random.default_rng(seed)
    a = np.array(vals, dtype=float)
    b = a + rng.integers(-3, 4, a.size)
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return
    for f in (np.exp, lambda v: v ** 3 + 2 * v, lambda v: np.arctan(v / 7)):
        assert srcc(f(a), b) == srcc(a, b)
        assert krcc(a, f(b)) == krcc(a, b)


@given(st.floats(0.01, 100), st.floats(-100, 100), st.integers(0, 2**31))
@settings(max_examples=100, deadline=None)
def test_pcc_positive_affine_invariance(scale, shift, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=25), rng.normal(size=25)
    assert pcc(scale * a + shift, b) == pytest.approx(pcc(a, b), abs=1e-12)


class TestLogistic:
    def test_exact_linear_subsumed(self, rng):
        x = rng.uniform(0, 1, 60)
        y = 3.0 * x - 1.5
        fit = logistic_fit(x, y)
        assert fit.sse <= 1e-8 * float(y @ y)

    @pytest.mark.parametrize("beta", [
        (5.0, 10.0, 0.5, 0.3, 1.0),
        (80.0, 8.0, 0.4, 2.0, 50.0),
        (2.0, 25.0, 0.7, 0.0, -1.0),
    ])
    def test_recovers_generating_curve(self, beta):
        x = np.random.default_rng(3).uniform(0, 1, 150)
        y = logistic(x, beta)
        fit = logistic_fit(x, y)
        assert fit.sse <= 1e-6 * float(np.sum((y - y.mean()) ** 2))

    def test_never_worse_than_line(self, rng):
        for _ in range(20):
            n = int(rng.integers(5, 80))
            x = rng.normal(size=n)
            y = np.tanh(2 * x) + 0.3 * rng.normal(size=n)
            assert logistic_fit(x, y).sse <= linear_sse(x, y) + 1e-9

    def test_rejects_short_or_nonfinite(self):
        with pytest.raises(ValueError):
            logistic_fit([1, 2, 3, 4], [1, 2, 3, 4])
        with pytest.raises(ValueError):
            logistic_fit([1, 2, 3, 4, np.nan], [1, 2, 3, 4, 5])

    def test_fit_object(self):
        x = np.linspace(0, 1, 30)
        fit = logistic_fit(x, 2 * x)
        np.testing.assert_allclose(fit(x), logistic(x, fit.beta))
        assert set(fit.to_dict()) == {"beta", "sse", "converged"}
        assert len(fit.to_dict()["beta"]) == 5


class TestReport:
    def test_identity(self, rng):
        y = rng.uniform(1, 9, 50)
        r = evaluate_report(y, y)
        assert r.srcc == 1.0 and r.krcc == 1.0
        assert r.pcc == pytest.approx(1.0, abs=1e-12)
        assert r.rmse <= 1e-8

    def test_monotone_transform(self, rng):
        y = rng.uniform(1, 9, 50)
        r = evaluate_report(np.log(y), y)
        assert r.srcc == 1.0 and r.krcc == 1.0

    def test_matches_oracles_given_fit(self, rng):
        obj = rng.normal(size=80)
        sub = 3 * np.tanh(obj) + 0.2 * rng.normal(size=80)
        r = evaluate_report(obj, sub)
        mapped = logistic(obj, r.logistic.beta)
        assert r.srcc == pytest.approx(naive_srcc(list(obj), list(sub)), abs=1e-9)
        assert r.krcc == pytest.approx(pair_tau_b(list(obj), list(sub)), abs=1e-9)
        assert r.pcc == pytest.approx(naive_pearson(list(mapped), list(sub)), abs=1e-9)
        assert r.rmse == pytest.approx(math.sqrt(np.mean((mapped - sub) ** 2)), abs=1e-9)

    def test_without_logistic(self, rng):
        obj, sub = rng.normal(size=30), rng.normal(size=30)
        r = evaluate_report(obj, sub, use_logistic=False)
        assert r.logistic is None
        assert r.pcc == pcc(obj, sub) and r.rmse == rmse(obj, sub)
        assert r.to_dict()["logistic"] is None

    def test_bounds(self, rng):
        r = evaluate_report(rng.normal(size=40), rng.normal(size=40))
        assert -1 <= r.srcc <= 1 and -1 <= r.krcc <= 1 and -1 <= r.pcc <= 1 and r.rmse >= 0
