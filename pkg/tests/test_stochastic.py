import math

import numpy as np
import pytest

from diamondlim import (
    empirical_rate,
    negativity_certificate,
    outcome_distribution,
    rate_trace,
    sample_path,
    slln_report,
    theoretical_rate,
    weight_grid,
)
from diamondlim.stochastic import SamplePath


def test_outcome_distribution_values():
    p = outcome_distribution(0.5).probabilities
    assert np.array_equal(p, np.array([0.25, 0.125, 0.125, 0.125, 0.125, 0.25]))
    for w in (0.1, 0.37, 0.9):
        q = outcome_distribution(w).probabilities
        assert q[0] == q[5] == 0.25
        assert q.sum() == pytest.approx(1.0, abs=1e-15)


def test_sample_path_empty():
    path = sample_path(1, 0.3, 0)
    assert path.n == 0
    assert path.counters.sum() == 0


def test_sample_path_deterministic():
    a = sample_path(42, 0.3, 5000)
    b = sample_path(42, 0.3, 5000)
    assert np.array_equal(a.digits, b.digits)
    assert np.array_equal(a.counters, b.counters)


def test_sample_path_streams_differ():
    a = sample_path(42, 0.3, 1000, stream=0)
    b = sample_path(42, 0.3, 1000, stream=1)
    assert not np.array_equal(a.digits, b.digits)


def test_counters_match_digits(rng):
    for seed in map(int, rng.integers(0, 10**6, size=10)):
        path = sample_path(seed, 0.42, 2000)
        recount = np.bincount(path.digits, minlength=7)[1:7]
        assert np.array_equal(recount, path.counters)
        assert path.counters.sum() == path.n
        assert set(np.unique(path.digits)) <= {1, 2, 3, 4, 5, 6}


def test_top_digit_frequency_band():
    # binomial standard error: 0.075 +- 3*sqrt(0.075*0.925/1e5)
    se3 = 3 * math.sqrt(0.075 * 0.925 / 1e5)
    for seed in range(5):
        path = sample_path(seed, 0.3, 100_000)
        assert abs(path.counters[1] / path.n - 0.075) < se3 + 1e-12


def test_slln_report_limits_and_deviations():
    path = sample_path(7, 0.3, 10_000)
    rows = slln_report(path)
    assert [r["limit"] for r in rows] == [0.25, 0.075, 0.075, 0.175, 0.175, 0.25]
    assert sum(r["deviation"] for r in rows) == pytest.approx(0.0, abs=1e-12)


def test_slln_deviations_shrink_with_n():
    # average max deviation over seeds must drop from n=1e3 to n=1e5
    def avg_max_dev(n):
        total = 0.0
        for seed in range(30):
            rows = slln_report(sample_path(seed, 0.3, n))
            total += max(abs(r["deviation"]) for r in rows)
        return total / 30

    assert avg_max_dev(100_000) < avg_max_dev(1000)


def test_empirical_rate_equal_weights_is_zero():
    path = sample_path(3, 0.4, 1000)
    assert empirical_rate(path, 0.4, 0.4) == 0.0


def test_empirical_rate_neutral_digits():
    digits = np.ones(100, dtype=np.uint8)
    counters = np.bincount(digits, minlength=7)[1:7].astype(np.int64)
    path = SamplePath(digits=digits, counters=counters, w=0.5, seed=0)
    assert empirical_rate(path, 0.2, 0.9) == 0.0


def test_empirical_rate_converges():
    theo = theoretical_rate(0.3, 0.6)
    for seed in range(5):
        path = sample_path(seed, 0.6, 100_000)
        assert empirical_rate(path, 0.3, 0.6) == pytest.approx(theo, abs=0.02)


def test_rate_trace_matches_batch_recomputation():
    path = sample_path(11, 0.6, 5000)
    trace = rate_trace(path, 0.3, 0.6, every=500)
    assert [row["n"] for row in trace] == list(range(500, 5001, 500))
    for row in trace:
        k = row["n"]
        prefix_digits = path.digits[:k]
        counters = np.bincount(prefix_digits, minlength=7)[1:7].astype(np.int64)
        prefix = SamplePath(digits=prefix_digits, counters=counters, w=0.6, seed=11)
        assert row["empirical_rate"] == pytest.approx(
            empirical_rate(prefix, 0.3, 0.6), abs=1e-12
        )


def test_theoretical_rate_values():
    assert theoretical_rate(0.5, 0.5) == 0.0
    # evaluated independently at high precision: -0.09602099658...
    assert theoretical_rate(0.3, 0.6) == pytest.approx(-0.096021, abs=5e-7)


def test_theoretical_rate_asymmetry_and_negativity():
    a = theoretical_rate(0.3, 0.6)
    b = theoretical_rate(0.6, 0.3)
    assert a != b
    assert a < 0 and b < 0


def test_negativity_on_line_grid():
    pairs = [(w, 0.5) for w in np.linspace(0.01, 0.99, 99) if w != 0.5]
    report = negativity_certificate(pairs)
    assert report.all_negative
    assert report.max_rate < 0


def test_rate_vanishes_second_order_at_equality():
    # rate(w' + h, w') -> 0 from below, shrinking ~h^2
    w2 = 0.5
    previous = None
    for k in range(1, 7):
        h = 10.0**-k
        r = theoretical_rate(w2 + h, w2)
        assert r < 0
        if previous is not None:
            assert abs(r) < abs(previous) / 50  # quadratic contact
        previous = r


def test_negativity_rejects_equal_pair():
    with pytest.raises(ValueError):
        negativity_certificate([(0.5, 0.5)])


def test_weight_grid_excludes_diagonal():
    pairs = weight_grid(10)
    assert len(pairs) == 90
    assert all(a != b for a, b in pairs)


def test_empirical_rate_within_three_sigma_band():
    # per-digit variance of the log-ratio increment under the sampling weight
    w, w2, n = 0.3, 0.6, 100_000
    lt, lb = math.log(w / w2), math.log((1 - w) / (1 - w2))
    p_top, p_bottom = w2 / 2, (1 - w2) / 2
    mean = p_top * lt + p_bottom * lb
    var = p_top * lt**2 + p_bottom * lb**2 - mean**2
    band = 3 * math.sqrt(var / n)
    for seed in range(5):
        path = sample_path(seed, w2, n)
        assert abs(empirical_rate(path, w, w2) - mean) < band
