"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines; every
criterion asserts both its numeric tolerance and its runtime budget.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from diamondlim import (
    LipschitzFunction,
    PointAddress,
    affinity_factor,
    build_level,
    doubling_estimate,
    empirical_rate,
    hellinger_affinity,
    level_masses,
    negativity_certificate,
    poincare_estimate,
    poincare_ratio,
    project_point,
    sample_path,
    slln_limits,
    theoretical_rate,
    truncate,
    tv_distance,
    weight_grid,
)

W_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)


def report(name, ok, budget, elapsed, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({elapsed:.1f}s / budget {budget:.0f}s)"
    print(line)
    assert ok, line
    assert elapsed < budget, f"{name} exceeded its runtime budget: {elapsed:.1f}s"


def test_criterion_1_exact_identities():
    t0 = time.time()
    worst_total = 0.0
    worst_child = 0.0
    for w in W_GRID:
        for level in range(9):
            masses = level_masses(level, w)
            worst_total = max(worst_total, abs(float(masses.sum()) - 1.0))
            if level > 0:
                coarse = level_masses(level - 1, w)
                residual = np.abs(masses.reshape(-1, 6).sum(axis=1) - coarse).max()
                worst_child = max(worst_child, float(residual))
    rng = np.random.default_rng(1)
    compat_ok = True
    for _ in range(10_000):
        n = int(rng.integers(0, 9))
        word = "".join(str(d) for d in rng.integers(1, 7, size=n))
        offset = Fraction(int(rng.integers(0, 8 * 4**n + 1)), 8 * 4**n) * Fraction(1, 4**n)
        p = PointAddress(word, offset)
        k = int(rng.integers(0, n + 1))
        m = int(rng.integers(0, k + 1))
        if truncate(truncate(word, k), m) != truncate(word, m):
            compat_ok = False
            break
        if project_point(project_point(p, k), m) != project_point(p, m):
            compat_ok = False
            break
    ok = worst_total < 1e-12 and worst_child < 1e-12 and compat_ok
    report(
        "criterion 1 exact identities",
        ok,
        120,
        time.time() - t0,
        f"max |mass-1|={worst_total:.2e}, max child residual={worst_child:.2e}, "
        f"projection compatibility exact on 10^4 addresses: {compat_ok}",
    )


def test_criterion_2_rate():
    t0 = time.time()
    target = theoretical_rate(0.3, 0.6)
    assert abs(target - (-0.096021)) < 5e-7
    rates = []
    each_ok = True
    for seed in range(1, 21):
        path = sample_path(seed, 0.6, 100_000)
        r = empirical_rate(path, 0.3, 0.6)
        rates.append(r)
        if abs(r - (-0.096021)) > 0.02:
            each_ok = False
    mean = sum(rates) / len(rates)
    mean_ok = abs(mean - (-0.096021)) <= 0.005
    report(
        "criterion 2 likelihood-rate",
        mean_ok and each_ok,
        10,
        time.time() - t0,
        f"mean={mean:.6f} (target -0.096021 +-0.005), all 20 runs within +-0.02: {each_ok}",
    )


def test_criterion_3_digit_frequencies():
    t0 = time.time()
    n = 100_000
    limits = slln_limits(0.3)
    se = np.sqrt(limits * (1 - limits) / n)
    good = 0
    for seed in range(100):
        path = sample_path(seed, 0.3, n)
        freqs = path.counters / n
        if np.all(np.abs(freqs - limits) <= 4 * se):
            good += 1
    report(
        "criterion 3 digit frequencies",
        good >= 99,
        30,
        time.time() - t0,
        f"{good}/100 runs with all six frequencies within 4 standard errors",
    )


def test_criterion_4_rate_negativity():
    t0 = time.time()
    cert = negativity_certificate(weight_grid(50, 0.02, 0.98))
    report(
        "criterion 4 rate negativity",
        cert.all_negative,
        1,
        time.time() - t0,
        f"{cert.n_pairs} pairs, max rate {cert.max_rate:.3e} at {cert.worst_pair}",
    )


def test_criterion_5_singularity_certificates():
    t0 = time.time()
    worst_residual = 0.0
    for pair in ((0.25, 0.75), (0.1, 0.9)):
        rho = affinity_factor(*pair)
        for level in range(1, 9):
            worst_residual = max(
                worst_residual, abs(hellinger_affinity(level, *pair) - rho**level)
            )
    tv_values = [tv_distance(level, 0.1, 0.9) for level in range(1, 9)]
    monotone = all(b >= a - 1e-13 for a, b in zip(tv_values, tv_values[1:]))
    tv8 = tv_values[-1]
    bound = 2 * (1 - 0.8**8)
    ok = worst_residual < 1e-10 and monotone and tv8 > 1.6 and tv8 >= bound - 1e-12
    report(
        "criterion 5 singularity certificates",
        ok,
        120,
        time.time() - t0,
        f"max affinity residual={worst_residual:.2e}, tv monotone={monotone}, "
        f"tv level 8 (0.1,0.9)={tv8:.4f} > 1.6 (closed-form bound {bound:.4f})",
    )


def test_criterion_6_doubling_stability():
    t0 = time.time()
    details = []
    ok = True
    for w in (0.3, 0.5):
        maxima = {}
        for level in range(3, 7):
            g = build_level(level)
            maxima[level] = doubling_estimate(g, w, samples=1000, seed=1).max_ratio
        for a, b in ((4, 5), (5, 6)):
            rel = abs(maxima[b] - maxima[a]) / maxima[a]
            ok = ok and rel < 0.15
            details.append(f"w={w} {a}->{b}: {rel:.1%}")
    report(
        "criterion 6 doubling stability",
        ok,
        300,
        time.time() - t0,
        "; ".join(details),
    )


def test_criterion_7_oscillation_stability():
    t0 = time.time()
    maxima = {}
    for level in range(2, 7):
        g = build_level(level)
        maxima[level] = poincare_estimate(g, 0.3, trials=1000, lam=2, seed=1).max_ratio
    cap = 3 * maxima[2]
    ok = all(v <= cap for v in maxima.values())
    report(
        "criterion 7 oscillation stability",
        ok,
        600,
        time.time() - t0,
        f"per-level maxima {[round(maxima[k], 3) for k in sorted(maxima)]}, "
        f"all <= 3x level-2 value {cap:.3f}",
    )


def test_criterion_8_level_zero_closed_form():
    t0 = time.time()
    g = build_level(0)
    f = LipschitzFunction(g, np.array([0.0, 1.0]))
    center = PointAddress("", Fraction(1, 2))
    ratio = poincare_ratio(g, f, 0.7, center, Fraction(1, 2), lam=2)
    ok = ratio is not None and abs(ratio - 0.5) < 1e-12
    report(
        "criterion 8 level-0 closed form",
        ok,
        10,
        time.time() - t0,
        f"full-interval ratio = {ratio!r} (target 0.5 +- 1e-12)",
    )
