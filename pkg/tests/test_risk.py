import time

import numpy as np
import pytest

from petcbound import (
    certify,
    epsilon_bounds,
    generate_dataset,
    load_certificate,
    monte_carlo_risk,
    split,
    train,
)
from petcbound.risk import RiskCertificate


def test_reference_table_values():
    start = time.perf_counter()
    cases = {99: 0.020, 212: 0.034, 325: 0.048}
    for s_star, expected in cases.items():
        _, hi = epsilon_bounds(10**4, s_star, beta=1e-6)
        assert hi == pytest.approx(expected, abs=1e-3)
    assert time.perf_counter() - start < 5.0


def test_zero_violations_lower_bound_is_zero():
    lo, hi = epsilon_bounds(1000, 0, beta=1e-6)
    assert lo == 0.0
    assert 0.0 < hi < 1.0


def test_all_violated_upper_bound_is_one():
    lo, hi = epsilon_bounds(50, 50, beta=1e-6)
    assert hi == 1.0
    assert 0.0 < lo < 1.0


def test_bounds_are_monotone_and_bracket_the_rate():
    n = 40
    prev_lo, prev_hi = -1.0, -1.0
    for k in range(n + 1):
        lo, hi = epsilon_bounds(n, k, beta=1e-3)
        assert 0.0 <= lo <= hi <= 1.0
        assert lo <= k / n <= hi
        assert lo >= prev_lo and hi >= prev_hi
        prev_lo, prev_hi = lo, hi


def test_interval_narrows_with_more_samples():
    widths = []
    for n in (100, 1000, 10000):
        lo, hi = epsilon_bounds(n, n // 100, beta=1e-6)
        widths.append(hi - lo)
    assert widths[0] > widths[1] > widths[2]


def test_large_counts_run_in_log_domain():
    lo, hi = epsilon_bounds(10**5, 10**4, beta=1e-6)
    assert np.isfinite(lo) and np.isfinite(hi)
    assert lo <= 0.1 <= hi


def test_domain_errors():
    with pytest.raises(ValueError):
        epsilon_bounds(0, 0)
    with pytest.raises(ValueError):
        epsilon_bounds(100, -1)
    with pytest.raises(ValueError):
        epsilon_bounds(100, 101)
    for bad_beta in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError):
            epsilon_bounds(100, 5, beta=bad_beta)


def test_certificate_roundtrip(tmp_path):
    cert = RiskCertificate(
        n_samples=100, s_star=3, beta=1e-6,
        eps_lo=0.01, eps_hi=0.2, confidence=1 - 3e-6,
    )
    path = tmp_path / "cert.json"
    cert.save(path)
    again = load_certificate(path)
    assert again == RiskCertificate(**{
        k: getattr(cert, k)
        for k in ("n_samples", "s_star", "beta", "eps_lo", "eps_hi", "confidence")
    })
    assert sorted(cert.to_config()) == [
        "N", "beta", "confidence", "eps_hi", "eps_lo", "s_star"
    ]


def test_certify_attaches_holdout_rates(benchmark, bench_ds_ell1):
    train_set, holdout = split(bench_ds_ell1, 0.8, seed=0)
    model, info = train(train_set, mode="conic")
    cert = certify(model, train_set, holdout, beta=1e-6)
    assert cert.n_samples == len(train_set)
    assert cert.confidence == 1.0 - 3e-6
    assert 0.0 <= cert.eps_lo <= cert.s_star / cert.n_samples <= cert.eps_hi <= 1.0
    assert cert.holdout_misclassification_rate <= cert.holdout_violation_rate
    assert cert.holdout_violation_rate <= cert.eps_hi


def test_certify_unseen_count_is_additive(benchmark):
    ds = generate_dataset(benchmark, 1, 500, seed=17)
    model, info = train(ds, mode="conic")
    base = certify(model, ds, None, beta=1e-6)
    bumped = certify(model, ds, None, beta=1e-6, unseen_count=5)
    assert bumped.s_star == base.s_star + 5
    assert bumped.n_samples == base.n_samples + 5
    lo, hi = epsilon_bounds(len(ds) + 5, base.s_star + 5, beta=1e-6)
    assert (bumped.eps_lo, bumped.eps_hi) == (lo, hi)
    with pytest.raises(ValueError):
        certify(model, ds, None, unseen_count=-1)


def test_certify_without_holdout_leaves_rates_unset(benchmark):
    ds = generate_dataset(benchmark, 1, 300, seed=23)
    model, _ = train(ds, mode="conic")
    cert = certify(model, ds, None)
    assert cert.holdout_violation_rate is None
    assert cert.holdout_misclassification_rate is None


def test_monte_carlo_rates(benchmark, bench_model_ell1):
    model, _ = bench_model_ell1
    mc = monte_carlo_risk(model, benchmark, ell=1, n_samples=4000, seed=99)
    assert mc["n_samples"] == 4000
    assert 0.0 <= mc["misclassification_rate"] <= mc["violation_rate"] <= 1.0
    lo, hi = mc["violation_ci"]
    assert lo <= mc["violation_rate"] <= hi
    again = monte_carlo_risk(model, benchmark, ell=1, n_samples=4000, seed=99)
    assert again == mc
