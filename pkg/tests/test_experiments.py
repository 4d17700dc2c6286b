import math

import mpmath
import numpy as np
import pytest

from uib.empirical import SeedSpec, build_sorted_sample, generate_uniform, quantile
from uib.errors import DomainError
from uib.experiments import (
    IDENTITY_GAP,
    bandwidth_grid,
    blocking_sequence,
    blocking_value,
    cross_covariance_mc,
    geometric_schedule,
    run_tail_lemmas,
    run_theorem1_sweep,
    run_theorem2_joint,
    run_theorem3_bk,
    sweep_cell,
)
from uib.ldp import CovSpec, local_cov
from uib.local import log2fn


def mp_blocking(k):
    with mpmath.workdps(50):
        return int(mpmath.floor(mpmath.exp(k * mpmath.exp(-mpmath.sqrt(mpmath.log(k))))))


def test_blocking_values_match_high_precision():
    assert blocking_value(5) == 4
    assert blocking_value(10) == 8
    for k in range(5, 301):
        assert blocking_value(k) == mp_blocking(k)


def test_blocking_schedule_dedup():
    sched = blocking_sequence(5, 12)
    assert sched.nk[:2] == (4, 5)
    assert all(a < b for a, b in zip(sched.nk, sched.nk[1:]))
    assert any("k=6" in w for w in sched.warnings)
    assert sched.blocks[0] == range(4, 5)
    with pytest.raises(DomainError):
        blocking_sequence(4, 10)
    with pytest.raises(DomainError):
        blocking_sequence(10, 9)


def test_blocking_ratio_tends_to_one():
    v = np.array([blocking_value(k) for k in range(100, 202)], dtype=float)
    r = v[:-1] / v[1:]
    assert np.all(np.diff(r) > 0) and np.all(r < 1)


def test_geometric_schedule():
    assert geometric_schedule(10, 2, 4) == [100, 1000, 10000]
    assert geometric_schedule(1.5, 0, 3) == [1, 2, 3]
    with pytest.raises(DomainError):
        geometric_schedule(1.0, 0, 3)


def test_bandwidth_grid_examples():
    g = bandwidth_grid(0.01, 0.04, 2.0)
    assert g.R == 3
    assert g.levels == (0.01, 0.02, 0.04)
    g = bandwidth_grid(1e-3, 1e-1, 1.05)
    assert g.R == math.floor(math.log(100) / math.log(1.05)) + 1 == 95
    assert len(g.levels) == 96
    assert g.levels[0] == 1e-3 and g.levels[-1] == 1e-1
    assert all(a < b for a, b in zip(g.levels, g.levels[1:]))
    with pytest.raises(DomainError):
        bandwidth_grid(0.01, 0.04, 1.0)
    with pytest.raises(DomainError):
        bandwidth_grid(0.04, 0.01, 2.0)
    with pytest.raises(DomainError):
        bandwidth_grid(0.01, 0.6, 2.0)


def test_sweep_empty_window_is_pure_drift():
    sample = build_sorted_sample(np.full(4, 0.9))
    st = sweep_cell(sample, 0.0, 0.5)
    slope = math.sqrt(4 * 0.5) / math.sqrt(2 * log2fn(4))
    assert slope > math.sqrt(2)
    # a line of slope k is at distance |k| - c from the radius-c ball (the value at s = 1 is the binding constraint)
    assert st["dist_S"] == pytest.approx(slope - 1.0, abs=1e-8)
    assert st["dist_sqrt2S"] == pytest.approx(slope - math.sqrt(2), abs=1e-8)


def test_sweep_records(monkeypatch):
    seed = SeedSpec(3)
    from uib.paths import StepPath

    targets = {"identity": StepPath.linear(1.0), "zero": StepPath.linear(0.0)}
    recs = run_theorem1_sweep([1000, 5000], seed, rho=1.2, targets=targets)
    grids = {n: len(bandwidth_grid(n**-0.7, n**-0.3, 1.2).levels) for n in (1000, 5000)}
    assert len(recs) == sum(grids.values())
    for r in recs:
        assert r.stats["dist_sqrt2S"] <= r.stats["dist_S"] + 1e-12
        assert r.stats["target_zero"] >= r.stats["dist_S"] - 1e-9  # zero lies in the ball
    for n in (1000, 5000):
        assert sum(r.stats["is_sup"] for r in recs if r.n == n) == 1
    monkeypatch.setenv("UIB_THREADS", "1")
    again = run_theorem1_sweep([1000, 5000], seed, rho=1.2, targets=targets)
    assert [r.stats for r in again] == [r.stats for r in recs]


def test_joint_records():
    recs = run_theorem2_joint([2000], SeedSpec(11), replicates=2000)
    (r,) = recs
    assert r.stats["identity_floor"] == pytest.approx(IDENTITY_GAP, abs=1e-8)
    # triangle inequality in the product norm
    assert r.stats["identity_gap"] >= IDENTITY_GAP - r.stats["product_dist"] - 1e-8
    assert abs(r.stats["cov_z"]) < 5


def test_cross_covariance_methods_agree():
    seed = SeedSpec(17)
    mult = cross_covariance_mc(1000, 0.01, 0.1, 20000, seed)
    unif = cross_covariance_mc(1000, 0.01, 0.1, 2000, seed, method="uniforms")
    closed = local_cov(CovSpec(0.01, 0.1, 1.0, 1.0))
    assert mult["cov_closed"] == closed == unif["cov_closed"]
    assert abs(mult["cov_z"]) < 5 and abs(unif["cov_z"]) < 5
    with pytest.raises(DomainError):
        cross_covariance_mc(1000, 0.1, 0.01, 100, seed)


def test_bk_records():
    recs = run_theorem3_bk([1000, 10000], SeedSpec(5), rho=1.3)
    for r in recs:
        assert 0 < r.stats["bk_ratio"] < math.inf
        assert abs(r.stats["R"] - r.stats["R_direct"]) <= 1e-12
        assert r.stats["sup_over_grid"] >= r.stats["bk_ratio"]


def test_tail_ratio_records():
    seed = SeedSpec(23)
    recs = run_tail_lemmas([1000], seed, rho=1.01)
    assert len(recs) >= 100
    sample = generate_uniform(1000, seed, ("sample", 1000))
    for r in recs:
        assert r.stats["lemma51_ratio"] >= quantile(sample, r.h) / r.h
        assert r.stats["lemma52_holds"] == 1.0
        assert r.stats["lemma53_ratio"] > 0


def test_quantile_ratio_empty_window():
    from uib.experiments import quantile_window_max

    sample = build_sorted_sample([0.5, 0.7, 0.9])
    assert quantile_window_max(sample, 0.1) / 0.1 == pytest.approx(5.0)


def test_pathwise_quantile_flag_on_thousand_cells():
    cells = 0
    for i, n in enumerate([200, 500, 1000, 2000, 5000, 10000, 20000]):
        recs = run_tail_lemmas([n], SeedSpec(2026 + i), rho=1.02)
        cells += len(recs)
        assert all(r.stats["lemma52_holds"] == 1.0 for r in recs)
    assert cells >= 1000
