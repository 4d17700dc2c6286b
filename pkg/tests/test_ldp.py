import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uib.errors import DomainError
from uib.ldp import (
    PSI_SERIES_CUTOFF,
    CovSpec,
    bennett_tail_bound,
    binomial_log_pmf,
    binomial_log_tail,
    em_oscillation_bound,
    ldp_rate_curve,
    ldp_threshold,
    local_cov,
    local_var,
    psi,
)
from uib.local import log2fn

# mpmath at 40 digits
PSI_ONE = 0.77258872223978124
PSI_1E6 = 0.99999966666683333
BENNETT_100_01_10 = 0.021006074709707943
EM_EXAMPLE = 5.8217260048429050


def mp_log_tail(n, p, kmin, dps=50):
    with mpmath.workdps(dps):
        p = mpmath.mpf(p)
        total = mpmath.fsum(mpmath.binomial(n, k) * p**k * (1 - p) ** (n - k) for k in range(kmin, n + 1))
        return float(mpmath.log(total))


def test_psi_values():
    assert psi(0.0) == 1.0
    assert psi(1.0) == pytest.approx(PSI_ONE, rel=1e-15)
    assert psi(1e-6) == pytest.approx(PSI_1E6, rel=1e-15)
    assert psi(1e-6) == pytest.approx(1 - 3.333e-7, abs=1e-10)
    with pytest.raises(DomainError):
        psi(-1.0)


def test_psi_continuity_and_monotonicity():
    for u in (PSI_SERIES_CUTOFF, -PSI_SERIES_CUTOFF):
        below = psi(math.nextafter(u, 0.0))
        assert abs(below - psi(u)) < 1e-12
    u = np.geomspace(1e-8, 1e3, 400)
    vals = [psi(x) for x in u]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_bennett_example():
    assert bennett_tail_bound(100, 0.1, 10) == pytest.approx(BENNETT_100_01_10, rel=1e-14)
    assert bennett_tail_bound(100, 0.1, 1e-9) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DomainError):
        bennett_tail_bound(100, 1.5, 1.0)


@pytest.mark.parametrize("n", [100, 1000, 10000])
@pytest.mark.parametrize("p", [0.01, 0.1, 0.3])
def test_bennett_dominates_exact_tail(n, p):
    sigma = math.sqrt(n * p * (1 - p))
    for k in range(1, 9):
        t = k * sigma
        kmin = math.ceil(n * p + t)
        exact = math.exp(binomial_log_tail(n, p, min(kmin, n + 1)))
        assert exact <= bennett_tail_bound(n, p, t)


def test_em_bound():
    assert em_oscillation_bound(10**4, 1e-3, 1e-2, 0.05, 0.5, 1.0) == pytest.approx(EM_EXAMPLE, rel=1e-13)
    lams = np.linspace(0.001, 1.0, 100)
    vals = [em_oscillation_bound(10**4, 1e-3, 1e-2, lam, 0.5, 1.0) for lam in lams]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        em_oscillation_bound(10**4, 0.25, 0.1, 0.05, 0.5, 1.0)
    with pytest.raises(DomainError):
        em_oscillation_bound(10**4, 0.1, 0.1, 0.05, 0.6, 1.0)


def test_binomial_tail_small_cases():
    assert binomial_log_tail(4, 0.5, 2) == pytest.approx(math.log(11 / 16), rel=1e-14)
    assert binomial_log_tail(4, 0.5, 5) == -math.inf
    assert binomial_log_tail(4, 0.5, 0) == 0.0
    with pytest.raises(DomainError):
        binomial_log_tail(4, 0.5, 6)
    with pytest.raises(DomainError):
        binomial_log_tail(4, 0.0, 1)


@pytest.mark.parametrize("n,p,kmin", [(10**4, 0.1, 1100), (10**4, 0.1, 1200), (10**4, 0.1, 950), (200, 0.3, 80), (50, 0.02, 1)])
def test_binomial_tail_matches_mpmath(n, p, kmin):
    assert binomial_log_tail(n, p, kmin) == pytest.approx(mp_log_tail(n, p, kmin), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 400), st.floats(0.001, 0.999), st.data())
def test_binomial_tail_property(n, p, data):
    kmin = data.draw(st.integers(1, n))
    assert binomial_log_tail(n, p, kmin) == pytest.approx(mp_log_tail(n, p, kmin), rel=1e-9, abs=1e-12)


def test_binomial_log_pmf_matches_mpmath():
    for n, p, k in [(10, 0.3, 3), (1000, 0.01, 40), (10**6, 1e-3, 1100), (30, 0.5, 0), (30, 0.5, 30)]:
        with mpmath.workdps(40):
            ref = float(mpmath.log(mpmath.binomial(n, k)) + k * mpmath.log(p) + (n - k) * mpmath.log(1 - mpmath.mpf(p)))
        assert binomial_log_pmf(n, p, k) == pytest.approx(ref, rel=1e-12)


def test_ldp_curve():
    n = 10**6
    curve = ldp_rate_curve(0.5, [(n, n**-0.5), (10**4, 0.01), (10**8, 10**-4)])
    for pt in curve.points:
        assert math.isfinite(pt.normalized_log_tail)
        assert pt.normalized_log_tail >= pt.bennett_bound
        assert pt.bennett_bound == pytest.approx(0.25 * psi(0.5 * math.sqrt(2 * log2fn(pt.n) / (pt.n * pt.h))))
        assert pt.speed == pytest.approx(1 / log2fn(pt.n))
    with pytest.raises(DomainError):
        ldp_rate_curve(0.5, [(100, 0.005)])
    with pytest.raises(DomainError):
        ldp_rate_curve(-1.0, [(100, 0.1)])


def test_ldp_threshold_lattice():
    for n, h, x in [(10**4, 0.01, 0.5), (10**6, 10**-3, 1.3), (777, 0.07, 0.2)]:
        thr = n * h + x * math.sqrt(2 * n * h * log2fn(n))
        if thr != math.floor(thr):
            assert ldp_threshold(n, h, x) == math.floor(thr) + 1


def test_local_cov():
    assert local_cov(CovSpec(0.01, 0.1, 1.0, 1.0)) == pytest.approx(0.009, rel=1e-14)
    assert local_cov(CovSpec(1e-3, 1e-2, 1.0, 1.0)) == pytest.approx(0.00099, rel=1e-14)
    h, s = 0.2, 0.7
    assert local_cov(CovSpec(h, h, s, s)) == pytest.approx(h * s * (1 - h * s))
    with pytest.raises(DomainError):
        local_cov(CovSpec(0.5, 0.5, 1.0, 1.0, t=0.6))


@settings(max_examples=100)
@given(st.floats(1e-4, 0.5), st.floats(1e-4, 0.5), st.floats(0, 1), st.floats(0, 1))
def test_local_cov_symmetry(h1, h2, s, s2):
    a = local_cov(CovSpec(h1, h2, s, s2))
    b = local_cov(CovSpec(h2, h1, s2, s))
    assert a == b
    assert local_cov(CovSpec(h1, h1, s, s2)) == pytest.approx(local_var(h1, s, s2), rel=1e-12, abs=1e-300)


def test_vanishing_correlation():
    for ratio in (1e-2, 1e-4, 1e-6):
        h2 = 0.1
        h1 = ratio * h2
        c = local_cov(CovSpec(h1, h2, 1.0, 1.0))
        corr = c / math.sqrt(local_var(h1, 1.0, 1.0) * local_var(h2, 1.0, 1.0))
        assert corr == pytest.approx(math.sqrt(ratio), rel=0.06)
