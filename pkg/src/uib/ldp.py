"""Bennett-type bounds, exact binomial tails and the local covariance structure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .local import log2fn

PSI_SERIES_CUTOFF = 1e-4
_LOG_2PI = math.log(2.0 * math.pi)


def psi(u: float) -> float:
    """``2 u**-2 ((1 + u) log(1 + u) - u)``, continuous at 0 with value 1."""
    if not u > -1.0:
        raise DomainError("psi is defined for u > -1")
    if abs(u) < PSI_SERIES_CUTOFF:
        # sum_k 2 (-u)^k / ((k+1)(k+2)); five terms reach 1e-20 here
        total = 0.0
        term = 1.0
        for k in range(6):
            total += 2.0 * term / ((k + 1) * (k + 2))
            term *= -u
        return total
    # the numerator cancels to O(u^2); extended precision keeps near-switch values within an ulp
    v = np.longdouble(u)
    return float(2 * ((1 + v) * np.log1p(v) - v) / (v * v))


def bennett_tail_bound(n: int, p: float, tdev: float) -> float:
    """Upper bound on ``P(Bin(n, p) >= n p + tdev)`` using the variance proxy ``n p``."""
    if not (0.0 < p < 1.0) or not tdev > 0 or n < 1:
        raise DomainError("need n >= 1, 0 < p < 1 and tdev > 0")
    mean = n * p
    return math.exp(-(tdev * tdev / (2.0 * mean)) * psi(tdev / mean))


def em_oscillation_bound(n: int, a: float, b: float, lam: float, eps: float, K: float) -> float:
    """Right-hand side of the exponential oscillation inequality for a caller-supplied constant ``K``.

    Diagnostic only: the constant is not known, so nothing here is a certified bound.
    """
    if not (0.0 < eps <= 0.5):
        raise DomainError("need 0 < eps <= 1/2")
    if not (0.0 < a < 0.25):
        raise DomainError("need 0 < a < 1/4")
    if not (b > 0 and a + b <= 1.0):
        raise DomainError("need b > 0 and a + b <= 1")
    if not lam > 0 or not K > 0 or n < 1:
        raise DomainError("need lambda > 0, K > 0, n >= 1")
    x = lam / (math.sqrt(n) * a)
    return K * (b / a) * math.exp(-(1.0 - eps) * lam * lam / (2.0 * a) * psi(x))


# -- exact binomial tails ---------------------------------------------------

_SFE = [math.lgamma(k + 1.0) - (k + 0.5) * math.log(k) + k - 0.5 * _LOG_2PI if k else 0.0 for k in range(16)]


def _stirlerr(k: float) -> float:
    """``log(k!) - log(sqrt(2 pi k) (k/e)^k)``."""
    if k <= 15:
        return _SFE[int(k)] if k == int(k) else math.lgamma(k + 1.0) - (k + 0.5) * math.log(k) + k - 0.5 * _LOG_2PI
    kk = k * k
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    if k > 500:
        return (s0 - s1 / kk) / k
    if k > 80:
        return (s0 - (s1 - s2 / kk) / kk) / k
    if k > 35:
        return (s0 - (s1 - (s2 - s3 / kk) / kk) / kk) / k
    return (s0 - (s1 - (s2 - (s3 - s4 / kk) / kk) / kk) / kk) / k


def _bd0(x: float, mu: float) -> float:
    """Deviance term ``x log(x/mu) + mu - x`` without cancellation."""
    if abs(x - mu) < 0.1 * (x + mu):
        v = (x - mu) / (x + mu)
        s = (x - mu) * v
        ej = 2.0 * x * v
        v2 = v * v
        for j in range(1, 1000):
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
        return s
    return x * math.log(x / mu) + mu - x


def binomial_log_pmf(n: int, p: float, k: int) -> float:
    """Saddle-point form of ``log P(Bin(n, p) = k)``, accurate for large ``n``."""
    q = 1.0 - p
    if k == 0:
        return n * math.log1p(-p)
    if k == n:
        return n * math.log(p)
    lc = _stirlerr(n) - _stirlerr(k) - _stirlerr(n - k) - _bd0(k, n * p) - _bd0(n - k, n * q)
    lf = _LOG_2PI + math.log(k) + math.log1p(-k / n)
    return lc - 0.5 * lf


def _log_sum_from(n: int, p: float, k0: int, direction: int) -> float:
    """log of ``sum_{j >= 0} pmf(k0 + direction * j)`` starting from a dominant term ``k0``."""
    log_odds = math.log(p) - math.log1p(-p)
    parts = [1.0]
    k = k0
    rel = 0.0  # log of current term relative to pmf(k0)
    chunk = 4096
    while True:
        if direction > 0:
            ks = np.arange(k, min(n, k + chunk))  # ratio pmf(k+1)/pmf(k)
            if ks.size == 0:
                break
            steps = np.log(n - ks) - np.log(ks + 1.0) + log_odds
        else:
            ks = np.arange(k, max(0, k - chunk), -1)  # ratio pmf(k-1)/pmf(k)
            if ks.size == 0:
                break
            steps = np.log(ks.astype(float)) - np.log(n - ks + 1.0) - log_odds
        logs = rel + np.cumsum(steps)
        parts.extend(np.exp(logs).tolist())
        rel = float(logs[-1])
        k = int(ks[-1]) + direction
        if rel < -60.0:
            break
    return binomial_log_pmf(n, p, k0) + math.log(math.fsum(parts))


def binomial_log_tail(n: int, p: float, kmin: int) -> float:
    """``log P(Bin(n, p) >= kmin)``; ``-inf`` when ``kmin > n``."""
    if not (0.0 < p < 1.0) or n < 0 or kmin > n + 1 or kmin < 0:
        raise DomainError("need 0 < p < 1 and 0 <= kmin <= n + 1")
    if kmin > n:
        return -math.inf
    if kmin <= 0:
        return 0.0
    mode = math.floor((n + 1) * p)
    if kmin >= mode:
        return _log_sum_from(n, p, kmin, +1)
    lower = math.exp(_log_sum_from(n, p, kmin - 1, -1))
    return math.log1p(-lower)


# -- LDP speed curves ---------------------------------------------------------

@dataclass(frozen=True)
class LdpPoint:
    n: int
    h: float
    speed: float
    normalized_log_tail: float
    bennett_bound: float
    kmin: int


@dataclass(frozen=True)
class LdpCurve:
    x: float
    points: list[LdpPoint] = field(default_factory=list)


def ldp_threshold(n: int, h: float, x: float) -> int:
    """Smallest count ``k`` with ``k >= n h + x sqrt(2 n h log2fn(n))``."""
    return math.ceil(n * h + x * math.sqrt(2.0 * n * h * log2fn(n)))


def ldp_rate_curve(x: float, schedule: Sequence[tuple[int, float]]) -> LdpCurve:
    """Normalized log-tails of ``D_{n,h,0}(1)`` at level ``x`` next to their Bennett lower bound.

    ``normalized_log_tail`` is ``-log P / log2fn(n)`` and should approach
    ``x**2`` (very slowly); Bennett guarantees it is at least ``bennett_bound``.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    pts = []
    for n, h in schedule:
        if not (0 < h < 1) or n * h <= 1:
            raise DomainError(f"need 0 < h < 1 and n h > 1, got n={n}, h={h}")
        ll = log2fn(n)
        kmin = ldp_threshold(n, h, x)
        lt = binomial_log_tail(n, h, min(kmin, n + 1))
        bound = x * x * psi(x * math.sqrt(2.0 * ll / (n * h)))
        pts.append(LdpPoint(n=n, h=h, speed=1.0 / ll, normalized_log_tail=-lt / ll, bennett_bound=bound, kmin=kmin))
    return LdpCurve(x=x, points=pts)


# -- covariance of local processes -------------------------------------------

@dataclass(frozen=True)
class CovSpec:
    h1: float
    h2: float
    s: float
    s2: float
    t: float = 0.0


def local_cov(spec: CovSpec) -> float:
    """Covariance of ``D_{n,h1,t}(s)`` and ``D_{n,h2,t}(s2)``; free of ``n`` and ``t``."""
    h1, h2, s, s2, t = spec.h1, spec.h2, spec.s, spec.s2, spec.t
    if not (h1 > 0 and h2 > 0 and 0 <= s <= 1 and 0 <= s2 <= 1 and 0 <= t < 1):
        raise DomainError("need positive bandwidths and s, s2 in [0, 1]")
    if h1 * s > 1 - t or h2 * s2 > 1 - t:
        raise DomainError("window leaves [0, 1]")
    return min(h1 * s, h2 * s2) - (h1 * s) * (h2 * s2)


def local_var(h: float, s: float, s2: float) -> float:
    return local_cov(CovSpec(h, h, s, s2))
