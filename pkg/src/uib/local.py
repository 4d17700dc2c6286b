"""Local empirical and quantile processes, their sup-norms and the oscillation modulus.

``D(s) = alpha_n(t + h s) - alpha_n(t)`` and ``D'(s) = beta_n(t + h s) - beta_n(t)``
are both a step function plus the drift ``-sqrt(n) h s``. The empirical
kind jumps by ``n**-0.5`` at ``(U_i - t) / h`` for every point in the
window ``(t, t + h]`` and is right-continuous. The quantile kind jumps by
``sqrt(n) (U_(j+1) - U_(j))`` at ``(j/n - t) / h`` and is left-continuous;
with ``t = 0`` its first jump sits at ``s = 0``, so ``D'(0) = 0`` while
``D'(0+) = sqrt(n) U_(1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .empirical import SortedSample, count_leq, count_less, order_stat, quantile_rank
from .errors import BandwidthTooSmall, DomainError, NonPositiveBandwidth, WindowOverflow
from .paths import StepPath, SupResult, combine, sup_abs

Kind = Literal["empirical", "quantile"]


@dataclass(frozen=True)
class LocalProcess:
    kind: Kind
    t: float
    h: float
    n: int
    events: np.ndarray
    jumps: np.ndarray
    drift_slope: float

    @property
    def left_continuous(self) -> bool:
        return self.kind == "quantile"

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.jumps)))
        side = "left" if self.left_continuous else "right"
        out = cum[np.searchsorted(self.events, s, side=side)] + self.drift_slope * s
        out = np.where(s == 0.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def to_path(self) -> StepPath:
        ev = self.events
        knots = np.union1d([0.0, 1.0], ev)
        cum = np.concatenate(([0.0], np.cumsum(self.jumps)))
        before = cum[np.searchsorted(ev, knots, side="left")]
        after = cum[np.searchsorted(ev, knots, side="right")]
        drift = self.drift_slope * knots
        left = before + drift
        right = after + drift
        if self.left_continuous:
            values = left.copy()
            right[-1] = left[-1]
        else:
            values = right.copy()
            left[0] = right[0]
        values[0] = 0.0
        left[0] = 0.0
        return StepPath(knots, left, right, values)


def _check_window(t: float, h: float) -> None:
    if not h > 0:
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {h}")
    if not 0.0 <= t < 1.0:
        raise DomainError(f"anchor must lie in [0, 1), got {t}")
    if t + h > 1.0:
        raise WindowOverflow(f"window (t, t+h] = ({t}, {t + h}] leaves [0, 1]")


def local_empirical(sample: SortedSample, t: float, h: float) -> LocalProcess:
    _check_window(t, h)
    i0 = int(count_leq(sample, t))
    i1 = int(count_leq(sample, t + h))
    pts = np.clip((sample.values[i0:i1] - t) / h, 0.0, 1.0)
    events, counts = np.unique(pts, return_counts=True)
    jumps = counts / sample.sqrt_n
    return LocalProcess("empirical", t, h, sample.n, events, jumps, -sample.sqrt_n * h)


def local_quantile(sample: SortedSample, t: float, h: float) -> LocalProcess:
    _check_window(t, h)
    n = sample.n
    j0 = int(quantile_rank(n, t))
    j1 = min(n - 1, int(math.ceil(n * (t + h))))
    j = np.arange(j0, j1 + 1)
    s = (j / n - t) / h
    keep = s < 1.0
    j, s = j[keep], np.clip(s[keep], 0.0, 1.0)
    jumps = sample.sqrt_n * (order_stat(sample, j + 1) - order_stat(sample, j))
    return LocalProcess("quantile", t, h, n, s, jumps, -sample.sqrt_n * h)


def log2fn(u: float) -> float:
    """Iterated logarithm ``log(log(max(u, 3)))``."""
    return math.log(math.log(max(u, 3.0)))


def normalizer(n: int, h: float) -> float:
    return math.sqrt(2.0 * h * log2fn(n))


def normalize(lp: LocalProcess) -> StepPath:
    return lp.to_path().scaled(1.0 / normalizer(lp.n, lp.h))


def sup_norm_result(path: StepPath | LocalProcess) -> SupResult:
    if isinstance(path, LocalProcess):
        path = path.to_path()
    return sup_abs(path)


def sup_norm(path: StepPath | LocalProcess) -> float:
    return sup_norm_result(path).value


def oscillation_modulus(sample: SortedSample, a: float, b: float) -> float:
    """sup over 0 <= s <= b, 0 <= s' <= a of |alpha_n(s + s') - alpha_n(s)|.

    Enumerates runs of consecutive order statistics. Upward excursions are
    windows that start just before a point (or at ``b``) and end on a point;
    downward ones start on a point (or at 0) and end just before the next
    point or after length ``a``. The result is the supremum, which is
    generally not attained.
    """
    if not (a > 0 and b > 0 and a + b <= 1.0):
        raise DomainError("need a > 0, b > 0 and a + b <= 1")
    n = sample.n
    u = np.concatenate(([0.0], sample.values, [np.inf]))  # u[0] = 0, u[n+1] = inf

    best = 0.0
    # upward: first included point i (1..n)
    m_b = int(count_leq(sample, b))
    idx = np.arange(1, m_b + 1)
    idx = idx[u[idx - 1] < u[idx]]  # window (s, ...] with s < U_i must exclude U_(i-1)
    starts = [(idx, u[idx], True)]
    if m_b < n:
        starts.append((np.array([m_b + 1]), np.array([b]), False))
    for first, base, limit in starts:
        c = 0
        alive = np.ones(first.size, dtype=bool)
        while alive.any():
            last = first + c
            alive &= last <= n
            if not alive.any():
                break
            span = u[np.minimum(last, n + 1)] - base
            alive &= (span < a) if limit else (span <= a)
            if alive.any():
                best = max(best, float(np.max((c + 1) - n * span[alive])))
            c += 1

    # attained windows (U_m - a, U_m] of full length; they cover gaps that round onto a exactly
    um = sample.values[sample.values - a <= b]
    if um.size:
        s0 = np.maximum(um - a, 0.0)
        cnt = count_leq(sample, um) - count_leq(sample, s0)
        best = max(best, float(np.max(cnt - n * (um - s0))))

    # downward: start s = U_(i-1) <= b, open window (s, e) holding c points
    i = np.arange(1, n + 2)
    i = i[u[i - 1] <= b]
    s = u[i - 1]
    c = 0
    alive = np.ones(i.size, dtype=bool)
    while alive.any():
        if c > 0:
            alive &= (i + c - 1 <= n)
            alive &= u[np.minimum(i + c - 1, n + 1)] < s + a
            if not alive.any():
                break
        e = np.minimum(s + a, u[np.minimum(i + c, n + 1)])
        val = n * (e - s) - c
        best = max(best, float(np.max(val[alive])))
        c += 1
    return best / math.sqrt(n)


@dataclass(frozen=True)
class ScalingCoefficients:
    a: float
    b: float
    d: float
    r: float
    n: int
    h: float


def scaling_coefficients(n: int, h: float) -> ScalingCoefficients:
    if n < 3:
        raise DomainError("n must be at least 3")
    if not h > 0:
        raise NonPositiveBandwidth("bandwidth must be positive")
    if n * h <= 1:
        raise BandwidthTooSmall(f"n h = {n * h} must exceed 1")
    ll = log2fn(n)
    a = math.sqrt(h * ll / n)
    b = math.log(n * h)
    d = 2.0 * ll + b
    return ScalingCoefficients(a=a, b=b, d=d, r=math.sqrt(a * d), n=n, h=h)


def bk_path(sample: SortedSample, h: float) -> StepPath:
    """``D_{n,h,0} + D'_{n,h,0}`` on the merged knot set."""
    return combine(local_empirical(sample, 0.0, h).to_path(), local_quantile(sample, 0.0, h).to_path())


def bahadur_kiefer_R(sample: SortedSample, h: float, method: str = "merged") -> float:
    """``|| D_{n,h,0} + D'_{n,h,0} ||``.

    ``method="merged"`` adds the two component paths; ``method="direct"``
    re-derives every one-sided limit from order statistics on the original
    scale ``u = h s`` and shares no code with the component paths.
    """
    if not h > 0:
        raise NonPositiveBandwidth("bandwidth must be positive")
    if h > 1:
        raise WindowOverflow("bandwidth must not exceed 1")
    if method == "merged":
        return sup_abs(bk_path(sample, h)).value
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")

    n = sample.n
    rn = math.sqrt(n)
    grid = np.arange(n + 1) / n
    pts = sample.values[(sample.values > 0) & (sample.values <= h)]
    us = np.union1d(np.union1d(pts, grid[grid < h]), [0.0, h])
    at0 = count_leq(sample, 0.0)
    k_val = np.clip(np.searchsorted(grid, us, side="left"), 0, n)  # F^<-(u) = U_(k), left-continuous
    k_next = np.clip(np.searchsorted(grid, us, side="right"), 0, n)  # F^<-(u+)
    emp_left = (count_less(sample, us) - at0) / n
    emp_right = (count_leq(sample, us) - at0) / n
    q_left = order_stat(sample, k_val)
    q_right = order_stat(sample, k_next)
    q_right[-1] = q_left[-1]  # s = 1 closes the domain; F^<- is left-continuous there
    emp_left[0] = 0.0
    q_left[0] = 0.0
    lo = rn * (emp_left + q_left - 2.0 * us)
    hi = rn * (emp_right + q_right - 2.0 * us)
    return float(max(np.max(np.abs(lo)), np.max(np.abs(hi))))
