"""Uniform samples and the four classical processes.

All evaluations use order-statistic arithmetic on a sorted copy of the
sample. Increments count points in half-open intervals ``(a, b]``, so the
empirical distribution function is right-continuous and its inverse is
left-continuous.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmptySample, OutOfUnitInterval, ZeroCount


@dataclass(frozen=True)
class SortedSample:
    values: np.ndarray
    n: int

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def sqrt_n(self) -> float:
        return math.sqrt(self.n)


@dataclass(frozen=True)
class SeedSpec:
    """Root seed of a run plus the stream labels already handed out."""

    run_seed: int
    stream_labels: tuple[tuple[str, int], ...] = field(default=())

    def child(self, label: tuple[str, int]) -> np.random.SeedSequence:
        name, index = label
        if index < 0:
            raise DomainError("stream index must be non-negative")
        # blake2b keeps the name -> key map stable across interpreter runs (hash() is salted)
        name_key = int.from_bytes(hashlib.blake2b(name.encode(), digest_size=8).digest(), "little")
        return np.random.SeedSequence(entropy=self.run_seed & (2**64 - 1), spawn_key=(name_key, int(index)))

    def generator(self, label: tuple[str, int]) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.child(label)))


def build_sorted_sample(raw) -> SortedSample:
    arr = np.asarray(raw, dtype=float).ravel()
    if arr.size == 0:
        raise EmptySample("sample must be nonempty")
    bad = np.flatnonzero(~((arr >= 0.0) & (arr <= 1.0)))
    if bad.size:
        raise OutOfUnitInterval(int(bad[0]))
    return SortedSample(values=np.sort(arr, kind="stable"), n=int(arr.size))


def generate_uniform(n: int, seed: SeedSpec, label: tuple[str, int]) -> SortedSample:
    """Draw ``n`` uniforms from the Philox stream of ``(seed, label)``, sorted."""
    if n < 1:
        raise ZeroCount("n must be at least 1")
    u = seed.generator(label).random(n)
    return SortedSample(values=np.sort(u), n=int(n))


def _check_unit(t):
    t = np.asarray(t, dtype=float)
    if np.any(~((t >= 0.0) & (t <= 1.0))):
        raise DomainError("argument must lie in [0, 1]")
    return t


def count_leq(sample: SortedSample, x):
    return np.searchsorted(sample.values, x, side="right")


def count_less(sample: SortedSample, x):
    return np.searchsorted(sample.values, x, side="left")


def ecdf(sample: SortedSample, t):
    t = _check_unit(t)
    out = count_leq(sample, t) / sample.n
    return float(out) if out.ndim == 0 else out


def quantile_rank(n: int, t):
    """Smallest integer k >= 0 with fl(k/n) >= t.

    This is ceil(n t) corrected for rounding, so that the Galois relation
    with :func:`ecdf` holds exactly in floating point.
    """
    t = np.asarray(t, dtype=float)
    k = np.ceil(n * t)
    k = np.where(k / n < t, k + 1, k)
    k = np.where((k >= 1) & ((k - 1) / n >= t), k - 1, k)
    return np.clip(k, 0, n).astype(np.int64)


def order_stat(sample: SortedSample, k):
    """k-th order statistic with the convention U_(0) = 0."""
    k = np.asarray(k, dtype=np.int64)
    padded = np.concatenate(([0.0], sample.values))
    return padded[k]


def quantile(sample: SortedSample, t):
    t = _check_unit(t)
    out = order_stat(sample, quantile_rank(sample.n, t))
    return float(out) if out.ndim == 0 else out


def alpha(sample: SortedSample, t):
    t = _check_unit(t)
    out = sample.sqrt_n * (count_leq(sample, t) / sample.n - t)
    return float(out) if np.ndim(out) == 0 else out


def beta(sample: SortedSample, t):
    t = _check_unit(t)
    out = sample.sqrt_n * (order_stat(sample, quantile_rank(sample.n, t)) - t)
    return float(out) if np.ndim(out) == 0 else out


def kolmogorov_statistic(sample: SortedSample) -> float:
    """sup_t |F_n(t) - t|, exact from order statistics."""
    i = np.arange(1, sample.n + 1)
    u = sample.values
    return float(max(np.max(i / sample.n - u), np.max(u - (i - 1) / sample.n)))
