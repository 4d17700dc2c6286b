"""Desk-scale experiment drivers: schedules, bandwidth grids and per-cell statistics.

Each driver draws one sample per ``n`` from the stream labelled
``("sample", n)``, fans the bandwidth cells out over a thread pool and
returns records in grid order, so results do not depend on the number of
workers.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .empirical import SeedSpec, SortedSample, generate_uniform, order_stat, quantile_rank
from .errors import DomainError
from .ldp import CovSpec, local_cov
from .local import (
    bahadur_kiefer_R,
    local_empirical,
    local_quantile,
    normalize,
    oscillation_modulus,
    scaling_coefficients,
    sup_norm,
)
from .paths import StepPath, sup_norm_diff
from .strassen import dist_to_ball, dist_to_product_ball

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
IDENTITY_GAP = 1.0 - 1.0 / SQRT2  # sup distance from (id, id) to the product ball


# -- schedules ------------------------------------------------------------------

@dataclass(frozen=True)
class BlockingSchedule:
    k_range: tuple[int, int]
    nk: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    @property
    def blocks(self) -> list[range]:
        """``N_k = {n_(k-1), ..., n_k - 1}`` for consecutive retained values."""
        return [range(a, b) for a, b in zip(self.nk, self.nk[1:])]


def blocking_value(k: int) -> int:
    return math.floor(math.exp(k * math.exp(-math.sqrt(math.log(k)))))


def blocking_sequence(k_min: int, k_max: int) -> BlockingSchedule:
    if k_min < 5:
        raise DomainError("the blocking subsequence starts at k = 5")
    if k_max < k_min:
        raise DomainError("need k_min <= k_max")
    nk, warnings = [], []
    for k in range(k_min, k_max + 1):
        v = blocking_value(k)
        if nk and v <= nk[-1]:
            warnings.append(f"k={k}: n_k={v} repeats the previous value and was dropped")
            continue
        nk.append(v)
    return BlockingSchedule(k_range=(k_min, k_max), nk=tuple(nk), warnings=tuple(warnings))


def geometric_schedule(gamma: float, j_min: int, j_max: int) -> list[int]:
    if not gamma > 1:
        raise DomainError("gamma must exceed 1")
    return sorted({math.floor(gamma**j) for j in range(j_min, j_max + 1)})


@dataclass(frozen=True)
class BandwidthGrid:
    rho: float
    h_lo: float
    h_hi: float
    R: int
    levels: tuple[float, ...]


def bandwidth_grid(h_lo: float, h_hi: float, rho: float) -> BandwidthGrid:
    """Geometric levels ``rho**l * h_lo`` for ``l < R`` plus the top level ``h_hi``."""
    if not rho > 1:
        raise DomainError("rho must exceed 1")
    if not (0 < h_lo < h_hi <= 0.5):
        raise DomainError(f"need 0 < h_lo < h_hi <= 1/2, got {h_lo}, {h_hi}")
    R = math.floor(math.log(h_hi / h_lo) / math.log(rho)) + 1
    raw = [h_lo * rho**l for l in range(R)] + [h_hi]
    levels: list[float] = []
    for h in sorted(raw):
        if h > h_hi:
            h = h_hi
        if levels and abs(h - levels[-1]) <= 1e-15 * h:
            continue
        levels.append(h)
    return BandwidthGrid(rho=rho, h_lo=h_lo, h_hi=h_hi, R=R, levels=tuple(levels))


# -- records ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    n: int
    h: float
    seed_label: str
    stats: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for key, v in self.stats.items():
            if not math.isfinite(v):
                raise DomainError(f"statistic {key} is not finite: {v}")


def thread_count() -> int:
    raw = os.environ.get("UIB_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise DomainError(f"UIB_THREADS must be an integer, got {raw!r}") from exc


def _pmap(fn: Callable, cells: Sequence) -> list:
    workers = thread_count()
    if workers == 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))


def _label(n: int) -> str:
    return f"sample/{n}"


def _sample(seed: SeedSpec, n: int) -> SortedSample:
    return generate_uniform(n, seed, ("sample", n))


def grid_for(n: int, a1: float, a2: float, rho: float, bandwidths: Sequence[float] | None = None) -> list[float]:
    if bandwidths is not None:
        return sorted(set(float(h) for h in bandwidths))
    return list(bandwidth_grid(n**-a1, n**-a2, rho).levels)


# -- bandwidth sweep of distances to the Strassen balls -------------------------

def sweep_cell(sample: SortedSample, t: float, h: float, targets: dict[str, StepPath] | None = None) -> dict[str, float]:
    eta = normalize(local_empirical(sample, t, h))
    stats = {"dist_S": dist_to_ball(eta, 1.0), "dist_sqrt2S": dist_to_ball(eta, SQRT2)}
    for name, g in (targets or {}).items():
        stats[f"target_{name}"] = sup_norm_diff(eta, g)
    return stats


def run_theorem1_sweep(
    ns: Sequence[int],
    seed: SeedSpec,
    a1: float = 0.7,
    a2: float = 0.3,
    rho: float = 1.05,
    t: float = 0.0,
    targets: dict[str, StepPath] | None = None,
    bandwidths: Sequence[float] | None = None,
) -> list[ExperimentRecord]:
    """Per ``(n, h)``: distances of the normalized local empirical process to the balls of radius 1 and sqrt 2.

    ``is_sup`` marks, per ``n``, the first level attaining the largest
    radius-sqrt-2 distance.
    """
    records = []
    for n in ns:
        sample = _sample(seed, n)
        hs = grid_for(n, a1, a2, rho, bandwidths)
        stats = _pmap(lambda h: sweep_cell(sample, t, h, targets), hs)
        top = int(np.argmax([s["dist_sqrt2S"] for s in stats]))
        for i, (h, st) in enumerate(zip(hs, stats)):
            st = {"level": float(i), **st, "is_sup": float(i == top)}
            records.append(ExperimentRecord("sweep", n, h, _label(n), st))
        log.info("sweep n=%d: sup dist_S=%.6g sup dist_sqrt2S=%.6g", n,
                 max(s["dist_S"] for s in stats), stats[top]["dist_sqrt2S"])
    return records


# -- joint behaviour over several bandwidth sequences ---------------------------

def identity_path() -> StepPath:
    return StepPath.linear(1.0)


def cross_covariance_mc(n: int, h1: float, h2: float, replicates: int, seed: SeedSpec,
                        method: str = "multinomial", t: float = 0.0) -> dict[str, float]:
    """Monte Carlo covariance of ``D_{n,h1,t}(1)`` and ``D_{n,h2,t}(1)``.

    ``method="multinomial"`` draws the window counts directly;
    ``method="uniforms"`` simulates full samples (slow, for cross-checks).
    """
    if not (0 < h1 <= h2) or t + h2 > 1 or replicates < 2:
        raise DomainError("need 0 < h1 <= h2, t + h2 <= 1 and at least two replicates")
    rng = seed.generator(("joint-cov", n))
    if method == "multinomial":
        counts = rng.multinomial(n, [h1, h2 - h1, 1.0 - h2], size=replicates)
        n1 = counts[:, 0].astype(float)
        n2 = n1 + counts[:, 1]
    elif method == "uniforms":
        n1 = np.empty(replicates)
        n2 = np.empty(replicates)
        for r in range(replicates):
            u = rng.random(n)
            n1[r] = np.count_nonzero((u > t) & (u <= t + h1))
            n2[r] = np.count_nonzero((u > t) & (u <= t + h2))
    else:
        raise ValueError(f"unknown method {method!r}")
    rn = math.sqrt(n)
    d1 = (n1 - n * h1) / rn
    d2 = (n2 - n * h2) / rn
    prod = (d1 - d1.mean()) * (d2 - d2.mean())
    emp = float(prod.sum() / (replicates - 1))
    se = float(prod.std(ddof=1) / math.sqrt(replicates))
    closed = local_cov(CovSpec(h1, h2, 1.0, 1.0, t))
    return {"cov_emp": emp, "cov_closed": closed, "cov_se": se, "cov_z": (emp - closed) / se}


def run_theorem2_joint(
    ns: Sequence[int],
    seed: SeedSpec,
    exponents: Sequence[float] = (0.8, 0.4),
    replicates: int = 10000,
    t: float = 0.0,
) -> list[ExperimentRecord]:
    """Per ``n``: product-ball distance of the ``k`` normalized paths and closeness to ``(id, ..., id)``.

    ``identity_gap`` is ``max_j ||eta_j - id||``; the triangle inequality
    forces ``identity_gap >= IDENTITY_GAP - product_dist`` for k = 2.
    """
    records = []
    for n in ns:
        sample = _sample(seed, n)
        hs = [n**-e for e in exponents]
        etas = [normalize(local_empirical(sample, t, h)) for h in hs]
        ident = identity_path()
        stats = {f"h_{j + 1}": h for j, h in enumerate(hs)}
        stats["product_dist"] = dist_to_product_ball(etas, 1.0)
        stats["identity_gap"] = max(sup_norm_diff(e, ident) for e in etas)
        stats["identity_floor"] = dist_to_product_ball([ident] * len(etas), 1.0)
        stats.update(cross_covariance_mc(n, hs[0], hs[1], replicates, seed, t=t))
        records.append(ExperimentRecord("joint", n, hs[0], _label(n), stats))
        log.info("joint n=%d: product_dist=%.6g identity_gap=%.6g", n, stats["product_dist"], stats["identity_gap"])
    return records


# -- Bahadur-Kiefer ratios ------------------------------------------------------

def run_theorem3_bk(
    ns: Sequence[int],
    seed: SeedSpec,
    a1: float = 0.7,
    a2: float = 0.3,
    rho: float = 1.05,
    bandwidths: Sequence[float] | None = None,
) -> list[ExperimentRecord]:
    records = []
    for n in ns:
        sample = _sample(seed, n)
        hs = grid_for(n, a1, a2, rho, bandwidths)

        def cell(h):
            coef = scaling_coefficients(n, h)
            R = bahadur_kiefer_R(sample, h, "merged")
            R_direct = bahadur_kiefer_R(sample, h, "direct")
            return {"R": R, "R_direct": R_direct, "r": coef.r, "bk_ratio": R / coef.r}

        stats = _pmap(cell, hs)
        top = max(s["bk_ratio"] for s in stats)
        for h, st in zip(hs, stats):
            records.append(ExperimentRecord("bk", n, h, _label(n), {**st, "sup_over_grid": top}))
        log.info("bk n=%d: sup ratio=%.6g", n, top)
    return records


# -- tail ratios and the pathwise quantile bound ----------------------------------

def quantile_window_max(sample: SortedSample, h: float) -> float:
    """``sup_{0 <= s <= 1} F_n^<-(h s)``: the quantile is nondecreasing, so it is the value at ``h``."""
    return float(order_stat(sample, quantile_rank(sample.n, h)))


def quantile_sup_dominated(sample: SortedSample, h: float) -> tuple[float, float, bool]:
    """Pathwise check ``||D'_{n,h,0}|| <= ||D_{n,F_n^<-(h),0}|| + n**-0.5``.

    Returns both sides and the flag. When ``F_n^<-(h) = 0`` the right window
    is empty and the right side is ``n**-0.5``.
    """
    lhs = sup_norm(local_quantile(sample, 0.0, h))
    hq = quantile_window_max(sample, h)
    if hq > 0:
        rhs = sup_norm(local_empirical(sample, 0.0, hq)) + 1.0 / sample.sqrt_n
    else:
        rhs = 1.0 / sample.sqrt_n
    return lhs, rhs, bool(lhs <= rhs + 1e-12 * max(1.0, rhs))


def run_tail_lemmas(
    ns: Sequence[int],
    seed: SeedSpec,
    a1: float = 0.7,
    a2: float = 0.3,
    rho: float = 1.05,
    eta: float = 2.0,
    bandwidths: Sequence[float] | None = None,
) -> list[ExperimentRecord]:
    records = []
    for n in ns:
        sample = _sample(seed, n)
        hs = grid_for(n, a1, a2, rho, bandwidths)

        def cell(h):
            coef = scaling_coefficients(n, h)
            width = min(eta * coef.a, 1.0 - h)
            lhs, rhs, ok = quantile_sup_dominated(sample, h)
            return {
                "lemma51_ratio": quantile_window_max(sample, h) / h,
                "lemma53_ratio": oscillation_modulus(sample, width, h) / coef.r,
                "lemma52_lhs": lhs,
                "lemma52_rhs": rhs,
                "lemma52_holds": float(ok),
            }

        for h, st in zip(hs, _pmap(cell, hs)):
            records.append(ExperimentRecord("lemmas", n, h, _label(n), st))
        log.info("lemmas n=%d done (%d cells)", n, len(hs))
    return records
