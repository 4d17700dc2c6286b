"""Run configuration: JSON in, validated :class:`RunConfig` out."""

from __future__ import annotations

import json
import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConstraintViolation, ParseError

Experiment = Literal["sweep", "joint", "bk", "lemmas", "ldp-curve", "project"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class BlockingSchedule(_Strict):
    kind: Literal["blocking"]
    k_min: int = 100
    k_max: int = 120


class GeometricSchedule(_Strict):
    kind: Literal["geometric"]
    gamma: float = 10.0
    j_min: int = 3
    j_max: int = 4


class PathSpec(_Strict):
    """A path given by its knots; ``left``/``right`` default to ``values`` (continuous path)."""

    knots: list[float]
    values: list[float]
    left: Optional[list[float]] = None
    right: Optional[list[float]] = None


class RunConfig(_Strict):
    experiment: Experiment
    run_seed: int = Field(0, ge=0, lt=2**64)
    n_schedule: Union[list[int], BlockingSchedule, GeometricSchedule] = Field(default_factory=lambda: [1000, 10000])
    a1: float = 0.7
    a2: float = 0.3
    bandwidths: Optional[list[float]] = None
    rho: float = 1.05
    t: float = 0.0
    eta: float = 2.0
    joint_exponents: list[float] = Field(default_factory=lambda: [0.8, 0.4])
    replicates: int = Field(10000, ge=2)
    targets: dict[str, PathSpec] = Field(default_factory=dict)
    x: float = 0.5
    ldp_exponent: float = 0.5
    paths: list[PathSpec] = Field(default_factory=list)
    radii: list[float] = Field(default_factory=lambda: [1.0, math.sqrt(2.0)])
    out_dir: Optional[str] = None


def resolve_schedule(cfg: RunConfig) -> list[int]:
    from .experiments import blocking_sequence

    sched = cfg.n_schedule
    if isinstance(sched, BlockingSchedule):
        return list(blocking_sequence(sched.k_min, sched.k_max).nk)
    if isinstance(sched, GeometricSchedule):
        vals = {math.floor(sched.gamma**j) for j in range(sched.j_min, sched.j_max + 1)}
        return sorted(vals)
    return sorted(set(sched))


def _check(cfg: RunConfig) -> None:
    from .experiments import bandwidth_grid

    if isinstance(cfg.n_schedule, BlockingSchedule) and cfg.n_schedule.k_min < 5:
        raise ConstraintViolation("n_schedule.k_min", "the blocking subsequence starts at k = 5")
    if isinstance(cfg.n_schedule, GeometricSchedule) and not cfg.n_schedule.gamma > 1:
        raise ConstraintViolation("n_schedule.gamma", "geometric schedule needs gamma > 1")
    ns = resolve_schedule(cfg)
    if not ns or min(ns) < 3:
        raise ConstraintViolation("n_schedule", "every sample size must be at least 3")
    if not 0.0 <= cfg.t < 1.0:
        raise ConstraintViolation("t", "anchor must lie in [0, 1)")
    if not cfg.rho > 1.0:
        raise ConstraintViolation("rho", "grid ratio must exceed 1")
    if not cfg.eta > 0:
        raise ConstraintViolation("eta", "eta must be positive")

    if cfg.experiment in ("sweep", "bk", "lemmas"):
        if cfg.experiment in ("bk", "lemmas") and cfg.t != 0.0:
            raise ConstraintViolation("t", "quantile-process experiments are anchored at t = 0")
        if cfg.bandwidths is not None:
            if not cfg.bandwidths or any(not (0 < h <= 1 - cfg.t) for h in cfg.bandwidths):
                raise ConstraintViolation("bandwidths", "each bandwidth must lie in (0, 1 - t]")
        else:
            if not 0 < cfg.a2 < cfg.a1 < 1:
                raise ConstraintViolation("a1", "need 0 < a2 < a1 < 1 so that n^-a1 shrinks faster than n^-a2")
            for n in ns:
                lo, hi = n ** -cfg.a1, n ** -cfg.a2
                if not lo < hi / 2:
                    raise ConstraintViolation(
                        "n_schedule", f"n={n}: lower bandwidth {lo:.3g} must stay below half the upper bandwidth {hi:.3g}"
                    )
                if hi > 0.5 or cfg.t + hi > 1.0:
                    raise ConstraintViolation("a2", f"n={n}: upper bandwidth {hi:.3g} must be at most 1/2 and fit after t")
                bandwidth_grid(lo, hi, cfg.rho)
        if cfg.experiment in ("bk", "lemmas"):
            for n in ns:
                h_min = min(cfg.bandwidths) if cfg.bandwidths else n**-cfg.a1
                if n * h_min <= 1:
                    raise ConstraintViolation("bandwidths", f"n={n}: need n h > 1 on the whole grid")
    if cfg.experiment == "joint":
        e = cfg.joint_exponents
        if len(e) < 2 or any(not 0 < x < 1 for x in e) or any(x <= y for x, y in zip(e, e[1:])):
            raise ConstraintViolation(
                "joint_exponents", "need at least two strictly decreasing exponents in (0, 1) (bandwidth ratios must vanish)"
            )
        for n in ns:
            if cfg.t + n ** -e[-1] > 1:
                raise ConstraintViolation("joint_exponents", f"n={n}: widest window leaves [0, 1]")
    if cfg.experiment == "ldp-curve":
        if not cfg.x > 0:
            raise ConstraintViolation("x", "threshold must be positive")
        if not 0 < cfg.ldp_exponent < 1:
            raise ConstraintViolation("ldp_exponent", "need 0 < exponent < 1 so that n h grows")
        for n in ns:
            if n * n ** -cfg.ldp_exponent <= 1:
                raise ConstraintViolation("ldp_exponent", f"n={n}: need n h > 1")
    if cfg.experiment == "project":
        if not cfg.paths:
            raise ConstraintViolation("paths", "project needs at least one path")
        if any(not r > 0 for r in cfg.radii):
            raise ConstraintViolation("radii", "radii must be positive")


def parse_config(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    try:
        cfg = RunConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        if first["type"] == "extra_forbidden":
            raise ParseError(f"unknown key {loc!r}") from exc
        raise ParseError(f"{loc}: {first['msg']}") from exc
    _check(cfg)
    return cfg


def serialize(cfg: RunConfig) -> str:
    return cfg.model_dump_json(indent=2)
