"""Piecewise-linear paths with jumps on [0, 1].

A :class:`StepPath` stores, at every knot, the left limit, the right limit
and the value taken at the knot. Between consecutive knots the path is
linear, running from ``right[j]`` to ``left[j + 1]``. Because of that, the
supremum of ``|path|`` over [0, 1] is the largest one-sided limit at a knot,
which is what every sup-norm here computes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class StepPath:
    knots: np.ndarray
    left: np.ndarray
    right: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        arrays = {name: np.array(getattr(self, name), dtype=float) for name in ("knots", "left", "right", "values")}
        k = arrays["knots"]
        if k.ndim != 1 or k.size < 2:
            raise DomainError("a path needs at least the knots 0 and 1")
        if k[0] != 0.0 or k[-1] != 1.0:
            raise DomainError("knots must start at 0 and end at 1")
        if np.any(np.diff(k) <= 0):
            raise DomainError("knots must be strictly increasing")
        for name in ("left", "right", "values"):
            if arrays[name].shape != k.shape:
                raise DomainError("knot arrays must have equal length")
        # limits from outside [0, 1] do not exist; pin them to the endpoint values
        arrays["left"][0] = arrays["values"][0]
        arrays["right"][-1] = arrays["values"][-1]
        for name, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def continuous(cls, knots, values) -> "StepPath":
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        return cls(knots, values.copy(), values.copy(), values.copy())

    @classmethod
    def linear(cls, slope: float) -> "StepPath":
        return cls.continuous([0.0, 1.0], [0.0, slope])

    @property
    def slopes(self) -> np.ndarray:
        return (self.left[1:] - self.right[:-1]) / np.diff(self.knots)

    def limits(self, s):
        """Left and right limits at arbitrary points of [0, 1]."""
        s = np.asarray(s, dtype=float)
        k = self.knots
        idx = np.searchsorted(k, s, side="left")
        on_knot = (idx < k.size) & (k[np.minimum(idx, k.size - 1)] == s)
        seg = np.clip(np.searchsorted(k, s, side="right") - 1, 0, k.size - 2)
        w = (s - k[seg]) / (k[seg + 1] - k[seg])
        inner = self.right[seg] + w * (self.left[seg + 1] - self.right[seg])
        j = np.minimum(idx, k.size - 1)
        lo = np.where(on_knot, self.left[j], inner)
        hi = np.where(on_knot, self.right[j], inner)
        return lo, hi

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        k = self.knots
        idx = np.minimum(np.searchsorted(k, s, side="left"), k.size - 1)
        on_knot = k[idx] == s
        lo, _ = self.limits(s)
        out = np.where(on_knot, self.values[idx], lo)
        return float(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "StepPath":
        return StepPath(self.knots, self.left * factor, self.right * factor, self.values * factor)

    def jumps(self) -> np.ndarray:
        """Largest discrepancy among the three knot values, per knot."""
        stack = np.vstack([self.left, self.right, self.values])
        return stack.max(axis=0) - stack.min(axis=0)

    def __add__(self, other: "StepPath") -> "StepPath":
        return combine(self, other, 1.0)

    def __sub__(self, other: "StepPath") -> "StepPath":
        return combine(self, other, -1.0)


def combine(p1: StepPath, p2: StepPath, sign: float = 1.0) -> StepPath:
    """``p1 + sign * p2`` on the merged knot set."""
    knots = np.union1d(p1.knots, p2.knots)
    l1, r1 = p1.limits(knots)
    l2, r2 = p2.limits(knots)
    v1 = np.asarray(p1(knots))
    v2 = np.asarray(p2(knots))
    return StepPath(knots, l1 + sign * l2, r1 + sign * r2, v1 + sign * v2)


@dataclass(frozen=True)
class SupResult:
    value: float
    attained: bool
    location: float


def sup_abs(path: StepPath) -> SupResult:
    """Exact sup over [0, 1] of ``|path|`` with an attainment flag."""
    one_sided = np.maximum(np.abs(path.left), np.abs(path.right))
    j = int(np.argmax(one_sided))
    best = float(one_sided[j])
    attained = bool(np.max(np.abs(path.values)) >= best)
    return SupResult(best, attained, float(path.knots[j]))


def sup_norm_diff(p1: StepPath, p2: StepPath) -> float:
    return sup_abs(combine(p1, p2, -1.0)).value
