"""Hilbert energy, rate functions and sup-norm distances to Strassen balls.

The distance from a step path ``f`` to the ball ``{g : g(0) = 0, ||g||_H <= c}``
is found by bisection on the tube half-width ``tau``. At fixed ``tau`` the
feasible ``g`` live in a corridor around ``f``; since ``f`` is linear between
its knots and the cheapest ``g`` with prescribed knot values is linear too,
only the knots of ``f`` matter (see ``docs/knot_reduction.md``). The
minimum-energy path in the corridor is the taut string.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._taut import path_energy, taut_string_free_end
from .errors import BadPath, DuplicateGridPoint, InfeasibleTube, NonIncreasingGrid
from .paths import StepPath, sup_abs

MAX_BISECTIONS = 200


@dataclass(frozen=True)
class HilbertPath:
    """Piecewise-linear path through ``(knots[j], values[j])`` with ``values[0] = 0``."""

    knots: np.ndarray
    values: np.ndarray
    energy: float = field(init=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.shape != values.shape or knots.size < 1:
            raise BadPath("knots and values must have equal, nonzero length")
        if knots[0] != 0.0 or values[0] != 0.0:
            raise BadPath("a Hilbert path starts at the origin")
        if np.any(np.diff(knots) <= 0) or knots[-1] > 1.0:
            raise BadPath("knots must increase inside [0, 1]")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "energy", float(path_energy(knots, values)))

    def in_ball(self, radius: float = 1.0) -> bool:
        return self.energy <= radius * radius

    def to_step_path(self) -> StepPath:
        """Extend to [0, 1], constant after the last knot."""
        knots, values = self.knots, self.values
        if knots[-1] < 1.0:
            knots = np.append(knots, 1.0)
            values = np.append(values, values[-1])
        if knots.size == 1:
            knots, values = np.array([0.0, 1.0]), np.zeros(2)
        return StepPath.continuous(knots, values)


@dataclass(frozen=True)
class TubeSpec:
    knots: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def h_norm_sq(path: HilbertPath) -> float:
    return path.energy


def rate_J(path: StepPath | HilbertPath) -> float:
    if isinstance(path, HilbertPath):
        return path.energy
    if np.any(path.jumps() > 0):
        return math.inf
    return float(path_energy(path.knots, path.values))


def _check_grid(s: np.ndarray) -> None:
    if s.ndim != 1 or s.size < 1:
        raise NonIncreasingGrid("grid must be a nonempty vector")
    if s[0] <= 0:
        raise NonIncreasingGrid("grid points must be positive")
    d = np.diff(s)
    if np.any(d == 0):
        raise DuplicateGridPoint("grid points must be distinct")
    if np.any(d < 0):
        raise NonIncreasingGrid("grid must be increasing")


def fidi_rate(s, x) -> float:
    """Rate of the vector ``(g(s_1), ..., g(s_p))``: sum of squared increments over spacings."""
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_grid(s)
    if x.shape != s.shape:
        raise ValueError("s and x must have equal length")
    ds = np.diff(s, prepend=0.0)
    dx = np.diff(x, prepend=0.0)
    return float(np.sum(dx * dx / ds))


def fidi_rate_joint(s1, x1, s2, x2) -> float:
    return fidi_rate(s1, x1) + fidi_rate(s2, x2)


def min_energy_in_tube(tube: TubeSpec) -> tuple[float, HilbertPath]:
    """Least energy over paths with ``x[0] = 0`` and ``lower <= x <= upper`` at the knots."""
    s = np.asarray(tube.knots, dtype=float)
    lo = np.asarray(tube.lower, dtype=float).copy()
    hi = np.asarray(tube.upper, dtype=float).copy()
    if s[0] != 0.0 or np.any(np.diff(s) <= 0):
        raise NonIncreasingGrid("tube knots must start at 0 and increase")
    if np.any(lo > hi) or not lo[0] <= 0.0 <= hi[0]:
        raise InfeasibleTube("corridor is empty somewhere or excludes the origin")
    lo[0] = hi[0] = 0.0
    x = taut_string_free_end(s, lo, hi)
    path = HilbertPath(s, x)
    return path.energy, path


def _corridor(f: StepPath, tau: float):
    top = np.maximum(np.maximum(f.left, f.right), f.values)
    bot = np.minimum(np.minimum(f.left, f.right), f.values)
    return top - tau, bot + tau


def _taut_energy(s: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    return float(path_energy(s, taut_string_free_end(s, lo, hi)))


EnergyFn = Callable[[np.ndarray, np.ndarray, np.ndarray], float]


def tube_min_energy(f: StepPath, tau: float, energy_fn: EnergyFn = _taut_energy) -> float:
    """Least energy of a ``g`` with ``g(0) = 0`` within ``tau`` of ``f``; ``inf`` if none exists."""
    lo, hi = _corridor(f, tau)
    if np.any(lo > hi) or not lo[0] <= 0.0 <= hi[0]:
        return math.inf
    lo = lo.copy()
    hi = hi.copy()
    lo[0] = hi[0] = 0.0
    return energy_fn(f.knots, lo, hi)


def _check_origin(f: StepPath) -> None:
    if f.values[0] != 0.0:
        raise BadPath("path must vanish at 0")


def _bisect(feasible, floor: float, ceil: float) -> float:
    tol = 1e-9 * max(1.0, ceil)
    if floor >= ceil or feasible(floor):
        return min(floor, ceil)
    lo, hi = floor, ceil
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _bracket(f: StepPath) -> tuple[float, float]:
    floor = max(float(np.max(f.jumps())) / 2.0, abs(float(f.right[0])))
    return floor, sup_abs(f).value


def dist_to_ball(f: StepPath, c: float = 1.0, energy_fn: EnergyFn = _taut_energy) -> float:
    """sup-norm distance from ``f`` to ``c`` times the Strassen ball."""
    if not c > 0:
        raise ValueError("radius must be positive")
    _check_origin(f)
    floor, ceil = _bracket(f)
    return _bisect(lambda tau: tube_min_energy(f, tau, energy_fn) <= c * c, floor, ceil)


def dist_to_product_ball(fs: Sequence[StepPath], c: float = 1.0, energy_fn: EnergyFn = _taut_energy) -> float:
    """Distance in the max-of-sup-norms from ``(f_1, ..., f_k)`` to ``{sum ||g_j||_H^2 <= c^2}``."""
    if not fs:
        raise ValueError("need at least one component")
    if not c > 0:
        raise ValueError("radius must be positive")
    for f in fs:
        _check_origin(f)
    brackets = [_bracket(f) for f in fs]
    floor = max(b[0] for b in brackets)
    ceil = max(b[1] for b in brackets)
    budget = c * c

    def feasible(tau):
        total = 0.0
        for f in fs:
            total += tube_min_energy(f, tau, energy_fn)
            if total > budget:
                return False
        return True

    return _bisect(feasible, floor, ceil)


def staircase(slope: float, steps: int) -> StepPath:
    """Right-continuous step approximation of ``s -> slope * s`` with ``steps`` jumps."""
    knots = np.linspace(0.0, 1.0, steps + 1)
    vals = slope * knots
    left = np.concatenate(([0.0], vals[:-1]))
    return StepPath(knots, left, vals.copy(), vals.copy())
