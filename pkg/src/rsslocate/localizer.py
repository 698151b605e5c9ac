"""Linearized least-squares BS position estimate and exponent grid search.

With ``w_i = P_i ** (2 / n)`` each measurement contributes one row

    [2 w_i p_i, 2 w_i q_i, -w_i] . [x, y, S] = w_i (p_i^2 + q_i^2) - P0 ** (2 / n)

where ``S`` stands in for ``x^2 + y^2`` and is solved as a free unknown.
The exponent is picked from a bounded grid by comparing, for every epoch,
the ML distance from RSS against the distance to the LSQ position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rsslocate.errors import AllDegenerateError, InsufficientDataError, RankDeficientError
from rsslocate.pathloss import RssMeasurement

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class PleGrid:
    n_min: float = 1.0
    n_max: float = 5.0
    step: float = 0.1

    def __post_init__(self):
        if not (0 < self.n_min <= self.n_max) or not self.step > 0:
            raise ValueError(f"invalid exponent grid {self}")

    def candidates(self) -> np.ndarray:
        # integer stepping so that 3.0 is exactly 3.0, not 3.0000000000000004
        count = int(round((self.n_max - self.n_min) / self.step)) + 1
        return np.round(self.n_min + self.step * np.arange(count), 10)


@dataclass(frozen=True)
class ThetaEstimate:
    x: float
    y: float
    s: float
    n_used: float
    condition_diagnostic: float

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class PleSearchResult:
    n_opt: float
    estimate: ThetaEstimate
    cost_curve: tuple[tuple[float, float], ...]


def _arrays(measurements: Sequence[RssMeasurement]):
    if len(measurements) == 0:
        raise InsufficientDataError("no measurements")
    pos = np.array([m.position for m in measurements], dtype=float).reshape(-1, 2)
    power = np.array([m.linear_power for m in measurements], dtype=float)
    return pos, power


def _system(pos: np.ndarray, power: np.ndarray, p0: float, n_j):
    """Rows for one exponent, or a stack of systems when ``n_j`` is an array."""
    n_j = np.atleast_1d(np.asarray(n_j, dtype=float))[:, None]
    w = power ** (2.0 / n_j)
    p, q = pos[:, 0], pos[:, 1]
    A = np.stack((2.0 * w * p, 2.0 * w * q, -w), axis=-1)
    b = w * (p * p + q * q) - p0 ** (2.0 / n_j)
    return A, b


def build_system(measurements: Sequence[RssMeasurement], p0: float, n_j: float):
    """Return ``(A, b)`` with one row per measurement, in input order."""
    if not n_j > 0 or not p0 > 0:
        raise ValueError(f"need n_j > 0 and p0 > 0, got n_j={n_j}, p0={p0}")
    pos, power = _arrays(measurements)
    A, b = _system(pos, power, p0, float(n_j))
    return A[0], b[0]


def _solve_stack(A: np.ndarray, b: np.ndarray):
    """Solve a stack of ``(m, 3)`` systems at once.

    Returns ``(theta, cond, rank)``; ``theta`` rows are NaN where rank < 3.
    """
    if A.shape[-2] < 3:
        raise InsufficientDataError(f"need at least 3 rows, got {A.shape[-2]}")
    # equilibrate columns so the rank test is not fooled by units
    scale = np.linalg.norm(A, axis=-2, keepdims=True)
    usable = np.all((scale > 0) & np.isfinite(scale), axis=(-2, -1))
    scale = np.where(usable[:, None, None], scale, 1.0)
    As = np.where(usable[:, None, None], A / scale, 0.0)
    U, sv, Vt = np.linalg.svd(As, full_matrices=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        rank = np.sum(sv > RANK_RTOL * sv[:, :1], axis=-1)
        rank = np.where(usable, rank, 0)
        coef = np.einsum("kmi,km->ki", U, b) / sv
        theta = np.einsum("kij,ki->kj", Vt, coef) / scale[:, 0, :]
        cond = sv[:, 0] / sv[:, -1]
    ok = rank >= 3
    theta[~ok] = np.nan
    cond = np.where(ok, cond, np.inf)
    return theta, cond, rank


def _solve(A: np.ndarray, b: np.ndarray):
    theta, cond, rank = _solve_stack(A[None], b[None])
    if rank[0] < 3:
        raise RankDeficientError(f"numerical rank {rank[0]} < 3 (collinear receiver positions?)", rank=int(rank[0]))
    return theta[0], float(cond[0])


def solve_lsq(A, b, n_used: float = math.nan) -> ThetaEstimate:
    """Minimum-norm-residual solution of ``A theta = b`` via SVD.

    ``condition_diagnostic`` is the 2-norm condition number of the
    column-equilibrated ``A``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    theta, cond = _solve(A, b)
    return ThetaEstimate(float(theta[0]), float(theta[1]), float(theta[2]), float(n_used), cond)


def estimate_position(measurements: Sequence[RssMeasurement], p0: float, n_j: float) -> ThetaEstimate:
    A, b = build_system(measurements, p0, n_j)
    return solve_lsq(A, b, n_used=n_j)


def _costs(pos, power, p0, candidates):
    """Discrepancy cost and solution for each candidate; inf cost where degenerate."""
    candidates = np.asarray(candidates, dtype=float)
    A, b = _system(pos, power, p0, candidates)
    theta, cond, rank = _solve_stack(A, b)
    d_direct = (p0 / power) ** (1.0 / candidates[:, None])
    d_lsq = np.hypot(pos[:, 0] - theta[:, :1], pos[:, 1] - theta[:, 1:2])
    cost = np.sum((d_direct - d_lsq) ** 2, axis=-1)
    cost[~np.isfinite(cost)] = np.inf
    return cost, theta, cond, rank


def discrepancy_cost(measurements: Sequence[RssMeasurement], p0: float, n_j: float) -> float:
    """Sum over epochs of squared (ML distance - distance to LSQ position).

    Raises the solver errors; :func:`ple_grid_search` turns rank deficiency
    into an infinite cost.
    """
    if not n_j > 0 or not p0 > 0:
        raise ValueError(f"need n_j > 0 and p0 > 0, got n_j={n_j}, p0={p0}")
    pos, power = _arrays(measurements)
    cost, _, _, rank = _costs(pos, power, p0, [float(n_j)])
    if rank[0] < 3:
        raise RankDeficientError(f"numerical rank {rank[0]} < 3 (collinear receiver positions?)", rank=int(rank[0]))
    return float(cost[0])


def ple_grid_search(
    measurements: Sequence[RssMeasurement], p0: float, grid: PleGrid | None = None
) -> PleSearchResult:
    """Evaluate the discrepancy cost on every grid exponent and keep the smallest.

    Ties go to the smaller exponent.
    """
    grid = grid or PleGrid()
    pos, power = _arrays(measurements)
    if len(measurements) < 3:
        raise InsufficientDataError(f"need at least 3 measurements, got {len(measurements)}")
    candidates = grid.candidates()
    cost, theta, cond, rank = _costs(pos, power, p0, candidates)
    valid = rank >= 3
    if not np.any(valid):
        raise AllDegenerateError("every candidate exponent gave a rank-deficient system")
    # argmin returns the first minimum, i.e. the smallest exponent on ties;
    # degenerate candidates already carry inf cost
    k = int(np.argmin(np.where(valid, cost, np.inf)))
    if not valid[k]:
        k = int(np.flatnonzero(valid)[0])
    est = ThetaEstimate(float(theta[k, 0]), float(theta[k, 1]), float(theta[k, 2]), float(candidates[k]), float(cond[k]))
    curve = tuple((float(n), float(c)) for n, c in zip(candidates, cost))
    return PleSearchResult(float(candidates[k]), est, curve)
