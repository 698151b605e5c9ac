"""One end-to-end localization trial on the grid map."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from rsslocate.errors import RssLocateError
from rsslocate.localizer import PleGrid, PleSearchResult, ple_grid_search
from rsslocate.pathloss import PathLossParams, RssMeasurement, sample_rss
from rsslocate.trajectory import GridMap, Strategy, Trajectory, make_trajectory


@dataclass(frozen=True)
class TrialConfig:
    channel: PathLossParams = field(default_factory=PathLossParams)
    strategy: Strategy = Strategy.CORNER
    seed: int = 0
    map: GridMap = field(default_factory=GridMap)
    duration_s: int = 150
    grid: PleGrid = field(default_factory=PleGrid)

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.duration_s < 3:
            raise ValueError(f"duration_s must be >= 3, got {self.duration_s}")


@dataclass(frozen=True)
class TrialResult:
    true_bs: tuple[float, float]
    receiver_start: tuple[int, int]
    trajectory: Trajectory
    measurements: tuple[RssMeasurement, ...]
    estimate: PleSearchResult | None
    position_error_m: float
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.estimate is None

    @property
    def n_opt(self) -> float:
        return self.estimate.n_opt if self.estimate is not None else math.nan


def trial_streams(seed) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent (placement, walk, noise) generators for one trial seed."""
    children = np.random.SeedSequence(seed).spawn(3)
    return tuple(np.random.default_rng(c) for c in children)


def place_entities(grid: GridMap, rng: np.random.Generator):
    """Uniform lattice positions for the BS and the receiver start, never coincident."""
    w = grid.width_cells
    bs = tuple(int(v) for v in rng.integers(0, w, size=2))
    while True:
        start = tuple(int(v) for v in rng.integers(0, w, size=2))
        if start != bs:
            return bs, start


def measure(trajectory: Trajectory, bs, channel: PathLossParams, grid: GridMap, rng) -> tuple[RssMeasurement, ...]:
    """Sample one RSS per trajectory epoch, skipping epochs closer than d0 to the BS."""
    pos_m = trajectory.as_array() * grid.cell_size
    dist = np.hypot(pos_m[:, 0] - bs[0], pos_m[:, 1] - bs[1])
    keep = dist >= channel.d0
    pos_m, dist = pos_m[keep], dist[keep]
    rss = np.atleast_1d(sample_rss(channel, dist, rng)) if len(dist) else np.empty(0)
    return tuple(RssMeasurement((float(p[0]), float(p[1])), float(r)) for p, r in zip(pos_m, rss))


def run_trial(config: TrialConfig, trajectory: Trajectory | None = None, placement=None) -> TrialResult:
    """Place, move, measure and localize; deterministic in ``config.seed``.

    ``placement`` (bs, start) and ``trajectory`` override the random draws,
    which is how degenerate geometries are injected. Localizer failures are
    returned as a failed result rather than raised.
    """
    place_rng, walk_rng, noise_rng = trial_streams(config.seed)
    grid = config.map
    bs_cell, start = place_entities(grid, place_rng)
    if placement is not None:
        bs_cell, start = placement
    if trajectory is None:
        trajectory = make_trajectory(config.strategy, grid, start, config.duration_s, walk_rng)
    start = trajectory.positions[0]
    bs = grid.to_meters(bs_cell)
    measurements = measure(trajectory, bs, config.channel, grid, noise_rng)
    try:
        result = ple_grid_search(measurements, config.channel.p0, config.grid)
    except RssLocateError as exc:
        return TrialResult(bs, start, trajectory, measurements, None, math.nan, f"{type(exc).__name__}: {exc}")
    err = math.hypot(result.estimate.x - bs[0], result.estimate.y - bs[1])
    return TrialResult(bs, start, trajectory, measurements, result, err)
