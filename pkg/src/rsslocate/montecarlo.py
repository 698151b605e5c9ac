"""Parameter sweeps over many seeded trials and their summary statistics."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from rsslocate.localizer import PleGrid
from rsslocate.pathloss import PathLossParams
from rsslocate.simulation import TrialConfig, run_trial
from rsslocate.trajectory import GridMap, Strategy

log = logging.getLogger(__name__)

FAILURE_FLAG_FRACTION = 0.05

# swept axis -> (PathLossParams field, default swept values)
AXES = {
    "n": ("n", (2.0, 2.5, 3.0, 3.5, 4.0)),
    "sigma": ("sigma", (1.0, 2.0, 3.0, 4.0)),
    "r0": ("r0", (-20.0, -25.0, -30.0, -35.0, -40.0)),
}

# table number -> (swept axis, statistic)
TABLES = {
    1: ("n", "mean_n_opt"),
    2: ("n", "rms_error"),
    3: ("sigma", "mean_n_opt"),
    4: ("sigma", "rms_error"),
    5: ("r0", "mean_n_opt"),
    6: ("r0", "rms_error"),
}
FIGURES = {1: "n", 2: "sigma", 3: "r0"}
ROMAN = {1: "I", 2: "II", 3: "III", 4: "IV", 5: "V", 6: "VI"}


def rms_error(errors: Sequence[float]) -> float:
    if len(errors) == 0:
        raise ValueError("rms_error of an empty list")
    e = np.asarray(errors, dtype=float)
    return float(np.sqrt(np.mean(e * e)))


def mean_ple(n_opts: Sequence[float]) -> float:
    if len(n_opts) == 0:
        raise ValueError("mean_ple of an empty list")
    return float(np.mean(np.asarray(n_opts, dtype=float)))


@dataclass(frozen=True)
class CdfSeries:
    """Empirical CDF sampled at the sorted errors: ``F(e_k) = k / N``."""

    points: tuple[tuple[float, float], ...]

    @cached_property
    def _xs(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    def __call__(self, e: float) -> float:
        return float(np.searchsorted(self._xs, e, side="right")) / len(self._xs)

    def quantile(self, u: float) -> float:
        """Smallest sample ``e`` with ``F(e) >= u``."""
        for e, f in self.points:
            if f >= u - 1e-12:
                return e
        return self.points[-1][0]


def empirical_cdf(errors: Sequence[float]) -> CdfSeries:
    if len(errors) == 0:
        raise ValueError("empirical_cdf of an empty list")
    xs = np.sort(np.asarray(errors, dtype=float))
    n = len(xs)
    # ties share the fraction of the last tied sample, keeping F right-continuous
    fractions = np.searchsorted(xs, xs, side="right") / n
    return CdfSeries(tuple((float(x), float(f)) for x, f in zip(xs, fractions)))


@dataclass(frozen=True, order=True)
class CellKey:
    strategy: str
    n: float
    sigma: float
    r0: float


@dataclass(frozen=True)
class CellStats:
    key: CellKey
    errors: tuple[float, ...]
    n_opts: tuple[float, ...]
    failed: int

    @property
    def trials(self) -> int:
        return len(self.errors) + self.failed

    @property
    def rms_error(self) -> float:
        return rms_error(self.errors) if self.errors else math.nan

    @property
    def mean_n_opt(self) -> float:
        return mean_ple(self.n_opts) if self.n_opts else math.nan

    @property
    def flagged(self) -> bool:
        return self.failed > FAILURE_FLAG_FRACTION * self.trials


@dataclass(frozen=True)
class SweepSpec:
    """One-factor-at-a-time sweeps around a base channel.

    Each axis in ``axes`` varies its own value list while the other two
    parameters stay at the base values.
    """

    ple_values: tuple[float, ...] = AXES["n"][1]
    sigma_values: tuple[float, ...] = AXES["sigma"][1]
    r0_values: tuple[float, ...] = AXES["r0"][1]
    trials_per_cell: int = 100
    strategies: tuple[Strategy, ...] = (Strategy.RANDOM, Strategy.CORNER)
    base_seed: int = 0
    base: PathLossParams = field(default_factory=PathLossParams)
    axes: tuple[str, ...] = ("n", "sigma", "r0")
    map: GridMap = field(default_factory=GridMap)
    duration_s: int = 150
    grid: PleGrid = field(default_factory=PleGrid)

    def __post_init__(self):
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        for name in self.axes:
            if name not in AXES:
                raise ValueError(f"unknown sweep axis {name!r}")
            if len(self.values(name)) == 0:
                raise ValueError(f"no values for sweep axis {name!r}")
        if not self.strategies:
            raise ValueError("no strategies")
        object.__setattr__(self, "strategies", tuple(Strategy(s) for s in self.strategies))

    def values(self, axis: str) -> tuple[float, ...]:
        return {"n": self.ple_values, "sigma": self.sigma_values, "r0": self.r0_values}[axis]

    def channel(self, axis: str, value: float) -> PathLossParams:
        kw = {"r0": self.base.r0, "n": self.base.n, "sigma": self.base.sigma}
        kw[AXES[axis][0]] = float(value)
        return PathLossParams(**kw)

    def cell_keys(self) -> list[CellKey]:
        keys = set()
        for axis in self.axes:
            for v in self.values(axis):
                ch = self.channel(axis, v)
                for s in self.strategies:
                    keys.add(CellKey(s.value, ch.n, ch.sigma, ch.r0))
        return sorted(keys)


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    cells: dict[CellKey, CellStats]

    def cell(self, strategy, axis: str, value: float) -> CellStats:
        ch = self.spec.channel(axis, value)
        return self.cells[CellKey(Strategy(strategy).value, ch.n, ch.sigma, ch.r0)]

    def figure_cell(self, figure: int) -> tuple[str, float]:
        """(axis, value) of the single cell a figure is drawn for.

        The base value when the sweep contains it, otherwise the middle
        entry of the swept list.
        """
        axis = FIGURES[figure]
        values = self.spec.values(axis)
        base = getattr(self.spec.base, AXES[axis][0])
        return axis, (base if base in values else values[len(values) // 2])

    def figure_errors(self, strategy, figure: int) -> tuple[float, ...]:
        return self.cell(strategy, *self.figure_cell(figure)).errors


def trial_seed(base_seed: int, trial_index: int) -> int:
    """Per-trial seed; shared across strategies and cells so comparisons are paired."""
    state = np.random.SeedSequence([base_seed, trial_index]).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def _run_one(args):
    key, trial_index, spec = args
    cfg = TrialConfig(
        channel=PathLossParams(r0=key.r0, n=key.n, sigma=key.sigma),
        strategy=Strategy(key.strategy),
        seed=trial_seed(spec.base_seed, trial_index),
        map=spec.map,
        duration_s=spec.duration_s,
        grid=spec.grid,
    )
    r = run_trial(cfg)
    return r.position_error_m, r.n_opt, r.failed


def default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _map(tasks: list, jobs: int) -> Iterable:
    if jobs <= 1 or len(tasks) < 2:
        return map(_run_one, tasks)
    pool = ProcessPoolExecutor(max_workers=jobs)
    chunk = max(1, len(tasks) // (4 * jobs))
    try:
        return list(pool.map(_run_one, tasks, chunksize=chunk))
    finally:
        pool.shutdown()


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Run every cell of ``spec``; the result does not depend on ``jobs``."""
    keys = spec.cell_keys()
    tasks = [(k, t, spec) for k in keys for t in range(spec.trials_per_cell)]
    outcomes = iter(_map(tasks, jobs))
    cells = {}
    for key in keys:
        errors, n_opts, failed = [], [], 0
        for _ in range(spec.trials_per_cell):
            err, n_opt, bad = next(outcomes)
            if bad:
                failed += 1
            else:
                errors.append(err)
                n_opts.append(n_opt)
        stats = CellStats(key, tuple(errors), tuple(n_opts), failed)
        cells[key] = stats
        log.info(
            "cell %s n=%g sigma=%g r0=%g: mean n_opt %.3f, rms %.3f m, failed %d/%d%s",
            key.strategy, key.n, key.sigma, key.r0, stats.mean_n_opt, stats.rms_error,
            failed, stats.trials, " FLAGGED" if stats.flagged else "",
        )
    return SweepResult(spec, cells)
