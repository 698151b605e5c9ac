"""CSV writers. All files are UTF-8, LF line endings, with a header row."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from rsslocate.montecarlo import ROMAN, TABLES, SweepResult, empirical_cdf
from rsslocate.simulation import TrialResult
from rsslocate.trajectory import Strategy, Trajectory

STRATEGY_LABELS = {Strategy.RANDOM: "Random", Strategy.CORNER: "Proposed"}


def fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _write(path: Path, header, rows):
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_trajectory(path, trajectory: Trajectory):
    return _write(path, ["epoch", "x", "y"], ((i, x, y) for i, (x, y) in enumerate(trajectory.positions)))


def write_measurements(path, result: TrialResult):
    rows = ((i, m.position[0], m.position[1], m.rss, m.linear_power) for i, m in enumerate(result.measurements))
    return _write(path, ["index", "x_m", "y_m", "rss_dbm", "linear_power_mw"], rows)


def write_cost_curve(path, result: TrialResult):
    curve = result.estimate.cost_curve if result.estimate else ()
    return _write(path, ["n_j", "cost"], curve)


def write_trial_summary(path, result: TrialResult):
    est = result.estimate
    row = [
        "failed" if result.failed else "ok",
        result.true_bs[0],
        result.true_bs[1],
        result.receiver_start[0],
        result.receiver_start[1],
        len(result.measurements),
        est.n_opt if est else math.nan,
        est.estimate.x if est else math.nan,
        est.estimate.y if est else math.nan,
        est.estimate.s if est else math.nan,
        est.estimate.condition_diagnostic if est else math.nan,
        result.position_error_m,
        result.error or "",
    ]
    header = [
        "status", "bs_x", "bs_y", "start_x", "start_y", "measurements",
        "n_opt", "x_hat", "y_hat", "s_hat", "condition", "error_m", "message",
    ]
    return _write(path, header, [row])


def write_trial_bundle(out_dir, result: TrialResult) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        write_trajectory(out / "trajectory.csv", result.trajectory),
        write_measurements(out / "measurements.csv", result),
        write_cost_curve(out / "cost_curve.csv", result),
        write_trial_summary(out / "result.csv", result),
    ]


def write_table(path, sweep: SweepResult, table: int):
    """Rows are strategies, columns the swept parameter values."""
    axis, stat = TABLES[table]
    values = sweep.spec.values(axis)
    rows = []
    for s in sweep.spec.strategies:
        rows.append([STRATEGY_LABELS[s]] + [round(getattr(sweep.cell(s, axis, v), stat), 6) for v in values])
    return _write(path, [axis] + [fmt(float(v)) for v in values], rows)


def figure_rows(sweep: SweepResult, figure: int):
    """(error, cdf_random, cdf_proposed) at every error of either strategy in the figure's cell."""
    cdfs = {}
    for s in (Strategy.RANDOM, Strategy.CORNER):
        errs = sweep.figure_errors(s, figure) if s in sweep.spec.strategies else []
        cdfs[s] = empirical_cdf(errs) if errs else None
    grid = sorted({e for c in cdfs.values() if c for e, _ in c.points})
    for e in grid:
        yield [
            e,
            cdfs[Strategy.RANDOM](e) if cdfs[Strategy.RANDOM] else math.nan,
            cdfs[Strategy.CORNER](e) if cdfs[Strategy.CORNER] else math.nan,
        ]


def write_figure(path, sweep: SweepResult, figure: int):
    return _write(path, ["error_m", "cdf_random", "cdf_proposed"], figure_rows(sweep, figure))


def write_cells(path, sweep: SweepResult):
    rows = (
        [k.strategy, k.n, k.sigma, k.r0, c.trials, c.failed, round(c.mean_n_opt, 6), round(c.rms_error, 6), int(c.flagged)]
        for k, c in sorted(sweep.cells.items())
    )
    header = ["strategy", "n", "sigma", "r0", "trials", "failed", "mean_n_opt", "rms_error_m", "flagged"]
    return _write(path, header, rows)


def table_filename(table: int) -> str:
    return f"table_{ROMAN[table]}.csv"


def figure_filename(figure: int) -> str:
    return f"figure_{figure}.csv"
