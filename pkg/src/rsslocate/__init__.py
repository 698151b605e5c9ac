"""Single-receiver RSS localization of a base station with unknown path-loss exponent."""

from rsslocate.localizer import (
    PleGrid,
    PleSearchResult,
    ThetaEstimate,
    build_system,
    discrepancy_cost,
    estimate_position,
    ple_grid_search,
    solve_lsq,
)
from rsslocate.pathloss import (
    PathLossParams,
    RssMeasurement,
    linear_power,
    ml_distance,
    rss_log_density,
    rss_mean,
    sample_rss,
)
from rsslocate.trajectory import GridMap, Strategy, Trajectory, corner_tour, nearest_corner, random_walk

__version__ = "0.1.0"

__all__ = [
    "GridMap",
    "PathLossParams",
    "PleGrid",
    "PleSearchResult",
    "RssMeasurement",
    "Strategy",
    "ThetaEstimate",
    "Trajectory",
    "build_system",
    "corner_tour",
    "discrepancy_cost",
    "estimate_position",
    "linear_power",
    "ml_distance",
    "nearest_corner",
    "ple_grid_search",
    "random_walk",
    "rss_log_density",
    "rss_mean",
    "sample_rss",
    "solve_lsq",
]
