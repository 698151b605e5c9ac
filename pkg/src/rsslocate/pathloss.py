"""Log-distance path-loss model with log-normal shadowing.

Mean RSS at distance ``d`` is ``r0 - 10 n log10(d / d0)``; a measured sample
adds zero-mean Gaussian shadow noise with standard deviation ``sigma`` (dB).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from rsslocate.errors import DomainError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PathLossParams:
    r0: float = -27.0
    n: float = 3.0
    sigma: float = 3.0
    d0: float = 1.0

    def __post_init__(self):
        if self.d0 != 1.0:
            raise DomainError(f"reference distance must be 1.0 m, got {self.d0}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")
        if not self.n > 0:
            raise DomainError(f"path-loss exponent must be > 0, got {self.n}")

    @property
    def p0(self) -> float:
        """Linear power at the reference distance."""
        return linear_power(self.r0)


@dataclass(frozen=True)
class RssMeasurement:
    """One RSS sample taken by the receiver at a known position."""

    position: tuple[float, float]
    rss: float
    linear_power: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "linear_power", linear_power(self.rss))
        if not self.linear_power > 0:
            raise DomainError(f"rss {self.rss} dBm underflows linear power")


def linear_power(rss):
    """Convert dBm to linear power (mW): ``10 ** (rss / 10)``."""
    if isinstance(rss, np.ndarray):
        return np.power(10.0, rss / 10.0)
    return 10.0 ** (rss / 10.0)


def _check_distance(params: PathLossParams, d):
    if np.any(np.asarray(d) < params.d0):
        raise DomainError(f"distance below reference distance {params.d0} m: {d}")


def rss_mean(params: PathLossParams, d):
    """Noise-free RSS (dBm) at distance ``d`` metres."""
    _check_distance(params, d)
    return params.r0 - 10.0 * params.n * np.log10(np.asarray(d, dtype=float) / params.d0)[()]


def sample_rss(params: PathLossParams, d, rng: np.random.Generator):
    """Draw a shadowed RSS sample (dBm) at distance ``d``.

    ``d`` may be an array, in which case one independent sample per entry is drawn.
    With ``sigma == 0`` no random numbers are consumed.
    """
    mean = rss_mean(params, d)
    if params.sigma == 0:
        return mean
    return mean + rng.normal(0.0, params.sigma, size=np.shape(mean))[()]


def rss_log_density(params: PathLossParams, rss, d):
    """Log of the normalized Gaussian density of ``rss`` given distance ``d``."""
    if params.sigma == 0:
        raise DomainError("density is degenerate for sigma == 0")
    z = (np.asarray(rss, dtype=float) - rss_mean(params, d)) / params.sigma
    return (-math.log(params.sigma) - _LOG_SQRT_2PI - 0.5 * z * z)[()]


def ml_distance(params: PathLossParams, rss, n_assumed: float):
    """Maximum-likelihood distance for an RSS reading under exponent ``n_assumed``.

    Equivalent to ``d0 * (P0 / P) ** (1 / n_assumed)`` in linear power.
    """
    if not n_assumed > 0:
        raise DomainError(f"assumed exponent must be > 0, got {n_assumed}")
    rss = np.asarray(rss, dtype=float)
    return (params.d0 * np.power(10.0, (params.r0 - rss) / (10.0 * n_assumed)))[()]
