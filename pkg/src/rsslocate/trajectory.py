"""Receiver exploration strategies on a square lattice map."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from rsslocate.errors import InvalidStartError

# (dx, dy) moves of the 4-neighbourhood
_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1))


class Strategy(str, enum.Enum):
    RANDOM = "random"
    CORNER = "corner"


@dataclass(frozen=True)
class GridMap:
    width_cells: int = 45
    cell_size: float = 1.0

    def __post_init__(self):
        if self.width_cells < 2:
            raise ValueError(f"map needs at least 2 cells per axis, got {self.width_cells}")

    def contains(self, pos) -> bool:
        x, y = pos
        return 0 <= x < self.width_cells and 0 <= y < self.width_cells

    @property
    def corners(self) -> tuple[tuple[int, int], ...]:
        """Corners in counter-clockwise order starting at the origin."""
        m = self.width_cells - 1
        return ((0, 0), (m, 0), (m, m), (0, m))

    def to_meters(self, pos) -> tuple[float, float]:
        return (pos[0] * self.cell_size, pos[1] * self.cell_size)


@dataclass(frozen=True)
class Trajectory:
    positions: tuple[tuple[int, int], ...]
    strategy: Strategy | None = None

    def __len__(self):
        return len(self.positions)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=int).reshape(-1, 2)


def _check_start(grid: GridMap, start):
    if not grid.contains(start):
        raise InvalidStartError(f"start {tuple(start)} outside {grid.width_cells}x{grid.width_cells} map")


def random_walk(grid: GridMap, start, steps: int, rng: np.random.Generator) -> Trajectory:
    """Uniform random walk over in-bounds 4-neighbours; the walker never pauses."""
    _check_start(grid, start)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    x, y = int(start[0]), int(start[1])
    positions = [(x, y)]
    for _ in range(steps):
        options = [(x + dx, y + dy) for dx, dy in _MOVES if grid.contains((x + dx, y + dy))]
        x, y = options[rng.integers(len(options))]
        positions.append((x, y))
    return Trajectory(tuple(positions), Strategy.RANDOM)


def nearest_corner(grid: GridMap, pos) -> tuple[int, int]:
    # min() keeps the first of equal keys, which gives the corner-order tie-break
    return min(grid.corners, key=lambda c: math.hypot(c[0] - pos[0], c[1] - pos[1]))


def _staircase(start, goal):
    """4-connected shortest path, all x moves first. Excludes ``start``."""
    x, y = start
    path = []
    while x != goal[0]:
        x += 1 if goal[0] > x else -1
        path.append((x, y))
    while y != goal[1]:
        y += 1 if goal[1] > y else -1
        path.append((x, y))
    return path


def _perimeter_cycle(grid: GridMap, corner_index: int, ccw: bool):
    """Endless walk around the map edge starting (exclusive) from a corner."""
    corners = grid.corners
    step = 1 if ccw else -1
    i = corner_index
    while True:
        j = (i + step) % 4
        yield from _staircase(corners[i], corners[j])
        i = j


def _perimeter_distance(grid: GridMap, frm: int, ccw: bool) -> int:
    a = grid.corners[frm]
    b = grid.corners[(frm + (1 if ccw else -1)) % 4]
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def corner_tour(grid: GridMap, start, steps: int) -> Trajectory:
    """Go to the nearest corner, then circle the map edge through every corner.

    The approach leg moves along x before y. Around the edge the walker picks
    the rotation that reaches the next corner sooner (counter-clockwise on a
    tie) and keeps looping until ``steps`` moves are used.
    """
    _check_start(grid, start)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    start = (int(start[0]), int(start[1]))
    corner = nearest_corner(grid, start)
    positions = [start] + _staircase(start, corner)
    idx = grid.corners.index(corner)
    ccw = _perimeter_distance(grid, idx, True) <= _perimeter_distance(grid, idx, False)
    edge = _perimeter_cycle(grid, idx, ccw)
    while len(positions) < steps + 1:
        positions.append(next(edge))
    return Trajectory(tuple(positions[: steps + 1]), Strategy.CORNER)


def make_trajectory(strategy: Strategy, grid: GridMap, start, steps: int, rng=None) -> Trajectory:
    strategy = Strategy(strategy)
    if strategy is Strategy.RANDOM:
        return random_walk(grid, start, steps, rng)
    return corner_tour(grid, start, steps)
