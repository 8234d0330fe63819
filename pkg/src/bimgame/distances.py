"""Distance measures used as planning objectives.

The radial distance is simply how far the ball sits from the board center.
The geodesic distance is the length of the shortest collision-free path to
the central goal region, computed once per geometry as a Dijkstra sweep
over an 8-connected occupancy grid of the ball-center free space.
"""

from __future__ import annotations

import heapq
import math
from functools import lru_cache

import numpy as np
from numba import njit

from .geometry import MazeGeometry, angular_distance, gate_open_mask

GRID_N = 201


class DomainError(ValueError):
    """Queried position is not in the playable free space."""


def position_is_free(geom: MazeGeometry, x: float, y: float) -> bool:
    """True if a ball centered at (x, y) violates no containment constraint."""
    r = math.hypot(x, y)
    if r > geom.play_limit:
        return False
    theta = math.atan2(y, x)
    for wall in geom.walls:
        if abs(r - wall.radius) < geom.ball_radius:
            if not any(angular_distance(theta, c) <= hw for c, hw in wall.gates):
                return False
    return True


class GeodesicField:
    """Precomputed shortest-path distance to the goal region.

    values[i, j] is the path length from grid position (x_i, y_j) to the
    nearest cell of the central goal disc; occupied cells hold +inf. The
    grid spans [-board_radius, board_radius] in both axes.
    """

    def __init__(self, geom: MazeGeometry, n: int = GRID_N):
        self.geom = geom
        self.n = n
        self.origin = -geom.board_radius
        self.cell = 2.0 * geom.board_radius / (n - 1)
        xs = np.linspace(-geom.board_radius, geom.board_radius, n)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        R = np.hypot(X, Y)
        theta = np.arctan2(Y, X)
        free = R <= geom.play_limit
        for wall in geom.walls:
            band = np.abs(R - wall.radius) < geom.ball_radius
            free &= ~(band & ~gate_open_mask(wall, theta))
        self.free = free
        self.values = _dijkstra(free, R <= geom.center_goal_radius, self.cell)

    def lookup(self, x: float, y: float) -> float:
        """Distance at the nearest grid cell, scanning outward past occupied cells."""
        return float(
            _grid_lookup(x, y, self.values, self.origin, self.cell)
        )


def _dijkstra(free: np.ndarray, sources: np.ndarray, cell: float) -> np.ndarray:
    n = free.shape[0]
    dist = np.full((n, n), np.inf)
    start = free & sources
    heap = []
    for i, j in zip(*np.nonzero(start)):
        dist[i, j] = 0.0
        heap.append((0.0, int(i), int(j)))
    heapq.heapify(heap)
    diag = cell * math.sqrt(2.0)
    steps = (
        (-1, -1, diag), (-1, 0, cell), (-1, 1, diag),
        (0, -1, cell), (0, 1, cell),
        (1, -1, diag), (1, 0, cell), (1, 1, diag),
    )
    while heap:
        d, i, j = heapq.heappop(heap)
        if d > dist[i, j]:
            continue
        for di, dj, w in steps:
            ii, jj = i + di, j + dj
            if 0 <= ii < n and 0 <= jj < n and free[ii, jj]:
                nd = d + w
                if nd < dist[ii, jj]:
                    dist[ii, jj] = nd
                    heapq.heappush(heap, (nd, ii, jj))
    return dist


@njit(cache=True)
def _grid_lookup(x, y, values, origin, cell):
    n = values.shape[0]
    i = int(round((x - origin) / cell))
    j = int(round((y - origin) / cell))
    if i < 0:
        i = 0
    elif i > n - 1:
        i = n - 1
    if j < 0:
        j = 0
    elif j > n - 1:
        j = n - 1
    v = values[i, j]
    if math.isfinite(v):
        return v
    for rad in range(1, 4):
        best = np.inf
        for di in range(-rad, rad + 1):
            for dj in range(-rad, rad + 1):
                ii, jj = i + di, j + dj
                if 0 <= ii < n and 0 <= jj < n and values[ii, jj] < best:
                    best = values[ii, jj]
        if math.isfinite(best):
            return best
    return np.inf


@lru_cache(maxsize=8)
def geodesic_field(geom: MazeGeometry, n: int = GRID_N) -> GeodesicField:
    return GeodesicField(geom, n)


def geodesic_distance(geom: MazeGeometry, position: tuple[float, float]) -> float:
    """Shortest collision-free path length from a position to the goal region."""
    x, y = position
    if not position_is_free(geom, x, y):
        raise DomainError(f"position {position} is inside a wall or off the board")
    return geodesic_field(geom).lookup(x, y)
