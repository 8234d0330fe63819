"""Static board description for the ball-in-maze game.

A board is a disc with concentric ring walls. Each wall has one or more
gate openings the ball can pass through; everything else blocks. All
lengths are metres, all angles radians.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np


class GeometryError(ValueError):
    """Raised when a board configuration violates a structural invariant."""


def angular_distance(theta, center):
    """Unsigned angle between two directions, in [0, pi]. Works elementwise."""
    u = (theta - center) % (2.0 * math.pi)
    return math.pi - abs(math.pi - u)


def gate_open_mask(wall: "WallRing", theta) -> np.ndarray:
    """Boolean mask of angles lying inside one of the wall's gate windows."""
    theta = np.asarray(theta)
    open_ = np.zeros(theta.shape, dtype=bool)
    for c, hw in wall.gates:
        u = (theta - c) % (2.0 * math.pi)
        open_ |= (math.pi - np.abs(math.pi - u)) <= hw
    return open_


@dataclass(frozen=True)
class WallRing:
    """One concentric ring wall with gate openings.

    gates: tuple of (center_angle, half_width) windows, angles in [0, 2*pi).
    """

    radius: float
    gates: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class MazeGeometry:
    """Immutable board: outer disc, ball size, ring walls, goal disc.

    Walls are ordered outermost first with strictly decreasing radii.
    Safe to share read-only across threads/processes.
    """

    board_radius: float
    ball_radius: float
    walls: tuple[WallRing, ...]
    center_goal_radius: float
    _hash: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        _validate(self)
        object.__setattr__(self, "_hash", _digest(self))

    @property
    def n_walls(self) -> int:
        return len(self.walls)

    @property
    def play_limit(self) -> float:
        """Largest radius the ball center may reach."""
        return self.board_radius - self.ball_radius

    def geometry_hash(self) -> str:
        """Stable digest of all geometric parameters, used by file headers."""
        return self._hash


def _digest(geom: MazeGeometry) -> str:
    parts = [repr(geom.board_radius), repr(geom.ball_radius), repr(geom.center_goal_radius)]
    for w in geom.walls:
        parts.append(repr(w.radius))
        for c, hw in w.gates:
            parts.append(repr(c))
            parts.append(repr(hw))
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


def _validate(geom: MazeGeometry) -> None:
    if geom.board_radius <= 0 or geom.ball_radius <= 0 or geom.center_goal_radius <= 0:
        raise GeometryError("board, ball and goal radii must be positive")
    if geom.ball_radius * 2 >= geom.board_radius:
        raise GeometryError("ball does not fit on the board")
    if not geom.walls:
        raise GeometryError("need at least one ring wall")

    prev = geom.board_radius
    for i, wall in enumerate(geom.walls, start=1):
        if wall.radius <= 0:
            raise GeometryError(f"wall {i}: radius must positive, got {wall.radius}")
        if wall.radius >= prev:
            raise GeometryError(
                f"wall {i}: radii not decreasing ({wall.radius} >= {prev})"
            )
        # adjacent bands must not touch, or a single collision response could
        # push the ball center straight into the neighbouring wall's band
        if prev - wall.radius <= 2 * geom.ball_radius:
            raise GeometryError(
                f"wall {i}: gap to the ring outside it is narrower than the ball"
            )
        if wall.radius <= geom.center_goal_radius + geom.ball_radius:
            raise GeometryError(
                f"wall {i}: radius {wall.radius} must exceed goal + ball radius"
            )
        if not wall.gates:
            raise GeometryError(f"wall {i}: every wall needs at least one gate")
        min_hw = math.asin(geom.ball_radius / wall.radius)
        for c, hw in wall.gates:
            if not 0.0 <= c < 2 * math.pi:
                raise GeometryError(f"wall {i}: gate angle {c} outside [0, 2*pi)")
            if hw <= min_hw:
                raise GeometryError(
                    f"wall {i}: gate half-width {hw:.4f} too narrow for the ball "
                    f"(needs > {min_hw:.4f})"
                )
        gates = sorted(wall.gates)
        for (c0, h0), (c1, h1) in zip(gates, gates[1:] + [(gates[0][0] + 2 * math.pi, gates[0][1])]):
            if c0 + h0 > c1 - h1:
                raise GeometryError(f"wall {i}: gates at {c0:.3f} and {c1 % (2 * math.pi):.3f} overlap")
        prev = wall.radius


def build_geometry(
    wall_radii: list[float],
    gates_per_wall: int = 2,
    gate_half_width: float = math.radians(18.0),
    gate_offset_step: float = math.radians(90.0),
    board_radius: float = 0.10,
    ball_radius: float = 0.005,
    center_goal_radius: float = 0.015,
) -> MazeGeometry:
    """Build a board with evenly spaced gates, offset between adjacent walls.

    Wall i's gates start at ``i * gate_offset_step`` so the ball has to travel
    around each ring to line up with the next opening.
    """
    walls = []
    two_pi = 2 * math.pi
    for i, r in enumerate(wall_radii):
        base = (i * gate_offset_step) % two_pi
        gates = tuple(
            ((base + k * two_pi / gates_per_wall) % two_pi, gate_half_width)
            for k in range(gates_per_wall)
        )
        walls.append(WallRing(radius=r, gates=gates))
    return MazeGeometry(
        board_radius=board_radius,
        ball_radius=ball_radius,
        walls=tuple(walls),
        center_goal_radius=center_goal_radius,
    )


#: Five-ring board used as the standard game.
DEFAULT_WALL_RADII = [0.084, 0.070, 0.056, 0.042, 0.028]

#: Three-ring board with wider gates, used for reduced-scale training runs.
DESK_WALL_RADII = [0.072, 0.050, 0.028]


def default_geometry() -> MazeGeometry:
    return build_geometry(DEFAULT_WALL_RADII)


def desk_geometry() -> MazeGeometry:
    return build_geometry(DESK_WALL_RADII, gate_half_width=math.radians(30.0))


def geometry_from_config(cfg: dict[str, str]) -> MazeGeometry:
    """Build a geometry from key-value config entries.

    Recognised keys: ``preset`` (default|desk), ``wall_radii`` (comma list),
    ``gates_per_wall``, ``gate_half_width_deg``, ``gate_offset_deg``,
    ``board_radius``, ``ball_radius``, ``center_goal_radius``.
    """
    preset = cfg.get("preset")
    if preset == "desk":
        base = dict(wall_radii=DESK_WALL_RADII, gate_half_width=math.radians(30.0))
    elif preset in (None, "default"):
        base = dict(wall_radii=DEFAULT_WALL_RADII)
    else:
        raise GeometryError(f"unknown geometry preset {preset!r}")
    if "wall_radii" in cfg:
        base["wall_radii"] = [float(x) for x in cfg["wall_radii"].split(",")]
    if "gates_per_wall" in cfg:
        base["gates_per_wall"] = int(cfg["gates_per_wall"])
    if "gate_half_width_deg" in cfg:
        base["gate_half_width"] = math.radians(float(cfg["gate_half_width_deg"]))
    if "gate_offset_deg" in cfg:
        base["gate_offset_step"] = math.radians(float(cfg["gate_offset_deg"]))
    for key in ("board_radius", "ball_radius", "center_goal_radius"):
        if key in cfg:
            base[key] = float(cfg[key])
    return build_geometry(**base)
