"""Reward and termination rules for the game variants.

FULL pays +1/-1 for every gate crossing toward/away from the center and
ends when the ball reaches the central goal disc. The steps-to-go tasks
STG1/STG2 pay +1 only on the single terminal crossing of the designated
wall and end there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .geometry import MazeGeometry

INWARD = 1
OUTWARD = -1


class TaskKind(Enum):
    FULL = "FULL"
    STG1 = "STG1"
    STG2 = "STG2"


@dataclass(frozen=True)
class TaskSpec:
    kind: TaskKind

    @property
    def stg_wall(self) -> int:
        """0-based index of the terminal wall for STG tasks, -1 for FULL."""
        if self.kind is TaskKind.STG1:
            return 0
        if self.kind is TaskKind.STG2:
            return 1
        return -1

    @staticmethod
    def parse(name: str) -> "TaskSpec":
        return TaskSpec(TaskKind(name.upper()))


FULL = TaskSpec(TaskKind.FULL)
STG1 = TaskSpec(TaskKind.STG1)
STG2 = TaskSpec(TaskKind.STG2)


@dataclass
class StepEvents:
    """What happened inside one control step."""

    gate_crossings: list[tuple[int, int]] = field(default_factory=list)  # (wall idx, INWARD|OUTWARD)
    wall_contacts: int = 0
    terminal: bool = False


def reward_from_events(task: TaskSpec, events: StepEvents) -> float:
    """Task reward earned by one control step, given its events."""
    if task.kind is TaskKind.FULL:
        return float(sum(d for _, d in events.gate_crossings))
    # STG: +1 only on the terminal crossing step
    return 1.0 if events.terminal else 0.0


def is_terminal(
    task: TaskSpec,
    geom: MazeGeometry,
    ball_r: float,
    crossings: list[tuple[int, int]],
) -> bool:
    """Terminal test evaluated after a control step.

    ``ball_r`` is the ball center's distance from the board center at the end
    of the step; ``crossings`` are (0-based wall index, INWARD|OUTWARD) pairs.
    """
    if task.kind is TaskKind.FULL:
        return ball_r < geom.center_goal_radius
    wall = task.stg_wall
    return any(w == wall and d == INWARD for w, d in crossings)


def ring_index(geom: MazeGeometry, position: tuple[float, float]) -> int:
    """Annular band index of a position: 1 = outermost, n_walls+1 = center.

    A position exactly on a wall radius counts as outside that wall,
    matching the crossing sign convention used by the simulator.
    """
    r = math.hypot(position[0], position[1])
    idx = 1
    for wall in geom.walls:
        if r < wall.radius:
            idx += 1
    return idx
