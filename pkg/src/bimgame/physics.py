"""Deterministic tilting-board dynamics for the ball-in-maze game.

One control step applies a tilt action, then integrates the ball with
semi-implicit Euler over a fixed number of substeps. Gravity acts through
the board tilt, a viscous term models rolling friction, and a stick rule
holds a slow ball on a nearly level board. Walls and the board rim reflect
the radial velocity with restitution and damp the tangential component;
gentle sustained contact is resolved inelastically so the ball can slide
along a wall instead of freezing.

Everything here is pure float arithmetic with a fixed operation order, so
a (geometry, seed, actions) triple reproduces trajectories bit-exactly.
The inner loop is JIT-compiled with numba; the same functions run as plain
Python if compilation is unavailable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np
from numba import njit

from .geometry import MazeGeometry
from .tasks import INWARD, OUTWARD, StepEvents, TaskSpec, is_terminal, reward_from_events

TWO_PI = 2.0 * math.pi

# indices into the packed physics-constant vector
_P_DTSUB, _P_G, _P_FRIC, _P_STICK_V, _P_STICK_A = 0, 1, 2, 3, 4
_P_E, _P_MU_T, _P_V_REST, _P_TILT_STEP, _P_TILT_MAX = 5, 6, 7, 8, 9


class IntegrationFaultError(ArithmeticError):
    """State became non-finite during integration."""


class ContainmentError(AssertionError):
    """Ball penetrated a wall beyond tolerance (debug containment mode)."""


class Action(IntEnum):
    """The five control actions; each tilt action turns one axis by a fixed step."""

    TILT_X_PLUS = 0
    TILT_X_MINUS = 1
    TILT_Y_PLUS = 2
    TILT_Y_MINUS = 3
    NOOP = 4


N_ACTIONS = 5


@dataclass(frozen=True)
class PhysicsParams:
    """Integration and contact constants (SI units)."""

    dt: float = 0.05                  # one control interval, seconds
    substeps: int = 10
    gravity: float = 9.81
    rolling_friction: float = 0.3     # viscous, 1/s
    stick_speed: float = 1e-4         # static friction: hold if slower than this ...
    stick_accel: float = 0.05         # ... and driven less than this
    restitution: float = 0.3
    tangential_damping: float = 0.2
    resting_contact_speed: float = 0.01  # below this normal speed, contact is inelastic
    tilt_step: float = math.radians(1.0)
    tilt_max: float = math.radians(5.0)

    def packed(self) -> np.ndarray:
        v = np.empty(10)
        v[_P_DTSUB] = self.dt / self.substeps
        v[_P_G] = self.gravity
        v[_P_FRIC] = self.rolling_friction
        v[_P_STICK_V] = self.stick_speed
        v[_P_STICK_A] = self.stick_accel
        v[_P_E] = self.restitution
        v[_P_MU_T] = self.tangential_damping
        v[_P_V_REST] = self.resting_contact_speed
        v[_P_TILT_STEP] = self.tilt_step
        v[_P_TILT_MAX] = self.tilt_max
        return v


DEFAULT_PHYSICS = PhysicsParams()


@dataclass(frozen=True)
class BoardState:
    """Dynamic state: ball position/velocity in the board frame, tilt, step counter."""

    ball_pos: tuple[float, float]
    ball_vel: tuple[float, float]
    tilt: tuple[float, float]
    step_count: int = 0

    def is_finite(self) -> bool:
        vals = (*self.ball_pos, *self.ball_vel, *self.tilt)
        return all(math.isfinite(v) for v in vals)


@lru_cache(maxsize=32)
def geom_arrays(geom: MazeGeometry):
    """Pack a geometry into flat arrays for the jitted kernels."""
    wall_r = np.array([w.radius for w in geom.walls])
    gate_c, gate_hw, gate_off = [], [], [0]
    for w in geom.walls:
        for c, hw in w.gates:
            gate_c.append(c)
            gate_hw.append(hw)
        gate_off.append(len(gate_c))
    return (
        wall_r,
        np.array(gate_c),
        np.array(gate_hw),
        np.array(gate_off, dtype=np.int64),
        geom.play_limit,
        geom.ball_radius,
    )


@lru_cache(maxsize=32)
def physics_packed(phys: PhysicsParams) -> np.ndarray:
    return phys.packed()


@njit(cache=True)
def _in_gate(theta, w, gate_c, gate_hw, gate_off):
    for gi in range(gate_off[w], gate_off[w + 1]):
        u = (theta - gate_c[gi]) % TWO_PI
        if math.pi - abs(math.pi - u) <= gate_hw[gi]:
            return True
    return False


@njit(cache=True)
def _control_step(px, py, vx, vy, tx, ty, action, n_sub, phys,
                  wall_r, gate_c, gate_hw, gate_off, board_limit, ball_r,
                  cross_wall, cross_dir, debug):
    """Advance one control interval. Returns the new state plus event counts.

    Gate crossings are written into cross_wall/cross_dir (0-based wall index,
    +1 inward / -1 outward). The last return value is the maximum wall
    penetration seen after resolution, only computed when debug != 0.
    """
    tilt_step = phys[_P_TILT_STEP]
    tilt_max = phys[_P_TILT_MAX]
    if action == 0:
        tx += tilt_step
    elif action == 1:
        tx -= tilt_step
    elif action == 2:
        ty += tilt_step
    elif action == 3:
        ty -= tilt_step
    if tx > tilt_max:
        tx = tilt_max
    elif tx < -tilt_max:
        tx = -tilt_max
    if ty > tilt_max:
        ty = tilt_max
    elif ty < -tilt_max:
        ty = -tilt_max

    gx = phys[_P_G] * math.sin(tx)
    gy = phys[_P_G] * math.sin(ty)
    gmag = math.hypot(gx, gy)
    dt = phys[_P_DTSUB]
    fric = phys[_P_FRIC]
    stick_v = phys[_P_STICK_V]
    stick_a = phys[_P_STICK_A]
    e = phys[_P_E]
    mu_t = phys[_P_MU_T]
    v_rest = phys[_P_V_REST]
    n_w = wall_r.shape[0]
    n_cross = 0
    n_contact = 0
    max_pen = 0.0

    for _ in range(n_sub):
        if math.hypot(vx, vy) < stick_v and gmag < stick_a:
            vx = 0.0
            vy = 0.0
            continue
        vx = vx + dt * (gx - fric * vx)
        vy = vy + dt * (gy - fric * vy)
        px0 = px
        py0 = py
        px1 = px + dt * vx
        py1 = py + dt * vy
        r0 = math.hypot(px0, py0)
        r1 = math.hypot(px1, py1)

        if r1 > board_limit:
            scale = board_limit / r1
            px1 *= scale
            py1 *= scale
            r1 = math.hypot(px1, py1)
            ux = px1 / r1
            uy = py1 / r1
            vr = vx * ux + vy * uy
            if vr > 0.0:
                vtx = vx - vr * ux
                vty = vy - vr * uy
                if vr < v_rest:
                    vx = vtx
                    vy = vty
                else:
                    vx = (1.0 - mu_t) * vtx - e * vr * ux
                    vy = (1.0 - mu_t) * vty - e * vr * uy
            n_contact += 1

        for w in range(n_w):
            rw = wall_r[w]
            s0 = r0 - rw
            s1 = r1 - rw
            if s0 > ball_r and s1 > ball_r:
                break       # outside this band; inner walls are further still
            if s0 < -ball_r and s1 < -ball_r:
                continue    # inside this wall; only inner walls can interact

            blocked_hit = False
            side = 1.0
            if (s0 >= 0.0) != (s1 >= 0.0):
                # path crosses the wall radius; find the crossing angle
                dx = px1 - px0
                dy = py1 - py0
                a = dx * dx + dy * dy
                t = 0.0
                if a > 0.0:
                    b = 2.0 * (px0 * dx + py0 * dy)
                    c = r0 * r0 - rw * rw
                    disc = b * b - 4.0 * a * c
                    if disc < 0.0:
                        disc = 0.0
                    sq = math.sqrt(disc)
                    t = (-b - sq) / (2.0 * a)
                    if t < 0.0 or t > 1.0:
                        t = (-b + sq) / (2.0 * a)
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                theta = math.atan2(py0 + t * dy, px0 + t * dx)
                if not _in_gate(theta, w, gate_c, gate_hw, gate_off):
                    blocked_hit = True
                    side = 1.0 if s0 >= 0.0 else -1.0
            if not blocked_hit and -ball_r < s1 < ball_r:
                theta1 = math.atan2(py1, px1)
                if not _in_gate(theta1, w, gate_c, gate_hw, gate_off):
                    blocked_hit = True
                    side = 1.0 if s1 >= 0.0 else -1.0
            if blocked_hit:
                target = rw + side * ball_r
                rc = math.hypot(px1, py1)
                if rc > 0.0:
                    scale = target / rc
                    px1 *= scale
                    py1 *= scale
                r1 = math.hypot(px1, py1)
                ux = px1 / r1
                uy = py1 / r1
                vr = vx * ux + vy * uy
                into = -side * vr
                if into > 0.0:
                    vtx = vx - vr * ux
                    vty = vy - vr * uy
                    if into < v_rest:
                        vx = vtx
                        vy = vty
                    else:
                        vx = (1.0 - mu_t) * vtx - e * vr * ux
                        vy = (1.0 - mu_t) * vty - e * vr * uy
                n_contact += 1

        # gate-crossing events: sign change of (radius - wall radius) across
        # the resolved substep; blocked crossings were undone above
        for w in range(n_w):
            rw = wall_r[w]
            out0 = (r0 - rw) >= 0.0
            out1 = (r1 - rw) >= 0.0
            if out0 and out1:
                break
            if out0 != out1:
                if n_cross < cross_wall.shape[0]:
                    cross_wall[n_cross] = w
                    cross_dir[n_cross] = -1 if out1 else 1
                    n_cross += 1

        if debug != 0:
            if r1 - board_limit > max_pen:
                max_pen = r1 - board_limit
            theta1 = math.atan2(py1, px1)
            for w in range(n_w):
                d = abs(r1 - wall_r[w])
                if d < ball_r and not _in_gate(theta1, w, gate_c, gate_hw, gate_off):
                    pen = ball_r - d
                    if pen > max_pen:
                        max_pen = pen

        px = px1
        py = py1

    return px, py, vx, vy, tx, ty, n_cross, n_contact, max_pen


def reset(geom: MazeGeometry, task: TaskSpec, seed: int) -> BoardState:
    """Place the ball at rest at a seeded random angle in the outermost band."""
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, TWO_PI)
    r_mid = 0.5 * ((geom.walls[0].radius + geom.ball_radius) + geom.play_limit)
    return BoardState(
        ball_pos=(r_mid * math.cos(angle), r_mid * math.sin(angle)),
        ball_vel=(0.0, 0.0),
        tilt=(0.0, 0.0),
        step_count=0,
    )


def step(
    geom: MazeGeometry,
    state: BoardState,
    action: Action,
    task: TaskSpec,
    physics: PhysicsParams = DEFAULT_PHYSICS,
    debug_containment: bool = False,
) -> tuple[BoardState, float, StepEvents]:
    """Apply one action and integrate one control interval.

    Returns the next state, the task reward earned this step, and the step's
    events. Raises IntegrationFaultError on non-finite state rather than
    clamping, and ContainmentError if debug mode sees penetration > 1e-9 m.
    """
    if not state.is_finite():
        raise IntegrationFaultError(f"non-finite state: {state}")
    wall_r, gate_c, gate_hw, gate_off, board_limit, ball_r = geom_arrays(geom)
    cross_wall = np.empty(16, dtype=np.int64)
    cross_dir = np.empty(16, dtype=np.int64)
    px, py, vx, vy, tx, ty, n_cross, n_contact, max_pen = _control_step(
        state.ball_pos[0], state.ball_pos[1],
        state.ball_vel[0], state.ball_vel[1],
        state.tilt[0], state.tilt[1],
        int(action), physics.substeps, physics_packed(physics),
        wall_r, gate_c, gate_hw, gate_off, board_limit, ball_r,
        cross_wall, cross_dir, 1 if debug_containment else 0,
    )
    new_state = BoardState(
        ball_pos=(px, py), ball_vel=(vx, vy), tilt=(tx, ty),
        step_count=state.step_count + 1,
    )
    if not new_state.is_finite():
        raise IntegrationFaultError(f"integration produced non-finite state from {state}")
    if debug_containment and max_pen > 1e-9:
        raise ContainmentError(f"wall penetration {max_pen:.3e} m at step {new_state.step_count}")

    crossings = [(int(cross_wall[i]), int(cross_dir[i])) for i in range(n_cross)]
    events = StepEvents(
        gate_crossings=[(w + 1, INWARD if d == 1 else OUTWARD) for w, d in crossings],
        wall_contacts=int(n_contact),
        terminal=is_terminal(task, geom, math.hypot(px, py), crossings),
    )
    reward = reward_from_events(task, events)
    return new_state, reward, events


def radial_distance(state: BoardState) -> float:
    """Ball center's distance from the board center."""
    return math.hypot(state.ball_pos[0], state.ball_pos[1])
