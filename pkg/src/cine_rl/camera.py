"""Kinematic drone-camera model: viewpoint placement, transition arcs, frame metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .world import HeightMap

# action ordering: left, right, front, back
SHOT_MODES = ("left", "right", "front", "back")
N_ACTIONS = len(SHOT_MODES)

# azimuth offset of the drone from the actor's heading, per mode
_AZIMUTH_OFFSETS = {
    "left": math.pi / 2,
    "right": -math.pi / 2,
    "front": 0.0,
    "back": math.pi,
}


def mode_index(name: str) -> int:
    return SHOT_MODES.index(name)


def azimuth_offset(mode: int) -> float:
    return _AZIMUTH_OFFSETS[SHOT_MODES[mode]]


def switch_degrees(mode_a: int, mode_b: int) -> int:
    """Angular size of a mode switch: 0, 90, or 180 degrees."""
    d = abs(azimuth_offset(mode_a) - azimuth_offset(mode_b))
    d = min(d, 2 * math.pi - d)
    return round(math.degrees(d))


@dataclass(frozen=True)
class CameraRig:
    orbit_radius: float = 5.0
    altitude_offset: float = 2.0  # meters above the actor's head
    horizontal_fov: float = math.radians(90.0)
    vertical_fov: float = math.radians(60.0)
    actor_height: float = 1.8
    actor_width: float = 0.5
    safety_clearance: float = 0.5

    def __post_init__(self):
        for v in (self.orbit_radius, self.altitude_offset, self.horizontal_fov,
                  self.vertical_fov, self.actor_height, self.actor_width):
            if v <= 0:
                raise ValueError("rig parameters must be positive")
        if self.horizontal_fov >= math.pi or self.vertical_fov >= math.pi:
            raise ValueError("fov must be below pi")

    @property
    def steady_tilt(self) -> float:
        """Tilt angle when holding a viewpoint at orbit radius."""
        return math.atan2(self.altitude_offset, self.orbit_radius)


@dataclass(frozen=True)
class DronePose:
    position: tuple[float, float, float]
    look_at: tuple[float, float, float]  # the actor chest point the camera aims at


@dataclass(frozen=True)
class FrameMetrics:
    tilt_angle: float  # radians, below horizontal
    presence_ratio: float  # in [0, 1]
    occluded: bool
    collided: bool


def viewpoint_for(
    mode: int, actor_position: tuple[float, float], actor_heading: float, rig: CameraRig
) -> DronePose:
    """Drone pose for a shot mode: orbit_radius out at the mode's azimuth, above head height."""
    az = actor_heading + azimuth_offset(mode)
    x = actor_position[0] + rig.orbit_radius * math.cos(az)
    y = actor_position[1] + rig.orbit_radius * math.sin(az)
    z = rig.actor_height + rig.altitude_offset
    chest = (actor_position[0], actor_position[1], rig.actor_height / 2)
    return DronePose((x, y, z), chest)


def _interp_delta(from_off: float, to_off: float) -> float:
    """Signed shorter-arc azimuth change; 180-degree ties pass behind the actor."""
    d = (to_off - from_off + math.pi) % (2 * math.pi) - math.pi
    if abs(abs(d) - math.pi) < 1e-12:
        # choose the direction whose midpoint is the back azimuth
        d = math.pi if from_off >= 0 else -math.pi
    return d


def transition_arc(
    from_mode: int,
    to_mode: int,
    actor_trajectory: list[tuple[tuple[float, float], float]],
    rig: CameraRig,
    n_frames: int,
) -> list[DronePose]:
    """Drone poses across one time step while switching viewpoints.

    The azimuth swings along the shorter arc around the (moving) actor during
    the first half of the step, then holds the new offset; radius and altitude
    stay constant. `actor_trajectory` supplies (position, heading) per frame.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if len(actor_trajectory) != n_frames:
        raise ValueError("actor trajectory length must equal n_frames")
    from_off = azimuth_offset(from_mode)
    delta = _interp_delta(from_off, azimuth_offset(to_mode))
    poses = []
    for k, (pos, heading) in enumerate(actor_trajectory):
        u = k / (n_frames - 1) if n_frames > 1 else 1.0
        frac = min(2.0 * u, 1.0)
        off = from_off + frac * delta
        az = heading + off
        x = pos[0] + rig.orbit_radius * math.cos(az)
        y = pos[1] + rig.orbit_radius * math.sin(az)
        z = rig.actor_height + rig.altitude_offset
        poses.append(DronePose((x, y, z), (pos[0], pos[1], rig.actor_height / 2)))
    return poses


def presence_ratio(distance: float, rig: CameraRig) -> float:
    """Projected actor bounding-box area over image area under the pinhole model."""
    if distance <= 0:
        return 1.0
    wr = rig.actor_width / (2 * distance * math.tan(rig.horizontal_fov / 2))
    hr = rig.actor_height / (2 * distance * math.tan(rig.vertical_fov / 2))
    return min(wr, 1.0) * min(hr, 1.0)


def ray_occluded(
    height_map: HeightMap,
    start: tuple[float, float, float],
    end: tuple[float, float, float],
) -> bool:
    """Cell-stepping occlusion check along the 3-D segment from camera to chest.

    Visits every grid cell the horizontal projection crosses and compares the
    cell's obstacle height against the ray height at the midpoint of the
    crossing.
    """
    res = height_map.resolution
    x0, y0, z0 = start
    x1, y1, z1 = end
    dx, dy = x1 - x0, y1 - y0
    length = math.hypot(dx, dy)
    if length < 1e-9:
        return height_map.height_at(x0, y0) >= min(z0, z1)
    for t0, t1, ix, iy in _cell_crossings(x0, y0, x1, y1, res):
        if 0 <= ix < height_map.width and 0 <= iy < height_map.height:
            tm = (t0 + t1) / 2
            ray_z = z0 + tm * (z1 - z0)
            if height_map.cells[iy, ix] >= ray_z:
                return True
    return False


def _cell_crossings(x0, y0, x1, y1, res):
    """DDA traversal: yields (t_enter, t_exit, ix, iy) for each crossed cell."""
    dx, dy = x1 - x0, y1 - y0
    ix, iy = int(math.floor(x0 / res)), int(math.floor(y0 / res))
    ix1, iy1 = int(math.floor(x1 / res)), int(math.floor(y1 / res))
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    t = 0.0
    t_max_x = ((ix + (step_x > 0)) * res - x0) / dx if dx != 0 else math.inf
    t_max_y = ((iy + (step_y > 0)) * res - y0) / dy if dy != 0 else math.inf
    t_dx = abs(res / dx) if dx != 0 else math.inf
    t_dy = abs(res / dy) if dy != 0 else math.inf
    for _ in range(10000):
        t_next = min(t_max_x, t_max_y, 1.0)
        yield t, t_next, ix, iy
        if (ix, iy) == (ix1, iy1) or t_next >= 1.0:
            return
        t = t_next
        if t_max_x < t_max_y:
            t_max_x += t_dx
            ix += step_x
        else:
            t_max_y += t_dy
            iy += step_y


def frame_metrics(
    pose: DronePose,
    actor_position: tuple[float, float],
    actor_heading: float,
    height_map: HeightMap,
    rig: CameraRig,
) -> FrameMetrics:
    """Per-frame shot metrics: tilt, presence ratio, occlusion and collision flags."""
    cx, cy, cz = pose.position
    horiz = math.hypot(cx - actor_position[0], cy - actor_position[1])
    tilt = math.atan2(cz - rig.actor_height, horiz)
    chest = (actor_position[0], actor_position[1], rig.actor_height / 2)
    dist = math.dist(pose.position, chest)
    occluded = ray_occluded(height_map, pose.position, chest)
    pr = 0.0 if occluded else min(presence_ratio(dist, rig), 1.0)
    out_of_map = not height_map.in_bounds(cx, cy)
    ground = height_map.height_at(cx, cy)
    collided = out_of_map or ground >= cz - rig.safety_clearance
    return FrameMetrics(tilt_angle=tilt, presence_ratio=pr, occluded=occluded, collided=collided)


def ray_occluded_fine(
    height_map: HeightMap,
    start: tuple[float, float, float],
    end: tuple[float, float, float],
    step: float = 0.05,
) -> bool:
    """Brute-force occlusion oracle: dense fixed-step sampling along the segment."""
    length = math.dist(start, end)
    n = max(int(length / step), 1)
    for k in range(n + 1):
        t = k / n
        x = start[0] + t * (end[0] - start[0])
        y = start[1] + t * (end[1] - start[1])
        z = start[2] + t * (end[2] - start[2])
        if height_map.height_at(x, y) >= z:
            return True
    return False
