"""2.5D height-map worlds, actor motion, and the local map crop fed to the agent."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

CROP_SIZE = 24
DEFAULT_RESOLUTION = 1.0  # meters per cell
DEFAULT_MAX_OBSTACLE_HEIGHT = 20.0  # meters
MIN_MAP_CELLS = 48  # 24x24 crop must fit after edge clamping


class WorldConfigError(ValueError):
    """Raised for invalid world-generation configuration."""


class RoamingError(RuntimeError):
    """Raised when no reachable roaming target can be drawn."""


@dataclass
class HeightMap:
    """Grid of obstacle heights; cells[iy, ix] is the tallest obstacle in meters."""

    cells: np.ndarray  # shape (height, width), float64, meters
    resolution: float = DEFAULT_RESOLUTION
    max_obstacle_height: float = DEFAULT_MAX_OBSTACLE_HEIGHT

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.float64)
        if self.cells.ndim != 2:
            raise WorldConfigError("height map cells must be 2-D")
        if self.cells.shape[0] < MIN_MAP_CELLS or self.cells.shape[1] < MIN_MAP_CELLS:
            raise WorldConfigError(f"map must be at least {MIN_MAP_CELLS} cells per side")
        if np.any(self.cells < 0) or np.any(self.cells > self.max_obstacle_height):
            raise WorldConfigError("cell heights must lie in [0, max_obstacle_height]")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def cell_index(self, x: float, y: float) -> tuple[int, int]:
        return int(math.floor(x / self.resolution)), int(math.floor(y / self.resolution))

    def in_bounds(self, x: float, y: float) -> bool:
        ix, iy = self.cell_index(x, y)
        return 0 <= ix < self.width and 0 <= iy < self.height

    def height_at(self, x: float, y: float) -> float:
        """Obstacle height at a world position; outside the map reads as 0."""
        ix, iy = self.cell_index(x, y)
        if 0 <= ix < self.width and 0 <= iy < self.height:
            return float(self.cells[iy, ix])
        return 0.0


@dataclass
class ActorTrack:
    """Actor motion description: a fixed polyline route or free roaming."""

    waypoints: list[tuple[float, float]]
    speed: float = 1.5  # m/s, walking pace
    mode: str = "fixed-route"  # "fixed-route" | "roaming"
    # runtime cursor for roaming mode (cell-center polyline toward current target)
    roam_path: list[tuple[float, float]] = field(default_factory=list, repr=False)
    roam_progress: float = field(default=0.0, repr=False)

    def __post_init__(self):
        if self.mode not in ("fixed-route", "roaming"):
            raise WorldConfigError(f"unknown track mode {self.mode!r}")
        if self.speed <= 0:
            raise WorldConfigError("actor speed must be positive")
        if self.mode == "fixed-route":
            if len(self.waypoints) < 2:
                raise WorldConfigError("fixed route needs at least two waypoints")
            for a, b in zip(self.waypoints, self.waypoints[1:]):
                if a == b:
                    raise WorldConfigError("consecutive waypoints must be distinct")

    def total_length(self) -> float:
        return sum(
            math.dist(a, b) for a, b in zip(self.waypoints, self.waypoints[1:])
        )

    def point_at(self, progress: float) -> tuple[tuple[float, float], float]:
        """Position and heading at arc length `progress` along the route polyline."""
        return _polyline_point(self.waypoints, progress)


@dataclass
class WorldState:
    """Mutable per-episode state: actor pose and route progress, drone pose, shot bookkeeping."""

    actor_position: tuple[float, float]
    actor_heading: float
    drone_position: tuple[float, float, float]
    shot_mode: int  # index into camera.SHOT_MODES
    repetition_count: int
    step_index: int = 0
    route_progress: float = 0.0
    route_done: bool = False


def _polyline_point(waypoints, progress):
    remaining = max(progress, 0.0)
    for a, b in zip(waypoints, waypoints[1:]):
        seg = math.dist(a, b)
        if remaining <= seg:
            f = remaining / seg
            pos = (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
            heading = math.atan2(b[1] - a[1], b[0] - a[0])
            return pos, heading
        remaining -= seg
    a, b = waypoints[-2], waypoints[-1]
    return tuple(b), math.atan2(b[1] - a[1], b[0] - a[0])


def advance_actor(
    track: ActorTrack,
    state: WorldState,
    dt: float,
    rng: np.random.Generator | None = None,
    height_map: HeightMap | None = None,
    max_target_retries: int = 20,
) -> tuple[WorldState, bool]:
    """Move the actor for `dt` seconds; returns (new state, episode_end flag).

    Fixed routes advance along the polyline and flag the end when the final
    waypoint is reached. Roaming draws uniform free-ground targets and follows
    a shortest 4-connected path; an unreachable target is redrawn up to
    `max_target_retries` times before raising RoamingError.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if track.mode == "fixed-route":
        total = track.total_length()
        if state.route_progress >= total:
            return replace(state, route_done=True), True
        progress = min(state.route_progress + track.speed * dt, total)
        pos, heading = track.point_at(progress)
        done = progress >= total
        return replace(
            state,
            actor_position=pos,
            actor_heading=heading,
            route_progress=progress,
            route_done=done,
        ), done

    if height_map is None or rng is None:
        raise ValueError("roaming mode needs a height map and an rng")
    remaining = track.speed * dt
    pos = state.actor_position
    heading = state.actor_heading
    while remaining > 1e-12:
        if not track.roam_path or track.roam_progress >= _path_length(track.roam_path):
            track.roam_path = _draw_roam_path(height_map, pos, rng, max_target_retries)
            track.roam_progress = 0.0
        path_len = _path_length(track.roam_path)
        step = min(remaining, path_len - track.roam_progress)
        track.roam_progress += step
        remaining -= step
        pos, heading = _polyline_point(track.roam_path, track.roam_progress)
        if track.roam_progress >= path_len:
            track.roam_path = []
    return replace(state, actor_position=pos, actor_heading=heading), False


def _path_length(path):
    return sum(math.dist(a, b) for a, b in zip(path, path[1:]))


def _draw_roam_path(height_map, start_pos, rng, max_retries):
    free = np.argwhere(height_map.cells == 0.0)
    if len(free) == 0:
        raise RoamingError("no free ground in map")
    res = height_map.resolution
    start_cell = height_map.cell_index(*start_pos)
    for _ in range(max_retries):
        iy, ix = free[rng.integers(len(free))]
        target = (int(ix), int(iy))
        if target == start_cell:
            continue
        cells = _shortest_free_path(height_map, start_cell, target)
        if cells is not None:
            path = [tuple(start_pos)] + [
                ((cx + 0.5) * res, (cy + 0.5) * res) for cx, cy in cells[1:]
            ]
            if _path_length(path) > 0:
                return path
    raise RoamingError(f"no reachable roaming target after {max_retries} draws")


def _shortest_free_path(height_map, start, goal):
    """BFS shortest path over free (height 0) cells, 4-connected; None if unreachable."""
    w, h = height_map.width, height_map.height
    free = height_map.cells == 0.0
    sx, sy = start
    if not (0 <= sx < w and 0 <= sy < h and free[sy, sx]):
        return None
    prev = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            cells = []
            while cur is not None:
                cells.append(cur)
                cur = prev[cur]
            return cells[::-1]
        cx, cy = cur
        for nx, ny in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
            if 0 <= nx < w and 0 <= ny < h and free[ny, nx] and (nx, ny) not in prev:
                prev[(nx, ny)] = cur
                queue.append((nx, ny))
    return None


def crop_local_map(height_map: HeightMap, center: tuple[float, float], heading: float) -> np.ndarray:
    """24x24 byte crop centered on the actor, rotated so `heading` points up (row 0).

    Heights quantize linearly to 0..255 with max_obstacle_height at 255;
    cells outside the map read as 0. Nearest-neighbor sampling keeps 90-degree
    world rotations exact.
    """
    if not height_map.in_bounds(*center):
        raise ValueError("crop center outside map bounds")
    res = height_map.resolution
    half = (CROP_SIZE - 1) / 2.0
    i, j = np.meshgrid(np.arange(CROP_SIZE), np.arange(CROP_SIZE), indexing="ij")
    fwd = half - i  # distance ahead of the actor, rows count down
    right = j - half
    # sample relative to the actor's cell center so half-integer offsets land
    # exactly on cell centers under 90-degree rotations
    ci, cj = height_map.cell_index(*center)
    cx, cy = (ci + 0.5) * res, (cj + 0.5) * res
    fx, fy = math.cos(heading), math.sin(heading)
    rx, ry = math.sin(heading), -math.cos(heading)
    px = cx + res * (fwd * fx + right * rx)
    py = cy + res * (fwd * fy + right * ry)
    ix = np.floor(px / res).astype(int)
    iy = np.floor(py / res).astype(int)
    inside = (ix >= 0) & (ix < height_map.width) & (iy >= 0) & (iy < height_map.height)
    heights = np.zeros((CROP_SIZE, CROP_SIZE))
    heights[inside] = height_map.cells[iy[inside], ix[inside]]
    return quantize_heights(heights, height_map.max_obstacle_height)


def quantize_heights(heights: np.ndarray, max_height: float) -> np.ndarray:
    """Linear quantization to bytes, round-half-up, max_height -> 255."""
    scaled = 255.0 * np.asarray(heights, dtype=np.float64) / max_height
    return np.floor(scaled + 0.5).clip(0, 255).astype(np.uint8)


# --- generators -------------------------------------------------------------


@dataclass(frozen=True)
class BlockWorldConfig:
    width: int = 160
    height: int = 64
    path_y: float = 32.0
    path_margin: float = 8.0  # route inset from the map edges, meters
    block_length_range: tuple[int, int] = (6, 12)
    block_depth: int = 6
    block_gap_range: tuple[int, int] = (4, 22)  # wide gaps give open stretches too
    path_clearance: int = 2  # free cells between path and block footprint
    block_height_range: tuple[float, float] = (5.0, 15.0)
    resolution: float = DEFAULT_RESOLUTION
    max_obstacle_height: float = DEFAULT_MAX_OBSTACLE_HEIGHT
    actor_speed: float = 1.5

    def validate(self):
        for lo, hi in (self.block_length_range, self.block_gap_range, self.block_height_range):
            if lo > hi:
                raise WorldConfigError("config range is inverted")
        if self.block_height_range[1] > self.max_obstacle_height:
            raise WorldConfigError("block heights exceed max_obstacle_height")


def generate_block_world(
    seed: int, config: BlockWorldConfig = BlockWorldConfig()
) -> tuple[HeightMap, ActorTrack]:
    """Corridor world with blocks alternating left/right of a straight actor path."""
    config.validate()
    rng = np.random.default_rng(seed)
    cells = np.zeros((config.height, config.width))
    path_row = int(config.path_y / config.resolution)
    x = int(config.path_margin) + 8
    side = 1  # 1 = left of travel direction (+y), -1 = right
    while True:
        length = int(rng.integers(config.block_length_range[0], config.block_length_range[1] + 1))
        if x + length >= config.width - int(config.path_margin):
            break
        h = rng.uniform(*config.block_height_range)
        if side > 0:
            y0 = path_row + 1 + config.path_clearance
            y1 = min(y0 + config.block_depth, config.height)
        else:
            y1 = path_row - config.path_clearance
            y0 = max(y1 - config.block_depth, 0)
        cells[y0:y1, x : x + length] = h
        x += length + int(rng.integers(config.block_gap_range[0], config.block_gap_range[1] + 1))
        side = -side
    hmap = HeightMap(cells, config.resolution, config.max_obstacle_height)
    track = ActorTrack(
        waypoints=[
            (config.path_margin, config.path_y),
            (config.width * config.resolution - config.path_margin, config.path_y),
        ],
        speed=config.actor_speed,
    )
    return hmap, track


@dataclass(frozen=True)
class BigmapConfig:
    width: int = 200
    height: int = 96
    path_y: float = 48.0
    path_margin: float = 8.0
    pillar_offset: int = 5  # cells from the path to each pillar row
    pillar_spacing_range: tuple[int, int] = (5, 9)
    pillar_height_range: tuple[float, float] = (8.0, 16.0)
    mountain_height_range: tuple[float, float] = (6.0, 18.0)
    mountain_base_range: tuple[int, int] = (8, 14)
    mountain_offset: int = 4
    block_depth_range: tuple[int, int] = (4, 10)
    block_clearance_range: tuple[int, int] = (2, 5)
    resolution: float = DEFAULT_RESOLUTION
    max_obstacle_height: float = DEFAULT_MAX_OBSTACLE_HEIGHT
    actor_speed: float = 1.5

    def validate(self):
        for lo, hi in (
            self.pillar_spacing_range,
            self.pillar_height_range,
            self.mountain_height_range,
            self.mountain_base_range,
            self.block_depth_range,
            self.block_clearance_range,
        ):
            if lo > hi:
                raise WorldConfigError("config range is inverted")
        if max(self.pillar_height_range[1], self.mountain_height_range[1]) > self.max_obstacle_height:
            raise WorldConfigError("obstacle heights exceed max_obstacle_height")


BIGMAP_SECTIONS = ("blocks", "pillars", "mountains")


def generate_bigmap_section(
    section: str, seed: int, config: BigmapConfig = BigmapConfig()
) -> tuple[HeightMap, ActorTrack]:
    """One section of the larger training map: blocks, pillar rows, or mountain rows."""
    config.validate()
    if section not in BIGMAP_SECTIONS:
        raise WorldConfigError(f"unknown bigmap section {section!r}")
    rng = np.random.default_rng(seed)
    cells = np.zeros((config.height, config.width))
    path_row = int(config.path_y / config.resolution)
    x0 = int(config.path_margin) + 6
    x1 = config.width - int(config.path_margin) - 6

    if section == "blocks":
        x = x0
        side = 1
        while x < x1:
            length = int(rng.integers(5, 14))
            depth = int(rng.integers(config.block_depth_range[0], config.block_depth_range[1] + 1))
            clearance = int(
                rng.integers(config.block_clearance_range[0], config.block_clearance_range[1] + 1)
            )
            h = rng.uniform(5.0, config.max_obstacle_height * 0.8)
            if side > 0:
                ya = path_row + 1 + clearance
                yb = min(ya + depth, config.height)
            else:
                yb = path_row - clearance
                ya = max(yb - depth, 0)
            cells[ya:yb, x : min(x + length, config.width)] = h
            x += length + int(rng.integers(3, 9))
            side = -side
    elif section == "pillars":
        for side in (1, -1):
            x = x0
            while x < x1:
                fp = int(rng.integers(1, 3))  # footprint 1 or 2 cells
                h = rng.uniform(*config.pillar_height_range)
                row = path_row + side * config.pillar_offset
                cells[row : row + fp, x : x + fp] = h
                x += fp + int(
                    rng.integers(config.pillar_spacing_range[0], config.pillar_spacing_range[1] + 1)
                )
    else:  # mountains
        for side in (1, -1):
            x = x0
            while x < x1:
                base = int(
                    rng.integers(config.mountain_base_range[0], config.mountain_base_range[1] + 1)
                )
                peak = rng.uniform(*config.mountain_height_range)
                center_off = config.mountain_offset + base // 2
                cx = x + base // 2
                cy = path_row + side * center_off
                for iy in range(max(cy - base // 2, 0), min(cy + base // 2 + 1, config.height)):
                    for ix in range(max(cx - base // 2, 0), min(cx + base // 2 + 1, config.width)):
                        d = max(abs(ix - cx), abs(iy - cy))
                        h = peak * (1.0 - d / (base // 2 + 1))
                        if h > cells[iy, ix]:
                            cells[iy, ix] = h
                x += base + int(rng.integers(4, 10))
    # keep the route itself on free ground
    cells[path_row, :] = 0.0
    hmap = HeightMap(cells, config.resolution, config.max_obstacle_height)
    track = ActorTrack(
        waypoints=[
            (config.path_margin, config.path_y),
            (config.width * config.resolution - config.path_margin, config.path_y),
        ],
        speed=config.actor_speed,
    )
    return hmap, track


# --- serialization ----------------------------------------------------------


def save_world(height_map: HeightMap, track: ActorTrack, pgm_path: str | Path) -> None:
    """Write the map as 8-bit binary PGM (P5) with a JSON sidecar for scale and track."""
    pgm_path = Path(pgm_path)
    data = quantize_heights(height_map.cells, height_map.max_obstacle_height)
    with open(pgm_path, "wb") as f:
        f.write(f"P5\n{height_map.width} {height_map.height}\n255\n".encode())
        f.write(data.tobytes())
    sidecar = {
        "resolution": height_map.resolution,
        "max_obstacle_height": height_map.max_obstacle_height,
        "track": {
            "waypoints": [list(w) for w in track.waypoints],
            "speed": track.speed,
            "mode": track.mode,
        },
    }
    pgm_path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True))


def load_world(pgm_path: str | Path) -> tuple[HeightMap, ActorTrack]:
    pgm_path = Path(pgm_path)
    raw = pgm_path.read_bytes()
    if not raw.startswith(b"P5"):
        raise WorldConfigError("expected binary PGM (P5)")
    # header: magic, width height, maxval, then raw bytes
    parts = []
    idx = 0
    while len(parts) < 4:
        nl = raw.index(b"\n", idx)
        line = raw[idx:nl]
        idx = nl + 1
        if not line.startswith(b"#"):
            parts.extend(line.split())
    width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    data = np.frombuffer(raw[idx : idx + width * height], dtype=np.uint8).reshape(height, width)
    sidecar = json.loads(pgm_path.with_suffix(".json").read_text())
    max_h = sidecar["max_obstacle_height"]
    cells = data.astype(np.float64) * max_h / maxval
    hmap = HeightMap(cells, sidecar["resolution"], max_h)
    t = sidecar["track"]
    track = ActorTrack([tuple(w) for w in t["waypoints"]], t["speed"], t["mode"])
    return hmap, track
