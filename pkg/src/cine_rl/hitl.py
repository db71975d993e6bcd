"""Human-in-the-loop rating service: exposes the live training scene over HTTP
and feeds star ratings back into the training loop as rewards."""

from __future__ import annotations

import logging
import math
import threading
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import agent as agent_mod
from .episode import EnvBundle
from .reward import stars_to_reward
from .world import crop_local_map

log = logging.getLogger(__name__)


class StepAlreadyOpenError(RuntimeError):
    pass


class RatingRejected(ValueError):
    def __init__(self, message: str, current_step_id: int | None = None):
        super().__init__(message)
        self.current_step_id = current_step_id


@dataclass(frozen=True)
class SceneSnapshot:
    """Top-down view payload plus shot-metric summary for one open time step."""

    step_id: int
    episode: int
    step: int
    local_map: list  # 24x24 byte rows, actor-centered, heading up
    actor_position: list  # [x, y] meters
    actor_heading: float
    drone_position: list  # [x, y, z] meters
    camera_azimuth: float  # world-frame azimuth from actor toward drone
    route_trail: list  # route waypoints, [[x, y], ...]
    shot_mode: int
    mean_presence_ratio: float
    mean_tilt: float
    occluded_fraction: float
    collided: bool
    rating_deadline_seconds: float | None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RatingRecord:
    step_id: int
    stars: int
    rater_id: str
    latency_seconds: float


class RatingGate:
    """Single-producer single-consumer rendezvous: the training loop publishes a
    step and blocks; the first valid rating closes the step and releases it."""

    def __init__(self, timeout_seconds: float | None = None):
        self._cond = threading.Condition()
        self._open: SceneSnapshot | None = None
        self._reward: float | None = None
        self._opened_at = 0.0
        self._last_step_id = 0
        self.timeout_seconds = timeout_seconds
        self.ratings: list[RatingRecord] = []

    def publish_step(self, snapshot: SceneSnapshot) -> None:
        with self._cond:
            if self._open is not None:
                raise StepAlreadyOpenError(f"step {self._open.step_id} is still open")
            if snapshot.step_id <= self._last_step_id:
                raise ValueError("step ids must be strictly increasing")
            self._open = snapshot
            self._reward = None
            self._opened_at = time.monotonic()
            self._last_step_id = snapshot.step_id
            self._cond.notify_all()

    def current_step(self) -> SceneSnapshot | None:
        with self._cond:
            return self._open

    def submit_rating(self, step_id: int, stars, rater_id: str = "") -> float:
        """Validates and delivers a rating; returns the mapped reward."""
        if not isinstance(stars, int) or isinstance(stars, bool) or not 0 <= stars <= 5:
            raise RatingRejected("stars must be an integer in 0..5")
        with self._cond:
            if self._open is None:
                raise RatingRejected("no step is open", current_step_id=self._last_step_id)
            if step_id != self._open.step_id:
                raise RatingRejected(
                    f"stale step id {step_id}", current_step_id=self._open.step_id
                )
            reward = stars_to_reward(stars)
            latency = time.monotonic() - self._opened_at
            self.ratings.append(RatingRecord(step_id, stars, rater_id, latency))
            self._reward = reward
            self._open = None
            self._cond.notify_all()
            return reward

    def wait_for_reward(self) -> float:
        """Blocks until the open step is rated. With a timeout configured the
        wait keeps looping (training pauses) and logs each expiry."""
        with self._cond:
            while self._reward is None:
                if not self._cond.wait(self.timeout_seconds):
                    log.warning(
                        "no rating after %.0f s for step %s; training paused",
                        self.timeout_seconds,
                        self._open.step_id if self._open else "?",
                    )
            reward = self._reward
            self._reward = None
            return reward


@dataclass
class ProgressTracker:
    """Reward curve accumulated during a live run, grouped for display."""

    group_size: int = 30
    episode_rewards: list = field(default_factory=list)  # per-step rewards per episode
    _current_episode: int = -1

    def record(self, episode: int, reward: float) -> None:
        if episode != self._current_episode:
            self.episode_rewards.append([])
            self._current_episode = episode
        self.episode_rewards[-1].append(reward)

    def to_dict(self) -> dict:
        per_episode = [float(np.mean(r)) for r in self.episode_rewards if r]
        return {
            "episodes_completed": len(per_episode),
            "per_episode_mean": per_episode,
            "group_size": self.group_size,
            "grouped_mean": agent_mod.grouped_curve(per_episode, self.group_size),
        }


class HitlSession:
    """Glue between run_training and the rating gate: builds a scene snapshot
    for every time step, blocks for the rating, and tracks progress."""

    def __init__(self, bundle: EnvBundle, gate: RatingGate, group_size: int = 30):
        self.bundle = bundle
        self.gate = gate
        self.progress = ProgressTracker(group_size=group_size)

    def rating_fn(self, summary: dict) -> float:
        snapshot = self._snapshot_from_summary(summary)
        self.gate.publish_step(snapshot)
        reward = self.gate.wait_for_reward()
        self.progress.record(summary["episode"], reward)
        return reward

    def _snapshot_from_summary(self, summary: dict) -> SceneSnapshot:
        ax, ay = summary["actor_position"]
        dx, dy, dz = summary["drone_position"]
        crop = crop_local_map(
            self.bundle.height_map, (ax, ay), summary["actor_heading"]
        )
        return SceneSnapshot(
            step_id=summary["step_id"],
            episode=summary["episode"],
            step=summary["step"],
            local_map=crop.tolist(),
            actor_position=[ax, ay],
            actor_heading=summary["actor_heading"],
            drone_position=[dx, dy, dz],
            camera_azimuth=math.atan2(dy - ay, dx - ax),
            route_trail=[list(w) for w in self.bundle.track.waypoints],
            shot_mode=summary["shot_mode"],
            mean_presence_ratio=summary["mean_presence_ratio"],
            mean_tilt=summary["mean_tilt"],
            occluded_fraction=summary["occluded_fraction"],
            collided=summary["collided"],
            rating_deadline_seconds=self.gate.timeout_seconds,
        )


def build_app(gate: RatingGate, progress: ProgressTracker | None = None,
              static_dir: str | Path | None = None):
    """FastAPI app with the rating endpoints; optionally serves the UI bundle."""
    from fastapi import FastAPI
    from fastapi.responses import JSONResponse

    app = FastAPI(title="cine-rl rating service")

    @app.get("/api/step")
    def get_step():
        snap = gate.current_step()
        if snap is None:
            return JSONResponse({"open": False, "step": None})
        return JSONResponse({"open": True, "step": snap.to_dict()})

    @app.post("/api/rating")
    def post_rating(body: dict):
        try:
            stars = body["stars"]
            step_id = body["step_id"]
        except KeyError as e:
            return JSONResponse({"accepted": False, "error": f"missing field {e}"}, status_code=422)
        try:
            reward = gate.submit_rating(step_id, stars, body.get("rater_id", ""))
        except RatingRejected as e:
            return JSONResponse(
                {"accepted": False, "error": str(e), "current_step_id": e.current_step_id},
                status_code=409,
            )
        return JSONResponse({"accepted": True, "reward": reward})

    @app.get("/api/progress")
    def get_progress():
        if progress is None:
            return JSONResponse({"episodes_completed": 0, "per_episode_mean": [],
                                 "group_size": 30, "grouped_mean": []})
        return JSONResponse(progress.to_dict())

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
