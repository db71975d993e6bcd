"""Time-step simulation shared by training and evaluation.

One time step: the drone transitions to (or holds) the selected viewpoint
while the actor keeps walking, and per-frame shot metrics are collected for
the reward pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import camera, world
from .camera import CameraRig, FrameMetrics
from .reward import RewardConfig, StepReward, step_reward
from .world import ActorTrack, HeightMap, WorldState

STEP_SECONDS = 6.0
STEPS_PER_EPISODE = 5


@dataclass
class EnvBundle:
    """Everything a run needs: the map, the actor's motion, the rig, reward knobs."""

    height_map: HeightMap
    track: ActorTrack
    rig: CameraRig = field(default_factory=CameraRig)
    reward_cfg: RewardConfig = field(default_factory=RewardConfig)
    step_seconds: float = STEP_SECONDS
    steps_per_episode: int = STEPS_PER_EPISODE


@dataclass
class StepOutcome:
    metrics: list[FrameMetrics]
    reward: StepReward
    state: WorldState  # world state after the step
    episode_end: bool  # collision or route exhausted


def initial_state(bundle: EnvBundle, start_progress: float, init_mode: int) -> WorldState:
    pos, heading = bundle.track.point_at(start_progress)
    pose = camera.viewpoint_for(init_mode, pos, heading, bundle.rig)
    return WorldState(
        actor_position=pos,
        actor_heading=heading,
        drone_position=pose.position,
        shot_mode=init_mode,
        repetition_count=1,
        step_index=0,
        route_progress=start_progress,
    )


def simulate_step(
    bundle: EnvBundle,
    state: WorldState,
    action: int,
    rng: np.random.Generator | None = None,
) -> StepOutcome:
    """Advance one 6 s time step under the chosen shot mode.

    The actor walks frame by frame; the drone follows the transition arc from
    the previous mode to `action`. A collision in any frame ends the episode.
    """
    prev_mode = state.shot_mode
    rep = state.repetition_count + 1 if action == prev_mode else 1
    n = bundle.reward_cfg.frames_per_step
    dt = bundle.step_seconds / n

    traj = []
    cur = state
    route_done = False
    for _ in range(n):
        cur, route_done = world.advance_actor(
            bundle.track, cur, dt, rng=rng, height_map=bundle.height_map
        )
        traj.append((cur.actor_position, cur.actor_heading))
        if route_done:
            break
    while len(traj) < n:  # actor holds position at the route end
        traj.append(traj[-1])

    poses = camera.transition_arc(prev_mode, action, traj, bundle.rig, n)
    metrics = []
    collided = False
    for pose, (pos, heading) in zip(poses, traj):
        m = camera.frame_metrics(pose, pos, heading, bundle.height_map, bundle.rig)
        metrics.append(m)
        if m.collided:
            collided = True
            break

    rew = step_reward(metrics, rep, bundle.reward_cfg)
    new_state = WorldState(
        actor_position=cur.actor_position,
        actor_heading=cur.actor_heading,
        drone_position=poses[len(metrics) - 1].position,
        shot_mode=action,
        repetition_count=rep,
        step_index=state.step_index + 1,
        route_progress=cur.route_progress,
        route_done=route_done,
    )
    return StepOutcome(
        metrics=metrics,
        reward=rew,
        state=new_state,
        episode_end=collided or route_done,
    )


def episode_span_meters(bundle: EnvBundle) -> float:
    """Route arc length one full episode consumes."""
    return bundle.track.speed * bundle.step_seconds * bundle.steps_per_episode


def draw_start_progress(bundle: EnvBundle, rng: np.random.Generator) -> float:
    """Uniform start offset that leaves room for a full episode on the route."""
    if bundle.track.mode != "fixed-route":
        return 0.0
    slack = bundle.track.total_length() - episode_span_meters(bundle) - 1.0
    return float(rng.uniform(0.0, max(slack, 0.0)))
