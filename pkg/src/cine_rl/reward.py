"""Hand-crafted aesthetic reward pipeline and the star-rating reward mapping."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from .camera import FrameMetrics

ARTISTIC_PUNISHMENT = -0.5
COLLISION_PUNISHMENT = -1.0


@dataclass(frozen=True)
class RewardConfig:
    theta_opt: float = math.atan2(2.0, 5.0)  # steady tilt of the default rig
    theta_tol: float = math.radians(15.0)
    pr_min: float = 0.005
    pr_max: float = 0.05
    c_opt: int = 2
    frames_per_step: int = 60  # 10 Hz over a 6 s time step

    def __post_init__(self):
        if self.theta_tol <= 0:
            raise ValueError("theta_tol must be positive")
        if not (0 < self.pr_min < self.pr_max <= 1):
            raise ValueError("need 0 < pr_min < pr_max <= 1")
        if self.c_opt < 1 or self.frames_per_step < 1:
            raise ValueError("c_opt and frames_per_step must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StepReward:
    """Per-time-step reward breakdown."""

    r_avg: float
    alpha_c: float
    r_discounted: float
    r: float
    collided: bool


def frame_reward(m: FrameMetrics, cfg: RewardConfig) -> float:
    """Per-frame reward: linear decay of the shot-angle score inside the tilt
    tolerance, chained through the presence-ratio bounds check."""
    dev = abs(m.tilt_angle - cfg.theta_opt)
    r_sa = 1.0 - dev / cfg.theta_tol if dev <= cfg.theta_tol else ARTISTIC_PUNISHMENT
    if cfg.pr_min <= m.presence_ratio <= cfg.pr_max:
        return r_sa
    return ARTISTIC_PUNISHMENT


def average_step_reward(frame_rewards: list[float]) -> float:
    if not frame_rewards:
        raise ValueError("need at least one frame reward")
    return sum(frame_rewards) / len(frame_rewards)


def repetition_coefficient(c: int, c_opt: int) -> float:
    """Repetition discount, peaking at 1.0 when the shot is held c_opt steps."""
    if c < 1:
        raise ValueError("repetition count must be >= 1")
    if c <= c_opt:
        return c / c_opt
    return c_opt / c**2


def discount_step_reward(r_avg: float, alpha_c: float) -> float:
    """Scale positive rewards down and amplify punishments when alpha_c < 1."""
    if alpha_c <= 0:
        raise ValueError("alpha_c must be positive")
    return r_avg * alpha_c if r_avg >= 0 else r_avg / alpha_c


def total_step_reward(r_discounted: float, collided: bool) -> float:
    """Collision overrides everything; otherwise clamp into [-1, 1] so a crash
    stays the worst outcome."""
    if collided:
        return COLLISION_PUNISHMENT
    return max(-1.0, min(1.0, r_discounted))


def step_reward(
    metrics: list[FrameMetrics], repetition_count: int, cfg: RewardConfig
) -> StepReward:
    """Full per-step pipeline: frame rewards, average, repetition discount, collision check."""
    collided = any(m.collided for m in metrics)
    r_avg = average_step_reward([frame_reward(m, cfg) for m in metrics])
    alpha = repetition_coefficient(repetition_count, cfg.c_opt)
    r_disc = discount_step_reward(r_avg, alpha)
    return StepReward(
        r_avg=r_avg,
        alpha_c=alpha,
        r_discounted=r_disc,
        r=total_step_reward(r_disc, collided),
        collided=collided,
    )


def stars_to_reward(stars: int) -> float:
    """0 stars (collision) -> -1; 1..5 stars map linearly onto [-0.5, 1]."""
    if not isinstance(stars, int) or stars < 0 or stars > 5:
        raise ValueError("stars must be an integer in 0..5")
    if stars == 0:
        return COLLISION_PUNISHMENT
    return -0.5 + 0.375 * (stars - 1)
