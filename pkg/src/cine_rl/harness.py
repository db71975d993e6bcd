"""Experiment orchestration: baseline policies, evaluation runs, comparison tables,
and behavioral probes."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import agent as agent_mod
from . import episode as ep
from .agent import QNetwork, encode_state, q_values
from .camera import N_ACTIONS, mode_index, switch_degrees
from .episode import EnvBundle
from .world import HeightMap, ActorTrack


class Policy:
    """Maps an encoded agent state to a shot mode."""

    name = "policy"

    def reset(self, rng: np.random.Generator) -> None:
        pass

    def act(self, state, rng: np.random.Generator) -> int:
        raise NotImplementedError


class TrainedPolicy(Policy):
    def __init__(self, net: QNetwork, name: str = "trained"):
        self.net = net
        self.name = name

    def act(self, state, rng):
        return int(np.argmax(q_values(self.net, state)))


class RandomPolicy(Policy):
    name = "random"

    def act(self, state, rng):
        return int(rng.integers(N_ACTIONS))


class BackOnlyPolicy(Policy):
    name = "back_only"

    def act(self, state, rng):
        return mode_index("back")


class FixedSequencePolicy(Policy):
    def __init__(self, sequence: list[int], name: str = "fixed_sequence"):
        if not sequence:
            raise ValueError("sequence must be nonempty")
        self.sequence = sequence
        self.name = name
        self._i = 0

    def reset(self, rng):
        self._i = 0

    def act(self, state, rng):
        a = self.sequence[self._i % len(self.sequence)]
        self._i += 1
        return a


@dataclass
class EvalReport:
    policy: str
    route: str
    episodes: int
    mean_reward: float  # per time step
    collision_count: int
    occluded_frame_fraction: float
    switch_histogram: dict[int, int] = field(default_factory=dict)  # degrees -> count
    step_breakdowns: list[dict] = field(default_factory=list)


def evaluate(
    policy: Policy,
    bundle: EnvBundle,
    episodes: int,
    seed: int,
    route_name: str = "route",
) -> EvalReport:
    """Greedy rollouts scored with the hand-crafted reward, regardless of how
    the policy was trained; deterministic for a fixed seed."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.default_rng(seed)
    rewards = []
    collisions = 0
    occ_frames = 0
    total_frames = 0
    hist = {0: 0, 90: 0, 180: 0}
    breakdowns = []
    for _ in range(episodes):
        policy.reset(rng)
        start = ep.draw_start_progress(bundle, rng)
        init_mode = int(rng.integers(N_ACTIONS))
        state = ep.initial_state(bundle, start, init_mode)
        for step_i in range(bundle.steps_per_episode):
            s = encode_state(state, bundle.height_map)
            a = policy.act(s, rng)
            hist[switch_degrees(state.shot_mode, a)] += 1
            out = ep.simulate_step(bundle, state, a, rng=rng)
            rewards.append(out.reward.r)
            breakdowns.append(
                {
                    "step": step_i,
                    "action": a,
                    "r_avg": out.reward.r_avg,
                    "alpha_c": out.reward.alpha_c,
                    "r_discounted": out.reward.r_discounted,
                    "r": out.reward.r,
                    "collided": out.reward.collided,
                }
            )
            occ_frames += sum(m.occluded for m in out.metrics)
            total_frames += len(out.metrics)
            if out.reward.collided:
                collisions += 1
            state = out.state
            if out.episode_end:
                break
    return EvalReport(
        policy=policy.name,
        route=route_name,
        episodes=episodes,
        mean_reward=float(np.mean(rewards)),
        collision_count=collisions,
        occluded_frame_fraction=occ_frames / max(total_frames, 1),
        switch_histogram=hist,
        step_breakdowns=breakdowns,
    )


def emit_table(reports: list[EvalReport]) -> tuple[str, str]:
    """Policies-by-routes table of mean reward per time step; returns (text, csv)."""
    if not reports:
        raise ValueError("need at least one report")
    policies = list(dict.fromkeys(r.policy for r in reports))
    routes = list(dict.fromkeys(r.route for r in reports))
    cells = {(r.policy, r.route): r.mean_reward for r in reports}

    def fmt(p, rt):
        v = cells.get((p, rt))
        return f"{v:.4f}" if v is not None else ""

    widths = [max(len("policy"), *(len(p) for p in policies))]
    widths += [max(len(rt), 7) for rt in routes]
    lines = []
    header = ["policy"] + routes
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for p in policies:
        row = [p] + [fmt(p, rt) for rt in routes]
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    text = "\n".join(lines)

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for p in policies:
        writer.writerow([p] + [fmt(p, rt) for rt in routes])
    return text, buf.getvalue()


# --- behavioral probes ------------------------------------------------------


@dataclass
class ProbeResult:
    name: str
    passed: bool
    detail: str


def _flat_bundle(**kwargs) -> EnvBundle:
    cells = np.zeros((64, 200))
    track = ActorTrack([(8.0, 32.0), (192.0, 32.0)])
    return EnvBundle(HeightMap(cells), track, **kwargs)


def _walled_bundle(side: str, actor_x: float = 30.0) -> tuple[EnvBundle, int]:
    """Corridor with a tall wall just ahead on one side of the path; returns the
    bundle and the shot mode whose viewpoint that wall occupies. The wall starts
    ahead of the actor so a drone holding that side flies into it, while leaving
    through the back stays clear."""
    cells = np.zeros((64, 200))
    x0 = int(actor_x) + 2
    if side == "left":
        cells[34:41, x0 : x0 + 30] = 12.0  # left of travel (+y)
        blocked = mode_index("left")
    else:
        cells[24:31, x0 : x0 + 30] = 12.0
        blocked = mode_index("right")
    track = ActorTrack([(8.0, 32.0), (192.0, 32.0)])
    return EnvBundle(HeightMap(cells), track), blocked


def behavioral_probes(policy: Policy, seed: int = 0, episodes: int = 10) -> list[ProbeResult]:
    """The four learned-behavior checks on constructed scenes:
    90-degree switches preferred over 180, regular switching in open terrain,
    vacating an occupied side within one step, and zero collisions overall."""
    rng = np.random.default_rng(seed)
    results = []
    collisions = 0

    # probes 1 and 2: open terrain
    flat = _flat_bundle()
    switch_hist = {0: 0, 90: 0, 180: 0}
    longest_hold = 0
    for _ in range(episodes):
        policy.reset(rng)
        start = ep.draw_start_progress(flat, rng)
        state = ep.initial_state(flat, start, int(rng.integers(N_ACTIONS)))
        for _ in range(flat.steps_per_episode):
            s = encode_state(state, flat.height_map)
            a = policy.act(s, rng)
            switch_hist[switch_degrees(state.shot_mode, a)] += 1
            out = ep.simulate_step(flat, state, a, rng=rng)
            collisions += out.reward.collided
            longest_hold = max(longest_hold, out.state.repetition_count)
            state = out.state
            if out.episode_end:
                break
    c_opt = flat.reward_cfg.c_opt
    results.append(
        ProbeResult(
            "prefers_90_degree_switches",
            switch_hist[90] > switch_hist[180],
            f"90deg={switch_hist[90]} 180deg={switch_hist[180]}",
        )
    )
    results.append(
        ProbeResult(
            "switches_regularly_in_open_terrain",
            longest_hold <= c_opt + 1,
            f"longest hold {longest_hold} steps (limit {c_opt + 1})",
        )
    )

    # probe 3: a wall occupies the current viewpoint's side
    vacated = True
    detail = []
    for side in ("left", "right"):
        bundle, blocked = _walled_bundle(side, actor_x=30.0)
        policy.reset(rng)
        state = ep.initial_state(bundle, 30.0 - 8.0, blocked)  # start puts actor at x=30
        s = encode_state(state, bundle.height_map)
        a = policy.act(s, rng)
        if a == blocked:
            vacated = False
        else:
            out = ep.simulate_step(bundle, state, a, rng=rng)
            collisions += out.reward.collided
        detail.append(f"{side}: chose {a} (blocked {blocked})")
    results.append(ProbeResult("vacates_occupied_side", vacated, "; ".join(detail)))

    results.append(
        ProbeResult("zero_collisions", collisions == 0, f"{collisions} collisions")
    )
    return results
