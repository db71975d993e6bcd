"""DQN agent: state encoding, three-lane Q-network, replay, and the training loop."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import episode as ep
from . import nn
from .camera import N_ACTIONS
from .episode import EnvBundle
from .world import HeightMap, WorldState, crop_local_map

REPETITION_CAP = 5  # an episode has 5 time steps

DEFAULT_LANE_WIDTHS = {
    "map": [256, 64],
    "shot": [16],
    "count": [8],
    "fusion": [64],
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AgentState:
    """The Q-network input triple, already normalized."""

    local_map: np.ndarray  # (576,) in [0, 1]
    shot_onehot: np.ndarray  # (4,)
    repetition_norm: float  # in [0, 1]

    def hash(self) -> str:
        h = hashlib.md5()
        h.update(self.local_map.tobytes())
        h.update(self.shot_onehot.tobytes())
        h.update(np.float64(self.repetition_norm).tobytes())
        return h.hexdigest()


def encode_state(state: WorldState, height_map: HeightMap, c_cap: int = REPETITION_CAP) -> AgentState:
    crop = crop_local_map(height_map, state.actor_position, state.actor_heading)
    onehot = np.zeros(N_ACTIONS)
    onehot[state.shot_mode] = 1.0
    return AgentState(
        local_map=crop.astype(np.float64).ravel() / 255.0,
        shot_onehot=onehot,
        repetition_norm=min(state.repetition_count, c_cap) / c_cap,
    )


@dataclass(frozen=True)
class Transition:
    s: AgentState
    a: int
    s_next: AgentState
    r: float
    done: bool  # collision: terminal, no bootstrap


class ReplayBuffer:
    """Ring buffer of transitions, oldest-first eviction."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0

    def push(self, t: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(t)
        else:
            self._items[self._next] = t
        self._next = (self._next + 1) % self.capacity

    def __len__(self) -> int:
        return len(self._items)

    def items(self) -> list[Transition]:
        return list(self._items)


class QNetwork:
    """Three input lanes (local map, shot one-hot, repetition count) fused into
    a single stack that outputs one Q-value per shot mode."""

    def __init__(self, rng: np.random.Generator, lane_widths: dict | None = None):
        widths = lane_widths or DEFAULT_LANE_WIDTHS
        self.lane_widths = widths
        self.map_lane = nn.Mlp(_chain_specs(576, widths["map"], "relu"), rng)
        self.shot_lane = nn.Mlp(_chain_specs(N_ACTIONS, widths["shot"], "relu"), rng)
        self.count_lane = nn.Mlp(_chain_specs(1, widths["count"], "relu"), rng)
        fused = widths["map"][-1] + widths["shot"][-1] + widths["count"][-1]
        fusion_specs = _chain_specs(fused, widths["fusion"], "relu")
        fusion_specs.append(nn.LayerSpec(widths["fusion"][-1], N_ACTIONS, "linear"))
        self.fusion = nn.Mlp(fusion_specs, rng)

    @property
    def lanes(self):
        return (self.map_lane, self.shot_lane, self.count_lane, self.fusion)

    def parameters(self) -> list[np.ndarray]:
        out = []
        for lane in self.lanes:
            out.extend(lane.parameters())
        return out

    def forward(self, map_x, shot_x, count_x):
        m, mc = self.map_lane.forward(map_x)
        s, sc = self.shot_lane.forward(shot_x)
        c, cc = self.count_lane.forward(count_x)
        fused = np.concatenate([m, s, c], axis=-1)
        q, fc = self.fusion.forward(fused)
        return q, (mc, sc, cc, fc)

    def backward(self, cache, grad_q):
        mc, sc, cc, fc = cache
        f_grads, g_fused = self.fusion.backward(fc, grad_q)
        n_m = self.map_lane.output_size
        n_s = self.shot_lane.output_size
        gm = g_fused[..., :n_m]
        gs = g_fused[..., n_m : n_m + n_s]
        gc = g_fused[..., n_m + n_s :]
        m_grads, _ = self.map_lane.backward(mc, gm)
        s_grads, _ = self.shot_lane.backward(sc, gs)
        c_grads, _ = self.count_lane.backward(cc, gc)
        return m_grads + s_grads + c_grads + f_grads

    def to_dict(self) -> dict:
        return {
            "lane_widths": self.lane_widths,
            "lanes": {
                "map": nn.mlp_to_dict(self.map_lane),
                "shot": nn.mlp_to_dict(self.shot_lane),
                "count": nn.mlp_to_dict(self.count_lane),
                "fusion": nn.mlp_to_dict(self.fusion),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QNetwork":
        net = cls(np.random.default_rng(0), d["lane_widths"])
        net.map_lane = nn.mlp_from_dict(d["lanes"]["map"])
        net.shot_lane = nn.mlp_from_dict(d["lanes"]["shot"])
        net.count_lane = nn.mlp_from_dict(d["lanes"]["count"])
        net.fusion = nn.mlp_from_dict(d["lanes"]["fusion"])
        return net


def _chain_specs(input_size, widths, activation):
    specs = []
    cur = input_size
    for w in widths:
        specs.append(nn.LayerSpec(cur, w, activation))
        cur = w
    return specs


def _batch_inputs(states: list[AgentState]):
    return (
        np.stack([s.local_map for s in states]),
        np.stack([s.shot_onehot for s in states]),
        np.array([[s.repetition_norm] for s in states]),
    )


def q_values(net: QNetwork, s: AgentState) -> np.ndarray:
    q, _ = net.forward(s.local_map, s.shot_onehot, np.array([s.repetition_norm]))
    return q


def select_action(net: QNetwork, s: AgentState, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy; greedy ties break toward the lowest action index."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    if epsilon > 0 and rng.random() < epsilon:
        return int(rng.integers(N_ACTIONS))
    return int(np.argmax(q_values(net, s)))


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = 0.5
    epsilon_start: float = 1.0
    epsilon_end: float = 0.1
    epsilon_anneal_fraction: float = 0.6  # fraction of episodes spent annealing
    minibatch_size: int = 32
    update_period: int = 2  # episodes between replay sweeps
    episodes: int = 300
    steps_per_episode: int = ep.STEPS_PER_EPISODE
    replay_capacity: int = 10_000
    learning_rate: float = 3e-3
    lane_widths: dict = field(default_factory=lambda: dict(DEFAULT_LANE_WIDTHS))
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must be in (0, 1)")
        if self.minibatch_size < 1:
            raise ConfigError("minibatch size must be >= 1")

    def epsilon_at(self, episode: int) -> float:
        anneal = max(int(self.episodes * self.epsilon_anneal_fraction), 1)
        if episode >= anneal:
            return self.epsilon_end
        f = episode / anneal
        return self.epsilon_start + f * (self.epsilon_end - self.epsilon_start)


def train_update(
    net: QNetwork,
    buffer: ReplayBuffer,
    cfg: TrainConfig,
    adam: nn.Adam,
    rng: np.random.Generator,
) -> float:
    """One replay sweep: shuffle the buffer, split into minibatches, and for each
    apply the bootstrapped target y = r + gamma * max_a' Q(s', a') with Huber
    loss on the taken action's Q-output. Returns the mean minibatch loss."""
    items = buffer.items()
    if not items:
        raise ValueError("replay buffer is empty")
    order = rng.permutation(len(items))
    losses = []
    for lo in range(0, len(items), cfg.minibatch_size):
        batch = [items[i] for i in order[lo : lo + cfg.minibatch_size]]
        s_in = _batch_inputs([t.s for t in batch])
        sn_in = _batch_inputs([t.s_next for t in batch])
        q_next, _ = net.forward(*sn_in)
        not_done = np.array([0.0 if t.done else 1.0 for t in batch])
        y = np.array([t.r for t in batch]) + cfg.gamma * q_next.max(axis=1) * not_done
        q, cache = net.forward(*s_in)
        a_idx = np.array([t.a for t in batch])
        rows = np.arange(len(batch))
        loss, grad = nn.huber_loss(q[rows, a_idx], y)
        grad_q = np.zeros_like(q)
        grad_q[rows, a_idx] = grad / len(batch)
        grads = net.backward(cache, grad_q)
        adam.step(grads)
        losses.append(float(loss.mean()))
    return float(np.mean(losses))


@dataclass
class TrainResult:
    net: QNetwork
    adam: nn.Adam
    curve: list[float]  # mean reward per time step, one entry per episode
    losses: list[tuple[int, float]]  # (episode, mean minibatch loss)


def run_training(
    bundle: EnvBundle,
    cfg: TrainConfig,
    reward_source: str = "handcrafted",
    rating_fn: Callable[[dict], float] | None = None,
    log_path: str | Path | None = None,
    step_callback: Callable[[dict], None] | None = None,
) -> TrainResult:
    """Episode loop with experience replay (see `train_update` for the sweep).

    `reward_source` is "handcrafted" (Eqs.-style pipeline) or "human", in which
    case `rating_fn` receives a per-step summary and must return the mapped
    reward; it may block on a live rater. A collision terminates the episode.
    """
    if reward_source not in ("handcrafted", "human"):
        raise ConfigError(f"unknown reward source {reward_source!r}")
    if reward_source == "human" and rating_fn is None:
        raise ConfigError("human reward source needs a rating channel")

    rng = np.random.default_rng(cfg.seed)
    net = QNetwork(rng, cfg.lane_widths)
    adam = nn.Adam(net.parameters(), lr=cfg.learning_rate)
    buffer = ReplayBuffer(cfg.replay_capacity)
    curve: list[float] = []
    losses: list[tuple[int, float]] = []
    log_f = open(log_path, "w") if log_path is not None else None
    global_step = 0
    try:
        for episode_i in range(cfg.episodes):
            epsilon = cfg.epsilon_at(episode_i)
            start = ep.draw_start_progress(bundle, rng)
            init_mode = int(rng.integers(N_ACTIONS))
            wstate = ep.initial_state(bundle, start, init_mode)
            rewards = []
            for step_i in range(cfg.steps_per_episode):
                s = encode_state(wstate, bundle.height_map)
                a = select_action(net, s, epsilon, rng)
                out = ep.simulate_step(bundle, wstate, a, rng=rng)
                breakdown = out.reward
                if reward_source == "human":
                    global_step += 1
                    r = float(rating_fn(_step_summary(
                        global_step, episode_i, step_i, wstate, out, bundle)))
                else:
                    global_step += 1
                    r = breakdown.r
                s_next = encode_state(out.state, bundle.height_map)
                done = breakdown.collided
                buffer.push(Transition(s=s, a=a, s_next=s_next, r=r, done=done))
                rewards.append(r)
                record = {
                    "step_id": global_step,
                    "episode": episode_i,
                    "step": step_i,
                    "state_hash": s.hash(),
                    "action": a,
                    "reward": r,
                    "reward_breakdown": {
                        "r_avg": breakdown.r_avg,
                        "alpha_c": breakdown.alpha_c,
                        "r_discounted": breakdown.r_discounted,
                        "r": breakdown.r,
                        "collided": breakdown.collided,
                    },
                    "epsilon": epsilon,
                }
                if log_f:
                    log_f.write(json.dumps(record, sort_keys=True) + "\n")
                if step_callback:
                    step_callback(record)
                wstate = out.state
                if out.episode_end:
                    break
            curve.append(float(np.mean(rewards)) if rewards else 0.0)
            if cfg.update_period > 0 and (episode_i + 1) % cfg.update_period == 0 and len(buffer):
                loss = train_update(net, buffer, cfg, adam, rng)
                losses.append((episode_i, loss))
                if log_f:
                    log_f.write(json.dumps(
                        {"episode": episode_i, "update_loss": loss}, sort_keys=True) + "\n")
    finally:
        if log_f:
            log_f.close()
    return TrainResult(net=net, adam=adam, curve=curve, losses=losses)


def _step_summary(global_step, episode_i, step_i, wstate, out, bundle):
    ms = out.metrics
    return {
        "step_id": global_step,
        "episode": episode_i,
        "step": step_i,
        "shot_mode": out.state.shot_mode,
        "mean_presence_ratio": float(np.mean([m.presence_ratio for m in ms])),
        "mean_tilt": float(np.mean([m.tilt_angle for m in ms])),
        "occluded_fraction": float(np.mean([m.occluded for m in ms])),
        "collided": out.reward.collided,
        "actor_position": list(out.state.actor_position),
        "actor_heading": out.state.actor_heading,
        "drone_position": list(out.state.drone_position),
    }


def grouped_curve(curve: list[float], group: int = 30) -> list[float]:
    """Mean reward per `group` episodes, the reward-curve display convention."""
    return [float(np.mean(curve[i : i + group])) for i in range(0, len(curve), group)]


# --- checkpointing ----------------------------------------------------------


def save_checkpoint(path: str | Path, net: QNetwork, adam: nn.Adam | None,
                    rng: np.random.Generator | None, cfg: TrainConfig | None) -> None:
    payload = {"qnet": net.to_dict()}
    if adam is not None:
        payload["adam"] = nn.adam_to_dict(adam)
    if rng is not None:
        payload["rng_state"] = rng.bit_generator.state
    if cfg is not None:
        d = dict(cfg.__dict__)
        payload["train_config"] = d
    Path(path).write_text(nn.dumps_checkpoint(payload))


def load_checkpoint(path: str | Path) -> dict:
    d = nn.loads_checkpoint(Path(path).read_text())
    d["qnet"] = QNetwork.from_dict(d["qnet"])
    return d
