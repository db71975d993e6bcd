"""Command-line entry point: training, evaluation, world generation, probes,
and the live rating service, all writing into a run directory."""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import sys
import threading
from pathlib import Path

import click

from . import agent as agent_mod
from .agent import TrainConfig, load_checkpoint, run_training, save_checkpoint
from .episode import EnvBundle
from .harness import (
    BackOnlyPolicy,
    RandomPolicy,
    TrainedPolicy,
    behavioral_probes,
    emit_table,
    evaluate,
)
from .reward import RewardConfig
from .world import (
    generate_bigmap_section,
    generate_block_world,
    load_world,
    save_world,
)

BASELINES = {"random": RandomPolicy, "back": BackOnlyPolicy}


def resolve_world(world: str, seed: int, route: str = "default") -> EnvBundle:
    """Build an environment from a world name or a saved .pgm path."""
    if world == "blockworld":
        hmap, track = generate_block_world(seed=seed)
    elif world.startswith("bigmap:"):
        hmap, track = generate_bigmap_section(world.split(":", 1)[1], seed=seed)
    elif Path(world).exists():
        hmap, track = load_world(world)
    else:
        raise click.BadParameter(
            f"unknown world {world!r}: expected 'blockworld', 'bigmap:<section>' "
            "or a path to a saved .pgm map"
        )
    if route == "roaming":
        track = dataclasses.replace(track, mode="roaming")
    elif route == "reverse":
        track = dataclasses.replace(track, waypoints=list(reversed(track.waypoints)))
    elif route != "default":
        raise click.BadParameter(f"unknown route {route!r}")
    return EnvBundle(hmap, track, reward_cfg=RewardConfig())


def _log_dir(out: Path) -> Path:
    override = os.environ.get("CINE_RL_LOG_DIR")
    d = Path(override) if override else out
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_curve_csv(path: Path, curve: list[float], group: int = 30) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["episode", "mean_reward"])
        for i, r in enumerate(curve):
            w.writerow([i, repr(float(r))])


def write_config_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


@click.group()
def main():
    """Shot-mode selection training and evaluation for the drone simulator."""


@main.command()
@click.option("--world", default="blockworld", show_default=True)
@click.option("--route", default="default", show_default=True,
              type=click.Choice(["default", "reverse", "roaming"]))
@click.option("--episodes", default=300, show_default=True, type=int)
@click.option("--reward", "reward_source", default="handcrafted", show_default=True,
              type=click.Choice(["handcrafted", "human"]))
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--world-seed", default=100, show_default=True, type=int,
              help="Seed for procedural world generation.")
@click.option("--out", "out_dir", default="runs/train", show_default=True,
              type=click.Path(path_type=Path))
@click.option("--port", default=8000, show_default=True, type=int,
              help="Rating service port (only with --reward human).")
def train(world, route, episodes, reward_source, seed, world_seed, out_dir, port):
    """Train the shot-selection policy and write curve, config, and checkpoint."""
    bundle = resolve_world(world, world_seed, route)
    cfg = TrainConfig(episodes=episodes, seed=seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_dir = _log_dir(out_dir)
    log_path = log_dir / "episodes.jsonl"

    rating_fn = None
    if reward_source == "human":
        rating_fn = _start_rating_service(bundle, port)
        click.echo(f"rating service listening on http://127.0.0.1:{port}")

    result = run_training(bundle, cfg, reward_source=reward_source,
                          rating_fn=rating_fn, log_path=log_path)

    write_config_json(out_dir / "config.json", {
        "world": world, "route": route, "world_seed": world_seed,
        "reward_source": reward_source, "train_config": dict(cfg.__dict__),
    })
    write_curve_csv(out_dir / "curve.csv", result.curve)
    save_checkpoint(out_dir / "checkpoint.json", result.net, result.adam, None, cfg)
    grouped = agent_mod.grouped_curve(result.curve)
    click.echo(f"trained {len(result.curve)} episodes; "
               f"grouped mean reward: {['%.3f' % g for g in grouped]}")
    click.echo(f"outputs in {out_dir}")


@main.command("eval")
@click.option("--checkpoint", "checkpoint_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--world", "worlds", multiple=True, default=("blockworld",),
              show_default=True, help="Repeatable; each becomes a table column.")
@click.option("--route", default="default", show_default=True,
              type=click.Choice(["default", "reverse", "roaming"]))
@click.option("--episodes", default=20, show_default=True, type=int)
@click.option("--baselines", default="random,back", show_default=True)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--world-seed", "world_seeds", multiple=True, type=int,
              help="Seed per --world (defaults to 100, 200, ...).")
@click.option("--out", "out_dir", default="runs/eval", show_default=True,
              type=click.Path(path_type=Path))
def eval_cmd(checkpoint_path, worlds, route, episodes, baselines, seed,
             world_seeds, out_dir):
    """Evaluate a checkpoint against baseline policies and emit the table."""
    ckpt = load_checkpoint(checkpoint_path)
    policies = [TrainedPolicy(ckpt["qnet"])]
    for name in filter(None, baselines.split(",")):
        if name not in BASELINES:
            raise click.BadParameter(f"unknown baseline {name!r}")
        policies.append(BASELINES[name]())

    seeds = list(world_seeds) or [100 * (i + 1) for i in range(len(worlds))]
    if len(seeds) != len(worlds):
        raise click.BadParameter("need one --world-seed per --world")

    reports = []
    for world, wseed in zip(worlds, seeds):
        bundle = resolve_world(world, wseed, route)
        label = f"{world}@{wseed}"
        for pol in policies:
            reports.append(evaluate(pol, bundle, episodes, seed=seed,
                                    route_name=label))
    text, csv_text = emit_table(reports)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "table.csv").write_text(csv_text)
    click.echo(text)
    click.echo(f"table written to {out_dir / 'table.csv'}")


@main.command("gen-world")
@click.option("--kind", required=True,
              help="'blockworld' or 'bigmap:<blocks|pillars|mountains>'.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def gen_world(kind, seed, out_path):
    """Generate a procedural world and save it as PGM + JSON sidecar."""
    bundle = resolve_world(kind, seed)
    save_world(bundle.height_map, bundle.track, out_path)
    click.echo(f"wrote {out_path} "
               f"({bundle.height_map.width}x{bundle.height_map.height} cells)")


@main.command()
@click.option("--checkpoint", "checkpoint_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--episodes", default=30, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
def probe(checkpoint_path, episodes, seed):
    """Run the behavioral probe suite against a checkpoint."""
    ckpt = load_checkpoint(checkpoint_path)
    results = behavioral_probes(TrainedPolicy(ckpt["qnet"]), seed=seed,
                                episodes=episodes)
    ok = True
    for r in results:
        click.echo(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        ok = ok and r.passed
    sys.exit(0 if ok else 1)


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--world", default="blockworld", show_default=True)
@click.option("--route", default="default", show_default=True,
              type=click.Choice(["default", "reverse", "roaming"]))
@click.option("--episodes", default=10, show_default=True, type=int)
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--world-seed", default=100, show_default=True, type=int)
@click.option("--rating-timeout", default=None, type=float,
              help="Seconds before logging a pause warning while unrated.")
@click.option("--out", "out_dir", default="runs/hitl", show_default=True,
              type=click.Path(path_type=Path))
def serve(port, world, route, episodes, seed, world_seed, rating_timeout, out_dir):
    """Run human-in-the-loop training: serve the rating UI and block per step."""
    bundle = resolve_world(world, world_seed, route)
    rating_fn = _start_rating_service(bundle, port, timeout=rating_timeout)
    click.echo(f"rating service on http://127.0.0.1:{port} — open it to rate steps")

    cfg = TrainConfig(episodes=episodes, seed=seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = _log_dir(out_dir) / "episodes.jsonl"
    result = run_training(bundle, cfg, reward_source="human",
                          rating_fn=rating_fn, log_path=log_path)
    write_curve_csv(out_dir / "curve.csv", result.curve)
    save_checkpoint(out_dir / "checkpoint.json", result.net, result.adam, None, cfg)
    click.echo(f"finished {len(result.curve)} rated episodes; outputs in {out_dir}")


def _start_rating_service(bundle: EnvBundle, port: int, timeout: float | None = None):
    """Launch the HTTP rating service in a daemon thread; returns the blocking
    per-step rating function for the training loop."""
    import uvicorn

    from .hitl import HitlSession, RatingGate, build_app

    gate = RatingGate(timeout_seconds=timeout)
    session = HitlSession(bundle, gate)
    static = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = build_app(gate, session.progress,
                    static_dir=static if static.is_dir() else None)
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    server = uvicorn.Server(config)
    threading.Thread(target=server.run, daemon=True).start()
    return session.rating_fn


if __name__ == "__main__":
    main()
