import json

import pytest
from click.testing import CliRunner

from cine_rl.cli import main, resolve_world


class TestResolveWorld:
    def test_blockworld_by_name(self):
        bundle = resolve_world("blockworld", seed=1)
        assert bundle.height_map.width == 160

    def test_bigmap_section(self):
        bundle = resolve_world("bigmap:pillars", seed=1)
        assert bundle.height_map.cells.max() > 0

    def test_saved_pgm_round_trip(self, tmp_path):
        from cine_rl.world import save_world

        src = resolve_world("blockworld", seed=3)
        path = tmp_path / "w.pgm"
        save_world(src.height_map, src.track, path)
        loaded = resolve_world(str(path), seed=0)
        assert loaded.height_map.cells.shape == src.height_map.cells.shape

    def test_reverse_route_flips_waypoints(self):
        fwd = resolve_world("blockworld", seed=1)
        rev = resolve_world("blockworld", seed=1, route="reverse")
        assert rev.track.waypoints == list(reversed(fwd.track.waypoints))

    def test_unknown_world_rejected(self):
        import click

        with pytest.raises(click.BadParameter):
            resolve_world("no-such-world", seed=0)


class TestCommands:
    def run(self, *args, env=None):
        return CliRunner().invoke(main, list(args), env=env, catch_exceptions=False)

    def test_gen_world_writes_pgm(self, tmp_path):
        out = tmp_path / "world.pgm"
        res = self.run("gen-world", "--kind", "blockworld", "--seed", "7",
                       "--out", str(out))
        assert res.exit_code == 0
        assert out.read_bytes().startswith(b"P5")
        assert out.with_suffix(".json").exists()

    def test_train_writes_run_dir(self, tmp_path):
        out = tmp_path / "run"
        res = self.run("train", "--episodes", "2", "--seed", "0",
                       "--out", str(out))
        assert res.exit_code == 0
        assert (out / "config.json").exists()
        assert (out / "curve.csv").exists()
        assert (out / "checkpoint.json").exists()
        assert (out / "episodes.jsonl").exists()
        cfg = json.loads((out / "config.json").read_text())
        assert cfg["train_config"]["episodes"] == 2
        lines = (out / "curve.csv").read_text().splitlines()
        assert lines[0] == "episode,mean_reward"
        assert len(lines) == 3

    def test_train_respects_log_dir_env(self, tmp_path):
        out = tmp_path / "run"
        logs = tmp_path / "logs"
        res = self.run("train", "--episodes", "1", "--seed", "0",
                       "--out", str(out), env={"CINE_RL_LOG_DIR": str(logs)})
        assert res.exit_code == 0
        assert (logs / "episodes.jsonl").exists()
        assert not (out / "episodes.jsonl").exists()

    def test_train_determinism_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            res = self.run("train", "--episodes", "2", "--seed", "5",
                           "--out", str(out))
            assert res.exit_code == 0
        assert (a / "curve.csv").read_bytes() == (b / "curve.csv").read_bytes()
        assert (a / "checkpoint.json").read_bytes() == (b / "checkpoint.json").read_bytes()

    def test_eval_emits_table(self, tmp_path):
        out = tmp_path / "run"
        self.run("train", "--episodes", "1", "--seed", "0", "--out", str(out))
        eval_out = tmp_path / "eval"
        res = self.run("eval", "--checkpoint", str(out / "checkpoint.json"),
                       "--world", "blockworld", "--episodes", "2",
                       "--out", str(eval_out))
        assert res.exit_code == 0
        table = (eval_out / "table.csv").read_text().splitlines()
        assert table[0].startswith("policy,")
        policies = {line.split(",")[0] for line in table[1:]}
        assert policies == {"trained", "random", "back_only"}

    def test_eval_unknown_baseline_rejected(self, tmp_path):
        out = tmp_path / "run"
        self.run("train", "--episodes", "1", "--seed", "0", "--out", str(out))
        res = CliRunner().invoke(main, [
            "eval", "--checkpoint", str(out / "checkpoint.json"),
            "--baselines", "oracle"])
        assert res.exit_code != 0

    def test_probe_reports_four_lines(self, tmp_path):
        out = tmp_path / "run"
        self.run("train", "--episodes", "1", "--seed", "0", "--out", str(out))
        res = CliRunner().invoke(main, [
            "probe", "--checkpoint", str(out / "checkpoint.json"),
            "--episodes", "2"])
        lines = [l for l in res.output.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert len(lines) == 4
