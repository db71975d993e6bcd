import math

import numpy as np
import pytest

from cine_rl import world
from cine_rl.world import (
    ActorTrack,
    BlockWorldConfig,
    HeightMap,
    RoamingError,
    WorldConfigError,
    WorldState,
    advance_actor,
    crop_local_map,
    generate_bigmap_section,
    generate_block_world,
)


def flat_map(n=64):
    return HeightMap(np.zeros((n, n)))


def make_state(pos, heading=0.0):
    return WorldState(
        actor_position=pos,
        actor_heading=heading,
        drone_position=(0.0, 0.0, 3.8),
        shot_mode=3,
        repetition_count=1,
    )


class TestHeightMap:
    def test_rejects_small_maps(self):
        with pytest.raises(WorldConfigError):
            HeightMap(np.zeros((10, 10)))

    def test_rejects_negative_heights(self):
        cells = np.zeros((64, 64))
        cells[3, 3] = -1.0
        with pytest.raises(WorldConfigError):
            HeightMap(cells)

    def test_height_outside_reads_zero(self):
        m = flat_map()
        assert m.height_at(-5.0, 10.0) == 0.0


class TestGenerators:
    def test_block_world_path_cells_free(self):
        hmap, track = generate_block_world(seed=1)
        # every cell along the straight route plus one cell of clearance is free
        path_row = int(track.waypoints[0][1])
        assert np.all(hmap.cells[path_row - 1 : path_row + 2, :] == 0.0)

    def test_block_world_deterministic(self):
        a, _ = generate_block_world(seed=1)
        b, _ = generate_block_world(seed=1)
        assert np.array_equal(a.cells, b.cells)

    def test_block_world_seed_changes_grid(self):
        a, _ = generate_block_world(seed=1)
        b, _ = generate_block_world(seed=2)
        assert not np.array_equal(a.cells, b.cells)

    def test_block_world_alternates_sides(self):
        hmap, track = generate_block_world(seed=3)
        path_row = int(track.waypoints[0][1])
        assert np.any(hmap.cells[path_row + 2 :, :] > 0)
        assert np.any(hmap.cells[: path_row - 1, :] > 0)

    def test_inverted_range_rejected(self):
        cfg = BlockWorldConfig(block_height_range=(10.0, 5.0))
        with pytest.raises(WorldConfigError):
            generate_block_world(1, cfg)

    def test_pillars_have_small_footprints(self):
        hmap, _ = generate_bigmap_section("pillars", seed=7)
        # every connected obstacle footprint fits in a 2x2 box
        occ = hmap.cells > 0
        ys, xs = np.where(occ)
        for y, x in zip(ys, xs):
            patch = occ[max(y - 2, 0) : y + 3, max(x - 2, 0) : x + 3]
            assert patch.sum() <= 4

    def test_mountain_heights_within_range(self):
        cfg = world.BigmapConfig()
        hmap, _ = generate_bigmap_section("mountains", seed=5, config=cfg)
        peaks = hmap.cells.max()
        assert peaks <= cfg.mountain_height_range[1] + 1e-9
        assert hmap.cells.min() >= 0.0

    def test_bigmap_blocks_deterministic(self):
        a, _ = generate_bigmap_section("blocks", seed=11)
        b, _ = generate_bigmap_section("blocks", seed=11)
        assert np.array_equal(a.cells, b.cells)


class TestAdvanceActor:
    def test_straight_segment_kinematics(self):
        track = ActorTrack([(0.0, 32.0), (100.0, 32.0)], speed=1.5)
        state = make_state((0.0, 32.0))
        new, done = advance_actor(track, state, dt=6.0)
        assert not done
        assert new.actor_position == pytest.approx((9.0, 32.0))
        assert new.actor_heading == pytest.approx(0.0)

    def test_final_waypoint_raises_done_flag(self):
        track = ActorTrack([(0.0, 32.0), (10.0, 32.0)], speed=1.5)
        state = make_state((10.0, 32.0))
        state.route_progress = 10.0
        new, done = advance_actor(track, state, dt=1.0)
        assert done
        assert new.actor_position == state.actor_position

    def test_arc_length_conserved_over_corners(self):
        track = ActorTrack([(0.0, 0.0), (10.0, 0.0), (10.0, 10.0)], speed=2.0)
        state = make_state((0.0, 0.0))
        total = 0.0
        prev = state.actor_position
        for _ in range(9):
            state, done = advance_actor(track, state, dt=1.0)
            total += math.dist(prev, state.actor_position)
            prev = state.actor_position
        # straight-line hops cut the corner by at most one cell
        assert total == pytest.approx(18.0, abs=1.0)

    def test_roaming_moves_on_free_ground(self):
        cells = np.zeros((64, 64))
        cells[0:20, 0:20] = 5.0
        cells[30, 30] = 0.0
        hmap = HeightMap(cells)
        track = ActorTrack([], mode="roaming")
        rng = np.random.default_rng(0)
        state = make_state((40.5, 40.5))
        for _ in range(20):
            state, _ = advance_actor(track, state, dt=2.0, rng=rng, height_map=hmap)
            assert hmap.height_at(*state.actor_position) == 0.0

    def test_roaming_all_blocked_errors(self):
        cells = np.full((64, 64), 5.0)
        cells[10, 10] = 0.0  # actor's own isolated cell
        hmap = HeightMap(cells)
        track = ActorTrack([], mode="roaming")
        state = make_state((10.5, 10.5))
        with pytest.raises(RoamingError):
            advance_actor(track, state, dt=10.0, rng=np.random.default_rng(0), height_map=hmap)

    def test_rejects_nonpositive_dt(self):
        track = ActorTrack([(0.0, 0.0), (10.0, 0.0)])
        with pytest.raises(ValueError):
            advance_actor(track, make_state((0.0, 0.0)), dt=0.0)


class TestCropLocalMap:
    def test_flat_world_is_all_zero(self):
        crop = crop_local_map(flat_map(), (32.5, 32.5), 0.0)
        assert crop.shape == (24, 24)
        assert crop.dtype == np.uint8
        assert np.all(crop == 0)

    def test_obstacle_north_heading_north_is_up(self):
        cells = np.zeros((64, 64))
        cells[40, 32] = 20.0  # 8 m north of the actor
        m = HeightMap(cells)
        crop = crop_local_map(m, (32.5, 32.5), math.pi / 2)  # heading +y (north)
        assert crop[:12, :].max() == 255
        assert crop[12:, :].max() == 0

    def test_half_height_quantizes_round_half_up(self):
        cells = np.zeros((64, 64))
        cells[40, 32] = 10.0  # half of max 20 -> 255*0.5 = 127.5 -> 128
        m = HeightMap(cells)
        crop = crop_local_map(m, (32.5, 32.5), math.pi / 2)
        assert crop.max() == 128

    def test_outside_map_reads_zero(self):
        cells = np.full((64, 64), 3.0)
        m = HeightMap(cells)
        crop = crop_local_map(m, (1.5, 1.5), 0.0)
        assert crop.min() == 0  # off-map corner cells
        assert crop.max() == round(255 * 3.0 / 20.0)

    def test_rotational_consistency_90_degrees(self):
        rng = np.random.default_rng(4)
        n = 64
        cells = rng.uniform(0, 20, size=(n, n))
        m = HeightMap(cells)
        # rotate the world 90 degrees CCW: (x, y) -> (L - y, x)
        rot = np.zeros_like(cells)
        for iy in range(n):
            for ix in range(n):
                rot[ix, n - 1 - iy] = cells[iy, ix]
        m_rot = HeightMap(rot)
        pos = (30.5, 28.5)
        heading = 0.7
        pos_rot = (n - pos[1], pos[0])
        crop_a = crop_local_map(m, pos, heading)
        crop_b = crop_local_map(m_rot, pos_rot, heading + math.pi / 2)
        assert np.array_equal(crop_a, crop_b)

    def test_center_out_of_bounds_rejected(self):
        with pytest.raises(ValueError):
            crop_local_map(flat_map(), (-1.0, 5.0), 0.0)


class TestSerialization:
    def test_pgm_round_trip(self, tmp_path):
        hmap, track = generate_block_world(seed=9)
        path = tmp_path / "world.pgm"
        world.save_world(hmap, track, path)
        loaded_map, loaded_track = world.load_world(path)
        assert loaded_map.cells.shape == hmap.cells.shape
        # 8-bit quantization: within half a height step
        step = hmap.max_obstacle_height / 255
        assert np.max(np.abs(loaded_map.cells - hmap.cells)) <= step / 2 + 1e-9
        assert loaded_track.waypoints == track.waypoints
        assert loaded_track.speed == track.speed
