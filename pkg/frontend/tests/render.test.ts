import { describe, expect, it } from "vitest";

import {
  GRID,
  metricReadouts,
  occlusionBadgeVisible,
  renderScene,
  worldToView,
} from "../src/render.js";
import { FakeCtx, snapshot } from "./helpers.js";

describe("worldToView", () => {
  it("maps the actor to the view center", () => {
    const s = snapshot();
    expect(worldToView(s, 10, 32, 16)).toEqual([192, 192]);
  });

  it("a point ahead of the actor appears above center", () => {
    const s = snapshot({ actor_heading: 0 });
    const [, py] = worldToView(s, 15, 32, 16);
    expect(py).toBeLessThan(192);
  });

  it("rotates with the actor heading", () => {
    const s = snapshot({ actor_heading: Math.PI / 2 });
    // heading +y: a point at +y is ahead, so above center
    const [px, py] = worldToView(s, 10, 37, 16);
    expect(py).toBeCloseTo(192 - 5 * 16);
    expect(px).toBeCloseTo(192);
  });
});

describe("renderScene", () => {
  it("draws a uniform background plus markers on an all-zero map", () => {
    const ctx = new FakeCtx();
    renderScene(ctx, snapshot(), 16);
    const tiles = ctx.calls.filter((c) => c.op === "fillRect");
    expect(tiles).toHaveLength(GRID * GRID);
    expect(new Set(tiles.map((t) => t.fillStyle)).size).toBe(1);
    // actor triangle and drone dot were filled after the tiles
    const fills = ctx.calls.filter((c) => c.op === "fill");
    expect(fills.length).toBeGreaterThanOrEqual(2);
  });

  it("shades occupied cells darker than free cells", () => {
    const map = Array.from({ length: 24 }, () => Array(24).fill(0));
    map[3][5] = 255;
    const ctx = new FakeCtx();
    renderScene(ctx, snapshot({ local_map: map }), 16);
    const tiles = ctx.calls.filter((c) => c.op === "fillRect");
    const styles = new Set(tiles.map((t) => t.fillStyle));
    expect(styles.size).toBe(2);
    const tall = tiles[3 * 24 + 5];
    expect(tall.fillStyle).toBe("rgb(55,55,55)");
  });

  it("draws the drone marker at its world offset from the actor", () => {
    const ctx = new FakeCtx();
    // drone 5 m to the actor's left (heading 0 -> +y is left -> screen left)
    renderScene(ctx, snapshot({ drone_position: [10, 37, 3.8] }), 16);
    const arcs = ctx.calls.filter((c) => c.op === "arc");
    expect(arcs).toHaveLength(1);
    const [ax, ay] = arcs[0].args as number[];
    expect(ax).toBeCloseTo(192 - 5 * 16);
    expect(ay).toBeCloseTo(192);
  });
});

describe("badges and readouts", () => {
  it("occlusion badge hidden at zero occlusion", () => {
    expect(occlusionBadgeVisible(snapshot({ occluded_fraction: 0 }))).toBe(false);
  });

  it("occlusion badge visible when any frame was occluded", () => {
    expect(occlusionBadgeVisible(snapshot({ occluded_fraction: 0.1 }))).toBe(true);
  });

  it("readouts echo the snapshot values", () => {
    const m = metricReadouts(
      snapshot({ step_id: 42, shot_mode: 3, mean_presence_ratio: 0.0117 })
    );
    expect(m.stepId).toBe("42");
    expect(m.shotMode).toBe("back");
    expect(m.meanPr).toBe("0.0117");
  });
});
