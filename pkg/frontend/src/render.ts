/** Canvas rendering of the top-down scene. Drawing goes through a minimal
 * 2D-context interface so tests can record the draw calls. */

import { SceneSnapshot } from "./types.js";

export interface Ctx2dLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
}

export const GRID = 24;

/** Map world coordinates to pixels in the actor-centered, heading-up view. */
export function worldToView(
  snapshot: SceneSnapshot,
  wx: number,
  wy: number,
  tile: number
): [number, number] {
  const [ax, ay] = snapshot.actor_position;
  const h = snapshot.actor_heading;
  const dx = wx - ax;
  const dy = wy - ay;
  const forward = dx * Math.cos(h) + dy * Math.sin(h);
  const right = dx * Math.sin(h) - dy * Math.cos(h);
  const cx = (GRID / 2) * tile;
  const cy = (GRID / 2) * tile;
  return [cx + right * tile, cy - forward * tile];
}

export function renderScene(
  ctx: Ctx2dLike,
  snapshot: SceneSnapshot,
  tile = 16
): void {
  // height map as grayscale tiles: row 0 is farthest ahead of the actor
  for (let i = 0; i < GRID; i++) {
    for (let j = 0; j < GRID; j++) {
      const v = snapshot.local_map[i][j];
      const shade = 235 - Math.round((v / 255) * 180);
      ctx.fillStyle = `rgb(${shade},${shade},${shade})`;
      ctx.fillRect(j * tile, i * tile, tile, tile);
    }
  }

  // route trail
  ctx.strokeStyle = "#4a90d9";
  ctx.lineWidth = 2;
  ctx.beginPath();
  snapshot.route_trail.forEach(([wx, wy], k) => {
    const [px, py] = worldToView(snapshot, wx, wy, tile);
    if (k === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();

  // actor: triangle pointing up (heading-up view)
  const cx = (GRID / 2) * tile;
  const cy = (GRID / 2) * tile;
  ctx.fillStyle = "#d94a4a";
  ctx.beginPath();
  ctx.moveTo(cx, cy - tile * 0.8);
  ctx.lineTo(cx - tile * 0.5, cy + tile * 0.5);
  ctx.lineTo(cx + tile * 0.5, cy + tile * 0.5);
  ctx.closePath();
  ctx.fill();

  // drone marker with camera azimuth ray back toward the actor
  const [dpx, dpy] = worldToView(
    snapshot,
    snapshot.drone_position[0],
    snapshot.drone_position[1],
    tile
  );
  ctx.strokeStyle = "#2d9a43";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(dpx, dpy);
  ctx.lineTo(cx, cy);
  ctx.stroke();
  ctx.fillStyle = "#2d9a43";
  ctx.beginPath();
  ctx.arc(dpx, dpy, tile * 0.35, 0, 2 * Math.PI);
  ctx.fill();
}

/** Whether the occlusion badge should be visible for this snapshot. */
export function occlusionBadgeVisible(snapshot: SceneSnapshot): boolean {
  return snapshot.occluded_fraction > 0;
}

export interface MetricReadouts {
  stepId: string;
  shotMode: string;
  meanPr: string;
  meanTiltDeg: string;
  occludedPct: string;
}

export function metricReadouts(snapshot: SceneSnapshot): MetricReadouts {
  const modes = ["left", "right", "front", "back"];
  return {
    stepId: String(snapshot.step_id),
    shotMode: modes[snapshot.shot_mode] ?? `mode ${snapshot.shot_mode}`,
    meanPr: snapshot.mean_presence_ratio.toFixed(4),
    meanTiltDeg: ((snapshot.mean_tilt * 180) / Math.PI).toFixed(1) + "°",
    occludedPct: (snapshot.occluded_fraction * 100).toFixed(0) + "%",
  };
}
