/** Progress chart: plots the server-computed 30-episode bucket means
 * verbatim; no client-side recomputation. */

import { Ctx2dLike } from "./render.js";
import { ProgressResponse } from "./types.js";

export interface ChartPoint {
  x: number;
  y: number;
  value: number;
}

/** Pure layout: one point per bucket, y mapping reward [-1, 1] to pixels. */
export function chartPoints(
  progress: ProgressResponse,
  width: number,
  height: number
): ChartPoint[] {
  const values = progress.grouped_mean;
  if (values.length === 0) return [];
  const pad = 10;
  const innerW = width - 2 * pad;
  const innerH = height - 2 * pad;
  return values.map((value, i) => ({
    x: pad + (values.length === 1 ? innerW / 2 : (i * innerW) / (values.length - 1)),
    y: pad + ((1 - value) / 2) * innerH,
    value,
  }));
}

export function renderChart(
  ctx: Ctx2dLike,
  progress: ProgressResponse,
  width: number,
  height: number
): void {
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
  // zero line
  ctx.strokeStyle = "#cccccc";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, height / 2);
  ctx.lineTo(width, height / 2);
  ctx.stroke();

  const points = chartPoints(progress, width, height);
  if (points.length === 0) return;
  ctx.strokeStyle = "#4a90d9";
  ctx.lineWidth = 2;
  ctx.beginPath();
  points.forEach((p, k) => (k === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
  ctx.stroke();
  ctx.fillStyle = "#4a90d9";
  for (const p of points) {
    ctx.beginPath();
    ctx.arc(p.x, p.y, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
}
