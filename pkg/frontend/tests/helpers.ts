import { Ctx2dLike } from "../src/render.js";
import { SceneSnapshot } from "../src/types.js";

export function snapshot(overrides: Partial<SceneSnapshot> = {}): SceneSnapshot {
  return {
    step_id: 1,
    episode: 0,
    step: 0,
    local_map: Array.from({ length: 24 }, () => Array(24).fill(0)),
    actor_position: [10, 32],
    actor_heading: 0,
    drone_position: [10, 37, 3.8],
    camera_azimuth: Math.PI / 2,
    route_trail: [
      [8, 32],
      [150, 32],
    ],
    shot_mode: 0,
    mean_presence_ratio: 0.0117,
    mean_tilt: 0.3805,
    occluded_fraction: 0,
    collided: false,
    rating_deadline_seconds: null,
    ...overrides,
  };
}

export interface DrawCall {
  op: string;
  args: unknown[];
  fillStyle: string;
}

/** Recording fake of the 2D context subset used by the renderers. */
export class FakeCtx implements Ctx2dLike {
  fillStyle = "";
  strokeStyle = "";
  lineWidth = 0;
  calls: DrawCall[] = [];

  private rec(op: string, ...args: unknown[]): void {
    this.calls.push({ op, args, fillStyle: this.fillStyle });
  }
  fillRect(x: number, y: number, w: number, h: number): void {
    this.rec("fillRect", x, y, w, h);
  }
  beginPath(): void {
    this.rec("beginPath");
  }
  moveTo(x: number, y: number): void {
    this.rec("moveTo", x, y);
  }
  lineTo(x: number, y: number): void {
    this.rec("lineTo", x, y);
  }
  arc(x: number, y: number, r: number, a0: number, a1: number): void {
    this.rec("arc", x, y, r, a0, a1);
  }
  closePath(): void {
    this.rec("closePath");
  }
  fill(): void {
    this.rec("fill");
  }
  stroke(): void {
    this.rec("stroke");
  }
}
