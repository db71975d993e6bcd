/** Payload types mirroring docs/api_schema.json; field names are verbatim. */

export interface SceneSnapshot {
  step_id: number;
  episode: number;
  step: number;
  local_map: number[][]; // 24x24, 0-255
  actor_position: [number, number];
  actor_heading: number;
  drone_position: [number, number, number];
  camera_azimuth: number;
  route_trail: [number, number][];
  shot_mode: number; // 0 left, 1 right, 2 front, 3 back
  mean_presence_ratio: number;
  mean_tilt: number;
  occluded_fraction: number;
  collided: boolean;
  rating_deadline_seconds: number | null;
}

export interface StepResponse {
  open: boolean;
  step: SceneSnapshot | null;
}

export interface RatingResponse {
  accepted: boolean;
  reward?: number;
  error?: string;
  current_step_id?: number | null;
}

export interface ProgressResponse {
  episodes_completed: number;
  per_episode_mean: number[];
  group_size: number;
  grouped_mean: number[];
}

export const SHOT_MODE_NAMES = ["left", "right", "front", "back"] as const;

export function isValidSnapshot(s: unknown): s is SceneSnapshot {
  if (typeof s !== "object" || s === null) return false;
  const o = s as Record<string, unknown>;
  return (
    typeof o.step_id === "number" &&
    Array.isArray(o.local_map) &&
    o.local_map.length === 24 &&
    o.local_map.every((row) => Array.isArray(row) && row.length === 24) &&
    Array.isArray(o.actor_position) &&
    Array.isArray(o.drone_position) &&
    typeof o.shot_mode === "number"
  );
}
