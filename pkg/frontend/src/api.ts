/** Thin client over the rating service JSON API. */

import { ProgressResponse, RatingResponse, StepResponse } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(private fetchFn: FetchLike = fetch.bind(globalThis)) {}

  async fetchStep(): Promise<StepResponse> {
    const res = await this.fetchFn("/api/step");
    if (!res.ok) throw new Error(`step fetch failed: ${res.status}`);
    return (await res.json()) as StepResponse;
  }

  async submitRating(
    stepId: number,
    stars: number,
    raterId = "ui"
  ): Promise<RatingResponse> {
    const res = await this.fetchFn("/api/rating", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ step_id: stepId, stars, rater_id: raterId }),
    });
    return (await res.json()) as RatingResponse;
  }

  async fetchProgress(): Promise<ProgressResponse> {
    const res = await this.fetchFn("/api/progress");
    if (!res.ok) throw new Error(`progress fetch failed: ${res.status}`);
    return (await res.json()) as ProgressResponse;
  }
}
