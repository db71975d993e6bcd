import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { snapshot } from "./helpers.js";

function fakeFetch(routes: Record<string, { status: number; body: unknown }>) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    const r = routes[url];
    if (!r) throw new Error(`unrouted ${url}`);
    return new Response(JSON.stringify(r.body), { status: r.status });
  };
  return { fn, calls };
}

describe("ApiClient", () => {
  it("fetches the current step", async () => {
    const { fn } = fakeFetch({
      "/api/step": { status: 200, body: { open: true, step: snapshot() } },
    });
    const res = await new ApiClient(fn).fetchStep();
    expect(res.open).toBe(true);
    expect(res.step?.step_id).toBe(1);
  });

  it("press 4 posts stars=4 with the open step id", async () => {
    const { fn, calls } = fakeFetch({
      "/api/rating": { status: 200, body: { accepted: true, reward: 0.625 } },
    });
    const res = await new ApiClient(fn).submitRating(9, 4);
    expect(res).toEqual({ accepted: true, reward: 0.625 });
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({
      step_id: 9,
      stars: 4,
      rater_id: "ui",
    });
  });

  it("surfaces a stale-step rejection with the server's current id", async () => {
    const { fn } = fakeFetch({
      "/api/rating": {
        status: 409,
        body: { accepted: false, error: "stale step id 9", current_step_id: 10 },
      },
    });
    const res = await new ApiClient(fn).submitRating(9, 4);
    expect(res.accepted).toBe(false);
    expect(res.current_step_id).toBe(10);
  });

  it("fetches progress", async () => {
    const body = {
      episodes_completed: 10,
      per_episode_mean: [1, 1],
      group_size: 30,
      grouped_mean: [1],
    };
    const { fn } = fakeFetch({ "/api/progress": { status: 200, body } });
    expect(await new ApiClient(fn).fetchProgress()).toEqual(body);
  });

  it("throws on a non-OK step response", async () => {
    const { fn } = fakeFetch({ "/api/step": { status: 500, body: {} } });
    await expect(new ApiClient(fn).fetchStep()).rejects.toThrow("500");
  });
});
