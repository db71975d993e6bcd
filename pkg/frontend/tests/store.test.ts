import { describe, expect, it } from "vitest";

import { canSubmit, initialState, reduce, UiState } from "../src/store.js";
import { snapshot } from "./helpers.js";

function withStep(id = 1): UiState {
  return reduce(initialState, {
    kind: "step",
    response: { open: true, step: snapshot({ step_id: id }) },
  });
}

describe("store", () => {
  it("starts with nothing open and submit disabled", () => {
    expect(initialState.snapshot).toBeNull();
    expect(canSubmit(initialState)).toBe(false);
  });

  it("an open step enables submit", () => {
    const s = withStep();
    expect(s.stepOpen).toBe(true);
    expect(s.snapshot?.step_id).toBe(1);
    expect(canSubmit(s)).toBe(true);
  });

  it("snapshot step id is taken verbatim from the API", () => {
    const s = withStep(1234);
    expect(s.snapshot?.step_id).toBe(1234);
  });

  it("rating-sent disables further submits for the same step (double-press)", () => {
    let s = withStep();
    s = reduce(s, { kind: "rating-sent", stepId: 1 });
    expect(canSubmit(s)).toBe(false);
  });

  it("a new step clears local input and re-enables submit", () => {
    let s = withStep(1);
    s = reduce(s, { kind: "stars-selected", stars: 4 });
    s = reduce(s, { kind: "rating-sent", stepId: 1 });
    s = reduce(s, { kind: "rating-accepted", stepId: 1 });
    s = reduce(s, {
      kind: "step",
      response: { open: true, step: snapshot({ step_id: 2 }) },
    });
    expect(s.selectedStars).toBeNull();
    expect(s.ratedStepId).toBeNull();
    expect(canSubmit(s)).toBe(true);
  });

  it("polling the same step keeps the already-sent rating", () => {
    let s = withStep(1);
    s = reduce(s, { kind: "rating-sent", stepId: 1 });
    s = reduce(s, {
      kind: "step",
      response: { open: true, step: snapshot({ step_id: 1 }) },
    });
    expect(canSubmit(s)).toBe(false);
  });

  it("stars cannot be selected while no step is open", () => {
    const s = reduce(initialState, { kind: "stars-selected", stars: 5 });
    expect(s.selectedStars).toBeNull();
  });

  it("rejection resyncs to the server's reported step", () => {
    let s = withStep(1);
    s = reduce(s, { kind: "rating-sent", stepId: 1 });
    s = reduce(s, { kind: "rating-rejected", currentStepId: 7 });
    expect(s.snapshot).toBeNull();
    expect(s.errorBanner).toContain("step 7");
    // next poll delivers the current step and the UI recovers
    s = reduce(s, {
      kind: "step",
      response: { open: true, step: snapshot({ step_id: 7 }) },
    });
    expect(canSubmit(s)).toBe(true);
    expect(s.errorBanner).toBeNull();
  });

  it("malformed snapshot raises the error banner without crashing", () => {
    const s = reduce(initialState, { kind: "step-malformed" });
    expect(s.errorBanner).toContain("malformed");
  });

  it("api errors set the stale indicator; a good poll clears it", () => {
    let s = reduce(initialState, { kind: "api-error" });
    expect(s.apiDown).toBe(true);
    s = reduce(s, { kind: "step", response: { open: false, step: null } });
    expect(s.apiDown).toBe(false);
  });

  it("progress responses are stored verbatim", () => {
    const progress = {
      episodes_completed: 30,
      per_episode_mean: [1, 1],
      group_size: 30,
      grouped_mean: [1.0],
    };
    const s = reduce(initialState, { kind: "progress", response: progress });
    expect(s.progress).toEqual(progress);
  });
});
