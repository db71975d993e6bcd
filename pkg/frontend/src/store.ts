/** Single state store: the UI is a pure function of the latest server
 * snapshot plus local unsent input. All network events reduce through here. */

import { ProgressResponse, SceneSnapshot, StepResponse } from "./types.js";

export interface UiState {
  snapshot: SceneSnapshot | null;
  stepOpen: boolean;
  /** step id of the rating already sent for the current snapshot, if any */
  ratedStepId: number | null;
  selectedStars: number | null;
  progress: ProgressResponse | null;
  apiDown: boolean;
  errorBanner: string | null;
}

export const initialState: UiState = {
  snapshot: null,
  stepOpen: false,
  ratedStepId: null,
  selectedStars: null,
  progress: null,
  apiDown: false,
  errorBanner: null,
};

export type UiEvent =
  | { kind: "step"; response: StepResponse }
  | { kind: "step-malformed" }
  | { kind: "stars-selected"; stars: number }
  | { kind: "rating-sent"; stepId: number }
  | { kind: "rating-accepted"; stepId: number }
  | { kind: "rating-rejected"; currentStepId: number | null }
  | { kind: "progress"; response: ProgressResponse }
  | { kind: "api-error" };

export function canSubmit(state: UiState): boolean {
  return (
    state.stepOpen &&
    state.snapshot !== null &&
    state.ratedStepId !== state.snapshot.step_id
  );
}

export function reduce(state: UiState, event: UiEvent): UiState {
  switch (event.kind) {
    case "step": {
      const snap = event.response.open ? event.response.step : null;
      const sameStep =
        snap !== null && state.snapshot !== null && snap.step_id === state.snapshot.step_id;
      return {
        ...state,
        snapshot: snap ?? state.snapshot,
        stepOpen: event.response.open,
        // a new step clears local input; the same step keeps it
        ratedStepId: sameStep ? state.ratedStepId : null,
        selectedStars: sameStep ? state.selectedStars : null,
        apiDown: false,
        errorBanner: null,
      };
    }
    case "step-malformed":
      return { ...state, errorBanner: "malformed snapshot from server" };
    case "stars-selected":
      if (!canSubmit(state)) return state;
      return { ...state, selectedStars: event.stars };
    case "rating-sent":
      return { ...state, ratedStepId: event.stepId };
    case "rating-accepted":
      return { ...state, stepOpen: false };
    case "rating-rejected":
      // resync: drop the stale snapshot so the next poll re-renders current
      return {
        ...state,
        snapshot: null,
        stepOpen: false,
        ratedStepId: null,
        selectedStars: null,
        errorBanner:
          event.currentStepId === null
            ? "rating rejected"
            : `rating rejected; resyncing to step ${event.currentStepId}`,
      };
    case "progress":
      return { ...state, progress: event.response, apiDown: false };
    case "api-error":
      return { ...state, apiDown: true };
  }
}
