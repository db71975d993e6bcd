/** DOM wiring: polls the service, reduces events through the store, and
 * redraws. All logic lives in store/render/chart/api; this file only binds. */

import { ApiClient } from "./api.js";
import { chartPoints, renderChart } from "./chart.js";
import {
  metricReadouts,
  occlusionBadgeVisible,
  renderScene,
} from "./render.js";
import { canSubmit, initialState, reduce, UiState } from "./store.js";
import { isValidSnapshot } from "./types.js";

const POLL_MS = 400;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

export function startApp(api: ApiClient = new ApiClient()): void {
  let state: UiState = initialState;
  const sceneCanvas = $("scene") as HTMLCanvasElement;
  const chartCanvas = $("chart") as HTMLCanvasElement;

  function dispatch(event: Parameters<typeof reduce>[1]): void {
    state = reduce(state, event);
    draw();
  }

  function draw(): void {
    const ctx = sceneCanvas.getContext("2d");
    if (ctx && state.snapshot) {
      renderScene(ctx, state.snapshot, sceneCanvas.width / 24);
      const m = metricReadouts(state.snapshot);
      $("step-id").textContent = m.stepId;
      $("shot-mode").textContent = m.shotMode;
      $("mean-pr").textContent = m.meanPr;
      $("mean-tilt").textContent = m.meanTiltDeg;
      $("occluded").textContent = m.occludedPct;
      $("occlusion-badge").style.display = occlusionBadgeVisible(state.snapshot)
        ? "inline-block"
        : "none";
    }
    $("waiting").style.display = state.stepOpen ? "none" : "block";
    $("error-banner").textContent = state.errorBanner ?? "";
    $("error-banner").style.display = state.errorBanner ? "block" : "none";
    $("stale").style.display = state.apiDown ? "inline-block" : "none";
    const enabled = canSubmit(state);
    document.querySelectorAll<HTMLButtonElement>(".star-btn").forEach((b) => {
      b.disabled = !enabled;
    });
    const cctx = chartCanvas.getContext("2d");
    if (cctx && state.progress) {
      renderChart(cctx, state.progress, chartCanvas.width, chartCanvas.height);
      const pts = chartPoints(state.progress, chartCanvas.width, chartCanvas.height);
      $("bucket-count").textContent = String(pts.length);
    }
  }

  async function rate(stars: number): Promise<void> {
    if (!canSubmit(state) || state.snapshot === null) return;
    const stepId = state.snapshot.step_id;
    dispatch({ kind: "stars-selected", stars });
    dispatch({ kind: "rating-sent", stepId });
    try {
      const res = await api.submitRating(stepId, stars);
      if (res.accepted) dispatch({ kind: "rating-accepted", stepId });
      else dispatch({ kind: "rating-rejected", currentStepId: res.current_step_id ?? null });
    } catch {
      dispatch({ kind: "api-error" });
    }
  }

  async function poll(): Promise<void> {
    try {
      const res = await api.fetchStep();
      if (res.open && !isValidSnapshot(res.step)) {
        dispatch({ kind: "step-malformed" });
      } else {
        dispatch({ kind: "step", response: res });
      }
      dispatch({ kind: "progress", response: await api.fetchProgress() });
    } catch {
      dispatch({ kind: "api-error" });
    }
  }

  document.addEventListener("keydown", (e) => {
    if (e.key >= "0" && e.key <= "5") void rate(Number(e.key));
  });
  document.querySelectorAll<HTMLButtonElement>(".star-btn").forEach((b) => {
    b.addEventListener("click", () => void rate(Number(b.dataset.stars)));
  });

  draw();
  setInterval(() => void poll(), POLL_MS);
}

if (typeof document !== "undefined" && document.getElementById("scene")) {
  startApp();
}
