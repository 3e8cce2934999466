/** Pure view model: server responses in, render-ready rows out.
 *
 * Rendered list order is exactly the server order; the client never
 * re-sorts. Score ranges are scaled against the largest upper bound so
 * bars are comparable within one response.
 */

import type { TopKResult } from "./protocol.js";

export interface ViewState {
  seeker: string | null;
  text: string;
  lastResult: TopKResult | null;
  lastLatencyMs: number | null;
  banner: string | null;
}

export interface ResultRow {
  item: string;
  min: number;
  max: number;
  barStartPct: number;
  barEndPct: number;
  guaranteed: boolean;
}

export interface ViewModel {
  rows: ResultRow[];
  badge: "idle" | "anytime" | "exact";
  latencyText: string;
  banner: string | null;
}

export function initialState(): ViewState {
  return { seeker: null, text: "", lastResult: null, lastLatencyMs: null, banner: null };
}

export function applyUpdate(state: ViewState, result: TopKResult,
                            latencyMs: number): ViewState {
  return { ...state, lastResult: result, lastLatencyMs: latencyMs, banner: null };
}

export function applyError(state: ViewState, message: string): ViewState {
  return { ...state, banner: message };
}

export function renderModel(state: ViewState): ViewModel {
  const result = state.lastResult;
  if (result === null) {
    return { rows: [], badge: "idle", latencyText: "", banner: state.banner };
  }
  const scale = Math.max(
    1e-12, ...result.entries.map((e) => Number.parseFloat(e.max)));
  const rows = result.entries.map((e) => {
    const min = Number.parseFloat(e.min);
    const max = Number.parseFloat(e.max);
    return {
      item: e.item,
      min,
      max,
      barStartPct: Math.max(0, Math.min(100, (min / scale) * 100)),
      barEndPct: Math.max(0, Math.min(100, (max / scale) * 100)),
      guaranteed: e.status === "guaranteed",
    };
  });
  const latency = state.lastLatencyMs;
  return {
    rows,
    badge: result.exact ? "exact" : "anytime",
    latencyText: latency === null ? "" : `${latency.toFixed(1)} ms`,
    banner: state.banner,
  };
}
