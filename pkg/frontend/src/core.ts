// Pure viewer state: step navigation, anchor cycling, search, event log.
// The DOM layer renders from this; every transition here is testable
// without a browser.

import type { AnchorSpan, Bundle, RectData } from "./types";
import { normalize } from "./policy";

export type EventKind =
  | "start"
  | "step_enter"
  | "rect_click"
  | "rect_hover"
  | "search"
  | "anchor_cycle";

export interface InteractionEvent {
  kind: EventKind;
  timestamp: number; // milliseconds since session start, non-decreasing
  payload: Record<string, unknown>;
}

export interface ActiveAnchor {
  rectIndex: number;
  cyclePosition: number;
}

export interface ViewerState {
  currentStepIndex: number;
  searchQuery: string;
  activeAnchor: ActiveAnchor | null;
  eventLog: InteractionEvent[];
  sessionStart: number;
}

function log(state: ViewerState, kind: EventKind,
             payload: Record<string, unknown>, now: number): void {
  const elapsed = Math.max(0, now - state.sessionStart);
  const last = state.eventLog[state.eventLog.length - 1];
  const timestamp = last ? Math.max(last.timestamp, elapsed) : elapsed;
  state.eventLog.push({ kind, timestamp, payload });
}

export function createState(now: number = Date.now()): ViewerState {
  const state: ViewerState = {
    currentStepIndex: 0,
    searchQuery: "",
    activeAnchor: null,
    eventLog: [],
    sessionStart: now,
  };
  log(state, "start", {}, now);
  return state;
}

/** Clamp and enter a step; out-of-range requests change nothing. */
export function enterStep(state: ViewerState, bundle: Bundle, index: number,
                          now: number = Date.now()): boolean {
  const clamped = Math.min(Math.max(index, 0), bundle.steps.length - 1);
  if (clamped === state.currentStepIndex && state.eventLog.length > 1) {
    return false;
  }
  state.currentStepIndex = clamped;
  log(state, "step_enter", {
    index: clamped,
    kind: bundle.steps[clamped].kind,
  }, now);
  return true;
}

export interface ProgressView {
  filled: number;
  total: number;
  continueCue: boolean;
}

export function progress(state: ViewerState, bundle: Bundle): ProgressView {
  const total = bundle.steps.length;
  const filled = state.currentStepIndex + 1;
  return { filled, total, continueCue: filled < total };
}

export function clickRect(state: ViewerState, bundle: Bundle,
                          rectIndex: number,
                          now: number = Date.now()): RectData {
  const rect = bundle.rects[rectIndex];
  state.activeAnchor = { rectIndex, cyclePosition: 0 };
  log(state, "rect_click", {
    actor_id: rect.actor_id,
    item_id: rect.item_id,
    verb: rect.verb,
  }, now);
  return rect;
}

export function hoverRect(state: ViewerState, bundle: Bundle,
                          rectIndex: number,
                          now: number = Date.now()): void {
  const rect = bundle.rects[rectIndex];
  log(state, "rect_hover", {
    actor_id: rect.actor_id,
    item_id: rect.item_id,
  }, now);
}

/** Advance the multi-reference navigator; wraps modulo the anchor count. */
export function cycleAnchor(state: ViewerState, bundle: Bundle,
                            delta: number = 1,
                            now: number = Date.now()): void {
  const active = state.activeAnchor;
  if (!active) return;
  const total = bundle.rects[active.rectIndex].quote_anchors.length;
  active.cyclePosition = ((active.cyclePosition + delta) % total + total) % total;
  log(state, "anchor_cycle", {
    rect_index: active.rectIndex,
    cycle_position: active.cyclePosition,
  }, now);
}

export function activeSpan(state: ViewerState,
                           bundle: Bundle): AnchorSpan | null {
  if (!state.activeAnchor) return null;
  const rect = bundle.rects[state.activeAnchor.rectIndex];
  return rect.quote_anchors[state.activeAnchor.cyclePosition];
}

export function setSearch(state: ViewerState, query: string,
                          now: number = Date.now()): void {
  state.searchQuery = query;
  log(state, "search", { query }, now);
}

export interface SearchAssignment {
  highlight: Set<string>;
  dim: Set<string>;
}

/** Mirror of the compiler's search_plan: case-insensitive substring match
 * of the normalized keyword against item labels and their category labels;
 * the empty keyword highlights everything. */
export function searchPlan(bundle: Bundle, keyword: string): SearchAssignment {
  const needle = normalize(keyword).toLowerCase();
  const categoryLabels = new Map(
    bundle.categories.map((c) => [c.id, c.label.toLowerCase()]));
  const highlight = new Set<string>();
  const dim = new Set<string>();
  for (const item of bundle.items) {
    const hit = needle === ""
      || item.label.toLowerCase().includes(needle)
      || (categoryLabels.get(item.category_id) ?? "").includes(needle);
    (hit ? highlight : dim).add(item.id);
  }
  return { highlight, dim };
}

/** Event log as line-delimited JSON, one record per interaction. */
export function exportLog(state: ViewerState): string {
  return state.eventLog
    .map((event) => JSON.stringify(event))
    .join("\n") + "\n";
}
