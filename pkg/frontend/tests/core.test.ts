import { describe, expect, it } from "vitest";

import {
  activeSpan,
  clickRect,
  createState,
  cycleAnchor,
  enterStep,
  exportLog,
  hoverRect,
  progress,
  setSearch,
} from "../src/core";
import { normalize } from "../src/policy";
import { loadBundle, loadPolicy } from "./helpers";

const bundle = loadBundle("acme.bundle.json");
const noInferred = loadBundle("acme_noinferred.bundle.json");
const doc = loadPolicy("acme.policy.txt");

describe("step navigation", () => {
  it("renders exactly one progress segment per step", () => {
    const state = createState(0);
    expect(progress(state, bundle).total).toBe(bundle.steps.length);
  });

  it("walks every step kind in bundle order with no skips", () => {
    const state = createState(0);
    const kinds: string[] = [bundle.steps[0].kind];
    for (let i = 1; i < bundle.steps.length; i += 1) {
      expect(enterStep(state, bundle, i, i)).toBe(true);
      kinds.push(bundle.steps[state.currentStepIndex].kind);
    }
    expect(kinds).toEqual(bundle.steps.map((s) => s.kind));
  });

  it("clamps out-of-range indexes without a scene change", () => {
    const state = createState(0);
    enterStep(state, bundle, 3, 1);
    const before = state.eventLog.length;
    expect(enterStep(state, bundle, -5, 2)).toBe(true); // clamps to 0
    expect(state.currentStepIndex).toBe(0);
    expect(enterStep(state, bundle, 9999, 3)).toBe(true); // clamps to last
    expect(state.currentStepIndex).toBe(bundle.steps.length - 1);
    expect(enterStep(state, bundle, 9999, 4)).toBe(false); // already there
    expect(state.eventLog.length).toBe(before + 2);
  });

  it("shows the continue cue on every step but the last", () => {
    const state = createState(0);
    for (let i = 0; i < bundle.steps.length; i += 1) {
      enterStep(state, bundle, i, i);
      expect(progress(state, bundle).continueCue)
        .toBe(i + 1 < bundle.steps.length);
      expect(progress(state, bundle).filled).toBe(i + 1);
    }
  });

  it("includes the inferred facet step only when configured", () => {
    const facetKinds = (b: typeof bundle) => b.steps
      .filter((s) => s.kind === "facet")
      .map((s) => s.payload.kind as string);
    expect(facetKinds(bundle)).toContain("inferred");
    expect(facetKinds(noInferred)).not.toContain("inferred");
    expect(noInferred.steps.length).toBe(bundle.steps.length - 1);
  });
});

describe("traceability", () => {
  it("clicking any rect targets a span string-equal to its first quote", () => {
    const state = createState(0);
    bundle.rects.forEach((rect, index) => {
      clickRect(state, bundle, index, index);
      const span = activeSpan(state, bundle);
      expect(span).toBe(rect.quote_anchors[0]);
      expect(doc.fullText.slice(span!.start, span!.end)).toBe(span!.quote);
      expect(span!.quote).toBe(normalize(span!.quote));
    });
  });

  it("multi-anchor rects cycle through all anchors and wrap", () => {
    const state = createState(0);
    const multi = bundle.rects
      .map((rect, index) => ({ rect, index }))
      .filter(({ rect }) => rect.quote_anchors.length > 1);
    expect(multi.length).toBeGreaterThan(0);
    for (const { rect, index } of multi) {
      const m = rect.quote_anchors.length;
      clickRect(state, bundle, index, 0);
      const visited: number[] = [state.activeAnchor!.cyclePosition];
      for (let k = 0; k < m; k += 1) {
        cycleAnchor(state, bundle, 1, k + 1);
        visited.push(state.activeAnchor!.cyclePosition);
      }
      expect(visited).toEqual([...Array(m).keys(), 0]);
      const starts = rect.quote_anchors.map((a) => a.start);
      expect(starts).toEqual([...starts].sort((a, b) => a - b));
    }
  });

  it("single-anchor rects have nothing to cycle", () => {
    const state = createState(0);
    const index = bundle.rects.findIndex((r) => r.quote_anchors.length === 1);
    clickRect(state, bundle, index, 0);
    cycleAnchor(state, bundle, 1, 1);
    expect(state.activeAnchor!.cyclePosition).toBe(0);
  });

  it("cycling backwards wraps too", () => {
    const state = createState(0);
    const index = bundle.rects.findIndex((r) => r.quote_anchors.length === 2);
    clickRect(state, bundle, index, 0);
    cycleAnchor(state, bundle, -1, 1);
    expect(state.activeAnchor!.cyclePosition).toBe(1);
  });
});

describe("event log", () => {
  it("begins with a start event and timestamps never decrease", () => {
    const state = createState(1000);
    enterStep(state, bundle, 1, 1500);
    hoverRect(state, bundle, 0, 1400); // clock jitter must not go backwards
    clickRect(state, bundle, 0, 1600);
    setSearch(state, "ip", 1600);
    cycleAnchor(state, bundle, 1, 1700);
    expect(state.eventLog[0].kind).toBe("start");
    const stamps = state.eventLog.map((e) => e.timestamp);
    for (let i = 1; i < stamps.length; i += 1) {
      expect(stamps[i]).toBeGreaterThanOrEqual(stamps[i - 1]);
    }
  });

  it("exports one parseable JSON record per line", () => {
    const state = createState(0);
    enterStep(state, bundle, 1, 10);
    clickRect(state, bundle, 0, 20);
    const lines = exportLog(state).trimEnd().split("\n");
    expect(lines).toHaveLength(3);
    const records = lines.map((line) => JSON.parse(line));
    expect(records.map((r) => r.kind))
      .toEqual(["start", "step_enter", "rect_click"]);
  });
});
