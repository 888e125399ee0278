// DOM layer: renders the split-pane narrative from the pure state in
// core.ts. Geometry and styling live here and in style.css; all ordering,
// counts and anchor semantics come from the bundle untouched.

import type { Bundle, RectData, StepData } from "./types";
import type { PolicyDoc, PolicySection } from "./policy";
import {
  ViewerState,
  activeSpan,
  clickRect,
  cycleAnchor,
  enterStep,
  exportLog,
  hoverRect,
  progress,
  searchPlan,
  setSearch,
} from "./core";
import type { AnchorSpan } from "./types";

export interface App {
  root: HTMLElement;
  bundle: Bundle;
  doc: PolicyDoc;
  state: ViewerState;
  textPane: HTMLElement;
  progressBar: HTMLElement;
  stage: HTMLElement;
  navigator: HTMLElement;
  sectionEls: Map<string, HTMLElement>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// ---------------------------------------------------------------------------
// Text pane

function renderSectionContent(target: HTMLElement,
                              section: PolicySection): void {
  target.replaceChildren();
  if (section.heading) {
    target.appendChild(el("h3", "sec-heading", section.heading));
  }
  if (section.body) {
    target.appendChild(el("p", "sec-body", section.body));
  }
}

function buildTextPane(doc: PolicyDoc): {
  pane: HTMLElement; sectionEls: Map<string, HTMLElement>;
} {
  const pane = el("div", "sections");
  const sectionEls = new Map<string, HTMLElement>();
  for (const section of doc.sections) {
    const wrap = el("section");
    wrap.dataset.sectionId = section.id;
    renderSectionContent(wrap, section);
    pane.appendChild(wrap);
    sectionEls.set(section.id, wrap);
  }
  return { pane, sectionEls };
}

export function clearHighlights(app: App): void {
  for (const section of app.doc.sections) {
    const elx = app.sectionEls.get(section.id);
    if (elx && elx.querySelector("mark")) {
      renderSectionContent(elx, section);
    }
  }
}

function markRange(target: HTMLElement, text: string, from: number,
                   to: number): void {
  target.replaceChildren();
  if (from > 0) target.appendChild(document.createTextNode(text.slice(0, from)));
  target.appendChild(el("mark", "anchor-mark", text.slice(from, to)));
  if (to < text.length) {
    target.appendChild(document.createTextNode(text.slice(to)));
  }
}

/** Highlight exactly [start, end) of the full text and scroll it into view. */
export function highlightSpan(app: App, span: AnchorSpan): void {
  clearHighlights(app);
  const section = app.doc.sections.find((s) => s.id === span.section_id);
  const wrap = section && app.sectionEls.get(section.id);
  if (!section || !wrap) return;
  const local = span.start - section.start;
  const localEnd = span.end - section.start;
  const headingLen = section.heading ? section.heading.length : 0;
  const bodyOffset = section.heading && section.body ? headingLen + 1 : 0;

  const heading = wrap.querySelector<HTMLElement>(".sec-heading");
  if (heading && local < headingLen) {
    markRange(heading, section.heading, Math.max(local, 0),
      Math.min(localEnd, headingLen));
  }
  const body = wrap.querySelector<HTMLElement>(".sec-body");
  if (body && localEnd > bodyOffset) {
    markRange(body, section.body, Math.max(local - bodyOffset, 0),
      Math.min(localEnd - bodyOffset, section.body.length));
  }
  const mark = wrap.querySelector("mark");
  if (mark && typeof mark.scrollIntoView === "function") {
    mark.scrollIntoView({ block: "center", behavior: "smooth" });
  }
}

// ---------------------------------------------------------------------------
// Progress bar

function renderProgress(app: App): void {
  const view = progress(app.state, app.bundle);
  app.progressBar.replaceChildren();
  for (let i = 0; i < view.total; i += 1) {
    const segment = el("div",
      i < view.filled ? "segment filled" : "segment");
    app.progressBar.appendChild(segment);
  }
  if (view.continueCue) {
    app.progressBar.appendChild(el("div", "cue", "▾▾"));
  }
}

// ---------------------------------------------------------------------------
// Scenes

function categoryClass(app: App, itemId: string): string {
  const item = app.bundle.items.find((i) => i.id === itemId);
  const category = app.bundle.categories.find(
    (c) => c.id === item?.category_id);
  return category ? `c-${category.color_token}` : "";
}

function itemLabel(app: App, itemId: string): string {
  return app.bundle.items.find((i) => i.id === itemId)?.label ?? itemId;
}

function actorLabel(app: App, actorId: string): string {
  return app.bundle.actors.find((a) => a.id === actorId)?.label ?? actorId;
}

function renderScene(app: App, step: StepData): void {
  const stage = app.stage;
  stage.replaceChildren();
  const payload = step.payload as Record<string, any>;
  switch (step.kind) {
    case "intro": {
      stage.appendChild(el("h1", "scene-title",
        `How ${payload.platform_name} handles your data`));
      stage.appendChild(el("p", "scene-sub",
        "Scroll to walk through the policy, step by step."));
      break;
    }
    case "facet": {
      stage.appendChild(el("div", `icon icon-${payload.icon_token}`));
      stage.appendChild(el("h2", "scene-title", payload.label));
      stage.appendChild(el("p", "scene-sub",
        "The matching clause is highlighted on the left."));
      break;
    }
    case "enumerate": {
      stage.appendChild(el("h2", "scene-title", payload.caption));
      const field = el("div", "circle-field");
      for (const itemId of payload.item_ids as string[]) {
        field.appendChild(el("div",
          `circle ${categoryClass(app, itemId)}`, itemLabel(app, itemId)));
      }
      stage.appendChild(field);
      break;
    }
    case "cluster": {
      stage.appendChild(el("h2", "scene-title",
        "Related items group into categories"));
      const field = el("div", "cluster-field");
      for (const cluster of payload.clusters as Array<Record<string, any>>) {
        const cat = app.bundle.categories.find(
          (c) => c.id === cluster.category_id);
        const group = el("div", "cluster-group");
        group.appendChild(el("h4", undefined, cat?.label ?? cluster.category_id));
        for (const itemId of cluster.item_ids as string[]) {
          group.appendChild(el("div",
            `circle ${categoryClass(app, itemId)}`, itemLabel(app, itemId)));
        }
        field.appendChild(group);
      }
      stage.appendChild(field);
      break;
    }
    case "ingest": {
      stage.appendChild(el("div", "icon icon-logo"));
      stage.appendChild(el("h2", "scene-title",
        `${app.bundle.meta.platform_name} takes all of this in`));
      break;
    }
    case "share_caption": {
      stage.appendChild(el("h2", "scene-title", payload.caption));
      break;
    }
    case "share_flows": {
      stage.appendChild(el("h2", "scene-title", "Where data flows next"));
      const list = el("div", "flow-list");
      for (const recipient of payload.recipients as Array<Record<string, any>>) {
        const row = el("div", "flow-row");
        row.appendChild(el("span", "flow-actor",
          actorLabel(app, recipient.actor_id)));
        for (const flow of recipient.items as Array<Record<string, any>>) {
          row.appendChild(el("span",
            `chip chip-${flow.certainty} ${categoryClass(app, flow.item_id)}`,
            itemLabel(app, flow.item_id)));
        }
        list.appendChild(row);
      }
      stage.appendChild(list);
      break;
    }
    case "summary": {
      renderSummary(app);
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Interactive summary

function rectTooltip(app: App, rect: RectData): string {
  const recipients = app.bundle.rects
    .filter((r) => r.item_id === rect.item_id && r.verb === "share")
    .map((r) => actorLabel(app, r.actor_id));
  const sharing = recipients.length
    ? `shared with ${recipients.join(", ")}`
    : "not shared onwards";
  return `${itemLabel(app, rect.item_id)} — ${rect.verb} ` +
    `(${rect.certainty}); ${sharing}`;
}

export function updateNavigator(app: App): void {
  const active = app.state.activeAnchor;
  if (!active) {
    app.navigator.classList.add("hidden");
    return;
  }
  const rect = app.bundle.rects[active.rectIndex];
  const total = rect.quote_anchors.length;
  if (total <= 1) {
    app.navigator.classList.add("hidden");
    return;
  }
  app.navigator.classList.remove("hidden");
  const label = app.navigator.querySelector(".nav-label");
  if (label) label.textContent = `${active.cyclePosition + 1} of ${total}`;
}

function applySearchView(app: App): void {
  const plan = searchPlan(app.bundle, app.state.searchQuery);
  for (const rectEl of app.stage.querySelectorAll<HTMLElement>(".rect")) {
    const itemId = rectEl.dataset.itemId ?? "";
    rectEl.classList.toggle("dim", plan.dim.has(itemId));
    rectEl.classList.toggle("hl",
      plan.highlight.has(itemId) && app.state.searchQuery !== "");
  }
}

function renderSummary(app: App): void {
  const stage = app.stage;
  const search = el("input", "search-box") as HTMLInputElement;
  search.placeholder = "Search data items (e.g. IP address)";
  search.value = app.state.searchQuery;
  search.addEventListener("input", () => {
    setSearch(app.state, search.value);
    applySearchView(app);
  });
  stage.appendChild(search);

  const grid = el("div", "summary-grid");
  for (const row of app.bundle.rows) {
    const rowEl = el("div", "summary-row");
    rowEl.appendChild(el("span", "row-actor", actorLabel(app, row.actor_id)));
    const cells = el("div", "row-cells");
    app.bundle.rects.forEach((rect, rectIndex) => {
      if (rect.actor_id !== row.actor_id) return;
      const rectEl = el("div",
        `rect style-${rect.style} ${categoryClass(app, rect.item_id)}`,
        itemLabel(app, rect.item_id));
      rectEl.dataset.rectIndex = String(rectIndex);
      rectEl.dataset.itemId = rect.item_id;
      rectEl.title = rectTooltip(app, rect);
      rectEl.addEventListener("mouseenter", () => {
        hoverRect(app.state, app.bundle, rectIndex);
      });
      rectEl.addEventListener("click", () => {
        clickRect(app.state, app.bundle, rectIndex);
        const span = activeSpan(app.state, app.bundle);
        if (span) highlightSpan(app, span);
        updateNavigator(app);
      });
      cells.appendChild(rectEl);
    });
    rowEl.appendChild(cells);
    grid.appendChild(rowEl);
  }
  stage.appendChild(grid);
  applySearchView(app);
}

// ---------------------------------------------------------------------------
// Top-level assembly

export function renderStep(app: App): void {
  const step = app.bundle.steps[app.state.currentStepIndex];
  renderScene(app, step);
  renderProgress(app);
  if (step.kind !== "summary") {
    app.state.activeAnchor = null;
    updateNavigator(app);
  }
  // conditional synchronization: only anchored steps move the text pane
  if (step.text_anchor) {
    highlightSpan(app, step.text_anchor);
  }
}

export function gotoStep(app: App, index: number): void {
  if (enterStep(app.state, app.bundle, index)) {
    renderStep(app);
  }
}

export function buildApp(root: HTMLElement, bundle: Bundle, doc: PolicyDoc,
                         state: ViewerState): App {
  root.replaceChildren();

  const overlay = el("div", "overlay");
  const overlayText = el("div", "overlay-policy");
  const { pane: overlaySections } = buildTextPane(doc);
  overlayText.appendChild(overlaySections);
  const startButton = el("button", "start-button", "Start");
  overlay.appendChild(startButton);
  overlay.appendChild(overlayText);

  const split = el("div", "split hidden");
  const textPane = el("div", "pane-text");
  const navigator = el("div", "navigator hidden");
  const prev = el("button", "nav-prev", "‹");
  const label = el("span", "nav-label", "");
  const next = el("button", "nav-next", "›");
  navigator.append(prev, label, next);
  const { pane, sectionEls } = buildTextPane(doc);
  textPane.append(navigator, pane);

  const progressBar = el("div", "progress");
  const stage = el("div", "pane-stage");
  split.append(textPane, progressBar, stage);

  const exportButton = el("button", "export-log hidden", "Export log");
  root.append(overlay, split, exportButton);

  const app: App = {
    root, bundle, doc, state, textPane, progressBar, stage, navigator,
    sectionEls,
  };

  prev.addEventListener("click", () => {
    cycleAnchor(app.state, app.bundle, -1);
    const span = activeSpan(app.state, app.bundle);
    if (span) highlightSpan(app, span);
    updateNavigator(app);
  });
  next.addEventListener("click", () => {
    cycleAnchor(app.state, app.bundle, 1);
    const span = activeSpan(app.state, app.bundle);
    if (span) highlightSpan(app, span);
    updateNavigator(app);
  });
  startButton.addEventListener("click", () => {
    overlay.classList.add("hidden");
    split.classList.remove("hidden");
    exportButton.classList.remove("hidden");
    gotoStep(app, 0);
    renderStep(app);
  });
  exportButton.addEventListener("click", () => {
    downloadLog(app);
  });
  return app;
}

function downloadLog(app: App): void {
  const data = exportLog(app.state);
  try {
    const url = URL.createObjectURL(
      new Blob([data], { type: "application/x-ndjson" }));
    const link = document.createElement("a");
    link.href = url;
    link.download = "interaction-log.ldjson";
    link.click();
    URL.revokeObjectURL(url);
  } catch {
    console.log(data); // non-browser environments: just emit it
  }
}
