import "./style.css";
import type { Bundle } from "./types";
import { parsePolicy } from "./policy";
import { createState } from "./core";
import { buildApp, gotoStep } from "./render";

const SCROLL_COOLDOWN_MS = 400;
const SCROLL_THRESHOLD = 12;

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const bundleUrl = params.get("bundle") ?? "./acme.bundle.json";
  const policyUrl = params.get("policy") ?? "./acme.policy.txt";

  const [bundleRes, policyRes] = await Promise.all([
    fetch(bundleUrl), fetch(policyUrl),
  ]);
  if (!bundleRes.ok || !policyRes.ok) {
    document.body.textContent =
      `Failed to load ${!bundleRes.ok ? bundleUrl : policyUrl}`;
    return;
  }
  const bundle = (await bundleRes.json()) as Bundle;
  if (bundle.bundle_version !== 1) {
    document.body.textContent =
      `Unsupported bundle_version ${bundle.bundle_version}`;
    return;
  }
  const doc = parsePolicy(await policyRes.text());

  const state = createState();
  const root = document.getElementById("app");
  if (!root) return;
  const app = buildApp(root, bundle, doc, state);

  // one scroll gesture advances exactly one step
  let lastGesture = 0;
  window.addEventListener("wheel", (event) => {
    if (Math.abs(event.deltaY) < SCROLL_THRESHOLD) return;
    const now = performance.now();
    if (now - lastGesture < SCROLL_COOLDOWN_MS) return;
    lastGesture = now;
    gotoStep(app, state.currentStepIndex + (event.deltaY > 0 ? 1 : -1));
  }, { passive: true });

  window.addEventListener("keydown", (event) => {
    if (event.key === "ArrowDown" || event.key === "PageDown"
        || event.key === " ") {
      event.preventDefault();
      gotoStep(app, state.currentStepIndex + 1);
    } else if (event.key === "ArrowUp" || event.key === "PageUp") {
      event.preventDefault();
      gotoStep(app, state.currentStepIndex - 1);
    }
  });
}

void boot();
