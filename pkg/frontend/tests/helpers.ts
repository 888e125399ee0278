import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import type { Bundle } from "../src/types";
import { PolicyDoc, parsePolicy } from "../src/policy";

function fixturePath(name: string): string {
  return resolve(process.cwd(), "tests", "fixtures", name);
}

export function loadBundle(name: string): Bundle {
  return JSON.parse(readFileSync(fixturePath(name), "utf-8")) as Bundle;
}

export function loadPolicy(name: string): PolicyDoc {
  return parsePolicy(readFileSync(fixturePath(name), "utf-8"));
}

export function loadJson<T>(name: string): T {
  return JSON.parse(readFileSync(fixturePath(name), "utf-8")) as T;
}
