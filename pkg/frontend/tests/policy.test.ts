import { describe, expect, it } from "vitest";

import { normalize, parsePolicy, sectionAt } from "../src/policy";
import { loadBundle, loadPolicy } from "./helpers";

const bundle = loadBundle("acme.bundle.json");
const doc = loadPolicy("acme.policy.txt");

describe("normalize", () => {
  it("collapses whitespace runs to single spaces", () => {
    expect(normalize("We  may\ncollect")).toBe("We may collect");
  });

  it("folds curly quotes to straight ones", () => {
    expect(normalize("don’t")).toBe("don't");
    expect(normalize("“your information”")).toBe('"your information"');
  });

  it("is the identity on the empty string and preserves case", () => {
    expect(normalize("")).toBe("");
    expect(normalize("  Mixed CASE\t")).toBe("Mixed CASE");
  });
});

describe("parsePolicy", () => {
  it("splits the fixture into its sections, preamble first", () => {
    expect(doc.sections).toHaveLength(6);
    expect(doc.sections[0].id).toBe("preamble");
    expect(doc.sections[1].id).toBe("information-you-provide");
  });

  it("tiles the full text with section ranges", () => {
    let previousEnd: number | null = null;
    for (const section of doc.sections) {
      expect(section.start).toBeLessThan(section.end);
      if (previousEnd !== null) expect(section.start).toBe(previousEnd + 1);
      previousEnd = section.end;
    }
    expect(previousEnd).toBe(doc.fullText.length);
  });

  it("rejects empty sources", () => {
    expect(() => parsePolicy("  \n \n")).toThrow();
  });
});

describe("offset-space parity with the compiled bundle", () => {
  it("every bundle anchor slices to its quote in the rebuilt full text", () => {
    const entries = Object.entries(bundle.anchors);
    expect(entries.length).toBeGreaterThan(0);
    for (const [quote, spans] of entries) {
      expect(spans.length).toBeGreaterThan(0);
      for (const span of spans) {
        expect(doc.fullText.slice(span.start, span.end)).toBe(quote);
        expect(sectionAt(doc, span.start).id).toBe(span.section_id);
      }
    }
  });

  it("step text anchors slice to their quotes too", () => {
    for (const step of bundle.steps) {
      if (!step.text_anchor) continue;
      const { start, end, quote } = step.text_anchor;
      expect(doc.fullText.slice(start, end)).toBe(quote);
    }
  });
});
