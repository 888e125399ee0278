// Policy text parsing, mirroring the compiler's normalization contract so
// that bundle anchor offsets index into the exact same string. The bundle
// intentionally carries no full text; the viewer loads the *.policy.txt
// source and reconstructs the offset space.

const QUOTE_FOLDS: Record<string, string> = {
  "‘": "'", "’": "'", "‚": "'", "‛": "'",
  "“": '"', "”": '"', "„": '"', "‟": '"',
};

const HEADING_MARK = "## ";

export interface PolicySection {
  id: string;
  heading: string;
  body: string;
  start: number;
  end: number;
}

export interface PolicyDoc {
  sections: PolicySection[];
  fullText: string;
}

export function normalize(text: string): string {
  let out = text.normalize("NFC");
  out = out.replace(/[‘’‚‛“”„‟]/g,
    (ch) => QUOTE_FOLDS[ch]);
  return out.replace(/\s+/g, " ").trim();
}

function slugify(text: string): string {
  const slug = normalize(text).toLowerCase()
    .replace(/[^a-z0-9]+/g, "-")
    .replace(/^-+|-+$/g, "");
  return slug || "section";
}

export function parsePolicy(raw: string): PolicyDoc {
  const blocks: Array<{ heading: string | null; lines: string[] }> = [
    { heading: null, lines: [] },
  ];
  for (const line of raw.split(/\r\n|[\n\r\u0085\u2028\u2029]/)) {
    if (line.startsWith(HEADING_MARK)) {
      blocks.push({ heading: line.slice(HEADING_MARK.length), lines: [] });
    } else {
      blocks[blocks.length - 1].lines.push(line);
    }
  }

  const sections: PolicySection[] = [];
  const seen = new Map<string, number>();
  const pieces: string[] = [];
  let pos = 0;
  for (const block of blocks) {
    const heading = block.heading === null ? "" : normalize(block.heading);
    const body = normalize(block.lines.join("\n"));
    let id: string;
    let text: string;
    if (block.heading === null) {
      if (!body) continue;
      id = "preamble";
      text = body;
    } else {
      id = slugify(block.heading);
      text = body ? `${heading} ${body}` : heading;
      if (!text) continue;
    }
    const count = (seen.get(id) ?? 0) + 1;
    seen.set(id, count);
    if (count > 1) id = `${id}-${count}`;
    if (pieces.length > 0) pos += 1;
    const start = pos;
    pos += text.length;
    pieces.push(text);
    sections.push({ id, heading, body, start, end: pos });
  }
  if (sections.length === 0) {
    throw new Error("policy source has no sections and no preamble text");
  }
  return { sections, fullText: pieces.join(" ") };
}

export function sectionAt(doc: PolicyDoc, offset: number): PolicySection {
  let found = doc.sections[0];
  for (const section of doc.sections) {
    if (section.start > offset) break;
    found = section;
  }
  return found;
}
