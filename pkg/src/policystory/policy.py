"""Policy text ingestion: sectioned parsing, normalization, and quote anchoring.

The policy source is plain UTF-8 text in which lines starting with "## "
open a new section. Everything is normalized into a single stable string
(``PolicyDocument.full_text``) so that verbatim quotes from the other input
files can be resolved to character spans, independent of the whitespace and
typographic-quote noise of the original document.
"""

from __future__ import annotations

import re
import unicodedata
from bisect import bisect_right
from dataclasses import dataclass

# Typographic single/double quotes folded to their straight ASCII forms.
_QUOTE_FOLDS = str.maketrans({
    "‘": "'", "’": "'", "‚": "'", "‛": "'",
    "“": '"', "”": '"', "„": '"', "‟": '"',
})
_WS_RUN = re.compile(r"\s+")
_NON_SLUG = re.compile(r"[^a-z0-9]+")

HEADING_MARK = "## "
PREAMBLE_ID = "preamble"


class PolicyError(ValueError):
    """Base error for unusable policy sources."""


class PolicyEncodingError(PolicyError):
    """Raised when the policy source is not valid UTF-8."""


class EmptyPolicyError(PolicyError):
    """Raised when the source contains no sections and no preamble text."""


def normalize(text: str) -> str:
    """Normalize text into the canonical matching space.

    Applies Unicode canonical composition (NFC), folds curly quotes and
    apostrophes to straight ones, collapses every whitespace run (including
    newlines) to a single space, and strips the ends. Case is preserved.
    """
    text = unicodedata.normalize("NFC", text)
    text = text.translate(_QUOTE_FOLDS)
    text = _WS_RUN.sub(" ", text)
    return text.strip()


def slugify(text: str) -> str:
    """Derive a lowercase ascii slug; empty input falls back to "section"."""
    slug = _NON_SLUG.sub("-", normalize(text).lower()).strip("-")
    return slug or "section"


@dataclass(frozen=True)
class Section:
    """One policy section located inside ``full_text``. ``end`` is exclusive."""

    id: str
    heading: str
    body: str
    start: int
    end: int


@dataclass(frozen=True)
class AnchorSpan:
    """A resolved occurrence of a quote inside ``full_text``."""

    quote: str
    section_id: str
    start: int
    end: int
    occurrence_index: int


@dataclass(frozen=True)
class PolicyDocument:
    """Normalized, sectioned policy text with a stable offset space."""

    owner_name: str
    sections: tuple[Section, ...]
    full_text: str
    length: int

    def section_at(self, offset: int) -> Section:
        """Return the section whose range contains ``offset``.

        Offsets that fall on a separator between sections belong to the
        preceding section; resolved quotes never start there because
        normalized quotes cannot begin with a space.
        """
        starts = [s.start for s in self.sections]
        index = bisect_right(starts, offset) - 1
        return self.sections[max(index, 0)]


def parse_policy(source: bytes, owner_name: str) -> PolicyDocument:
    """Parse a sectioned policy source into a PolicyDocument.

    Lines beginning with "## " open a new section; text before the first
    heading becomes an implicit preamble section. Deterministic: identical
    bytes always yield an identical document.
    """
    try:
        raw = source.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise PolicyEncodingError(f"policy source is not valid UTF-8: {exc}") from exc

    # (raw heading or None for the preamble, accumulated body lines)
    blocks: list[tuple[str | None, list[str]]] = [(None, [])]
    for line in raw.splitlines():
        if line.startswith(HEADING_MARK):
            blocks.append((line[len(HEADING_MARK):], []))
        else:
            blocks[-1][1].append(line)

    sections: list[Section] = []
    seen: dict[str, int] = {}
    pieces: list[str] = []
    pos = 0
    for raw_heading, body_lines in blocks:
        heading = normalize(raw_heading) if raw_heading is not None else ""
        body = normalize("\n".join(body_lines))
        if raw_heading is None:
            if not body:
                continue  # no preamble text before the first heading
            section_id = PREAMBLE_ID
            text = body
        else:
            section_id = slugify(raw_heading)
            text = f"{heading} {body}" if body else heading
            if not text:
                continue
        count = seen.get(section_id, 0) + 1
        seen[section_id] = count
        if count > 1:
            section_id = f"{section_id}-{count}"
        if pieces:
            pos += 1  # single-space separator between section ranges
        start = pos
        pos += len(text)
        pieces.append(text)
        sections.append(Section(id=section_id, heading=heading, body=body,
                                start=start, end=pos))

    if not sections:
        raise EmptyPolicyError("policy source has no sections and no preamble text")

    full_text = " ".join(pieces)
    return PolicyDocument(owner_name=owner_name.strip(),
                          sections=tuple(sections),
                          full_text=full_text,
                          length=len(full_text))


def resolve_quote(doc: PolicyDocument, quote: str) -> tuple[AnchorSpan, ...]:
    """Resolve all non-overlapping occurrences of a quote, in document order.

    Matching is case-sensitive over the normalized text; the scan is
    left-to-right greedy and resumes after each match, so overlapping
    occurrences are never reported. Returns an empty tuple when the quote
    does not occur; the caller decides how severe that is.
    """
    needle = normalize(quote)
    if not needle:
        raise ValueError("quote must be non-empty")
    spans: list[AnchorSpan] = []
    start = doc.full_text.find(needle)
    while start != -1:
        end = start + len(needle)
        spans.append(AnchorSpan(quote=needle,
                                section_id=doc.section_at(start).id,
                                start=start,
                                end=end,
                                occurrence_index=len(spans)))
        start = doc.full_text.find(needle, end)
    return tuple(spans)


def word_count(doc: PolicyDocument) -> int:
    """Number of maximal non-space tokens in the normalized full text."""
    return len(doc.full_text.split())
