"""Narrative compilation: validated inputs to a canonical, renderable bundle.

The pipeline expands category-level practices to item level, merges duplicate
practices per (recipient, item, verb), orders the summary rows, builds the
fixed scroll-step sequence, resolves every quote to text anchors, and
serializes the result deterministically. The bundle carries semantics only
(tokens, orders, counts, anchors); the viewer owns all geometry.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any

from .policy import AnchorSpan, PolicyDocument, normalize, resolve_quote
from .schema import (
    CERTAINTY_RANK,
    Actor,
    Category,
    DataItem,
    DataRef,
    Diagnostic,
    NarrativeConfig,
    Practice,
    PracticeGraph,
    ValidationReport,
    diag,
    validate,
)

BUNDLE_VERSION = 1
FINGERPRINT_ALGORITHM = "sha256"

STYLE_BY_CERTAINTY = {"definite": "solid", "conditional": "striped",
                      "ambiguous": "hatched"}

ENUMERATE_CAPTION = "In total, {platform} collects {n} pieces of data"
SHARE_CAPTION = "Some data is shared or conditionally shared with others"

STEP_KINDS = ("intro", "facet", "enumerate", "cluster", "ingest",
              "share_caption", "share_flows", "summary")


class CompileError(Exception):
    """Compilation failed with a coded diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(f"{diagnostic.code} at {diagnostic.path}: "
                         f"{diagnostic.message}")
        self.diagnostic = diagnostic


class InputsRejectedError(Exception):
    """build_bundle refused inputs whose validation report has errors."""

    def __init__(self, report: ValidationReport):
        super().__init__(f"inputs failed validation with "
                         f"{report.error_count} error(s)")
        self.report = report


@dataclass(frozen=True)
class Step:
    """One scroll step; ``text_anchor`` is set iff the step maps to a clause."""

    index: int
    kind: str
    payload: dict
    text_anchor: AnchorSpan | None


@dataclass(frozen=True)
class Row:
    """One summary row: the owner at rank 0, then recipients by volume."""

    actor_id: str
    rank: int
    item_count: int


@dataclass(frozen=True)
class Rect:
    """One data-item rectangle of the interactive summary."""

    actor_id: str
    item_id: str
    verb: str
    certainty: str
    style: str
    quote_anchors: tuple[AnchorSpan, ...]
    expanded: bool


@dataclass(frozen=True)
class BundleMeta:
    platform_name: str
    owner_actor_id: str
    item_count_n: int
    build_fingerprint: str


@dataclass(frozen=True)
class NarrativeBundle:
    meta: BundleMeta
    steps: tuple[Step, ...]
    rows: tuple[Row, ...]
    rects: tuple[Rect, ...]
    anchors: dict[str, tuple[AnchorSpan, ...]]
    categories: tuple[Category, ...]
    actors: tuple[Actor, ...]
    items: tuple[DataItem, ...]


def expand_category_edges(graph: PracticeGraph,
                          config: NarrativeConfig) -> PracticeGraph:
    """Replace every category-level practice with per-member-item practices.

    Each product inherits verb, recipient, certainty, and quotes, and is
    flagged ``expanded``. Output order is deterministic: source edge order,
    then member item id. Item-level practices pass through unchanged.
    """
    edges: list[Practice] = []
    for i, edge in enumerate(graph.edges):
        if edge.data_ref.is_item:
            edges.append(edge)
            continue
        members = sorted(item.id for item in graph.items
                         if item.category_id == edge.data_ref.ref)
        if not members:
            raise CompileError(diag(
                "E050", f"graph/edges/{i}/data_ref",
                f"category '{edge.data_ref.ref}' has no member items"))
        for item_id in members:
            edges.append(Practice(verb=edge.verb,
                                  recipient_actor_id=edge.recipient_actor_id,
                                  data_ref=DataRef("item", item_id),
                                  certainty=edge.certainty,
                                  quotes=edge.quotes,
                                  expanded=True))
    return PracticeGraph(items=graph.items, edges=tuple(edges))


def _quote_position(doc: PolicyDocument, quote: str) -> tuple[int, str]:
    spans = resolve_quote(doc, quote)
    return (spans[0].start if spans else len(doc.full_text) + 1, quote)


def merge_practices(graph: PracticeGraph, doc: PolicyDocument) -> PracticeGraph:
    """Merge duplicate item-level practices per (recipient, item, verb).

    Certainty merges by dominance (definite > conditional > ambiguous),
    quotes are concatenated, de-duplicated, and ordered by their first
    occurrence in the policy text, and the result counts as expanded only
    when every contributing practice was. Merged practices keep the order
    in which their key first appeared. Idempotent.
    """
    order: list[tuple[str, str, str]] = []
    groups: dict[tuple[str, str, str], list[Practice]] = {}
    for edge in graph.edges:
        key = (edge.recipient_actor_id, edge.data_ref.ref, edge.verb)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(edge)

    merged: list[Practice] = []
    for recipient, item_id, verb in order:
        contributors = groups[(recipient, item_id, verb)]
        certainty = max((e.certainty for e in contributors),
                        key=CERTAINTY_RANK.__getitem__)
        quotes: list[str] = []
        for edge in contributors:
            for quote in edge.quotes:
                if quote not in quotes:
                    quotes.append(quote)
        quotes.sort(key=lambda q: _quote_position(doc, q))
        merged.append(Practice(verb=verb, recipient_actor_id=recipient,
                               data_ref=DataRef("item", item_id),
                               certainty=certainty, quotes=tuple(quotes),
                               expanded=all(e.expanded for e in contributors)))
    return PracticeGraph(items=graph.items, edges=tuple(merged))


def _collected_item_ids(merged: PracticeGraph) -> set[str]:
    return {e.data_ref.ref for e in merged.edges if e.verb == "collect"}


def actor_rows(merged: PracticeGraph, config: NarrativeConfig) -> tuple[Row, ...]:
    """Order the summary rows: owner first, then recipients by volume.

    Volume is the number of distinct items an actor receives; ties break by
    case-insensitive label, then id. Actors with no practices are omitted.
    """
    received: dict[str, set[str]] = {}
    for edge in merged.edges:
        if edge.verb == "share":
            received.setdefault(edge.recipient_actor_id, set()).add(edge.data_ref.ref)
    received.pop(config.owner_actor_id, None)

    labels = {a.id: a.label for a in config.actors}
    ranked = sorted(received,
                    key=lambda a: (-len(received[a]), labels[a].lower(), a))
    rows = [Row(actor_id=config.owner_actor_id, rank=0,
                item_count=len(_collected_item_ids(merged)))]
    rows.extend(Row(actor_id=actor_id, rank=rank, item_count=len(received[actor_id]))
                for rank, actor_id in enumerate(ranked, start=1))
    return tuple(rows)


def _first_span(doc: PolicyDocument, quote: str, path: str) -> AnchorSpan:
    spans = resolve_quote(doc, quote)
    if not spans:
        raise CompileError(diag(
            "E099", path,
            f"quote unresolved after validation passed: \"{quote}\""))
    return spans[0]


def build_steps(config: NarrativeConfig, merged: PracticeGraph,
                doc: PolicyDocument) -> tuple[Step, ...]:
    """Build the fixed narrative step sequence.

    intro, one facet step per configured facet in display order (the
    inferred facet appears only when configured), enumerate, cluster,
    ingest, share_caption, share_flows, summary. Only facet steps carry a
    text anchor: the first span of their anchor quote.
    """
    items_by_id = {item.id: item for item in merged.items}
    collected = _collected_item_ids(merged)
    if not collected:
        raise CompileError(diag("E051", "graph/edges",
                                "no data item has a collect practice"))
    by_label = sorted(collected,
                      key=lambda i: (items_by_id[i].label.lower(), i))
    n = len(collected)
    rows = actor_rows(merged, config)

    steps: list[Step] = []

    def add(kind: str, payload: dict, anchor: AnchorSpan | None = None) -> None:
        steps.append(Step(index=len(steps), kind=kind, payload=payload,
                          text_anchor=anchor))

    add("intro", {"platform_name": config.platform_name,
                  "owner_actor_id": config.owner_actor_id})
    for i, facet in enumerate(config.facets):
        add("facet",
            {"kind": facet.kind, "label": facet.label,
             "icon_token": facet.icon_token, "anchor_quote": facet.anchor_quote},
            _first_span(doc, facet.anchor_quote, f"config/facets/{i}/anchor_quote"))
    add("enumerate",
        {"item_ids": by_label, "n": n,
         "caption": ENUMERATE_CAPTION.format(platform=config.platform_name, n=n)})
    clusters = []
    for category in sorted(config.categories, key=lambda c: c.id):
        member_ids = sorted((i for i in collected
                             if items_by_id[i].category_id == category.id),
                            key=lambda i: (items_by_id[i].label.lower(), i))
        if member_ids:
            clusters.append({"category_id": category.id, "item_ids": member_ids})
    add("cluster", {"clusters": clusters})
    add("ingest", {"owner_actor_id": config.owner_actor_id})
    add("share_caption", {"caption": SHARE_CAPTION})
    recipients = []
    for row in rows[1:]:
        flows = sorted(({"item_id": e.data_ref.ref, "certainty": e.certainty}
                        for e in merged.edges
                        if e.verb == "share"
                        and e.recipient_actor_id == row.actor_id),
                       key=lambda f: f["item_id"])
        recipients.append({"actor_id": row.actor_id, "items": flows})
    add("share_flows", {"recipients": recipients})
    add("summary", {"row_actor_ids": [r.actor_id for r in rows],
                    "rect_count": len(merged.edges)})
    return tuple(steps)


def _build_rects(merged: PracticeGraph, rows: tuple[Row, ...],
                 doc: PolicyDocument) -> tuple[Rect, ...]:
    rank = {row.actor_id: row.rank for row in rows}
    rects = []
    for i, edge in enumerate(merged.edges):
        spans: list[AnchorSpan] = []
        seen: set[tuple[int, int]] = set()
        for quote in edge.quotes:
            for span in resolve_quote(doc, quote):
                if (span.start, span.end) not in seen:
                    seen.add((span.start, span.end))
                    spans.append(span)
        if not spans:
            raise CompileError(diag(
                "E099", f"graph/edges/{i}/quotes",
                "practice has no resolvable quote after validation passed"))
        spans.sort(key=lambda s: s.start)
        rects.append(Rect(actor_id=edge.recipient_actor_id,
                          item_id=edge.data_ref.ref,
                          verb=edge.verb,
                          certainty=edge.certainty,
                          style=STYLE_BY_CERTAINTY[edge.certainty],
                          quote_anchors=tuple(spans),
                          expanded=edge.expanded))
    rects.sort(key=lambda r: (rank.get(r.actor_id, len(rank)), r.item_id, r.verb))
    return tuple(rects)


def build_bundle(config: NarrativeConfig, graph: PracticeGraph,
                 doc: PolicyDocument) -> NarrativeBundle:
    """Compile validated inputs into the canonical narrative bundle.

    Re-runs validation and refuses inputs with errors. Any quote that fails
    to resolve past that point is an internal fault (E099). The build is
    fully deterministic; the fingerprint is the content hash of the
    canonical serialization with the fingerprint field itself omitted.
    """
    report = validate(config, graph, doc)
    if not report.ok:
        raise InputsRejectedError(report)

    merged = merge_practices(expand_category_edges(graph, config), doc)
    rows = actor_rows(merged, config)
    steps = build_steps(config, merged, doc)
    rects = _build_rects(merged, rows, doc)

    anchor_quotes = {facet.anchor_quote for facet in config.facets}
    for edge in merged.edges:
        anchor_quotes.update(edge.quotes)
    anchors = {quote: resolve_quote(doc, quote)
               for quote in sorted(anchor_quotes)}

    rect_item_ids = {rect.item_id for rect in rects}
    items_by_id = {item.id: item for item in graph.items}
    items = tuple(items_by_id[i] for i in sorted(rect_item_ids))
    used_categories = {item.category_id for item in items}
    categories = tuple(sorted((c for c in config.categories
                               if c.id in used_categories),
                              key=lambda c: c.id))
    actors_by_id = {a.id: a for a in config.actors}
    actors = tuple(actors_by_id[row.actor_id] for row in rows)

    meta = BundleMeta(platform_name=config.platform_name,
                      owner_actor_id=config.owner_actor_id,
                      item_count_n=len(_collected_item_ids(merged)),
                      build_fingerprint="")
    bundle = NarrativeBundle(meta=meta, steps=steps, rows=rows, rects=rects,
                             anchors=anchors, categories=categories,
                             actors=actors, items=items)
    digest = hashlib.sha256(_dump(bundle_to_obj(bundle, fingerprint=False))).hexdigest()
    meta = BundleMeta(platform_name=meta.platform_name,
                      owner_actor_id=meta.owner_actor_id,
                      item_count_n=meta.item_count_n,
                      build_fingerprint=f"{FINGERPRINT_ALGORITHM}:{digest}")
    return NarrativeBundle(meta=meta, steps=steps, rows=rows, rects=rects,
                           anchors=anchors, categories=categories,
                           actors=actors, items=items)


# --------------------------------------------------------------------------
# Canonical serialization


def _span_to_obj(span: AnchorSpan) -> dict:
    return {"quote": span.quote, "section_id": span.section_id,
            "start": span.start, "end": span.end,
            "occurrence_index": span.occurrence_index}


def bundle_to_obj(bundle: NarrativeBundle, fingerprint: bool = True) -> dict:
    """Bundle as a JSON-ready dict with keys in schema order.

    With ``fingerprint=False`` the meta fingerprint field is omitted
    entirely; hashing that form is how the fingerprint is defined.
    """
    meta: dict[str, Any] = {
        "platform_name": bundle.meta.platform_name,
        "owner_actor_id": bundle.meta.owner_actor_id,
        "item_count_n": bundle.meta.item_count_n,
    }
    if fingerprint:
        meta["build_fingerprint"] = bundle.meta.build_fingerprint
    return {
        "bundle_version": BUNDLE_VERSION,
        "meta": meta,
        "steps": [{"index": s.index, "kind": s.kind, "payload": s.payload,
                   "text_anchor": _span_to_obj(s.text_anchor)
                   if s.text_anchor else None}
                  for s in bundle.steps],
        "rows": [{"actor_id": r.actor_id, "rank": r.rank,
                  "item_count": r.item_count} for r in bundle.rows],
        "rects": [{"actor_id": r.actor_id, "item_id": r.item_id,
                   "verb": r.verb, "certainty": r.certainty, "style": r.style,
                   "quote_anchors": [_span_to_obj(a) for a in r.quote_anchors],
                   "expanded": r.expanded} for r in bundle.rects],
        "anchors": {quote: [_span_to_obj(a) for a in spans]
                    for quote, spans in sorted(bundle.anchors.items())},
        "categories": [{"id": c.id, "label": c.label, "color_token": c.color_token}
                       for c in bundle.categories],
        "actors": [{"id": a.id, "label": a.label, "kind": a.kind,
                    "icon_token": a.icon_token} for a in bundle.actors],
        "items": [{"id": i.id, "label": i.label, "category_id": i.category_id}
                  for i in bundle.items],
    }


def _dump(obj: dict) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def serialize_bundle(bundle: NarrativeBundle) -> bytes:
    """Canonical UTF-8 JSON bytes; structurally equal bundles serialize
    to identical bytes."""
    return _dump(bundle_to_obj(bundle))


def _span_from_obj(obj: dict) -> AnchorSpan:
    return AnchorSpan(quote=obj["quote"], section_id=obj["section_id"],
                      start=obj["start"], end=obj["end"],
                      occurrence_index=obj["occurrence_index"])


def parse_bundle(data: bytes) -> NarrativeBundle:
    """Parse serialized bundle bytes back into a NarrativeBundle."""
    obj = json.loads(data.decode("utf-8"))
    if obj.get("bundle_version") != BUNDLE_VERSION:
        raise ValueError(f"unsupported bundle_version "
                         f"{obj.get('bundle_version')!r}")
    meta = BundleMeta(platform_name=obj["meta"]["platform_name"],
                      owner_actor_id=obj["meta"]["owner_actor_id"],
                      item_count_n=obj["meta"]["item_count_n"],
                      build_fingerprint=obj["meta"]["build_fingerprint"])
    steps = tuple(Step(index=s["index"], kind=s["kind"], payload=s["payload"],
                       text_anchor=_span_from_obj(s["text_anchor"])
                       if s["text_anchor"] else None)
                  for s in obj["steps"])
    rows = tuple(Row(actor_id=r["actor_id"], rank=r["rank"],
                     item_count=r["item_count"]) for r in obj["rows"])
    rects = tuple(Rect(actor_id=r["actor_id"], item_id=r["item_id"],
                       verb=r["verb"], certainty=r["certainty"],
                       style=r["style"],
                       quote_anchors=tuple(_span_from_obj(a)
                                           for a in r["quote_anchors"]),
                       expanded=r["expanded"]) for r in obj["rects"])
    anchors = {quote: tuple(_span_from_obj(a) for a in spans)
               for quote, spans in obj["anchors"].items()}
    categories = tuple(Category(c["id"], c["label"], c["color_token"])
                       for c in obj["categories"])
    actors = tuple(Actor(a["id"], a["label"], a["kind"], a["icon_token"])
                   for a in obj["actors"])
    items = tuple(DataItem(i["id"], i["label"], i["category_id"])
                  for i in obj["items"])
    return NarrativeBundle(meta=meta, steps=steps, rows=rows, rects=rects,
                           anchors=anchors, categories=categories,
                           actors=actors, items=items)


# --------------------------------------------------------------------------
# Summary-view helpers


def search_plan(bundle: NarrativeBundle, keyword: str) -> dict[str, set[str]]:
    """Reference search semantics the viewer must mirror.

    Case-insensitive substring match of the normalized keyword against item
    labels and their category labels. The empty keyword highlights all
    items; highlight and dim always partition the bundle's items.
    """
    needle = normalize(keyword).lower()
    category_labels = {c.id: c.label.lower() for c in bundle.categories}
    highlight: set[str] = set()
    dim: set[str] = set()
    for item in bundle.items:
        hit = (not needle
               or needle in item.label.lower()
               or needle in category_labels.get(item.category_id, ""))
        (highlight if hit else dim).add(item.id)
    return {"highlight": highlight, "dim": dim}


def stats(bundle: NarrativeBundle) -> dict:
    """Authoring-aid counts over a compiled bundle."""
    items_per_category: dict[str, int] = {c.id: 0 for c in bundle.categories}
    for item in bundle.items:
        items_per_category[item.category_id] += 1
    practices = {"definite": 0, "conditional": 0, "ambiguous": 0}
    verbs = {"collect": 0, "share": 0}
    for rect in bundle.rects:
        practices[rect.certainty] += 1
        verbs[rect.verb] += 1
    return {
        "items_per_category": items_per_category,
        "items_per_row": {row.actor_id: row.item_count for row in bundle.rows},
        "practices_per_certainty": practices,
        "practices_per_verb": verbs,
        "total_quotes": len(bundle.anchors),
        "unresolved": sum(1 for spans in bundle.anchors.values() if not spans),
    }
