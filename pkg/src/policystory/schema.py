"""Structured narrative inputs: config and practice-graph parsing plus validation.

Two JSON files accompany the policy text: the narrative config (facets,
categories, actors, display metadata) and the practice graph (data items and
directed collect/share practices with quote evidence). Parsing enforces each
file's internal invariants; ``validate`` cross-checks the three inputs and
``lint_certainty`` flags likely annotation slips. All findings are coded
diagnostics so tooling can consume them as line-delimited JSON records.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any

from .policy import PolicyDocument, normalize, resolve_quote

FACET_KINDS = ("provided", "automatic", "external", "inferred")
ACTOR_KINDS = ("owner", "third_party_class")
CERTAINTY_LEVELS = ("definite", "conditional", "ambiguous")
VERBS = ("collect", "share")

# Dominance order used when duplicate practices merge: a definite statement
# subsumes hedged restatements of the same flow.
CERTAINTY_RANK = {"ambiguous": 0, "conditional": 1, "definite": 2}

# Fixed palette vocabulary for category color tokens (tokens, not artwork).
COLOR_TOKENS = frozenset({
    "red", "orange", "amber", "yellow", "lime", "green", "teal", "cyan",
    "blue", "indigo", "violet", "purple", "magenta", "pink", "brown", "gray",
})

# Stable diagnostic codes. E* block compilation; W* are advisory.
CODES = {
    "E001": "malformed input",
    "E002": "missing required field",
    "E003": "duplicate identifier",
    "E004": "owner cardinality violation",
    "E005": "invalid enumeration value",
    "E010": "practice without quote evidence",
    "E011": "unknown certainty level",
    "E020": "item references unknown category",
    "E021": "dangling reference",
    "E022": "collect practice must target the owner",
    "E023": "practice quote not found in policy",
    "E024": "facet anchor quote not found in policy",
    "E025": "graph has no collect practices",
    "E050": "category practice has no member items",
    "E051": "no collected data items",
    "E099": "internal compiler fault",
    "W001": "unknown field ignored",
    "W030": "item never referenced by a practice",
    "W040": "definite practice quoted only with 'may'",
    "W041": "conditional practice without hedging words",
}

_MAY = re.compile(r"\bmay\b", re.IGNORECASE)
_HEDGES = re.compile(r"\b(?:may|might|could|if)\b", re.IGNORECASE)


@dataclass(frozen=True)
class Diagnostic:
    """One coded finding at a slash-delimited input location."""

    code: str
    severity: str
    path: str
    message: str

    def to_record(self) -> dict[str, str]:
        return {"code": self.code, "severity": self.severity,
                "path": self.path, "message": self.message}


def diag(code: str, path: str, message: str) -> Diagnostic:
    severity = "error" if code.startswith("E") else "warning"
    return Diagnostic(code=code, severity=severity, path=path, message=message)


@dataclass(frozen=True)
class ValidationReport:
    """Deterministically ordered diagnostics; ok iff no error entries."""

    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)

    @property
    def error_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity == "error")

    @property
    def warning_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.severity == "warning")

    @staticmethod
    def build(diagnostics: list[Diagnostic]) -> "ValidationReport":
        ordered = sorted(diagnostics, key=lambda d: (d.path, d.code))
        return ValidationReport(diagnostics=tuple(ordered))


@dataclass(frozen=True)
class SourceFacet:
    kind: str
    label: str
    icon_token: str
    anchor_quote: str


@dataclass(frozen=True)
class Category:
    id: str
    label: str
    color_token: str


@dataclass(frozen=True)
class Actor:
    id: str
    label: str
    kind: str
    icon_token: str


@dataclass(frozen=True)
class NarrativeConfig:
    platform_name: str
    owner_actor_id: str
    facets: tuple[SourceFacet, ...]
    categories: tuple[Category, ...]
    actors: tuple[Actor, ...]

    @property
    def owner(self) -> Actor:
        return next(a for a in self.actors if a.id == self.owner_actor_id)


@dataclass(frozen=True)
class DataRef:
    """Tagged reference to either a data item or a whole category."""

    kind: str  # "item" | "category"
    ref: str

    @property
    def is_item(self) -> bool:
        return self.kind == "item"


@dataclass(frozen=True)
class DataItem:
    id: str
    label: str
    category_id: str


@dataclass(frozen=True)
class Practice:
    """One directed collect/share statement with quote evidence.

    ``expanded`` is compiler metadata (set when a category-level practice is
    expanded to its member items); it is never read from or written to the
    graph file.
    """

    verb: str
    recipient_actor_id: str
    data_ref: DataRef
    certainty: str
    quotes: tuple[str, ...]
    expanded: bool = False


@dataclass(frozen=True)
class PracticeGraph:
    items: tuple[DataItem, ...]
    edges: tuple[Practice, ...]


# --------------------------------------------------------------------------
# JSON field extraction helpers. Each helper appends diagnostics and returns
# None (or a best-effort value) so a single parse reports every finding.

def _load_json(data: bytes, root: str, diags: list[Diagnostic]) -> Any:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        diags.append(diag("E001", root, f"not valid UTF-8: {exc}"))
        return None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        diags.append(diag("E001", root, f"invalid JSON: {exc}"))
        return None
    if not isinstance(obj, dict):
        diags.append(diag("E001", root, "top level must be a JSON object"))
        return None
    return obj


def _req_str(obj: dict, key: str, path: str, diags: list[Diagnostic]) -> str | None:
    if key not in obj:
        diags.append(diag("E002", f"{path}/{key}", f"missing required field '{key}'"))
        return None
    value = obj[key]
    if not isinstance(value, str):
        diags.append(diag("E001", f"{path}/{key}", f"field '{key}' must be a string"))
        return None
    value = normalize(value)
    if not value:
        diags.append(diag("E002", f"{path}/{key}", f"field '{key}' must be non-empty"))
        return None
    return value


def _req_list(obj: dict, key: str, path: str, diags: list[Diagnostic]) -> list | None:
    if key not in obj:
        diags.append(diag("E002", f"{path}/{key}", f"missing required field '{key}'"))
        return None
    value = obj[key]
    if not isinstance(value, list):
        diags.append(diag("E001", f"{path}/{key}", f"field '{key}' must be an array"))
        return None
    return value


def _warn_unknown(obj: dict, known: set[str], path: str, diags: list[Diagnostic]) -> None:
    for key in obj:
        if key not in known:
            diags.append(diag("W001", f"{path}/{key}", f"unknown field '{key}' ignored"))


def _check_enum(value: str | None, allowed: tuple[str, ...], path: str,
                diags: list[Diagnostic], code: str = "E005") -> str | None:
    if value is None:
        return None
    if value not in allowed:
        diags.append(diag(code, path,
                          f"'{value}' is not one of {', '.join(allowed)}"))
        return None
    return value


def _check_duplicate(value: str | None, seen: set[str], path: str,
                     diags: list[Diagnostic]) -> None:
    if value is None:
        return
    if value in seen:
        diags.append(diag("E003", path, f"duplicate identifier '{value}'"))
    seen.add(value)


# --------------------------------------------------------------------------
# Parsers


def parse_config(data: bytes) -> tuple[NarrativeConfig | None, list[Diagnostic]]:
    """Parse a narrative config file.

    Returns the config and a diagnostic list; the config is None iff any
    error-severity diagnostic was produced. Unknown fields only warn (W001)
    so future schema extensions do not break old compilers.
    """
    diags: list[Diagnostic] = []
    obj = _load_json(data, "config", diags)
    if obj is None:
        return None, diags

    platform_name = _req_str(obj, "platform_name", "config", diags)
    owner_actor_id = _req_str(obj, "owner_actor_id", "config", diags)
    _warn_unknown(obj, {"platform_name", "owner_actor_id", "facets",
                        "categories", "actors"}, "config", diags)

    facets: list[SourceFacet] = []
    raw_facets = _req_list(obj, "facets", "config", diags)
    if raw_facets is not None and not raw_facets:
        diags.append(diag("E002", "config/facets",
                          "at least one data-source facet is required"))
    seen_kinds: set[str] = set()
    for i, raw in enumerate(raw_facets or []):
        path = f"config/facets/{i}"
        if not isinstance(raw, dict):
            diags.append(diag("E001", path, "facet must be an object"))
            continue
        kind = _check_enum(_req_str(raw, "kind", path, diags), FACET_KINDS,
                           f"{path}/kind", diags)
        _check_duplicate(kind, seen_kinds, f"{path}/kind", diags)
        label = _req_str(raw, "label", path, diags)
        icon_token = _req_str(raw, "icon_token", path, diags)
        anchor_quote = _req_str(raw, "anchor_quote", path, diags)
        _warn_unknown(raw, {"kind", "label", "icon_token", "anchor_quote"},
                      path, diags)
        if None not in (kind, label, icon_token, anchor_quote):
            facets.append(SourceFacet(kind, label, icon_token, anchor_quote))

    categories: list[Category] = []
    seen_cat: set[str] = set()
    for i, raw in enumerate(_req_list(obj, "categories", "config", diags) or []):
        path = f"config/categories/{i}"
        if not isinstance(raw, dict):
            diags.append(diag("E001", path, "category must be an object"))
            continue
        cat_id = _req_str(raw, "id", path, diags)
        _check_duplicate(cat_id, seen_cat, f"{path}/id", diags)
        label = _req_str(raw, "label", path, diags)
        color = _req_str(raw, "color_token", path, diags)
        if color is not None and color not in COLOR_TOKENS:
            diags.append(diag("E005", f"{path}/color_token",
                              f"'{color}' is not a palette token"))
            color = None
        _warn_unknown(raw, {"id", "label", "color_token"}, path, diags)
        if None not in (cat_id, label, color):
            categories.append(Category(cat_id, label, color))

    actors: list[Actor] = []
    seen_actor: set[str] = set()
    for i, raw in enumerate(_req_list(obj, "actors", "config", diags) or []):
        path = f"config/actors/{i}"
        if not isinstance(raw, dict):
            diags.append(diag("E001", path, "actor must be an object"))
            continue
        actor_id = _req_str(raw, "id", path, diags)
        _check_duplicate(actor_id, seen_actor, f"{path}/id", diags)
        label = _req_str(raw, "label", path, diags)
        kind = _check_enum(_req_str(raw, "kind", path, diags), ACTOR_KINDS,
                           f"{path}/kind", diags)
        icon_token = _req_str(raw, "icon_token", path, diags)
        _warn_unknown(raw, {"id", "label", "kind", "icon_token"}, path, diags)
        if None not in (actor_id, label, kind, icon_token):
            actors.append(Actor(actor_id, label, kind, icon_token))

    owners = [a for a in actors if a.kind == "owner"]
    if len(owners) != 1:
        diags.append(diag("E004", "config/actors",
                          f"exactly one owner actor required, found {len(owners)}"))
    if owner_actor_id is not None:
        by_id = {a.id: a for a in actors}
        if owner_actor_id not in by_id:
            diags.append(diag("E021", "config/owner_actor_id",
                              f"owner_actor_id '{owner_actor_id}' is not a declared actor"))
        elif by_id[owner_actor_id].kind != "owner":
            diags.append(diag("E004", "config/owner_actor_id",
                              f"actor '{owner_actor_id}' is not the owner actor"))

    if any(d.severity == "error" for d in diags):
        return None, diags
    assert platform_name is not None and owner_actor_id is not None
    return NarrativeConfig(platform_name=platform_name,
                           owner_actor_id=owner_actor_id,
                           facets=tuple(facets),
                           categories=tuple(categories),
                           actors=tuple(actors)), diags


def _parse_data_ref(raw: Any, path: str, diags: list[Diagnostic]) -> DataRef | None:
    if not isinstance(raw, dict) or len(raw) != 1:
        diags.append(diag("E001", path,
                          'data_ref must be {"item": id} or {"category": id}'))
        return None
    key, value = next(iter(raw.items()))
    if key not in ("item", "category") or not isinstance(value, str) or not value:
        diags.append(diag("E001", path,
                          'data_ref must be {"item": id} or {"category": id}'))
        return None
    return DataRef(kind=key, ref=value)


def parse_graph(data: bytes) -> tuple[PracticeGraph | None, list[Diagnostic]]:
    """Parse a practice-graph file; edges keep their file order."""
    diags: list[Diagnostic] = []
    obj = _load_json(data, "graph", diags)
    if obj is None:
        return None, diags

    _warn_unknown(obj, {"items", "edges"}, "graph", diags)

    items: list[DataItem] = []
    seen_item: set[str] = set()
    for i, raw in enumerate(_req_list(obj, "items", "graph", diags) or []):
        path = f"graph/items/{i}"
        if not isinstance(raw, dict):
            diags.append(diag("E001", path, "item must be an object"))
            continue
        item_id = _req_str(raw, "id", path, diags)
        _check_duplicate(item_id, seen_item, f"{path}/id", diags)
        label = _req_str(raw, "label", path, diags)
        category_id = _req_str(raw, "category_id", path, diags)
        _warn_unknown(raw, {"id", "label", "category_id"}, path, diags)
        if None not in (item_id, label, category_id):
            items.append(DataItem(item_id, label, category_id))

    edges: list[Practice] = []
    for i, raw in enumerate(_req_list(obj, "edges", "graph", diags) or []):
        path = f"graph/edges/{i}"
        if not isinstance(raw, dict):
            diags.append(diag("E001", path, "edge must be an object"))
            continue
        verb = _check_enum(_req_str(raw, "verb", path, diags), VERBS,
                           f"{path}/verb", diags)
        recipient = _req_str(raw, "recipient_actor_id", path, diags)
        certainty = _check_enum(_req_str(raw, "certainty", path, diags),
                                CERTAINTY_LEVELS, f"{path}/certainty", diags,
                                code="E011")
        if "data_ref" not in raw:
            diags.append(diag("E002", f"{path}/data_ref",
                              "missing required field 'data_ref'"))
            data_ref = None
        else:
            data_ref = _parse_data_ref(raw["data_ref"], f"{path}/data_ref", diags)
        quotes: list[str] | None
        raw_quotes = raw.get("quotes")
        if not isinstance(raw_quotes, list) or not raw_quotes:
            diags.append(diag("E010", f"{path}/quotes",
                              "every practice needs at least one verbatim quote"))
            quotes = None
        else:
            quotes = []
            for j, q in enumerate(raw_quotes):
                text = normalize(q) if isinstance(q, str) else ""
                if not text:
                    diags.append(diag("E010", f"{path}/quotes/{j}",
                                      "quote must be a non-empty string"))
                else:
                    quotes.append(text)
            if not quotes:
                quotes = None
        _warn_unknown(raw, {"verb", "recipient_actor_id", "data_ref",
                            "certainty", "quotes"}, path, diags)
        if None not in (verb, recipient, certainty, data_ref, quotes):
            edges.append(Practice(verb=verb, recipient_actor_id=recipient,
                                  data_ref=data_ref, certainty=certainty,
                                  quotes=tuple(quotes)))

    if any(d.severity == "error" for d in diags):
        return None, diags
    return PracticeGraph(items=tuple(items), edges=tuple(edges)), diags


# --------------------------------------------------------------------------
# Canonical serialization (parse . serialize is the identity on parsed values)


def config_to_obj(config: NarrativeConfig) -> dict:
    return {
        "platform_name": config.platform_name,
        "owner_actor_id": config.owner_actor_id,
        "facets": [{"kind": f.kind, "label": f.label, "icon_token": f.icon_token,
                    "anchor_quote": f.anchor_quote} for f in config.facets],
        "categories": [{"id": c.id, "label": c.label, "color_token": c.color_token}
                       for c in config.categories],
        "actors": [{"id": a.id, "label": a.label, "kind": a.kind,
                    "icon_token": a.icon_token} for a in config.actors],
    }


def graph_to_obj(graph: PracticeGraph) -> dict:
    return {
        "items": [{"id": i.id, "label": i.label, "category_id": i.category_id}
                  for i in graph.items],
        "edges": [{"verb": e.verb,
                   "recipient_actor_id": e.recipient_actor_id,
                   "data_ref": {e.data_ref.kind: e.data_ref.ref},
                   "certainty": e.certainty,
                   "quotes": list(e.quotes)} for e in graph.edges],
    }


def _dump(obj: dict) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def serialize_config(config: NarrativeConfig) -> bytes:
    return _dump(config_to_obj(config))


def serialize_graph(graph: PracticeGraph) -> bytes:
    return _dump(graph_to_obj(graph))


# --------------------------------------------------------------------------
# Cross-validation and lint


def validate(config: NarrativeConfig, graph: PracticeGraph,
             doc: PolicyDocument) -> ValidationReport:
    """Cross-check the three inputs; the findings are the result.

    Covers dangling references (E020/E021), collect-edge ownership (E022),
    quote and facet-anchor resolution (E023/E024), the no-collect case
    (E025), and unreferenced items (W030). Diagnostics are sorted by
    (path, code) so identical inputs always yield identical reports.
    """
    diags: list[Diagnostic] = []
    category_ids = {c.id for c in config.categories}
    actor_ids = {a.id for a in config.actors}
    item_ids = {i.id for i in graph.items}

    for i, item in enumerate(graph.items):
        if item.category_id not in category_ids:
            diags.append(diag("E020", f"graph/items/{i}/category_id",
                              f"item '{item.id}' references unknown category "
                              f"'{item.category_id}'"))

    referenced: set[str] = set()
    has_collect = False
    for i, edge in enumerate(graph.edges):
        path = f"graph/edges/{i}"
        if edge.verb == "collect":
            has_collect = True
        if edge.recipient_actor_id not in actor_ids:
            diags.append(diag("E021", f"{path}/recipient_actor_id",
                              f"unknown actor '{edge.recipient_actor_id}'"))
        elif edge.verb == "collect" and edge.recipient_actor_id != config.owner_actor_id:
            diags.append(diag("E022", f"{path}/recipient_actor_id",
                              "collect practices must target the policy owner, "
                              f"not '{edge.recipient_actor_id}'"))
        ref = edge.data_ref
        if ref.is_item:
            if ref.ref not in item_ids:
                diags.append(diag("E021", f"{path}/data_ref",
                                  f"unknown item '{ref.ref}'"))
            else:
                referenced.add(ref.ref)
        else:
            if ref.ref not in category_ids:
                diags.append(diag("E021", f"{path}/data_ref",
                                  f"unknown category '{ref.ref}'"))
            else:
                referenced.update(it.id for it in graph.items
                                  if it.category_id == ref.ref)
        for j, quote in enumerate(edge.quotes):
            if not resolve_quote(doc, quote):
                diags.append(diag("E023", f"{path}/quotes/{j}",
                                  f"quote not found in policy: \"{quote}\""))

    for i, facet in enumerate(config.facets):
        if not resolve_quote(doc, facet.anchor_quote):
            diags.append(diag("E024", f"config/facets/{i}/anchor_quote",
                              f"anchor quote not found in policy: "
                              f"\"{facet.anchor_quote}\""))

    if not has_collect:
        diags.append(diag("E025", "graph/edges",
                          "graph declares no collect practices"))

    for i, item in enumerate(graph.items):
        if item.id not in referenced:
            diags.append(diag("W030", f"graph/items/{i}",
                              f"item '{item.id}' is never referenced by a practice"))

    return ValidationReport.build(diags)


def lint_certainty(graph: PracticeGraph) -> list[Diagnostic]:
    """Advisory heuristics for likely certainty-annotation slips.

    W040: a practice marked definite whose every quote hedges with "may".
    W041: a practice marked conditional with no hedging word in any quote.
    """
    warnings: list[Diagnostic] = []
    for i, edge in enumerate(graph.edges):
        path = f"graph/edges/{i}"
        if edge.certainty == "definite" and edge.quotes and \
                all(_MAY.search(q) for q in edge.quotes):
            warnings.append(diag("W040", path,
                                 "marked definite but every quote says 'may'"))
        elif edge.certainty == "conditional" and \
                not any(_HEDGES.search(q) for q in edge.quotes):
            warnings.append(diag("W041", path,
                                 "marked conditional but no quote contains "
                                 "'may', 'might', 'could', or 'if'"))
    return warnings
