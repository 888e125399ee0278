#!/usr/bin/env python3
"""Regenerate the viewer test fixtures from the compiler.

Copies the shipped fixture bundle/policy, builds the no-inferred-facet
variant bundle, and precomputes the search-parity expectations (100 seeded
queries with their highlight/dim sets per the compiler's search_plan, which
is the reference semantics the viewer must mirror).

Run from the repository root:  python3 frontend/tools/make_fixtures.py
"""

import json
import random
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "src"))

from policystory import (  # noqa: E402
    build_bundle, parse_bundle, parse_config, parse_graph, parse_policy,
    search_plan, serialize_bundle,
)

FIXTURES = ROOT / "tests" / "fixtures"
OUT = ROOT / "frontend" / "tests" / "fixtures"
PUBLIC = ROOT / "frontend" / "public"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    PUBLIC.mkdir(parents=True, exist_ok=True)
    for name in ("acme.bundle.json", "acme.policy.txt"):
        shutil.copy(FIXTURES / name, OUT / name)
        shutil.copy(FIXTURES / name, PUBLIC / name)

    doc = parse_policy((FIXTURES / "acme.policy.txt").read_bytes(), "Acme")
    graph, _ = parse_graph((FIXTURES / "acme.graph.json").read_bytes())
    raw = json.loads((FIXTURES / "acme.config.json").read_text())
    raw["facets"] = [f for f in raw["facets"] if f["kind"] != "inferred"]
    config, diags = parse_config(json.dumps(raw).encode())
    assert config is not None and not diags
    bundle = build_bundle(config, graph, doc)
    (OUT / "acme_noinferred.bundle.json").write_bytes(serialize_bundle(bundle))

    full = parse_bundle((FIXTURES / "acme.bundle.json").read_bytes())
    labels = [i.label for i in full.items] + [c.label for c in full.categories]
    rng = random.Random(31)
    alphabet = "abcdefgilmnoprstu "
    cases = []
    for _ in range(100):
        roll = rng.random()
        if roll < 0.10:
            query = ""
        elif roll < 0.40:
            query = "".join(rng.choice(alphabet)
                            for _ in range(rng.randint(1, 6)))
        elif roll < 0.80:
            label = rng.choice(labels)
            start = rng.randrange(len(label))
            query = label[start:start + rng.randint(1, 8)]
        else:
            query = "".join(c.upper() if rng.random() < 0.5 else c.lower()
                            for c in rng.choice(labels))
        plan = search_plan(full, query)
        cases.append({"query": query,
                      "highlight": sorted(plan["highlight"]),
                      "dim": sorted(plan["dim"])})
    (OUT / "search_expectations.json").write_text(
        json.dumps(cases, indent=2) + "\n")
    print(f"wrote fixtures to {OUT} and {PUBLIC}")


if __name__ == "__main__":
    main()
