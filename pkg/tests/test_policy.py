import random

import pytest

from policystory import (
    EmptyPolicyError,
    PolicyEncodingError,
    normalize,
    parse_policy,
    resolve_quote,
    word_count,
)
from oracles import scan_occurrences


class TestNormalize:
    def test_collapses_whitespace_runs(self):
        assert normalize("We  may\ncollect") == "We may collect"

    def test_folds_curly_apostrophe(self):
        assert normalize("don’t") == "don't"

    def test_folds_curly_double_quotes(self):
        assert normalize("“your information”") == '"your information"'

    def test_empty_is_identity(self):
        assert normalize("") == ""

    def test_strips_and_preserves_case(self):
        assert normalize("  Mixed CASE text\t") == "Mixed CASE text"

    def test_unicode_composition(self):
        # decomposed e + combining acute composes to a single code point
        assert normalize("Café") == "Café"

    def test_idempotent(self):
        rng = random.Random(7)
        chars = " \t\nabcDEF’“é"
        for _ in range(200):
            s = "".join(rng.choice(chars) for _ in range(rng.randrange(30)))
            assert normalize(normalize(s)) == normalize(s)


class TestParsePolicy:
    def test_single_section_collapses_body(self):
        doc = parse_policy(b"## A\nHello  world.", "X")
        assert len(doc.sections) == 1
        assert doc.sections[0].body == "Hello world."

    def test_preamble_before_first_heading(self):
        doc = parse_policy(b"intro\n## A\nx", "X")
        assert [s.id for s in doc.sections] == ["preamble", "a"]
        assert doc.sections[0].body == "intro"
        assert doc.sections[1].body == "x"

    def test_parse_is_deterministic(self):
        source = b"intro\n## A\nfirst\n## B\nsecond"
        assert parse_policy(source, "X") == parse_policy(source, "X")

    def test_section_ranges_tile_full_text(self, acme_doc):
        previous_end = None
        for section in acme_doc.sections:
            assert section.start < section.end
            if previous_end is not None:
                assert section.start == previous_end + 1
            piece = acme_doc.full_text[section.start:section.end]
            expected = (f"{section.heading} {section.body}"
                        if section.heading and section.body
                        else section.heading or section.body)
            assert piece == expected
            previous_end = section.end
        assert previous_end == acme_doc.length == len(acme_doc.full_text)

    def test_section_ids_unique(self, acme_doc):
        ids = [s.id for s in acme_doc.sections]
        assert len(ids) == len(set(ids))
        assert all(ids)

    def test_duplicate_headings_deduplicated(self):
        doc = parse_policy(b"## Data\nx\n## Data\ny", "X")
        assert [s.id for s in doc.sections] == ["data", "data-2"]

    def test_heading_only_section(self):
        doc = parse_policy(b"## Contact\n## Other\nbody", "X")
        assert doc.sections[0].body == ""
        assert doc.full_text.startswith("Contact Other")

    def test_non_utf8_rejected(self):
        with pytest.raises(PolicyEncodingError):
            parse_policy(b"\xff\xfe junk", "X")

    def test_empty_source_rejected(self):
        with pytest.raises(EmptyPolicyError):
            parse_policy(b"", "X")
        with pytest.raises(EmptyPolicyError):
            parse_policy(b"   \n  \n", "X")


class TestResolveQuote:
    # Expected spans below were computed with the naive scan oracle over the
    # mini fixture's normalized text and then frozen.
    def test_known_quote_span(self, mini_doc):
        spans = resolve_quote(mini_doc, "We collect your name")
        assert len(spans) == 1
        span = spans[0]
        assert (span.start, span.end) == (16, 36)
        assert span.section_id == "what-we-collect"
        assert span.occurrence_index == 0
        assert mini_doc.full_text[span.start:span.end] == "We collect your name"

    def test_matching_is_case_sensitive(self, mini_doc):
        # "What we collect" (heading) must not match "We collect".
        spans = resolve_quote(mini_doc, "We collect")
        assert [(s.start, s.end) for s in spans] == [(16, 26)]
        assert resolve_quote(mini_doc, "WE COLLECT YOUR NAME") == ()

    def test_two_occurrences_in_document_order(self):
        doc = parse_policy(b"## A\nWe collect data. We collect data.", "X")
        spans = resolve_quote(doc, "We collect data")
        assert [(s.start, s.end) for s in spans] == [(2, 17), (19, 34)]
        assert [s.occurrence_index for s in spans] == [0, 1]

    def test_absent_quote_yields_empty(self, mini_doc):
        assert resolve_quote(mini_doc, "Bitcoin wallet") == ()

    def test_empty_quote_rejected(self, mini_doc):
        with pytest.raises(ValueError):
            resolve_quote(mini_doc, "")
        with pytest.raises(ValueError):
            resolve_quote(mini_doc, "   ")

    def test_quote_normalized_before_matching(self, mini_doc):
        spans = resolve_quote(mini_doc, "We collect\n  your name")
        assert [(s.start, s.end) for s in spans] == [(16, 36)]

    def test_agrees_with_scan_oracle(self, mini_doc, acme_doc):
        probes = [
            "We collect your name",
            "We may collect your IP address",
            "We share your information directly with advertisers",
            "your",
            "address",
            "a",
        ]
        for doc in (mini_doc, acme_doc):
            for quote in probes:
                expected = scan_occurrences(doc.full_text, quote)
                got = [(s.start, s.end) for s in resolve_quote(doc, quote)]
                assert got == expected

    def test_greedy_non_overlapping(self):
        doc = parse_policy(b"## A\nha ha ha ha", "X")
        spans = resolve_quote(doc, "ha ha")
        assert [(s.start, s.end) for s in spans] == \
            scan_occurrences(doc.full_text, "ha ha")
        assert len(spans) == 2

    def test_occurrence_index_increases_with_start(self, acme_doc):
        for quote in ("your", "we", "with"):
            spans = resolve_quote(acme_doc, quote)
            starts = [s.start for s in spans]
            assert starts == sorted(starts)
            assert [s.occurrence_index for s in spans] == list(range(len(spans)))

    def test_spans_sound_on_random_quotes(self, acme_doc):
        rng = random.Random(99)
        words = acme_doc.full_text.split()
        for _ in range(100):
            i = rng.randrange(len(words))
            quote = " ".join(words[i:i + rng.randrange(1, 6)])
            for span in resolve_quote(acme_doc, quote):
                assert acme_doc.full_text[span.start:span.end] == normalize(quote)
                assert span.end - span.start == len(normalize(quote))


class TestWordCount:
    def test_preamble_only_sentence(self):
        doc = parse_policy(b"We collect your name.", "X")
        assert word_count(doc) == 4

    def test_mini_fixture_count(self, mini_doc):
        # frozen from the oracle: len(full_text.split()) over the fixture
        assert word_count(mini_doc) == 21

    def test_matches_split_identity(self, acme_doc):
        assert word_count(acme_doc) == len(acme_doc.full_text.split())
