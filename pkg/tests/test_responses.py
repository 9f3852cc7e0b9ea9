import random

from seqlabkit import (
    CorpusRecord,
    LabeledSequence,
    Tag,
    decode_spans,
    encode_tags,
    map_to_tags,
    parse_and_map,
    parse_response,
    render_response,
)

from .helpers import random_span_set

NER_OPTIONS = ["person", "location", "organization", "miscellaneous"]


class TestParseResponse:
    def test_two_extractions(self):
        parsed = parse_response("LOS ANGELES:organization;MONTREAL:location", NER_OPTIONS)
        assert parsed.valid and not parsed.is_na
        assert parsed.extractions == (
            ("LOS ANGELES", "organization"),
            ("MONTREAL", "location"),
        )

    def test_na(self):
        parsed = parse_response("NA", NER_OPTIONS)
        assert parsed.is_na and parsed.valid
        assert parsed.extractions == ()

    def test_unknown_class_invalidates_whole_parse(self):
        parsed = parse_response("foo:bogus_class", NER_OPTIONS)
        assert not parsed.valid
        assert parsed.extractions == ()
        mixed = parse_response("Paris:location;foo:bogus_class", NER_OPTIONS)
        assert not mixed.valid

    def test_first_line_only(self):
        parsed = parse_response("Paris:location\ngarbage beyond the first line", NER_OPTIONS)
        assert parsed.valid
        assert parsed.extractions == (("Paris", "location"),)

    def test_grammar_violations_are_invalid_not_errors(self):
        for text in ["", "Paris:location;", ";", "Paris", ":location", "a:b:location", "NA;NA"]:
            parsed = parse_response(text, NER_OPTIONS)
            assert not parsed.valid
            assert parsed.extractions == ()

    def test_na_line_with_continuation(self):
        assert parse_response("NA\nmore text", NER_OPTIONS).is_na


class TestMapToTags:
    def test_worked_mapping_example(self):
        tokens = ["LOS", "ANGELES", "AT", "MONTREAL"]
        parsed = parse_response("LOS ANGELES:organization;MONTREAL:location", NER_OPTIONS)
        tags = [t.to_string() for t in map_to_tags(parsed, tokens)]
        assert tags == ["B-organization", "I-organization", "O", "B-location"]

    def test_na_maps_to_all_o(self):
        parsed = parse_response("NA", NER_OPTIONS)
        assert [t.to_string() for t in map_to_tags(parsed, ["a", "b", "c"])] == ["O", "O", "O"]

    def test_unmatched_extraction_dropped(self):
        tags = parse_and_map("Paris:location", ["London", "calling"], NER_OPTIONS)
        assert [t.to_string() for t in tags] == ["O", "O"]

    def test_invalid_parse_maps_to_all_o(self):
        tags = parse_and_map("not a well formed answer", ["a", "b"], NER_OPTIONS)
        assert [t.to_string() for t in tags] == ["O", "O"]

    def test_earliest_occurrence_claimed_once(self):
        tokens = ["Paris", "loves", "Paris"]
        tags = parse_and_map("Paris:location", tokens, NER_OPTIONS)
        assert [t.to_string() for t in tags] == ["B-location", "O", "O"]
        twice = parse_and_map("Paris:location;Paris:person", tokens, NER_OPTIONS)
        assert [t.to_string() for t in twice] == ["B-location", "O", "B-person"]

    def test_claimed_region_not_reused(self):
        tokens = ["New", "York", "York"]
        tags = parse_and_map("New York:location;York:organization", tokens, NER_OPTIONS)
        assert [t.to_string() for t in tags] == ["B-location", "I-location", "B-organization"]

    def test_whitespace_normalization(self):
        parsed = parse_response("LOS  ANGELES:organization", NER_OPTIONS)
        tags = map_to_tags(parsed, ["LOS", "ANGELES"])
        assert [t.to_string() for t in tags] == ["B-organization", "I-organization"]

    def test_case_sensitive(self):
        tags = parse_and_map("paris:location", ["Paris"], NER_OPTIONS)
        assert [t.to_string() for t in tags] == ["O"]

    def test_output_is_strict_iob2(self):
        rng = random.Random(3)
        vocab = ["a", "b", "c"]
        for _ in range(300):
            tokens = [rng.choice(vocab) for _ in range(rng.randint(1, 7))]
            n_ext = rng.randint(0, 3)
            extractions = []
            for _ in range(n_ext):
                k = rng.randint(1, 3)
                start = rng.randint(0, max(0, len(tokens) - k))
                extractions.append(
                    (" ".join(tokens[start : start + k]), rng.choice(NER_OPTIONS))
                )
            raw = ";".join(f"{text}:{cls}" for text, cls in extractions) or "NA"
            tags = parse_and_map(raw, tokens, NER_OPTIONS)
            seq = LabeledSequence(tuple(tokens), tuple(tags))
            decode_spans(seq, "iob2", "strict")  # raises on violation


class TestRoundTrip:
    def test_render_parse_map_recovers_unique_spans(self):
        rng = random.Random(55)
        recovered = 0
        for _ in range(300):
            n = rng.randint(1, 8)
            # distinct tokens make span texts unique within the sentence
            tokens = [f"tok{i}" for i in range(n)]
            spans = random_span_set(rng, n, ["A", "B"])
            record = CorpusRecord(tuple(tokens), tuple(encode_tags(spans, n)))
            rendered = render_response(record)
            parsed = parse_response(rendered, ["A", "B"])
            assert parsed.valid
            tags = map_to_tags(parsed, tokens)
            assert decode_spans(LabeledSequence(tuple(tokens), tuple(tags))) == spans
            recovered += 1
        assert recovered == 300

    def test_parse_inverts_render_extraction_lists(self):
        record = CorpusRecord(
            ("Serge", "visited", "Pag", "island"),
            tuple(Tag.from_string(t) for t in ["B-person", "O", "B-location", "I-location"]),
        )
        rendered = render_response(record)
        parsed = parse_response(rendered, ["person", "location"])
        assert parsed.extractions == (("Serge", "person"), ("Pag island", "location"))
