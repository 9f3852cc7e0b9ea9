import math
import random

import pytest

from seqlabkit import (
    CorpusRecord,
    PromptLayout,
    PromptSpec,
    ReservedCharError,
    SpecError,
    Tag,
    TokenLogProbs,
    build_prompt,
    loss,
    render_response,
    sample_demonstrations,
)

from seqlabkit import encode_tags
from seqlabkit.prompts import Region

from .helpers import random_span_set, random_tokens

NER_INSTRUCTION = (
    "extract named entities and their type from the input sentence, "
    "all entity types are in options\n"
    "if there are no named entities in the sentence the output should just be 'NA'\n"
    "if there are multiple extractions from the sentence, the extraction format "
    "should be entity_1_span:entity_1_class;entity_2_span:entity_2_class;..."
)
NER_OPTIONS = ("person", "location", "organization", "miscellaneous")


def rec(tokens, tags, **kwargs):
    return CorpusRecord(tuple(tokens), tuple(Tag.from_string(t) for t in tags), **kwargs)


DEMO = rec(
    ["LOS", "ANGELES", "AT", "MONTREAL"],
    ["B-organization", "I-organization", "O", "B-location"],
)
QUERY = rec(
    ["EU", "rejects", "German", "call", "to", "boycott", "British", "lamb", "."],
    ["B-organization", "O", "B-miscellaneous", "O", "O", "O", "B-miscellaneous", "O", "O"],
)

ONE_SHOT_TRAINING_PROMPT = (
    "### Instruction:\n"
    + NER_INSTRUCTION
    + "\n### Options:\n"
    + "person, location, organization, miscellaneous\n"
    + "### Sentence:\n"
    + "LOS ANGELES AT MONTREAL\n"
    + "### Response:\n"
    + "LOS ANGELES:organization;MONTREAL:location\n"
    + "### Sentence:\n"
    + "EU rejects German call to boycott British lamb .\n"
    + "### Response:\n"
    + "EU:organization;German:miscellaneous;British:miscellaneous<eos>"
)


class TestRenderResponse:
    def test_two_extractions(self):
        assert render_response(DEMO) == "LOS ANGELES:organization;MONTREAL:location"

    def test_no_spans_renders_na(self):
        assert render_response(rec(["a", "b"], ["O", "O"])) == "NA"

    def test_single_token_span(self):
        assert render_response(rec(["Paris"], ["B-location"])) == "Paris:location"

    def test_reserved_char_in_span_text(self):
        with pytest.raises(ReservedCharError):
            render_response(rec(["a:b"], ["B-x"]))


class TestBuildPrompt:
    def test_one_shot_training_prompt_bytes(self):
        spec = PromptSpec.from_records(
            query=QUERY,
            demonstration_records=[DEMO],
            options=NER_OPTIONS,
            instruction=NER_INSTRUCTION,
            include_query_response=True,
        )
        layout = build_prompt(spec)
        assert layout.text == ONE_SHOT_TRAINING_PROMPT
        assert layout.eos_included

    def test_evaluation_prompt_drops_exactly_query_response(self):
        train = build_prompt(
            PromptSpec.from_records(
                query=QUERY, demonstration_records=[DEMO],
                options=NER_OPTIONS, instruction=NER_INSTRUCTION,
            )
        )
        ev = build_prompt(
            PromptSpec.from_records(
                query=QUERY, demonstration_records=[DEMO],
                options=NER_OPTIONS, instruction=NER_INSTRUCTION,
                include_query_response=False,
            )
        )
        response = "EU:organization;German:miscellaneous;British:miscellaneous"
        assert train.text == ev.text + response + "<eos>"
        assert ev.region("query_response") is None
        assert not ev.eos_included
        qr = train.region("query_response")
        assert train.text[qr.start : qr.end] == response + "<eos>"

    def test_zero_demonstrations_is_standard_sft(self):
        layout = build_prompt(
            PromptSpec(query=QUERY, options=NER_OPTIONS, instruction=NER_INSTRUCTION)
        )
        assert layout.text == (
            "### Instruction:\n" + NER_INSTRUCTION + "\n### Options:\n"
            + "person, location, organization, miscellaneous\n"
            + "### Sentence:\nEU rejects German call to boycott British lamb .\n"
            + "### Response:\nEU:organization;German:miscellaneous;British:miscellaneous<eos>"
        )
        kinds = [r.kind for r in layout.regions]
        assert kinds == ["instruction", "query_example", "query_response"]

    def test_no_instruction_starts_at_first_block(self):
        layout = build_prompt(PromptSpec(query=QUERY, instruction=None))
        assert layout.text.startswith("### Sentence:\n")
        assert layout.region("instruction") is None

    def test_verb_block_between_sentence_and_response(self):
        srl = rec(["he", "ran", "home"], ["B-ARG0", "B-V", "B-ARGM-DIR"], verb_index=1)
        layout = build_prompt(PromptSpec(query=srl, instruction=None, verb_field=True))
        assert "### Sentence:\nhe ran home\n### Verb:\nran\n### Response:\n" in layout.text
        example = layout.region("query_example")
        assert layout.text[example.start : example.end] == "### Sentence:\nhe ran home\n### Verb:\nran"

    def test_verb_field_without_verb_index(self):
        with pytest.raises(SpecError):
            build_prompt(PromptSpec(query=QUERY, instruction=None, verb_field=True))

    def test_reserved_marker_in_user_text(self):
        poisoned = rec(["###", "Response:", "x"], ["O", "O", "O"])
        with pytest.raises(SpecError):
            build_prompt(PromptSpec(query=poisoned, instruction=None))
        with pytest.raises(SpecError):
            build_prompt(PromptSpec(query=QUERY, options=("a",), instruction="say <eos> now"))

    def test_instruction_requires_options(self):
        with pytest.raises(SpecError):
            build_prompt(PromptSpec(query=QUERY, instruction="do the task"))

    def test_regions_disjoint_ordered_and_cover_with_scaffolding(self):
        spec = PromptSpec.from_records(
            query=QUERY, demonstration_records=[DEMO, DEMO],
            options=NER_OPTIONS, instruction=NER_INSTRUCTION,
        )
        layout = build_prompt(spec)
        regions = layout.regions
        assert [r.kind for r in regions] == [
            "instruction",
            "demonstration_0_example", "demonstration_0_response",
            "demonstration_1_example", "demonstration_1_response",
            "query_example", "query_response",
        ]
        for a, b in zip(regions, regions[1:]):
            assert a.end <= b.start
        # everything outside the regions is fixed template scaffolding
        cursor, scaffolding = 0, []
        for r in regions:
            scaffolding.append(layout.text[cursor : r.start])
            cursor = r.end
        scaffolding.append(layout.text[cursor:])
        assert set(scaffolding) <= {"", "\n", "\n### Response:\n"}
        rebuilt = ""
        cursor = 0
        for r in regions:
            rebuilt += layout.text[cursor : r.start] + layout.text[r.start : r.end]
            cursor = r.end
        rebuilt += layout.text[cursor:]
        assert rebuilt == layout.text

    def test_json_round_trip(self):
        layout = build_prompt(
            PromptSpec.from_records(
                query=QUERY, demonstration_records=[DEMO],
                options=NER_OPTIONS, instruction=NER_INSTRUCTION,
            )
        )
        again = PromptLayout.from_json_dict(layout.to_json_dict())
        assert again == layout


def char_tokenize(text: str) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(len(text))]


class TestTokenRegions:
    def test_characters_land_in_their_regions(self):
        layout = build_prompt(
            PromptSpec.from_records(
                query=QUERY, demonstration_records=[DEMO],
                options=NER_OPTIONS, instruction=NER_INSTRUCTION,
            )
        )
        projected = layout.with_token_regions(char_tokenize(layout.text))
        qr = layout.region("query_response")
        kinds = projected.token_regions
        assert all(k == "query_response" for k in kinds[qr.start : qr.end])
        header_start = qr.start - len("\n### Response:\n")
        assert all(k is None for k in kinds[header_start : qr.start])

    def test_pad_tokens_have_no_region(self):
        layout = build_prompt(PromptSpec(query=QUERY, instruction=None))
        offsets = [None, None] + char_tokenize(layout.text)
        projected = layout.with_token_regions(offsets)
        assert projected.token_regions[0] is None
        assert projected.token_regions[1] is None


def toy_layout():
    # six single-char tokens; token 2 is a demonstration response, token 5 the query response
    layout = PromptLayout(
        text="abcdef",
        regions=(
            Region("demonstration_0_response", 2, 3),
            Region("query_response", 5, 6),
        ),
        eos_included=True,
    )
    return layout.with_token_regions(char_tokenize(layout.text))


class TestLoss:
    def test_perfect_prediction_is_zero(self):
        layout = toy_layout()
        lp = TokenLogProbs.unpadded([0.0] * 6)
        for objective in ("vanilla", "src", "mrc"):
            assert loss(layout, lp, objective).value == 0.0

    def test_toy_sum_losses(self):
        layout = toy_layout()
        lp = TokenLogProbs.unpadded([-1, -1, -1, -1, -1, -2])
        assert loss(layout, lp, "src", "sum").value == 2.0
        assert loss(layout, lp, "mrc", "sum").value == 3.0
        assert loss(layout, lp, "vanilla", "sum").value == 7.0

    def test_toy_mean_losses(self):
        layout = toy_layout()
        lp = TokenLogProbs.unpadded([-1, -1, -1, -1, -1, -2])
        assert loss(layout, lp, "src", "mean").value == 2.0
        assert loss(layout, lp, "mrc", "mean").value == 1.5
        assert loss(layout, lp, "vanilla", "mean").value == pytest.approx(7 / 6)

    def test_empty_target_flagged(self):
        layout = build_prompt(
            PromptSpec(query=QUERY, instruction=None, include_query_response=False)
        )
        projected = layout.with_token_regions(char_tokenize(layout.text))
        lp = TokenLogProbs.unpadded([-1.0] * len(layout.text))
        result = loss(projected, lp, "src")
        assert result.value == 0.0
        assert result.empty_target

    def test_positive_logprob_rejected_on_real_tokens(self):
        with pytest.raises(ValueError):
            TokenLogProbs.unpadded([0.5])
        TokenLogProbs(logprobs=(5.0,), pad_mask=(True,))  # pads may carry junk

    def test_alignment_errors(self):
        layout = toy_layout()
        with pytest.raises(Exception):
            loss(layout, TokenLogProbs.unpadded([-1.0] * 3))
        bare = build_prompt(PromptSpec(query=QUERY, instruction=None))
        with pytest.raises(Exception):
            loss(bare, TokenLogProbs.unpadded([-1.0]))

    @staticmethod
    def random_case(rng: random.Random):
        n_demos = rng.randint(0, 3)
        n = rng.randint(1, 6)
        pool = []
        for _ in range(n_demos + 1):
            spans = random_span_set(rng, n, ["A", "B"])
            pool.append(CorpusRecord(tuple(random_tokens(rng, n)), tuple(encode_tags(spans, n))))
        spec = PromptSpec.from_records(
            query=pool[-1],
            demonstration_records=pool[:-1],
            options=("A", "B"),
            instruction=None,
        )
        layout = build_prompt(spec)
        layout = layout.with_token_regions(char_tokenize(layout.text))
        lp = TokenLogProbs.unpadded(
            [-rng.random() * 3 for _ in range(len(layout.text))]
        )
        return n_demos, layout, lp

    def test_nesting_property(self):
        rng = random.Random(77)
        for _ in range(300):
            n_demos, layout, lp = self.random_case(rng)
            src = loss(layout, lp, "src", "sum").value
            mrc = loss(layout, lp, "mrc", "sum").value
            vanilla = loss(layout, lp, "vanilla", "sum").value
            assert 0.0 <= src <= mrc <= vanilla
            if n_demos == 0:
                assert math.isclose(src, mrc, rel_tol=0.0, abs_tol=0.0)

    def test_left_padding_leaves_losses_unchanged(self):
        rng = random.Random(78)
        for _ in range(50):
            _, layout, lp = self.random_case(rng)
            n_pads = rng.randint(1, 4)
            padded_layout = layout.with_token_regions(
                [None] * n_pads + char_tokenize(layout.text)
            )
            padded_lp = TokenLogProbs(
                logprobs=(7.0,) * n_pads + lp.logprobs,
                pad_mask=(True,) * n_pads + lp.pad_mask,
            )
            for objective in ("vanilla", "src", "mrc"):
                for reduction in ("sum", "mean"):
                    assert (
                        loss(layout, lp, objective, reduction)
                        == loss(padded_layout, padded_lp, objective, reduction)
                    )


class TestDemonstrationSampling:
    def test_deterministic_in_seed_and_query(self):
        pool = list(range(50))
        a = sample_demonstrations(pool, 7, 5, seed=1)
        assert a == sample_demonstrations(pool, 7, 5, seed=1)
        assert a != sample_demonstrations(pool, 8, 5, seed=1) or a != sample_demonstrations(pool, 7, 5, seed=2)
        assert 7 not in a

    def test_query_excluded_and_pool_respected(self):
        with pytest.raises(SpecError):
            sample_demonstrations([1, 2], 1, 2, seed=0)
        assert sample_demonstrations([1, 2], 1, 1, seed=0) == [2]
