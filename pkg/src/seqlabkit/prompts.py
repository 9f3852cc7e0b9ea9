"""Prompt rendering for instruction-style sequence labeling fine-tuning,
with labeled text regions driving response-oriented loss objectives.

A prompt is assembled from an optional instruction block, zero or more
demonstrations (sentence + gold response), and a query block. Training
prompts carry the query response terminated by the ``<eos>`` marker;
evaluation prompts stop right after the final response header. Character
regions mark the instruction, each demonstration's example and response,
the query example, and the query response; projecting them onto a
tokenization yields the token sets used by the loss objectives.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from typing import Literal, NamedTuple, Sequence

from .corpus import CorpusRecord
from .errors import AlignmentError, ReservedCharError, SpecError
from .tagging import decode_spans

Objective = Literal["vanilla", "src", "mrc"]
Reduction = Literal["sum", "mean"]

EOS_MARKER = "<eos>"

INSTRUCTION_HEADER = "### Instruction:"
OPTIONS_HEADER = "### Options:"
SENTENCE_HEADER = "### Sentence:"
VERB_HEADER = "### Verb:"
RESPONSE_HEADER = "### Response:"

_RESERVED_MARKERS = (
    INSTRUCTION_HEADER,
    OPTIONS_HEADER,
    SENTENCE_HEADER,
    VERB_HEADER,
    RESPONSE_HEADER,
    EOS_MARKER,
)

REGION_INSTRUCTION = "instruction"
REGION_QUERY_EXAMPLE = "query_example"
REGION_QUERY_RESPONSE = "query_response"


def demo_example_region(i: int) -> str:
    return f"demonstration_{i}_example"


def demo_response_region(i: int) -> str:
    return f"demonstration_{i}_response"


def _is_response_region(kind: str) -> bool:
    return kind == REGION_QUERY_RESPONSE or (
        kind.startswith("demonstration_") and kind.endswith("_response")
    )


def render_response(record: CorpusRecord) -> str:
    """Render a record's spans as ``text:class`` pairs joined by ';'.

    Span text is the space-joined tokens of the span; a record without
    spans renders as ``NA``. Raises :class:`ReservedCharError` when a
    span's text contains ':' or ';'.
    """
    spans = decode_spans(record.to_labeled_sequence(), "iob2", "repair")
    if not spans:
        return "NA"
    parts = []
    for span in spans:
        text = " ".join(record.tokens[span.start : span.end])
        if ":" in text or ";" in text:
            raise ReservedCharError(f"span text {text!r} contains a reserved character")
        parts.append(f"{text}:{span.label}")
    return ";".join(parts)


@dataclass(frozen=True)
class PromptSpec:
    """What goes into one prompt.

    ``demonstrations`` are (record, rendered response) pairs;
    ``include_query_response`` distinguishes training from evaluation
    prompts; ``verb_field`` inserts a verb block between sentence and
    response for predicate-conditioned tasks.
    """

    query: CorpusRecord
    options: tuple[str, ...] = ()
    instruction: str | None = None
    demonstrations: tuple[tuple[CorpusRecord, str], ...] = ()
    include_query_response: bool = True
    verb_field: bool = False

    @classmethod
    def from_records(
        cls,
        query: CorpusRecord,
        demonstration_records: Sequence[CorpusRecord] = (),
        **kwargs,
    ) -> "PromptSpec":
        demos = tuple((rec, render_response(rec)) for rec in demonstration_records)
        return cls(query=query, demonstrations=demos, **kwargs)


class Region(NamedTuple):
    kind: str
    start: int
    end: int


@dataclass(frozen=True)
class PromptLayout:
    """Rendered prompt text plus the labeled character intervals.

    Regions are disjoint and ordered; the text between them is fixed
    template scaffolding (headers and separators). ``token_regions`` is
    set by :meth:`with_token_regions` once a tokenization is known.
    """

    text: str
    regions: tuple[Region, ...]
    eos_included: bool
    token_regions: tuple[str | None, ...] | None = field(default=None, compare=False)

    def region(self, kind: str) -> Region | None:
        for r in self.regions:
            if r.kind == kind:
                return r
        return None

    def with_token_regions(
        self, token_offsets: Sequence[tuple[int, int] | None]
    ) -> "PromptLayout":
        """Project character regions onto tokens.

        ``token_offsets[i]`` is the character span of token i in
        :attr:`text`, or None for padding/special tokens. A token belongs
        to a region iff its span overlaps the region's interval.
        """
        kinds: list[str | None] = []
        for offsets in token_offsets:
            kind = None
            if offsets is not None:
                t_start, t_end = offsets
                for r in self.regions:
                    if t_start < r.end and t_end > r.start:
                        kind = r.kind
                        break
            kinds.append(kind)
        return replace(self, token_regions=tuple(kinds))

    def to_json_dict(self) -> dict:
        return {
            "text": self.text,
            "regions": [{"kind": r.kind, "start": r.start, "end": r.end} for r in self.regions],
            "eos_included": self.eos_included,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PromptLayout":
        return cls(
            text=obj["text"],
            regions=tuple(Region(r["kind"], r["start"], r["end"]) for r in obj["regions"]),
            eos_included=bool(obj.get("eos_included", False)),
        )

    def to_json_line(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, separators=(",", ":"))


def _check_user_text(text: str, what: str) -> str:
    for marker in _RESERVED_MARKERS:
        if marker in text:
            raise SpecError(f"{what} contains reserved template marker {marker!r}")
    return text


def _sentence_text(record: CorpusRecord) -> str:
    return " ".join(record.tokens)


def build_prompt(spec: PromptSpec) -> PromptLayout:
    """Render a prompt and record its region intervals.

    Template, with blocks joined by single newlines::

        ### Instruction:\\n{instruction}\\n### Options:\\n{options}
        ### Sentence:\\n{text}[\\n### Verb:\\n{verb}]\\n### Response:\\n{response}
        ...
        ### Sentence:\\n{query}[\\n### Verb:\\n{verb}]\\n### Response:\\n{response}<eos>

    The instruction block spans from its header through the options; each
    example region spans from its sentence header through the sentence
    (and verb) text; response regions cover only the response payload, so
    the response header itself stays outside every loss region. Training
    prompts (``include_query_response``) end with the query response and
    the ``<eos>`` marker, which belongs to the query-response region;
    evaluation prompts end right after ``### Response:\\n``.
    """
    pieces: list[str] = []
    regions: list[Region] = []
    pos = 0

    def emit(text: str):
        nonlocal pos
        pieces.append(text)
        pos += len(text)

    def emit_region(kind: str, text: str):
        nonlocal pos
        regions.append(Region(kind, pos, pos + len(text)))
        emit(text)

    if spec.instruction is not None:
        if not spec.options:
            raise SpecError("an instruction block requires options")
        _check_user_text(spec.instruction, "instruction")
        for option in spec.options:
            _check_user_text(option, "option")
        block = (
            f"{INSTRUCTION_HEADER}\n{spec.instruction}\n"
            f"{OPTIONS_HEADER}\n{', '.join(spec.options)}"
        )
        emit_region(REGION_INSTRUCTION, block)
        emit("\n")

    def example_block(record: CorpusRecord) -> str:
        sentence = _check_user_text(_sentence_text(record), "sentence")
        block = f"{SENTENCE_HEADER}\n{sentence}"
        if spec.verb_field:
            if record.verb_index is None:
                raise SpecError("verb_field requires records with verb_index")
            verb = _check_user_text(record.tokens[record.verb_index], "verb")
            block += f"\n{VERB_HEADER}\n{verb}"
        return block

    for i, (record, response) in enumerate(spec.demonstrations):
        _check_user_text(response, f"demonstration {i} response")
        emit_region(demo_example_region(i), example_block(record))
        emit(f"\n{RESPONSE_HEADER}\n")
        emit_region(demo_response_region(i), response)
        emit("\n")

    emit_region(REGION_QUERY_EXAMPLE, example_block(spec.query))
    emit(f"\n{RESPONSE_HEADER}\n")
    if spec.include_query_response:
        response = render_response(spec.query)
        emit_region(REGION_QUERY_RESPONSE, response + EOS_MARKER)

    return PromptLayout(
        text="".join(pieces),
        regions=tuple(regions),
        eos_included=spec.include_query_response,
    )


@dataclass(frozen=True)
class TokenLogProbs:
    """Realized per-token log-probabilities aligned with a prompt
    tokenization; ``pad_mask`` flags (left-)padding positions, which never
    carry loss."""

    logprobs: tuple[float, ...]
    pad_mask: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "logprobs", tuple(float(x) for x in self.logprobs))
        object.__setattr__(self, "pad_mask", tuple(bool(x) for x in self.pad_mask))
        if len(self.logprobs) != len(self.pad_mask):
            raise AlignmentError(
                f"{len(self.logprobs)} log-probs vs {len(self.pad_mask)} pad flags"
            )
        for lp, pad in zip(self.logprobs, self.pad_mask):
            if not pad and lp > 0:
                raise ValueError(f"log-probability {lp} > 0")

    @classmethod
    def unpadded(cls, logprobs: Sequence[float]) -> "TokenLogProbs":
        return cls(tuple(logprobs), tuple(False for _ in logprobs))


class LossResult(NamedTuple):
    value: float
    # True when no token was selected by the objective (loss is 0 by convention).
    empty_target: bool


def loss(
    layout: PromptLayout,
    logprobs: TokenLogProbs,
    objective: Objective = "vanilla",
    reduction: Reduction = "sum",
) -> LossResult:
    """Compute the negative log-likelihood under a response-oriented objective.

    ``vanilla`` covers every non-pad token; ``src`` only the query
    response; ``mrc`` the query response plus all demonstration responses.
    Mean reduction divides by the number of selected tokens. The layout
    must carry token regions (see
    :meth:`PromptLayout.with_token_regions`) aligned with ``logprobs``.
    """
    if layout.token_regions is None:
        raise AlignmentError("layout has no token regions; call with_token_regions first")
    if len(layout.token_regions) != len(logprobs.logprobs):
        raise AlignmentError(
            f"{len(layout.token_regions)} token regions vs {len(logprobs.logprobs)} log-probs"
        )
    total = 0.0
    selected = 0
    for kind, lp, pad in zip(layout.token_regions, logprobs.logprobs, logprobs.pad_mask):
        if pad:
            continue
        if objective == "vanilla":
            chosen = True
        elif objective == "src":
            chosen = kind == REGION_QUERY_RESPONSE
        else:
            chosen = kind is not None and _is_response_region(kind)
        if chosen:
            total += -lp
            selected += 1
    if selected == 0:
        return LossResult(0.0, True)
    if reduction == "mean":
        return LossResult(total / selected, False)
    return LossResult(total, False)


def sample_demonstrations(
    pool_ids: Sequence,
    query_id,
    k: int,
    seed: int,
) -> list:
    """Pick k demonstration ids deterministically from (seed, query id).

    The query's own id is excluded from the pool. Sampling is without
    replacement; asking for more demonstrations than the pool holds is an
    error.
    """
    candidates = [i for i in pool_ids if i != query_id]
    if k > len(candidates):
        raise SpecError(f"cannot sample {k} demonstrations from a pool of {len(candidates)}")
    rng = random.Random(f"{seed}:{query_id}")
    return rng.sample(candidates, k)
