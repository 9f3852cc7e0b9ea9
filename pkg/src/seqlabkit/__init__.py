"""Sequence labeling toolchain: span codecs, strict span evaluation,
corpus metrics, silver-label post-processing, prompt construction with
response-oriented losses, response parsing, constrained-generation
automata, and attention-mask machinery."""

from .attention import (
    MASK_NEG,
    UnmaskConfig,
    attention,
    attention_weights,
    causal_mask,
    enumerate_configs,
    layer_mask,
    layer_mask_matrix,
    load_matrix,
    save_matrix,
    self_attention_stack,
    unmasked,
)
from .corpus import (
    CorpusRecord,
    MixedBatchPlan,
    SubwordAlignment,
    align_subwords,
    plan_mixed_batches,
    rdrr,
    rdrr_counts,
    read_conll,
    read_jsonl,
    write_jsonl,
)
from .errors import (
    AlignmentError,
    ConfigError,
    GrammarError,
    LengthMismatchError,
    NoArcsError,
    OutOfBoundsError,
    OverlapError,
    ParseError,
    ReservedCharError,
    SchemeViolationError,
    SeqLabError,
    ShapeError,
    SpecError,
)
from .evaluation import (
    EvalReport,
    MatchCounts,
    Scores,
    evaluate,
    evaluate_head_word,
    project_head_word,
)
from .grammar import (
    Dfa,
    OutputGrammar,
    VocabMask,
    WalkResult,
    allowed_tokens,
    compile_grammar,
)
from .oie import (
    Implicit,
    RelationLabeling,
    Triple,
    filter_and_merge,
    relation_stats,
)
from .prompts import (
    EOS_MARKER,
    LossResult,
    PromptLayout,
    PromptSpec,
    TokenLogProbs,
    build_prompt,
    loss,
    render_response,
    sample_demonstrations,
)
from .responses import ParsedResponse, map_to_tags, parse_and_map, parse_response
from .tagging import LabeledSequence, Span, Tag, decode_spans, encode_tags

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ConfigError",
    "CorpusRecord",
    "Dfa",
    "EOS_MARKER",
    "EvalReport",
    "GrammarError",
    "Implicit",
    "LabeledSequence",
    "LengthMismatchError",
    "LossResult",
    "MASK_NEG",
    "MatchCounts",
    "MixedBatchPlan",
    "NoArcsError",
    "OutOfBoundsError",
    "OutputGrammar",
    "OverlapError",
    "ParseError",
    "ParsedResponse",
    "PromptLayout",
    "PromptSpec",
    "RelationLabeling",
    "ReservedCharError",
    "SchemeViolationError",
    "Scores",
    "SeqLabError",
    "ShapeError",
    "Span",
    "SpecError",
    "SubwordAlignment",
    "Tag",
    "TokenLogProbs",
    "Triple",
    "UnmaskConfig",
    "VocabMask",
    "WalkResult",
    "align_subwords",
    "allowed_tokens",
    "attention",
    "attention_weights",
    "build_prompt",
    "causal_mask",
    "compile_grammar",
    "decode_spans",
    "encode_tags",
    "enumerate_configs",
    "evaluate",
    "evaluate_head_word",
    "filter_and_merge",
    "layer_mask",
    "layer_mask_matrix",
    "load_matrix",
    "loss",
    "map_to_tags",
    "parse_and_map",
    "parse_response",
    "plan_mixed_batches",
    "project_head_word",
    "rdrr",
    "rdrr_counts",
    "read_conll",
    "read_jsonl",
    "relation_stats",
    "render_response",
    "sample_demonstrations",
    "save_matrix",
    "self_attention_stack",
    "unmasked",
    "write_jsonl",
]
