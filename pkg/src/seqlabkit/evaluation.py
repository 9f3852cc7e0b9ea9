"""Strict span-based evaluation: micro and macro precision/recall/F1.

A predicted span counts as a true positive only when its boundaries match
a reference span exactly (span detection, SD) or when boundaries and class
both match (span classification, SC). Correctly predicted O tokens never
contribute to any count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Literal, NamedTuple, Sequence

from .errors import AlignmentError, LengthMismatchError
from .tagging import DecodeMode, LabeledSequence, Scheme, Span, Tag, decode_spans

EvalMode = Literal["SD", "SC"]

# Pseudo-class under which all spans are pooled in SD mode (classes are ignored).
SD_CLASS = "span"


class Scores(NamedTuple):
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MatchCounts:
    """Exact-match counts for one class: TP, number of predicted spans, number of reference spans."""

    true_positive: int = 0
    predicted_total: int = 0
    reference_total: int = 0

    def __add__(self, other: "MatchCounts") -> "MatchCounts":
        return MatchCounts(
            self.true_positive + other.true_positive,
            self.predicted_total + other.predicted_total,
            self.reference_total + other.reference_total,
        )

    def scores(self) -> Scores:
        return _scores(self.true_positive, self.predicted_total, self.reference_total)


def _scores(tp: int, n_pred: int, n_ref: int) -> Scores:
    # 0/0 -> 0 by convention, including F1 when P + R == 0.
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_ref if n_ref else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return Scores(p, r, f1)


@dataclass(frozen=True)
class EvalReport:
    """Per-class and aggregate scores for one evaluation run."""

    mode: EvalMode
    per_class: dict[str, MatchCounts]

    @property
    def micro(self) -> Scores:
        total = MatchCounts()
        for counts in self.per_class.values():
            total = total + counts
        return total.scores()

    @property
    def macro(self) -> Scores:
        if not self.per_class:
            return Scores(0.0, 0.0, 0.0)
        # Sorted class order makes the float sum independent of counting order.
        per = [self.per_class[c].scores() for c in sorted(self.per_class)]
        n = len(per)
        return Scores(
            sum(s.precision for s in per) / n,
            sum(s.recall for s in per) / n,
            sum(s.f1 for s in per) / n,
        )

    def class_scores(self, cls: str) -> Scores:
        return self.per_class[cls].scores()

    def to_dict(self) -> dict:
        per_class = {}
        for cls in sorted(self.per_class):
            counts = self.per_class[cls]
            s = counts.scores()
            per_class[cls] = {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "true_positive": counts.true_positive,
                "predicted_total": counts.predicted_total,
                "reference_total": counts.reference_total,
            }
        micro, macro = self.micro, self.macro
        return {
            "mode": self.mode,
            "per_class": per_class,
            "micro": {"precision": micro.precision, "recall": micro.recall, "f1": micro.f1},
            "macro": {"precision": macro.precision, "recall": macro.recall, "f1": macro.f1},
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def to_table(self) -> str:
        """Fixed-width text table with one row per class plus micro/macro rows."""
        width = max([len(c) for c in self.per_class] + [5]) + 2
        header = f"{'class':<{width}}{'prec':>8}{'rec':>8}{'f1':>8}{'tp':>6}{'pred':>6}{'ref':>6}"
        lines = [header, "-" * len(header)]
        for cls in sorted(self.per_class):
            counts = self.per_class[cls]
            s = counts.scores()
            lines.append(
                f"{cls:<{width}}{s.precision:>8.4f}{s.recall:>8.4f}{s.f1:>8.4f}"
                f"{counts.true_positive:>6}{counts.predicted_total:>6}{counts.reference_total:>6}"
            )
        lines.append("-" * len(header))
        micro = self.micro
        total = MatchCounts()
        for counts in self.per_class.values():
            total = total + counts
        lines.append(
            f"{'micro':<{width}}{micro.precision:>8.4f}{micro.recall:>8.4f}{micro.f1:>8.4f}"
            f"{total.true_positive:>6}{total.predicted_total:>6}{total.reference_total:>6}"
        )
        macro = self.macro
        lines.append(f"{'macro':<{width}}{macro.precision:>8.4f}{macro.recall:>8.4f}{macro.f1:>8.4f}")
        return "\n".join(lines)


def _span_keys(spans: Iterable[Span], mode: EvalMode) -> set[tuple[str, int, int]]:
    # Spans in one sequence are non-overlapping, so (start, end) is unique
    # per sequence and set intersection counts exact matches correctly.
    if mode == "SD":
        return {(SD_CLASS, s.start, s.end) for s in spans}
    return {(s.label, s.start, s.end) for s in spans}


def evaluate(
    refs: Sequence[LabeledSequence],
    preds: Sequence[LabeledSequence],
    mode: EvalMode = "SC",
    scheme: Scheme = "iob2",
    decode: DecodeMode = "drop",
) -> EvalReport:
    """Score predictions against references with strict span matching.

    Malformed tag sequences never fail the evaluation: by default both
    sides are decoded in drop mode, where a scheme-violating tag (orphan
    I-X) joins no span at all, so it can neither match nor inflate the
    predicted-span count. Pass ``decode="repair"`` for conlleval-style
    promotion instead. SD mode pools all spans under the single
    pseudo-class ``"span"``.
    """
    if len(refs) != len(preds):
        raise LengthMismatchError(
            f"{len(refs)} reference vs {len(preds)} predicted sequences"
        )
    per_class: dict[str, MatchCounts] = {}

    def bump(cls: str, tp: int = 0, pred: int = 0, ref: int = 0):
        got = per_class.get(cls, MatchCounts())
        per_class[cls] = got + MatchCounts(tp, pred, ref)

    for i, (ref, pred) in enumerate(zip(refs, preds)):
        if len(ref) != len(pred):
            raise LengthMismatchError(
                f"sequence {i}: {len(ref)} reference vs {len(pred)} predicted tokens",
                index=i,
            )
        ref_keys = _span_keys(decode_spans(ref, scheme, decode), mode)
        pred_keys = _span_keys(decode_spans(pred, scheme, decode), mode)
        for cls, _, _ in ref_keys & pred_keys:
            bump(cls, tp=1)
        for cls, _, _ in pred_keys:
            bump(cls, pred=1)
        for cls, _, _ in ref_keys:
            bump(cls, ref=1)
    return EvalReport(mode=mode, per_class=per_class)


def project_head_word(
    subword_tags: Sequence[Tag],
    word_subwords: Sequence[Sequence[int]],
) -> list[Tag]:
    """Project subword-level tags to word level via each word's first subword."""
    projected: list[Tag] = []
    for w, subwords in enumerate(word_subwords):
        if not subwords:
            raise AlignmentError(f"word {w} has no subwords")
        head = subwords[0]
        if head < 0 or head >= len(subword_tags):
            raise AlignmentError(f"word {w}: head subword index {head} out of range")
        projected.append(subword_tags[head])
    return projected


def evaluate_head_word(
    refs: Sequence[LabeledSequence],
    preds_on_subwords: Sequence[Sequence[Tag]],
    word_to_head_subword: Sequence[Sequence[Sequence[int]]],
    mode: EvalMode = "SC",
    scheme: Scheme = "iob2",
    decode: DecodeMode = "drop",
) -> EvalReport:
    """Evaluate subword-level predictions at word level.

    ``word_to_head_subword[i][w]`` lists the subword indices of word ``w``
    in sequence ``i``; the prediction at each word's first subword becomes
    the word-level prediction, which is then scored with :func:`evaluate`.
    """
    if not (len(refs) == len(preds_on_subwords) == len(word_to_head_subword)):
        raise LengthMismatchError("refs, predictions, and alignments differ in length")
    projected = []
    for ref, sub_tags, word_subwords in zip(refs, preds_on_subwords, word_to_head_subword):
        word_tags = project_head_word(sub_tags, word_subwords)
        if len(word_tags) != len(ref):
            raise AlignmentError(
                f"projected {len(word_tags)} word tags for {len(ref)} reference tokens"
            )
        projected.append(LabeledSequence(ref.tokens, tuple(word_tags)))
    return evaluate(refs, projected, mode, scheme, decode)
