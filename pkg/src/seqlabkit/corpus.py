"""Corpus record ingestion, subword alignment, the right-side dependency
relations ratio, and mixed source/target batch planning.

The canonical interchange format is JSONL with one record per line:
``{"tokens": [...], "tags": [...], "heads": [...]?, "deprels": [...]?,
"verb_index": int?}``. Unknown fields round-trip verbatim. CoNLL-style
column files are supported as an ingestion convenience.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Literal, Sequence

from .errors import (
    AlignmentError,
    ConfigError,
    LengthMismatchError,
    NoArcsError,
    ParseError,
)
from .tagging import LabeledSequence, Span, Tag, decode_spans

AlignMode = Literal["duplicate", "head_only"]

_KNOWN_FIELDS = ("tokens", "tags", "heads", "deprels", "verb_index")


@dataclass(frozen=True)
class CorpusRecord:
    """One sentence with tags and optional dependency/predicate annotations.

    ``heads[i]`` is the token index of token i's dependency head, -1 for
    the root. ``verb_index`` marks the governing predicate for records of
    predicate-conditioned tasks.
    """

    tokens: tuple[str, ...]
    tags: tuple[Tag, ...]
    heads: tuple[int, ...] | None = None
    deprels: tuple[str, ...] | None = None
    verb_index: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        n = len(self.tokens)
        if len(self.tags) != n:
            raise LengthMismatchError(f"{n} tokens vs {len(self.tags)} tags")
        if self.heads is not None:
            object.__setattr__(self, "heads", tuple(self.heads))
            if len(self.heads) != n:
                raise LengthMismatchError(f"{n} tokens vs {len(self.heads)} heads")
            for i, h in enumerate(self.heads):
                if h == i or h < -1 or h >= n:
                    raise ValueError(f"head index {h} invalid for token {i} of {n}")
        if self.deprels is not None:
            object.__setattr__(self, "deprels", tuple(self.deprels))
            if len(self.deprels) != n:
                raise LengthMismatchError(f"{n} tokens vs {len(self.deprels)} deprels")
        if self.verb_index is not None and not (0 <= self.verb_index < n):
            raise ValueError(f"verb_index {self.verb_index} out of range")

    def to_labeled_sequence(self) -> LabeledSequence:
        return LabeledSequence(self.tokens, self.tags)

    def spans(self, mode: Literal["strict", "repair"] = "repair") -> list[Span]:
        return decode_spans(self.to_labeled_sequence(), "iob2", mode)

    def to_json_dict(self) -> dict:
        out: dict = {"tokens": list(self.tokens), "tags": [t.to_string() for t in self.tags]}
        if self.heads is not None:
            out["heads"] = list(self.heads)
        if self.deprels is not None:
            out["deprels"] = list(self.deprels)
        if self.verb_index is not None:
            out["verb_index"] = self.verb_index
        for key, value in self.extra.items():
            if key not in _KNOWN_FIELDS:
                out[key] = value
        return out

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CorpusRecord":
        if not isinstance(obj, dict):
            raise ValueError("record must be a JSON object")
        if "tokens" not in obj or "tags" not in obj:
            raise ValueError("record requires 'tokens' and 'tags'")
        extra = {k: v for k, v in obj.items() if k not in _KNOWN_FIELDS}
        return cls(
            tokens=tuple(obj["tokens"]),
            tags=tuple(Tag.from_string(t) for t in obj["tags"]),
            heads=tuple(obj["heads"]) if obj.get("heads") is not None else None,
            deprels=tuple(obj["deprels"]) if obj.get("deprels") is not None else None,
            verb_index=obj.get("verb_index"),
            extra=extra,
        )


def read_jsonl(path: str | Path) -> list[CorpusRecord]:
    """Read one record per line; raises :class:`ParseError` with the line number."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
            try:
                records.append(CorpusRecord.from_json_dict(obj))
            except (ValueError, LengthMismatchError) as exc:
                raise ParseError(line_no, str(exc)) from exc
    return records


def write_jsonl(records: Iterable[CorpusRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_json_line(record))
            fh.write("\n")


def record_to_json_line(record: CorpusRecord) -> str:
    # Compact separators keep the round trip byte-stable for compact inputs.
    return json.dumps(record.to_json_dict(), ensure_ascii=False, separators=(",", ":"))


def read_conll(path: str | Path, column_map: dict[str, int]) -> list[CorpusRecord]:
    """Read a whitespace-separated column file with blank-line sentence breaks.

    ``column_map`` maps the fields ``token`` and ``tag`` (required) and
    ``head``/``deprel`` (optional) to 0-based column indices. Lines whose
    first column is ``-DOCSTART-`` are skipped.
    """
    if "token" not in column_map or "tag" not in column_map:
        raise ValueError("column_map requires 'token' and 'tag' columns")
    n_cols = max(column_map.values()) + 1
    records: list[CorpusRecord] = []
    rows: list[tuple[int, list[str]]] = []

    def flush(line_no: int):
        if not rows:
            return
        tokens = [cols[column_map["token"]] for _, cols in rows]
        try:
            tags = tuple(Tag.from_string(cols[column_map["tag"]]) for _, cols in rows)
            heads = None
            if "head" in column_map:
                heads = tuple(int(cols[column_map["head"]]) for _, cols in rows)
            deprels = None
            if "deprel" in column_map:
                deprels = tuple(cols[column_map["deprel"]] for _, cols in rows)
            records.append(CorpusRecord(tuple(tokens), tags, heads=heads, deprels=deprels))
        except (ValueError, LengthMismatchError) as exc:
            raise ParseError(line_no, str(exc)) from exc
        rows.clear()

    with open(path, encoding="utf-8") as fh:
        line_no = 0
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                flush(line_no)
                continue
            cols = stripped.split()
            if cols[0] == "-DOCSTART-":
                continue
            if len(cols) < n_cols:
                raise ParseError(line_no, f"expected at least {n_cols} columns, got {len(cols)}")
            rows.append((line_no, cols))
        flush(line_no)
    return records


@dataclass(frozen=True)
class SubwordAlignment:
    """Mapping between a word sequence and its subword tokenization.

    ``head_flag[j]`` is True exactly when subword ``j`` is the first
    subword of its word. ``subword_tokens`` carries the actual subword
    strings when the caller supplied them, else None.
    """

    word_of_subword: tuple[int, ...]
    head_flag: tuple[bool, ...]
    subword_tokens: tuple[str, ...] | None = None

    @property
    def n_words(self) -> int:
        return self.word_of_subword[-1] + 1 if self.word_of_subword else 0

    def word_subwords(self) -> list[list[int]]:
        """Per-word list of subword indices, for head-word evaluation."""
        out: list[list[int]] = [[] for _ in range(self.n_words)]
        for j, w in enumerate(self.word_of_subword):
            out[w].append(j)
        return out


def align_subwords(
    record: CorpusRecord,
    subword_spans: Sequence[int] | Sequence[Sequence[str]],
    mode: AlignMode = "duplicate",
) -> tuple[SubwordAlignment, list[Tag | None], list[bool]]:
    """Spread word-level tags over a subword tokenization.

    ``subword_spans`` gives, per word, either the subword count or the
    subword strings themselves. Two modes:

    * ``duplicate``: a B-X word tag becomes B-X I-X ... over the word's
      subwords; I-X and O repeat unchanged; every subword carries loss.
    * ``head_only``: the first subword gets the word tag, the rest get
      None with ``loss_mask`` False.

    Returns ``(alignment, subword_tags, loss_mask)``.
    """
    if len(subword_spans) != len(record.tokens):
        raise AlignmentError(
            f"{len(record.tokens)} words vs {len(subword_spans)} subword spans"
        )
    counts: list[int] = []
    strings: list[str] | None = [] if subword_spans and not isinstance(subword_spans[0], int) else None
    for w, entry in enumerate(subword_spans):
        if isinstance(entry, int):
            count = entry
        else:
            count = len(entry)
            if strings is not None:
                strings.extend(entry)
        if count <= 0:
            raise AlignmentError(f"word {w} has no subwords")
        counts.append(count)

    word_of_subword: list[int] = []
    head_flag: list[bool] = []
    subword_tags: list[Tag | None] = []
    loss_mask: list[bool] = []
    for w, (count, tag) in enumerate(zip(counts, record.tags)):
        for k in range(count):
            word_of_subword.append(w)
            head_flag.append(k == 0)
            if mode == "duplicate":
                if k == 0:
                    subword_tags.append(tag)
                elif tag.kind == "B":
                    subword_tags.append(Tag("I", tag.label))
                else:
                    subword_tags.append(tag)
                loss_mask.append(True)
            else:
                subword_tags.append(tag if k == 0 else None)
                loss_mask.append(k == 0)
    alignment = SubwordAlignment(
        word_of_subword=tuple(word_of_subword),
        head_flag=tuple(head_flag),
        subword_tokens=tuple(strings) if strings is not None else None,
    )
    return alignment, subword_tags, loss_mask


def rdrr_counts(records: Iterable[CorpusRecord]) -> tuple[int, int]:
    """Count (right, left) dependency arcs for tokens inside labeled spans.

    For each token in a labeled span, the arc to its head is right-side
    when the head index is larger than the token index, left-side when
    smaller. Root arcs (head -1) have no orientation and are skipped.
    """
    right = left = 0
    for record in records:
        if record.heads is None:
            raise ValueError("record has no dependency heads")
        for span in record.spans():
            for i in range(span.start, span.end):
                h = record.heads[i]
                if h == -1:
                    continue
                if h > i:
                    right += 1
                else:
                    left += 1
    return right, left


def rdrr(records: Iterable[CorpusRecord]) -> float:
    """Ratio of right-side arcs among all oriented arcs of labeled-span tokens."""
    right, left = rdrr_counts(list(records))
    if right + left == 0:
        raise NoArcsError("no labeled-span token has a non-root head")
    return right / (right + left)


@dataclass(frozen=True)
class MixedBatchPlan:
    """Batch composition: ``batch_size == source_per_batch + target_per_batch``."""

    batch_size: int = 32
    source_per_batch: int = 27
    target_per_batch: int = 5
    seed: int = 1337

    def __post_init__(self):
        if self.source_per_batch < 0 or self.target_per_batch < 0:
            raise ConfigError("per-batch counts must be non-negative")
        if self.batch_size != self.source_per_batch + self.target_per_batch:
            raise ConfigError(
                f"batch_size {self.batch_size} != "
                f"{self.source_per_batch} + {self.target_per_batch}"
            )


def plan_mixed_batches(
    source_ids: Sequence,
    target_ids: Sequence,
    plan: MixedBatchPlan,
    epochs: int = 1,
) -> list[list]:
    """Lay out mixed batches of n source plus m few-shot target examples.

    Source ids are shuffled once per epoch and consumed without
    replacement in chunks of n (a trailing partial chunk is dropped).
    Target ids are drawn fresh from the fixed pool for every batch,
    without replacement within a batch while the pool allows it, with
    replacement otherwise. Deterministic given (plan.seed, inputs).
    """
    n, m = plan.source_per_batch, plan.target_per_batch
    if n > 0 and not source_ids:
        raise ConfigError("source pool is empty but source_per_batch > 0")
    if m > 0 and not target_ids:
        raise ConfigError("target pool is empty but target_per_batch > 0")
    rng = random.Random(plan.seed)
    target_pool = list(target_ids)
    batches: list[list] = []
    for _ in range(epochs):
        order = list(source_ids)
        rng.shuffle(order)
        if n > 0:
            chunks: Iterator[list] = (
                order[i : i + n] for i in range(0, len(order) - n + 1, n)
            )
        else:
            chunks = iter([[]])
        for chunk in chunks:
            if m == 0:
                targets: list = []
            elif m <= len(target_pool):
                targets = rng.sample(target_pool, m)
            else:
                targets = rng.choices(target_pool, k=m)
            batches.append(chunk + targets)
    return batches
