"""Span annotation codecs for the IOB2 and IOB1 tagging schemes.

Spans are half-open ``[start, end)`` token intervals and must be pairwise
non-overlapping within a sequence. Under IOB2 every span starts with a
``B-`` tag; under IOB1 the ``B-`` prefix is used only to separate two
adjacent spans of the same class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

from .errors import (
    LengthMismatchError,
    OutOfBoundsError,
    OverlapError,
    ReservedCharError,
    SchemeViolationError,
)

Scheme = Literal["iob2", "iob1"]
DecodeMode = Literal["strict", "repair", "drop"]

# Reserved by the response grammar, which uses ':' and ';' as delimiters.
RESERVED_LABEL_CHARS = (":", ";")


def _check_label(label: str) -> str:
    if not label:
        raise ReservedCharError("class label must be non-empty")
    for ch in RESERVED_LABEL_CHARS:
        if ch in label:
            raise ReservedCharError(f"class label {label!r} contains reserved character {ch!r}")
    return label


@dataclass(frozen=True)
class Tag:
    """One token-level tag: B-label, I-label, or O.

    ``label`` is None exactly for O tags; B/I labels are non-empty and
    may not contain ':' or ';'.
    """

    kind: Literal["B", "I", "O"]
    label: str | None = None

    def __post_init__(self):
        if self.kind == "O":
            if self.label is not None:
                raise ValueError("O tags carry no label")
        elif self.kind in ("B", "I"):
            if self.label is None:
                raise ValueError(f"{self.kind} tags require a label")
            _check_label(self.label)
        else:
            raise ValueError(f"unknown tag kind {self.kind!r}")

    @classmethod
    def from_string(cls, text: str) -> "Tag":
        """Parse ``"O"``, ``"B-person"``, ``"I-person"`` style strings."""
        if text == "O":
            return cls("O")
        if len(text) >= 3 and text[0] in ("B", "I") and text[1] == "-":
            return cls(text[0], text[2:])  # type: ignore[arg-type]
        raise ValueError(f"malformed tag string {text!r}")

    def to_string(self) -> str:
        if self.kind == "O":
            return "O"
        return f"{self.kind}-{self.label}"

    def __str__(self) -> str:
        return self.to_string()


O_TAG = Tag("O")


@dataclass(frozen=True)
class Span:
    """A labeled half-open token interval ``[start, end)``."""

    label: str
    start: int
    end: int

    def __post_init__(self):
        _check_label(self.label)
        if self.start < 0 or self.end <= self.start:
            raise OutOfBoundsError(f"invalid span boundaries [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def __lt__(self, other: "Span") -> bool:
        return (self.start, self.end, self.label) < (other.start, other.end, other.label)


@dataclass(frozen=True)
class LabeledSequence:
    """Word tokens with one tag per token."""

    tokens: tuple[str, ...]
    tags: tuple[Tag, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        if len(self.tokens) != len(self.tags):
            raise LengthMismatchError(
                f"{len(self.tokens)} tokens vs {len(self.tags)} tags"
            )

    @classmethod
    def from_strings(cls, tokens: Iterable[str], tags: Iterable[str]) -> "LabeledSequence":
        return cls(tuple(tokens), tuple(Tag.from_string(t) for t in tags))

    def __len__(self) -> int:
        return len(self.tokens)


def decode_spans(
    seq: LabeledSequence,
    scheme: Scheme = "iob2",
    mode: DecodeMode = "strict",
) -> list[Span]:
    """Extract maximal labeled spans from a tagged sequence.

    Three treatments of tags that are invalid under ``scheme`` (an orphan
    I-X under IOB2, a non-separating B-X under IOB1):

    * ``strict`` raises :class:`SchemeViolationError` (dataset linting);
    * ``repair`` promotes the tag to a span start (conlleval-style);
    * ``drop`` ignores the offending token entirely, so it joins no span
      (strict-matching evaluation style).

    Repair and drop decoding never fail on a well-shaped tag list.
    """
    return _decode(seq.tags, scheme, mode)


def _decode(tags: tuple[Tag, ...], scheme: Scheme, mode: DecodeMode) -> list[Span]:
    spans: list[Span] = []
    cur_label: str | None = None
    cur_start = 0

    def close(end: int):
        nonlocal cur_label
        if cur_label is not None:
            spans.append(Span(cur_label, cur_start, end))
            cur_label = None

    def open_span(label: str, start: int):
        nonlocal cur_label, cur_start
        cur_label, cur_start = label, start

    for i, tag in enumerate(tags):
        if tag.kind == "O":
            close(i)
        elif tag.kind == "B":
            valid = scheme == "iob2" or cur_label == tag.label
            close(i)
            if valid or mode == "repair":
                open_span(tag.label, i)  # type: ignore[arg-type]
            elif mode == "strict":
                # IOB1 uses B- only to separate two adjacent same-class spans.
                raise SchemeViolationError(i, tag.to_string())
            # drop: token joins no span
        else:  # I
            if cur_label == tag.label:
                continue  # span continues
            valid = scheme == "iob1"
            close(i)
            if valid or mode == "repair":
                # IOB1: I-X legitimately opens a span; IOB2 repair promotes.
                open_span(tag.label, i)  # type: ignore[arg-type]
            elif mode == "strict":
                raise SchemeViolationError(i, tag.to_string())
            # drop: orphan I-X joins no span
    close(len(tags))
    return spans


def encode_tags(spans: Iterable[Span], length: int, scheme: Scheme = "iob2") -> list[Tag]:
    """Encode non-overlapping spans as a tag list of the given length.

    Inverse of :func:`decode_spans` on valid inputs. Raises
    :class:`OutOfBoundsError` for spans outside ``[0, length)`` and
    :class:`OverlapError` for overlapping spans.
    """
    ordered = sorted(spans, key=lambda s: (s.start, s.end))
    tags: list[Tag] = [O_TAG] * length
    prev_end = -1
    prev_label: str | None = None
    for span in ordered:
        if span.end > length:
            raise OutOfBoundsError(f"span [{span.start}, {span.end}) exceeds length {length}")
        if span.start < prev_end:
            raise OverlapError(f"span [{span.start}, {span.end}) overlaps previous span")
        if scheme == "iob2":
            first = Tag("B", span.label)
        else:
            # IOB1: B- only when this span directly abuts a same-class span.
            adjacent_same = prev_end == span.start and prev_label == span.label
            first = Tag("B" if adjacent_same else "I", span.label)
        tags[span.start] = first
        for i in range(span.start + 1, span.end):
            tags[i] = Tag("I", span.label)
        prev_end, prev_label = span.end, span.label
    return tags
