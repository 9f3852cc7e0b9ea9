"""Post-processing of raw subject-relation-object triple extractions into
silver relation labels for sequence labeling.

The filtering pipeline drops implicit, non-consecutive, incomplete,
over-long, and out-of-order extractions, merges overlapping relations by
token count, and keeps only the relation spans. A sentence whose
extractions are all filtered out is kept as an all-O example.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import CorpusRecord
from .errors import OutOfBoundsError, ParseError
from .tagging import Span, Tag, encode_tags

RELATION_LABEL = "Relation"

# A relation longer than this many tokens is considered noise and dropped.
MAX_RELATION_TOKENS = 5


@dataclass(frozen=True)
class Implicit:
    """A triple part whose text was injected by the extractor and is not
    present in the sentence (e.g. a copula)."""

    text: str


TriplePart = tuple[int, ...] | Implicit | None


def _as_part(value) -> TriplePart:
    if value is None:
        return None
    if isinstance(value, Implicit):
        return value
    part = tuple(value)
    if any(b <= a for a, b in zip(part, part[1:])):
        raise ValueError(f"token indices must be strictly ascending: {list(part)}")
    return part


@dataclass(frozen=True)
class Triple:
    """A raw extraction; each part is a token-index tuple, an
    :class:`Implicit` marker, or None when missing."""

    subject: TriplePart
    relation: TriplePart
    object: TriplePart

    def __post_init__(self):
        object.__setattr__(self, "subject", _as_part(self.subject))
        object.__setattr__(self, "relation", _as_part(self.relation))
        object.__setattr__(self, "object", _as_part(self.object))

    @property
    def parts(self) -> tuple[TriplePart, TriplePart, TriplePart]:
        return self.subject, self.relation, self.object

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Triple":
        def parse(value) -> TriplePart:
            if value is None:
                return None
            if isinstance(value, dict):
                if "implicit" not in value:
                    raise ValueError(f"triple part object must carry 'implicit': {value}")
                return Implicit(str(value["implicit"]))
            return tuple(value)

        return cls(parse(obj.get("subject")), parse(obj.get("relation")), parse(obj.get("object")))


@dataclass(frozen=True)
class RelationLabeling:
    """A sentence with its surviving relation spans (possibly none)."""

    tokens: tuple[str, ...]
    relation_spans: tuple[Span, ...]

    def tags(self) -> list[Tag]:
        return encode_tags(self.relation_spans, len(self.tokens), "iob2")

    def to_record(self) -> CorpusRecord:
        return CorpusRecord(self.tokens, tuple(self.tags()))


def _is_consecutive(part: tuple[int, ...]) -> bool:
    return all(b == a + 1 for a, b in zip(part, part[1:]))


def filter_and_merge(
    sentence_tokens: Sequence[str],
    triples: Iterable[Triple],
) -> RelationLabeling:
    """Run the full filtering/merging pipeline over one sentence's triples.

    Stages, in order: drop triples with an implicit part; drop triples
    with a non-consecutive part; drop incomplete triples; drop relations
    longer than MAX_RELATION_TOKENS; drop triples whose parts are not in
    subject < relation < object sentence order. Surviving relations that
    share no tokens are all kept; among relations sharing tokens only the
    one with the most tokens survives (ties: earliest start, then smallest
    index list). Duplicates collapse. Subjects and objects are discarded.
    """
    n = len(sentence_tokens)
    survivors: list[tuple[int, ...]] = []
    for triple in triples:
        for part in triple.parts:
            if isinstance(part, tuple):
                for idx in part:
                    if not 0 <= idx < n:
                        raise OutOfBoundsError(f"token index {idx} outside sentence of {n} tokens")
        if any(isinstance(p, Implicit) for p in triple.parts):
            continue
        if any(isinstance(p, tuple) and not _is_consecutive(p) for p in triple.parts):
            continue
        if any(p is None or p == () for p in triple.parts):
            continue
        subject, relation, object_ = triple.parts
        assert isinstance(subject, tuple) and isinstance(relation, tuple) and isinstance(object_, tuple)
        if len(relation) > MAX_RELATION_TOKENS:
            continue
        if not (subject[-1] < relation[0] and relation[-1] < object_[0]):
            continue
        survivors.append(relation)

    # Greedy merge over the overlap graph: larger relations win, ties by
    # earliest start then lexicographically smallest index list.
    survivors.sort(key=lambda rel: (-len(rel), rel[0], rel))
    kept: list[tuple[int, ...]] = []
    claimed: set[int] = set()
    for rel in survivors:
        if claimed.isdisjoint(rel):
            kept.append(rel)
            claimed.update(rel)

    spans = sorted(Span(RELATION_LABEL, rel[0], rel[-1] + 1) for rel in kept)
    return RelationLabeling(tuple(sentence_tokens), tuple(spans))


def relation_stats(labelings: Iterable[RelationLabeling]) -> tuple[int, int]:
    """Return (total sentences, sentences with at least one relation)."""
    total = with_relations = 0
    for labeling in labelings:
        total += 1
        if labeling.relation_spans:
            with_relations += 1
    return total, with_relations


def read_triples_jsonl(path: str | Path) -> list[tuple[list[str], list[Triple]]]:
    """Read ``{"tokens": [...], "triples": [...]}`` lines."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
            try:
                tokens = list(obj["tokens"])
                triples = [Triple.from_json_dict(t) for t in obj.get("triples", [])]
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(line_no, str(exc)) from exc
            out.append((tokens, triples))
    return out
