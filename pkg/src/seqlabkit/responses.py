"""Parsing of generated model responses and greedy mapping of extracted
spans back onto input tokens as IOB2 tags.

Only the first line of a generated answer counts. A response is either
``NA`` or ``span:class`` pairs joined by ';' with every class drawn from
the task's option set. Anything else is invalid and is treated downstream
as an all-O prediction; parsing never raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import CorpusRecord
from .errors import ParseError
from .tagging import O_TAG, Tag


@dataclass(frozen=True)
class ParsedResponse:
    """Outcome of parsing one generated response line.

    ``valid`` is False when the line did not match the output grammar; in
    that case ``extractions`` is empty and downstream mapping yields all-O.
    """

    extractions: tuple[tuple[str, str], ...]  # (span_text, class_name) in response order
    is_na: bool = False
    valid: bool = True

    def __post_init__(self):
        if self.is_na and self.extractions:
            raise ValueError("an NA response carries no extractions")


INVALID_RESPONSE = ParsedResponse(extractions=(), is_na=False, valid=False)


def parse_response(raw_output: str, options: Iterable[str]) -> ParsedResponse:
    """Parse arbitrary model text against the output grammar.

    Truncates at the first newline. Returns a flagged-invalid result (never
    raises) when the grammar or the option set is violated.
    """
    option_set = set(options)
    line = raw_output.split("\n", 1)[0]
    if line == "NA":
        return ParsedResponse(extractions=(), is_na=True)
    if not line:
        return INVALID_RESPONSE
    extractions: list[tuple[str, str]] = []
    for chunk in line.split(";"):
        head, sep, cls = chunk.rpartition(":")
        if not sep or not head or ":" in head or cls not in option_set:
            return INVALID_RESPONSE
        extractions.append((head, cls))
    return ParsedResponse(extractions=tuple(extractions))


def map_to_tags(parsed: ParsedResponse, tokens: Sequence[str]) -> list[Tag]:
    """Greedily match extractions onto tokens left to right.

    For each extraction, in response order, the earliest unclaimed
    contiguous token run whose space-joined text equals the
    whitespace-normalized span text is claimed and tagged B-/I-class.
    Unmatched extractions are dropped; invalid or NA parses give all-O.
    The output is always valid strict IOB2.
    """
    tags: list[Tag] = [O_TAG] * len(tokens)
    if not parsed.valid or parsed.is_na:
        return tags
    claimed = [False] * len(tokens)
    for span_text, cls in parsed.extractions:
        target = span_text.split()
        k = len(target)
        if k == 0 or k > len(tokens):
            continue
        for start in range(len(tokens) - k + 1):
            if any(claimed[start : start + k]):
                continue
            if list(tokens[start : start + k]) != target:
                continue
            tags[start] = Tag("B", cls)
            for i in range(start + 1, start + k):
                tags[i] = Tag("I", cls)
            for i in range(start, start + k):
                claimed[i] = True
            break
    return tags


def parse_and_map(raw_output: str, tokens: Sequence[str], options: Iterable[str]) -> list[Tag]:
    """Convenience composition of :func:`parse_response` and :func:`map_to_tags`."""
    return map_to_tags(parse_response(raw_output, options), tokens)


def read_responses_jsonl(
    path: str | Path,
    default_options: Sequence[str] | None = None,
) -> list[tuple[list[str], str, list[str]]]:
    """Read ``{"tokens": [...], "response": "...", "options": [...]?}`` lines.

    Lines without their own option set fall back to ``default_options``.
    """
    rows = []
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
                response = str(obj["response"])
                options = obj.get("options", default_options)
            except (KeyError, TypeError) as exc:
                raise ParseError(line_no, str(exc)) from exc
            if options is None:
                raise ParseError(line_no, "no 'options' in line and no default options given")
            rows.append((tokens, response, list(options)))
    return rows


def mapped_records(rows: Iterable[tuple[list[str], str, list[str]]]) -> list[CorpusRecord]:
    """Map parsed response rows to corpus records with predicted tags."""
    return [
        CorpusRecord(tuple(tokens), tuple(parse_and_map(response, tokens, options)))
        for tokens, response, options in rows
    ]
