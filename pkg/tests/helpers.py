"""Shared fixtures-by-hand: random corpus generators and independent
oracles the implementation is checked against."""

from __future__ import annotations

import random
import re
from collections import Counter

from seqlabkit import LabeledSequence, Span

WORDS = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"]


def random_span_set(rng: random.Random, length: int, labels: list[str]) -> list[Span]:
    """Random non-overlapping spans over [0, length)."""
    spans = []
    i = 0
    while i < length:
        if rng.random() < 0.4:
            width = rng.randint(1, min(3, length - i))
            spans.append(Span(rng.choice(labels), i, i + width))
            i += width
        else:
            i += 1
    return spans


def random_tokens(rng: random.Random, length: int) -> list[str]:
    return [rng.choice(WORDS) for _ in range(length)]


def random_valid_tags(rng: random.Random, length: int, labels: list[str], scheme="iob2") -> list[str]:
    """A scheme-valid tag string list via random spans."""
    from seqlabkit import encode_tags

    spans = random_span_set(rng, length, labels)
    return [t.to_string() for t in encode_tags(spans, length, scheme)]


def random_labeled_sequence(rng: random.Random, max_len: int, labels: list[str]) -> LabeledSequence:
    n = rng.randint(1, max_len)
    tokens = random_tokens(rng, n)
    return LabeledSequence.from_strings(tokens, random_valid_tags(rng, n, labels))


# --- independent evaluation oracle -----------------------------------------

def oracle_extract_spans(tags: list[str]) -> set[tuple[str, int, int]]:
    """Span enumeration for valid IOB2 tag strings, written from scratch."""
    spans = set()
    i, n = 0, len(tags)
    while i < n:
        if tags[i].startswith("B-"):
            label = tags[i][2:]
            j = i + 1
            while j < n and tags[j] == f"I-{label}":
                j += 1
            spans.add((label, i, j))
            i = j
        else:
            i += 1
    return spans


def oracle_report(
    refs: list[list[str]],
    preds: list[list[str]],
    mode: str,
) -> dict:
    """Brute-force counting of exact span matches via set intersections."""
    tp: Counter = Counter()
    n_pred: Counter = Counter()
    n_ref: Counter = Counter()
    for ref_tags, pred_tags in zip(refs, preds):
        ref_spans = oracle_extract_spans(ref_tags)
        pred_spans = oracle_extract_spans(pred_tags)
        if mode == "SD":
            ref_spans = {("span", s, e) for _, s, e in ref_spans}
            pred_spans = {("span", s, e) for _, s, e in pred_spans}
        for cls, _, _ in ref_spans & pred_spans:
            tp[cls] += 1
        for cls, _, _ in pred_spans:
            n_pred[cls] += 1
        for cls, _, _ in ref_spans:
            n_ref[cls] += 1

    def prf(t, p_total, r_total):
        p = t / p_total if p_total else 0.0
        r = t / r_total if r_total else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return p, r, f1

    classes = sorted(set(n_pred) | set(n_ref) | set(tp))
    per_class = {c: prf(tp[c], n_pred[c], n_ref[c]) for c in classes}
    micro = prf(sum(tp.values()), sum(n_pred.values()), sum(n_ref.values()))
    if classes:
        macro = tuple(
            sum(per_class[c][k] for c in classes) / len(classes) for k in range(3)
        )
    else:
        macro = (0.0, 0.0, 0.0)
    return {
        "per_class": per_class,
        "counts": {c: (tp[c], n_pred[c], n_ref[c]) for c in classes},
        "micro": micro,
        "macro": macro,
    }


# --- independent grammar oracle ---------------------------------------------

def backtracking_matcher(options: list[str], allows_na: bool):
    """Reference acceptance test built directly on the re engine."""
    cls = "|".join(re.escape(o) for o in options)
    body = rf"[^:;\n]+:(?:{cls})(?:;[^:;\n]+:(?:{cls}))*"
    pattern = re.compile(rf"(?:NA|{body})" if allows_na else body)

    def accepts(text: str) -> bool:
        return pattern.fullmatch(text) is not None

    return accepts
