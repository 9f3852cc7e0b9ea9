"""Corpus records: JSONL round trips, subword alignment for tokenizers,
the right-side dependency relations ratio, and mixed batch planning."""

import tempfile
from pathlib import Path

from seqlabkit import (
    CorpusRecord,
    MixedBatchPlan,
    Tag,
    align_subwords,
    plan_mixed_batches,
    rdrr,
    read_jsonl,
    write_jsonl,
)

record = CorpusRecord(
    tokens=("McCartney", "performed", "yesterday"),
    tags=(Tag("B", "PER"), Tag("O"), Tag("O")),
    heads=(1, -1, 1),  # token->head indices, -1 is the root
)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "corpus.jsonl"
    write_jsonl([record], path)
    print("on disk   :", path.read_text().strip())
    print("round trip:", read_jsonl(path)[0] == record)

# Subword alignment: "McCartney" splits into three subwords.
alignment, tags, mask = align_subwords(record, [3, 1, 1], "duplicate")
print("duplicate :", [t.to_string() for t in tags], "loss on all subwords:", mask)
alignment, tags, mask = align_subwords(record, [3, 1, 1], "head_only")
print("head-only :", [t.to_string() if t else "-" for t in tags], "loss mask:", mask)

# RDRR: how much do labeled spans lean on right-side context?
# The single span token "McCartney" points right (head index 1 > 0).
print("rdrr      :", rdrr([record]))

# Mixed batches: 27 source + 5 few-shot target examples per batch of 32.
plan = MixedBatchPlan(seed=7)
batches = plan_mixed_batches(
    [f"src{i}" for i in range(54)], ["few0", "few1", "few2"], plan, epochs=1
)
print("batches   :", len(batches), "x", len(batches[0]), "examples")
print("first     :", batches[0][:4], "...", batches[0][-5:])
