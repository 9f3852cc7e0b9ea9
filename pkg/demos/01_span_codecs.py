"""Walk through the span tagging codecs: IOB2 vs IOB1, and the three ways
of handling malformed tag sequences."""

from seqlabkit import LabeledSequence, Span, decode_spans, encode_tags

# A sentence with two location spans, tagged IOB2.
seq = LabeledSequence.from_strings(
    ["Pag", "island", "is", "in", "Croatia"],
    ["B-location", "I-location", "O", "O", "B-location"],
)
print("tokens:", seq.tokens)
print("spans :", decode_spans(seq))

# Encoding is the inverse: spans in, tags out.
spans = [Span("location", 0, 2), Span("location", 4, 5)]
print("IOB2  :", [t.to_string() for t in encode_tags(spans, 5, "iob2")])

# IOB1 marks a span start with B- only when two same-class spans touch.
adjacent = [Span("X", 0, 1), Span("X", 1, 2)]
print("IOB1 adjacent same class:", [t.to_string() for t in encode_tags(adjacent, 2, "iob1")])
print("IOB2 adjacent same class:", [t.to_string() for t in encode_tags(adjacent, 2, "iob2")])

# Malformed input: an I- tag with no span open behind it.
orphan = LabeledSequence.from_strings(["Paris", "sleeps"], ["I-PER", "O"])
print("repair mode:", decode_spans(orphan, "iob2", "repair"))  # promoted to a span
print("drop mode  :", decode_spans(orphan, "iob2", "drop"))    # ignored
try:
    decode_spans(orphan, "iob2", "strict")
except Exception as exc:
    print("strict mode:", type(exc).__name__, "-", exc)
