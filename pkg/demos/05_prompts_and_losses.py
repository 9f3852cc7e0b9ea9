"""Prompt construction with labeled regions, and the three
response-oriented loss objectives computed from per-token log-probs."""

from seqlabkit import (
    CorpusRecord,
    PromptSpec,
    Tag,
    TokenLogProbs,
    build_prompt,
    loss,
    render_response,
    sample_demonstrations,
)


def rec(tokens, tags):
    return CorpusRecord(tuple(tokens), tuple(Tag.from_string(t) for t in tags))


demo = rec(["LOS", "ANGELES", "AT", "MONTREAL"],
           ["B-organization", "I-organization", "O", "B-location"])
query = rec(["EU", "rejects", "German", "call", "to", "boycott", "British", "lamb", "."],
            ["B-organization", "O", "B-miscellaneous", "O", "O", "O", "B-miscellaneous", "O", "O"])

print("rendered response:", render_response(demo))

instruction = (
    "extract named entities and their type from the input sentence, "
    "all entity types are in options\n"
    "if there are no named entities in the sentence the output should just be 'NA'\n"
    "if there are multiple extractions from the sentence, the extraction format "
    "should be entity_1_span:entity_1_class;entity_2_span:entity_2_class;..."
)
spec = PromptSpec.from_records(
    query=query,
    demonstration_records=[demo],
    options=("person", "location", "organization", "miscellaneous"),
    instruction=instruction,
)
layout = build_prompt(spec)
print()
print(layout.text)
print()
for region in layout.regions:
    print(f"{region.kind:28s} chars [{region.start:4d}, {region.end:4d})")

# Treat each character as one token to keep the demo tokenizer-free; a real
# consumer supplies its tokenizer's character offsets instead.
offsets = [(i, i + 1) for i in range(len(layout.text))]
layout = layout.with_token_regions(offsets)
logprobs = TokenLogProbs.unpadded([-0.5] * len(layout.text))

print()
for objective in ("vanilla", "src", "mrc"):
    total = loss(layout, logprobs, objective, "sum")
    mean = loss(layout, logprobs, objective, "mean")
    print(f"{objective:8s} sum={total.value:8.2f} mean={mean.value:.3f}")

# Demonstrations are sampled deterministically per (seed, query).
pool = list(range(100))
print()
print("demos for query 17:", sample_demonstrations(pool, 17, 5, seed=1337))
print("same call again   :", sample_demonstrations(pool, 17, 5, seed=1337))
