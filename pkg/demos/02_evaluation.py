"""Strict span-based evaluation on a 12-token sentence: micro vs macro,
span classification (SC) vs span detection (SD)."""

from seqlabkit import LabeledSequence, evaluate

sent = "Paul McCartney performed on the rooftop in United Kingdom with The Beatles".split()
y_true = ["B-PER", "I-PER", "O", "O", "O", "O", "O", "B-LOC", "I-LOC", "O", "B-ORG", "I-ORG"]
y_pred = ["B-PER", "I-PER", "O", "O", "O", "O", "O", "B-LOC", "B-ORG", "O", "B-ORG", "I-LOC"]

refs = [LabeledSequence.from_strings(sent, y_true)]
preds = [LabeledSequence.from_strings(sent, y_pred)]

# Only the PER span matches exactly; LOC and ORG boundaries are off.
report = evaluate(refs, preds, "SC")
print(report.to_table())
print()
print("micro:", report.micro)
print("macro:", report.macro)

# SD ignores classes: only exact boundaries matter.
print()
print("SD report (classes pooled):")
print(evaluate(refs, preds, "SD").to_table())

# Reports serialize for downstream tooling.
print()
print(report.to_json(indent=2))
