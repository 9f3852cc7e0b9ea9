"""Turning raw open-IE triples into silver relation labels: the filter
pipeline drops implicit, gappy, incomplete, over-long, and out-of-order
extractions, then merges overlapping relations by size."""

from seqlabkit import Implicit, Triple, filter_and_merge

sentence = "President Biden right now stands really worried about future economic growth .".split()

# Two extractions an OIE system might produce for this sentence:
implicit = Triple(subject=(1,), relation=Implicit("is"), object=(0,))   # (Biden; is; President)
too_long = Triple(subject=(0, 1), relation=(2, 3, 4, 5, 6, 7), object=(8, 9, 10))

labeling = filter_and_merge(sentence, [implicit, too_long])
print("surviving relations:", labeling.relation_spans)    # both dropped
print("tags:", [t.to_string() for t in labeling.tags()])  # all O, sentence kept

# A clean extraction survives as a relation span.
sentence2 = "The aircraft broke into two parts , but there was no fire .".split()
triple = Triple(subject=(0, 1), relation=(2, 3), object=(4, 5))
labeling2 = filter_and_merge(sentence2, [triple])
print()
print("tokens 2-3:", sentence2[2:4])
print("relation  :", labeling2.relation_spans)
print("tags      :", [t.to_string() for t in labeling2.tags()])

# Overlapping relations: the one with more tokens wins.
small = Triple(subject=(0,), relation=(2, 3), object=(5, 6))
large = Triple(subject=(0,), relation=(2, 3, 4), object=(5, 6))
merged = filter_and_merge(sentence2, [small, large])
print()
print("merge keeps the larger relation:", merged.relation_spans)
