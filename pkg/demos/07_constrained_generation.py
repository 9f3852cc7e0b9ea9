"""Compile the output grammar to a byte DFA and use per-state vocabulary
masks to keep a toy sampler inside the grammar."""

import random

from seqlabkit import OutputGrammar, allowed_tokens, compile_grammar

grammar = OutputGrammar(("person", "location"), allows_na=True)
dfa = compile_grammar(grammar)

print("walk('NA')           ->", dfa.walk("NA").value)
print("walk('a:person')     ->", dfa.walk("a:person").value)
print("walk('a:person;')    ->", dfa.walk("a:person;").value)  # awaiting next span
print("walk('a;;')          ->", dfa.walk("a;;").value)

# A subword-ish vocabulary; the mask says what may come next.
vocab = ["NA", "Paris", "Mc", "Cart", "ney", " ", ":", ";", "person", "location"]
mask = allowed_tokens(dfa, dfa.start, vocab)
print()
print("allowed at start     :", [t for t, ok in zip(vocab, mask.allowed) if ok])

state = dfa.step_bytes(dfa.start, b"Paris")
mask = allowed_tokens(dfa, state, vocab)
print("allowed after 'Paris':", [t for t, ok in zip(vocab, mask.allowed) if ok])

# Greedy constrained sampling: pick any allowed token until eos is legal.
rng = random.Random(4)
state, pieces = dfa.start, []
while True:
    mask = allowed_tokens(dfa, state, vocab)
    if mask.eos_allowed and rng.random() < 0.4:
        break
    choices = [t for t, ok in zip(vocab, mask.allowed) if ok]
    token = rng.choice(choices)
    pieces.append(token)
    state = dfa.step_bytes(state, token.encode())
generated = "".join(pieces)
print()
print("constrained sample   :", repr(generated))
print("grammar-valid        :", dfa.accepts(generated))

# The DFA exports as a JSON transition table for external samplers.
print()
print("export keys          :", sorted(dfa.to_json_dict().keys()))
