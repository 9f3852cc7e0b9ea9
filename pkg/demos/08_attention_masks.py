"""Causal masks, layer-group unmasking codes, and what information can
reach position 0 through a stack of self-attention layers."""

import numpy as np

from seqlabkit import (
    UnmaskConfig,
    attention_weights,
    causal_mask,
    enumerate_configs,
    layer_mask,
    layer_mask_matrix,
    self_attention_stack,
    unmasked,
)

print("causal mask, n=4 (blocked entries shown as -inf):")
mask = causal_mask(4)
print(np.where(mask < 0, -np.inf, 0.0))

# Rows are stochastic; blocked positions get exactly zero weight.
rng = np.random.default_rng(0)
q, k = rng.normal(size=(4, 8)), rng.normal(size=(4, 8))
weights = attention_weights(q, k, causal_mask(4))
print()
print("row sums:", weights.sum(axis=1))
print("upper triangle is exactly zero:", bool((weights[np.triu_indices(4, 1)] == 0).all()))

# Unmasking configurations: one digit per layer group, input to output.
config = UnmaskConfig.from_code("0110", blocks_per_group=8)
print()
print("config 0110 over 32 layers:")
print("  layer  0:", layer_mask(config, 0))
print("  layer 12:", layer_mask(config, 12))
print("  layer 31:", layer_mask(config, 31))

print()
print("all 16 four-group configs in Gray order (adjacent codes differ once):")
print(" ".join(c.code for c in enumerate_configs(4, "gray")))

# Information flow: with causal masks everywhere, position 0 never sees
# position n-1; one unmasked layer anywhere changes that.
x = rng.normal(size=(6, 8))
bumped = x.copy()
bumped[5] += 1.0

causal_stack = [causal_mask(6)] * 4
delta = np.abs(
    self_attention_stack(bumped, causal_stack)[0] - self_attention_stack(x, causal_stack)[0]
).max()
print()
print(f"all-causal stack, |change at position 0| = {delta:.2e}")

mixed = [causal_mask(6), unmasked(6), causal_mask(6), causal_mask(6)]
delta = np.abs(
    self_attention_stack(bumped, mixed)[0] - self_attention_stack(x, mixed)[0]
).max()
print(f"one unmasked layer, |change at position 0| = {delta:.2e}")

two_group = UnmaskConfig.from_code("01", blocks_per_group=2)
masks = [layer_mask_matrix(two_group, i, 6) for i in range(two_group.n_layers)]
print("config 01 (b=2) layer kinds:", [layer_mask(two_group, i) for i in range(4)])
