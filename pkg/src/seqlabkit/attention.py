"""Causal and layer-group-unmasked attention masks, unmasking
configuration codes, and a reference scaled dot-product attention forward
pass for checking information-flow properties.

The reference pass is single-head with no projections or dropout: the
minimum machinery needed to verify what a mask does and does not let
through. Masks are additive matrices whose blocked entries hold a large
negative sentinel that underflows to exactly zero after the softmax.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import ShapeError

# Additive stand-in for -inf: large enough that softmax underflows to an
# exact 0.0 in float64 after the 1/sqrt(d_k) scaling, small enough to
# avoid inf-inf NaNs in intermediate arithmetic.
MASK_NEG = -1.0e30

MaskKind = Literal["causal", "unmasked"]

# Common open-weight decoder geometry: 32 blocks in 4 groups of 8.
DEFAULT_GROUPS = 4
DEFAULT_BLOCKS_PER_GROUP = 8


def causal_mask(n: int) -> np.ndarray:
    """n-by-n additive mask blocking attention to future positions."""
    if n < 1:
        raise ShapeError("mask size must be >= 1")
    mask = np.zeros((n, n), dtype=np.float64)
    mask[np.triu_indices(n, k=1)] = MASK_NEG
    return mask


def unmasked(n: int) -> np.ndarray:
    """n-by-n all-zero mask: every position may attend everywhere."""
    if n < 1:
        raise ShapeError("mask size must be >= 1")
    return np.zeros((n, n), dtype=np.float64)


@dataclass(frozen=True)
class UnmaskConfig:
    """Per-layer-group bidirectionality flags, input-to-output order.

    ``flags[g]`` True means every block in group g drops its causal mask.
    The code string reads left to right with the first digit for the
    group closest to the model's input.
    """

    flags: tuple[bool, ...]
    blocks_per_group: int = DEFAULT_BLOCKS_PER_GROUP

    def __post_init__(self):
        object.__setattr__(self, "flags", tuple(bool(f) for f in self.flags))
        if not self.flags:
            raise ValueError("at least one layer group is required")
        if self.blocks_per_group < 1:
            raise ValueError("blocks_per_group must be >= 1")

    @property
    def groups(self) -> int:
        return len(self.flags)

    @property
    def n_layers(self) -> int:
        return self.groups * self.blocks_per_group

    @property
    def code(self) -> str:
        return "".join("1" if f else "0" for f in self.flags)

    @classmethod
    def from_code(cls, code: str, blocks_per_group: int = DEFAULT_BLOCKS_PER_GROUP) -> "UnmaskConfig":
        if not code or any(c not in "01" for c in code):
            raise ValueError(f"config code must be a non-empty 0/1 string, got {code!r}")
        return cls(tuple(c == "1" for c in code), blocks_per_group)


def layer_mask(config: UnmaskConfig, layer_index: int) -> MaskKind:
    """Which mask kind a given layer uses under this configuration."""
    if not 0 <= layer_index < config.n_layers:
        raise IndexError(
            f"layer index {layer_index} outside 0..{config.n_layers - 1}"
        )
    group = layer_index // config.blocks_per_group
    return "unmasked" if config.flags[group] else "causal"


def layer_mask_matrix(config: UnmaskConfig, layer_index: int, n: int) -> np.ndarray:
    return unmasked(n) if layer_mask(config, layer_index) == "unmasked" else causal_mask(n)


def enumerate_configs(
    m: int,
    order: Literal["binary", "gray"] = "binary",
    blocks_per_group: int = DEFAULT_BLOCKS_PER_GROUP,
) -> list[UnmaskConfig]:
    """All 2^m configurations over m layer groups.

    ``binary`` counts numerically from all-zeros; ``gray`` walks the
    binary-reflected Gray code starting at all-zeros, so consecutive
    configurations differ in exactly one group.
    """
    if m < 1:
        raise ValueError("need at least one layer group")
    configs = []
    for i in range(2**m):
        value = i ^ (i >> 1) if order == "gray" else i
        code = format(value, f"0{m}b")
        configs.append(UnmaskConfig.from_code(code, blocks_per_group))
    return configs


def attention_weights(q: np.ndarray, k: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Row-stochastic attention weights: softmax((QK^T + mask) / sqrt(d_k))."""
    q = np.asarray(q, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if q.ndim != 2 or k.ndim != 2:
        raise ShapeError("Q and K must be 2-D matrices")
    if q.shape[1] != k.shape[1]:
        raise ShapeError(f"Q columns {q.shape[1]} != K columns {k.shape[1]}")
    if mask.shape != (q.shape[0], k.shape[0]):
        raise ShapeError(f"mask shape {mask.shape} != ({q.shape[0]}, {k.shape[0]})")
    d_k = q.shape[1]
    scores = (q @ k.T + mask) / np.sqrt(d_k)
    scores -= scores.max(axis=1, keepdims=True)  # stable softmax
    weights = np.exp(scores)
    return weights / weights.sum(axis=1, keepdims=True)


def attention(q: np.ndarray, k: np.ndarray, v: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Reference scaled dot-product attention with an additive mask."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] != np.asarray(k).shape[0]:
        raise ShapeError("V must have one row per K row")
    return attention_weights(q, k, mask) @ v


def save_matrix(matrix: np.ndarray, path: str | Path, format: Literal["json", "binary"] = "json") -> None:
    """Write a 2-D float64 matrix as nested JSON arrays or as a binary
    blob: two little-endian uint64 dims, then row-major float64 values."""
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ShapeError("only 2-D matrices are supported")
    if format == "json":
        Path(path).write_text(json.dumps(matrix.tolist()), encoding="utf-8")
    else:
        with open(path, "wb") as fh:
            fh.write(struct.pack("<QQ", *matrix.shape))
            fh.write(matrix.astype("<f8").tobytes())


def load_matrix(path: str | Path, format: Literal["json", "binary"] = "json") -> np.ndarray:
    """Read a matrix written by :func:`save_matrix`."""
    if format == "json":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        matrix = np.asarray(data, dtype=np.float64)
        if matrix.ndim != 2:
            raise ShapeError("JSON payload is not a 2-D matrix")
        return matrix
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise ShapeError("binary matrix file too short for its dims header")
    rows, cols = struct.unpack_from("<QQ", raw)
    expected = 16 + rows * cols * 8
    if len(raw) != expected:
        raise ShapeError(f"binary matrix payload is {len(raw)} bytes, expected {expected}")
    return np.frombuffer(raw, dtype="<f8", offset=16).reshape(rows, cols).copy()


def self_attention_stack(x: np.ndarray, masks: Sequence[np.ndarray]) -> np.ndarray:
    """Apply successive self-attention layers (Q = K = V = current state).

    A minimal multi-layer composition for information-flow checks: with
    causal masks everywhere, position i's output never depends on inputs
    at positions j > i; one unmasked layer anywhere breaks that.
    """
    state = np.asarray(x, dtype=np.float64)
    for mask in masks:
        state = attention(state, state, state, mask)
    return state
