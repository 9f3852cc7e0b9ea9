"""Byte-level DFA compiler for the response output grammar, with
per-state vocabulary masks for constrained generation.

The grammar accepts ``NA`` (when enabled) or one-or-more ``span:class``
groups joined by ';', where a span is one or more bytes excluding ':',
';', and newline, and the class is one of the configured option names
matched verbatim. Working on bytes keeps the masks composable with
arbitrary subword vocabularies.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GrammarError

# Bytes a span may never contain: ':' and ';' are grammar delimiters and
# newline would break the first-line parsing rule.
_COLON, _SEMI, _NL = 0x3A, 0x3B, 0x0A

DEAD = "dead"

# Downstream sampler defaults; informational only, nothing here enforces them.
DEFAULT_TEMPERATURE = 0.1
DEFAULT_TOP_P = 0.9
DEFAULT_MAX_GENERATED_TOKENS = 200


class WalkResult(enum.Enum):
    ACCEPTING = "accepting"
    LIVE = "live-nonaccepting"
    DEAD = "dead"


@dataclass(frozen=True)
class OutputGrammar:
    """Option names plus whether a bare ``NA`` output is allowed."""

    options: tuple[str, ...]
    allows_na: bool = True

    def __post_init__(self):
        object.__setattr__(self, "options", tuple(self.options))
        if not self.options:
            raise GrammarError("grammar requires at least one class")
        seen = set()
        for name in self.options:
            if not name:
                raise GrammarError("class names must be non-empty")
            if any(ch in name for ch in (":", ";", "\n")):
                raise GrammarError(f"class name {name!r} contains a reserved character")
            if name in seen:
                raise GrammarError(f"duplicate class name {name!r}")
            seen.add(name)


@dataclass(frozen=True)
class VocabMask:
    """Per-token allowed flags for one DFA state, plus whether the
    end-of-sequence pseudo-token may be emitted."""

    allowed: tuple[bool, ...]
    eos_allowed: bool

    def allowed_indices(self) -> list[int]:
        return [i for i, ok in enumerate(self.allowed) if ok]


class Dfa:
    """A deterministic byte automaton with sparse transitions.

    Each state has explicit byte edges plus a default target for all
    other bytes; a missing default means the dead state. Every accepting
    path spells a grammar-valid string.
    """

    def __init__(
        self,
        states: Sequence[str],
        start: str,
        accepting: Iterable[str],
        edges: dict[str, dict[int, str]],
        defaults: dict[str, str],
    ):
        self.states = tuple(states)
        self.start = start
        self.accepting = frozenset(accepting)
        self._edges = {s: dict(e) for s, e in edges.items()}
        self._defaults = dict(defaults)

    def step(self, state: str, byte: int) -> str:
        return self._edges.get(state, {}).get(byte, self._defaults.get(state, DEAD))

    def step_bytes(self, state: str, data: bytes) -> str:
        for byte in data:
            if state == DEAD:
                return DEAD
            state = self.step(state, byte)
        return state

    def walk(self, text: str) -> WalkResult:
        state = self.step_bytes(self.start, text.encode("utf-8"))
        if state in self.accepting:
            return WalkResult.ACCEPTING
        if state == DEAD:
            return WalkResult.DEAD
        return WalkResult.LIVE

    def accepts(self, text: str) -> bool:
        return self.walk(text) is WalkResult.ACCEPTING

    def live_states(self) -> list[str]:
        return [s for s in self.states if s != DEAD]

    def successors(self, state: str) -> set[str]:
        out = set(self._edges.get(state, {}).values())
        out.add(self._defaults.get(state, DEAD))
        return out

    def can_reach_accepting(self, state: str) -> bool:
        seen = {state}
        frontier = [state]
        while frontier:
            current = frontier.pop()
            if current in self.accepting:
                return True
            if current == DEAD:
                continue
            for nxt in self.successors(current):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return False

    def to_json_dict(self) -> dict:
        transitions: dict[str, dict[str, str]] = {}
        for state in self.states:
            table: dict[str, str] = {}
            for byte, target in sorted(self._edges.get(state, {}).items()):
                table[str(byte)] = target
            default = self._defaults.get(state, DEAD)
            table["*"] = default
            transitions[state] = table
        return {
            "states": list(self.states),
            "start": self.start,
            "accepting": sorted(self.accepting),
            "transitions": transitions,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Dfa":
        edges: dict[str, dict[int, str]] = {}
        defaults: dict[str, str] = {}
        for state, table in obj["transitions"].items():
            edges[state] = {int(k): v for k, v in table.items() if k != "*"}
            defaults[state] = table.get("*", DEAD)
        return cls(obj["states"], obj["start"], obj["accepting"], edges, defaults)


def compile_grammar(grammar: OutputGrammar) -> Dfa:
    """Compile the output grammar into a DFA.

    The automaton tracks, simultaneously, span progress and (while still
    possible) the literal ``NA`` alternative; after each ':' it follows a
    trie over the class names, and a ';' at a complete class name opens
    the next span.
    """
    # Trie over the class names' UTF-8 bytes.
    children: list[dict[int, int]] = [{}]
    terminal: list[bool] = [False]
    for name in grammar.options:
        node = 0
        for byte in name.encode("utf-8"):
            if byte not in children[node]:
                children.append({})
                terminal.append(False)
                node_id = len(children) - 1
                children[node][byte] = node_id
            node = children[node][byte]
        terminal[node] = True

    def cls_state(node: int) -> str:
        return f"cls{node}"

    states = ["start", "span", "next", DEAD]
    edges: dict[str, dict[int, str]] = {}
    defaults: dict[str, str] = {}
    accepting: list[str] = []

    span_breaks = {_COLON: DEAD, _SEMI: DEAD, _NL: DEAD}

    # Inside a span: any byte except the delimiters continues the span,
    # ':' hands over to the class trie.
    edges["span"] = dict(span_breaks) | {_COLON: cls_state(0)}
    defaults["span"] = "span"

    edges["start"] = dict(span_breaks)
    defaults["start"] = "span"

    edges["next"] = dict(span_breaks)
    defaults["next"] = "span"

    defaults[DEAD] = DEAD
    edges[DEAD] = {}

    if grammar.allows_na:
        # "NA" overlaps the span alternative byte by byte, so the N/NA
        # prefixes are tracked alongside the span interpretation.
        states += ["na1", "na2"]
        edges["start"][ord("N")] = "na1"
        edges["na1"] = dict(span_breaks) | {_COLON: cls_state(0), ord("A"): "na2"}
        defaults["na1"] = "span"
        edges["na2"] = dict(span_breaks) | {_COLON: cls_state(0)}
        defaults["na2"] = "span"
        accepting.append("na2")

    for node in range(len(children)):
        state = cls_state(node)
        states.append(state)
        edges[state] = {byte: cls_state(child) for byte, child in children[node].items()}
        defaults[state] = DEAD
        if terminal[node]:
            edges[state][_SEMI] = "next"
            accepting.append(state)

    return Dfa(states, "start", accepting, edges, defaults)


def allowed_tokens(dfa: Dfa, state: str, vocab: Sequence[str]) -> VocabMask:
    """Mask a string vocabulary against one DFA state.

    A token is allowed iff consuming its bytes from ``state`` never hits
    the dead state; the end-of-sequence pseudo-token is allowed iff the
    state is accepting.
    """
    allowed = tuple(
        dfa.step_bytes(state, token.encode("utf-8")) != DEAD for token in vocab
    )
    return VocabMask(allowed=allowed, eos_allowed=state in dfa.accepting)
