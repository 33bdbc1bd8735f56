"""Strategy universe: marker lexicons, delete modes and insertion templates.

The built-in lexicon ships 18 politeness strategies. Marker matching is
case-insensitive over lowercased token n-grams; a marker may carry a
positional anchor (``sentence-start`` / ``not-sentence-start``) so that the
same token can bind to different strategies depending on position, e.g.
sentence-initial "please" vs. mid-sentence "please".

A token written as ``[i]`` inside a marker is optional: the pattern is
expanded into one variant with and one without that token.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable

from .errors import LexiconError

MARKER_ANCHORS = ("sentence-start", "not-sentence-start")
TEMPLATE_ANCHORS = (
    "message-start",
    "message-end",
    "sentence-start",
    "sentence-end",
    "before-main-verb",
)


class DeleteMode(str, Enum):
    TOKEN = "token"
    SEGMENT = "segment"


@dataclass(frozen=True)
class MarkerPattern:
    """A contiguous lowercased token n-gram, optionally position-anchored."""

    tokens: tuple[str, ...]
    anchor: str | None = None  # None, "sentence-start" or "not-sentence-start"

    def __post_init__(self):
        if not self.tokens or any(not t for t in self.tokens):
            raise LexiconError("marker patterns need at least one non-empty token")
        if self.anchor is not None and self.anchor not in MARKER_ANCHORS:
            raise LexiconError(f"unknown marker anchor {self.anchor!r}")


@dataclass(frozen=True)
class InsertionTemplate:
    """Text to splice into a message at a named anchor position.

    ``requires="non-initial"`` marks templates whose first word must not end
    up sentence-initial (used where position decides marker binding).
    """

    anchor: str
    text: str
    requires: str | None = None

    def __post_init__(self):
        if self.anchor not in TEMPLATE_ANCHORS:
            raise LexiconError(f"unknown template anchor {self.anchor!r}")
        if not self.text.strip():
            raise LexiconError("template text must be non-empty")
        if self.requires not in (None, "non-initial"):
            raise LexiconError(f"unknown template requirement {self.requires!r}")


@dataclass(frozen=True)
class Strategy:
    id: str
    markers: tuple[MarkerPattern, ...]
    delete_mode: DeleteMode
    templates: tuple[InsertionTemplate, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise LexiconError("strategy id must be non-empty")
        if not self.markers:
            raise LexiconError(f"strategy {self.id!r} has no markers")


@dataclass(frozen=True)
class StrategyLexicon:
    """Immutable strategy universe; declaration order is significant.

    Declaration order defines the canonical strategy ordering used for
    deterministic tie-breaking throughout the planner.
    """

    strategies: tuple[Strategy, ...]
    version: str = "unversioned"
    _by_id: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if not self.strategies:
            raise LexiconError("a lexicon must contain at least one strategy")
        by_id = {}
        for s in self.strategies:
            if s.id in by_id:
                raise LexiconError(f"duplicate strategy id {s.id!r}")
            by_id[s.id] = s
        object.__setattr__(self, "_by_id", by_id)

    def __contains__(self, strategy_id: str) -> bool:
        return strategy_id in self._by_id

    def __getitem__(self, strategy_id: str) -> Strategy:
        try:
            return self._by_id[strategy_id]
        except KeyError:
            raise LexiconError(f"no such strategy {strategy_id!r}") from None

    def __len__(self) -> int:
        return len(self.strategies)

    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.strategies)

    def index_of(self, strategy_id: str) -> int:
        for i, s in enumerate(self.strategies):
            if s.id == strategy_id:
                return i
        raise LexiconError(f"no such strategy {strategy_id!r}")

    def sort_ids(self, ids: Iterable[str]) -> list[str]:
        """Return the given ids in declaration order."""
        order = {s.id: i for i, s in enumerate(self.strategies)}
        return sorted(ids, key=lambda x: order[x])


def _expand_optional_tokens(tokens: list[str]) -> list[tuple[str, ...]]:
    # "[i] apologize" denotes an optional leading token; expand into both
    # variants so matching stays plain n-gram lookup.
    variants: list[list[str]] = [[]]
    for tok in tokens:
        if tok.startswith("[") and tok.endswith("]") and len(tok) > 2:
            bare = tok[1:-1]
            variants = [v + [bare] for v in variants] + [list(v) for v in variants]
        else:
            variants = [v + [tok] for v in variants]
    out = []
    for v in variants:
        if v and tuple(v) not in out:
            out.append(tuple(v))
    return out


_ALLOWED_STRATEGY_KEYS = {"id", "markers", "delete_mode", "templates"}
_ALLOWED_MARKER_KEYS = {"tokens", "anchor"}
_ALLOWED_TEMPLATE_KEYS = {"anchor", "text", "requires"}


def _build_marker(raw: dict) -> list[MarkerPattern]:
    unknown = set(raw) - _ALLOWED_MARKER_KEYS
    if unknown:
        raise LexiconError(f"unknown marker fields: {sorted(unknown)}")
    tokens = raw.get("tokens")
    if not isinstance(tokens, list) or not tokens:
        raise LexiconError("marker 'tokens' must be a non-empty list")
    anchor = raw.get("anchor")
    expanded = _expand_optional_tokens([str(t).lower() for t in tokens])
    if not expanded:
        raise LexiconError(f"marker {tokens!r} expands to nothing")
    return [MarkerPattern(tokens=v, anchor=anchor) for v in expanded]


def _build_strategy(raw: dict) -> Strategy:
    if not isinstance(raw, dict):
        raise LexiconError("each strategy must be an object")
    unknown = set(raw) - _ALLOWED_STRATEGY_KEYS
    if unknown:
        raise LexiconError(f"unknown strategy fields: {sorted(unknown)}")
    try:
        mode = DeleteMode(raw.get("delete_mode"))
    except ValueError:
        raise LexiconError(
            f"strategy {raw.get('id')!r}: unknown delete_mode {raw.get('delete_mode')!r}"
        ) from None
    markers: list[MarkerPattern] = []
    for m in raw.get("markers", []):
        markers.extend(_build_marker(m))
    templates = []
    for t in raw.get("templates", []):
        unknown = set(t) - _ALLOWED_TEMPLATE_KEYS
        if unknown:
            raise LexiconError(f"unknown template fields: {sorted(unknown)}")
        templates.append(
            InsertionTemplate(
                anchor=t.get("anchor"), text=t.get("text", ""), requires=t.get("requires")
            )
        )
    return Strategy(
        id=str(raw.get("id") or ""),
        markers=tuple(markers),
        delete_mode=mode,
        templates=tuple(templates),
    )


def lexicon_from_dict(doc: dict) -> StrategyLexicon:
    if not isinstance(doc, dict):
        raise LexiconError("lexicon document must be an object")
    unknown = set(doc) - {"version", "strategies"}
    if unknown:
        raise LexiconError(f"unknown lexicon fields: {sorted(unknown)}")
    raw_strategies = doc.get("strategies")
    if not isinstance(raw_strategies, list):
        raise LexiconError("'strategies' must be a list")
    strategies = tuple(_build_strategy(s) for s in raw_strategies)
    return StrategyLexicon(strategies=strategies, version=str(doc.get("version", "unversioned")))


def lexicon_to_dict(lex: StrategyLexicon) -> dict:
    def marker_dict(m: MarkerPattern) -> dict:
        d = {"tokens": list(m.tokens)}
        if m.anchor:
            d["anchor"] = m.anchor
        return d

    def template_dict(t: InsertionTemplate) -> dict:
        d = {"anchor": t.anchor, "text": t.text}
        if t.requires:
            d["requires"] = t.requires
        return d

    return {
        "version": lex.version,
        "strategies": [
            {
                "id": s.id,
                "delete_mode": s.delete_mode.value,
                "markers": [marker_dict(m) for m in s.markers],
                "templates": [template_dict(t) for t in s.templates],
            }
            for s in lex.strategies
        ],
    }


def load_lexicon(path) -> StrategyLexicon:
    """Load and validate a lexicon from a UTF-8 JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise LexiconError(f"malformed lexicon file {path}: {exc}") from exc
    return lexicon_from_dict(doc)


def save_lexicon(lex: StrategyLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lexicon_to_dict(lex), fh, indent=2, sort_keys=True)
        fh.write("\n")


_DEFAULT: StrategyLexicon | None = None


def default_lexicon() -> StrategyLexicon:
    """The built-in 18-strategy lexicon (cached; lexicons are immutable)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("politeplan.data").joinpath("default_lexicon.json").read_text("utf-8")
        _DEFAULT = lexicon_from_dict(json.loads(text))
    return _DEFAULT
