"""Shared resolution of lexicon/model/channel references.

A reference is either a ``builtin:`` name or a file path. Builtins:
lexicon ``builtin``; models ``builtin:average``; channels
``builtin:mt-lossy`` (reference lossy MT round-trip profile) and
``builtin:all-safe``.
"""

from __future__ import annotations

from .channel import ChannelSpec, all_safe_channel, load_channel, mt_lossy_channel
from .errors import ConfigError
from .lexicon import StrategyLexicon, default_lexicon, load_lexicon
from .perception import PerceptionModel, average_model, load_model


def resolve_lexicon(ref: str | None) -> StrategyLexicon:
    if ref in (None, "", "builtin", "builtin:default"):
        return default_lexicon()
    return load_lexicon(ref)


def resolve_model(ref: str) -> PerceptionModel:
    if ref in ("builtin", "builtin:average"):
        return average_model()
    if isinstance(ref, str) and ref.startswith("builtin:"):
        raise ConfigError(f"unknown builtin model {ref!r}")
    return load_model(ref)


def resolve_channel(ref: str, lex: StrategyLexicon | None = None) -> ChannelSpec:
    if ref == "builtin:mt-lossy":
        return mt_lossy_channel(lex)
    if ref == "builtin:all-safe":
        return all_safe_channel(lex)
    if isinstance(ref, str) and ref.startswith("builtin:"):
        raise ConfigError(f"unknown builtin channel {ref!r}")
    return load_channel(ref)
