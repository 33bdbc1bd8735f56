"""Tokenization and strategy extraction.

Tokenization is lossless: every token records its character span in the raw
text, so rewriting operates by splicing the original string. Sentences are
split on ``. ! ?`` followed by whitespace or end-of-text; segments split
additionally on within-sentence ``, ; : —``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .lexicon import StrategyLexicon

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:['’][A-Za-z0-9]+)*")
_TERMINATORS = {".", "!", "?"}
_SEGMENT_DELIMS = {",", ";", ":", "—"}


@dataclass(frozen=True)
class Token:
    text: str
    lower: str
    start: int
    end: int
    is_word: bool


@dataclass(frozen=True)
class Message:
    """A tokenized message with sentence and segment boundaries.

    ``sentences`` and ``segments`` are half-open token index ranges; every
    token belongs to exactly one of each.
    """

    raw: str
    tokens: tuple[Token, ...]
    sentences: tuple[tuple[int, int], ...]
    segments: tuple[tuple[int, int], ...]

    def sentence_of(self, token_index: int) -> tuple[int, int]:
        for rng in self.sentences:
            if rng[0] <= token_index < rng[1]:
                return rng
        raise IndexError(f"token {token_index} outside any sentence")

    def segment_of(self, token_index: int) -> tuple[int, int]:
        for rng in self.segments:
            if rng[0] <= token_index < rng[1]:
                return rng
        raise IndexError(f"token {token_index} outside any segment")

    def initial_word_index(self, sentence: tuple[int, int]) -> int | None:
        """Index of the first word token of a sentence (skips punctuation)."""
        for i in range(sentence[0], sentence[1]):
            if self.tokens[i].is_word:
                return i
        return None

    def word_tokens(self) -> list[Token]:
        return [t for t in self.tokens if t.is_word]


def tokenize(raw: str) -> Message:
    """Tokenize raw text into words and single-character punctuation tokens."""
    tokens: list[Token] = []
    i, n = 0, len(raw)
    while i < n:
        ch = raw[i]
        if ch.isspace():
            i += 1
            continue
        m = _WORD_RE.match(raw, i)
        if m:
            text = m.group(0)
            tokens.append(Token(text, text.lower(), m.start(), m.end(), True))
            i = m.end()
        else:
            tokens.append(Token(ch, ch.lower(), i, i + 1, False))
            i += 1

    sentences: list[tuple[int, int]] = []
    start = 0
    for idx, tok in enumerate(tokens):
        if tok.text in _TERMINATORS:
            at_end = tok.end >= n or idx == len(tokens) - 1
            followed_by_space = tok.end < n and raw[tok.end].isspace()
            if at_end or followed_by_space:
                sentences.append((start, idx + 1))
                start = idx + 1
    if start < len(tokens):
        sentences.append((start, len(tokens)))

    segments: list[tuple[int, int]] = []
    for s_start, s_end in sentences:
        seg_start = s_start
        for idx in range(s_start, s_end):
            if tokens[idx].text in _SEGMENT_DELIMS:
                segments.append((seg_start, idx + 1))
                seg_start = idx + 1
        if seg_start < s_end:
            segments.append((seg_start, s_end))

    return Message(raw=raw, tokens=tuple(tokens), sentences=tuple(sentences), segments=tuple(segments))


@dataclass(frozen=True)
class Occurrence:
    strategy: str
    start: int  # token index, inclusive
    end: int  # token index, exclusive

    def text(self, m: Message) -> str:
        return m.raw[m.tokens[self.start].start : m.tokens[self.end - 1].end]


@dataclass(frozen=True)
class ExtractionResult:
    strategies: frozenset[str]
    occurrences: tuple[Occurrence, ...]


@dataclass
class _CompiledPattern:
    strategy: str
    tokens: tuple[str, ...]
    anchor: str | None
    order: int  # declaration order, used for equal-length tie-breaking


@lru_cache(maxsize=16)
def _compiled(lex: StrategyLexicon) -> tuple[_CompiledPattern, ...]:
    pats = []
    order = 0
    for strat in lex.strategies:
        for marker in strat.markers:
            pats.append(_CompiledPattern(strat.id, marker.tokens, marker.anchor, order))
            order += 1
    # longest first, then declaration order: makes the left-to-right scan
    # resolve overlaps to the longer marker deterministically
    pats.sort(key=lambda p: (-len(p.tokens), p.order))
    return tuple(pats)


def _anchor_ok(m: Message, pattern: _CompiledPattern, pos: int) -> bool:
    if pattern.anchor is None:
        return True
    sent = m.sentence_of(pos)
    initial = m.initial_word_index(sent)
    if pattern.anchor == "sentence-start":
        return pos == initial
    return pos != initial  # not-sentence-start


def extract_strategies(m: Message, lex: StrategyLexicon) -> ExtractionResult:
    """Left-to-right, longest-match-first marker scan.

    A matched span is consumed, so overlapping candidates resolve to the
    longest marker; among equal lengths the lexicon declaration order wins.
    """
    patterns = _compiled(lex)
    occurrences: list[Occurrence] = []
    lowers = [t.lower for t in m.tokens]
    pos = 0
    n = len(lowers)
    while pos < n:
        matched = None
        for pat in patterns:
            k = len(pat.tokens)
            if pos + k <= n and tuple(lowers[pos : pos + k]) == pat.tokens and _anchor_ok(m, pat, pos):
                matched = (pat, k)
                break
        if matched:
            pat, k = matched
            occurrences.append(Occurrence(pat.strategy, pos, pos + k))
            pos += k
        else:
            pos += 1
    return ExtractionResult(
        strategies=frozenset(o.strategy for o in occurrences),
        occurrences=tuple(occurrences),
    )


def extract_text(raw: str, lex: StrategyLexicon) -> ExtractionResult:
    return extract_strategies(tokenize(raw), lex)


def non_marker_words(m: Message, lex: StrategyLexicon) -> list[str]:
    """Lowercased word tokens not covered by any extracted marker occurrence."""
    covered: set[int] = set()
    for occ in extract_strategies(m, lex).occurrences:
        covered.update(range(occ.start, occ.end))
    return [t.lower for i, t in enumerate(m.tokens) if t.is_word and i not in covered]
