"""Turning plans into text: marker deletion and template insertion.

Deletion has two modes per strategy: token mode removes just the marker
tokens, segment mode removes the whole punctuation-delimited segment around
them (with a token-mode fallback when the segment also carries a marker of a
kept strategy). Deletion always runs to a fixpoint so no removed strategy
can resurface through newly adjacent tokens.

Insertion splices fixed templates at anchor positions and keeps only sound
candidates: splicing must not destroy any existing strategy occurrence, and
must realize exactly the requested strategy.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .channel import simulate_channel
from .errors import LexiconError, NoApplicableTemplateError
from .extraction import (
    ExtractionResult,
    Message,
    Occurrence,
    extract_strategies,
    tokenize,
)
from .lexicon import DeleteMode, InsertionTemplate, StrategyLexicon
from .perception import perceive

_AUX = {
    "can", "could", "would", "will", "shall", "should", "may", "might", "must",
    "do", "does", "did", "is", "are", "am", "was", "were", "have", "has", "had",
}
_PRONOUNS = {
    "i", "you", "we", "they", "he", "she", "it", "one",
    "someone", "anyone", "somebody", "anybody", "u",
}
_TERMINAL = {".", "!", "?"}


def _cleanup(text: str) -> str:
    text = re.sub(r"\s{2,}", " ", text).strip()
    # orphaned segment delimiters left at a sentence start
    text = re.sub(r"(^|[.!?]\s)(?:[,;:—]\s*)+", r"\1", text)
    # stacked delimiters after a deletion in the middle
    text = re.sub(r"([,;:—])(?:\s+[,;:—])+", r"\1", text)
    return text.strip()


@dataclass(frozen=True)
class PostDeletionContext:
    message: Message
    removed: tuple[tuple[str, str], ...]  # (strategy, removed text)


def _delete_pass(
    m: Message, ex: ExtractionResult, keep: frozenset[str], lex: StrategyLexicon
) -> tuple[str, list[tuple[str, str]]]:
    doomed = [o for o in ex.occurrences if o.strategy not in keep]
    if not doomed:
        return m.raw, []
    kept_tokens: set[int] = set()
    for occ in ex.occurrences:
        if occ.strategy in keep:
            kept_tokens.update(range(occ.start, occ.end))

    delete_tokens: set[int] = set()
    removed: list[tuple[str, str]] = []
    for occ in doomed:
        mode = lex[occ.strategy].delete_mode
        if mode is DeleteMode.SEGMENT:
            seg = m.segment_of(occ.start)
            if any(i in kept_tokens for i in range(seg[0], seg[1])):
                span = (occ.start, occ.end)  # protect the kept marker's segment
            else:
                span = seg
        else:
            span = (occ.start, occ.end)
        removed.append((occ.strategy, occ.text(m)))
        delete_tokens.update(range(span[0], span[1]))

    # contiguous token runs -> character spans, swallowing adjacent whitespace
    runs: list[tuple[int, int]] = []
    for i in sorted(delete_tokens):
        if runs and i == runs[-1][1]:
            runs[-1] = (runs[-1][0], i + 1)
        else:
            runs.append((i, i + 1))
    raw = m.raw
    spans = []
    for a, bb in runs:
        start, end = m.tokens[a].start, m.tokens[bb - 1].end
        while end < len(raw) and raw[end] in " \t":
            end += 1
        if end == len(raw) or end == m.tokens[bb - 1].end:
            while start > 0 and raw[start - 1] in " \t":
                start -= 1
        spans.append((start, end))
    for start, end in reversed(spans):
        raw = raw[:start] + raw[end:]
    return _cleanup(raw), removed


def delete_markers(
    m: Message, ex: ExtractionResult, keep, lex: StrategyLexicon
) -> PostDeletionContext:
    """Remove every occurrence of every strategy outside ``keep``."""
    keep = frozenset(keep)
    unknown = [s for s in keep if s not in lex]
    if unknown:
        raise LexiconError(f"keep set names unknown strategies: {sorted(unknown)}")
    removed_all: list[tuple[str, str]] = []
    raw, removed = _delete_pass(m, ex, keep, lex)
    removed_all.extend(removed)
    cur = tokenize(raw)
    # deletions can occasionally splice new marker occurrences together;
    # iterate until no non-kept strategy remains
    for _ in range(len(m.tokens) + 1):
        ex2 = extract_strategies(cur, lex)
        if all(o.strategy in keep for o in ex2.occurrences):
            break
        raw, removed = _delete_pass(cur, ex2, keep, lex)
        removed_all.extend(removed)
        cur = tokenize(raw)
    return PostDeletionContext(message=cur, removed=tuple(removed_all))


def delete_to_keep_set(m: Message, keep, lex: StrategyLexicon) -> Message:
    ex = extract_strategies(m, lex)
    return delete_markers(m, ex, keep, lex).message


# --- insertion ---------------------------------------------------------------


def _main_verb_token(m: Message, sent: tuple[int, int]) -> int:
    """Heuristic insertion point: after an aux+pronoun group or a leading
    pronoun subject, else the sentence start."""
    toks = m.tokens
    words = [i for i in range(sent[0], sent[1]) if toks[i].is_word]
    if not words:
        return sent[0]
    for pos, i in enumerate(words):
        if toks[i].lower in _AUX:
            if pos + 1 < len(words) and toks[words[pos + 1]].lower in _PRONOUNS:
                nxt = words[pos + 1] + 1
                return nxt
            return i
    if toks[words[0]].lower in _PRONOUNS and len(words) > 1:
        return words[0] + 1
    return words[0]


def _candidate_positions(m: Message, template: InsertionTemplate) -> list[int]:
    """Character offsets where this template may be spliced, in priority order."""
    raw = m.raw
    anchor = template.anchor
    if anchor == "message-start":
        return [0]
    if anchor == "message-end":
        return [len(raw)]
    if not m.sentences:
        return [0]
    positions = []
    if anchor == "sentence-start":
        for sent in m.sentences:
            positions.append(m.tokens[sent[0]].start)
    elif anchor == "sentence-end":
        for sent in m.sentences:
            end = sent[1]
            while end > sent[0] and m.tokens[end - 1].text in _TERMINAL:
                end -= 1
            if end == sent[0]:
                continue
            positions.append(m.tokens[end - 1].end)
    elif anchor == "before-main-verb":
        for sent in m.sentences:
            idx = _main_verb_token(m, sent)
            if idx >= sent[1]:
                positions.append(m.tokens[sent[1] - 1].end)
            else:
                positions.append(m.tokens[idx].start)
    return positions


def _splice(raw: str, offset: int, text: str, anchor: str) -> str:
    if not raw.strip():
        return _cleanup(text)
    if anchor == "message-end":
        base = raw.rstrip()
        if base and base[-1] not in _TERMINAL and base[-1] not in ",;:—":
            return _cleanup(base + " . " + text)
        return _cleanup(base + " " + text)
    if anchor == "sentence-end":
        return _cleanup(raw[:offset] + " " + text + raw[offset:])
    return _cleanup(raw[:offset] + text + " " + raw[offset:])


def apply_template(
    m: Message, template: InsertionTemplate, lex: StrategyLexicon
) -> Message | None:
    """Splice one template at its first legal position; None if no position fits."""
    for offset in _candidate_positions(m, template):
        candidate = tokenize(_splice(m.raw, offset, template.text, template.anchor))
        if template.requires == "non-initial" and _first_word_initial(candidate, template, offset):
            continue
        return candidate
    return None


def _first_word_initial(candidate: Message, template: InsertionTemplate, offset: int) -> bool:
    # locate the first inserted word token and test sentence-initial position
    first_word = template.text.split()[0].lower()
    for i, tok in enumerate(candidate.tokens):
        if tok.lower == first_word and tok.start >= offset:
            sent = candidate.sentence_of(i)
            return candidate.initial_word_index(sent) == i
    return False


@dataclass(frozen=True)
class InsertionStep:
    strategy: str
    template_text: str
    anchor: str
    offset: int


def insert_strategy(
    ctx: Message, strategy_id: str, lex: StrategyLexicon, beam: int = 3, exact: bool = False
) -> list[Message]:
    """Sound insertion candidates for one strategy, in template priority order.

    A candidate is sound when splicing preserved every previously extracted
    strategy and realized the new one; ``exact=True`` additionally rejects
    candidates that realize anything beyond the requested strategy.
    """
    strat = lex[strategy_id]
    before = extract_strategies(ctx, lex).strategies
    if strategy_id in before:
        raise ValueError(f"strategy {strategy_id!r} already present in context")
    want = before | {strategy_id}
    out: list[Message] = []
    seen: set[str] = set()
    for template in strat.templates:
        for offset in _candidate_positions(ctx, template):
            raw = _splice(ctx.raw, offset, template.text, template.anchor)
            if raw in seen:
                continue
            seen.add(raw)
            candidate = tokenize(raw)
            got = extract_strategies(candidate, lex).strategies
            if exact:
                ok = got == want
            else:
                ok = want <= got
            if ok:
                out.append(candidate)
                if len(out) >= beam:
                    return out
    if not out:
        raise NoApplicableTemplateError(
            f"no insertion template of {strategy_id!r} fits this context"
        )
    return out


def insert_with_trace(
    ctx: Message, strategy_id: str, lex: StrategyLexicon, beam: int = 3, exact: bool = False
) -> list[tuple[Message, InsertionStep]]:
    """Like insert_strategy but keeps (template, offset) provenance per candidate."""
    strat = lex[strategy_id]
    before = extract_strategies(ctx, lex).strategies
    want = before | {strategy_id}
    out = []
    seen: set[str] = set()
    for template in strat.templates:
        for offset in _candidate_positions(ctx, template):
            raw = _splice(ctx.raw, offset, template.text, template.anchor)
            if raw in seen:
                continue
            seen.add(raw)
            candidate = tokenize(raw)
            got = extract_strategies(candidate, lex).strategies
            ok = got == want if exact else want <= got
            if ok:
                out.append(
                    (candidate, InsertionStep(strategy_id, template.text, template.anchor, offset))
                )
                if len(out) >= beam:
                    return out
    return out


# --- realization -------------------------------------------------------------


@dataclass(frozen=True)
class RealizationCandidate:
    text: str
    realized: frozenset[str]
    predicted: float
    gap: float
    trace: tuple[InsertionStep, ...]
    shortfall: bool
    missing: frozenset[str]


def _score(text_msg: Message, target: float, circ) -> tuple[float, float]:
    seen = extract_strategies(simulate_channel(text_msg, circ.channel, circ.lexicon), circ.lexicon)
    predicted = perceive(circ.receiver, seen.strategies)
    return predicted, abs(target - predicted)


def realize(
    m: Message | str,
    plan,
    circ,
    beam: int = 3,
) -> RealizationCandidate:
    """Rewrite ``m`` to carry exactly the planned strategy set.

    Markers of unplanned strategies are deleted; missing planned strategies
    are inserted one at a time in descending receiver-impact order, keeping
    the ``beam`` best partial texts per step, scored by the channel-simulated
    receiver gap. If some strategy admits no sound insertion the best partial
    realization is returned with ``shortfall`` set.
    """
    candidates = realize_alternatives(m, plan, circ, beam=beam)
    return candidates[0]


def realize_alternatives(
    m: Message | str,
    plan,
    circ,
    beam: int = 3,
) -> list[RealizationCandidate]:
    """All final beam candidates, best first."""
    if isinstance(m, str):
        m = tokenize(m)
    lex = circ.lexicon
    ex = extract_strategies(m, lex)
    target = perceive(circ.sender, ex.strategies)

    ctx = delete_markers(m, ex, plan.s_out, lex)
    base = ctx.message
    present = extract_strategies(base, lex).strategies
    to_insert = [s for s in lex.sort_ids(plan.s_out - present)]
    to_insert.sort(key=lambda s: (-abs(circ.receiver.coefficients[s]), lex.index_of(s)))

    items: list[tuple[Message, tuple[InsertionStep, ...], frozenset[str]]] = [
        (base, (), frozenset())
    ]
    for s in to_insert:
        grown: list[tuple[Message, tuple[InsertionStep, ...], frozenset[str]]] = []
        for msg, trace, missing in items:
            steps = insert_with_trace(msg, s, lex, beam=beam, exact=True)
            if steps:
                for cand, step in steps:
                    grown.append((cand, trace + (step,), missing))
            else:
                grown.append((msg, trace, missing | {s}))
        scored = []
        for idx, (msg, trace, missing) in enumerate(grown):
            _, gap = _score(msg, target, circ)
            scored.append((len(missing), gap, idx, msg, trace, missing))
        scored.sort(key=lambda t: t[:3])
        items = [(msg, trace, missing) for _, _, _, msg, trace, missing in scored[:beam]]

    out = []
    for msg, trace, missing in items:
        realized = extract_strategies(msg, lex).strategies
        predicted, gap = _score(msg, target, circ)
        out.append(
            RealizationCandidate(
                text=msg.raw,
                realized=realized,
                predicted=predicted,
                gap=gap,
                trace=trace,
                shortfall=realized != plan.s_out,
                missing=frozenset(missing),
            )
        )
    out.sort(key=lambda c: (c.shortfall, c.gap))
    return out
