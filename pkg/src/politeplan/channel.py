"""Channel safety profiles and round-trip based estimation.

A channel is a per-strategy safety bit: 1 = the strategy survives
transmission, 0 = it is at risk of being lost. Profiling estimates the bits
from (original, round_trip) text pairs by majority loss rate.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ConfigError, EmptyPairsError, LexiconError, TranslatorError
from .extraction import Message, extract_text, tokenize
from .lexicon import StrategyLexicon, default_lexicon

# Reference at-risk set for a lossy commercial MT round-trip channel.
MT_LOSSY_AT_RISK = frozenset({"Subjunctive", "Please", "Filler", "Swearing"})


@dataclass(frozen=True)
class StrategyStats:
    support: int
    lost: int

    @property
    def loss_rate(self) -> float:
        return self.lost / self.support if self.support else 0.0


@dataclass(frozen=True)
class ChannelSpec:
    safety: dict[str, int]  # strategy id -> 1 (safe) | 0 (at-risk)
    label: str = ""
    stats: dict[str, StrategyStats] | None = field(default=None, compare=False)
    unsupported: tuple[str, ...] = field(default=(), compare=False)

    def is_safe(self, strategy_id: str) -> bool:
        return bool(self.safety.get(strategy_id, 1))

    def at_risk(self) -> frozenset[str]:
        return frozenset(s for s, bit in self.safety.items() if not bit)


def all_safe_channel(lex: StrategyLexicon | None = None) -> ChannelSpec:
    lex = lex or default_lexicon()
    return ChannelSpec(safety={s: 1 for s in lex.ids()}, label="builtin:all-safe")


def mt_lossy_channel(lex: StrategyLexicon | None = None) -> ChannelSpec:
    """Built-in profile of a lossy MT round-trip channel (not recomputed)."""
    lex = lex or default_lexicon()
    return ChannelSpec(
        safety={s: 0 if s in MT_LOSSY_AT_RISK else 1 for s in lex.ids()},
        label="builtin:mt-lossy",
    )


@dataclass(frozen=True)
class RoundTripPair:
    original: str
    round_trip: str

    def __post_init__(self):
        if not self.original or not self.round_trip:
            raise ValueError("round-trip pairs need non-empty texts on both sides")


def profile_channel(
    pairs: list[RoundTripPair],
    lex: StrategyLexicon | None = None,
    threshold: float = 0.5,
    label: str = "profiled",
) -> ChannelSpec:
    """Estimate safety bits from round-trip pairs.

    A strategy is at-risk when, among pairs whose original uses it, the
    fraction that no longer use it after the round trip is strictly greater
    than ``threshold``. Strategies with no supporting pair default to safe
    and are listed in ``unsupported``.
    """
    lex = lex or default_lexicon()
    if not pairs:
        raise EmptyPairsError("cannot profile a channel from zero pairs")
    support = {s: 0 for s in lex.ids()}
    lost = {s: 0 for s in lex.ids()}
    for pair in pairs:
        before = extract_text(pair.original, lex).strategies
        after = extract_text(pair.round_trip, lex).strategies
        for s in before:
            support[s] += 1
            if s not in after:
                lost[s] += 1
    safety = {}
    stats = {}
    unsupported = []
    for s in lex.ids():
        stats[s] = StrategyStats(support=support[s], lost=lost[s])
        if support[s] == 0:
            safety[s] = 1
            unsupported.append(s)
        else:
            safety[s] = 0 if (lost[s] / support[s]) > threshold else 1
    return ChannelSpec(safety=safety, label=label, stats=stats, unsupported=tuple(unsupported))


def simulate_channel(m: Message, spec: ChannelSpec, lex: StrategyLexicon | None = None) -> Message:
    """Desk-scale stand-in for transmission: drop every at-risk occurrence.

    Deletion runs to a fixpoint so the result never contains an at-risk
    strategy (removals can occasionally splice new marker occurrences
    together) and the operation is idempotent.
    """
    from .realizer import delete_to_keep_set  # local import; realizer owns deletion

    lex = lex or default_lexicon()
    keep = frozenset(s for s in lex.ids() if spec.is_safe(s))
    return delete_to_keep_set(m, keep, lex)


def simulate_channel_text(raw: str, spec: ChannelSpec, lex: StrategyLexicon | None = None) -> str:
    return simulate_channel(tokenize(raw), spec, lex).raw


# --- translator clients -----------------------------------------------------


class PairFileClient:
    """Offline client backed by a precomputed pair file (line-delimited JSON)."""

    def __init__(self, path):
        self._table: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    self._table[str(rec["original"])] = str(rec["round_trip"])
                except (json.JSONDecodeError, KeyError) as exc:
                    raise LexiconError(f"{path}:{lineno}: malformed pair record: {exc}") from exc

    def round_trip(self, text: str) -> str:
        try:
            return self._table[text]
        except KeyError:
            raise TranslatorError(f"no recorded round trip for {text!r}") from None


class RestTranslatorClient:
    """Pivot-language round trip against a generic REST translate endpoint.

    The endpoint is expected to accept ``POST {text, source, target}`` and
    answer ``{text}``. Endpoint/key come from the constructor or from the
    ``POLITEPLAN_TRANSLATOR_URL`` / ``POLITEPLAN_TRANSLATOR_KEY`` env vars.
    """

    def __init__(self, endpoint=None, api_key=None, source="en", pivot="zh", timeout=10.0):
        import os

        self.endpoint = endpoint or os.environ.get("POLITEPLAN_TRANSLATOR_URL")
        self.api_key = api_key or os.environ.get("POLITEPLAN_TRANSLATOR_KEY")
        self.source = source
        self.pivot = pivot
        self.timeout = timeout
        if not self.endpoint:
            raise TranslatorError(
                "no translator endpoint configured (set POLITEPLAN_TRANSLATOR_URL)"
            )

    def _translate(self, text: str, source: str, target: str) -> str:
        import requests

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        resp = requests.post(
            self.endpoint,
            json={"text": text, "source": source, "target": target},
            headers=headers,
            timeout=self.timeout,
        )
        resp.raise_for_status()
        return str(resp.json()["text"])

    def round_trip(self, text: str) -> str:
        there = self._translate(text, self.source, self.pivot)
        return self._translate(there, self.pivot, self.source)


@dataclass(frozen=True)
class FetchFailure:
    utterance: str
    error: str


@dataclass(frozen=True)
class FetchResult:
    pairs: tuple[RoundTripPair, ...]
    failures: tuple[FetchFailure, ...]


def fetch_round_trips(utterances: list[str], client, parallelism: int = 4) -> FetchResult:
    """Round-trip each utterance through the client.

    Per-item transport errors are collected, not fatal; results follow the
    input order.
    """
    if client is None:
        raise TranslatorError("no translator client configured")
    if not utterances:
        return FetchResult(pairs=(), failures=())

    def worker(text: str):
        try:
            return RoundTripPair(original=text, round_trip=client.round_trip(text)), None
        except Exception as exc:  # per-item failures are part of the contract
            return None, FetchFailure(utterance=text, error=str(exc))

    pairs: list[RoundTripPair] = []
    failures: list[FetchFailure] = []
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        for pair, failure in pool.map(worker, utterances):
            if pair is not None:
                pairs.append(pair)
            else:
                failures.append(failure)
    return FetchResult(pairs=tuple(pairs), failures=tuple(failures))


# --- spec file I/O -----------------------------------------------------------


def channel_to_dict(spec: ChannelSpec) -> dict:
    return {
        "version": "1",
        "label": spec.label,
        "safety": {k: int(v) for k, v in sorted(spec.safety.items())},
    }


def channel_from_dict(doc: dict) -> ChannelSpec:
    if not isinstance(doc, dict):
        raise ConfigError("channel document must be an object")
    unknown = set(doc) - {"version", "label", "safety"}
    if unknown:
        raise ConfigError(f"unknown channel fields: {sorted(unknown)}")
    safety = doc.get("safety")
    if not isinstance(safety, dict):
        raise ConfigError("'safety' must be an object")
    parsed = {}
    for k, v in safety.items():
        if v not in (0, 1):
            raise ConfigError(f"safety bit for {k!r} must be 0 or 1, got {v!r}")
        parsed[str(k)] = int(v)
    return ChannelSpec(safety=parsed, label=str(doc.get("label", "")))


def load_channel(path) -> ChannelSpec:
    with open(path, encoding="utf-8") as fh:
        return channel_from_dict(json.load(fh))


def save_channel(spec: ChannelSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_dict(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")
