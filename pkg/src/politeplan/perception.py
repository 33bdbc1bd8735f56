"""Linear politeness perception models.

A model maps a strategy set to a politeness level on the [-3, 3] scale:
``level = intercept + sum of per-strategy coefficients``. Sums use
``math.fsum`` so evaluation is exactly order-independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientDataError, LexiconError, UnknownStrategyError
from .extraction import extract_text
from .lexicon import StrategyLexicon, default_lexicon

POSITIVE = "Positive"
NEGATIVE = "Negative"


@dataclass(frozen=True)
class PerceptionModel:
    coefficients: dict[str, float]
    intercept: float = 0.0
    provenance: str = ""

    def __post_init__(self):
        for key, value in self.coefficients.items():
            if not math.isfinite(value):
                raise ValueError(f"non-finite coefficient for {key!r}: {value}")
        if not math.isfinite(self.intercept):
            raise ValueError(f"non-finite intercept: {self.intercept}")


@dataclass(frozen=True)
class AnnotatedUtterance:
    text: str
    score: float
    annotator: str | None = None

    def __post_init__(self):
        if not -3.0 <= self.score <= 3.0:
            raise ValueError(f"score {self.score} outside [-3, 3]")


def perceive(model: PerceptionModel, s_set: Iterable[str]) -> float:
    """Politeness level the model assigns to a strategy set."""
    values = [model.intercept]
    for s in set(s_set):
        try:
            values.append(model.coefficients[s])
        except KeyError:
            raise UnknownStrategyError(s) from None
    return math.fsum(values)


def polarity(model: PerceptionModel, s_set: Iterable[str]) -> str:
    """Binary polarity; a level of exactly 0 counts as Positive."""
    return POSITIVE if perceive(model, s_set) >= 0 else NEGATIVE


def _design_matrix(
    data: Sequence[AnnotatedUtterance], lex: StrategyLexicon
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    ids = list(lex.ids())
    col = {s: i for i, s in enumerate(ids)}
    X = np.zeros((len(data), len(ids) + 1))
    X[:, -1] = 1.0  # intercept column
    y = np.empty(len(data))
    for row, utt in enumerate(data):
        for s in extract_text(utt.text, lex).strategies:
            X[row, col[s]] = 1.0
        y[row] = utt.score
    return X, y, ids


def fit_model(
    data: Sequence[AnnotatedUtterance],
    lex: StrategyLexicon | None = None,
    provenance: str = "ols-fit",
) -> PerceptionModel:
    """Ordinary least squares over binary strategy-presence features.

    Rank-deficient designs fall back to the minimum-norm solution; the
    provenance tag records when that happened.
    """
    lex = lex or default_lexicon()
    if not data:
        raise InsufficientDataError("no annotated utterances")
    X, y, ids = _design_matrix(data, lex)
    present = int((X[:, :-1].sum(axis=0) > 0).sum())
    if len(data) < present + 1:
        raise InsufficientDataError(
            f"{len(data)} utterances cannot identify {present} strategies plus intercept"
        )
    solution, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        provenance = f"{provenance} (degenerate design: rank {rank} < {X.shape[1]})"
    coeffs = {s: float(solution[i]) for i, s in enumerate(ids)}
    return PerceptionModel(coefficients=coeffs, intercept=float(solution[-1]), provenance=provenance)


def fit_individual_model(
    data: Sequence[AnnotatedUtterance],
    fallback: PerceptionModel,
    lex: StrategyLexicon | None = None,
    min_count: int = 15,
    provenance: str = "individual-fit",
) -> PerceptionModel:
    """Per-annotator fit with sparsity fallback.

    A strategy keeps the annotator's own OLS coefficient only when it occurs
    in at least ``min_count`` of their utterances; rarer strategies copy the
    fallback model's coefficient.
    """
    lex = lex or default_lexicon()
    for s in lex.ids():
        if s not in fallback.coefficients:
            raise UnknownStrategyError(s)
    if not data:
        return PerceptionModel(
            coefficients=dict(fallback.coefficients),
            intercept=fallback.intercept,
            provenance=f"{provenance} (no data; fallback copy)",
        )
    own = fit_model(data, lex, provenance=provenance)
    counts: dict[str, int] = {s: 0 for s in lex.ids()}
    for utt in data:
        for s in extract_text(utt.text, lex).strategies:
            counts[s] += 1
    coeffs = {}
    for s in lex.ids():
        if counts[s] >= min_count:
            coeffs[s] = own.coefficients[s]
        else:
            coeffs[s] = fallback.coefficients[s]
    return PerceptionModel(coefficients=coeffs, intercept=own.intercept, provenance=own.provenance)


# Built-in average-perception coefficients for the 18 default strategies.
_AVERAGE_COEFFICIENTS = {
    "Actually": -0.358,
    "Adverb.Just": -0.004,
    "Affirmation": 0.171,
    "Apology": 0.429,
    "By.The.Way": 0.331,
    "Conj.Start": -0.245,
    "Filler": -0.245,
    "For.Me": 0.128,
    "For.You": 0.197,
    "Gratitude": 0.989,
    "Greeting": 0.491,
    "Hedges": 0.131,
    "Indicative": 0.221,
    "Please": 0.230,
    "Please.Start": -0.209,
    "Reassurance": 0.668,
    "Subjunctive": 0.454,
    "Swearing": -1.30,
}


def average_model() -> PerceptionModel:
    """The built-in average-perception model (intercept 0)."""
    return PerceptionModel(
        coefficients=dict(_AVERAGE_COEFFICIENTS),
        intercept=0.0,
        provenance="builtin:average",
    )


def model_to_dict(model: PerceptionModel) -> dict:
    return {
        "version": "1",
        "intercept": model.intercept,
        "coefficients": dict(sorted(model.coefficients.items())),
        "provenance": model.provenance,
    }


def model_from_dict(doc: dict) -> PerceptionModel:
    if not isinstance(doc, dict):
        raise LexiconError("model document must be an object")
    unknown = set(doc) - {"version", "intercept", "coefficients", "provenance"}
    if unknown:
        raise LexiconError(f"unknown model fields: {sorted(unknown)}")
    coeffs = doc.get("coefficients")
    if not isinstance(coeffs, dict):
        raise LexiconError("'coefficients' must be an object")
    return PerceptionModel(
        coefficients={str(k): float(v) for k, v in coeffs.items()},
        intercept=float(doc.get("intercept", 0.0)),
        provenance=str(doc.get("provenance", "")),
    )


def load_model(path) -> PerceptionModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def save_model(model: PerceptionModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_annotations(path) -> list[AnnotatedUtterance]:
    """Read a line-delimited annotation corpus: {id?, text, score, annotator?}."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LexiconError(f"{path}:{lineno}: malformed record: {exc}") from exc
            out.append(
                AnnotatedUtterance(
                    text=str(rec["text"]),
                    score=float(rec["score"]),
                    annotator=rec.get("annotator"),
                )
            )
    return out
