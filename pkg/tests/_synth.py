"""Synthetic corpus construction for tests.

Messages are built by splicing strategy templates into marker-free base
sentences, so each message's strategy set is known by construction (and
verified by extraction).
"""

from __future__ import annotations

import numpy as np

from politeplan.errors import NoApplicableTemplateError
from politeplan.extraction import extract_strategies, tokenize
from politeplan.lexicon import StrategyLexicon
from politeplan.realizer import insert_strategy

BASE_CONTENTS = [
    "the introduction needs a source .",
    "this section is missing a citation .",
    "the image description does not match the file .",
    "the list of references is out of date .",
    "the second paragraph repeats the first one .",
    "the table rows are not aligned with the header .",
    "the draft still has two broken links .",
    "the summary leaves out the main result .",
    "the code sample does not compile .",
    "the archive page shows the wrong year .",
    "can you move the section to the talk page ?",
    "will you restore the earlier revision ?",
    "the sidebar overlaps the infobox on narrow screens .",
    "the quote is attributed to the wrong author .",
    "the redirect sends readers to a deleted page .",
]

AT_RISK = ("Subjunctive", "Please", "Filler", "Swearing")
SAFE_EXTRAS = (
    "Gratitude",
    "Greeting",
    "Hedges",
    "By.The.Way",
    "For.Me",
    "For.You",
    "Apology",
    "Affirmation",
    "Reassurance",
    "Adverb.Just",
    "Actually",
    "Conj.Start",
)


def synth_message(base: str, strategies, lex: StrategyLexicon) -> str:
    """Insert the given strategies into a base sentence, one at a time.

    Order conflicts (a later insertion would unseat an earlier anchored
    marker) get one retry after the rest; strategies that still cannot be
    placed are skipped. Extraction on the result defines its true set.
    """
    msg = tokenize(base)
    pending = list(strategies)
    for _ in range(2):
        failed = []
        for s in pending:
            if s in extract_strategies(msg, lex).strategies:
                continue
            try:
                msg = insert_strategy(msg, s, lex, beam=1, exact=False)[0]
            except NoApplicableTemplateError:
                failed.append(s)
        if not failed:
            break
        pending = failed
    return msg.raw


def lossy_channel_corpus(lex: StrategyLexicon, per_strategy: int = 50, seed: int = 7):
    """One sub-corpus per at-risk strategy, with random safe co-strategies."""
    rng = np.random.default_rng(seed)
    corpus = []
    idx = 0
    for anchor in AT_RISK:
        for _ in range(per_strategy):
            base = BASE_CONTENTS[int(rng.integers(len(BASE_CONTENTS)))]
            extras = list(
                rng.choice(SAFE_EXTRAS, size=int(rng.integers(0, 3)), replace=False)
            )
            try:
                text = synth_message(base, [anchor] + extras, lex)
            except NoApplicableTemplateError:
                text = synth_message(base, [anchor], lex)
            corpus.append((f"{anchor.lower()}-{idx}", text))
            idx += 1
    return corpus


def random_plan_instance(rng, lex, base_model):
    """A randomized planning instance: perturbed models, random channel,
    random input set and constraint flags."""
    from politeplan.channel import ChannelSpec
    from politeplan.perception import PerceptionModel, perceive
    from politeplan.planner import Circumstance, ConstraintSet, PlanProblem

    ids = list(lex.ids())
    coeffs_r = {s: base_model.coefficients[s] + float(rng.normal(0, 0.15)) for s in ids}
    if rng.random() < 0.3:
        coeffs_s = dict(coeffs_r)
    else:
        coeffs_s = {s: base_model.coefficients[s] + float(rng.normal(0, 0.15)) for s in ids}
    sender = PerceptionModel(coefficients=coeffs_s, intercept=float(rng.normal(0, 0.1)))
    receiver = PerceptionModel(coefficients=coeffs_r, intercept=float(rng.normal(0, 0.1)))
    safety = {s: int(rng.random() < 0.75) for s in ids}
    circ = Circumstance(sender, receiver, ChannelSpec(safety=safety, label="random"), lex)
    k = int(rng.integers(0, 6))
    s_in = frozenset(rng.choice(ids, size=k, replace=False)) if k else frozenset()
    problem = PlanProblem(
        s_in=s_in,
        target=perceive(sender, s_in),
        constraints=ConstraintSet(
            negativity=bool(rng.random() < 0.5),
            subj_ind=bool(rng.random() < 0.5),
            max_added_enabled=bool(rng.random() < 0.8),
        ),
        max_added=int(rng.integers(0, 5)),
    )
    return problem, circ


def mixed_corpus(lex: StrategyLexicon, size: int = 60, seed: int = 11):
    """Messages with random strategy sets covering both polarities."""
    rng = np.random.default_rng(seed)
    all_ids = list(lex.ids())
    corpus = []
    for i in range(size):
        base = BASE_CONTENTS[int(rng.integers(len(BASE_CONTENTS)))]
        count = int(rng.integers(0, 4))
        picks = list(rng.choice(all_ids, size=count, replace=False)) if count else []
        try:
            text = synth_message(base, picks, lex)
        except NoApplicableTemplateError:
            text = base
        corpus.append((f"mix-{i}", text))
    return corpus
