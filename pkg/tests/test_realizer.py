from __future__ import annotations

import pytest

from politeplan.errors import LexiconError, NoApplicableTemplateError
from politeplan.extraction import extract_strategies, extract_text, non_marker_words, tokenize
from politeplan.perception import perceive
from politeplan.planner import build_problem, plan_ilp, plan_none
from politeplan.realizer import (
    delete_markers,
    delete_to_keep_set,
    insert_strategy,
    realize,
    realize_alternatives,
)
from politeplan.channel import simulate_channel

from _synth import lossy_channel_corpus


def _ctx(text, keep, lex):
    m = tokenize(text)
    return delete_markers(m, extract_strategies(m, lex), keep, lex)


# --- deletion ------------------------------------------------------------------


def test_token_mode_removes_marker_only(lex):
    ctx = _ctx("Can you please explain?", {"Indicative"}, lex)
    assert ctx.message.raw == "Can you explain?"
    assert ("Please", "please") in ctx.removed


def test_segment_mode_removes_enclosing_segment(lex):
    ctx = _ctx("Thanks for your help, I will try again.", frozenset(), lex)
    assert ctx.message.raw == "I will try again."


def test_keep_everything_is_identity(lex):
    text = "hi , could you please check this for me ? thanks !"
    keep = extract_text(text, lex).strategies
    ctx = _ctx(text, keep, lex)
    assert ctx.message.raw == text
    assert ctx.removed == ()


def test_segment_with_kept_marker_falls_back_to_token_mode(lex):
    # Gratitude (segment mode) shares its segment with a kept For.Me marker
    text = "thanks for doing this for me, i owe you one."
    ctx = _ctx(text, {"For.Me"}, lex)
    assert "for me" in ctx.message.raw
    assert "thanks" not in ctx.message.raw.lower()
    assert extract_strategies(ctx.message, lex).strategies == {"For.Me"}


def test_deletion_repairs_orphaned_delimiters(lex):
    ctx = _ctx("uh, hey, can you check?", {"Greeting", "Indicative"}, lex)
    assert ctx.message.raw == "hey, can you check?"


def test_deletion_is_sound_even_when_markers_splice_together(lex):
    # dropping the mid-sentence please makes "could ... you" adjacent: the
    # fixpoint must also clear the resulting Subjunctive occurrence
    text = "could please you check ?"
    result = delete_to_keep_set(tokenize(text), frozenset({"Indicative"}), lex)
    got = extract_strategies(result, lex).strategies
    assert "Please" not in got and "Subjunctive" not in got


def test_delete_rejects_unknown_keep_ids(lex):
    m = tokenize("thanks!")
    with pytest.raises(LexiconError):
        delete_markers(m, extract_strategies(m, lex), {"NotAStrategy"}, lex)


# --- insertion -------------------------------------------------------------------


def test_insert_greeting_candidates(lex):
    cands = insert_strategy(tokenize("could you check?"), "Greeting", lex)
    texts = [c.raw for c in cands]
    assert "hi , could you check?" in texts
    for c in cands:
        assert "Greeting" in extract_strategies(c, lex).strategies


def test_insert_gratitude_at_message_end(lex):
    cands = insert_strategy(tokenize("can you check?"), "Gratitude", lex)
    texts = [c.raw for c in cands]
    assert any(t.startswith("can you check?") and "thanks" in t for t in texts)


def test_insert_for_me_lands_before_terminal_punctuation(lex):
    cands = insert_strategy(
        tokenize("can someone explain why there ' s a coi tag on this article?"), "For.Me", lex
    )
    assert cands[0].raw == "can someone explain why there ' s a coi tag on this article for me?"


def test_insert_please_mid_sentence(lex):
    cands = insert_strategy(tokenize("can you check?"), "Please", lex)
    assert cands[0].raw == "can you please check?"
    got = extract_strategies(cands[0], lex).strategies
    assert "Please" in got and "Please.Start" not in got


def test_insert_preserves_anchored_strategies(lex):
    # naive prepending would demote the sentence-initial please; sound
    # candidates must keep Please.Start alive (here: second-sentence slots)
    m = tokenize("please stop . it hurts the layout .")
    cands = insert_strategy(m, "Filler", lex)
    assert cands
    for c in cands:
        got = extract_strategies(c, lex).strategies
        assert {"Please.Start", "Filler"} <= got


def test_insert_rejects_present_strategy(lex):
    with pytest.raises(ValueError):
        insert_strategy(tokenize("thanks!"), "Gratitude", lex)


def test_insert_error_when_nothing_fits(lex):
    # Conj.Start must be sentence-initial, but the only sentence starts with
    # an anchored please that prepending would destroy
    with pytest.raises(NoApplicableTemplateError):
        insert_strategy(tokenize("please stop ."), "Conj.Start", lex)


# --- realize ---------------------------------------------------------------------


def test_realize_identity_plan(safe_circ):
    text = "could you check this? thanks!"
    p = build_problem(text, safe_circ)
    plan = plan_ilp(p, safe_circ)
    assert plan.s_out == p.s_in
    cand = realize(text, plan, safe_circ)
    assert cand.text == text
    assert cand.gap == 0.0
    assert not cand.shortfall


def test_realize_worked_example(lossy_circ):
    text = "could you please proofread this article? thanks!"
    p = build_problem(text, lossy_circ)
    plan = plan_ilp(p, lossy_circ)
    cand = realize(text, plan, lossy_circ)
    assert extract_text(cand.text, lossy_circ.lexicon).strategies == plan.s_out
    assert not cand.shortfall
    assert cand.gap == pytest.approx(plan.gap, abs=1e-9)
    assert "proofread this article" in cand.text


def test_realize_gap_recomputes_from_scratch(lossy_circ):
    text = "could you please proofread this article? thanks!"
    p = build_problem(text, lossy_circ)
    plan = plan_ilp(p, lossy_circ)
    cand = realize(text, plan, lossy_circ)
    lex = lossy_circ.lexicon
    seen = extract_strategies(
        simulate_channel(tokenize(cand.text), lossy_circ.channel, lex), lex
    ).strategies
    recomputed = abs(p.target - perceive(lossy_circ.receiver, seen))
    assert cand.gap == recomputed


def test_realize_determinism(lossy_circ):
    text = "could you please proofread this article? thanks!"
    p = build_problem(text, lossy_circ)
    plan = plan_ilp(p, lossy_circ)
    first = realize(text, plan, lossy_circ)
    for _ in range(3):
        assert realize(text, plan, lossy_circ).text == first.text


def test_realize_alternatives_sorted_by_gap(lossy_circ):
    text = "could you please proofread this article? thanks!"
    p = build_problem(text, lossy_circ)
    plan = plan_ilp(p, lossy_circ)
    alts = realize_alternatives(text, plan, lossy_circ)
    gaps = [a.gap for a in alts if not a.shortfall]
    assert gaps == sorted(gaps)


def test_realize_flags_shortfall_when_template_cannot_fit(lex, safe_circ):
    from politeplan.planner import Plan

    # Conj.Start cannot be realized without demoting the anchored please
    plan = Plan(
        s_out=frozenset({"Please.Start", "Conj.Start"}),
        achieved=0.0,
        gap=0.0,
        added=frozenset({"Conj.Start"}),
        removed=frozenset(),
        method="handmade",
    )
    cand = realize("please stop .", plan, safe_circ)
    assert cand.shortfall
    assert "Conj.Start" in cand.missing
    assert "Please.Start" in cand.realized


def test_realize_reinserts_kept_strategy_lost_to_deletion_cascade(lex, safe_circ):
    # deleting Conj.Start promotes the please to sentence-initial, so the kept
    # Please must be re-realized elsewhere
    text = "so please check the file ."
    p = build_problem(text, safe_circ, subj_ind=False)
    assert p.s_in == {"Conj.Start", "Please"}
    plan = plan_none(p, safe_circ)
    from dataclasses import replace

    plan = replace(plan, s_out=frozenset({"Please"}))
    cand = realize(text, plan, safe_circ)
    assert extract_text(cand.text, lex).strategies == {"Please"}
    assert not cand.shortfall


def test_realization_fidelity_and_content_preservation_on_corpus(lossy_circ):
    lex = lossy_circ.lexicon
    corpus = lossy_channel_corpus(lex, per_strategy=5, seed=23)
    kept_total = 0
    input_total = 0
    for _, text in corpus:
        p = build_problem(text, lossy_circ)
        plan = plan_ilp(p, lossy_circ)
        cand = realize(text, plan, lossy_circ)
        if not cand.shortfall:
            assert extract_text(cand.text, lex).strategies == plan.s_out, (text, cand.text)
        before = non_marker_words(tokenize(text), lex)
        after = non_marker_words(tokenize(cand.text), lex)
        remaining = list(after)
        kept = 0
        for w in before:
            if w in remaining:
                remaining.remove(w)
                kept += 1
        kept_total += kept
        input_total += len(before)
    assert kept_total / input_total >= 0.9
