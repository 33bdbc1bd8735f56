from __future__ import annotations

import json
import math

import pytest

from politeplan.errors import ConfigError, PoliteplanError
from politeplan.evaluation import (
    EvalReport,
    ExperimentConfig,
    bleu,
    count_added,
    evaluate_method,
    load_corpus,
    load_experiment_config,
    mae_gen,
    mae_plan,
    render_table,
    run_experiment,
    write_reports,
)
from politeplan.planner import Circumstance

from _synth import lossy_channel_corpus, mixed_corpus


# --- BLEU ---------------------------------------------------------------------
# Expected values are frozen from hand-counted n-gram tables; the formula is
# applied to the counts directly, independent of the implementation.


def test_bleu_identity_is_100():
    text = "could you please proofread this article? thanks!"
    assert bleu(text, text) == pytest.approx(100.0, abs=1e-9)


def test_bleu_empty_candidate_is_0():
    assert bleu("", "the cat sat") == 0.0


def test_bleu_short_candidate_with_full_overlap():
    # hyp "the cat sat" (3 tokens) vs ref "the cat sat down" (4 tokens):
    # p1=3/3, p2=(2+1)/(2+1), p3=(1+1)/(1+1), p4=(0+1)/(0+1); BP=exp(1-4/3)
    expected = 100.0 * math.exp(1.0 - 4.0 / 3.0) * (1.0 * 1.0 * 1.0 * 1.0) ** 0.25
    assert bleu("the cat sat", "the cat sat down") == pytest.approx(expected, abs=1e-6)


def test_bleu_repeated_tokens_are_clipped():
    # hyp "the cat the cat on the mat" vs ref "the cat is on the mat":
    # p1: clipped 5/7 (the:2of3, cat:1of2, on:1, mat:1)
    # p2: matches {the cat}x1, {on the}, {the mat} -> (3+1)/(6+1)
    # p3: {on the mat} -> (1+1)/(5+1); p4: none -> (0+1)/(4+1); BP=1 (7>6)
    expected = 100.0 * ((5 / 7) * (4 / 7) * (2 / 6) * (1 / 5)) ** 0.25
    assert bleu("the cat the cat on the mat", "the cat is on the mat") == pytest.approx(
        expected, abs=1e-6
    )


def test_bleu_counts_punctuation_tokens():
    # hyp "could you check ?" (4 tokens) vs ref "could you check it ?" (5):
    # p1=4/4; p2: 2 of 3 bigrams -> (2+1)/(3+1); p3: 1 of 2 -> (1+1)/(2+1);
    # p4: 0 of 1 -> (0+1)/(1+1); BP=exp(1-5/4)
    expected = 100.0 * math.exp(1.0 - 5.0 / 4.0) * (1.0 * (3 / 4) * (2 / 3) * (1 / 2)) ** 0.25
    assert bleu("could you check ?", "could you check it ?") == pytest.approx(expected, abs=1e-6)


def test_bleu_zero_overlap_is_0():
    assert bleu("entirely different words", "the cat sat down") == 0.0


def test_bleu_degrades_under_deletion():
    ref = "hi , could you please check the second table for me ? thanks !"
    trimmed = "hi , could you check the second table ? thanks !"
    shorter = "could you check ?"
    assert 100.0 > bleu(trimmed, ref) > bleu(shorter, ref)


# --- experiment running ---------------------------------------------------------


@pytest.fixture(scope="module")
def small_run(lex, avg):
    from politeplan.channel import mt_lossy_channel

    circ = Circumstance(avg, avg, mt_lossy_channel(lex), lex)
    corpus = lossy_channel_corpus(lex, per_strategy=3, seed=31)
    retrieval = [t for _, t in mixed_corpus(lex, size=25, seed=32)]
    reports = {}
    for method in ("none", "retrieval", "greedy", "ilp"):
        reports[method] = evaluate_method(
            corpus, circ, method, retrieval_corpus=retrieval, beam=2
        )
    return corpus, reports


def test_report_aggregates_match_instance_recomputation(small_run):
    _, reports = small_run
    for rep in reports.values():
        rows = [i for i in rep.instances if i.error is None]
        assert rep.mae_plan == pytest.approx(
            math.fsum(r.gap_plan for r in rows) / len(rows), abs=1e-12
        )
        assert rep.mae_gen == pytest.approx(
            math.fsum(r.gap_gen for r in rows) / len(rows), abs=1e-12
        )
        assert rep.mean_added == pytest.approx(
            math.fsum(r.n_added for r in rows) / len(rows), abs=1e-12
        )
        assert rep.count == len(rows)


def test_ilp_dominates_instance_wise(small_run):
    _, reports = small_run
    by_id = {}
    for method, rep in reports.items():
        for inst in rep.instances:
            if inst.error is None:
                by_id.setdefault(inst.message_id, {})[method] = inst
    for message_id, methods in by_id.items():
        if "ilp" not in methods:
            continue
        ilp_gap = methods["ilp"].gap_plan
        for baseline in ("greedy", "retrieval", "none"):
            if baseline in methods:
                assert ilp_gap <= methods[baseline].gap_plan + 1e-9, (message_id, baseline)


def test_aggregate_ordering_matches_expected_direction(small_run):
    _, reports = small_run
    assert reports["ilp"].mae_plan <= reports["greedy"].mae_plan + 1e-12
    assert reports["greedy"].mae_plan <= reports["none"].mae_plan + 1e-12


def test_none_method_adds_nothing(small_run):
    _, reports = small_run
    assert reports["none"].mean_added == 0.0
    for inst in reports["none"].instances:
        assert count_added(inst) == 0


def test_identity_circumstance_scores_zero(lex, avg):
    from politeplan.channel import all_safe_channel

    circ = Circumstance(avg, avg, all_safe_channel(lex), lex)
    corpus = [("a", "thanks for the update ."), ("b", "can you fix this ?")]
    rep = evaluate_method(corpus, circ, "none")
    assert rep.mae_plan == 0.0
    assert rep.mae_gen == 0.0
    assert rep.bleu_s == pytest.approx(100.0, abs=1e-9)


def test_divergent_receiver_makes_ilp_beat_none(lex, avg):
    from politeplan.channel import all_safe_channel
    from politeplan.perception import PerceptionModel

    # receiver discounts gratitude heavily; a compensating safe subset exists
    coeffs = dict(avg.coefficients)
    coeffs["Gratitude"] = 0.1
    receiver = PerceptionModel(coefficients=coeffs, intercept=0.0)
    circ = Circumstance(avg, receiver, all_safe_channel(lex), lex)
    corpus = [("a", "thanks for the patch ."), ("b", "thanks , this helps .")]
    none_rep = evaluate_method(corpus, circ, "none")
    ilp_rep = evaluate_method(corpus, circ, "ilp")
    assert ilp_rep.mae_plan < none_rep.mae_plan


def test_mae_over_empty_set_raises():
    with pytest.raises(PoliteplanError):
        mae_plan([])
    with pytest.raises(PoliteplanError):
        mae_gen([])


def test_run_experiment_from_config(tmp_path, lex):
    corpus_path = tmp_path / "corpus.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for message_id, text in lossy_channel_corpus(lex, per_strategy=2, seed=33):
            fh.write(json.dumps({"id": message_id, "text": text}) + "\n")
    retrieval_path = tmp_path / "retrieval.jsonl"
    with open(retrieval_path, "w", encoding="utf-8") as fh:
        for message_id, text in mixed_corpus(lex, size=15, seed=34):
            fh.write(json.dumps({"id": message_id, "text": text}) + "\n")
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "name": "lossy-smoke",
                "corpus": str(corpus_path),
                "retrieval_corpus": str(retrieval_path),
                "channel": "builtin:mt-lossy",
                "methods": ["none", "greedy", "ilp"],
                "beam": 2,
            }
        ),
        encoding="utf-8",
    )
    config = load_experiment_config(config_path)
    reports = run_experiment(config)
    assert set(reports) == {"none", "greedy", "ilp"}
    out_dir = tmp_path / "out"
    write_reports(reports, out_dir)
    assert (out_dir / "report_ilp.json").exists()
    assert (out_dir / "summary.txt").exists()
    table = render_table(reports)
    assert "mae_plan" in table and "ilp" in table
    written = json.loads((out_dir / "report_ilp.json").read_text(encoding="utf-8"))
    assert written["count"] == reports["ilp"].count


def test_top_gap_selection(tmp_path, lex):
    corpus_path = tmp_path / "corpus.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"id": "low", "text": "the page is fine ."}) + "\n")
        fh.write(json.dumps({"id": "high", "text": "could you please check ? thanks !"}) + "\n")
        fh.write(json.dumps({"id": "mid", "text": "can you please check ?"}) + "\n")
    config = ExperimentConfig(
        name="topgap",
        corpus=str(corpus_path),
        channel="builtin:mt-lossy",
        methods=("none",),
        top_gap=2,
        with_realization=False,
    )
    reports = run_experiment(config)
    ids = [i.message_id for i in reports["none"].instances]
    assert ids == ["high", "mid"]


def test_config_validation(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "x"}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_experiment_config(path)
    path.write_text(json.dumps({"name": "x", "corpus": "c", "bogus": 1}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_experiment_config(path)


def test_load_corpus_rejects_garbage(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text("{broken\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_corpus(path)
