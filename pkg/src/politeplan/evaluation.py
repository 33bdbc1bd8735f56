"""Corpus evaluation: plan/realize each message and score the outcome.

Metrics per method: mean absolute intention gap before realization
(``mae_plan``) and after realization as seen through the channel
(``mae_gen``), self-BLEU against the original (``bleu_s``), and the mean
number of newly added strategies. The "none" method scores the message the
receiver would see with no intervention.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

from .channel import simulate_channel
from .errors import ConfigError, PoliteplanError
from .extraction import extract_strategies, tokenize
from .perception import perceive
from .planner import Circumstance, Plan, build_problem, plan_greedy, plan_ilp, plan_none, plan_oracle, plan_retrieval
from .realizer import RealizationCandidate, realize_alternatives
from .registry import resolve_channel, resolve_lexicon, resolve_model

METHODS = ("none", "retrieval", "greedy", "ilp")


def bleu(candidate: str, reference: str) -> float:
    """Sentence BLEU in [0, 100]: 4-gram precisions with brevity penalty.

    Single reference; add-one smoothing on the n>=2 precisions (the unigram
    precision is left raw, so zero word overlap scores 0). An empty
    candidate scores 0.
    """
    hyp = [t.lower for t in tokenize(candidate).tokens]
    ref = [t.lower for t in tokenize(reference).tokens]
    if not hyp:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        h_counts = Counter(tuple(hyp[i : i + n]) for i in range(len(hyp) - n + 1))
        r_counts = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
        total = sum(h_counts.values())
        clipped = sum(min(c, r_counts[g]) for g, c in h_counts.items())
        if n == 1:
            if clipped == 0:
                return 0.0
            precision = clipped / total
        else:
            precision = (clipped + 1) / (total + 1)
        log_sum += math.log(precision)
    if len(hyp) >= len(ref):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(ref) / len(hyp))
    return 100.0 * brevity * math.exp(log_sum / 4.0)


@dataclass(frozen=True)
class EvalInstance:
    message_id: str
    text: str
    s_in: frozenset[str]
    target: float
    plan: Plan
    candidate: RealizationCandidate | None
    receiver_view: str  # what the receiver sees with no intervention
    gap_plan: float
    gap_gen: float
    gap_none: float
    bleu_s: float
    n_added: int
    error: str | None = None


def mae_plan(instances) -> float:
    rows = [i for i in instances if i.error is None]
    if not rows:
        raise PoliteplanError("mae_plan over an empty instance set")
    return math.fsum(i.gap_plan for i in rows) / len(rows)


def mae_gen(instances) -> float:
    rows = [i for i in instances if i.error is None]
    if not rows:
        raise PoliteplanError("mae_gen over an empty instance set")
    return math.fsum(i.gap_gen for i in rows) / len(rows)


def count_added(instance: EvalInstance) -> int:
    return len(instance.plan.s_out - instance.s_in)


@dataclass(frozen=True)
class EvalReport:
    method: str
    mae_plan: float
    mae_gen: float
    bleu_s: float
    mean_added: float
    count: int
    instances: tuple[EvalInstance, ...] = field(repr=False)

    def to_dict(self, with_instances: bool = True) -> dict:
        doc = {
            "method": self.method,
            "mae_plan": self.mae_plan,
            "mae_gen": self.mae_gen,
            "bleu_s": self.bleu_s,
            "mean_added": self.mean_added,
            "count": self.count,
        }
        if with_instances:
            doc["instances"] = [
                {
                    "id": i.message_id,
                    "text": i.text,
                    "s_in": sorted(i.s_in),
                    "target": i.target,
                    "s_out": sorted(i.plan.s_out),
                    "output": i.candidate.text if i.candidate else None,
                    "gap_plan": i.gap_plan,
                    "gap_gen": i.gap_gen,
                    "gap_none": i.gap_none,
                    "bleu_s": i.bleu_s,
                    "n_added": i.n_added,
                    "error": i.error,
                }
                for i in self.instances
            ]
        return doc


def _aggregate(method: str, instances: list[EvalInstance]) -> EvalReport:
    rows = [i for i in instances if i.error is None]
    if not rows:
        raise PoliteplanError(f"method {method!r} produced no scored instances")
    return EvalReport(
        method=method,
        mae_plan=mae_plan(rows),
        mae_gen=mae_gen(rows),
        bleu_s=math.fsum(i.bleu_s for i in rows) / len(rows),
        mean_added=math.fsum(i.n_added for i in rows) / len(rows),
        count=len(rows),
        instances=tuple(instances),
    )


def _plan_for(method: str, problem, circ, retrieval_corpus, judge):
    if method == "ilp":
        return plan_ilp(problem, circ)
    if method == "greedy":
        return plan_greedy(problem, circ)
    if method == "oracle":
        return plan_oracle(problem, circ)
    if method == "retrieval":
        return plan_retrieval(problem, circ, retrieval_corpus, judge)
    if method == "none":
        return plan_none(problem, circ)
    raise ConfigError(f"unknown planning method {method!r}")


def evaluate_method(
    corpus: list[tuple[str, str]],
    circ: Circumstance,
    method: str,
    *,
    retrieval_corpus: list[str] | None = None,
    judge=None,
    max_added: int = 3,
    beam: int = 3,
    negativity: bool | None = None,
    subj_ind: bool = True,
    with_realization: bool = True,
) -> EvalReport:
    """Plan, realize and score every (id, text) message with one method."""
    instances: list[EvalInstance] = []
    for message_id, text in corpus:
        m = tokenize(text)
        problem = build_problem(
            m, circ, max_added=max_added, negativity=negativity, subj_ind=subj_ind, judge=judge
        )
        view_msg = simulate_channel(m, circ.channel, circ.lexicon)
        view_seen = extract_strategies(view_msg, circ.lexicon).strategies
        gap_none = abs(problem.target - perceive(circ.receiver, view_seen))
        try:
            plan = _plan_for(method, problem, circ, retrieval_corpus or [], judge)
        except PoliteplanError as exc:
            instances.append(
                EvalInstance(
                    message_id=message_id,
                    text=text,
                    s_in=problem.s_in,
                    target=problem.target,
                    plan=plan_none(problem, circ),
                    candidate=None,
                    receiver_view=view_msg.raw,
                    gap_plan=float("nan"),
                    gap_gen=float("nan"),
                    gap_none=gap_none,
                    bleu_s=float("nan"),
                    n_added=0,
                    error=str(exc),
                )
            )
            continue
        gap_plan = abs(problem.target - perceive(circ.receiver, plan.s_out))
        candidate = None
        if method == "none":
            # the receiver's view of the untouched message is the "output"
            seen = view_seen
            predicted = perceive(circ.receiver, seen)
            candidate = RealizationCandidate(
                text=view_msg.raw,
                realized=seen,
                predicted=predicted,
                gap=abs(problem.target - predicted),
                trace=(),
                shortfall=False,
                missing=frozenset(),
            )
        elif with_realization:
            candidate = realize_alternatives(m, plan, circ, beam=beam)[0]
        if candidate is not None:
            gap_gen = candidate.gap
            bleu_s = bleu(candidate.text, text)
        else:
            gap_gen = gap_plan
            bleu_s = float("nan")
        instances.append(
            EvalInstance(
                message_id=message_id,
                text=text,
                s_in=problem.s_in,
                target=problem.target,
                plan=plan,
                candidate=candidate,
                receiver_view=view_msg.raw,
                gap_plan=gap_plan,
                gap_gen=gap_gen,
                gap_none=gap_none,
                bleu_s=bleu_s,
                n_added=len(plan.s_out - problem.s_in),
                error=None,
            )
        )
    return _aggregate(method, instances)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    corpus: str
    lexicon: str = "builtin"
    sender: str = "builtin:average"
    receiver: str = "builtin:average"
    channel: str = "builtin:all-safe"
    judge: str | None = None
    retrieval_corpus: str | None = None
    methods: tuple[str, ...] = METHODS
    max_added: int = 3
    beam: int = 3
    subj_ind: bool = True
    negativity: str | bool = "auto"
    top_gap: int | None = None
    with_realization: bool = True


_CONFIG_KEYS = {
    "name", "corpus", "lexicon", "sender", "receiver", "channel", "judge",
    "retrieval_corpus", "methods", "max_added", "beam", "subj_ind",
    "negativity", "top_gap", "with_realization",
}


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("experiment config must be an object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown experiment config fields: {sorted(unknown)}")
    for required in ("name", "corpus"):
        if required not in doc:
            raise ConfigError(f"experiment config is missing {required!r}")
    if "methods" in doc:
        doc["methods"] = tuple(doc["methods"])
    return ExperimentConfig(**doc)


def load_corpus(path) -> list[tuple[str, str]]:
    """Line-delimited {id?, text} records."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{lineno}: malformed corpus record: {exc}") from exc
            out.append((str(rec.get("id", lineno)), str(rec["text"])))
    return out


def run_experiment(config: ExperimentConfig) -> dict[str, EvalReport]:
    lex = resolve_lexicon(config.lexicon)
    circ = Circumstance(
        sender=resolve_model(config.sender),
        receiver=resolve_model(config.receiver),
        channel=resolve_channel(config.channel, lex),
        lexicon=lex,
    )
    judge = resolve_model(config.judge) if config.judge else None
    corpus = load_corpus(config.corpus)
    retrieval_corpus = (
        [t for _, t in load_corpus(config.retrieval_corpus)]
        if config.retrieval_corpus
        else [t for _, t in corpus]
    )
    negativity = None if config.negativity == "auto" else bool(config.negativity)

    if config.top_gap:
        scored = []
        for idx, (message_id, text) in enumerate(corpus):
            m = tokenize(text)
            problem = build_problem(m, circ, negativity=negativity, subj_ind=config.subj_ind)
            seen = extract_strategies(simulate_channel(m, circ.channel, lex), lex).strategies
            gap = abs(problem.target - perceive(circ.receiver, seen))
            scored.append((-gap, idx, (message_id, text)))
        scored.sort()
        corpus = [entry for _, _, entry in scored[: config.top_gap]]

    reports = {}
    for method in config.methods:
        reports[method] = evaluate_method(
            corpus,
            circ,
            method,
            retrieval_corpus=retrieval_corpus,
            judge=judge,
            max_added=config.max_added,
            beam=config.beam,
            negativity=negativity,
            subj_ind=config.subj_ind,
            with_realization=config.with_realization,
        )
    return reports


def render_table(reports: dict[str, EvalReport]) -> str:
    """Aligned-column summary, one row per method."""
    headers = ("method", "mae_plan", "mae_gen", "bleu_s", "#-added", "n")
    rows = [headers]
    for method, rep in reports.items():
        rows.append(
            (
                method,
                f"{rep.mae_plan:.3f}",
                f"{rep.mae_gen:.3f}",
                f"{rep.bleu_s:.1f}",
                f"{rep.mean_added:.2f}",
                str(rep.count),
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(headers))))
    return "\n".join(lines)


def write_reports(reports: dict[str, EvalReport], out_dir) -> None:
    import os

    os.makedirs(out_dir, exist_ok=True)
    for method, rep in reports.items():
        with open(os.path.join(out_dir, f"report_{method}.json"), "w", encoding="utf-8") as fh:
            json.dump(rep.to_dict(), fh, indent=2)
            fh.write("\n")
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(render_table(reports) + "\n")
