"""Strategy planning: choose the target strategy set for a circumstance.

Planners minimize the gap between the politeness level the sender intends
for the original strategy set and the level the receiver will perceive in
the planned set, subject to:

* channel safety: only strategies the channel transmits may be chosen;
* negativity (optional): no negative-coefficient strategy in positive inputs;
* request-form coupling (optional): Subjunctive/Indicative may only be
  substituted for each other, keeping their joint count;
* an upper bound on newly added strategies (default 3).

``plan_ilp`` finds a global optimum by branch and bound; ``plan_oracle`` is
the exhaustive-enumeration twin used for verification; ``plan_greedy`` and
``plan_retrieval`` are the baselines. Equal-gap optima resolve to fewer
added strategies, then to lexicon order.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .channel import ChannelSpec
from .errors import (
    EmptyPoolError,
    InfeasiblePlanError,
    NoSafeStrategyError,
    UniverseTooLargeError,
)
from .extraction import Message, extract_strategies, non_marker_words, tokenize
from .lexicon import StrategyLexicon, default_lexicon
from .perception import POSITIVE, PerceptionModel, perceive, polarity

SUBJUNCTIVE = "Subjunctive"
INDICATIVE = "Indicative"
REQUEST_PAIR = (SUBJUNCTIVE, INDICATIVE)


@dataclass(frozen=True)
class Circumstance:
    sender: PerceptionModel
    receiver: PerceptionModel
    channel: ChannelSpec
    lexicon: StrategyLexicon = field(default_factory=default_lexicon)

    def __post_init__(self):
        for s in self.lexicon.ids():
            if s not in self.sender.coefficients or s not in self.receiver.coefficients:
                raise ValueError(f"perception models do not cover strategy {s!r}")
            if s not in self.channel.safety:
                raise ValueError(f"channel spec does not cover strategy {s!r}")


@dataclass(frozen=True)
class ConstraintSet:
    negativity: bool = False
    subj_ind: bool = True
    max_added_enabled: bool = True
    forbidden: frozenset[str] = frozenset()
    required: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PlanProblem:
    s_in: frozenset[str]
    target: float
    constraints: ConstraintSet
    max_added: int = 3
    message: Message | None = field(default=None, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.target):
            raise ValueError("target politeness level must be finite")
        if self.max_added < 0:
            raise ValueError("max_added must be >= 0")


@dataclass(frozen=True)
class Plan:
    s_out: frozenset[str]
    achieved: float
    gap: float
    added: frozenset[str]
    removed: frozenset[str]
    method: str
    nodes: int = 0
    elapsed: float = 0.0


def build_problem(
    m: Message | str,
    circ: Circumstance,
    *,
    max_added: int = 3,
    max_added_enabled: bool = True,
    negativity: bool | None = None,
    subj_ind: bool = True,
    judge: PerceptionModel | None = None,
    forbidden=(),
    required=(),
) -> PlanProblem:
    """Extract the input strategy set and freeze the planning instance.

    ``negativity=None`` auto-enables the constraint exactly when the judge
    model (defaults to the sender) rates the input set non-negative.
    """
    if isinstance(m, str):
        m = tokenize(m)
    s_in = extract_strategies(m, circ.lexicon).strategies
    target = perceive(circ.sender, s_in)
    if negativity is None:
        negativity = polarity(judge or circ.sender, s_in) == POSITIVE
    constraints = ConstraintSet(
        negativity=negativity,
        subj_ind=subj_ind,
        max_added_enabled=max_added_enabled,
        forbidden=frozenset(forbidden),
        required=frozenset(required),
    )
    return PlanProblem(
        s_in=s_in, target=target, constraints=constraints, max_added=max_added, message=m
    )


# --- shared constraint preprocessing -----------------------------------------


@dataclass
class _Prepared:
    ids: tuple[str, ...]
    index: dict[str, int]
    coeffs: list[float]  # receiver coefficients in lexicon order
    forbidden: set[str]  # channel-unsafe + extra forbidden + negativity zeros
    required: set[str]
    pair: tuple[str, ...]  # request-form strategies present in the lexicon
    pair_count: int  # how many of them the plan must contain
    slot_options: list[frozenset[str]]  # feasible pair selections
    budget: int | None  # total allowed additions, None = unconstrained


def _prepare(problem: PlanProblem, circ: Circumstance) -> _Prepared:
    lex = circ.lexicon
    ids = lex.ids()
    index = {s: i for i, s in enumerate(ids)}
    coeffs = [circ.receiver.coefficients[s] for s in ids]
    cons = problem.constraints

    forbidden = {s for s in ids if not circ.channel.is_safe(s)}
    forbidden |= {s for s in cons.forbidden if s in index}
    if cons.negativity:
        forbidden |= {s for s in ids if circ.receiver.coefficients[s] < 0.0}

    required = {s for s in cons.required if s in index}
    conflict = required & forbidden
    if conflict:
        name = lex.sort_ids(conflict)[0]
        reasons = []
        if not circ.channel.is_safe(name):
            reasons.append("channel-unsafe")
        if cons.negativity and circ.receiver.coefficients[name] < 0.0:
            reasons.append("negative under the negativity constraint")
        if name in cons.forbidden:
            reasons.append("explicitly forbidden")
        raise InfeasiblePlanError(
            f"required strategy {name!r} is {', '.join(reasons) or 'unavailable'}"
        )

    pair = tuple(s for s in REQUEST_PAIR if s in index)
    if cons.subj_ind and pair:
        pair_count = len(problem.s_in & set(pair))
        options = []
        from itertools import combinations

        for combo in combinations(pair, pair_count):
            selected = frozenset(combo)
            if selected & forbidden:
                continue
            if (set(pair) - selected) & required:
                continue
            options.append(selected)
        if not options:
            raise InfeasiblePlanError(
                f"request-form constraint needs exactly {pair_count} of {'/'.join(pair)} "
                "but no admissible selection exists"
            )
    else:
        pair_count = 0
        options = [frozenset()]
        pair = () if not cons.subj_ind else pair

    budget = problem.max_added if cons.max_added_enabled else None
    if budget is not None:
        feasible_options = []
        for selected in options:
            base_added = len((required | selected) - problem.s_in)
            if base_added <= budget:
                feasible_options.append(selected)
        if not feasible_options:
            raise InfeasiblePlanError(
                f"mandatory additions exceed the cap of {budget} new strategies"
            )
        options = feasible_options

    return _Prepared(
        ids=ids,
        index=index,
        coeffs=coeffs,
        forbidden=forbidden,
        required=required,
        pair=pair,
        pair_count=pair_count,
        slot_options=options,
        budget=budget,
    )


def _mask_of(strategies, index) -> int:
    mask = 0
    for s in strategies:
        mask |= 1 << index[s]
    return mask


def _set_of(mask: int, ids) -> frozenset[str]:
    return frozenset(ids[i] for i in range(len(ids)) if (mask >> i) & 1)


def _lex_key(strategies, index) -> tuple[int, ...]:
    return tuple(sorted(index[s] for s in strategies))


def _finish(problem: PlanProblem, circ: Circumstance, s_out: frozenset[str], method: str,
            nodes: int = 0, elapsed: float = 0.0) -> Plan:
    achieved = perceive(circ.receiver, s_out)
    return Plan(
        s_out=s_out,
        achieved=achieved,
        gap=abs(problem.target - achieved),
        added=s_out - problem.s_in,
        removed=frozenset(problem.s_in) - s_out,
        method=method,
        nodes=nodes,
        elapsed=elapsed,
    )


def _pick_best(problem, circ, candidates: list[frozenset[str]]):
    """Canonical comparison across candidate sets: gap, |added|, lexicon order."""
    index = {s: i for i, s in enumerate(circ.lexicon.ids())}

    def key(s_out):
        achieved = perceive(circ.receiver, s_out)
        return (abs(problem.target - achieved), len(s_out - problem.s_in), _lex_key(s_out, index))

    return min(candidates, key=key)


# --- planners ----------------------------------------------------------------


def plan_ilp(problem: PlanProblem, circ: Circumstance) -> Plan:
    """Globally optimal plan via branch and bound on the selection bits."""
    start = time.perf_counter()
    prep = _prepare(problem, circ)
    n = len(prep.ids)
    if n > 63:
        raise UniverseTooLargeError(f"{n} strategies exceed the 63-variable solver limit")
    in_mask = _mask_of(problem.s_in, prep.index)
    candidates = []
    total_nodes = 0
    for selected in prep.slot_options:
        fixed_ones = prep.required | selected
        zeros = prep.forbidden | (set(prep.pair) - selected if prep.pair else set())
        free = [i for i, s in enumerate(prep.ids) if s not in fixed_ones and s not in zeros]
        fixed_mask = _mask_of(fixed_ones, prep.index)
        resid = problem.target - math.fsum(
            [circ.receiver.intercept] + [circ.receiver.coefficients[s] for s in fixed_ones]
        )
        if prep.budget is None:
            budget = -1
        else:
            budget = prep.budget - len(fixed_ones - problem.s_in)
        mask, _, nodes = _kernel.solve(prep.coeffs, in_mask, fixed_mask, free, resid, budget)
        total_nodes += nodes
        candidates.append(_set_of(mask, prep.ids))
    best = _pick_best(problem, circ, candidates)
    return _finish(problem, circ, best, "ilp", nodes=total_nodes,
                   elapsed=time.perf_counter() - start)


_PC16 = None


def _popcount(arr: np.ndarray) -> np.ndarray:
    global _PC16
    if _PC16 is None:
        _PC16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)
    return _PC16[arr & 0xFFFF].astype(np.int32) + _PC16[(arr >> 16) & 0xFFFF]


def plan_oracle(problem: PlanProblem, circ: Circumstance) -> Plan:
    """Exhaustive enumeration over all subsets; the verification twin of plan_ilp."""
    start = time.perf_counter()
    n = len(circ.lexicon)
    if n > 24:
        raise UniverseTooLargeError(f"{n} strategies is too many to enumerate exhaustively")
    prep = _prepare(problem, circ)
    ids = prep.ids
    masks = np.arange(1 << n, dtype=np.uint32)

    keep = np.ones(masks.shape, dtype=bool)
    forbidden_mask = _mask_of(prep.forbidden, prep.index)
    required_mask = _mask_of(prep.required, prep.index)
    if forbidden_mask:
        keep &= (masks & forbidden_mask) == 0
    if required_mask:
        keep &= (masks & required_mask) == required_mask
    if problem.constraints.subj_ind and prep.pair:
        pair_mask = _mask_of(prep.pair, prep.index)
        keep &= _popcount(masks & pair_mask) == prep.pair_count
    in_mask = _mask_of(problem.s_in, prep.index)
    if prep.budget is not None:
        keep &= _popcount(masks & np.uint32(~in_mask & ((1 << n) - 1))) <= prep.budget
    feasible = masks[keep]
    if feasible.size == 0:
        raise InfeasiblePlanError("no strategy combination satisfies the active constraints")

    sums = np.full(feasible.shape, circ.receiver.intercept, dtype=np.float64)
    for i in range(n):
        sums += prep.coeffs[i] * ((feasible >> np.uint32(i)) & 1)
    gaps = np.abs(problem.target - sums)
    pool = feasible[gaps <= gaps.min() + 1e-12]
    candidates = [_set_of(int(mask), ids) for mask in pool]
    best = _pick_best(problem, circ, candidates)
    return _finish(problem, circ, best, "oracle", nodes=int(feasible.size),
                   elapsed=time.perf_counter() - start)


def plan_greedy(problem: PlanProblem, circ: Circumstance) -> Plan:
    """Per-strategy nearest-strength replacement, honoring the active constraints.

    Each input strategy is re-matched to the safe strategy whose receiver
    coefficient is closest to the strategy's sender coefficient; a strategy
    that is its own best match is kept. Replacements that would exceed the
    addition cap are dropped rather than substituted, so the result is always
    a feasible point of the ILP search space.
    """
    start = time.perf_counter()
    prep = _prepare(problem, circ)
    lex = circ.lexicon
    a = circ.sender.coefficients
    b = circ.receiver.coefficients
    eligible = [s for s in prep.ids if s not in prep.forbidden]
    pair_set = set(prep.pair) if problem.constraints.subj_ind else set()

    chosen: set[str] = set()
    budget = prep.budget
    added_used = 0

    def try_add(s: str, mandatory: bool) -> bool:
        nonlocal added_used
        if s in chosen:
            return True
        cost = 0 if s in problem.s_in else 1
        if budget is not None and added_used + cost > budget:
            if mandatory:
                raise InfeasiblePlanError(
                    f"mandatory strategy {s!r} exceeds the cap of {budget} new strategies"
                )
            return False
        chosen.add(s)
        added_used += cost
        return True

    def best_match(source: str, pool: list[str]) -> str:
        if not pool:
            raise NoSafeStrategyError(
                f"no safe replacement candidate available for {source!r}"
            )
        return min(pool, key=lambda c: (abs(a[source] - b[c]), c != source, prep.index[c]))

    # mandatory items first: required strategies, then the request-form slot;
    # _prepare has already verified this combination fits the addition cap
    for r in lex.sort_ids(prep.required):
        try_add(r, mandatory=True)

    if problem.constraints.subj_ind and prep.pair and prep.pair_count:
        members = lex.sort_ids(problem.s_in & pair_set)

        def slot_key(selection: frozenset[str]):
            if prep.pair_count == 1 and len(members) == 1:
                (m,), (c,) = members, tuple(selection)
                return (abs(a[m] - b[c]), c != m, prep.index[c])
            return tuple(sorted(prep.index[s] for s in selection))

        for s in lex.sort_ids(min(prep.slot_options, key=slot_key)):
            try_add(s, mandatory=True)

    replacement_pool = [s for s in eligible if s not in pair_set]
    for s in lex.sort_ids(problem.s_in):
        if s in pair_set:
            continue  # handled by the slot above
        candidate = best_match(s, replacement_pool)
        try_add(candidate, mandatory=False)

    return _finish(problem, circ, frozenset(chosen), "greedy",
                   elapsed=time.perf_counter() - start)


def _repair_to_feasible(s_set: frozenset[str], problem: PlanProblem, circ: Circumstance,
                        prep: _Prepared) -> frozenset[str]:
    """Deterministically project a candidate set into the feasible region."""
    lex = circ.lexicon
    b = circ.receiver.coefficients
    t = {s for s in s_set if s in prep.index and s not in prep.forbidden}

    mandatory = set(prep.required)
    if problem.constraints.subj_ind and prep.pair:
        pair = set(prep.pair)

        def option_key(selection: frozenset[str]):
            return (
                -len(selection & t),  # keep what was retrieved where possible
                len(selection - problem.s_in),  # then prefer the cheaper selection
                tuple(sorted(prep.index[s] for s in selection)),
            )

        selection = min(prep.slot_options, key=option_key)
        t -= pair
        t |= selection
        mandatory |= selection
    t |= prep.required

    if prep.budget is not None:
        added = t - problem.s_in
        droppable = lex.sort_ids(added - mandatory)
        droppable.sort(key=lambda s: (abs(b[s]), prep.index[s]))
        while len(added) > prep.budget and droppable:
            victim = droppable.pop(0)
            t.discard(victim)
            added = t - problem.s_in
        if len(added) > prep.budget:
            raise InfeasiblePlanError(
                f"mandatory additions exceed the cap of {prep.budget} new strategies"
            )
    return frozenset(t)


def plan_retrieval(
    problem: PlanProblem,
    circ: Circumstance,
    corpus: list[Message | str],
    judge: PerceptionModel | None = None,
) -> Plan:
    """Copy the strategy set of the most similar same-polarity corpus message.

    Similarity is cosine over TF-IDF unigram vectors of non-marker tokens;
    the copied set is then projected into the active feasible region so the
    baseline competes under the same constraints as the optimizing planners.
    """
    start = time.perf_counter()
    judge = judge or circ.sender
    if not corpus:
        raise EmptyPoolError("retrieval corpus is empty")
    prep = _prepare(problem, circ)
    lex = circ.lexicon
    msgs = [tokenize(t) if isinstance(t, str) else t for t in corpus]
    extractions = [extract_strategies(m, lex) for m in msgs]
    want = polarity(judge, problem.s_in)
    pool = [i for i, ex in enumerate(extractions) if polarity(judge, ex.strategies) == want]
    if not pool:
        raise EmptyPoolError(f"no corpus message with {want} polarity")

    docs = [non_marker_words(m, lex) for m in msgs]
    df = Counter()
    for doc in docs:
        df.update(set(doc))
    n_docs = len(docs)

    def tfidf(words: list[str]) -> tuple[dict[str, float], float]:
        tf = Counter(words)
        vec = {t: c * (math.log((1 + n_docs) / (1 + df[t])) + 1.0) for t, c in tf.items()}
        norm = math.sqrt(math.fsum(v * v for v in vec.values()))
        return vec, norm

    # query = the input message's non-marker tokens (markers carry the style,
    # the rest carries the content being matched)
    query_words = non_marker_words(problem.message, lex) if problem.message is not None else []
    qv, qn = tfidf(query_words)
    sims = []
    for i in pool:
        dv, dn = tfidf(docs[i])
        if qn == 0.0 or dn == 0.0:
            sims.append(0.0)
            continue
        dot = math.fsum(qv[t] * dv[t] for t in qv if t in dv)
        sims.append(dot / (qn * dn))
    top = pool[max(range(len(pool)), key=lambda j: (sims[j], -j))]
    s_out = _repair_to_feasible(extractions[top].strategies, problem, circ, prep)
    return _finish(problem, circ, s_out, "retrieval", elapsed=time.perf_counter() - start)


def plan_none(problem: PlanProblem, circ: Circumstance) -> Plan:
    """No intervention: the channel-surviving subset of the input set."""
    s_out = frozenset(s for s in problem.s_in if circ.channel.is_safe(s))
    return _finish(problem, circ, s_out, "none")


PLANNERS = {
    "ilp": plan_ilp,
    "greedy": plan_greedy,
    "oracle": plan_oracle,
    "none": plan_none,
}
