"""Pure-Python branch-and-bound kernel for target-matching subset selection.

Minimizes |sum of chosen coefficients - target_resid| over binary choices for
the free variables, subject to a budget on how many chosen variables lie
outside the input set. Equal-gap optima (within a 1e-12 tie window) resolve
to fewer added strategies, then to the lexicographically smallest selection
(selections compared as ascending index tuples).

The Cython kernel in ``_bb.pyx`` implements the identical search with the
identical arithmetic order; both must stay in lockstep.
"""

from __future__ import annotations

_EPS = 1e-12


def mask_less(a: int, b: int) -> bool:
    """Ascending-index-tuple ordering on selection bitmasks."""
    if a == b:
        return False
    x = a ^ b
    d = x & -x  # lowest differing bit
    a_has_d = bool(a & d)
    loser = b if a_has_d else a
    if loser >> d.bit_length():  # other set has an element above d
        return a_has_d
    return not a_has_d


def solve(coeffs, in_mask, fixed_one_mask, free_indices, target_resid, budget):
    """Search the free-variable subtree; returns (full_mask, gap, nodes).

    coeffs: per-variable coefficients, indexed by canonical position.
    in_mask: bitmask of the input strategy set (choosing outside it costs budget).
    fixed_one_mask: variables already forced on (their coefficient share is
        assumed to be folded into target_resid by the caller).
    budget: max number of free variables chosen outside in_mask; -1 = unlimited.
    """
    m = len(free_indices)
    if budget is None or budget < 0:
        budget = m

    order = sorted(free_indices, key=lambda i: (-abs(coeffs[i]), i))
    b = [float(coeffs[i]) for i in order]
    costs_budget = [((in_mask >> i) & 1) == 0 for i in order]
    bits = [1 << i for i in order]

    # Suffix bounds: for suffix i and remaining budget k, the reachable sum of
    # the suffix lies in [neg_kept[i] + neg_pref[i][k'], pos_kept[i] + pos_pref[i][k']]
    # where k' = min(k, row length) and the pref rows hold the k best (worst)
    # budget-costing coefficients, sorted.
    pos_kept = [0.0] * (m + 1)
    neg_kept = [0.0] * (m + 1)
    pos_pref: list[list[float]] = [None] * (m + 1)
    neg_pref: list[list[float]] = [None] * (m + 1)
    pos_pref[m] = [0.0]
    neg_pref[m] = [0.0]
    for i in range(m - 1, -1, -1):
        pos_kept[i] = pos_kept[i + 1]
        neg_kept[i] = neg_kept[i + 1]
        if not costs_budget[i]:
            if b[i] > 0.0:
                pos_kept[i] = pos_kept[i + 1] + b[i]
            elif b[i] < 0.0:
                neg_kept[i] = neg_kept[i + 1] + b[i]
        pos_vals = sorted((b[j] for j in range(i, m) if costs_budget[j] and b[j] > 0.0), reverse=True)
        neg_vals = sorted(b[j] for j in range(i, m) if costs_budget[j] and b[j] < 0.0)
        acc = 0.0
        row = [acc]
        for v in pos_vals:
            acc = acc + v
            row.append(acc)
        pos_pref[i] = row
        acc = 0.0
        row = [acc]
        for v in neg_vals:
            acc = acc + v
            row.append(acc)
        neg_pref[i] = row

    best_gap = float("inf")
    best_mask = 0
    best_added = -1
    nodes = 0

    def rec(i: int, cur: float, used: int, mask: int) -> None:
        nonlocal best_gap, best_mask, best_added, nodes
        nodes += 1
        if i == m:
            gap = abs(cur - target_resid)
            full = fixed_one_mask | mask
            if gap < best_gap - _EPS or best_added < 0:
                best_gap, best_mask, best_added = gap, full, used
            elif gap <= best_gap + _EPS:
                if gap < best_gap:
                    best_gap = gap
                if used < best_added or (used == best_added and mask_less(full, best_mask)):
                    best_mask, best_added = full, used
            return
        remaining = budget - used
        prow = pos_pref[i]
        nrow = neg_pref[i]
        hi = cur + pos_kept[i] + prow[remaining if remaining < len(prow) else len(prow) - 1]
        lo = cur + neg_kept[i] + nrow[remaining if remaining < len(nrow) else len(nrow) - 1]
        if target_resid > hi:
            bound = target_resid - hi
        elif target_resid < lo:
            bound = lo - target_resid
        else:
            bound = 0.0
        if bound > best_gap + _EPS:
            return
        if not costs_budget[i]:
            rec(i + 1, cur + b[i], used, mask | bits[i])
        elif used < budget:
            rec(i + 1, cur + b[i], used + 1, mask | bits[i])
        rec(i + 1, cur, used, mask)

    rec(0, 0.0, 0, 0)
    return best_mask, best_gap, nodes
