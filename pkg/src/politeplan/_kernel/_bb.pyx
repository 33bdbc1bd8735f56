# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled branch-and-bound kernel.

Mirror of ``bb_py.solve``: identical search order, identical arithmetic
order, identical tie-breaking. Any behavioural change must land in both.
"""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

cdef double _EPS = 1e-12


cdef struct _Ctx:
    int m
    int budget
    double target
    unsigned long long fixed_mask
    double* b
    unsigned char* costs
    unsigned long long* bits
    double* pos_kept
    double* neg_kept
    double** pos_pref
    double** neg_pref
    int* pos_len
    int* neg_len
    double best_gap
    unsigned long long best_mask
    int best_added
    long long nodes


cdef bint _mask_less(unsigned long long a, unsigned long long b) noexcept nogil:
    cdef unsigned long long x, d, loser
    cdef int idx
    if a == b:
        return False
    x = a ^ b
    d = x & (~x + 1)
    idx = 0
    while (d >> idx) > 1:
        idx += 1
    loser = b if (a & d) else a
    if loser >> (idx + 1):
        return (a & d) != 0
    return (a & d) == 0


cdef void _rec(_Ctx* c, int i, double cur, int used, unsigned long long mask) noexcept nogil:
    cdef double gap, hi, lo, bound
    cdef unsigned long long full
    cdef int remaining, pk, nk
    c.nodes += 1
    if i == c.m:
        gap = fabs(cur - c.target)
        full = c.fixed_mask | mask
        if gap < c.best_gap - _EPS or c.best_added < 0:
            c.best_gap = gap
            c.best_mask = full
            c.best_added = used
        elif gap <= c.best_gap + _EPS:
            if gap < c.best_gap:
                c.best_gap = gap
            if used < c.best_added or (used == c.best_added and _mask_less(full, c.best_mask)):
                c.best_mask = full
                c.best_added = used
        return
    remaining = c.budget - used
    pk = remaining if remaining < c.pos_len[i] else c.pos_len[i] - 1
    nk = remaining if remaining < c.neg_len[i] else c.neg_len[i] - 1
    hi = cur + c.pos_kept[i] + c.pos_pref[i][pk]
    lo = cur + c.neg_kept[i] + c.neg_pref[i][nk]
    if c.target > hi:
        bound = c.target - hi
    elif c.target < lo:
        bound = lo - c.target
    else:
        bound = 0.0
    if bound > c.best_gap + _EPS:
        return
    if not c.costs[i]:
        _rec(c, i + 1, cur + c.b[i], used, mask | c.bits[i])
    elif used < c.budget:
        _rec(c, i + 1, cur + c.b[i], used + 1, mask | c.bits[i])
    _rec(c, i + 1, cur, used, mask)


def solve(coeffs, in_mask, fixed_one_mask, free_indices, target_resid, budget):
    """See ``bb_py.solve``; same contract, compiled search."""
    cdef int m = len(free_indices)
    if budget is None or budget < 0:
        budget = m

    order = sorted(free_indices, key=lambda i: (-abs(coeffs[i]), i))
    b_py = [float(coeffs[i]) for i in order]
    costs_py = [((in_mask >> i) & 1) == 0 for i in order]
    bits_py = [1 << i for i in order]

    pos_kept_py = [0.0] * (m + 1)
    neg_kept_py = [0.0] * (m + 1)
    pos_pref_py = [None] * (m + 1)
    neg_pref_py = [None] * (m + 1)
    pos_pref_py[m] = [0.0]
    neg_pref_py[m] = [0.0]
    cdef int i
    for i in range(m - 1, -1, -1):
        pos_kept_py[i] = pos_kept_py[i + 1]
        neg_kept_py[i] = neg_kept_py[i + 1]
        if not costs_py[i]:
            if b_py[i] > 0.0:
                pos_kept_py[i] = pos_kept_py[i + 1] + b_py[i]
            elif b_py[i] < 0.0:
                neg_kept_py[i] = neg_kept_py[i + 1] + b_py[i]
        pos_vals = sorted((b_py[j] for j in range(i, m) if costs_py[j] and b_py[j] > 0.0), reverse=True)
        neg_vals = sorted(b_py[j] for j in range(i, m) if costs_py[j] and b_py[j] < 0.0)
        acc = 0.0
        row = [acc]
        for v in pos_vals:
            acc = acc + v
            row.append(acc)
        pos_pref_py[i] = row
        acc = 0.0
        row = [acc]
        for v in neg_vals:
            acc = acc + v
            row.append(acc)
        neg_pref_py[i] = row

    cdef _Ctx c
    c.m = m
    c.budget = budget
    c.target = target_resid
    c.fixed_mask = fixed_one_mask
    c.best_gap = float("inf")
    c.best_mask = 0
    c.best_added = -1
    c.nodes = 0

    c.b = <double*> malloc(m * sizeof(double)) if m else NULL
    c.costs = <unsigned char*> malloc(m * sizeof(unsigned char)) if m else NULL
    c.bits = <unsigned long long*> malloc(m * sizeof(unsigned long long)) if m else NULL
    c.pos_kept = <double*> malloc((m + 1) * sizeof(double))
    c.neg_kept = <double*> malloc((m + 1) * sizeof(double))
    c.pos_pref = <double**> malloc((m + 1) * sizeof(double*))
    c.neg_pref = <double**> malloc((m + 1) * sizeof(double*))
    c.pos_len = <int*> malloc((m + 1) * sizeof(int))
    c.neg_len = <int*> malloc((m + 1) * sizeof(int))

    cdef int j
    for i in range(m + 1):
        c.pos_pref[i] = NULL
        c.neg_pref[i] = NULL
    try:
        for i in range(m):
            c.b[i] = b_py[i]
            c.costs[i] = 1 if costs_py[i] else 0
            c.bits[i] = bits_py[i]
        for i in range(m + 1):
            c.pos_kept[i] = pos_kept_py[i]
            c.neg_kept[i] = neg_kept_py[i]
            c.pos_len[i] = len(pos_pref_py[i])
            c.neg_len[i] = len(neg_pref_py[i])
            c.pos_pref[i] = <double*> malloc(c.pos_len[i] * sizeof(double))
            c.neg_pref[i] = <double*> malloc(c.neg_len[i] * sizeof(double))
            for j in range(c.pos_len[i]):
                c.pos_pref[i][j] = pos_pref_py[i][j]
            for j in range(c.neg_len[i]):
                c.neg_pref[i][j] = neg_pref_py[i][j]

        with nogil:
            _rec(&c, 0, 0.0, 0, 0)
    finally:
        for i in range(m + 1):
            if c.pos_pref[i] != NULL:
                free(c.pos_pref[i])
            if c.neg_pref[i] != NULL:
                free(c.neg_pref[i])
        free(c.pos_pref)
        free(c.neg_pref)
        free(c.pos_kept)
        free(c.neg_kept)
        free(c.pos_len)
        free(c.neg_len)
        if c.b != NULL:
            free(c.b)
        if c.costs != NULL:
            free(c.costs)
        if c.bits != NULL:
            free(c.bits)

    return int(c.best_mask), float(c.best_gap), int(c.nodes)
