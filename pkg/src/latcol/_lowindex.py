"""Backtracking search over standardized partial coset tables.

The search enumerates every closed coset table of degree <= max_index in
standard form (cosets numbered by first appearance in row-major scan order)
and keeps exactly the tables that are lexicographically minimal over all
base-coset renumberings, i.e. one table per subgroup conjugacy class.

Consistency is maintained by deduction scanning: after each trial definition
all relator rotations passing through the new edge are scanned, forced
entries are filled in, and any mismatch kills the branch (coincidences never
merge cosets here, unlike Todd-Coxeter).  The first-in-class filter runs
incrementally: a partial renumbering from an alternative base that is already
lexicographically smaller prunes the subtree, one that is already larger
retires that base for the whole subtree.

The hot loop is written against flat int32 arrays so numba can JIT it; the
same function runs as plain Python when numba is unavailable.
"""

from __future__ import annotations

import os

import numpy as np

STATUS_OK = 0
STATUS_BUDGET = 1

_DEFAULT_BUDGET = 1_000_000_000


def default_node_budget() -> int:
    value = os.environ.get("LATCOL_NODE_BUDGET")
    return int(value) if value else _DEFAULT_BUDGET


def _search_impl(width, inv_col, max_index, rot_flat, rot_off, bycol_idx,
                 bycol_off, node_budget, results):
    W = width
    N = max_index
    table = np.full(N * W, -1, dtype=np.int32)
    n = 1
    undef = W
    nodes = 0

    trail = np.empty(N * W + 8, dtype=np.int32)
    t_top = 0
    dq = np.empty(2 * N * W + 8, dtype=np.int32)

    # per-frame state; frame d was created by the successful assignment of
    # its parent and stores the marks needed to reverse that assignment
    max_depth = N * W + 2
    f_pos = np.empty(max_depth, dtype=np.int32)
    f_beta = np.empty(max_depth, dtype=np.int32)
    f_n = np.empty(max_depth, dtype=np.int32)
    f_trail = np.empty(max_depth, dtype=np.int32)
    f_undef = np.empty(max_depth, dtype=np.int32)
    f_dead = np.empty(max_depth, dtype=np.int32)

    dead_at = np.full(N, -1, dtype=np.int32)
    dead_stack = np.empty(N + 1, dtype=np.int32)
    d_top = 0

    sigma = np.full(N, -1, dtype=np.int32)
    order = np.empty(N, dtype=np.int32)

    depth = 0
    f_pos[0] = 0
    f_beta[0] = 0
    f_n[0] = 1
    f_trail[0] = 0
    f_undef[0] = W
    f_dead[0] = 0

    while depth >= 0:
        pos = f_pos[depth]
        n = f_n[depth]
        advanced = False
        while f_beta[depth] <= n:
            beta = f_beta[depth]
            f_beta[depth] += 1
            alpha = pos // W
            col = pos % W
            ic = inv_col[col]
            if beta == n:
                if n >= N:
                    break
            else:
                if table[beta * W + ic] != -1:
                    continue
            nodes += 1
            if nodes > node_budget:
                return nodes, STATUS_BUDGET

            t_mark = t_top
            d_mark = d_top
            undef_mark = undef
            new_coset = beta == n
            if new_coset:
                undef += W
            cur_n = n + 1 if new_coset else n

            # primary assignment, then deduction closure
            ok = True
            table[pos] = beta
            trail[t_top] = pos
            t_top += 1
            undef -= 1
            mirror = beta * W + ic
            if mirror != pos:
                table[mirror] = alpha
                trail[t_top] = mirror
                t_top += 1
                undef -= 1
            q_lo = 0
            q_hi = 0
            dq[q_hi] = pos
            q_hi += 1
            if mirror != pos:
                dq[q_hi] = mirror
                q_hi += 1
            while ok and q_lo < q_hi:
                cell = dq[q_lo]
                q_lo += 1
                start = cell // W
                c0 = cell % W
                for ri in range(bycol_off[c0], bycol_off[c0 + 1]):
                    r = bycol_idx[ri]
                    s = rot_off[r]
                    e = rot_off[r + 1]
                    f = start
                    i = s
                    while i < e:
                        nxt = table[f * W + rot_flat[i]]
                        if nxt == -1:
                            break
                        f = nxt
                        i += 1
                    if i >= e:
                        if f != start:
                            ok = False
                            break
                        continue
                    b = start
                    j = e - 1
                    while j > i:
                        nxt = table[b * W + inv_col[rot_flat[j]]]
                        if nxt == -1:
                            break
                        b = nxt
                        j -= 1
                    if j > i:
                        continue
                    # exactly one gap: deduce f . rot[i] = b
                    cgap = rot_flat[i]
                    icgap = inv_col[cgap]
                    cell_f = f * W + cgap
                    cell_b = b * W + icgap
                    if table[cell_b] != -1 and table[cell_b] != f:
                        ok = False
                        break
                    table[cell_f] = b
                    trail[t_top] = cell_f
                    t_top += 1
                    undef -= 1
                    dq[q_hi] = cell_f
                    q_hi += 1
                    if cell_b != cell_f:
                        table[cell_b] = f
                        trail[t_top] = cell_b
                        t_top += 1
                        undef -= 1
                        dq[q_hi] = cell_b
                        q_hi += 1

            # first-in-class filter over alternative bases
            if ok:
                for base in range(1, cur_n):
                    if dead_at[base] != -1:
                        continue
                    # standardize from `base` as far as entries exist, comparing
                    # against the current table as we go
                    m = 1
                    order[0] = base
                    sigma[base] = 0
                    verdict = 0  # 0 inconclusive/equal, -1 smaller, +1 larger
                    k = 0
                    while k < m:
                        o = order[k]
                        c = 0
                        while c < W:
                            t_val = table[k * W + c]
                            raw = table[o * W + c]
                            if raw == -1 or t_val == -1:
                                k = m  # stop outer loop
                                c = W
                                break
                            r_val = sigma[raw]
                            if r_val == -1:
                                sigma[raw] = m
                                order[m] = raw
                                m += 1
                                r_val = sigma[raw]
                            if r_val != t_val:
                                verdict = -1 if r_val < t_val else 1
                                k = m
                                c = W
                                break
                            c += 1
                        else:
                            k += 1
                            continue
                        break
                    for t in range(m):
                        sigma[order[t]] = -1
                    if verdict < 0:
                        ok = False
                        break
                    if verdict > 0:
                        dead_at[base] = depth
                        dead_stack[d_top] = base
                        d_top += 1

            if not ok:
                while t_top > t_mark:
                    t_top -= 1
                    table[trail[t_top]] = -1
                while d_top > d_mark:
                    d_top -= 1
                    dead_at[dead_stack[d_top]] = -1
                undef = undef_mark
                continue

            if undef == 0:
                results.append(table[:cur_n * W].copy())
                while t_top > t_mark:
                    t_top -= 1
                    table[trail[t_top]] = -1
                while d_top > d_mark:
                    d_top -= 1
                    dead_at[dead_stack[d_top]] = -1
                undef = undef_mark
                continue

            # find next undefined cell and descend
            nxt_pos = pos + 1
            while table[nxt_pos] != -1:
                nxt_pos += 1
            depth += 1
            f_pos[depth] = nxt_pos
            f_beta[depth] = 0
            f_n[depth] = cur_n
            f_trail[depth] = t_mark
            f_undef[depth] = undef_mark
            f_dead[depth] = d_mark
            advanced = True
            break

        if advanced:
            continue
        # frame exhausted: reverse the assignment that created it
        if depth > 0:
            t_mark = f_trail[depth]
            while t_top > t_mark:
                t_top -= 1
                table[trail[t_top]] = -1
            d_mark = f_dead[depth]
            while d_top > d_mark:
                d_top -= 1
                dead_at[dead_stack[d_top]] = -1
            undef = f_undef[depth]
        depth -= 1

    return nodes, STATUS_OK


_search_jit = None


def _get_search():
    global _search_jit
    if _search_jit is not None:
        return _search_jit
    try:
        import numba

        _search_jit = numba.njit(cache=True)(_search_impl)
    except ImportError:
        _search_jit = _search_impl
    return _search_jit


def search(width: int, inv_col, max_index: int, rotations_by_col,
           node_budget: int):
    """Run the low-index search; returns (tables, nodes, status).

    ``rotations_by_col[c]`` lists relator rotations (column words) starting
    with column ``c``.  Tables come back as flat int32 arrays of length
    n*width in DFS discovery order.
    """
    rots: list[tuple[int, ...]] = []
    bycol_ranges = []
    for c in range(width):
        start = len(rots)
        rots.extend(rotations_by_col[c])
        bycol_ranges.append((start, len(rots)))
    rot_flat = np.array([c for r in rots for c in r] or [0], dtype=np.int32)
    rot_off = np.zeros(len(rots) + 1, dtype=np.int32)
    for i, r in enumerate(rots):
        rot_off[i + 1] = rot_off[i] + len(r)
    bycol_idx = np.arange(len(rots), dtype=np.int32)
    bycol_off = np.zeros(width + 1, dtype=np.int32)
    for c, (s, e) in enumerate(bycol_ranges):
        bycol_off[c + 1] = e
    inv_arr = np.array(inv_col, dtype=np.int32)

    impl = _get_search()
    results: list = _make_result_list(impl)
    nodes, status = impl(width, inv_arr, max_index, rot_flat, rot_off,
                         bycol_idx, bycol_off, node_budget, results)
    return list(results), int(nodes), int(status)


def _make_result_list(impl):
    if impl is _search_impl:
        return []
    from numba.typed import List

    out = List()
    # seed element pins the list's item type for numba, removed by caller
    out.append(np.empty(0, dtype=np.int32))
    out.pop()
    return out
