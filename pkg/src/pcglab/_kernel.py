"""Compiled weight-vector DFS (numba).

Same enumeration order and pruning rules as ``solver._search_unit``, so
both engines return the same first witness.  Imported lazily; when numba is
unavailable the solver falls back to the pure-Python engine.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _runs(vals, nvals, ecount):
    runs = 0
    in_run = False
    for i in range(nvals):
        if ecount[vals[i]] > 0:
            if not in_run:
                runs += 1
                in_run = True
        else:
            in_run = False
    return runs


@njit(cache=True)
def _chain_exceeds(pair_kind, psum, prem, lo, hi, k):
    cur = -1
    count = 0
    want = True
    npairs = pair_kind.shape[0]
    while True:
        best = -1
        for p in range(npairs):
            if pair_kind[p] != want:
                continue
            if psum[p] + prem[p] * lo < cur:
                continue
            h = psum[p] + prem[p] * hi
            if best < 0 or h < best:
                best = h
        if best < 0:
            return False
        if want:
            count += 1
            if count > k:
                return True
        cur = best
        want = not want


@njit(cache=True)
def _insert(vals, nvals, d):
    i = nvals
    while i > 0 and vals[i - 1] > d:
        vals[i] = vals[i - 1]
        i -= 1
    vals[i] = d
    return nvals + 1


@njit(cache=True)
def _remove(vals, nvals, d):
    i = 0
    while vals[i] != d:
        i += 1
    while i < nvals - 1:
        vals[i] = vals[i + 1]
        i += 1
    return nvals - 1


class UnitState:
    """Resumable DFS state for one (topology, assignment) unit."""

    def __init__(self, m: int, npairs: int, hi: int, path_len):
        max_d = m * hi + 1
        self.ecount = np.zeros(max_d + 1, np.int64)
        self.ncount = np.zeros(max_d + 1, np.int64)
        self.vals = np.zeros(npairs + 1, np.int64)
        self.w = np.zeros(max(m, 1), np.int64)
        self.prefmax = np.full(m + 1, -1, np.int64)
        self.applied = np.zeros(max(m, 1), np.bool_)
        self.dist = np.zeros(max(npairs, 1), np.int64)
        self.meta = np.zeros(3, np.int64)  # t, number of distinct values, started
        self.psum = np.zeros(npairs, np.int64)
        self.prem = np.array(path_len, np.int64)


@njit(cache=True)
def search_unit(m, comp_start, comp_kind, comp_pstart, path_pos, sym, k, lo, hi, floor,
                prune, slice_nodes, w, prefmax, applied, dist, ecount, ncount, vals, meta,
                stats, bounds, touch_start, touch_pair, pair_kind, psum, prem, diff_start,
                diff_a, diff_b, diff_pstart, diff_pos, diff_sign):
    """Advance the DFS by at most ``slice_nodes`` nodes.

    Returns 1 when a separable vector is found (left in ``w``), 0 when the
    space is exhausted, 3 when the slice ran out (call again to resume).
    ``stats`` accumulates: nodes, weight vectors, then prunes by reason
    (conflict, runs, symmetry, bounds, difference).
    """
    if m == 0:
        return 0
    nsym = sym.shape[0]
    t = meta[0]
    nv = meta[1]
    if meta[2] == 0:
        meta[2] = 1
        t = 0
        w[0] = lo - 1
        if m == 1 and floor >= lo:
            w[0] = floor
    budget = slice_nodes
    while t >= 0:
        if applied[t]:
            for c in range(comp_start[t], comp_start[t + 1]):
                d = dist[c]
                if comp_kind[c]:
                    ecount[d] -= 1
                else:
                    ncount[d] -= 1
                if ecount[d] == 0 and ncount[d] == 0:
                    nv = _remove(vals, nv, d)
            if bounds:
                for c in range(touch_start[t], touch_start[t + 1]):
                    psum[touch_pair[c]] -= w[t]
                    prem[touch_pair[c]] += 1
            applied[t] = False
        if budget == 0:
            meta[0] = t
            meta[1] = nv
            return 3
        w[t] += 1
        if w[t] > hi:
            t -= 1
            continue
        budget -= 1
        stats[0] += 1
        last = t == m - 1
        if prune and nsym > 0:
            bad = False
            for s in range(nsym):
                for q in range(t + 1):
                    r = sym[s, q]
                    if r > t:
                        break
                    if w[r] < w[q]:
                        bad = True
                        break
                    if w[r] > w[q]:
                        break
                if bad:
                    break
            if bad:
                stats[4] += 1
                continue
        conflict = False
        added = comp_start[t + 1] > comp_start[t]
        for c in range(comp_start[t], comp_start[t + 1]):
            d = 0
            for q in range(comp_pstart[c], comp_pstart[c + 1]):
                d += w[path_pos[q]]
            dist[c] = d
            if ecount[d] == 0 and ncount[d] == 0:
                nv = _insert(vals, nv, d)
            if comp_kind[c]:
                if ncount[d] > 0:
                    conflict = True
                ecount[d] += 1
            else:
                if ecount[d] > 0:
                    conflict = True
                ncount[d] += 1
        applied[t] = True
        ok = True
        if not prune:
            if last:
                for i in range(nv):
                    if ecount[vals[i]] > 0 and ncount[vals[i]] > 0:
                        ok = False
                if ok and _runs(vals, nv, ecount) > k:
                    ok = False
        elif conflict:
            stats[2] += 1
            ok = False
        elif added and _runs(vals, nv, ecount) > k:
            if not last:
                stats[3] += 1
            ok = False
        if bounds:
            if ok and not last:
                for c in range(diff_start[t], diff_start[t + 1]):
                    if pair_kind[diff_a[c]] == pair_kind[diff_b[c]]:
                        continue
                    s = 0
                    for q in range(diff_pstart[c], diff_pstart[c + 1]):
                        s += w[diff_pos[q]] * diff_sign[q]
                    if s == 0:
                        stats[6] += 1
                        ok = False
                        break
            for c in range(touch_start[t], touch_start[t + 1]):
                psum[touch_pair[c]] += w[t]
                prem[touch_pair[c]] -= 1
            if ok and not last and _chain_exceeds(pair_kind, psum, prem, lo, hi, k):
                stats[5] += 1
                ok = False
        if last:
            stats[1] += 1
            if ok:
                meta[0] = t
                meta[1] = nv
                return 1
            continue
        if not ok:
            continue
        prefmax[t + 1] = max(prefmax[t], w[t])
        t += 1
        w[t] = lo - 1
        if t == m - 1 and prefmax[t] <= floor and floor >= lo:
            w[t] = floor
    meta[0] = t
    meta[1] = nv
    return 0
