"""Vectorized kernel for :func:`wefchores.oracle.existence_sweep`.

Costs and weights are scaled to integers so every comparison stays exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from .picking import generate_rwps_sequence


def _int_scale(values):
    scale = lcm(*(Fraction(v).denominator for v in values))
    return [int(Fraction(v) * scale) for v in values]


def _row_tables(w_int, m, cost_levels):
    """``ok[i][r, a]``: agent i with cost row r passes its WEF1 conditions under allocation a."""
    n = len(w_int)
    rows = np.array(list(itertools.product(cost_levels, repeat=m)), dtype=np.int64).reshape(-1, m)
    labels = np.array(list(itertools.product(range(n), repeat=m)), dtype=np.int64).reshape(-1, m)
    member = np.stack([(labels == j) for j in range(n)], axis=1).astype(np.int64)  # (A, n, m)
    bundle = np.einsum("re,aje->raj", rows, member)  # (R, A, n)
    ok = []
    for i in range(n):
        own = member[:, i, :].astype(bool)  # (A, m)
        masked = np.where(own[None, :, :], rows[:, None, :], -1)
        top = masked.max(axis=2)  # (R, A); -1 when the bundle is empty
        empty = ~own.any(axis=1)
        reduced = bundle[:, :, i] - np.maximum(top, 0)
        passes = np.ones(reduced.shape, dtype=bool)
        for j in range(n):
            if j != i:
                passes &= reduced * w_int[j] <= bundle[:, :, j] * w_int[i]
        passes |= empty[None, :]
        ok.append(passes)
    return rows, labels, ok


def _pack(table):
    """Pack a (R, A) bool table into (R, words) uint64 bitsets."""
    R, A = table.shape
    words = (A + 63) // 64
    out = np.zeros((R, words), dtype=np.uint64)
    for a in range(A):
        out[:, a // 64] |= table[:, a].astype(np.uint64) << np.uint64(a % 64)
    return out


def _preference_ids(rows):
    """Map each row to the index of its cheapest-first order (ties by item index)."""
    m = rows.shape[1]
    perms = list(itertools.permutations(range(m)))
    index = {p: k for k, p in enumerate(perms)}
    ids = np.array([index[tuple(np.argsort(r, kind="stable"))] for r in rows], dtype=np.int64)
    return perms, ids


@lru_cache(maxsize=None)
def _rwps_table(picking_order, n, m):
    """Allocation index produced for every combination of preference orders."""
    perms = list(itertools.permutations(range(m)))
    shape = (len(perms),) * n
    table = np.zeros(shape, dtype=np.int64)
    for combo in itertools.product(range(len(perms)), repeat=n):
        taken = [False] * m
        label = [0] * m
        for agent in picking_order:
            for e in perms[combo[agent]]:
                if not taken[e]:
                    taken[e] = True
                    label[e] = agent
                    break
        code = 0
        for e in range(m):
            code = code * n + label[e]
        table[combo] = code
    return table


def _classes(table, extra=None):
    """Group rows with identical pass tables (and identical ``extra`` keys)."""
    key = table if extra is None else np.concatenate([table, extra[:, None]], axis=1)
    uniq, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    return first, inverse.reshape(-1)


def _expand(combos, inverses, limit):
    """Count the instances behind failing class combinations and list a few row tuples."""
    members = [[np.nonzero(inv == c)[0] for c in range(inv.max() + 1)] for inv in inverses]
    total = 0
    samples = []
    for combo in combos:
        groups = [members[i][c] for i, c in enumerate(combo)]
        total += int(np.prod([len(g) for g in groups]))
        for rows in itertools.product(*groups):
            if len(samples) >= limit:
                break
            samples.append(rows)
    return total, samples


def sweep_block(weights, m, cost_values, limit=20, picking_order=None):
    """Sweep every cost profile for one weight vector.

    ``picking_order`` overrides the reversed weighted sequence (used to test the
    kernel against a protocol known to fail). Returns ``(instances, (missing_count, samples), (rwps_fail_count, samples))``
    where samples are tuples of cost rows.
    """
    n = len(weights)
    if n not in (2, 3):
        raise ValueError("the sweep kernel supports 2 or 3 agents")
    w_int = _int_scale(weights)
    levels = _int_scale(cost_values)
    back = {lv: Fraction(c) for lv, c in zip(levels, cost_values)}
    rows, _, ok = _row_tables(w_int, m, levels)
    R = rows.shape[0]
    if picking_order is None:
        seq, _ = generate_rwps_sequence(list(weights), m)
        picking_order = seq.picking_order()
    table = _rwps_table(tuple(picking_order), n, m)
    _, pid = _preference_ids(rows)

    # existence: only the pass table of each row matters
    e_first, e_inv = zip(*(_classes(ok[i]) for i in range(n)))
    packed = [_pack(ok[i][e_first[i]]) for i in range(n)]
    # RWPS: the pass table plus the row's preference order
    g_first, g_inv = zip(*(_classes(ok[i], pid) for i in range(n)))
    g_ok = [ok[i][g_first[i]] for i in range(n)]
    g_pid = [pid[g_first[i]] for i in range(n)]

    missing, bad = [], []
    if n == 2:
        exists = (packed[0][:, None, :] & packed[1][None, :, :]).any(axis=2)
        missing = list(zip(*np.nonzero(~exists)))
        alloc = table[g_pid[0][:, None], g_pid[1][None, :]]
        i0 = np.arange(len(g_pid[0]))[:, None]
        i1 = np.arange(len(g_pid[1]))[None, :]
        good = g_ok[0][i0, alloc] & g_ok[1][i1, alloc]
        bad = list(zip(*np.nonzero(~good)))
    else:
        for c0 in range(packed[0].shape[0]):
            both = packed[0][c0][None, :] & packed[1]
            exists = (both[:, None, :] & packed[2][None, :, :]).any(axis=2)
            missing += [(c0, a, b) for a, b in zip(*np.nonzero(~exists))]
        i1 = np.arange(len(g_pid[1]))[:, None]
        i2 = np.arange(len(g_pid[2]))[None, :]
        for c0 in range(len(g_pid[0])):
            alloc = table[g_pid[0][c0]][g_pid[1][:, None], g_pid[2][None, :]]
            good = g_ok[0][c0][alloc] & g_ok[1][i1, alloc] & g_ok[2][i2, alloc]
            bad += [(c0, a, b) for a, b in zip(*np.nonzero(~good))]

    def to_costs(samples):
        return [tuple(tuple(back[int(v)] for v in rows[r]) for r in combo) for combo in samples]

    miss_count, miss_rows = _expand(missing, e_inv, limit)
    bad_count, bad_rows = _expand(bad, g_inv, limit)
    return R**n, (miss_count, to_costs(miss_rows)), (bad_count, to_costs(bad_rows))
