"""Exact two-phase simplex over ``Fraction`` with Bland's anti-cycling rule.

Solves ``max c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.
Small dense problems only; every pivot touches the whole tableau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[Fraction] = None
    x: Optional[tuple] = None


def _pivot(rows, obj, basis, r, c):
    piv = rows[r][c]
    row = rows[r]
    if piv != 1:
        rows[r] = row = [v / piv for v in row]
    for i, other in enumerate(rows):
        if i != r:
            f = other[c]
            if f:
                rows[i] = [a - f * b for a, b in zip(other, row)]
    f = obj[c]
    if f:
        obj[:] = [a - f * b for a, b in zip(obj, row)]
    basis[r] = c


def _run(rows, obj, basis, allowed):
    """Maximize with ``obj`` holding reduced costs (negative = improving), rhs last."""
    while True:
        entering = next((j for j in allowed if obj[j] < 0), None)
        if entering is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(rows):
            a = row[entering]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return UNBOUNDED
        _pivot(rows, obj, basis, best[1], entering)


def linprog_max(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Exact LP solve; see the module docstring for the problem form."""
    nvar = len(c)
    F = Fraction
    cons = [([F(v) for v in a], "<=", F(b)) for a, b in zip(A_ub, b_ub)]
    cons += [([F(v) for v in a], "==", F(b)) for a, b in zip(A_eq, b_eq)]
    for a, _, _ in cons:
        if len(a) != nvar:
            raise ValueError("constraint width does not match the objective")
    # flip rows with negative rhs; a flipped <= row becomes >=
    norm = []
    for a, sense, b in cons:
        if b < 0:
            a, b = [-v for v in a], -b
            sense = ">=" if sense == "<=" else sense
        norm.append((a, sense, b))
    n_slack = sum(1 for _, s, _ in norm if s != "==")
    n_art = sum(1 for _, s, _ in norm if s != "<=")
    width = nvar + n_slack + n_art
    rows, basis = [], []
    slack_at, art_at = nvar, nvar + n_slack
    art_cols = []
    for a, sense, b in norm:
        row = a + [F(0)] * (n_slack + n_art) + [b]
        if sense == "<=":
            row[slack_at] = F(1)
            basis.append(slack_at)
            slack_at += 1
        else:
            if sense == ">=":
                row[slack_at] = F(-1)
                slack_at += 1
            row[art_at] = F(1)
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        rows.append(row)

    if art_cols:
        # phase 1: maximize -sum(artificials)
        obj = [F(0)] * (width + 1)
        for j in art_cols:
            obj[j] = F(1)
        for i, bv in enumerate(basis):
            if bv in art_cols:
                obj = [o - v for o, v in zip(obj, rows[i])]
        _run(rows, obj, basis, range(width))
        if obj[-1] != 0:
            return LPResult(INFEASIBLE)
        art = set(art_cols)
        for i in range(len(rows)):
            if basis[i] in art:
                col = next((j for j in range(nvar + n_slack) if rows[i][j] != 0), None)
                if col is not None:
                    _pivot(rows, obj, basis, i, col)
        keep = [i for i in range(len(rows)) if basis[i] not in art]
        rows = [rows[i] for i in keep]
        basis = [basis[i] for i in keep]

    allowed = range(nvar + n_slack)
    obj = [F(0)] * (width + 1)
    for j in range(nvar):
        obj[j] = -F(c[j])
    for i, bv in enumerate(basis):
        if obj[bv]:
            f = obj[bv]
            obj = [o - f * v for o, v in zip(obj, rows[i])]
    status = _run(rows, obj, basis, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [F(0)] * width
    for i, bv in enumerate(basis):
        x[bv] = rows[i][-1]
    return LPResult(OPTIMAL, obj[-1], tuple(x[:nvar]))
