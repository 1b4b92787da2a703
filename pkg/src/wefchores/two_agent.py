"""Two-agent procedures: weighted adjusted winner and WEF1 + PO via goods.

Weighted adjusted winner starts from the cost-minimizing split and, when that
split is not WEF1, cuts the items (ordered by ``c1/c2``) at the last index
where agent 2's right-hand share still outweighs agent 1's left-hand share.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from .audit import check_goods_wef1, check_wef1
from .core import Allocation, Instance
from .errors import BudgetExceeded, InvariantViolation, WrongAgentCount

logger = logging.getLogger(__name__)

__all__ = [
    "RatioOrder",
    "AdjustedWinnerTrace",
    "ratio_order",
    "weighted_adjusted_winner",
    "adjusted_winner_trace",
    "wef1_po_two_agents",
    "DEFAULT_MAX_GOODS_SUBSETS",
]

DEFAULT_MAX_GOODS_SUBSETS = 2**20


def _require_two(inst: Instance):
    if inst.n != 2:
        raise WrongAgentCount(f"expected 2 agents, got {inst.n}")


def _ratio_key(c1, c2, e):
    if c2 > 0:
        return (0, c1 / c2, e)
    if c1 > 0:
        return (1, Fraction(0), e)
    return (2, Fraction(0), e)


@dataclass(frozen=True)
class RatioOrder:
    """Items sorted by ``c1(e)/c2(e)``; ``c2 = 0`` counts as +inf, ``0/0`` after that."""

    order: tuple

    def left(self, t: int) -> frozenset:
        """``L(t)``: the first ``t`` items (1-based, empty for ``t < 1``)."""
        return frozenset(self.order[: max(t, 0)])

    def right(self, t: int) -> frozenset:
        """``R(t)``: items from position ``t`` on (1-based)."""
        return frozenset(self.order[max(t, 1) - 1:])


def ratio_order(inst: Instance) -> RatioOrder:
    _require_two(inst)
    c1, c2 = inst.costs
    return RatioOrder(tuple(sorted(range(inst.m), key=lambda e: _ratio_key(c1[e], c2[e], e))))


def _normalized_rows(inst: Instance):
    rows = []
    for row in inst.costs:
        total = sum(row, Fraction(0))
        rows.append(tuple(c / total for c in row) if total > 0 else tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class AdjustedWinnerTrace:
    """Intermediate quantities; ``A``, ``B``, ``O1`` and ``X1`` refer to the oriented frame."""

    o1: frozenset
    o2: frozenset
    early_exit: bool
    swapped: bool = False
    order: tuple = ()
    f: Optional[int] = None
    A: Optional[Fraction] = None
    B: Optional[Fraction] = None
    oriented_o1: frozenset = frozenset()
    oriented_x1: frozenset = frozenset()
    allocation: Optional[Allocation] = None


def adjusted_winner_trace(inst: Instance) -> AdjustedWinnerTrace:
    _require_two(inst)
    rows = _normalized_rows(inst)
    norm = inst.with_costs(rows)
    m = inst.m
    o1 = frozenset(e for e in range(m) if rows[0][e] < rows[1][e])
    o2 = frozenset(range(m)) - o1
    start = Allocation((o1, o2))
    if check_wef1(norm, start):
        return AdjustedWinnerTrace(o1, o2, True, allocation=start)

    w1, w2 = inst.weights
    order = ratio_order(norm).order
    swapped = sum(rows[0][e] for e in o1) / w1 > sum(rows[1][e] for e in o2) / w2
    if swapped:
        # agents trade places; the ratio order reverses
        rows = (rows[1], rows[0])
        w1, w2 = w2, w1
        order = order[::-1]
        o1, o2 = o2, o1
    ro = RatioOrder(order)
    c1, c2 = rows
    A = sum(c1[e] for e in o1)
    B = sum(c2[e] for e in o2)

    f = None
    for cand in range(m - 1, 0, -1):
        lhs = sum(c2[e] for e in ro.right(cand + 1)) / w2
        rhs = sum(c2[e] for e in ro.left(cand - 1)) / w1
        if lhs > rhs:
            f = cand
            break
    if f is None:
        raise InvariantViolation("threshold", 0, "no cut index satisfies the defining inequality")
    x1 = ro.left(f)
    x2 = ro.right(f + 1)
    alloc = Allocation((x2, x1)) if swapped else Allocation((x1, x2))
    return AdjustedWinnerTrace(
        o1=start[0],
        o2=start[1],
        early_exit=False,
        swapped=swapped,
        order=order,
        f=f,
        A=A,
        B=B,
        oriented_o1=o1,
        oriented_x1=x1,
        allocation=alloc,
    )


def weighted_adjusted_winner(inst: Instance) -> Allocation:
    """WEF1 allocation for two agents with social cost within ``(4+alpha)/4`` of optimal.

    >>> inst = Instance.from_lists([1, 1], [[1, 1], [1, 1]])
    >>> weighted_adjusted_winner(inst).describe()
    'X1={e1} X2={e2}'
    """
    trace = adjusted_winner_trace(inst)
    logger.debug("adjusted winner: early_exit=%s swapped=%s f=%s", trace.early_exit, trace.swapped, trace.f)
    return trace.allocation


def _integer_rows(costs):
    out = []
    for row in costs:
        scale = lcm(*(c.denominator for c in row)) if row else 1
        out.append([int(c * scale) for c in row])
    return out


def _undominated_goods(values, m):
    """Goods utilities of every split in lexicographic label order, plus a PO mask."""
    v1, v2 = values
    utils = []
    for labels in itertools.product((0, 1), repeat=m):
        u1 = sum(v1[e] for e in range(m) if labels[e] == 0)
        u2 = sum(v2[e] for e in range(m) if labels[e] == 1)
        utils.append((labels, u1, u2))
    best_at = {}
    for _, u1, u2 in utils:
        if u2 > best_at.get(u1, -1):
            best_at[u1] = u2
    # sup of agent-2 utility among strictly better agent-1 utilities
    suffix = {}
    running = -1
    for u1 in sorted(best_at, reverse=True):
        suffix[u1] = running
        running = max(running, best_at[u1])
    mask = [u2 == best_at[u1] and u2 > suffix[u1] for _, u1, u2 in utils]
    return utils, mask


def wef1_po_two_agents(inst: Instance, max_subsets: int = DEFAULT_MAX_GOODS_SUBSETS) -> Allocation:
    """WEF1 and PO allocation for two agents through the mirrored goods instance.

    The goods instance reads costs as values and swaps the two weights. Among
    its Pareto-optimal splits, taken in lexicographic order of item labels, the
    first goods-WEF1 one is chosen; swapping its bundles gives the chore
    allocation.
    """
    _require_two(inst)
    m = inst.m
    if 2**m > max_subsets:
        raise BudgetExceeded(2**m, max_subsets, "subsets")
    goods = Instance.from_lists([inst.weights[1], inst.weights[0]], [list(r) for r in inst.costs])
    utils, mask = _undominated_goods(_integer_rows(goods.costs), m)
    for (labels, _, _), po in zip(utils, mask):
        if not po:
            continue
        split = Allocation.from_labels(labels, 2)
        if check_goods_wef1(goods, split):
            return Allocation((split[1], split[0]))
    raise InvariantViolation("goods-wef1-po", 0, "no goods split is both WEF1 and PO")
