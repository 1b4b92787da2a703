"""Exact fairness and efficiency verdicts with re-checkable witnesses.

Every failing report names the violating agent (and, for pairwise notions,
the other agent), the item used in the "up to one item" relaxation, and the two
sides of the violated inequality. Because costs are additive, the best item to
remove is always the costliest one in the envious agent's bundle, so one max
scan per pair is enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional

from . import budget as _budget
from .core import Allocation, Instance, format_rational, parse_rational

__all__ = [
    "FairnessReport",
    "Witness",
    "check_goods_wef1",
    "check_po_bruteforce",
    "check_wef",
    "check_wef1",
    "check_wef1t",
    "check_wefxy",
    "check_wprop1",
    "check_wpropx",
    "check_wwef1",
    "pareto_dominates",
]


@dataclass(frozen=True)
class Witness:
    """Evidence for a failed check.

    ``lhs > rhs`` is the violated inequality; for Pareto optimality
    ``allocation`` holds a dominating allocation instead.
    """

    agent: Optional[int] = None
    other: Optional[int] = None
    item: Optional[int] = None
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    allocation: Optional[Allocation] = None

    def to_dict(self, inst: Optional[Instance] = None) -> dict:
        def agent_id(i):
            return None if i is None else (inst.agent_ids[i] if inst else i + 1)

        def item_id(e):
            return None if e is None else (inst.item_ids[e] if inst else e + 1)

        out = {}
        if self.agent is not None:
            out["agent"] = agent_id(self.agent)
        if self.other is not None:
            out["other"] = agent_id(self.other)
        if self.item is not None:
            out["item"] = item_id(self.item)
        if self.lhs is not None:
            out["lhs"] = format_rational(self.lhs)
            out["rhs"] = format_rational(self.rhs)
        if self.allocation is not None:
            out["allocation"] = (
                self.allocation.to_dict(inst)
                if inst
                else {str(i + 1): [e + 1 for e in sorted(b)] for i, b in enumerate(self.allocation)}
            )
        return out


@dataclass(frozen=True)
class FairnessReport:
    notion: str
    passed: bool
    witness: Optional[Witness] = None
    params: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self, inst: Optional[Instance] = None) -> dict:
        out = {"notion": self.notion, "verdict": self.verdict}
        if self.params:
            out["params"] = {k: format_rational(v) for k, v in self.params.items()}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict(inst)
        return out


def _passed(notion, **params):
    return FairnessReport(notion, True, None, params)


def _failed(notion, witness, **params):
    return FairnessReport(notion, False, witness, params)


def _costliest(row, bundle):
    """Index of the costliest item; ties go to the lowest index."""
    return min(bundle, key=lambda e: (-row[e], e))


def _cheapest(row, bundle):
    return min(bundle, key=lambda e: (row[e], e))


def _bundle_costs(inst: Instance, alloc: Allocation):
    """``table[i][j] = c_i(X_j)``."""
    return [[inst.cost(i, alloc[j]) for j in range(inst.n)] for i in range(inst.n)]


def check_wef(inst: Instance, alloc: Allocation) -> FairnessReport:
    """Weighted envy-freeness: ``c_i(X_i)/w_i <= c_i(X_j)/w_j`` for all pairs."""
    alloc.require_complete(inst)
    w = inst.weights
    table = _bundle_costs(inst, alloc)
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            lhs = table[i][i] / w[i]
            rhs = table[i][j] / w[j]
            if lhs > rhs:
                return _failed("WEF", Witness(agent=i, other=j, lhs=lhs, rhs=rhs))
    return _passed("WEF")


def _pair_wefxy(inst, table, alloc, i, j, x, y):
    """Violation witness of WEF(x, y) from i towards j, or None."""
    bundle = alloc[i]
    if not bundle:
        return None
    row = inst.costs[i]
    e = _costliest(row, bundle)
    lhs = (table[i][i] - x * row[e]) / inst.weights[i]
    rhs = (table[i][j] + y * row[e]) / inst.weights[j]
    if lhs > rhs:
        return Witness(agent=i, other=j, item=e, lhs=lhs, rhs=rhs)
    return None


def check_wefxy(inst: Instance, alloc: Allocation, x, y, notion: Optional[str] = None) -> FairnessReport:
    """WEF(x, y): for every pair some ``e`` in ``X_i`` satisfies
    ``(c_i(X_i) - x c_i(e))/w_i <= (c_i(X_j) + y c_i(e))/w_j``.

    An empty envious bundle always passes.
    """
    x = parse_rational(x)
    y = parse_rational(y)
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise ValueError("x and y must lie in [0, 1]")
    alloc.require_complete(inst)
    notion = notion or "WEFxy"
    params = {} if notion in ("WEF1", "WEF1T") else {"x": x, "y": y}
    table = _bundle_costs(inst, alloc)
    for i in range(inst.n):
        for j in range(inst.n):
            if i != j:
                bad = _pair_wefxy(inst, table, alloc, i, j, x, y)
                if bad is not None:
                    return _failed(notion, bad, **params)
    return _passed(notion, **params)


def check_wef1(inst: Instance, alloc: Allocation) -> FairnessReport:
    """Weighted envy-freeness up to one item, i.e. WEF(1, 0).

    >>> from wefchores.fixtures import table1
    >>> check_wef1(table1(), Allocation(({0}, {1, 2}))).verdict
    'fail'
    """
    return check_wefxy(inst, alloc, 1, 0, notion="WEF1")


def check_wef1t(inst: Instance, alloc: Allocation) -> FairnessReport:
    """WEF up to one transfer, i.e. WEF(1, 1)."""
    return check_wefxy(inst, alloc, 1, 1, notion="WEF1T")


def check_wwef1(inst: Instance, alloc: Allocation) -> FairnessReport:
    """Weak WEF1: each pair satisfies WEF(1, 0) or WEF(0, 1)."""
    alloc.require_complete(inst)
    table = _bundle_costs(inst, alloc)
    one = Fraction(1)
    zero = Fraction(0)
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            first = _pair_wefxy(inst, table, alloc, i, j, one, zero)
            if first is None:
                continue
            if _pair_wefxy(inst, table, alloc, i, j, zero, one) is None:
                continue
            return _failed("WWEF1", first)
    return _passed("WWEF1")


def _wprop(inst, alloc, notion, pick):
    alloc.require_complete(inst)
    for i in range(inst.n):
        bundle = alloc[i]
        if not bundle:
            continue
        row = inst.costs[i]
        e = pick(row, bundle)
        lhs = inst.cost(i, bundle) - row[e]
        rhs = inst.weights[i] * inst.total_cost(i)
        if lhs > rhs:
            return _failed(notion, Witness(agent=i, item=e, lhs=lhs, rhs=rhs))
    return _passed(notion)


def check_wprop1(inst: Instance, alloc: Allocation) -> FairnessReport:
    """``c_i(X_i - e) <= w_i c_i(M)`` for the costliest ``e`` in ``X_i``."""
    return _wprop(inst, alloc, "WPROP1", _costliest)


def check_wpropx(inst: Instance, alloc: Allocation) -> FairnessReport:
    """Like WPROP1 but for every item of the bundle (so the cheapest one)."""
    return _wprop(inst, alloc, "WPROPX", _cheapest)


def check_goods_wef1(inst: Instance, alloc: Allocation) -> FairnessReport:
    """Goods-side WEF1, reading costs as values:
    ``v_i(X_i)/w_i >= v_i(X_j - e)/w_j`` for the most valuable ``e`` in ``X_j``.
    """
    alloc.require_complete(inst)
    table = _bundle_costs(inst, alloc)
    w = inst.weights
    for i in range(inst.n):
        row = inst.costs[i]
        for j in range(inst.n):
            if i == j or not alloc[j]:
                continue
            e = _costliest(row, alloc[j])
            lhs = (table[i][j] - row[e]) / w[j]
            rhs = table[i][i] / w[i]
            if lhs > rhs:
                return _failed("goodsWEF1", Witness(agent=i, other=j, item=e, lhs=lhs, rhs=rhs))
    return _passed("goodsWEF1")


def pareto_dominates(inst: Instance, a: Allocation, b: Allocation) -> bool:
    """True if ``a`` is weakly cheaper for everyone and strictly for someone."""
    strict = False
    for i in range(inst.n):
        ca, cb = inst.cost(i, a[i]), inst.cost(i, b[i])
        if ca > cb:
            return False
        if ca < cb:
            strict = True
    return strict


def _integer_rows(inst: Instance):
    """Per-agent integer rescaling; Pareto comparisons are per-agent scale invariant."""
    rows = []
    for row in inst.costs:
        scale = lcm(*(c.denominator for c in row)) if row else 1
        rows.append([int(c * scale) for c in row])
    return rows


def _pareto_minimal(states):
    """Keep only cost vectors not weakly dominated by another kept vector."""
    ordered = sorted(states.items())
    kept = []
    for vec, labels in ordered:
        dominated = False
        for other, _ in kept:
            if all(o <= v for o, v in zip(other, vec)):
                dominated = True
                break
        if not dominated:
            kept.append((vec, labels))
    return dict(kept)


def check_po_bruteforce(inst: Instance, alloc: Allocation, budget=None) -> FairnessReport:
    """Exhaustive Pareto-optimality check.

    The search runs over item-by-item partial assignments, keeps only partial
    cost vectors within the target's per-agent costs, and discards partial vectors
    weakly dominated by another (their completions can only be worse). This
    explores the full space of allocations implicitly. Requires ``n**m`` within
    the budget.
    """
    _budget.resolve(budget).check_states(inst.n, inst.m)
    alloc.require_complete(inst)
    rows = _integer_rows(inst)
    n, m = inst.n, inst.m
    target = tuple(sum(rows[i][e] for e in alloc[i]) for i in range(n))
    states = {tuple([0] * n): ()}
    for e in range(m):
        nxt = {}
        for vec, labels in states.items():
            for i in range(n):
                value = vec[i] + rows[i][e]
                if value > target[i]:
                    continue
                new = vec[:i] + (value,) + vec[i + 1:]
                if new not in nxt:
                    nxt[new] = labels + (i,)
        states = _pareto_minimal(nxt)
    for vec, labels in states.items():
        if vec != target:
            better = Allocation.from_labels(labels, n)
            return _failed("PO", Witness(allocation=better))
    return _passed("PO")
