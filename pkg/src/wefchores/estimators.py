"""scikit-learn style wrappers around the allocation algorithms.

``fit(costs, weights=None)`` takes an ``n x m`` cost matrix (agents by items)
and stores the allocation; ``labels_`` gives the 0-based agent of every item,
so ``fit_predict`` reads like a clustering of items into agents. Floats are
converted exactly through their shortest repr (``0.1`` becomes ``1/10``).
"""

from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator

from .audit import check_wef1
from .bivalued import solve_wef1_po
from .core import Allocation, Instance, parse_rational
from .errors import DimensionMismatch, InstanceError
from .picking import generate_rwps_sequence, goods_weighted_protocol, rwps, wefxy_allocation
from .two_agent import weighted_adjusted_winner, wef1_po_two_agents

__all__ = [
    "AdjustedWinnerAllocator",
    "BivaluedMarketAllocator",
    "GoodsPickingAllocator",
    "RWPSAllocator",
    "TwoAgentPOAllocator",
    "WEFxyAllocator",
    "check_cost_matrix",
    "check_weights",
]


def check_cost_matrix(costs) -> tuple:
    """Validate a 2-D non-negative cost matrix and convert it to Fractions."""
    if isinstance(costs, Instance):
        return costs.costs
    if hasattr(costs, "tolist"):
        costs = costs.tolist()
    try:
        rows = [list(r) for r in costs]
    except TypeError:
        raise DimensionMismatch("costs must be a 2-D array (agents x items)") from None
    if not rows:
        raise DimensionMismatch("costs need at least one agent row")
    width = len(rows[0])
    out = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DimensionMismatch(f"row {i + 1} has {len(row)} entries, expected {width}", (i + 1, None))
        parsed = []
        for e, value in enumerate(row):
            try:
                parsed.append(parse_rational(value))
            except (TypeError, ValueError) as exc:
                raise InstanceError(f"bad cost {value!r}: {exc}", (i + 1, e + 1)) from None
        out.append(tuple(parsed))
    return tuple(out)


def check_weights(weights, n: int) -> tuple:
    """Validate weights for ``n`` agents; ``None`` means equal weights."""
    if weights is None:
        return tuple(Fraction(1, n) for _ in range(n))
    if hasattr(weights, "tolist"):
        weights = weights.tolist()
    values = tuple(parse_rational(w) for w in weights)
    if len(values) != n:
        raise DimensionMismatch(f"{len(values)} weights for {n} agents")
    return values


class _Allocator(BaseEstimator):
    def _make_instance(self, costs, weights):
        if isinstance(costs, Instance) and weights is None:
            return costs
        rows = check_cost_matrix(costs)
        return Instance.from_lists(list(check_weights(weights, len(rows))), [list(r) for r in rows])

    def _allocate(self, inst):  # pragma: no cover - abstract
        raise NotImplementedError

    def fit(self, costs, y=None, weights=None):
        inst = self._make_instance(costs, weights)
        alloc = self._allocate(inst)
        self.instance_ = inst
        self.allocation_ = alloc
        self.labels_ = alloc.labels(inst.m)
        self.n_agents_ = inst.n
        self.n_items_ = inst.m
        return self

    def fit_predict(self, costs, y=None, weights=None):
        return self.fit(costs, y, weights=weights).labels_

    def bundles(self) -> Allocation:
        return self.allocation_

    def score(self, costs=None, y=None, weights=None):
        """1.0 if the fitted allocation is WEF1, else 0.0."""
        return 1.0 if check_wef1(self.instance_, self.allocation_) else 0.0


class RWPSAllocator(_Allocator):
    """Reversed weighted picking sequence (WEF1 for chores)."""

    def _allocate(self, inst):
        self.sequence_ = generate_rwps_sequence(inst)[0].order
        return rwps(inst)


class WEFxyAllocator(_Allocator):
    def __init__(self, x=1, y=0):
        self.x = x
        self.y = y

    def _allocate(self, inst):
        return wefxy_allocation(inst, self.x, self.y)


class BivaluedMarketAllocator(_Allocator):
    """WEF1 + PO for bi-valued costs; ``certificate_`` holds the market state."""

    def __init__(self, check_invariants=True):
        self.check_invariants = check_invariants

    def _allocate(self, inst):
        alloc, state = solve_wef1_po(inst, check_invariants=self.check_invariants)
        self.certificate_ = state
        return alloc


class AdjustedWinnerAllocator(_Allocator):
    """Weighted adjusted winner for two agents."""

    def _allocate(self, inst):
        return weighted_adjusted_winner(inst)


class TwoAgentPOAllocator(_Allocator):
    def __init__(self, max_subsets=2**20):
        self.max_subsets = max_subsets

    def _allocate(self, inst):
        return wef1_po_two_agents(inst, max_subsets=self.max_subsets)


class GoodsPickingAllocator(_Allocator):
    """Forward weighted picking for goods; the matrix holds values."""

    def _allocate(self, inst):
        return goods_weighted_protocol(inst)

    def score(self, costs=None, y=None, weights=None):
        from .audit import check_goods_wef1

        return 1.0 if check_goods_wef1(self.instance_, self.allocation_) else 0.0
