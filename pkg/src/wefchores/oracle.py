"""Brute-force ground truth at desk scale.

Everything here is exhaustive and exact; each entry point checks its
:class:`~wefchores.budget.EnumerationBudget` before doing any work.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from . import budget as _budget
from .audit import FairnessReport, Witness, check_wef1
from .budget import EnumerationBudget
from .core import Allocation, Instance, normalize_costs, parse_rational, social_cost
from .errors import UndefinedRatio
from .simplex import OPTIMAL, linprog_max

logger = logging.getLogger(__name__)

__all__ = [
    "EnumerationBudget",
    "SweepResult",
    "aps_exact",
    "check_alpha_aps",
    "enumerate_allocations",
    "existence_sweep",
    "opt_social_cost",
    "price_of_fairness",
    "wef1_exists",
]


def enumerate_allocations(inst: Instance, budget: Optional[EnumerationBudget] = None) -> Iterator[Allocation]:
    """All ``n**m`` allocations; item 1 is the most significant base-n digit."""
    _budget.resolve(budget).check_states(inst.n, inst.m)
    for labels in itertools.product(range(inst.n), repeat=inst.m):
        yield Allocation.from_labels(labels, inst.n)


def opt_social_cost(inst: Instance):
    """``(opt, allocation)``: each item to a cheapest agent, lowest index on ties."""
    labels = [min(range(inst.n), key=lambda i: (inst.costs[i][e], i)) for e in range(inst.m)]
    alloc = Allocation.from_labels(labels, inst.n)
    return social_cost(inst, alloc), alloc


def price_of_fairness(inst: Instance, budget: Optional[EnumerationBudget] = None) -> Fraction:
    """Min social cost over WEF1 allocations divided by opt, on normalized costs.

    Raises ZeroTotalCost if some agent's costs sum to zero, UndefinedRatio if
    the normalized optimum is zero.
    """
    norm = normalize_costs(inst)
    opt, _ = opt_social_cost(norm)
    if opt == 0:
        raise UndefinedRatio("optimal social cost is zero")
    best = None
    for alloc in enumerate_allocations(norm, budget):
        sc = social_cost(norm, alloc)
        if best is not None and sc >= best:
            continue
        if check_wef1(norm, alloc):
            best = sc
    if best is None:
        raise UndefinedRatio("no WEF1 allocation found")
    return best / opt


def wef1_exists(inst: Instance, budget: Optional[EnumerationBudget] = None) -> Optional[Allocation]:
    """First WEF1 allocation in enumeration order, or None."""
    for alloc in enumerate_allocations(inst, budget):
        if check_wef1(inst, alloc):
            return alloc
    return None


def _subset_costs(row, m):
    costs = [Fraction(0)] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        costs[mask] = costs[mask ^ low] + row[low.bit_length() - 1]
    return costs


def _achievable(row, m, share, total, subset_cost, t):
    """Is there a reward vector (sum ``total``) giving every subset cheaper than
    ``t`` reward strictly below ``share``? Decided by maximizing the margin."""
    if t <= 0:
        return True
    full = (1 << m) - 1
    maximal = []
    for mask in range(1 << m):
        if subset_cost[mask] >= t:
            continue
        if all(subset_cost[mask | (1 << e)] >= t for e in range(m) if not mask >> e & 1):
            maximal.append(mask)
    if full in maximal:
        # the whole set is cheaper than t and its reward is the full total
        return total < share
    # variables r_1..r_m, delta
    A_ub = [[1 if mask >> e & 1 else 0 for e in range(m)] + [1] for mask in maximal]
    b_ub = [share] * len(maximal)
    res = linprog_max([0] * m + [1], A_ub, b_ub, [[1] * m + [0]], [total])
    return res.status == OPTIMAL and res.value > 0


def _aps_setup(inst, agent, budget):
    m = inst.m
    _budget.resolve(budget).check_subsets(m)
    row = inst.costs[agent]
    total = sum(row, Fraction(0))
    return row, m, inst.weights[agent] * total, total, _subset_costs(row, m)


def aps_exact(inst: Instance, agent: int, budget: Optional[EnumerationBudget] = None) -> Fraction:
    """AnyPrice share of ``agent`` (0-based).

    >>> from wefchores.fixtures import table4
    >>> aps_exact(table4(3), 0)
    Fraction(1, 3)
    """
    row, m, share, total, subset_cost = _aps_setup(inst, agent, budget)
    if total == 0:
        return Fraction(0)
    candidates = sorted(set(subset_cost))
    lo, hi = 0, len(candidates) - 1
    # achievability is monotone decreasing in t; candidates[0] = 0 always works
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _achievable(row, m, share, total, subset_cost, candidates[mid]):
            lo = mid
        else:
            hi = mid - 1
    return candidates[lo]


def _share_at_least(inst, agent, bound, budget) -> bool:
    """APS_agent >= bound, with a single feasibility test.

    The share is a subset cost, so it reaches ``bound`` iff the smallest
    subset cost at or above ``bound`` is achievable.
    """
    if bound <= 0:
        return True
    row, m, share, total, subset_cost = _aps_setup(inst, agent, budget)
    above = [c for c in subset_cost if c >= bound]
    if total == 0 or not above:
        return False
    return _achievable(row, m, share, total, subset_cost, min(above))


def check_alpha_aps(inst: Instance, alloc: Allocation, alpha, budget: Optional[EnumerationBudget] = None) -> FairnessReport:
    """``c_i(X_i) <= alpha * APS_i`` for every agent."""
    alpha = parse_rational(alpha)
    alloc.require_complete(inst)
    for i in range(inst.n):
        lhs = inst.cost(i, alloc[i])
        if lhs == 0 or (alpha > 0 and _share_at_least(inst, i, lhs / alpha, budget)):
            continue
        rhs = alpha * aps_exact(inst, i, budget)
        if lhs > rhs:
            return FairnessReport("alphaAPS", False, Witness(agent=i, lhs=lhs, rhs=rhs), {"alpha": alpha})
    return FairnessReport("alphaAPS", True, None, {"alpha": alpha})


# -- exhaustive existence sweep over a micro-family -----------------------------------

SWEEP_COSTS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))
SWEEP_WEIGHTS = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))


@dataclass
class SweepResult:
    instances: int = 0
    weight_vectors: int = 0
    missing_count: int = 0
    rwps_fail_count: int = 0
    missing_wef1: list = field(default_factory=list)
    rwps_failures: list = field(default_factory=list)
    by_shape: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.missing_count == 0 and self.rwps_fail_count == 0


def sweep_weight_vectors(n, weights=SWEEP_WEIGHTS):
    seen = []
    found = set()
    for raw in itertools.product(weights, repeat=n):
        total = sum(raw)
        key = tuple(w / total for w in raw)
        if key not in found:
            found.add(key)
            seen.append(key)
    return seen


def existence_sweep(ns=(2, 3), ms=(2, 3, 4), costs=SWEEP_COSTS, weights=SWEEP_WEIGHTS, max_report: int = 20) -> SweepResult:
    """Check WEF1 existence and the RWPS verdict on every instance of the family.

    Vectorized per weight vector: a WEF1 allocation must satisfy each agent's
    own condition, which depends only on that agent's row, so per-row pass
    tables (packed into bitsets over allocations) are intersected.
    """
    from . import _sweep

    result = SweepResult()
    for n in ns:
        for m in ms:
            count = 0
            for w in sweep_weight_vectors(n, weights):
                result.weight_vectors += 1
                found, (n_missing, missing), (n_bad, bad) = _sweep.sweep_block(w, m, costs, max_report)
                count += found
                result.missing_count += n_missing
                result.rwps_fail_count += n_bad
                room = max_report - len(result.missing_wef1)
                result.missing_wef1 += [(w, rows) for rows in missing[:room]]
                room = max_report - len(result.rwps_failures)
                result.rwps_failures += [(w, rows) for rows in bad[:room]]
            result.by_shape[(n, m)] = count
            result.instances += count
            logger.info("sweep n=%d m=%d: %d instances", n, m, count)
    return result

