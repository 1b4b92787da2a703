"""WEF1 + PO allocations for bi-valued chores via a Fisher-market equilibrium.

Costs are rescaled so every entry is 1 or ``k``. Prices start at the minimum
cost of each item; an agent's MPB ("minimum pain per buck") items are those
attaining ``alpha_i = min_e c_i(e)/p(e)``. Holding only MPB items makes the
allocation fractionally Pareto optimal, and price-weighted envy-freeness up to
one item (pWEF1) on top of that implies WEF1.

The solver first settles an initial equilibrium and splits agents into groups,
then repeatedly moves an item from the big spender to the least spender, raising
a whole group's prices by ``k`` when required. Each round the structural
invariants that make this work are re-checked from scratch; a failure raises
:class:`~wefchores.errors.InvariantViolation`.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .audit import FairnessReport, Witness
from .core import Allocation, BivaluedProfile, Instance, classify_bivalued, format_rational
from .errors import InvariantViolation

logger = logging.getLogger(__name__)

__all__ = [
    "MarketState",
    "SpenderView",
    "EquilibriumCheck",
    "initial_equilibrium",
    "solve_wef1_po",
    "verify_equilibrium",
    "check_pwef1",
    "pwef1_reduced",
    "spender_view",
    "certificate_to_dict",
]


@dataclass(frozen=True)
class MarketState:
    """Snapshot of the market. ``instance`` is the rescaled bi-valued instance."""

    instance: Instance
    k: Fraction
    alloc: Allocation
    prices: tuple
    mpb_ratio: tuple
    groups: tuple
    representatives: tuple
    unraised: frozenset
    round: int
    initial_alloc: Allocation
    log: tuple = field(default=(), repr=False)
    path_rounds: int = 0

    def group_of(self, agent: int) -> int:
        for r, members in enumerate(self.groups):
            if agent in members:
                return r
        raise KeyError(agent)


@dataclass(frozen=True)
class SpenderView:
    big: int
    least: int
    phat: tuple
    spending: tuple


@dataclass(frozen=True)
class EquilibriumCheck:
    passed: bool
    agent: Optional[int] = None
    item: Optional[int] = None

    def __bool__(self):
        return self.passed


def _spending(prices, bundle, w):
    return sum((prices[e] for e in bundle), Fraction(0)) / w


def _phat(prices, bundle, w):
    if not bundle:
        return Fraction(0)
    total = sum((prices[e] for e in bundle), Fraction(0))
    return (total - max(prices[e] for e in bundle)) / w


def _ratios(costs, prices):
    return [min(c / p for c, p in zip(row, prices)) if prices else Fraction(1) for row in costs]


def _in_mpb(costs, prices, alpha, i, e):
    return costs[i][e] / prices[e] == alpha[i]


def spender_view(inst: Instance, prices, bundles) -> SpenderView:
    """Big spender (max ``p̂``) and least spender (min ``p(X_i)/w_i``), lowest index on ties."""
    w = inst.weights
    phat = tuple(_phat(prices, bundles[i], w[i]) for i in range(inst.n))
    spend = tuple(_spending(prices, bundles[i], w[i]) for i in range(inst.n))
    big = min(range(inst.n), key=lambda i: (-phat[i], i))
    least = min(range(inst.n), key=lambda i: (spend[i], i))
    return SpenderView(big, least, phat, spend)


class _Market:
    """Mutable working state shared by both phases."""

    def __init__(self, profile: BivaluedProfile, check: bool):
        self.inst = profile.instance
        self.k = profile.k
        self.check = check
        self.n = self.inst.n
        self.m = self.inst.m
        self.costs = self.inst.costs
        self.w = self.inst.weights
        self.prices = [self.k if e in profile.consistently_large else Fraction(1) for e in range(self.m)]
        self.bundles = [set() for _ in range(self.n)]
        self.log = []
        self.path_rounds = 0
        for e in range(self.m):
            if e in profile.consistently_large:
                self.bundles[self.n - 1].add(e)
            else:
                owner = min(i for i in range(self.n) if self.costs[i][e] == 1)
                self.bundles[owner].add(e)

    # -- basic quantities
    def alpha(self):
        return _ratios(self.costs, self.prices)

    def mpb(self, alpha, i, e):
        return _in_mpb(self.costs, self.prices, alpha, i, e)

    def phat(self, i):
        return _phat(self.prices, self.bundles[i], self.w[i])

    def spending(self, i):
        return _spending(self.prices, self.bundles[i], self.w[i])

    def move(self, e, src, dst, rnd, kind):
        if e not in self.bundles[src]:
            raise InvariantViolation("transfer", rnd, f"item {e} not held by agent {src}")
        self.bundles[src].remove(e)
        self.bundles[dst].add(e)
        self.log.append({"round": rnd, "kind": kind, "item": e, "from": src, "to": dst})

    def edges(self, alpha):
        """``succ[j]`` = agents i with an MPB edge j -> i (X_i meets MPB_j)."""
        succ = [[] for _ in range(self.n)]
        for j in range(self.n):
            for i in range(self.n):
                if i != j and any(self.mpb(alpha, j, e) for e in self.bundles[i]):
                    succ[j].append(i)
        return succ

    @staticmethod
    def _dist_to(target, succ, n):
        pred = [[] for _ in range(n)]
        for j in range(n):
            for i in succ[j]:
                pred[i].append(j)
        dist = {target: 0}
        queue = deque([target])
        while queue:
            v = queue.popleft()
            for u in pred[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return dist

    # -- initial equilibrium
    def find_path(self, alpha):
        """Path maximizing p̂ of its end, then shortest, then lexicographic."""
        succ = self.edges(alpha)
        spend = [self.spending(i) for i in range(self.n)]
        best = None
        for end in range(self.n):
            target = self.phat(end)
            dist = self._dist_to(end, succ, self.n)
            starts = [j for j, d in dist.items() if d > 0 and spend[j] < target]
            if not starts:
                continue
            length = min(dist[j] for j in starts)
            node = min(j for j in starts if dist[j] == length)
            path = [node]
            while node != end:
                node = min(i for i in succ[node] if dist.get(i) == dist[node] - 1)
                path.append(node)
            key = (-target, length, tuple(path))
            if best is None or key < best:
                best = key
        return None if best is None else list(best[2])

    def resolve_paths(self):
        # each end-agent appearance lowers its p̂ by at least 1/(w * den(k))
        bound = self.k.numerator * self.n * self.m
        alpha = self.alpha()
        while True:
            path = self.find_path(alpha)
            if path is None:
                return
            self.path_rounds += 1
            if self.check and self.path_rounds > max(bound, 1):
                raise InvariantViolation("initial-path-bound", self.path_rounds, f"exceeded {bound}")
            # path is (i_k, ..., i_0); items travel from i_0 towards i_k
            chain = path[::-1]
            for pos in range(1, len(chain)):
                src, dst = chain[pos - 1], chain[pos]
                options = [e for e in self.bundles[src] if self.mpb(alpha, dst, e)]
                if not options:
                    raise InvariantViolation("initial-path", self.path_rounds, f"no MPB item {src}->{dst}")
                e = min(options, key=lambda x: (-self.prices[x], x))
                self.move(e, src, dst, -self.path_rounds, "path")

    def build_groups(self, alpha):
        succ = self.edges(alpha)
        remaining = set(range(self.n))
        groups, reps = [], []
        while remaining:
            b = min(remaining, key=lambda i: (-self.phat(i), i))
            reach = self._dist_to(b, succ, self.n)
            members = sorted({b} | {i for i in remaining if i in reach})
            groups.append(tuple(members))
            reps.append(b)
            remaining -= set(members)
        return tuple(groups), tuple(reps)

    def snapshot(self, groups, reps, unraised, rnd, initial):
        return MarketState(
            instance=self.inst,
            k=self.k,
            alloc=Allocation(tuple(frozenset(b) for b in self.bundles)),
            prices=tuple(self.prices),
            mpb_ratio=tuple(self.alpha()),
            groups=groups,
            representatives=reps,
            unraised=frozenset(unraised),
            round=rnd,
            initial_alloc=initial,
            log=tuple(self.log),
            path_rounds=self.path_rounds,
        )


def _check_initial(market: _Market, groups, profile):
    alpha = market.alpha()
    if any(a != 1 for a in alpha):
        raise InvariantViolation("initial-alpha", 0, "some MPB ratio differs from 1")
    _check_equilibrium_now(market, alpha, 0)
    group_of = {i: r for r, g in enumerate(groups) for i in g}
    for i in range(market.n):
        for j in range(market.n):
            if group_of[j] > group_of[i]:
                for e in market.bundles[i]:
                    if market.costs[j][e] != market.k:
                        raise InvariantViolation("initial-lower-groups", 0, f"agent {j} finds item {e} cheap")
    last = set().union(*(market.bundles[i] for i in groups[-1]))
    if not set(profile.consistently_large) <= last:
        raise InvariantViolation("initial-large-items", 0, "large items outside the lowest group")
    _check_groups_pwef1(market, groups, 0)


def _check_equilibrium_now(market, alpha, rnd):
    for i in range(market.n):
        for e in market.bundles[i]:
            if not market.mpb(alpha, i, e):
                raise InvariantViolation("equilibrium", rnd, f"agent {i} holds non-MPB item {e}")


def _check_groups_pwef1(market, groups, rnd):
    for g in groups:
        for i in g:
            ph = market.phat(i)
            for j in g:
                if i != j and ph > market.spending(j):
                    raise InvariantViolation("group-pwef1", rnd, f"agent {i} strongly envies {j}")


def initial_equilibrium(inst: Instance, profile: Optional[BivaluedProfile] = None, check_invariants: bool = True) -> MarketState:
    """Seed allocation, MPB path resolution and agent groups.

    Raises :class:`NotBivalued` if ``inst`` is not bi-valued.
    """
    state, _ = _initial(inst, profile, check_invariants)
    return state


def _initial(inst, profile, check):
    if profile is None:
        profile = classify_bivalued(inst)
    market = _Market(profile, check)
    market.resolve_paths()
    groups, reps = market.build_groups(market.alpha())
    if check:
        _check_initial(market, groups, profile)
    initial = Allocation(tuple(frozenset(b) for b in market.bundles))
    state = market.snapshot(groups, reps, set(range(market.n)), 0, initial)
    logger.debug("initial equilibrium after %d path rounds, groups %s", market.path_rounds, groups)
    return state, (market, profile)


class _RoundChecker:
    """Re-verifies the round invariants from scratch."""

    def __init__(self, market: _Market, groups, initial: Allocation):
        self.market = market
        self.groups = groups
        self.initial = initial
        self.raise_count = [0] * len(groups)
        self.past_least = []
        self.last_least_spending = None

    def start_of_round(self, rnd, view, unraised):
        mk = self.market
        alpha = mk.alpha()
        _check_equilibrium_now(mk, alpha, rnd)
        _check_groups_pwef1(mk, self.groups, rnd)
        raised = [r for r, g in enumerate(self.groups) if not (set(g) & unraised)]
        if raised != list(range(len(raised))):
            raise InvariantViolation("raised-prefix", rnd, f"raised groups {raised} are not a prefix")
        for r, g in enumerate(self.groups):
            if set(g) & unraised and not set(g) <= unraised:
                raise InvariantViolation("raised-prefix", rnd, f"group {r} partially raised")
            expected = 1 if r < len(raised) else 0
            if self.raise_count[r] != expected:
                raise InvariantViolation("raised-prefix", rnd, f"group {r} raised {self.raise_count[r]} times")
        inv_k = 1 / mk.k
        for i in range(mk.n):
            if i in unraised:
                if alpha[i] != 1 or not self.initial[i] <= mk.bundles[i]:
                    raise InvariantViolation("raised-prefix", rnd, f"unraised agent {i} lost items or alpha != 1")
            else:
                if alpha[i] != inv_k or not mk.bundles[i] <= self.initial[i]:
                    raise InvariantViolation("raised-prefix", rnd, f"raised agent {i} gained items or alpha != 1/k")
        if any(p != 1 and p != mk.k for p in mk.prices):
            raise InvariantViolation("prices", rnd, "a price left {1, k}")
        least_spending = view.spending[view.least]
        if self.last_least_spending is not None and least_spending < self.last_least_spending:
            raise InvariantViolation("least-spending", rnd, "least spending decreased")
        self.last_least_spending = least_spending

    def big_spender_history(self, rnd, view, unraised):
        # only meaningful while b strongly envies l (the round goes ahead)
        b = view.big
        if b in self.past_least:
            raise InvariantViolation("big-spender", rnd, f"agent {b} was a least spender before")
        if b in unraised:
            g = next(g for g in self.groups if b in g)
            if set(g) & set(self.past_least):
                raise InvariantViolation("big-spender", rnd, "a member of the big spender's group was a least spender")

    def end_of_round(self, view):
        self.past_least.append(view.least)

    def spending_stable(self, rnd, before, allowed):
        mk = self.market
        for i in range(mk.n):
            if i not in allowed and mk.spending(i) != before[i]:
                raise InvariantViolation("spending-stability", rnd, f"agent {i} changed spending")


def solve_wef1_po(inst: Instance, check_invariants: bool = True):
    """WEF1 and PO allocation for a bi-valued instance.

    Returns ``(Allocation, MarketState)``; the state is an equilibrium
    certificate over the rescaled instance.

    >>> inst = Instance.from_lists([1, 1], [[1, 1, 3], [1, 3, 3]])
    >>> alloc, state = solve_wef1_po(inst)
    >>> alloc.describe(), state.round
    ('X1={e1,e2} X2={e3}', 0)
    """
    start, (market, profile) = _initial(inst, None, check_invariants)
    groups = start.groups
    initial = start.initial_alloc
    group_of = {i: r for r, g in enumerate(groups) for i in g}
    unraised = set(range(market.n))
    checker = _RoundChecker(market, groups, initial) if check_invariants else None
    bound = market.n * market.m
    rnd = 0
    while True:
        view = spender_view(market.inst, market.prices, market.bundles)
        if checker:
            checker.start_of_round(rnd, view, unraised)
        b, l = view.big, view.least
        if view.phat[b] <= view.spending[l]:
            break
        if checker:
            checker.big_spender_history(rnd, view, unraised)
        if check_invariants and rnd >= bound:
            raise InvariantViolation("round-bound", rnd, f"more than {bound} rounds")
        before = [market.spending(i) for i in range(market.n)]
        just_raised = set()
        if l in unraised:
            if b in unraised:
                r = group_of[b]
                if check_invariants and r != min(group_of[i] for i in unraised):
                    raise InvariantViolation("raise-order", rnd, f"group {r} is not the highest unraised")
                for i in groups[r]:
                    for e in market.bundles[i]:
                        market.prices[e] *= market.k
                    market.log.append({"round": rnd, "kind": "raise", "agent": i})
                unraised -= set(groups[r])
                just_raised = set(groups[r])
                if checker:
                    checker.raise_count[r] += 1
            alpha = market.alpha()
            if check_invariants and not all(market.mpb(alpha, l, e) for e in market.bundles[b]):
                raise InvariantViolation("big-bundle-mpb", rnd, "big spender holds an item outside MPB of l")
            e = min(market.bundles[b])
            market.move(e, b, l, rnd, "move")
        else:
            if b in unraised:
                raise InvariantViolation("raised-big", rnd, "least spender raised but big spender unraised")
            alpha = market.alpha()
            middle = None
            for i in sorted(unraised):
                if market.bundles[i] & initial[l]:
                    middle = i
                    break
            if middle is None:
                raise InvariantViolation("return-path", rnd, "no unraised holder of the least spender's items")
            options = sorted(e for e in market.bundles[b] if market.mpb(alpha, middle, e))
            if not options:
                raise InvariantViolation("return-path", rnd, f"no MPB item of agent {middle} at the big spender")
            e1 = options[0]
            e2 = min(market.bundles[middle] & initial[l])
            market.move(e1, b, middle, rnd, "swap-in")
            market.move(e2, middle, l, rnd, "swap-out")
        if checker:
            checker.spending_stable(rnd, before, {b, l} | just_raised)
            checker.end_of_round(view)
        rnd += 1
    state = market.snapshot(groups, start.representatives, unraised, rnd, initial)
    logger.debug("solved in %d rounds: %s", rnd, state.alloc.describe())
    return state.alloc, state


def verify_equilibrium(inst: Instance, state: MarketState) -> EquilibriumCheck:
    """Check every held item attains its holder's minimum cost-per-price ratio.

    ``inst`` may be the original instance: per-agent rescaling of costs does not
    change which items attain the minimum.
    """
    if inst.n != len(state.alloc.bundles) or inst.m != len(state.prices):
        return EquilibriumCheck(False)
    alpha = _ratios(inst.costs, state.prices)
    for i in range(inst.n):
        for e in sorted(state.alloc[i]):
            if inst.costs[i][e] / state.prices[e] != alpha[i]:
                return EquilibriumCheck(False, i, e)
    return EquilibriumCheck(True)


def check_pwef1(state: MarketState) -> FairnessReport:
    """Price-weighted EF1: ``p̂_i <= p(X_j)/w_j`` for every ordered pair."""
    inst = state.instance
    w = inst.weights
    for i in range(inst.n):
        bundle = state.alloc[i]
        ph = _phat(state.prices, bundle, w[i])
        for j in range(inst.n):
            if i == j:
                continue
            spend = _spending(state.prices, state.alloc[j], w[j])
            if ph > spend:
                e = min(bundle, key=lambda x: (-state.prices[x], x))
                return FairnessReport("pWEF1", False, Witness(agent=i, other=j, item=e, lhs=ph, rhs=spend))
    return FairnessReport("pWEF1", True)


def pwef1_reduced(state: MarketState) -> bool:
    """The big-spender-versus-least-spender test, equivalent to :func:`check_pwef1`."""
    view = spender_view(state.instance, state.prices, state.alloc.bundles)
    return view.phat[view.big] <= view.spending[view.least]


def certificate_to_dict(state: MarketState, inst: Optional[Instance] = None) -> dict:
    """Serializable certificate: prices, MPB ratios, groups and the transfer log."""
    ref = inst or state.instance
    agent = lambda i: ref.agent_ids[i]  # noqa: E731
    item = lambda e: ref.item_ids[e]  # noqa: E731
    log = []
    for entry in state.log:
        row = {"round": entry["round"], "kind": entry["kind"]}
        if "item" in entry:
            row.update(item=item(entry["item"]), **{"from": agent(entry["from"]), "to": agent(entry["to"])})
        else:
            row["agent"] = agent(entry["agent"])
        log.append(row)
    return {
        "k": format_rational(state.k),
        "prices": {str(item(e)): format_rational(p) for e, p in enumerate(state.prices)},
        "mpb_ratios": {str(agent(i)): format_rational(a) for i, a in enumerate(state.mpb_ratio)},
        "groups": [[agent(i) for i in g] for g in state.groups],
        "representatives": [agent(i) for i in state.representatives],
        "raised": sorted(agent(i) for i in range(ref.n) if i not in state.unraised),
        "rounds": state.round,
        "initial_path_rounds": state.path_rounds,
        "initial_allocation": state.initial_alloc.to_dict(ref),
        "allocation": state.alloc.to_dict(ref),
        "log": log,
    }
