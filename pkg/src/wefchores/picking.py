"""Weighted picking sequences for chores (and the forward protocol for goods).

The forward sequence gives slot ``t`` to the agent with the smallest weighted
count ``s_i = (#appearances)/w_i``. For chores the sequence is then executed
back to front, each agent taking their cheapest remaining item.

Agent and item indices are 0-based here; ``PickingSequence.as_ids`` renders
the 1-based line used in files and CLI output.

>>> from fractions import Fraction as F
>>> seq, _ = generate_rwps_sequence([F(2, 5), F(3, 5)], 5)
>>> seq.as_ids()
'1 2 2 1 2'
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import Allocation, Instance, parse_rational
from .errors import InfeasibleParameters, InvalidSpec

logger = logging.getLogger(__name__)

FORWARD = "forward"
REVERSED = "reversed"
MIN_COST = "min-cost"
MAX_VALUE = "max-value"


@dataclass(frozen=True)
class PickingSequence:
    order: tuple
    direction: str = REVERSED

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(a) for a in self.order))
        if self.direction not in (FORWARD, REVERSED):
            raise InvalidSpec(f"direction must be {FORWARD!r} or {REVERSED!r}")
        if any(a < 0 for a in self.order):
            raise InvalidSpec("agent indices must be non-negative")

    def __len__(self):
        return len(self.order)

    def picking_order(self) -> tuple:
        return self.order[::-1] if self.direction == REVERSED else self.order

    def as_ids(self, agent_ids: Optional[Sequence] = None) -> str:
        if agent_ids is None:
            return " ".join(str(a + 1) for a in self.order)
        return " ".join(str(agent_ids[a]) for a in self.order)

    @classmethod
    def from_ids(cls, text: str, direction: str = REVERSED) -> "PickingSequence":
        """Parse a whitespace-separated line of 1-based agent ids."""
        ids = [int(tok) for tok in text.split()]
        if any(a < 1 for a in ids):
            raise InvalidSpec("agent ids in a sequence line start at 1")
        return cls(tuple(a - 1 for a in ids), direction)


@dataclass(frozen=True)
class SizeTrajectory:
    """``values[t][i]`` is ``s_i(t)``, the weighted count after ``t`` slots."""

    values: tuple

    @classmethod
    def of(cls, order: Sequence[int], weights: Sequence[Fraction]) -> "SizeTrajectory":
        n = len(weights)
        current = [Fraction(0)] * n
        rows = [tuple(current)]
        for a in order:
            if a >= n:
                raise InvalidSpec(f"agent index {a} out of range for {n} agents")
            current[a] += 1 / weights[a]
            rows.append(tuple(current))
        return cls(tuple(rows))

    def __getitem__(self, t):
        return self.values[t]

    def __len__(self):
        return len(self.values)


def _weights_of(source) -> tuple:
    if isinstance(source, Instance):
        return source.weights
    weights = tuple(parse_rational(w) for w in source)
    if not weights or any(w <= 0 for w in weights):
        raise InvalidSpec("weights must be a non-empty list of positive rationals")
    total = sum(weights)
    return tuple(w / total for w in weights)


def _items_of(source, m):
    if m is not None:
        return int(m)
    if isinstance(source, Instance):
        return source.m
    raise InvalidSpec("m is required when passing raw weights")


def _greedy_sequence(weights, m, offsets):
    sizes = [Fraction(0)] * len(weights)
    order = []
    for _ in range(m):
        agent = min(range(len(weights)), key=lambda i: (sizes[i] + offsets[i], i))
        order.append(agent)
        sizes[agent] += 1 / weights[agent]
    return order


def generate_rwps_sequence(source, m: Optional[int] = None):
    """Forward sequence by smallest weighted count, ties to the lowest index.

    ``source`` is an Instance or a list of weights (then ``m`` is required).
    Returns ``(PickingSequence, SizeTrajectory)``.
    """
    weights = _weights_of(source)
    m = _items_of(source, m)
    order = _greedy_sequence(weights, m, [Fraction(0)] * len(weights))
    return PickingSequence(tuple(order), REVERSED), SizeTrajectory.of(order, weights)


def generate_wefxy_sequence(source, x, y, m: Optional[int] = None):
    """Forward sequence for WEF(x, y): pick argmin of ``s_i + (1 - x)/w_i``.

    The selected agent always satisfies the required comparison against every
    other agent when ``x + y >= 1``; below that it may not exist.
    """
    x = parse_rational(x)
    y = parse_rational(y)
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise InvalidSpec("x and y must lie in [0, 1]")
    if x + y < 1:
        raise InfeasibleParameters(f"WEF({x},{y}) sequences need x + y >= 1")
    weights = _weights_of(source)
    m = _items_of(source, m)
    offsets = [(1 - x) / w for w in weights]
    order = _greedy_sequence(weights, m, offsets)
    return PickingSequence(tuple(order), REVERSED), SizeTrajectory.of(order, weights)


@dataclass(frozen=True)
class ConditionResult:
    holds: bool
    t: Optional[int] = None
    i: Optional[int] = None
    j: Optional[int] = None

    def __bool__(self):
        return self.holds


def check_sequence_condition(seq, weights, x, y) -> ConditionResult:
    """Check ``s_i(t) - x/w_i <= s_j(t) + y/w_j`` for every prefix and ordered pair.

    ``t`` in the result is 1-based (the prefix length); ``i``/``j`` are 0-based.
    """
    if not isinstance(seq, PickingSequence):
        seq = PickingSequence(tuple(seq))
    weights = _weights_of(weights)
    x = parse_rational(x)
    y = parse_rational(y)
    traj = SizeTrajectory.of(seq.order, weights)
    n = len(weights)
    for t in range(1, len(seq) + 1):
        s = traj[t]
        for i in range(n):
            left = s[i] - x / weights[i]
            for j in range(n):
                if i != j and left > s[j] + y / weights[j]:
                    return ConditionResult(False, t, i, j)
    return ConditionResult(True)


def witness_instance(seq, weights, t: int) -> Instance:
    """Instance where the first ``t`` items cost 1 to everyone and the rest 0.

    Executing a reversed sequence that breaks the condition at ``t`` on this
    instance leaves the violating pair with the offending counts of unit items.
    """
    if not isinstance(seq, PickingSequence):
        seq = PickingSequence(tuple(seq))
    weights = _weights_of(weights)
    m = len(seq)
    if not 1 <= t <= m:
        raise InvalidSpec(f"t must lie in 1..{m}")
    row = [Fraction(1)] * t + [Fraction(0)] * (m - t)
    return Instance.from_lists(list(weights), [list(row) for _ in weights])


def execute_picking(inst: Instance, seq: PickingSequence, objective: str = MIN_COST) -> Allocation:
    """Run the sequence; the direction decides which end picks first.

    With ``min-cost`` each agent takes their cheapest remaining item, with
    ``max-value`` their most valuable one; ties go to the lowest item index.
    """
    if len(seq) != inst.m:
        raise InvalidSpec(f"sequence has length {len(seq)}, instance has {inst.m} items")
    if objective not in (MIN_COST, MAX_VALUE):
        raise InvalidSpec(f"objective must be {MIN_COST!r} or {MAX_VALUE!r}")
    sign = 1 if objective == MIN_COST else -1
    remaining = set(range(inst.m))
    bundles = [set() for _ in range(inst.n)]
    for agent in seq.picking_order():
        if agent >= inst.n:
            raise InvalidSpec(f"agent index {agent} out of range for {inst.n} agents")
        row = inst.costs[agent]
        item = min(remaining, key=lambda e: (sign * row[e], e))
        remaining.remove(item)
        bundles[agent].add(item)
    return Allocation(tuple(bundles))


def rwps(inst: Instance) -> Allocation:
    """WEF1 allocation for chores via the reversed weighted picking sequence."""
    seq, _ = generate_rwps_sequence(inst)
    alloc = execute_picking(inst, seq, MIN_COST)
    logger.debug("rwps sequence %s -> %s", seq.as_ids(), alloc.describe())
    return alloc


def wefxy_allocation(inst: Instance, x, y) -> Allocation:
    seq, _ = generate_wefxy_sequence(inst, x, y)
    return execute_picking(inst, seq, MIN_COST)


def goods_weighted_protocol(inst: Instance) -> Allocation:
    """Forward sequence, executed front to back, each agent taking their best item."""
    seq, _ = generate_rwps_sequence(inst)
    return execute_picking(inst, PickingSequence(seq.order, FORWARD), MAX_VALUE)
