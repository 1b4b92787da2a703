"""Exact-arithmetic domain types: instances, allocations, bi-valued profiles.

Every number that can influence a fairness verdict is a :class:`fractions.Fraction`.
Agents and items are 0-indexed in memory; files and reports use the ids stored on
the instance (``1..n`` and ``1..m`` by default).
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatch,
    IncompleteAllocation,
    InstanceError,
    NegativeCost,
    NonPositiveWeight,
    NotBivalued,
    ParseError,
    ZeroTotalCost,
)

__all__ = [
    "Allocation",
    "BivaluedProfile",
    "Instance",
    "classify_bivalued",
    "dump_allocation",
    "dump_instance",
    "format_rational",
    "load_allocation",
    "load_instance",
    "normalize_costs",
    "parse_rational",
    "scale_weights",
    "social_cost",
]


def parse_rational(value) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Accepts ints, Fractions, strings such as ``"3"``, ``"-1/2"`` or ``"0.25"``,
    and finite floats (through their shortest decimal repr, so ``0.1`` is ``1/10``).

    >>> parse_rational("3/10")
    Fraction(3, 10)
    >>> parse_rational(0.1)
    Fraction(1, 10)
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty string")
        return Fraction(text)
    # numpy scalars and friends
    if hasattr(value, "item"):
        return parse_rational(value.item())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(value: Fraction) -> str:
    """Render as ``"p/q"`` (or ``"p"`` for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Instance:
    """A weighted chore-division instance with weights summing to one.

    Build from raw data with :meth:`from_lists`; the constructor itself only
    validates and expects canonical (normalized) weights.
    """

    weights: tuple[Fraction, ...]
    costs: tuple[tuple[Fraction, ...], ...]
    agent_ids: tuple = ()
    item_ids: tuple = ()
    weight_scale: Fraction = field(default=Fraction(1), compare=False)

    def __post_init__(self):
        n = len(self.weights)
        if n < 1:
            raise DimensionMismatch("an instance needs at least one agent")
        if len(self.costs) != n:
            raise DimensionMismatch(f"{n} weights but {len(self.costs)} cost rows")
        m = len(self.costs[0])
        for i, row in enumerate(self.costs):
            if len(row) != m:
                raise DimensionMismatch(
                    f"cost row has {len(row)} entries, expected {m}", (i + 1, None)
                )
            for e, c in enumerate(row):
                if c < 0:
                    raise NegativeCost(f"negative cost {format_rational(c)}", (i + 1, e + 1))
        for i, w in enumerate(self.weights):
            if w <= 0:
                raise NonPositiveWeight(f"weight {format_rational(w)} is not positive", (i + 1, None))
        if sum(self.weights) != 1:
            raise InstanceError("weights must sum to 1; use Instance.from_lists to normalize")
        if not self.agent_ids:
            object.__setattr__(self, "agent_ids", tuple(range(1, n + 1)))
        if not self.item_ids:
            object.__setattr__(self, "item_ids", tuple(range(1, m + 1)))
        if len(self.agent_ids) != n:
            raise DimensionMismatch(f"{len(self.agent_ids)} agent ids for {n} agents")
        if len(self.item_ids) != m:
            raise DimensionMismatch(f"{len(self.item_ids)} item ids for {m} items")
        if len(set(self.agent_ids)) != n or len(set(self.item_ids)) != m:
            raise InstanceError("agent and item ids must be unique")

    @classmethod
    def from_lists(cls, weights, costs, agent_ids=None, item_ids=None) -> "Instance":
        """Validate raw data, convert to Fractions and normalize the weights.

        ``weights`` may be ``None`` for equal weights. The original weight sum
        is kept in :attr:`weight_scale`.
        """
        rows = [list(row) for row in costs]
        if weights is None:
            if not rows:
                raise DimensionMismatch("cannot infer agent count from an empty cost matrix")
            weights = [1] * len(rows)
        raw_w = []
        for i, w in enumerate(weights):
            try:
                raw_w.append(parse_rational(w))
            except (TypeError, ValueError) as exc:
                raise ParseError(f"bad weight {w!r} ({exc})", (i + 1, None)) from None
        if len(rows) != len(raw_w):
            raise DimensionMismatch(f"{len(raw_w)} weights but {len(rows)} cost rows")
        parsed = []
        for i, row in enumerate(rows):
            out = []
            for e, c in enumerate(row):
                try:
                    out.append(parse_rational(c))
                except (TypeError, ValueError) as exc:
                    raise ParseError(f"bad cost {c!r} ({exc})", (i + 1, e + 1)) from None
            parsed.append(tuple(out))
        for i, w in enumerate(raw_w):
            if w <= 0:
                raise NonPositiveWeight(f"weight {format_rational(w)} is not positive", (i + 1, None))
        total = sum(raw_w)
        return cls(
            weights=tuple(w / total for w in raw_w),
            costs=tuple(parsed),
            agent_ids=tuple(agent_ids) if agent_ids is not None else (),
            item_ids=tuple(item_ids) if item_ids is not None else (),
            weight_scale=total,
        )

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def m(self) -> int:
        return len(self.costs[0])

    def cost(self, agent: int, bundle: Iterable[int]) -> Fraction:
        row = self.costs[agent]
        return sum((row[e] for e in bundle), Fraction(0))

    def total_cost(self, agent: int) -> Fraction:
        return sum(self.costs[agent], Fraction(0))

    def with_costs(self, costs) -> "Instance":
        return Instance(self.weights, tuple(tuple(r) for r in costs), self.agent_ids,
                        self.item_ids, self.weight_scale)

    def with_weights(self, weights) -> "Instance":
        return Instance.from_lists(weights, self.costs, self.agent_ids, self.item_ids)


@dataclass(frozen=True)
class Allocation:
    """A partition of item indices into one bundle per agent."""

    bundles: tuple[frozenset, ...]

    def __post_init__(self):
        bundles = tuple(frozenset(b) for b in self.bundles)
        object.__setattr__(self, "bundles", bundles)
        seen = set()
        for b in bundles:
            if seen & b:
                raise IncompleteAllocation(f"items {sorted(seen & b)} appear in two bundles")
            seen |= b

    @classmethod
    def from_labels(cls, labels: Sequence[int], n: int) -> "Allocation":
        """Build from a per-item owner list, e.g. ``[0, 1, 1]``."""
        bundles = [set() for _ in range(n)]
        for e, owner in enumerate(labels):
            bundles[owner].add(e)
        return cls(tuple(bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def __getitem__(self, agent: int) -> frozenset:
        return self.bundles[agent]

    def __iter__(self):
        return iter(self.bundles)

    def labels(self, m: int) -> tuple[int, ...]:
        owner = [-1] * m
        for i, b in enumerate(self.bundles):
            for e in b:
                owner[e] = i
        return tuple(owner)

    def is_complete(self, m: int) -> bool:
        return sum(len(b) for b in self.bundles) == m and all(
            0 <= e < m for b in self.bundles for e in b
        )

    def require_complete(self, inst: Instance) -> None:
        if self.n != inst.n:
            raise IncompleteAllocation(f"allocation has {self.n} bundles for {inst.n} agents")
        if not self.is_complete(inst.m):
            raise IncompleteAllocation("allocation does not cover every item exactly once")

    def to_dict(self, inst: Instance) -> dict:
        return {
            str(inst.agent_ids[i]): [inst.item_ids[e] for e in sorted(b)]
            for i, b in enumerate(self.bundles)
        }

    def describe(self) -> str:
        """1-indexed compact rendering, e.g. ``X1={e1} X2={e2,e3}``."""
        parts = []
        for i, b in enumerate(self.bundles):
            inner = ",".join(f"e{e + 1}" for e in sorted(b))
            parts.append(f"X{i + 1}={{{inner}}}")
        return " ".join(parts)


def social_cost(inst: Instance, alloc: Allocation) -> Fraction:
    """Sum over agents of their cost for their own bundle."""
    return sum((inst.cost(i, alloc[i]) for i in range(inst.n)), Fraction(0))


def normalize_costs(inst: Instance) -> Instance:
    """Scale every cost row so that the agent's total cost is exactly 1."""
    rows = []
    for i, row in enumerate(inst.costs):
        total = sum(row, Fraction(0))
        if total == 0:
            raise ZeroTotalCost(i)
        rows.append(tuple(c / total for c in row))
    return inst.with_costs(rows)


def scale_weights(inst: Instance, factor) -> Instance:
    """Multiply the raw weights by ``factor``; the canonical weights do not change."""
    factor = parse_rational(factor)
    return Instance.from_lists([w * inst.weight_scale * factor for w in inst.weights],
                               inst.costs, inst.agent_ids, inst.item_ids)


@dataclass(frozen=True)
class BivaluedProfile:
    """Result of :func:`classify_bivalued`.

    ``instance`` is the rescaled instance whose costs are all exactly 1 or ``k``.
    """

    k: Fraction
    large: tuple[tuple[bool, ...], ...]
    consistently_large: frozenset
    other: frozenset
    instance: Instance = field(repr=False)
    row_scale: tuple[Fraction, ...] = ()

    low = Fraction(1)

    @property
    def high(self) -> Fraction:
        return self.k


def classify_bivalued(inst: Instance) -> BivaluedProfile:
    """Detect a {a, b} cost structure and rescale it to {1, k}.

    Raises :class:`NotBivalued` for zero costs, a single distinct value, more
    than two values, or rows that all become constant after rescaling. Agents whose every cost is ``k`` after the global rescaling
    have their row divided by ``k``, so every agent has some item of cost 1.
    """
    values = {c for row in inst.costs for c in row}
    if not values:
        raise NotBivalued("no items")
    if 0 in values:
        raise NotBivalued("bi-valued instances must have non-zero costs")
    if len(values) == 1:
        raise NotBivalued("single-valued instance")
    if len(values) > 2:
        raise NotBivalued(f"{len(values)} distinct cost values")
    a, b = sorted(values)
    k = b / a
    rows = []
    scales = []
    for row in inst.costs:
        scaled = tuple(c / a for c in row)
        scale = 1 / a
        if all(c == k for c in scaled):
            scaled = tuple(Fraction(1) for _ in scaled)
            scale = scale / k
        rows.append(scaled)
        scales.append(scale)
    if all(c == 1 for row in rows for c in row):
        raise NotBivalued("every agent is indifferent between items after rescaling")
    large = tuple(tuple(c == k for c in row) for row in rows)
    m = inst.m
    plus = frozenset(e for e in range(m) if all(large[i][e] for i in range(inst.n)))
    return BivaluedProfile(
        k=k,
        large=large,
        consistently_large=plus,
        other=frozenset(range(m)) - plus,
        instance=inst.with_costs(rows),
        row_scale=tuple(scales),
    )


# --------------------------------------------------------------------- file I/O


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    if isinstance(source, (io.IOBase,)) or hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    raise TypeError(f"cannot read from {type(source).__name__}")


def instance_from_dict(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise ParseError("instance document must be an object")
    for key in ("agents", "costs"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    agents = data["agents"]
    if not isinstance(agents, list) or not agents:
        raise ParseError("'agents' must be a non-empty list")
    ids, weights = [], []
    for idx, a in enumerate(agents):
        if isinstance(a, dict):
            if "weight" not in a:
                raise ParseError("agent entry without a weight", (idx + 1, None))
            ids.append(a.get("id", idx + 1))
            weights.append(a["weight"])
        else:
            ids.append(idx + 1)
            weights.append(a)
    costs = data["costs"]
    if not isinstance(costs, list) or len(costs) != len(agents):
        raise DimensionMismatch(
            f"'costs' must have one row per agent ({len(agents)})"
        )
    items = data.get("items")
    if items is None:
        items = list(range(1, len(costs[0]) + 1)) if costs and isinstance(costs[0], list) else []
    for i, row in enumerate(costs):
        if not isinstance(row, list):
            raise ParseError("cost row must be a list", (i + 1, None))
        if len(row) != len(items):
            raise DimensionMismatch(
                f"cost row has {len(row)} entries for {len(items)} items", (i + 1, None)
            )
    return Instance.from_lists(weights, costs, ids, items)


def instance_to_dict(inst: Instance, raw_weights: bool = False) -> dict:
    scale = inst.weight_scale if raw_weights else 1
    return {
        "agents": [
            {"id": aid, "weight": format_rational(w * scale)}
            for aid, w in zip(inst.agent_ids, inst.weights)
        ],
        "items": list(inst.item_ids),
        "costs": [[format_rational(c) for c in row] for row in inst.costs],
    }


def load_instance(source) -> Instance:
    """Parse an instance document (JSON text, bytes or a readable stream)."""
    text = _read_text(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return instance_from_dict(data)


def dump_instance(inst: Instance, raw_weights: bool = False) -> str:
    return json.dumps(instance_to_dict(inst, raw_weights), indent=2) + "\n"


def load_allocation(source, inst: Instance) -> Allocation:
    """Parse ``{"allocation": {agent_id: [item_id, ...]}}`` against ``inst``."""
    text = _read_text(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    mapping = data.get("allocation", data) if isinstance(data, dict) else None
    if not isinstance(mapping, dict):
        raise ParseError("allocation document must map agent ids to item lists")
    agent_index = {str(a): i for i, a in enumerate(inst.agent_ids)}
    item_index = {str(e): j for j, e in enumerate(inst.item_ids)}
    bundles = [set() for _ in range(inst.n)]
    for aid, items in mapping.items():
        if str(aid) not in agent_index:
            raise ParseError(f"unknown agent id {aid!r}")
        for e in items:
            if str(e) not in item_index:
                raise ParseError(f"unknown item id {e!r}")
            bundles[agent_index[str(aid)]].add(item_index[str(e)])
    return Allocation(tuple(bundles))


def dump_allocation(alloc: Allocation, inst: Instance) -> str:
    return json.dumps({"allocation": alloc.to_dict(inst)}, indent=2) + "\n"
