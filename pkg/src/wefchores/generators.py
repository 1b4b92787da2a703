"""Seeded instance generators.

All randomness comes from :class:`random.Random` (Mersenne Twister MT19937),
seeded with the integer seed of a GeneratorSpec, so each one reproduces the
same instance on every run and platform.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Instance, classify_bivalued, format_rational, parse_rational
from .errors import InvalidSpec, NotBivalued
from .fixtures import FIXTURES, get_fixture

GENERATOR_ALGORITHM = "python-random-mt19937"
KINDS = ("random", "bivalued", "ido", "fixture")

_MAX_BIVALUED_TRIES = 1000


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate.

    ``params`` by kind:

    * random / ido: ``denominator`` (costs are ``j/denominator`` with
      ``0 <= j <= denominator``, default 10), ``max_weight`` (integer weights
      drawn from ``1..max_weight`` then normalized, default 10; 1 gives equal
      weights), ``zero_prob`` (chance of a zero cost, default 0)
    * bivalued: ``k`` (default 2), ``high_prob`` (default 1/2), ``max_weight``
    * fixture: ``name`` plus that fixture's own parameters
    """

    kind: str
    n: int = 2
    m: int = 3
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "fixture":
            if int(self.n) < 1 or int(self.m) < 0:
                raise InvalidSpec("need n >= 1 and m >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind is None:
            raise InvalidSpec("generator spec needs a 'kind'")
        n = int(data.pop("n", 2))
        m = int(data.pop("m", 3))
        seed = int(data.pop("seed", 0))
        data.pop("count", None)
        params = dict(data.pop("params", {}))
        params.update(data)
        return cls(kind, n, m, seed, params)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed}
        if self.kind != "fixture":
            out.update(n=self.n, m=self.m)
        if self.params:
            out["params"] = {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in self.params.items()}
        return out

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.kind, self.n, self.m, seed % 2**64, dict(self.params))


def _param(params, name, default):
    return params[name] if name in params else default


def _weights(rng, n, params):
    top = int(_param(params, "max_weight", 10))
    if top < 1:
        raise InvalidSpec("max_weight must be at least 1")
    return [rng.randint(1, top) for _ in range(n)]


def _random_costs(rng, n, m, params):
    den = int(_param(params, "denominator", 10))
    if den < 1:
        raise InvalidSpec("denominator must be at least 1")
    zero = parse_rational(_param(params, "zero_prob", 0))
    rows = []
    for _ in range(n):
        row = []
        for _ in range(m):
            if zero and rng.random() < zero:
                row.append(Fraction(0))
            else:
                row.append(Fraction(rng.randint(0, den), den))
        rows.append(row)
    return rows


def _ido_costs(rng, n, m, params):
    ranking = list(range(m))
    rng.shuffle(ranking)
    rows = _random_costs(rng, n, m, params)
    out = []
    for row in rows:
        ordered = sorted(row, reverse=True)
        shaped = [Fraction(0)] * m
        for pos, item in enumerate(ranking):
            shaped[item] = ordered[pos]
        out.append(shaped)
    return out


def _bivalued(rng, n, m, params):
    k = parse_rational(_param(params, "k", 2))
    if k <= 1:
        raise InvalidSpec("bivalued k must exceed 1")
    if n * m < 2:
        raise InvalidSpec("a bi-valued instance needs at least two cost entries")
    high = parse_rational(_param(params, "high_prob", Fraction(1, 2)))
    weights = _weights(rng, n, params)
    for _ in range(_MAX_BIVALUED_TRIES):
        costs = [[k if rng.random() < high else Fraction(1) for _ in range(m)] for _ in range(n)]
        inst = Instance.from_lists(weights, costs)
        try:
            classify_bivalued(inst)
        except NotBivalued:
            continue
        return inst
    raise InvalidSpec("could not draw a bi-valued instance; adjust high_prob")


def generate(spec: GeneratorSpec) -> Instance:
    """Deterministic instance for ``spec``.

    >>> a = generate(GeneratorSpec("random", 3, 5, seed=7))
    >>> a == generate(GeneratorSpec("random", 3, 5, seed=7))
    True
    """
    params = spec.params
    if spec.kind == "fixture":
        params = dict(params)
        name = params.pop("name", None)
        if name is None:
            raise InvalidSpec(f"fixture spec needs a 'name' (one of {', '.join(FIXTURES)})")
        return get_fixture(name, **params)
    rng = random.Random(int(spec.seed))
    n, m = int(spec.n), int(spec.m)
    if spec.kind == "bivalued":
        return _bivalued(rng, n, m, params)
    weights = _weights(rng, n, params)
    if spec.kind == "random":
        costs = _random_costs(rng, n, m, params)
    else:
        costs = _ido_costs(rng, n, m, params)
    return Instance.from_lists(weights, costs)
