"""Named instances used throughout the tests and the CLI.

Small parameters (``eps``, ``alpha``, ``n``) are exact rationals; ``eps``
stands for an "arbitrarily small" positive number and defaults to 1/100.
"""

from __future__ import annotations

from fractions import Fraction

from .core import Allocation, Instance, parse_rational
from .errors import InvalidSpec

DEFAULT_EPS = Fraction(1, 100)


def table1(eps=DEFAULT_EPS) -> Instance:
    """Two identical agents, weights 3/10 and 7/10, costs (eps, 1, 1).

    The forward weighted picking protocol fails WEF1 here.
    """
    eps = parse_rational(eps)
    row = (eps, Fraction(1), Fraction(1))
    return Instance.from_lists([Fraction(3, 10), Fraction(7, 10)], [row, row])


def example_continuous() -> Instance:
    """Weights 2/5 and 3/5 over five items (forward sequence 1,2,2,1,2).

    Only the weights matter for the sequence; the costs are an arbitrary
    normalized identical profile.
    """
    row = [Fraction(c, 15) for c in (1, 2, 3, 4, 5)]
    return Instance.from_lists([Fraction(2, 5), Fraction(3, 5)], [row, list(row)])


def table3(alpha=2, eps=DEFAULT_EPS) -> Instance:
    """Two-agent lower-bound instance for the price of WEF1.

    ``w1 = alpha/(1+alpha)``, ``w2 = 1/(1+alpha)``; both rows sum to one.
    """
    alpha = parse_rational(alpha)
    eps = parse_rational(eps)
    if alpha < 1:
        raise InvalidSpec("alpha must be at least 1")
    big = alpha / (alpha + 2) - 2 * eps
    small = 1 / (alpha + 2) + eps
    if big < 0:
        raise InvalidSpec("eps too large for this alpha")
    half = Fraction(1, 2)
    return Instance.from_lists(
        [alpha / (1 + alpha), 1 / (1 + alpha)],
        [[Fraction(0), half, half], [big, small, small]],
    )


def table3_pof(alpha=2, eps=DEFAULT_EPS) -> Fraction:
    """Closed-form price of WEF1 on :func:`table3`."""
    alpha = parse_rational(alpha)
    eps = parse_rational(eps)
    return (alpha + 4 + 2 * eps * (alpha + 2)) / (4 + 4 * eps * (alpha + 2))


def table4(n=3) -> Instance:
    """n identical equal-weight agents, 2n-1 items, where WEF1 is only (2 - 1/n)-APS."""
    n = int(n)
    if n < 2:
        raise InvalidSpec("table4 needs n >= 2")
    row = [Fraction(1, n)] + [(1 - Fraction(1, n)) / n] * (n - 1) + [Fraction(1, n * n)] * (n - 1)
    return Instance.from_lists([1] * n, [list(row) for _ in range(n)])


def table4_boxed(n=3) -> Allocation:
    """Agent 1 gets e1,e2; agent r (2 <= r < n) gets e_{r+1}; agent n gets e_{n+1..2n-1}."""
    n = int(n)
    bundles = [{0, 1}]
    for r in range(2, n):
        bundles.append({r})
    bundles.append(set(range(n, 2 * n - 1)))
    return Allocation(tuple(bundles))


def table5(eps=DEFAULT_EPS) -> Instance:
    """Two equal-weight identical agents with costs (eps, 1, 1)."""
    eps = parse_rational(eps)
    row = (eps, Fraction(1), Fraction(1))
    return Instance.from_lists([1, 1], [row, row])


def table5_boxed() -> Allocation:
    """X1 = {e2, e3}, X2 = {e1}: WPROP1 (even WPROPX) but not WEF1."""
    return Allocation(({1, 2}, {0}))


def aps_counterexample(eps=DEFAULT_EPS) -> Instance:
    """Three equal agents, identical costs (1, 1/2, 1/2, eps)."""
    eps = parse_rational(eps)
    row = (Fraction(1), Fraction(1, 2), Fraction(1, 2), eps)
    return Instance.from_lists([1, 1, 1], [row, row, row])


def aps_counterexample_allocation() -> Allocation:
    return Allocation(({0}, {1, 2}, {3}))


FIXTURES = {
    "table1": (table1, ("eps",)),
    "example-continuous": (example_continuous, ()),
    "table3": (table3, ("alpha", "eps")),
    "table4": (table4, ("n",)),
    "table5": (table5, ("eps",)),
    "aps-counterexample": (aps_counterexample, ("eps",)),
}


def get_fixture(name: str, **params) -> Instance:
    """Build a named fixture; unknown names or parameters raise InvalidSpec."""
    try:
        builder, allowed = FIXTURES[name]
    except KeyError:
        raise InvalidSpec(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
    extra = set(params) - set(allowed)
    if extra:
        raise InvalidSpec(f"fixture {name!r} takes no parameter(s) {sorted(extra)}")
    return builder(**params)
