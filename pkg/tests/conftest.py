"""Shared hypothesis strategies and seeded instance helpers."""

import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wefchores.core import Allocation, Instance

settings.register_profile(
    "default",
    max_examples=150,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

COST_VALUES = [Fraction(j, 4) for j in range(5)] + [Fraction(1, 3), Fraction(7, 5), Fraction(3)]


@st.composite
def weights_st(draw, n):
    return [Fraction(draw(st.integers(1, 9))) for _ in range(n)]


@st.composite
def instances(draw, n_range=(1, 4), m_range=(0, 6), values=None):
    n = draw(st.integers(*n_range))
    m = draw(st.integers(*m_range))
    pool = st.sampled_from(values or COST_VALUES)
    costs = [[draw(pool) for _ in range(m)] for _ in range(n)]
    return Instance.from_lists(draw(weights_st(n)), costs)


@st.composite
def instance_and_alloc(draw, n_range=(1, 4), m_range=(0, 6), values=None):
    inst = draw(instances(n_range, m_range, values))
    labels = [draw(st.integers(0, inst.n - 1)) for _ in range(inst.m)]
    return inst, Allocation.from_labels(labels, inst.n)


@st.composite
def bivalued_instances(draw, n_range=(1, 4), m_range=(1, 7)):
    k = draw(st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5)]))
    n = draw(st.integers(*n_range))
    m = draw(st.integers(*m_range))
    costs = [[draw(st.sampled_from([Fraction(1), k])) for _ in range(m)] for _ in range(n)]
    # every agent needs a cheap item and both values must show up somewhere
    hi = draw(st.integers(0, n - 1))
    for i in range(n):
        costs[i][draw(st.integers(0, m - 1))] = Fraction(1)
    if m >= 2 or n >= 2:
        costs[hi][draw(st.integers(0, m - 1))] = k
        for i in range(n):
            if all(c == k for c in costs[i]):
                costs[i][0] = Fraction(1)
    return Instance.from_lists(draw(weights_st(n)), costs)


def random_instance(rng, n, m, den=10, max_weight=10):
    weights = [rng.randint(1, max_weight) for _ in range(n)]
    costs = [[Fraction(rng.randint(0, den), den) for _ in range(m)] for _ in range(n)]
    return Instance.from_lists(weights, costs)


def random_allocation(rng, inst):
    return Allocation.from_labels([rng.randrange(inst.n) for _ in range(inst.m)], inst.n)


def seeded(seed):
    return random.Random(seed)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "error":
                continue
            label = dict(getattr(rep, "user_properties", ())).get("criterion")
            if label:
                lines.append((label, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, verdict in sorted(lines, key=lambda p: int(p[0].split()[0])):
            terminalreporter.write_line(f"{verdict}  criterion {label}")
