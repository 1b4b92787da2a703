import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wefchores import _sweep
from wefchores.audit import check_wef1
from wefchores.budget import EnumerationBudget
from wefchores.core import Allocation, Instance, normalize_costs
from wefchores.errors import BudgetExceeded, UndefinedRatio, ZeroTotalCost
from wefchores.fixtures import (
    aps_counterexample,
    aps_counterexample_allocation,
    table1,
    table3,
    table3_pof,
    table4,
    table4_boxed,
)
from wefchores.oracle import (
    aps_exact,
    check_alpha_aps,
    enumerate_allocations,
    existence_sweep,
    opt_social_cost,
    price_of_fairness,
    sweep_weight_vectors,
    wef1_exists,
)
from wefchores.picking import FORWARD, PickingSequence, execute_picking, generate_rwps_sequence, rwps

from conftest import instances, random_allocation, random_instance, seeded


def aps_grid_lower_bound(inst, i, den):
    """max over price vectors with denominator ``den`` of the cheapest bundle priced at least w_i."""
    m, w, row = inst.m, inst.weights[i], inst.costs[i]
    best = F(0)
    for parts in itertools.product(range(den + 1), repeat=m):
        if sum(parts) != den:
            continue
        cheapest = min(
            sum((row[e] for e in range(m) if mask >> e & 1), F(0))
            for mask in range(1 << m)
            if sum(parts[e] for e in range(m) if mask >> e & 1) >= w * den
        )
        best = max(best, cheapest)
    return best


class TestEnumerate:
    @pytest.mark.parametrize("n, m, count", [(2, 2, 4), (3, 3, 27), (1, 4, 1)])
    def test_counts(self, n, m, count):
        inst = Instance.from_lists([1] * n, [[1] * m for _ in range(n)])
        allocs = list(enumerate_allocations(inst))
        assert len(allocs) == count
        assert len(set(allocs)) == count

    def test_base_n_order(self):
        inst = Instance.from_lists([1, 1], [[1, 1], [1, 1]])
        assert [a.labels(2) for a in enumerate_allocations(inst)] == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_budget(self):
        inst = Instance.from_lists([1, 1], [[1] * 6, [1] * 6])
        with pytest.raises(BudgetExceeded):
            next(enumerate_allocations(inst, EnumerationBudget(max_states=63)))

    def test_env_budget(self, monkeypatch):
        monkeypatch.setenv("WEFCHORES_MAX_STATES", "10")
        inst = Instance.from_lists([1, 1], [[1] * 4, [1] * 4])
        with pytest.raises(BudgetExceeded):
            next(enumerate_allocations(inst))


class TestOpt:
    def test_table3(self):
        opt, alloc = opt_social_cost(table3(2, F(1, 100)))
        assert opt == F(13, 25)
        assert alloc == Allocation(({0}, {1, 2}))

    def test_identical_rows(self):
        inst = Instance.from_lists([1, 2], [[1, 2, 3], [1, 2, 3]])
        assert opt_social_cost(inst)[0] == 6

    def test_zero_item(self):
        inst = Instance.from_lists([1, 1], [[0, 1], [5, 2]])
        assert opt_social_cost(inst)[0] == 1

    @given(instances(m_range=(0, 5)))
    def test_matches_enumeration(self, inst):
        brute = min(sum(inst.cost(i, a[i]) for i in range(inst.n)) for a in enumerate_allocations(inst))
        assert opt_social_cost(inst)[0] == brute


class TestPoF:
    @pytest.mark.parametrize("alpha, expected", [(1, F(253, 206)), (2, F(19, 13)), (4, F(203, 106))])
    def test_table3_closed_form(self, alpha, expected):
        eps = F(1, 100)
        closed = (alpha + 4 + 2 * eps * (alpha + 2)) / (4 + 4 * eps * (alpha + 2))
        assert closed == expected == table3_pof(alpha, eps)
        assert price_of_fairness(table3(alpha, eps)) == closed

    def test_even_split_is_one(self):
        inst = Instance.from_lists([1, 1], [[1, 1, 1, 1], [1, 1, 1, 1]])
        assert price_of_fairness(inst) == 1

    def test_zero_row(self):
        with pytest.raises(ZeroTotalCost):
            price_of_fairness(Instance.from_lists([1, 1], [[0, 0], [1, 1]]))

    def test_zero_opt(self):
        with pytest.raises(UndefinedRatio):
            price_of_fairness(Instance.from_lists([1, 1], [[0, 1], [1, 0]]))

    def test_sandwich(self):
        rng = seeded(3)
        checked = 0
        for _ in range(120):
            inst = random_instance(rng, 2, rng.randint(1, 6), den=4)
            try:
                pof = price_of_fairness(inst)
            except (ZeroTotalCost, UndefinedRatio):
                continue
            alpha = max(inst.weights) / min(inst.weights)
            assert 1 <= pof <= (4 + alpha) / 4
            checked += 1
        assert checked > 60


class TestExists:
    def test_table1(self):
        assert check_wef1(table1(), wef1_exists(table1()))

    def test_no_items(self):
        inst = Instance.from_lists([1, 1], [[], []])
        assert wef1_exists(inst) == Allocation((set(), set()))

    def test_single_agent(self):
        inst = Instance.from_lists([1], [[1, 2]])
        assert wef1_exists(inst) == Allocation(({0, 1},))


class TestAPS:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_table4(self, n):
        inst = table4(n)
        assert inst.m == 2 * n - 1
        assert all(aps_exact(inst, i) == F(1, n) for i in range(n))

    def test_table4_tight(self):
        inst, alloc = table4(3), table4_boxed(3)
        report = check_alpha_aps(inst, alloc, F(5, 3))
        assert report
        assert inst.cost(0, alloc[0]) == F(5, 3) * aps_exact(inst, 0)
        assert not check_alpha_aps(inst, alloc, F(5, 3) - F(1, 1000))

    def test_single_item(self):
        assert aps_exact(Instance.from_lists([1], [[F(7, 3)]]), 0) == F(7, 3)

    def test_counterexample(self):
        inst, alloc = aps_counterexample(), aps_counterexample_allocation()
        assert check_alpha_aps(inst, alloc, 1)
        assert not check_wef1(inst, alloc)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            aps_exact(Instance.from_lists([1], [[1] * 5]), 0, EnumerationBudget(max_subsets=16))

    @settings(max_examples=40)
    @given(st.integers(1, 6), st.integers(1, 7), st.integers(1, 7))
    def test_unit_items(self, m, a, b):
        # identical unit chores: the heaviest ceil(w m) items carry price at least w under the uniform price
        inst = Instance.from_lists([a, b], [[1] * m, [1] * m])
        for i in range(2):
            assert aps_exact(inst, i) == math.ceil(inst.weights[i] * m)

    @given(instances(n_range=(1, 3), m_range=(1, 4)), st.integers(1, 9))
    def test_row_scaling(self, inst, factor):
        rows = [list(r) for r in inst.costs]
        rows[0] = [c * F(factor, 4) for c in rows[0]]
        assert aps_exact(inst.with_costs(rows), 0) == F(factor, 4) * aps_exact(inst, 0)

    def test_grid_search_agrees(self):
        # the grid never exceeds the share; on these small instances it reaches it
        rng = seeded(8)
        for _ in range(25):
            inst = random_instance(rng, rng.randint(1, 3), rng.randint(1, 4), den=4, max_weight=4)
            for i in range(inst.n):
                assert aps_grid_lower_bound(inst, i, 12) == aps_exact(inst, i)

    def test_check_matches_direct_comparison(self):
        rng = seeded(12)
        seen = set()
        for _ in range(200):
            inst = random_instance(rng, rng.randint(1, 3), rng.randint(0, 5), den=4)
            alloc = random_allocation(rng, inst)
            alpha = F(rng.randint(0, 8), 4)
            direct = all(inst.cost(i, alloc[i]) <= alpha * aps_exact(inst, i) for i in range(inst.n))
            assert check_alpha_aps(inst, alloc, alpha).passed == direct
            seen.add(direct)
        assert seen == {True, False}

    def test_wef1_implies_two_minus_min_weight(self):
        rng = seeded(9)
        for _ in range(150):
            inst = random_instance(rng, rng.randint(1, 4), rng.randint(1, 7), den=5)
            alloc = rwps(inst)
            assert check_alpha_aps(inst, alloc, 2 - min(inst.weights))


def scalar_block(weights, m, levels, order=None, direction="reversed"):
    """Per-instance reference for the vectorized sweep."""
    missing = bad = 0
    if order is None:
        order = generate_rwps_sequence(list(weights), m)[0].order
    seq = PickingSequence(tuple(order), direction)
    for rows in itertools.product(itertools.product(levels, repeat=m), repeat=len(weights)):
        inst = Instance.from_lists(list(weights), [list(r) for r in rows])
        if wef1_exists(inst) is None:
            missing += 1
        if not check_wef1(inst, execute_picking(inst, seq)):
            bad += 1
    return missing, bad


class TestSweepKernel:
    LEVELS = (F(0), F(1, 2), F(1))

    @pytest.mark.parametrize("weights, m", [((F(1, 3), F(2, 3)), 3), ((F(1, 2), F(1, 2)), 2), ((F(1, 4), F(3, 4)), 3)])
    def test_matches_scalar_two_agents(self, weights, m):
        total, (miss, _), (bad, _) = _sweep.sweep_block(weights, m, self.LEVELS)
        assert total == len(self.LEVELS) ** (2 * m)
        assert (miss, bad) == scalar_block(weights, m, self.LEVELS)

    def test_matches_scalar_three_agents(self):
        weights = (F(1, 6), F(1, 3), F(1, 2))
        _, (miss, _), (bad, _) = _sweep.sweep_block(weights, 2, self.LEVELS)
        assert (miss, bad) == scalar_block(weights, 2, self.LEVELS)

    @pytest.mark.parametrize("weights", [(F(3, 10), F(7, 10)), (F(1, 5), F(4, 5))])
    def test_forward_order_failures_counted(self, weights):
        order = generate_rwps_sequence(list(weights), 3)[0].order
        _, _, (bad, samples) = _sweep.sweep_block(weights, 3, self.LEVELS, picking_order=order)
        expected = scalar_block(weights, 3, self.LEVELS, order, FORWARD)[1]
        assert bad == expected > 0
        for rows in samples:
            inst = Instance.from_lists(list(weights), [list(r) for r in rows])
            assert not check_wef1(inst, execute_picking(inst, PickingSequence(order, FORWARD)))

    def test_pass_tables(self):
        rng = seeded(4)
        weights = (F(1, 4), F(1, 4), F(1, 2))
        w_int, levels = _sweep._int_scale(weights), _sweep._int_scale(self.LEVELS)
        rows, labels, ok = _sweep._row_tables(w_int, 3, levels)
        for _ in range(300):
            r = [rng.randrange(len(rows)) for _ in range(3)]
            a = rng.randrange(len(labels))
            inst = Instance.from_lists(list(weights), [[self.LEVELS[levels.index(v)] for v in rows[x]] for x in r])
            alloc = Allocation.from_labels([int(v) for v in labels[a]], 3)
            assert bool(np.all([ok[i][r[i], a] for i in range(3)])) == check_wef1(inst, alloc).passed

    def test_weight_vectors_deduplicated(self):
        vecs = sweep_weight_vectors(2)
        assert len(vecs) == len(set(vecs))
        assert all(sum(v) == 1 for v in vecs)

    def test_small_family(self):
        res = existence_sweep(ns=(2,), ms=(2,), costs=self.LEVELS, weights=(F(1, 3), F(2, 3)))
        assert res.ok
        assert res.instances == res.weight_vectors * 3**4
