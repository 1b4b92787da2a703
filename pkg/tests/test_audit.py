import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wefchores.audit import (
    check_goods_wef1,
    check_po_bruteforce,
    check_wef,
    check_wef1,
    check_wef1t,
    check_wefxy,
    check_wprop1,
    check_wpropx,
    check_wwef1,
    pareto_dominates,
)
from wefchores.budget import EnumerationBudget
from wefchores.core import Allocation, Instance
from wefchores.errors import BudgetExceeded
from wefchores.fixtures import table1, table5, table5_boxed
from wefchores.oracle import opt_social_cost

from conftest import instance_and_alloc, random_allocation, random_instance, seeded

fractions01 = st.fractions(min_value=0, max_value=1, max_denominator=8)


def naive_po(inst, alloc):
    """Reference: compare against every allocation directly."""
    for labels in itertools.product(range(inst.n), repeat=inst.m):
        if pareto_dominates(inst, Allocation.from_labels(labels, inst.n), alloc):
            return False
    return True


def refute_pair(inst, alloc, report, x, y):
    """Recompute the witness inequality from scratch."""
    wit = report.witness
    i, j, e = wit.agent, wit.other, wit.item
    c = inst.costs[i]
    assert e in alloc[i]
    assert c[e] == max(c[g] for g in alloc[i])
    lhs = (inst.cost(i, alloc[i]) - x * c[e]) / inst.weights[i]
    rhs = (inst.cost(i, alloc[j]) + y * c[e]) / inst.weights[j]
    assert (lhs, rhs) == (wit.lhs, wit.rhs)
    assert lhs > rhs


class TestExamples:
    def test_table1_forward_fails(self):
        report = check_wef1(table1(), Allocation(({0}, {1, 2})))
        assert report.verdict == "fail"
        assert (report.witness.agent, report.witness.other) == (1, 0)
        assert report.to_dict(table1())["witness"]["agent"] == 2

    def test_zero_costs_pass(self):
        inst = Instance.from_lists([1, 2], [[0, 0, 0], [0, 0, 0]])
        assert check_wef1(inst, Allocation(({0, 1, 2}, set())))

    def test_table5_boxed(self):
        inst, alloc = table5(F(1, 100)), table5_boxed()
        assert not check_wef1(inst, alloc)
        assert check_wprop1(inst, alloc)

    def test_table1_forward_transfer(self):
        # agent 2 holds e2, e3 at cost 1 each, weight 7/10; agent 1 holds e1 at 1/100, weight 3/10
        inst, alloc = table1(), Allocation(({0}, {1, 2}))
        lhs = (2 - 1) / F(7, 10)
        rhs = (F(1, 100) + 1) / F(3, 10)
        assert check_wef1t(inst, alloc).passed == (lhs <= rhs)

    def test_single_agent_prop(self):
        inst = Instance.from_lists([1], [[1, 2, 3]])
        assert check_wprop1(inst, Allocation(({0, 1, 2},)))

    def test_goods_all_to_one(self):
        inst = Instance.from_lists([1, 1], [[1, 1], [1, 1]])
        assert not check_goods_wef1(inst, Allocation(({0, 1}, set())))

    def test_goods_zero_values(self):
        inst = Instance.from_lists([1, 1], [[0, 0], [0, 0]])
        assert check_goods_wef1(inst, Allocation(({0, 1}, set())))

    def test_wefxy_range(self):
        with pytest.raises(ValueError):
            check_wefxy(table1(), Allocation(({0}, {1, 2})), 2, 0)

    def test_report_params(self):
        report = check_wefxy(table1(), Allocation(({2}, {0, 1})), F(1, 2), F(1, 2))
        assert report.to_dict()["params"] == {"x": "1/2", "y": "1/2"}


class TestPO:
    def test_opt_is_po(self):
        inst = Instance.from_lists([1, 1, 1], [[1, 2, 3], [3, 2, 1], [2, 2, 2]])
        assert check_po_bruteforce(inst, opt_social_cost(inst)[1])

    def test_zero_item_swap(self):
        # agent 1 holds e1 (cost 1) which agent 2 finds free
        inst = Instance.from_lists([1, 1], [[1, 1], [0, 1]])
        report = check_po_bruteforce(inst, Allocation(({0}, {1})))
        assert not report
        assert pareto_dominates(inst, report.witness.allocation, Allocation(({0}, {1})))

    def test_budget(self):
        inst = Instance.from_lists([1, 1], [[1] * 5, [1] * 5])
        with pytest.raises(BudgetExceeded):
            check_po_bruteforce(inst, Allocation(({0, 1, 2, 3, 4}, set())), EnumerationBudget(max_states=16))

    def test_agrees_with_naive_search(self):
        rng = seeded(11)
        seen = {True: 0, False: 0}
        for _ in range(400):
            inst = random_instance(rng, rng.randint(1, 3), rng.randint(0, 5), den=3)
            alloc = random_allocation(rng, inst)
            fast = check_po_bruteforce(inst, alloc)
            assert fast.passed == naive_po(inst, alloc)
            if not fast:
                assert pareto_dominates(inst, fast.witness.allocation, alloc)
            seen[fast.passed] += 1
        assert min(seen.values()) > 20


@given(instance_and_alloc(), fractions01, fractions01)
def test_wefxy_witness_reverifies(pair, x, y):
    inst, alloc = pair
    report = check_wefxy(inst, alloc, x, y)
    if not report:
        refute_pair(inst, alloc, report, x, y)


@given(instance_and_alloc())
def test_wprop_witnesses_reverify(pair):
    inst, alloc = pair
    for check in (check_wprop1, check_wpropx):
        report = check(inst, alloc)
        if not report:
            wit = report.witness
            assert wit.lhs == inst.cost(wit.agent, alloc[wit.agent]) - inst.costs[wit.agent][wit.item]
            assert wit.rhs == inst.weights[wit.agent] * inst.total_cost(wit.agent)
            assert wit.lhs > wit.rhs


@given(instance_and_alloc())
def test_goods_witness_reverifies(pair):
    inst, alloc = pair
    report = check_goods_wef1(inst, alloc)
    if not report:
        wit = report.witness
        i, j, e = wit.agent, wit.other, wit.item
        assert e in alloc[j]
        lhs = (inst.cost(i, alloc[j]) - inst.costs[i][e]) / inst.weights[j]
        assert lhs == wit.lhs > wit.rhs == inst.cost(i, alloc[i]) / inst.weights[i]


@given(instance_and_alloc())
def test_implication_lattice(pair):
    inst, alloc = pair
    wef, wef1 = check_wef(inst, alloc), check_wef1(inst, alloc)
    if wef:
        assert wef1
    if wef1:
        assert check_wef1t(inst, alloc)
        assert check_wwef1(inst, alloc)
        assert check_wprop1(inst, alloc)
    if check_wpropx(inst, alloc):
        assert check_wprop1(inst, alloc)


@given(instance_and_alloc(), fractions01, fractions01, fractions01, fractions01)
def test_monotone_in_xy(pair, x, y, dx, dy):
    inst, alloc = pair
    if check_wefxy(inst, alloc, x, y):
        assert check_wefxy(inst, alloc, min(1, x + dx), min(1, y + dy))


def test_wef1_matches_wefxy_one_zero():
    rng = seeded(5)
    for _ in range(1000):
        inst = random_instance(rng, rng.randint(1, 4), rng.randint(0, 7))
        alloc = random_allocation(rng, inst)
        assert check_wef1(inst, alloc).passed == check_wefxy(inst, alloc, 1, 0).passed


@given(instance_and_alloc(n_range=(2, 3)), st.integers(0, 2), st.integers(1, 20))
def test_row_scaling_keeps_own_verdicts(pair, agent, factor):
    inst, alloc = pair
    agent %= inst.n
    rows = [list(r) for r in inst.costs]
    rows[agent] = [c * F(factor, 3) for c in rows[agent]]
    scaled = inst.with_costs(rows)
    # notions that compare one agent's costs only against their own valuations
    for check in (check_wef1, check_wef1t, check_wwef1, check_wprop1, check_wpropx, check_goods_wef1, check_wef):
        assert check(inst, alloc).passed == check(scaled, alloc).passed
    assert check_po_bruteforce(inst, alloc).passed == check_po_bruteforce(scaled, alloc).passed
