from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wefchores.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog_max


def feasible(x, A_ub, b_ub, A_eq, b_eq):
    if any(v < 0 for v in x):
        return False
    if any(sum(a * v for a, v in zip(row, x)) > b for row, b in zip(A_ub, b_ub)):
        return False
    return all(sum(a * v for a, v in zip(row, x)) == b for row, b in zip(A_eq, b_eq))


class TestTextbook:
    def test_classic(self):
        res = linprog_max([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
        assert res.status == OPTIMAL
        assert res.value == 36
        assert res.x == (2, 6)

    def test_infeasible(self):
        res = linprog_max([1], [[1]], [1], [[1]], [2])
        assert res.status == INFEASIBLE

    def test_unbounded(self):
        assert linprog_max([1, 1], [[1, -1]], [1]).status == UNBOUNDED

    def test_equality_and_negative_rhs(self):
        # x + y = 2, -x <= -1/2  ->  maximize -x gives -1/2
        res = linprog_max([-1, 0], [[-1, 0]], [F(-1, 2)], [[1, 1]], [2])
        assert res.value == F(-1, 2)

    def test_degenerate(self):
        # several constraints tight at the optimum
        res = linprog_max([1, 1], [[1, 0], [0, 1], [1, 1], [2, 1]], [1, 1, 2, 3])
        assert res.value == 2

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            linprog_max([1, 1], [[1]], [1])


small = st.integers(-4, 4)


@given(
    st.integers(1, 3).flatmap(
        lambda nv: st.tuples(
            st.lists(small, min_size=nv, max_size=nv),
            st.lists(st.lists(small, min_size=nv, max_size=nv), min_size=0, max_size=4),
            st.lists(st.integers(-3, 6), min_size=4, max_size=4),
            st.lists(st.lists(small, min_size=nv, max_size=nv), min_size=0, max_size=1),
            st.integers(-3, 3),
        )
    )
)
def test_against_scipy(case):
    scipy_opt = pytest.importorskip("scipy.optimize")
    c, A_ub, b_ub, A_eq, b_eq = case
    b_ub = b_ub[: len(A_ub)]
    b_eq = [b_eq] * len(A_eq)
    res = linprog_max(c, A_ub, b_ub, A_eq, b_eq)
    ref = scipy_opt.linprog(
        [-v for v in c],
        A_ub=A_ub or None,
        b_ub=b_ub or None,
        A_eq=A_eq or None,
        b_eq=b_eq or None,
        bounds=[(0, None)] * len(c),
        method="highs",
    )
    expected = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[ref.status]
    assert res.status == expected
    if res.status == OPTIMAL:
        assert abs(float(res.value) + ref.fun) < 1e-7
        assert feasible(res.x, A_ub, b_ub, A_eq, b_eq)
        assert sum(F(a) * v for a, v in zip(c, res.x)) == res.value
