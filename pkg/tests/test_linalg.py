from fractions import Fraction

import pytest

from fsbasis.errors import InternalError
from fsbasis.linalg import kernel_dimension, nullspace, rank, solve_gf2


def test_rank_over_rationals():
    rows = [{"a": Fraction(1), "b": Fraction(2)}, {"a": Fraction(1, 2), "b": Fraction(1)}, {"c": Fraction(3)}]
    assert rank(rows) == 2
    assert rank([]) == 0
    assert rank([{"a": Fraction(0)}]) == 0
    assert kernel_dimension(rows) == 1


def test_nullspace_returns_fractions():
    basis = nullspace([{"x": Fraction(1)}, {"x": Fraction(2)}])
    assert basis == [[Fraction(-2), Fraction(1)]]
    assert nullspace([{}, {}]) == [[1, 0], [0, 1]]


def test_solve_gf2():
    assert solve_gf2([[1, 1], [0, 1]], [1, 1], 2) == [0, 1]
    assert solve_gf2([[1, 1]], [0], 2, free_value=1) == [1, 1]
    with pytest.raises(InternalError):
        solve_gf2([[1], [1]], [0, 1], 1)
