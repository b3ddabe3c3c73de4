from fractions import Fraction

import pytest

from bergmankit import linalg


def test_rank_over_the_rationals():
    assert linalg.rank([[1, 2], [2, 4]]) == 1
    assert linalg.rank([[Fraction(1, 2), 0], [0, 3]]) == 2
    assert linalg.rank([], 3) == 0


def test_rank_mod_p_depends_on_the_prime():
    rows = [[1, 1], [1, -1]]
    assert linalg.rank_mod_p(rows, 2) == 1
    assert linalg.rank_mod_p(rows, 3) == 2


def test_in_span():
    assert linalg.in_span([2, 4], [[1, 2]])
    assert not linalg.in_span([1, 0], [[1, 2]])
    assert linalg.in_span([0, 0], [])


def test_solve_returns_a_solution_or_none():
    assert linalg.solve([[1, 1], [1, -1]], [2, 0], 2) == [1, 1]
    assert linalg.solve([[1, 1], [1, 1]], [1, 2], 2) is None


def test_determinant_and_inverse():
    assert linalg.determinant([[2, 1], [1, 1]]) == 1
    assert linalg.inverse([[2, 1], [1, 1]]) == [[1, -1], [-1, 2]]


def test_unit_invariant_factors():
    assert linalg.has_unit_invariant_factors([[1, 1, 0], [0, 1, 1]])
    assert not linalg.has_unit_invariant_factors([[2, 0], [0, 1]])
    assert not linalg.has_unit_invariant_factors([[1, 1], [2, 2]])


def test_check_size_raises_error_above_the_cap():
    linalg.check_size(10, 10, 100)
    with pytest.raises(linalg.SizeCapExceededError) as e:
        linalg.check_size(10, 11, 100)
    assert "exceeds the size cap of 100" in str(e)
