from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import small_fraction
from qcgeom.exactlinalg import RankDeficientError, nullspace, rank, rref, solve

matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(small_fraction, min_size=n, max_size=n), min_size=1, max_size=5))


def test_solve_unique():
    sol = solve([[2, 1], [1, 3]], [3, 5], require_unique=True)
    assert sol.x == [Fraction(4, 5), Fraction(7, 5)]


def test_rank_deficient_raises():
    with pytest.raises(RankDeficientError):
        solve([[1, 2], [2, 4]], [1, 2], require_unique=True)


def test_inconsistent():
    sol = solve([[1, 1], [1, 1]], [0, 1])
    assert not sol.consistent and sol.x is None


def test_rref_identity():
    m, piv = rref([[0, 2], [3, 0]])
    assert piv == [0, 1]
    assert m == [[1, 0], [0, 1]]


@given(matrices)
def test_nullspace_is_annihilated(a):
    n = len(a[0])
    basis = nullspace(a)
    assert len(basis) == n - rank(a)
    for v in basis:
        assert all(sum(r[i] * v[i] for i in range(n)) == 0 for r in a)


@given(matrices, st.data())
def test_solve_consistent_systems(a, data):
    n = len(a[0])
    x0 = data.draw(st.lists(small_fraction, min_size=n, max_size=n))
    b = [sum(r[i] * x0[i] for i in range(n)) for r in a]
    sol = solve(a, b)
    assert sol.consistent
    assert [sum(r[i] * sol.x[i] for i in range(n)) for r in a] == b
