import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coops.errors import UsageError
from coops.fp_linalg import (
    FpMatrix, Subquotient, check_prime, kernel_basis, matrix_rank, preimage, row_reduce,
)


def brute_kernel(a, p):
    rows, cols = a.shape
    return [v for v in itertools.product(range(p), repeat=cols)
            if not np.any((a @ np.array(v)) % p)]


def test_empty_matrix():
    m = FpMatrix(3, 0, 0)
    reduced, r, piv = row_reduce(m)
    assert r == 0 and piv == []
    assert kernel_basis(m) == []


def test_identity():
    m = FpMatrix.identity(3, 3)
    reduced, r, piv = row_reduce(m)
    assert (r, piv) == (3, [0, 1, 2])
    assert reduced == m
    assert kernel_basis(m) == []
    assert preimage(FpMatrix.identity(3, 2), [1, 2]) == (1, 2)


def test_two_by_two_over_f3():
    m = FpMatrix.from_dense(3, [[1, 2], [2, 1]])
    assert matrix_rank(m) == 1
    ker = kernel_basis(m)
    assert len(ker) == 1
    # enumeration: the solutions of x + 2y = 0 mod 3 are multiples of (1, 1)
    sols = brute_kernel(np.array([[1, 2], [2, 1]]), 3)
    assert set(sols) == {(0, 0), (1, 1), (2, 2)}
    assert ker[0] in sols and ker[0] != (0, 0)
    v = preimage(m, [1, 2])
    assert v is not None
    assert tuple((m @ np.array(v)) % 3) == (1, 2)
    # (1, 0) is one of the enumerated solutions
    assert (1, 0) in [w for w in itertools.product(range(3), repeat=2)
                      if tuple((np.array([[1, 2], [2, 1]]) @ w) % 3) == (1, 2)]


def test_zero_matrix():
    m = FpMatrix.zero(5, 2, 2)
    assert len(kernel_basis(m)) == 2
    assert preimage(m, [0, 1]) is None
    assert preimage(m, [0, 0]) == (0, 0)


def test_rejects_bad_primes():
    for bad in (2, 4, 1, 9):
        with pytest.raises(UsageError):
            check_prime(bad)
    assert check_prime(7) == 7


def test_no_stored_zeros():
    m = FpMatrix(3, 2, 2, {(0, 0): 3, (1, 1): 4})
    assert m.entries == {(1, 1): 1}
    with pytest.raises(UsageError):
        FpMatrix(3, 1, 1, {(1, 0): 1})


matrices = st.tuples(st.sampled_from([3, 5, 7]), st.integers(0, 5), st.integers(0, 5)).flatmap(
    lambda t: st.tuples(
        st.just(t[0]),
        st.lists(st.lists(st.integers(0, t[0] - 1), min_size=t[2], max_size=t[2]),
                 min_size=t[1], max_size=t[1]),
        st.just(t[2]),
    ))


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_rank_nullity_and_idempotence(data):
    p, rows, cols = data
    a = np.array(rows, dtype=np.int64).reshape(len(rows), cols)
    m = FpMatrix.from_dense(p, a)
    reduced, r, piv = row_reduce(m)
    ker = kernel_basis(m)
    assert r + len(ker) == cols
    for v in ker:
        assert not np.any((a @ np.array(v)) % p) if a.size else True
    again, r2, piv2 = row_reduce(reduced)
    assert again == reduced and (r2, piv2) == (r, piv)
    if p == 3 and cols <= 4 and len(rows):
        assert len(brute_kernel(a, p)) == p ** len(ker)


@given(matrices, st.data())
@settings(max_examples=100, deadline=None)
def test_preimage_exact(data, draw):
    p, rows, cols = data
    if not rows:
        return
    a = np.array(rows, dtype=np.int64)
    m = FpMatrix.from_dense(p, a)
    x = np.array(draw.draw(st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols)),
                 dtype=np.int64)
    target = (a @ x) % p
    v = preimage(m, target)
    assert v is not None
    assert np.array_equal((a @ np.array(v, dtype=np.int64)) % p, target)


def test_subquotient_small_complex():
    # F_3 -> F_3^2 -> F_3 : d_in = (1,1)^T, d_out = (1,-1)
    p = 3
    h = Subquotient(p, 2, d_in=np.array([[1], [1]]), d_out=np.array([[1, 2]]))
    assert h.rank == 0
    h = Subquotient(p, 2, d_in=None, d_out=np.array([[1, 2]]))
    assert h.rank == 1
    assert list(h.coords([1, 1])) == [1] or list(h.coords([1, 1])) == [2]
    with pytest.raises(ArithmeticError):
        h.coords([1, 0])
