import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbcensus.errors import ContractViolation
from vbcensus.fp_linalg import FpMatrix, RowSpan, kernel_basis, rank, rref, solve


def det_mod(rows, p):
    """Laplace expansion; exponential but fine for tiny matrices."""
    n = len(rows)
    if n == 0:
        return 1
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * det_mod(minor, p)
    return total % p


def minor_rank(a, p):
    """Largest k with a nonzero k x k minor."""
    rows, cols = len(a), len(a[0]) if a else 0
    for k in range(min(rows, cols), 0, -1):
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                if det_mod([[a[i][j] for j in ci] for i in ri], p):
                    return k
    return 0


def kernel_count(a, p):
    cols = len(a[0])
    arr = np.array(a)
    return sum(1 for x in itertools.product(range(p), repeat=cols) if not (arr @ np.array(x) % p).any())


def matrices(p, max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_identity_rref():
    m, piv = rref(FpMatrix.identity(2, 3))
    assert m == FpMatrix.identity(2, 3)
    assert piv == [0, 1, 2]


def test_zero_rref():
    z = FpMatrix.zeros(2, 2, 4)
    m, piv = rref(z)
    assert m == z and piv == []


def test_rank_against_minors_f3():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.integers(0, 3, size=(6, 6)).tolist()
        assert rank(FpMatrix(3, a)) == minor_rank(a, 3)


def test_kernel_identity_empty():
    assert kernel_basis(FpMatrix.identity(3, 4)) == []


def test_kernel_row_of_ones():
    ker = kernel_basis(FpMatrix(2, [[1, 1]]))
    assert len(ker) == 1 and ker[0].tolist() == [1, 1]


def test_kernel_random_f2():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = FpMatrix(2, rng.integers(0, 2, size=(5, 8)))
        ker = kernel_basis(m)
        assert len(ker) == 8 - rank(m)
        for v in ker:
            assert not m.apply(v).any()


def test_solve_identity():
    b = [2, 0, 1]
    assert solve(FpMatrix.identity(3, 3), b).tolist() == b


def test_solve_inconsistent():
    assert solve(FpMatrix.zeros(3, 2, 2), [1, 0]) is None


def test_solve_random_consistent_f3():
    rng = np.random.default_rng(11)
    for _ in range(30):
        m = FpMatrix(3, rng.integers(0, 3, size=(4, 6)))
        x0 = rng.integers(0, 3, size=6)
        b = m.apply(x0)
        x = solve(m, b)
        assert x is not None
        assert ((m.apply(x) - b) % 3 == 0).all()


def test_solve_length_mismatch():
    with pytest.raises(ContractViolation):
        solve(FpMatrix.identity(2, 2), [1, 0, 1])


def test_bad_prime():
    with pytest.raises(ContractViolation):
        FpMatrix(4, [[1]])


def test_entries_reduced_and_readonly():
    m = FpMatrix(3, [[4, -1]])
    assert m.tolist() == [[1, 2]]
    with pytest.raises(ValueError):
        m.array[0, 0] = 2


def test_matmul_and_transpose():
    a = FpMatrix(2, [[1, 1], [0, 1]])
    assert (a @ a).tolist() == [[1, 0], [0, 1]]
    assert a.T.tolist() == [[1, 0], [1, 1]]


def test_rowspan():
    rs = RowSpan(3, 3)
    assert rs.add([1, 2, 0])
    assert not rs.add([2, 1, 0])
    assert rs.contains([0, 0, 0])
    assert not rs.contains([0, 0, 1])
    assert rs.rank == 1


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(st.just(p), matrices(p))))
def test_rank_nullity_property(case):
    p, a = case
    m = FpMatrix(p, a)
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.cols
    for v in ker:
        assert not m.apply(v).any()
    # kernel vectors are independent
    assert rank(FpMatrix(p, [list(v) for v in ker])) == len(ker) if ker else True


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(st.just(p), matrices(p))))
def test_rref_idempotent_property(case):
    p, a = case
    r1, piv1 = rref(FpMatrix(p, a))
    r2, piv2 = rref(r1)
    assert r1 == r2 and piv1 == piv2


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(st.just(p), matrices(p, 4, 4))))
def test_kernel_size_matches_enumeration(case):
    p, a = case
    m = FpMatrix(p, a)
    assert kernel_count(a, p) == p ** len(kernel_basis(m))
