import numpy as np
from hypothesis import given, settings, strategies as st

from dgmoduli import GF, QQ
from dgmoduli import exact_linalg as la


def test_rank_and_kernel_of_all_ones_over_f2():
    F = GF(2)
    M = F.asarray([[1, 1], [1, 1]])
    dec = la.gauss_decompose(M, F)
    assert dec.rank == 1
    assert dec.kernel.shape == (2, 1)
    assert not F.matmul(M, dec.kernel).any()


def test_empty_matrix_has_full_kernel(field):
    M = field.zeros((0, 3))
    assert la.rank(M, field) == 0
    assert la.nullspace(M, field).shape == (3, 3)


def test_solve_consistent_and_inconsistent(field):
    M = field.asarray([[1, 2], [2, 4]])
    x = la.solve(M, field.asarray([1, 2]), field)
    assert x is not None
    assert la.mat_equal(field.matmul(M, x.reshape(2, 1)).ravel(), field.asarray([1, 2]))
    if field.p != 2:
        assert la.solve(M, field.asarray([1, 0]), field) is None


def test_rational_arithmetic_is_exact():
    M = QQ.asarray([[1, 3], [3, 1]])
    inv = la.inverse(M, QQ)
    assert la.mat_equal(QQ.matmul(M, inv), QQ.eye(2))
    assert str(inv[0, 0]) in ("-1/8", "mpq(-1,8)")


def test_smith_form_of_diag_2_3():
    U, D, V = la.smith_normal_form([[2, 0], [0, 3]])
    assert [int(D[0, 0]), int(D[1, 1])] == [1, 6]
    assert la.elementary_divisors([[2, 0], [0, 3]]) == [1, 6]


def test_gl_order():
    assert la.gl_order(2, 2) == 6
    assert la.gl_order(2, 3) == 48
    assert la.gl_order(0, 5) == 1


small_int_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=60, deadline=None)
@given(small_int_matrices, st.sampled_from([2, 3, 7, 0]))
def test_rank_plus_nullity(rows, p):
    F = GF(p) if p else QQ
    M = F.asarray(rows)
    dec = la.gauss_decompose(M, F)
    assert dec.rank + dec.kernel.shape[1] == M.shape[1]
    assert not F.matmul(M, dec.kernel).any()
    assert la.rank(dec.kernel, F) == dec.kernel.shape[1]


@settings(max_examples=60, deadline=None)
@given(small_int_matrices)
def test_smith_form_identity(rows):
    M = la.int_matrix(rows)
    U, D, V = la.smith_normal_form(M)
    assert (U.dot(M).dot(V) == D).all()
    assert abs(la.int_det(U)) == 1 and abs(la.int_det(V)) == 1
    diag = [int(D[i, i]) for i in range(min(D.shape))]
    off = D.copy()
    for i in range(min(D.shape)):
        off[i, i] = 0
    assert not off.any()
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=40, deadline=None)
@given(small_int_matrices, st.integers(0, 2 ** 32 - 1))
def test_elementary_divisors_invariant_under_unimodular_change(rows, seed):
    rng = np.random.default_rng(seed)
    M = la.int_matrix(rows)
    m, n = M.shape

    def unimodular(k):
        X = la.int_eye(k)
        for _ in range(4):
            i, j = rng.integers(0, k, size=2)
            if i != j:
                X[i] = X[i] + int(rng.integers(-2, 3)) * X[j]
        return X

    N = unimodular(m).dot(M).dot(unimodular(n))
    assert la.elementary_divisors(N) == la.elementary_divisors(M)
