import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgmoduli import GF, QQ, ChainMap, Complex, Quiver, ValidationError, path_algebra
from dgmoduli.complexes import (aut_order, cone, end_algebra, ext_dims, is_quasi_iso, projective_replacement,
                                random_complex, vector_space)
from dgmoduli.modules import simples_and_projectives
from dgmoduli import oracles


def _euler_form(x, y):
    # A2 with one arrow 1 -> 2
    return x[0] * y[0] + x[1] * y[1] - x[0] * y[1]


def _class(C):
    v = [0, 0]
    for n, M in C.terms.items():
        d = M.vertex_dims()
        v = [v[0] + (-1) ** (n % 2) * d[0], v[1] + (-1) ** (n % 2) * d[1]]
    return v


def test_shift_moves_terms_and_negates_differentials():
    F = GF(5)
    V = vector_space(F, 1)
    C = Complex(V.algebra, {0: V, 1: V}, {0: F.asarray([[2]])})
    D = C.shift(1)
    assert sorted(D.terms) == [-1, 0]
    assert int(D.diff(-1)[0, 0]) == 3
    assert C.shift(1).shift(-1).diff(0)[0, 0] == 2


def test_differentials_must_square_to_zero():
    F = GF(2)
    V = vector_space(F, 1)
    with pytest.raises(ValidationError):
        Complex(V.algebra, {0: V, 1: V, 2: V}, {0: F.asarray([[1]]), 1: F.asarray([[1]])})


def test_cone_of_identity_is_acyclic(a2_f3):
    (S1, _), _ = simples_and_projectives(a2_f3)
    C = Complex.concentrated(S1)
    K, inc, proj = cone(ChainMap.identity(C))
    assert K.is_acyclic()
    assert sorted(K.terms) == [-1, 0]


def test_cone_of_zero_map_is_direct_sum(a2_f3):
    (S1, _), (S2, _) = simples_and_projectives(a2_f3)
    C, D = Complex.concentrated(S1), Complex.concentrated(S2)
    K, _, _ = cone(ChainMap.zero(C, D))
    assert K.cohomology_dims() == {-1: 1, 0: 1}


def test_chain_map_condition_is_checked():
    F = GF(3)
    V = vector_space(F, 1)
    C = Complex(V.algebra, {0: V, 1: V}, {0: F.asarray([[1]])})
    D = Complex(V.algebra, {0: V, 1: V}, {})
    with pytest.raises(ValidationError):
        ChainMap(C, D, {1: F.asarray([[1]])})


@pytest.mark.parametrize("seed", range(6))
def test_replacement_is_a_quasi_iso(seed):
    rng = np.random.default_rng(seed)
    A = path_algebra(Quiver.linear(2), GF(3) if seed % 2 else QQ)
    C = random_complex(A, rng, -1, 1)
    R = projective_replacement(C)
    assert R.terminated
    assert is_quasi_iso(R.q)
    K, _, _ = cone(R.q)
    assert K.is_acyclic()
    if not C.is_acyclic():
        assert not is_quasi_iso(ChainMap.zero(C, C))


def test_ext_between_a2_simples(a2_f3):
    (S1, _), (S2, _) = simples_and_projectives(a2_f3)
    C1, C2 = Complex.concentrated(S1), Complex.concentrated(S2)
    assert dict(ext_dims(C1, C1)) == {0: 1}
    assert dict(ext_dims(C1, C2)) == {1: 1}
    assert dict(ext_dims(C2, C1, degrees=(-2, 3))) == {}


def test_ext_of_s_plus_shifted_s(point_f2):
    (S, _), = simples_and_projectives(point_f2)
    E = Complex.concentrated(S).direct_sum(Complex.concentrated(S, -1))
    assert dict(ext_dims(E, E)) == {-1: 1, 0: 2, 1: 1}


@pytest.mark.parametrize("seed", range(10))
def test_euler_pairing(seed):
    rng = np.random.default_rng(100 + seed)
    A = path_algebra(Quiver.linear(2), GF(3))
    C = random_complex(A, rng, -1, 1)
    D = random_complex(A, rng, -1, 1)
    assert ext_dims(C, D).euler() == _euler_form(_class(C), _class(D))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(-2, 2))
def test_ext_is_shift_equivariant(seed, k):
    rng = np.random.default_rng(seed)
    A = path_algebra(Quiver.linear(2), GF(2))
    C = random_complex(A, rng, -1, 0)
    D = random_complex(A, rng, -1, 0)
    base = ext_dims(C, D)
    assert dict(ext_dims(C.shift(k), D.shift(k))) == dict(base)
    assert dict(ext_dims(C, D.shift(k))) == {i - k: d for i, d in base.items()}


def test_endomorphisms_and_automorphisms(a2_f3, point_f2):
    (S1, _), (S2, _) = simples_and_projectives(a2_f3)
    assert end_algebra(Complex.concentrated(S1.direct_sum(S2))).dim == 2
    (S, _), = simples_and_projectives(point_f2)
    SS = Complex.concentrated(S.direct_sum(S))
    assert aut_order(SS) == 6
    assert aut_order(SS.shift(3)) == 6


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(-3, 3))
def test_aut_order_is_shift_invariant(seed, k):
    rng = np.random.default_rng(seed)
    A = path_algebra(Quiver.linear(2), GF(2))
    C = random_complex(A, rng, -1, 0, max_dim=1)
    if C.is_acyclic():
        return
    assert aut_order(C) == aut_order(C.shift(k))


@pytest.mark.parametrize("seed", range(6))
def test_ext_and_aut_against_standard_resolution(seed):
    rng = np.random.default_rng(seed)
    A = path_algebra(Quiver.linear(2), GF(2))
    C = random_complex(A, rng, -1, 0, max_dim=1)
    degs = list(range(-3, 4))
    mine = ext_dims(C, C, degrees=(-3, 3))
    theirs = oracles.ext_by_standard_resolution(C, degs)
    assert all(mine[i] == theirs[i] for i in degs)
    assert aut_order(C) == oracles.homotopy_aut_count(C)
