import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgmoduli import IntChainMap, IntComplex, ValidationError
from dgmoduli.zcomplex import int_cone, random_homotopic_endo, random_int_complex


def times(m):
    return IntComplex({-1: 1, 0: 1}, {-1: [[m]]})


def test_cohomology_of_multiplication_by_two():
    C = times(2)
    assert C.cohomology() == {0: (0, [2])}
    assert C.residue_dims(2) == {-1: 1, 0: 1}
    assert C.residue_dims(3) == {}
    assert C.residue_dims(0) == {}


def test_d_squared_is_checked():
    with pytest.raises(ValidationError):
        IntComplex({0: 1, 1: 1, 2: 1}, {0: [[1]], 1: [[1]]})


def test_shape_is_checked():
    with pytest.raises(ValidationError):
        IntComplex({0: 1, 1: 2}, {0: [[1, 2]]})


def test_json_round_trip():
    C = times(6).direct_sum(IntComplex({2: 3}))
    D = IntComplex.from_json(C.to_json())
    assert D.ranks == C.ranks
    assert all((D.diff(n) == C.diff(n)).all() for n in C.degrees())


def test_cone_of_identity_is_acyclic():
    C = times(3)
    ident = IntChainMap(C, C, {-1: [[1]], 0: [[1]]})
    assert int_cone(ident).is_acyclic()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_complexes_are_complexes(seed):
    rng = np.random.default_rng(seed)
    C = random_int_complex(rng)
    assert C.audit()
    f = random_homotopic_endo(C, rng)
    assert f.audit()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5, 7]))
def test_universal_coefficients(seed, p):
    # dim H^n(C ⊗ F_p) = free rank of H^n + #(p-torsion in H^n) + #(p-torsion in H^{n+1})
    rng = np.random.default_rng(seed)
    C = random_int_complex(rng)
    H = C.cohomology()
    want = {}
    for n in set(H) | {n - 1 for n in H}:
        free, tors = H.get(n, (0, []))
        nxt = H.get(n + 1, (0, []))[1]
        d = free + sum(1 for t in tors if t % p == 0) + sum(1 for t in nxt if t % p == 0)
        if d:
            want[n] = d
    assert C.residue_dims(p) == want
