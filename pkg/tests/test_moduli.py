import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgmoduli import GF, QQ, Complex, PreconditionError, Quiver, dual_numbers, path_algebra
from dgmoduli.complexes import random_complex
from dgmoduli.exact_linalg import gl_order
from dgmoduli.modules import simples_and_projectives
from dgmoduli.moduli import (ClassTable, NuBound, classify_rigidity, enumerate_classes, gl_closed_form,
                             nu_membership, point_invariants, representation_classes, stacky_count)
from dgmoduli import oracles


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", range(4))
def test_one_vertex_count_matches_closed_form(q, n):
    A = path_algebra(Quiver(["1"]), GF(q))
    t = enumerate_classes(A, (0, 0), nu=NuBound.make({0: n}))
    assert len(t) == n + 1
    assert stacky_count(t) == gl_closed_form(n, q)


def test_closed_form_values():
    assert gl_closed_form(1, 2) == 2
    assert gl_closed_form(2, 2) == Fraction(13, 6)
    assert gl_closed_form(1, 3) == Fraction(3, 2)


def test_a2_class_counts(a2_f2):
    assert len(enumerate_classes(a2_f2, (0, 0), caps=(1, 1))) == 5
    assert len(enumerate_classes(a2_f2, (-1, 0), caps=(1, 1))) == 25
    assert oracles.orbit_count(a2_f2.quiver, (1, 1), 2) == 5


def test_empty_quiver_has_only_the_zero_object():
    A = path_algebra(Quiver([]), GF(2))
    t = enumerate_classes(A, (0, 0), caps=())
    assert len(t) == 1
    assert stacky_count(t) == 1
    assert not t.points[0].simple


def test_empty_table_counts_zero():
    assert stacky_count(ClassTable([], 2, (0, 0))) == 0


def test_enumeration_refusals(a2_f2):
    with pytest.raises(PreconditionError):
        enumerate_classes(path_algebra(Quiver.linear(2), QQ), (0, 0), caps=(1, 1))
    with pytest.raises(PreconditionError):
        enumerate_classes(dual_numbers(GF(2)), (0, 0), caps=(1,))
    with pytest.raises(PreconditionError):
        enumerate_classes(a2_f2, (0, 0), caps=(6, 6), bound=1000)


def test_nu_membership(a2_f3):
    (S1, P1), (S2, _) = simples_and_projectives(a2_f3)
    nu = NuBound.make({0: 1})
    assert nu_membership(Complex.concentrated(S1), nu)
    assert not nu_membership(Complex.concentrated(P1), nu)
    assert not nu_membership(Complex.concentrated(S1, 1), nu)
    assert nu_membership(Complex.concentrated(P1), NuBound.parse("0:2"))


def test_point_of_a_simple(a2_f3):
    (S1, _), _ = simples_and_projectives(a2_f3)
    pt = point_invariants(Complex.concentrated(S1))
    assert pt.aut_order == 2
    assert dict(pt.ext) == {0: 1}
    assert pt.rigidity_index == 1 and pt.simple
    assert pt.weight(3) == Fraction(1, 2)


def test_point_of_s_plus_shifted_s(point_f2):
    (S, _), = simples_and_projectives(point_f2)
    E = Complex.concentrated(S).direct_sum(Complex.concentrated(S, -1))
    pt = point_invariants(E)
    assert dict(pt.ext) == {-1: 1, 0: 2, 1: 1}
    assert pt.tangent == {-2: 1, -1: 2, 0: 1}
    assert pt.pi == {1: 1, 2: 1}
    assert pt.rigidity_index == 2 and not pt.simple
    assert pt.weight(2) == 2


def test_two_point_weights_add_up(point_f2):
    (S, _), = simples_and_projectives(point_f2)
    pts = [point_invariants(Complex.concentrated(S, d)) for d in (0, -1)]
    assert stacky_count(ClassTable(pts, 2, (0, 1))) == 2 * Fraction(1, 2 - 1)


def test_rigidity_classification(point_f2):
    t = enumerate_classes(point_f2, (-1, 0), caps=(1,))
    rigid, simple = classify_rigidity(t, 1)
    assert len(t) == 4
    assert len(simple) == 2
    assert len(rigid) == 3
    assert all(p.is_rigid(1) for p in simple.points)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(-2, 2))
def test_point_invariants_are_shift_equivariant(seed, k):
    rng = np.random.default_rng(seed)
    A = path_algebra(Quiver.linear(2), GF(2))
    E = random_complex(A, rng, -1, 0, max_dim=1)
    a, b = point_invariants(E), point_invariants(E.shift(k))
    assert dict(a.ext) == dict(b.ext)
    assert a.aut_order == b.aut_order
    assert {n - k: v for n, v in a.cohomology.items()} == b.cohomology


@pytest.mark.parametrize("quiver,dims,q", [
    (Quiver.linear(2), (1, 1), 2),
    (Quiver.linear(2), (2, 1), 2),
    (Quiver.linear(2), (1, 2), 3),
    (Quiver(["1", "2"], [("a", "1", "2"), ("b", "1", "2")]), (1, 1), 2),
    (Quiver.linear(3), (1, 1, 1), 2),
])
def test_burnside(quiver, dims, q):
    A = path_algebra(quiver, GF(q))
    classes = representation_classes(A, dims)
    gl = 1
    for d in dims:
        gl *= gl_order(d, q)
    entries = sum(dims[s] * dims[t] for _, s, t in quiver.arrows)
    assert sum(c.orbit for c in classes) == q ** entries
    assert sum(Fraction(1, c.aut) for c in classes) == Fraction(q ** entries, gl)
    assert len(classes) == len(oracles.representation_orbits(quiver, dims, q))
