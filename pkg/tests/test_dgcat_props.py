import numpy as np
import pytest

from dgmoduli import GF, QQ, Complex, PreconditionError, Quiver, dual_numbers, matrix_algebra, path_algebra
from dgmoduli.complexes import random_complex
from dgmoduli.dgcat_props import (bimodule_is_equivalence, center_dim, certify, diagonal_bimodule, hochschild,
                                  is_proper, is_saturated, is_smooth, morita_data, morita_transport)
from dgmoduli.fdalgebra import opposite, product_of_fields
from dgmoduli.modules import simples_and_projectives


def test_base_field_is_smooth_of_length_zero(field):
    r = certify(path_algebra(Quiver(["1"]), field))
    assert r.smooth.kind == "yes" and r.smooth.length == 0
    assert r.saturated is True


def test_a2_is_saturated(a2_f3):
    r = certify(a2_f3)
    assert r.smooth.length == 1
    assert r.saturated is True
    assert r.hochschild == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0, 5: 0, 6: 0}


def test_dual_numbers_are_proper_but_not_smooth():
    A = dual_numbers(GF(5))
    assert is_proper(A)[0]
    v = is_smooth(A)
    assert v.kind == "no"
    assert v.witness is not None
    assert is_saturated(A)[0] is False


def test_hochschild_of_dual_numbers_in_odd_characteristic():
    hh = hochschild(dual_numbers(GF(5)), (0, 4))
    assert hh == {0: 2, 1: 1, 2: 1, 3: 1, 4: 1}


@pytest.mark.parametrize("seed", range(4))
def test_smoothness_agrees_with_opposite(seed):
    rng = np.random.default_rng(seed)
    q = Quiver.random_acyclic(rng, max_vertices=4, max_arrows=4)
    A = path_algebra(q, GF(3))
    a, b = is_smooth(A), is_smooth(opposite(A))
    assert a.kind == b.kind == "yes"
    assert a.length == b.length


@pytest.mark.parametrize("A", [
    path_algebra(Quiver.linear(3), GF(2)),
    dual_numbers(GF(3)),
    product_of_fields(3, GF(5)),
    matrix_algebra(2, GF(3)),
], ids=["A3", "dual", "k^3", "M2"])
def test_hh0_is_the_center(A):
    assert hochschild(A, (0, 0))[0] == center_dim(A)


def test_diagonal_and_twisted_bimodules_are_equivalences(a2_f3):
    assert bimodule_is_equivalence(diagonal_bimodule(a2_f3)).equivalence
    K = path_algebra(Quiver(["1", "2"]), GF(3))
    assert bimodule_is_equivalence(diagonal_bimodule(K, [[0, 1], [1, 0]])).equivalence


def test_doubled_diagonal_is_not_an_equivalence(a2_f3):
    D = diagonal_bimodule(a2_f3)
    r = bimodule_is_equivalence(D.direct_sum(D))
    assert not r.equivalence
    assert not r.unit_map["quasi_iso"]
    assert 0 in r.unit_map["failed_degrees"]


def test_morita_rejects_a_non_generator(a2_f3):
    (_, P1), _ = simples_and_projectives(a2_f3)
    with pytest.raises(PreconditionError):
        morita_data(P1)


def test_morita_transport_preserves_invariants(a2_f3):
    rng = np.random.default_rng(7)
    (S1, P1), (S2, P2) = simples_and_projectives(a2_f3)
    G = P1.direct_sum(P2, P2)
    assert morita_data(G).algebra.dim == 7
    targets = [Complex.concentrated(S1), Complex.concentrated(S2, 1)]
    targets += [random_complex(a2_f3, rng, -1, 1) for _ in range(3)]
    r = morita_transport(G, targets)
    assert r.ext_agree and r.aut_agree and r.perfect_agree, r.mismatches
