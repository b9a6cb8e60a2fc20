import numpy as np
import pytest

from dgmoduli import GF, QQ, ModuleRep, Quiver, ValidationError, dual_numbers, path_algebra
from dgmoduli.complexes import projective_resolution, random_rep
from dgmoduli.modules import (hom_space, is_isomorphic, is_module_map, module_from_json, module_to_json,
                              simples_and_projectives)
from dgmoduli.oracles import hom_basis


def test_simples_and_projectives_of_a2(a2_f3):
    (S1, P1), (S2, P2) = simples_and_projectives(a2_f3)
    assert S1.vertex_dims() == [1, 0]
    assert P1.vertex_dims() == [1, 1]
    assert S2.vertex_dims() == [0, 1]
    assert P2.vertex_dims() == [0, 1]


def test_hom_between_simples_vanishes(a2_f3):
    (S1, P1), (S2, P2) = simples_and_projectives(a2_f3)
    assert hom_space(S1, S2) == []
    assert len(hom_space(P2, P1)) == 1
    assert hom_space(P1, P2) == []
    assert len(hom_space(P1, S1)) == 1


def test_two_reps_with_dims_one_one_differ(a2_f3):
    M1 = ModuleRep.from_quiver_rep(a2_f3, [1, 1], [[[1]]])
    M0 = ModuleRep.from_quiver_rep(a2_f3, [1, 1], [[[0]]])
    assert not is_isomorphic(M1, M0)[0]
    (S1, P1), (S2, _) = simples_and_projectives(a2_f3)
    assert is_isomorphic(M1, P1)[0]
    ok, iso = is_isomorphic(M0, S1.direct_sum(S2))
    assert ok and is_module_map(iso, M0, S1.direct_sum(S2))


def test_projective_resolution_lengths(a2_f3):
    (S1, P1), (S2, _) = simples_and_projectives(a2_f3)
    assert projective_resolution(S1)[1] == 1
    assert projective_resolution(S2)[1] == 0
    assert projective_resolution(P1)[1] == 0


def test_dual_numbers_simple_is_periodic():
    (S, _), = simples_and_projectives(dual_numbers(GF(5)))
    R, length = projective_resolution(S)
    assert R.status == "periodic"
    assert length is None


def test_representation_shape_is_checked(a2_f3):
    with pytest.raises(ValidationError):
        ModuleRep.from_quiver_rep(a2_f3, [1], [])
    with pytest.raises(ValidationError):
        ModuleRep.from_quiver_rep(a2_f3, [1, 1], [[[1, 1]]])


@pytest.mark.parametrize("seed", range(8))
def test_hom_space_matches_intertwiner_oracle(seed):
    rng = np.random.default_rng(seed)
    F = GF(3) if seed % 2 else QQ
    A = path_algebra(Quiver(["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3"), ("c", "1", "3")]), F)
    M, N = random_rep(A, rng), random_rep(A, rng)
    H = hom_space(M, N)
    assert len(H) == len(hom_basis(M, N))
    for h in H:
        assert is_module_map(h, M, N)


def test_module_json_round_trip(a2_f3, rng):
    M = random_rep(a2_f3, rng, max_dim=3)
    N = module_from_json(a2_f3, module_to_json(M))
    assert N.dim == M.dim
    assert all((x == y).all() for x, y in zip(M.action, N.action))
