import pytest

from dgmoduli import GF, QQ, Quiver, ValidationError, dual_numbers, matrix_algebra, path_algebra
from dgmoduli.dgcat_props import center_dim
from dgmoduli.errors import PreconditionError
from dgmoduli.fdalgebra import (algebra_from_json, algebra_to_json, enveloping_algebra, opposite,
                                product_of_fields, radical, tensor_algebra, unit_group_order)


def test_path_algebra_dimensions(field):
    assert path_algebra(Quiver(["1"]), field).dim == 1
    assert path_algebra(Quiver.linear(2), field).dim == 3
    assert path_algebra(Quiver.linear(3), field).dim == 6


def test_cycle_is_refused():
    q = Quiver(["1"], [("a", "1", "1")])
    assert not q.is_acyclic()
    with pytest.raises(ValidationError):
        path_algebra(q, GF(2))


def test_bad_quivers_are_refused():
    with pytest.raises(ValidationError):
        Quiver(["1", "1"])
    with pytest.raises(ValidationError):
        Quiver(["1"], [("a", "1", "2")])


def test_opposite_is_involutive(a2_f3):
    O = opposite(opposite(a2_f3))
    assert O.dim == a2_f3.dim
    assert (O.table == a2_f3.table).all()


def test_tensor_and_envelope_dimensions(a2_f3):
    assert tensor_algebra(a2_f3, a2_f3).dim == 9
    assert enveloping_algebra(a2_f3).dim == 9


def test_radicals(field):
    assert radical(path_algebra(Quiver.linear(2), field)).shape[1] == 1
    assert radical(dual_numbers(field)).shape[1] == 1
    assert radical(matrix_algebra(2, field)).shape[1] == 0
    assert radical(product_of_fields(3, field)).shape[1] == 0


def test_associativity_audit(a2_f3):
    assert a2_f3.audit()
    assert dual_numbers(GF(5)).audit()


@pytest.mark.parametrize("q", [2, 3, 5])
def test_unit_group_orders(q):
    F = GF(q)
    assert unit_group_order(path_algebra(Quiver(["1"]), F)) == q - 1
    assert unit_group_order(path_algebra(Quiver.linear(2), F)) == (q - 1) ** 2 * q
    assert unit_group_order(dual_numbers(F)) == (q - 1) * q
    assert unit_group_order(matrix_algebra(2, F)) == (q * q - 1) * (q * q - q)


def test_unit_group_by_enumeration_agrees():
    M = matrix_algebra(2, GF(3))
    assert unit_group_order(M, method="enumerate") == unit_group_order(M) == 48


def test_unit_group_over_q_is_refused():
    with pytest.raises(PreconditionError):
        unit_group_order(dual_numbers(QQ))


def test_center_dimension():
    assert center_dim(path_algebra(Quiver.linear(2), GF(3))) == 1
    assert center_dim(dual_numbers(GF(5))) == 2
    assert center_dim(product_of_fields(3, GF(2))) == 3


def test_json_round_trip(a2_f3):
    B = algebra_from_json(algebra_to_json(a2_f3))
    assert B.dim == 3
    assert (B.table == a2_f3.table).all()
    D = dual_numbers(GF(5))
    E = algebra_from_json(algebra_to_json(D))
    assert (E.table == D.table).all()
