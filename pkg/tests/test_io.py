import json

import numpy as np
import pytest

from dgmoduli import GF, ChainMap, Complex, IntComplex, Quiver, ValidationError, path_algebra
from dgmoduli import io
from dgmoduli.complexes import random_complex
from dgmoduli.dgcat_props import morita_data
from dgmoduli.modules import simples_and_projectives


def _same(C, D):
    assert sorted(C.terms) == sorted(D.terms)
    for n in C.degrees():
        assert C.term(n).dim == D.term(n).dim
        assert (C.diff(n) == D.diff(n)).all()


@pytest.mark.parametrize("seed", range(5))
def test_field_complex_round_trip(seed):
    rng = np.random.default_rng(seed)
    A = path_algebra(Quiver.linear(3), GF(3))
    C = random_complex(A, rng, -1, 1)
    text = io.dumps(io.complex_to_json(C))
    D = io.complex_from_json(json.loads(text))
    _same(C, D)
    assert io.dumps(io.complex_to_json(D)) == text


def test_integer_complex_round_trip():
    C = IntComplex({-1: 2, 0: 1}, {-1: [[2, 4]]})
    D = io.complex_from_json(io.complex_to_json(C))
    assert D.ranks == C.ranks and (D.diff(-1) == C.diff(-1)).all()


def test_transported_complex_round_trip(a2_f3):
    (S1, P1), (S2, P2) = simples_and_projectives(a2_f3)
    M = morita_data(P1.direct_sum(P2, P2))
    C = M.transport(Complex.concentrated(S1))
    D = io.complex_from_json(json.loads(io.dumps(io.complex_to_json(C))))
    _same(C, D)


def test_chain_map_round_trip(a2_f3):
    (S1, _), _ = simples_and_projectives(a2_f3)
    C = Complex.concentrated(S1)
    f = ChainMap.identity(C)
    g = io.chain_map_from_json(io.chain_map_to_json(f), C, C)
    assert (g[0] == f[0]).all()


def test_version_is_checked():
    with pytest.raises(ValidationError):
        io.check_version({"dgmoduli-format": 2})
    with pytest.raises(ValidationError):
        io.check_version([1, 2])


def test_bad_documents(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValidationError):
        io.load(bad)
    with pytest.raises(ValidationError):
        io.load(tmp_path / "missing.json")
    doc = {"context": {"field": "F2", "quiver": {"vertices": ["1"], "arrows": []}},
           "window": [0, 0], "terms": {"1": {"dims": [1], "arrows": []}}}
    with pytest.raises(ValidationError):
        io.complex_from_json(doc)
    doc["terms"] = {"0": {"dims": [1], "arrows": []}, "1": {"dims": [1], "arrows": []}}
    doc["window"] = [0, 1]
    doc["differentials"] = {"0": [[1, 1]]}
    with pytest.raises(ValidationError):
        io.complex_from_json(doc)


def test_algebra_document_needs_a_field():
    with pytest.raises(ValidationError):
        io.algebra_document({"quiver": {"vertices": ["1"], "arrows": []}})
    A = io.algebra_document({"quiver": {"vertices": ["1"], "arrows": []}}, q=3)
    assert A.field.p == 3
