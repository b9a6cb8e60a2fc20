import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgmoduli import GF, Complex, IntComplex, PreconditionError, dual_numbers
from dgmoduli.complexes import random_complex
from dgmoduli.modules import simples_and_projectives
from dgmoduli.perfection import (amplitude_calculus_check, bracket_from_test_modules, cell_structure,
                                 is_perfect, peel, support_by_reduction, support_primes, tor_amplitude_Z,
                                 truncation_step, verify_cells)
from dgmoduli.zcomplex import random_int_complex


def times(m):
    return IntComplex({-1: 1, 0: 1}, {-1: [[m]]})


def test_brackets():
    assert tor_amplitude_Z(times(2)).to_json() == [-1, 0]
    assert tor_amplitude_Z(times(1)).acyclic
    assert tor_amplitude_Z(IntComplex({3: 2})).to_json() == [3, 3]
    assert tor_amplitude_Z(times(2).shift(2)).to_json() == [-3, -2]
    assert tor_amplitude_Z(times(2).tensor(times(3))).acyclic
    assert tor_amplitude_Z(times(2).tensor(times(2))).to_json() == [-2, 0]


def test_bracket_from_test_modules_agrees():
    for m in (2, 4, 6, 1):
        C = times(m)
        assert bracket_from_test_modules(C).to_json() == tor_amplitude_Z(C).to_json()


def test_support():
    s = support_primes(times(12))
    assert sorted(s.primes) == [2, 3] and not s.generic
    assert support_primes(IntComplex({0: 1})).generic
    assert support_by_reduction(times(12)) == {2, 3}


def test_peel_takes_width_many_steps():
    P = peel(times(2))
    assert len(P.steps) == 1
    assert tor_amplitude_Z(P.final).to_json() == [-1, -1]
    assert P.certificate[0] == 1


def test_degenerate_truncation_is_refused():
    with pytest.raises(PreconditionError):
        truncation_step(IntComplex({0: 1}))
    with pytest.raises(PreconditionError):
        truncation_step(times(1))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_peeling_lowers_the_top(seed):
    rng = np.random.default_rng(seed)
    C = random_int_complex(rng)
    br = tor_amplitude_Z(C)
    P = peel(C)
    if br.acyclic:
        assert not P.steps
        return
    assert len(P.steps) == br.hi - br.lo
    for k, st_ in enumerate(P.steps):
        assert st_.bracket.within(br.lo, br.hi - k - 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_amplitude_calculus(seed):
    rng = np.random.default_rng(seed)
    r = amplitude_calculus_check(random_int_complex(rng), random_int_complex(rng))
    assert r.ok, r.checks


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_support_matches_reduction(seed):
    rng = np.random.default_rng(seed)
    C = random_int_complex(rng)
    s = support_primes(C)
    red = support_by_reduction(C, 30)
    assert all((p in s) == (p in red) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29))


def test_simple_a2_is_perfect_with_two_cells(a2_f3):
    (S1, _), _ = simples_and_projectives(a2_f3)
    C = Complex.concentrated(S1)
    v = is_perfect(C)
    assert v.perfect
    assert len(v.cells) == 2
    assert verify_cells(C, v.cells)


def test_dual_numbers_simple_is_not_perfect():
    (S, _), = simples_and_projectives(dual_numbers(GF(5)))
    v = is_perfect(Complex.concentrated(S))
    assert v.kind == "not_perfect"
    assert v.witness is not None


@pytest.mark.parametrize("seed", range(6))
def test_cells_are_additive(seed, a2_f3):
    rng = np.random.default_rng(seed)
    C = random_complex(a2_f3, rng, -1, 1)
    D = random_complex(a2_f3, rng, -1, 1)
    cs, ds = cell_structure(C), cell_structure(D)
    assert verify_cells(C, cs) and verify_cells(D, ds)
    assert len(cell_structure(C.direct_sum(D))) == len(cs) + len(ds)


def test_field_complex_truncation(a2_f3):
    (S1, _), (S2, _) = simples_and_projectives(a2_f3)
    E = Complex.concentrated(S1).direct_sum(Complex.concentrated(S2, 1))
    P = peel(E)
    assert len(P.steps) == 1
