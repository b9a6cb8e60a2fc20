"""The ten acceptance criteria, each at its own tolerance and time budget.

Every criterion prints one PASS/FAIL line.  Criterion 2 is expected to fail:
HH^0 of the dual numbers is two-dimensional (the algebra is commutative), not 1."""
import pytest

from dgmoduli.acceptance import CRITERIA, run_criterion

LINES = {}


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    r = run_criterion(k, seed=0)
    print()
    print(r.line())
    LINES[k] = r.line()
    assert r.correct, r.detail
    assert r.elapsed < r.budget, f"{r.elapsed:.1f} s exceeds the {r.budget} s budget"
