"""The acceptance suite: ten checks, each with an exactness test and a time budget.

Each check returns a Result; run_all prints one line per check."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import oracles
from .complexes import Complex, aut_order, random_complex
from .dgcat_props import bimodule_is_equivalence, certify, diagonal_bimodule, hochschild, morita_transport
from .exact_linalg import GF, QQ
from .fdalgebra import Quiver, dual_numbers, path_algebra
from .modules import simples_and_projectives
from .moduli import NuBound, enumerate_classes, gl_closed_form, module_classes_within, stacky_count
from .perfection import amplitude_calculus_check, support_by_reduction, support_primes
from .zcomplex import random_homotopic_endo, random_int_complex


@dataclass
class Result:
    number: int
    title: str
    correct: bool
    elapsed: float
    budget: float
    detail: dict = dc_field(default_factory=dict)

    @property
    def passed(self):
        return self.correct and self.elapsed < self.budget

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        why = ""
        if not self.correct:
            why = " (wrong result)"
        elif not self.passed:
            why = " (over time budget)"
        return (f"[{status}] criterion {self.number}: {self.title}{why} "
                f"{self.elapsed:.2f} s of {self.budget:g} s")

    def to_json(self):
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "correct": self.correct, "elapsed": round(self.elapsed, 3), "budget": self.budget,
                "detail": self.detail}


def _timed(number, title, budget, fn, *args):
    t = time.perf_counter()
    correct, detail = fn(*args)
    return Result(number, title, bool(correct), time.perf_counter() - t, budget, detail)


# ---------------------------------------------------------------------------
# 1-2: smoothness and saturation

def random_quivers(seed=0, n=10):
    rng = np.random.default_rng(seed)
    return [Quiver.random_acyclic(rng, max_vertices=5, max_arrows=6) for _ in range(n)]


def _c1(seed):
    rows = []
    ok = True
    for F in (GF(5), QQ):
        for i, q in enumerate(random_quivers(seed)):
            A = path_algebra(q, F)
            r = certify(A)
            good = r.saturated is True and r.smooth.kind == "yes" and r.smooth.length <= 1
            ok &= good
            rows.append({"field": str(F), "quiver": i, "vertices": q.n_vertices, "arrows": len(q.arrows),
                         "saturated": r.saturated, "length": r.smooth.length})
    return ok, {"cases": rows}


def _c2(seed):
    A = dual_numbers(GF(5))
    r = certify(A, cutoff=10, hh_degrees=(0, 6))
    smooth_no = r.smooth.kind == "no" and r.smooth.witness is not None
    hh = hochschild(A, degrees=(0, 6), cutoff=10)
    wanted = {i: 1 for i in range(7)}
    bad = {i: d for i, d in hh.items() if d != wanted[i]}
    return smooth_no and not bad, {"smooth": r.smooth.kind, "verdict": r.smooth.to_json(),
                                   "hochschild": {str(i): d for i, d in sorted(hh.items())},
                                   "expected": {str(i): 1 for i in range(7)},
                                   "mismatched_degrees": sorted(bad)}


# ---------------------------------------------------------------------------
# 3: tangent dimensions against the standard resolution

def _c3(seed):
    checked = 0
    bad = []
    for n in (2, 3):
        A = path_algebra(Quiver.linear(n), GF(2))
        table = enumerate_classes(A, (-1, 1), caps=(1,) * n)
        for pt in table.points:
            if pt.representative.is_acyclic():
                checked += 1
                continue
            degs = sorted(set(pt.tangent) | set(range(-3, 3)))
            ext = oracles.ext_by_standard_resolution(pt.representative, [i + 1 for i in degs])
            for i in degs:
                if pt.tangent.get(i, 0) != ext[i + 1]:
                    bad.append({"quiver": f"A{n}", "key": repr(pt.key), "degree": i,
                                "reported": pt.tangent.get(i, 0), "oracle": ext[i + 1]})
            checked += 1
    return checked >= 20 and not bad, {"points": checked, "mismatches": bad[:10]}


# ---------------------------------------------------------------------------
# 4: automorphism counts against exhaustion

def small_complexes(A, max_total):
    """Every complex on consecutive degrees 0..k whose terms are the canonical
    class representatives (zero terms allowed strictly inside) and whose
    differentials run over all module maps with d² = 0; total dimension ≤ max_total."""
    F = A.field
    p = F.p
    reps = [c.module for c in module_classes_within(A, total_cap=max_total)]
    from .modules import hom_space

    homs = {}

    def all_maps(i, j):
        if (i, j) not in homs:
            B = hom_space(reps[i], reps[j])
            maps = []
            for c in itertools.product(range(p), repeat=len(B)):
                m = F.zeros((reps[j].dim, reps[i].dim))
                for x, b in zip(c, B):
                    if x:
                        m = F.reduce(m + x * b)
                maps.append(m)
            homs[(i, j)] = maps or [F.zeros((reps[j].dim, reps[i].dim))]
        return homs[(i, j)]

    out = []

    def seqs(prefix, total):
        if prefix and reps[prefix[-1]].dim:
            yield list(prefix)
        for k, M in enumerate(reps):
            if not prefix and not M.dim:
                continue
            if prefix and not M.dim and not reps[prefix[-1]].dim:
                continue
            if total + M.dim <= max_total:
                yield from seqs(prefix + [k], total + M.dim)

    for seq in seqs([], 0):
        def diffs(i, prev):
            if i == len(seq) - 1:
                yield {}
                return
            for d in all_maps(seq[i], seq[i + 1]):
                if prev is not None and prev.size and d.size and F.matmul(d, prev).any():
                    continue
                for rest in diffs(i + 1, d):
                    yield {i: d, **rest}
        for ds in diffs(0, None):
            terms = {i: reps[k] for i, k in enumerate(seq)}
            out.append(Complex(A, terms, {i: d for i, d in ds.items() if d.size}, check=False))
    return out


def _c4(seed):
    rows = []
    ok = True
    for name, q in (("one vertex", Quiver(["1"])), ("A2", Quiver.linear(2))):
        A = path_algebra(q, GF(2))
        corpus = small_complexes(A, 4)
        bad = 0
        for C in corpus:
            a = aut_order(C)
            b = oracles.homotopy_aut_count(C)
            if a != b:
                bad += 1
        ok &= bad == 0
        rows.append({"quiver": name, "complexes": len(corpus), "mismatches": bad})
    return ok, {"cases": rows}


# ---------------------------------------------------------------------------
# 5-6: integral complexes

def int_corpus(seed=0, n=100):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        P = random_int_complex(rng, max_rank=4, bound=3)
        Q = random_int_complex(rng, max_rank=4, bound=3)
        out.append((P, Q, random_homotopic_endo(P, rng)))
    return out


def _c5(seed):
    failures = []
    for k, (P, Q, f) in enumerate(int_corpus(seed)):
        r = amplitude_calculus_check(P, Q, f)
        if not r.ok:
            failures.append({"index": k, "checks": r.checks})
    return not failures, {"complexes": 100, "failures": failures[:5]}


def _c6(seed):
    from sympy import primerange
    primes = list(primerange(2, 51))
    bad = []
    for k, (P, _, _) in enumerate(int_corpus(seed)):
        s = support_primes(P)
        red = support_by_reduction(P, bound=50)
        diff = [p for p in primes if (p in s) != (p in red)]
        if diff:
            bad.append({"index": k, "primes": diff})
    return not bad, {"complexes": 100, "primes": len(primes), "disagreements": bad[:5]}


# ---------------------------------------------------------------------------
# 7-8: Morita transport and bimodule equivalences

def _c7(seed):
    rng = np.random.default_rng(seed)
    A = path_algebra(Quiver.linear(2), GF(3))
    (_, P1), (_, P2) = simples_and_projectives(A)
    G = P1.direct_sum(P2, P2)
    targets = [random_complex(A, rng, -1, 1, max_dim=2) for _ in range(10)]
    r = morita_transport(G, targets, check_pairs=False)
    return r.ext_agree and r.aut_agree and r.perfect_agree, {
        "transported_algebra_dim": r.data.algebra.dim, "mismatches": r.mismatches}


def _c8(seed):
    A = path_algebra(Quiver.linear(2), GF(3))
    D = diagonal_bimodule(A)
    r1 = bimodule_is_equivalence(D)
    K = path_algebra(Quiver(["1", "2"]), GF(3))
    r2 = bimodule_is_equivalence(diagonal_bimodule(K, [[0, 1], [1, 0]]))
    r3 = bimodule_is_equivalence(D.direct_sum(D))
    diag = r3.unit_map
    ok = r1.equivalence and r2.equivalence and not r3.equivalence and not diag["quasi_iso"] \
        and bool(diag["failed_degrees"])
    return ok, {"diagonal": r1.equivalence, "swap_twist": r2.equivalence, "doubled": r3.equivalence,
                "doubled_unit_map": diag}


# ---------------------------------------------------------------------------
# 9-10: enumeration and counts

def _c9(seed):
    A = path_algebra(Quiver.linear(2), GF(2))
    t0 = enumerate_classes(A, (0, 0), caps=(1, 1), invariants=False)
    o0 = oracles.orbit_count(A.quiver, (1, 1), 2)
    t1 = enumerate_classes(A, (-1, 0), caps=(1, 1), invariants=False)
    o1 = oracles.shifted_multiset_count(A, (1, 1), (-1, 0))
    ok = len(t0) == 5 == o0 and len(t1) == o1
    return ok, {"degree0": len(t0), "orbit_oracle": o0, "window[-1,0]": len(t1), "multiset_oracle": o1}


def _c10(seed):
    rows = []
    ok = True
    for q in (2, 3):
        A = path_algebra(Quiver(["1"]), GF(q))
        for n in range(4):
            got = stacky_count(enumerate_classes(A, (0, 0), nu=NuBound.make({0: n})))
            want = gl_closed_form(n, q)
            ok &= got == want and isinstance(got, Fraction)
            rows.append({"q": q, "n": n, "count": str(got), "closed_form": str(want)})
    return ok, {"cases": rows}


CRITERIA = {
    1: ("saturation of random quiver algebras over F5 and Q", 10, _c1),
    2: ("dual numbers over F5: not smooth, HH^i = 1 for 0 <= i <= 6", 5, _c2),
    3: ("tangent dimensions against the standard resolution (A2, A3 over F2)", 60, _c3),
    4: ("aut orders against exhaustive homotopy classes (total dim <= 4, F2)", 120, _c4),
    5: ("Tor-amplitude calculus on 100 random free Z-complexes", 30, _c5),
    6: ("support primes against direct reduction for p <= 50", 30, _c6),
    7: ("Morita invariance along P1 + P2^2 over A2/F3", 30, _c7),
    8: ("bimodule equivalence: diagonal, swap twist, doubled diagonal", 10, _c8),
    9: ("enumeration of A2/F2 classes against the orbit oracle", 30, _c9),
    10: ("stacky count of the one-vertex quiver against the closed form", 10, _c10),
}


def run_criterion(k, seed=0) -> Result:
    title, budget, fn = CRITERIA[k]
    return _timed(k, title, budget, fn, seed)


def run_all(seed=0, only=None, echo=None):
    out = []
    for k in sorted(CRITERIA):
        if only is not None and k not in only:
            continue
        r = run_criterion(k, seed)
        if echo:
            echo(r.line())
        out.append(r)
    return out
