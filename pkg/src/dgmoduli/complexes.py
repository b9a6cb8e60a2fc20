"""Bounded cochain complexes of modules, derived Hom and automorphism counts.

Conventions: cohomological grading, d^n : C^n -> C^{n+1}; the shift is
C[k]^n = C^{n+k} with differential (-1)^k d; the cone of f : C -> D has
cone^n = C^{n+1} ⊕ D^n and differential (c, d) |-> (-d_C c, f c + d_D d);
the Hom complex differential is δ(f) = d∘f - (-1)^n f∘d.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import exact_linalg as la
from .errors import Undetermined, ValidationError
from .exact_linalg import Field
from .fdalgebra import FinDimAlgebra, Quiver, TableAlgebra, matrix_algebra_units, path_algebra
from .modules import (ModuleRep, ProjectiveModule, hom_space, is_isomorphic, is_module_map,
                      tree_images)


@lru_cache(maxsize=None)
def field_algebra(F: Field) -> TableAlgebra:
    """The base field as the path algebra of a one-vertex quiver."""
    return path_algebra(Quiver(["*"]), F)


def vector_space(F: Field, n: int) -> ModuleRep:
    A = field_algebra(F)
    return ModuleRep(A, n, [F.eye(n)])


class Complex:
    """terms: {degree: ModuleRep}; diffs: {degree n: matrix C^n -> C^{n+1}}."""

    def __init__(self, algebra: FinDimAlgebra, terms, diffs=None, check=True):
        self.algebra = algebra
        self.terms = {int(n): M for n, M in terms.items() if M.dim}
        for M in self.terms.values():
            if M.algebra is not algebra:
                M.field.check(algebra.field)
        F = algebra.field
        self.diffs = {}
        for n, d in (diffs or {}).items():
            n = int(n)
            src, tgt = self.term(n), self.term(n + 1)
            d = np.asarray(d)
            if d.size == 0 and (src.dim == 0 or tgt.dim == 0):
                continue
            if d.shape != (tgt.dim, src.dim):
                raise ValidationError(f"differential in degree {n} has shape {d.shape}, expected {(tgt.dim, src.dim)}")
            if not la.is_zero(d):
                self.diffs[n] = d if d.dtype == F.dtype else F.asarray(d)
        if check:
            self.audit()

    @property
    def field(self):
        return self.algebra.field

    @property
    def lo(self):
        return min(self.terms) if self.terms else 0

    @property
    def hi(self):
        return max(self.terms) if self.terms else -1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def term(self, n) -> ModuleRep:
        M = self.terms.get(n)
        if M is None:
            return ModuleRep.zero(self.algebra)
        return M

    def diff(self, n):
        d = self.diffs.get(n)
        if d is None:
            return self.field.zeros((self.term(n + 1).dim, self.term(n).dim))
        return d

    def is_zero(self):
        return not self.terms

    @property
    def total_dim(self):
        return sum(M.dim for M in self.terms.values())

    def audit(self):
        F = self.field
        for n, d in self.diffs.items():
            if not is_module_map(d, self.term(n), self.term(n + 1)):
                raise ValidationError(f"differential in degree {n} is not a module map")
            if n + 1 in self.diffs and not la.is_zero(F.matmul(self.diffs[n + 1], d)):
                raise ValidationError(f"d∘d != 0 in degree {n}")
        return True

    def shift(self, k: int) -> "Complex":
        F = self.field
        sign = -1 if k % 2 else 1
        return Complex(self.algebra, {n - k: M for n, M in self.terms.items()},
                       {n - k: F.reduce(sign * d) for n, d in self.diffs.items()}, check=False)

    def direct_sum(self, other: "Complex") -> "Complex":
        F = self.field
        degs = set(self.terms) | set(other.terms)
        terms = {n: self.term(n).direct_sum(other.term(n)) for n in degs}
        diffs = {n: la.block_diag([self.diff(n), other.diff(n)], F) for n in degs}
        return Complex(self.algebra, terms, diffs, check=False)

    def cohomology_dims(self):
        F = self.field
        out = {}
        for n in self.degrees():
            h = self.term(n).dim - la.rank(self.diff(n), F) - la.rank(self.diff(n - 1), F)
            if h:
                out[n] = h
        return out

    def is_acyclic(self):
        return not self.cohomology_dims()

    @classmethod
    def concentrated(cls, M: ModuleRep, degree=0):
        return cls(M.algebra, {degree: M}, {}, check=False)

    def __repr__(self):
        dims = {n: M.dim for n, M in sorted(self.terms.items())}
        return f"<Complex {dims} over {self.algebra.name}>"


class ChainMap:
    def __init__(self, source: Complex, target: Complex, comps, check=True):
        self.source, self.target = source, target
        F = source.field
        self.comps = {}
        for n, f in comps.items():
            f = np.asarray(f)
            shape = (target.term(n).dim, source.term(n).dim)
            if f.size == 0 and 0 in shape:
                continue
            if f.shape != shape:
                raise ValidationError(f"chain map component {n} has shape {f.shape}, expected {shape}")
            if not la.is_zero(f):
                self.comps[int(n)] = f if f.dtype == F.dtype else F.asarray(f)
        if check:
            self.audit()

    def __getitem__(self, n):
        f = self.comps.get(n)
        if f is None:
            return self.source.field.zeros((self.target.term(n).dim, self.source.term(n).dim))
        return f

    def audit(self):
        F = self.source.field
        C, D = self.source, self.target
        degs = set(C.terms) | set(D.terms)
        for n in degs | {n - 1 for n in degs}:
            lhs = F.matmul(D.diff(n), self[n])
            rhs = F.matmul(self[n + 1], C.diff(n))
            if not la.mat_equal(lhs, rhs):
                raise ValidationError(f"not a chain map in degree {n}")
        for n, f in self.comps.items():
            if not is_module_map(f, C.term(n), D.term(n)):
                raise ValidationError(f"component {n} is not a module map")
        return True

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self ∘ other."""
        F = self.source.field
        degs = set(self.comps) & set(other.comps)
        return ChainMap(other.source, self.target, {n: F.matmul(self[n], other[n]) for n in degs}, check=False)

    @classmethod
    def identity(cls, C: Complex):
        return cls(C, C, {n: C.field.eye(M.dim) for n, M in C.terms.items()}, check=False)

    @classmethod
    def zero(cls, C: Complex, D: Complex):
        return cls(C, D, {}, check=False)


def random_rep(A, rng, max_dim=2, dims=None) -> ModuleRep:
    """Random representation of the quiver of a path algebra."""
    q = A.quiver
    F = A.field
    if dims is None:
        dims = [int(x) for x in rng.integers(0, max_dim + 1, size=q.n_vertices)]
    mats = [F.random(rng, (dims[t], dims[s])) for (_, s, t) in q.arrows]
    return ModuleRep.from_quiver_rep(A, dims, mats)


def random_complex(A, rng, lo=-1, hi=1, max_dim=2) -> Complex:
    """Random complex of quiver representations on [lo, hi]; each differential is a
    random module map killing the image of the previous one."""
    F = A.field
    terms = {n: random_rep(A, rng, max_dim) for n in range(lo, hi + 1)}
    diffs = {}
    prev = None
    for n in range(lo, hi):
        M, N = terms[n], terms[n + 1]
        if not M.dim or not N.dim:
            prev = None
            continue
        if prev is not None and prev.size and la.rank(prev, F):
            S = la.image_basis(prev, F)
            Qm, Qp, _ = M.quotient(S)
            basis = [F.matmul(h, Qp) for h in hom_space(Qm, N)]
        else:
            basis = hom_space(M, N)
        d = F.zeros((N.dim, M.dim))
        for h in basis:
            d = F.reduce(d + F.random(rng, ()) * h) if F.p else d + F.random(rng, ()) * h
        diffs[n] = d
        prev = d
    return Complex(A, terms, diffs, check=True)


def cone(f: ChainMap):
    """(cone(f), inclusion D -> cone, projection cone -> C[1])."""
    C, D = f.source, f.target
    F = C.field
    degs = set(n - 1 for n in C.terms) | set(D.terms)
    terms, diffs, inc, proj = {}, {}, {}, {}
    for n in degs:
        terms[n] = C.term(n + 1).direct_sum(D.term(n))
    for n in degs | {n - 1 for n in degs}:
        c1, d0 = C.term(n + 1).dim, D.term(n).dim
        c2, d1 = C.term(n + 2).dim, D.term(n + 1).dim
        m = F.zeros((c2 + d1, c1 + d0))
        m[:c2, :c1] = F.reduce(-C.diff(n + 1))
        m[c2:, :c1] = f[n + 1]
        m[c2:, c1:] = D.diff(n)
        diffs[n] = m
    K = Complex(C.algebra, terms, diffs, check=False)
    for n in degs:
        c1, d0 = C.term(n + 1).dim, D.term(n).dim
        i = F.zeros((c1 + d0, d0))
        i[c1:] = F.eye(d0)
        inc[n] = i
        p = F.zeros((c1, c1 + d0))
        p[:, :c1] = F.eye(c1)
        proj[n] = p
    return K, ChainMap(D, K, inc, check=False), ChainMap(K, C.shift(1), proj, check=False)


def cohomology(C: Complex):
    """{degree: H^n as a module} (zero degrees omitted)."""
    F = C.field
    out = {}
    for n in C.degrees():
        M = C.term(n)
        K = la.nullspace(C.diff(n), F)
        if not K.shape[1]:
            continue
        Z = M.submodule(K)
        im = la.image_basis(C.diff(n - 1), F)
        sub = la.Subspace(K, F, independent=True)
        Bz = sub.coords(im) if im.shape[1] else F.zeros((K.shape[1], 0))
        H, _, _ = Z.quotient(Bz)
        if H.dim:
            out[n] = H
    return out


def is_quasi_iso(f: ChainMap) -> bool:
    """Cone acyclicity, cross-checked against degreewise bijectivity of H^n(f)."""
    K, _, _ = cone(f)
    a = K.is_acyclic()
    b = _cohomology_bijective(f)
    assert a == b, "cone test and cohomology test disagree"
    return a


def induced_rank(f: ChainMap, n) -> int:
    """Rank of H^n(f)."""
    F = f.source.field
    C, D = f.source, f.target
    Zc = la.nullspace(C.diff(n), F)
    if not Zc.shape[1] or not D.term(n).dim:
        return 0
    imgs = F.matmul(f[n], Zc)
    Bd = la.image_basis(D.diff(n - 1), F)
    # rank of H^n(f) = rank(f(Z_C) + B_D) - rank(B_D)
    return la.rank(np.concatenate([Bd, imgs], axis=1), F) - Bd.shape[1]


def failed_degrees(f: ChainMap):
    """Degrees in which H^n(f) is not bijective."""
    hc, hd = f.source.cohomology_dims(), f.target.cohomology_dims()
    bad = []
    for n in sorted(set(hc) | set(hd)):
        r = induced_rank(f, n)
        if r != hc.get(n, 0) or r != hd.get(n, 0):
            bad.append(n)
    return bad


def _cohomology_bijective(f: ChainMap) -> bool:
    return not failed_degrees(f)


# ---------------------------------------------------------------------------
# projective replacement

@dataclass
class Replacement:
    P: Complex
    q: ChainMap
    status: str                      # terminated | periodic | cutoff
    witness: tuple = None            # (n, m, iso) with syzygy K_n ≅ K_m, n < m
    syzygies: dict = dc_field(default_factory=dict)
    lowest: int = 0                  # lowest degree in which P was computed

    @property
    def terminated(self):
        return self.status == "terminated"


def _zero_projective(A):
    return ProjectiveModule(A, [])


def projective_replacement(C: Complex, cutoff=10, lowest=None, detect_periodic=False,
                           verify=True, rng=None) -> Replacement:
    """Minimal complex of projectives P with a quasi-isomorphism q : P -> C, built
    degree by degree from the top by covering cycles of the partial cone."""
    A = C.algebra
    F = A.field
    rng = rng if rng is not None else np.random.default_rng(0)
    if C.is_zero():
        P = Complex(A, {}, {}, check=False)
        return Replacement(P, ChainMap.zero(P, C), "terminated", lowest=0)
    lo, hi = C.lo, C.hi
    if lowest is None:
        lowest = lo - cutoff
    lowest = min(lowest, lo)
    reps = A.class_reps()
    P_terms, P_diffs, q = {}, {}, {}
    prevP = _zero_projective(A)
    prev_phi = None             # φ^{(n+1)} : P^{n+1} -> X_{n+1}
    next_dims = (0, C.term(hi + 1).dim)
    syz = {}
    status, witness = None, None
    n = hi
    while True:
        Cn = C.term(n)
        X = prevP.direct_sum(Cn) if prevP.dim else Cn
        p1, c0 = prevP.dim, Cn.dim
        p2, c1 = next_dims
        D = F.zeros((p2 + c1, p1 + c0))
        if prev_phi is not None and p1:
            D[:, :p1] = prev_phi
        if c0 and c1:
            D[p2:, p1:] = C.diff(n)
        K = la.nullspace(D, F) if X.dim else F.zeros((0, 0))
        dC = C.diff(n - 1)
        Bm = F.zeros((X.dim, dC.shape[1]))
        Bm[p1:] = dC
        Bm = la.image_basis(Bm, F) if Bm.shape[1] else Bm
        kdim, bdim = K.shape[1], Bm.shape[1]
        if kdim == bdim:
            if n < lo:
                status = "terminated"
                break
            P_terms[n] = _zero_projective(A)
            prevP, prev_phi = P_terms[n], F.zeros((X.dim, 0))
            next_dims = (p1, c0)
            n -= 1
            continue
        if n < lo:
            Kmod = X.submodule(K)
            syz[n] = Kmod
            if detect_periodic:
                for m in sorted(syz):
                    if m <= n or syz[m].dim != Kmod.dim:
                        continue
                    ok, iso = is_isomorphic(Kmod, syz[m], rng)
                    if ok:
                        status, witness = "periodic", (n, m, iso)
                        break
                if status:
                    break
        if n < lowest:
            status = "cutoff"
            break
        base = np.concatenate([Bm, X.radical_subspace(K)], axis=1)
        roots, summands = [], []
        for e in reps:
            eK = F.matmul(X.action[e], K)
            new = la.extend_mod(base, eK, F)
            if new.shape[1]:
                roots.append(new)
                summands.extend([e] * new.shape[1])
                base = np.concatenate([base, new], axis=1)
        images = np.concatenate(roots, axis=1)
        Pn = ProjectiveModule(A, summands)
        phi = Pn.evaluate(X, images)
        P_terms[n] = Pn
        if p1:
            P_diffs[n] = F.reduce(-phi[:p1])
        if c0:
            q[n] = phi[p1:]
        prevP, prev_phi = Pn, phi
        next_dims = (p1, c0)
        n -= 1
    P = Complex(A, P_terms, P_diffs, check=False)
    qmap = ChainMap(P, C, q, check=False)
    rep = Replacement(P, qmap, status, witness, syz, lowest=n + 1)
    if verify and status == "terminated":
        qmap.audit()
        if not is_quasi_iso(qmap):
            raise AssertionError("projective replacement is not a quasi-isomorphism")
    return rep


def replacement_cached(C: Complex, **kw) -> Replacement:
    key = tuple(sorted(kw.items()))
    cache = C.__dict__.setdefault("_repl_cache", {})
    if key not in cache:
        cache[key] = projective_replacement(C, **kw)
    return cache[key]


def projective_resolution(M: ModuleRep, cutoff=10, detect_periodic=True):
    """Minimal projective resolution of M (as the replacement of M[0]); the
    length is the number of nonzero terms below degree 0."""
    R = projective_replacement(Complex.concentrated(M), cutoff=cutoff, detect_periodic=detect_periodic)
    length = -R.P.lo if R.terminated and not R.P.is_zero() else None
    return R, length


# ---------------------------------------------------------------------------
# derived Hom

class HomComplex:
    """Hom_A(P, D) for P a complex of ProjectiveModules, parametrised through
    Hom(A e, X) ≅ e X: a map of degree n is given by the images of all summand
    roots, each expressed in the fixed basis of e D^{i+n}."""

    def __init__(self, P: Complex, D: Complex, degrees=None):
        F = P.field
        self.P, self.D, self.F = P, D, F
        for n, M in P.terms.items():
            if not isinstance(M, ProjectiveModule):
                raise ValidationError("first argument must have projective terms")
        if P.is_zero() or D.is_zero():
            nmin, nmax = 0, -1
        else:
            nmin, nmax = D.lo - P.hi, D.hi - P.lo
        if degrees is not None:
            nmin, nmax = max(nmin, degrees[0] - 1), min(nmax, degrees[1] + 1)
        self.nmin, self.nmax = nmin, nmax
        self._W = {}
        self.blocks = {}
        self.dims = {}
        for n in range(nmin, nmax + 1):
            blocks, off = [], 0
            for i in sorted(P.terms):
                Dj = D.term(i + n)
                if not Dj.dim:
                    continue
                Pi = P.terms[i]
                for s, e in enumerate(Pi.summands):
                    r = Dj.idem_blocks[e][0].shape[1]
                    if r:
                        blocks.append((i, s, e, off, r))
                        off += r
            self.blocks[n] = blocks
            self.dims[n] = off
        self._delta = {}

    def dim(self, n):
        return self.dims.get(n, 0)

    def W(self, e, j):
        key = (e, j)
        if key not in self._W:
            X = self.D.term(j)
            part = self.P.algebra.indecomposable_projective(e)
            self._W[key] = tree_images(part, X, X.idem_blocks[e][0])
        return self._W[key]

    def delta(self, n):
        """Matrix of δ : Hom^n -> Hom^{n+1}."""
        if n in self._delta:
            return self._delta[n]
        F = self.F
        P, D = self.P, self.D
        rows, cols = self.dim(n + 1), self.dim(n)
        M = F.zeros((rows, cols))
        if rows and cols:
            src = {(i, s): (off, r) for (i, s, e, off, r) in self.blocks[n]}
            sign = -1 if n % 2 == 0 else 1          # -(-1)^n
            for (i, s, e, toff, tr) in self.blocks[n + 1]:
                j = i + n + 1
                Cj = D.term(j).idem_blocks[e][1]
                if (i, s) in src:
                    off, r = src[(i, s)]
                    Bsrc = D.term(j - 1).idem_blocks[e][0]
                    M[toff:toff + tr, off:off + r] = F.matmul(Cj, F.matmul(D.diff(j - 1), Bsrc))
                if i + 1 in P.terms:
                    Pi, Pn = P.term(i), P.terms[i + 1]
                    y = P.diff(i)[:, Pi.roots[s]]
                    if la.is_zero(y):
                        continue
                    for s2, e2 in enumerate(Pn.summands):
                        if (i + 1, s2) not in src:
                            continue
                        seg = y[Pn.offsets[s2]:Pn.offsets[s2 + 1]]
                        nz = np.nonzero(seg)[0]
                        if not len(nz):
                            continue
                        off, r = src[(i + 1, s2)]
                        Wt = self.W(e2, j)
                        img = F.reduce(np.tensordot(seg[nz], Wt[nz], axes=1))
                        M[toff:toff + tr, off:off + r] = F.reduce(
                            M[toff:toff + tr, off:off + r] + sign * F.matmul(Cj, img))
        M = F.reduce(M)
        self._delta[n] = M
        return M

    def ext_dim(self, n):
        F = self.F
        return self.dim(n) - la.rank(self.delta(n), F) - la.rank(self.delta(n - 1), F)

    def ext_table(self, degrees=None):
        lo, hi = (self.nmin, self.nmax) if degrees is None else degrees
        out = {}
        for n in range(lo, hi + 1):
            h = self.ext_dim(n)
            if h:
                out[n] = h
        return out

    def to_maps(self, n, vec):
        """Degree-n element -> {i: matrix P^i -> D^{i+n}}."""
        F = self.F
        out = {}
        for (i, s, e, off, r) in self.blocks[n]:
            j = i + n
            Pi = self.P.terms[i]
            if i not in out:
                out[i] = F.zeros((self.D.term(j).dim, Pi.dim))
            c = vec[off:off + r]
            Wt = self.W(e, j)
            out[i][:, Pi.offsets[s]:Pi.offsets[s + 1]] = F.reduce(np.tensordot(Wt, c, axes=([2], [0]))).T
        return out

    def from_maps(self, n, maps):
        F = self.F
        v = F.zeros(self.dim(n))
        for (i, s, e, off, r) in self.blocks[n]:
            f = maps.get(i)
            if f is None:
                continue
            Pi = self.P.terms[i]
            C = self.D.term(i + n).idem_blocks[e][1]
            v[off:off + r] = F.matmul(C, f[:, Pi.roots[s]])
        return v

    def cohomology_basis(self, n):
        """(cocycle representatives as columns, function: cocycle -> H^n coordinates)."""
        F = self.F
        Z = la.nullspace(self.delta(n), F) if self.dim(n) else F.zeros((0, 0))
        Bm = la.image_basis(self.delta(n - 1), F) if self.dim(n - 1) and self.dim(n) else F.zeros((self.dim(n), 0))
        R = la.extend_mod(Bm, Z, F) if Z.shape[1] else Z
        full = np.concatenate([Bm, R], axis=1)
        sub = la.Subspace(full, F, independent=True)
        k = Bm.shape[1]

        def coords(z):
            return sub.coords(z)[k:]
        return R, coords

    def as_complex(self) -> Complex:
        F = self.F
        terms = {n: vector_space(F, d) for n, d in self.dims.items() if d}
        diffs = {n: self.delta(n) for n in self.dims if self.dim(n) and self.dim(n + 1)}
        return Complex(field_algebra(F), terms, diffs, check=False)


def _need_replacement(C, degrees, D, cutoff):
    """Replacement deep enough for Ext^n(C, D), n <= degrees[1]."""
    if degrees is None:
        R = replacement_cached(C, cutoff=cutoff)
        if not R.terminated:
            raise Undetermined("projective replacement did not terminate; give an explicit degree range")
        return R
    lowest = (D.lo if not D.is_zero() else 0) - degrees[1] - 1
    R = replacement_cached(C, cutoff=cutoff, lowest=lowest)
    return R


def rhom(C: Complex, D: Complex, degrees=None, cutoff=10) -> HomComplex:
    R = _need_replacement(C, degrees, D, cutoff)
    if not R.terminated and R.lowest > (D.lo - degrees[1] - 1):
        raise Undetermined("cutoff too small for the requested degrees")
    return HomComplex(R.P, D, degrees)


class ExtTable(dict):
    """{i: dim Ext^i}; missing degrees are zero."""

    def __missing__(self, key):
        return 0

    def euler(self):
        return sum((-1) ** (i % 2) * d for i, d in self.items())

    def to_json(self):
        return {str(k): v for k, v in sorted(self.items())}


def ext_dims(C: Complex, D: Complex, degrees=None, cutoff=10) -> ExtTable:
    if C.is_zero() or D.is_zero():
        return ExtTable()
    H = rhom(C, D, degrees, cutoff)
    return ExtTable(H.ext_table(degrees))


# ---------------------------------------------------------------------------
# endomorphism algebra and automorphisms

@dataclass
class EndAlgebra:
    algebra: TableAlgebra | None     # H^0(REnd), None when C is acyclic
    ext: ExtTable
    reps: list                       # chain maps P -> P representing the basis
    replacement: Replacement
    hom: HomComplex = None

    @property
    def degenerate(self):
        return self.algebra is None

    @property
    def dim(self):
        return 0 if self.algebra is None else self.algebra.dim


def end_algebra(C: Complex, cutoff=10) -> EndAlgebra:
    F = C.field
    R = replacement_cached(C, cutoff=cutoff)
    if not R.terminated:
        raise Undetermined("endomorphism algebra needs a terminating projective replacement")
    P = R.P
    if P.is_zero():
        return EndAlgebra(None, ExtTable(), [], R)
    H = HomComplex(P, P)
    ext = ExtTable(H.ext_table())
    Rb, coords = H.cohomology_basis(0)
    m = Rb.shape[1]
    maps = [H.to_maps(0, Rb[:, j]) for j in range(m)]
    L = F.zeros((m, m, m))
    for a in range(m):
        for b in range(m):
            comp = {i: F.matmul(maps[a][i], maps[b][i]) for i in maps[a] if i in maps[b]}
            L[a, :, b] = coords(H.from_maps(0, comp))
    ident = {i: F.eye(M.dim) for i, M in P.terms.items() if M.dim}
    unit = coords(H.from_maps(0, ident))
    alg = TableAlgebra(F, L, unit, labels=[f"f{j}" for j in range(m)], name="End")
    if m <= 40:
        alg.audit()
    chain_maps = [ChainMap(P, P, mp, check=False) for mp in maps]
    return EndAlgebra(alg, ext, chain_maps, R, H)


def _top_maps(P: Complex):
    """Per degree (Q, T): projection of P^i onto its top and a section."""
    F = P.field
    out = {}
    basic = all(k != "other" for k in P.algebra.kinds)
    for i, M in P.terms.items():
        if not M.dim:
            continue
        if basic:
            roots = M.roots
            Q = F.zeros((len(roots), M.dim))
            for a, r in enumerate(roots):
                Q[a, r] = 1
            out[i] = Q
        else:
            J = M.radical_subspace()
            Q, _ = la.quotient_projection(J, M.dim, F)
            out[i] = Q
    return out


def _induced_top(P, tops, f, sections):
    F = P.field
    blocks = []
    for i in sorted(tops):
        blocks.append(F.matmul(tops[i], F.matmul(f[i], sections[i])))
    return la.block_diag(blocks, F)


def aut_order(C: Complex, cutoff=10, rng=None, end: EndAlgebra = None) -> int:
    """Order of the automorphism group of C in the derived category (over F_p).
    ``end`` may carry an already computed end_algebra(C)."""
    F = C.field
    if not F.p:
        raise ValidationError("automorphism counts need a finite field")
    if C.is_acyclic():
        return 1
    E = end if end is not None else end_algebra(C, cutoff)
    P = E.replacement.P
    tops = _top_maps(P)
    sections = {}
    for i, Q in tops.items():
        M = P.terms[i]
        if all(k != "other" for k in P.algebra.kinds):
            sections[i] = Q.T.copy()
        else:
            J = M.radical_subspace()
            _, T = la.quotient_projection(J, M.dim, F)
            sections[i] = T
    imgs = [_induced_top(P, tops, f, sections) for f in E.reps]
    flat = np.stack([x.reshape(-1) for x in imgs], axis=1)
    r = la.rank(flat, F)
    kernel_dim = E.dim - r
    return F.p ** kernel_dim * matrix_algebra_units(imgs, F, rng=rng)
