"""Independent recomputations used by the acceptance checks.

Nothing here goes through projective_replacement or HomComplex.  Hom spaces come
from the plain intertwiner equations, resolutions from the standard two-term
resolution of a quiver representation, and automorphisms and orbits from
exhaustive enumeration."""
from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from . import exact_linalg as la
from .complexes import ChainMap, Complex
from .errors import BoundExceeded
from .modules import ModuleRep


# ---------------------------------------------------------------------------
# Hom spaces and Hom complexes

def _kron(a, b):
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(a.shape[0] * b.shape[0], -1)


def hom_basis(M: ModuleRep, N: ModuleRep):
    """Basis of Hom_A(M, N) from X a_M(g) = a_N(g) X for every generator g."""
    F = M.field
    m, n = M.dim, N.dim
    if not m or not n:
        return []
    cache = M.__dict__.setdefault("_oracle_homs", {})
    hit = cache.get(id(N))
    if hit is not None and hit[0] is N:
        return hit[1]
    rows = []
    for aM, aN in zip(M.action, N.action):
        # vec is row-major: vec(X a) = (I ⊗ a^T) vec X, vec(a X) = (a ⊗ I) vec X
        rows.append(F.reduce(_kron(F.eye(n), aM.T) - _kron(aN, F.eye(m))))
    K = la.nullspace(np.vstack(rows), F)
    out = [K[:, j].reshape(n, m) for j in range(K.shape[1])]
    cache[id(N)] = (N, out)
    return out


def _coords(basis_mat, v, F):
    x = la.solve(basis_mat, v, F)
    if x is None:
        raise AssertionError("not in the span")
    return x


class PlainHom:
    """Hom^n(P, D) = ⊕_k Hom_A(P^k, D^{k+n}) with δf = d f - (-1)^n f d."""

    def __init__(self, P: Complex, D: Complex, degrees=None):
        self.P, self.D = P, D
        self.F = P.field
        self.blocks = {}
        want = None if degrees is None else set(range(min(degrees) - 1, max(degrees) + 2))
        for k in P.degrees():
            for j in D.degrees():
                if want is not None and j - k not in want:
                    continue
                B = hom_basis(P.term(k), D.term(j))
                if B:
                    self.blocks[(k, j)] = B

    def basis(self, n):
        out = []
        for (k, j), B in sorted(self.blocks.items()):
            if j - k == n:
                out.extend((k, f) for f in B)
        return out

    def _flat(self, n, maps):
        parts = []
        for k in self.P.degrees():
            if k + n in self.D.degrees() and (k, k + n) in self.blocks:
                parts.append(maps.get(k, self.F.zeros((self.D.term(k + n).dim, self.P.term(k).dim))).ravel())
        return np.concatenate(parts) if parts else self.F.zeros(0)

    def delta(self, n):
        F = self.F
        src = self.basis(n)
        tgt = self.basis(n + 1)
        if not src or not tgt:
            return F.zeros((len(tgt), len(src)))
        T = np.stack([self._flat(n + 1, {k: f}) for k, f in tgt], axis=1)
        sign = -1 if n % 2 else 1
        imgs = []
        for k, f in src:
            out = {}
            # (d_D f) lands in Hom(P^k, D^{k+n+1})
            dD = self.D.diff(k + n)
            if dD.size:
                out[k] = F.matmul(dD, f)
            # (f d_P) lands in Hom(P^{k-1}, D^{k+n})
            dP = self.P.diff(k - 1)
            if dP.size:
                g = F.reduce(-sign * F.matmul(f, dP))
                out[k - 1] = F.reduce(out.get(k - 1, 0) + g) if k - 1 in out else g
            imgs.append(self._flat(n + 1, out))
        return _coords(T, np.stack(imgs, axis=1), F)

    def cohomology_dim(self, n):
        F = self.F
        dim = len(self.basis(n))
        r_out = la.rank(self.delta(n), F) if dim else 0
        r_in = la.rank(self.delta(n - 1), F) if len(self.basis(n - 1)) and dim else 0
        return dim - r_out - r_in


# ---------------------------------------------------------------------------
# standard resolution over a path algebra

def _left_ideal(A, v):
    """A e_v as a module, with its basis inside A."""
    F = A.field
    e = A.gens[v]
    R = F.reduce(np.tensordot(A.table, e, axes=([2], [0])))   # R[i, k] = coefficient of b_k in b_i e
    B = la.image_basis(R.T, F)
    action = []
    for g in A.gens:
        L = A.left_matrix(g)
        action.append(np.stack([_coords(B, F.matmul(L, B[:, j]), F) for j in range(B.shape[1])], axis=1)
                      if B.shape[1] else F.zeros((0, 0)))
    return ModuleRep(A, B.shape[1], action), B


class _StdRes:
    """Q0(M) -> M and Q1(M) -> Q0(M) for a quiver representation M."""

    def __init__(self, A):
        self.A = A
        self.F = A.field
        q = A.quiver
        ideals = A.__dict__.get("_oracle_ideals")
        if ideals is None:
            ideals = [_left_ideal(A, v) for v in range(q.n_vertices)]
            A.__dict__["_oracle_ideals"] = ideals
        self.ideals = ideals
        self._built = {}

    def vertex_basis(self, M, v):
        return la.image_basis(M.action[v], self.F)

    def layout(self, M, verts):
        """Summands (vertex of the ideal, basis of e_w M for w the tensored vertex, offset)."""
        out, off = [], 0
        for ideal_v, w in verts:
            Bw = self.vertex_basis(M, w)
            P, _ = self.ideals[ideal_v]
            out.append((ideal_v, Bw, off))
            off += P.dim * Bw.shape[1]
        return out, off

    def q0_verts(self):
        return [(v, v) for v in range(self.A.quiver.n_vertices)]

    def q1_verts(self):
        return [(t, s) for (_, s, t) in self.A.quiver.arrows]

    def module(self, M, verts):
        key = (id(M), tuple(verts))
        if key not in self._built:
            self._built[key] = (M, self._module(M, verts))
        return self._built[key][1]

    def _module(self, M, verts):
        F = self.F
        lay, n = self.layout(M, verts)
        action = []
        for g in range(len(self.A.gens)):
            parts = []
            for ideal_v, Bw, _ in lay:
                P, _ = self.ideals[ideal_v]
                parts.append(np.kron(P.action[g], F.eye(Bw.shape[1])))
            action.append(la.block_diag(parts, F) if parts else F.zeros((0, 0)))
        return ModuleRep(self.A, n, action), lay

    def augmentation(self, M):
        """ε: Q0(M) -> M, p ⊗ m -> p m."""
        F = self.F
        Q0, lay = self.module(M, self.q0_verts())
        cols = []
        for ideal_v, Bw, _ in lay:
            P, B = self.ideals[ideal_v]
            for i in range(P.dim):
                act = M.element_action(B[:, i])
                for j in range(Bw.shape[1]):
                    cols.append(F.matmul(act, Bw[:, j]))
        return (np.stack(cols, axis=1) if cols else F.zeros((M.dim, 0))), Q0

    def delta(self, M):
        """Q1(M) -> Q0(M): p ⊗ m -> p a ⊗ m - p ⊗ a m on the summand of arrow a."""
        F = self.F
        A = self.A
        Q0, lay0 = self.module(M, self.q0_verts())
        Q1, lay1 = self.module(M, self.q1_verts())
        nv = A.quiver.n_vertices
        cols = []
        for a, ((ideal_t, Bs, _), (_, s, t)) in enumerate(zip(lay1, A.quiver.arrows)):
            P, B = self.ideals[ideal_t]
            arrow = A.gens[nv + a]
            Ra = F.reduce(np.tensordot(A.table, arrow, axes=([2], [0]))).T   # right multiplication by a
            _, Bs0, off_s = lay0[s]
            _, Bt0, off_t = lay0[t]
            Ps, Bps = self.ideals[s]
            aM = M.action[nv + a]
            for i in range(P.dim):
                pa = _coords(Bps, F.matmul(Ra, B[:, i]), F)
                for j in range(Bs.shape[1]):
                    col = F.zeros(Q0.dim)
                    m = _coords(Bs0, Bs[:, j], F)           # same vertex basis, so a unit vector
                    col[off_s:off_s + Ps.dim * Bs0.shape[1]] = np.kron(pa, m)
                    am = _coords(Bt0, F.matmul(aM, Bs[:, j]), F)
                    e_i = F.zeros(P.dim)
                    e_i[i] = 1
                    seg = slice(off_t, off_t + P.dim * Bt0.shape[1])
                    col[seg] = F.reduce(col[seg] - np.kron(e_i, am))
                    cols.append(col)
        return (np.stack(cols, axis=1) if cols else F.zeros((Q0.dim, 0))), Q0, Q1

    def functor(self, f, M, N, verts):
        """id ⊗ f on ⊕ A e_v ⊗ e_w M."""
        F = self.F
        layM, _ = self.layout(M, verts)
        layN, _ = self.layout(N, verts)
        parts = []
        for (iv, BM, _), (_, BN, _) in zip(layM, layN):
            P, _ = self.ideals[iv]
            if BM.shape[1] and BN.shape[1]:
                c = np.stack([_coords(BN, F.matmul(f, BM[:, j]), F) for j in range(BM.shape[1])], axis=1)
            else:
                c = F.zeros((BN.shape[1], BM.shape[1]))
            parts.append(np.kron(F.eye(P.dim), c))
        return _block_diag_rect(parts, F)


def _block_diag_rect(parts, F):
    r = sum(p.shape[0] for p in parts)
    c = sum(p.shape[1] for p in parts)
    out = F.zeros((r, c))
    i = j = 0
    for p in parts:
        out[i:i + p.shape[0], j:j + p.shape[1]] = p
        i += p.shape[0]
        j += p.shape[1]
    return out


def standard_tot(C: Complex, augment=True):
    """Tot^n = Q0(C^n) ⊕ Q1(C^{n+1}) with its augmentation to C (or None)."""
    A = C.algebra
    F = C.field
    S = _StdRes(A)
    terms, diffs, aug = {}, {}, {}
    lo, hi = C.lo - 1, C.hi
    q0, q1, eps, dl = {}, {}, {}, {}
    for n in range(C.lo, C.hi + 1):
        M = C.term(n)
        dl[n], q0[n], q1[n] = S.delta(M)
        if augment:
            eps[n], _ = S.augmentation(M)
    empty = ModuleRep.zero(A)
    for n in range(lo, hi + 1):
        Q0 = q0.get(n, empty)
        Q1 = q1.get(n + 1, empty)
        terms[n] = Q0.direct_sum(Q1)
        e = F.zeros((C.term(n).dim, terms[n].dim))
        if n in eps:
            e[:, :Q0.dim] = eps[n]
        aug[n] = e
    for n in range(lo, hi):
        src, tgt = terms[n], terms[n + 1]
        D = F.zeros((tgt.dim, src.dim))
        a0 = q0.get(n, empty).dim
        b0 = q0.get(n + 1, empty).dim
        if n in q0 and n + 1 in q0:
            D[:b0, :a0] = S.functor(C.diff(n), C.term(n), C.term(n + 1), S.q0_verts())
        if n + 1 in dl:
            D[:b0, a0:] = dl[n + 1]
        if n + 1 in q1 and n + 2 in q1:
            D[b0:, a0:] = F.reduce(-S.functor(C.diff(n + 1), C.term(n + 1), C.term(n + 2), S.q1_verts()))
        diffs[n] = D
    T = Complex(A, terms, diffs, check=True)
    return T, (ChainMap(T, C, aug, check=True) if augment else None)


def ext_by_standard_resolution(E: Complex, degrees):
    """dim Ext^n(E, E) = dim H^n Hom(Tot E, E)."""
    if E.is_zero():
        return {n: 0 for n in degrees}
    T, _ = standard_tot(E, augment=False)
    H = PlainHom(T, E, degrees)
    return {n: H.cohomology_dim(n) for n in degrees}


# ---------------------------------------------------------------------------
# automorphisms by exhaustion

def _cohomology_coords(C: Complex, n):
    """(cycle basis Z, projection onto H^n in coordinates of Z)."""
    F = C.field
    d = C.diff(n)
    Z = la.nullspace(d, F) if d.size else F.eye(C.term(n).dim)
    if d.shape[0] == 0:
        Z = F.eye(C.term(n).dim)
    Bd = C.diff(n - 1)
    Bim = la.image_basis(Bd, F) if Bd.size else F.zeros((C.term(n).dim, 0))
    return Z, Bim


def _induced_on_h(f, C: Complex, n):
    F = C.field
    Z, Bim = _cohomology_coords(C, n)
    k = Bim.shape[1]
    # basis of Z adapted to the boundaries
    W = la.extend_mod(Bim, Z, F) if k else Z
    full = np.hstack([Bim, W]) if k else W
    h = full.shape[1] - k
    cols = []
    for j in range(h):
        v = F.matmul(f, W[:, j])
        c = _coords(full, v, F)
        cols.append(c[k:])
    return np.stack(cols, axis=1) if cols else F.zeros((0, 0))


def homotopy_aut_count(E: Complex, bound=1 << 20):
    """Count invertible elements of H^0 End(Tot E) by listing them all."""
    F = E.field
    p = F.p
    if E.is_zero():
        return 1
    T, _ = standard_tot(E, augment=False)
    H = PlainHom(T, T)
    Z = la.nullspace(H.delta(0), F) if H.basis(1) else F.eye(len(H.basis(0)))
    Bd = H.delta(-1) if H.basis(-1) else F.zeros((len(H.basis(0)), 0))
    Bim = la.image_basis(Bd, F) if Bd.size else F.zeros((Z.shape[0], 0))
    W = la.extend_mod(Bim, Z, F) if Bim.shape[1] else Z
    h = W.shape[1]
    if h == 0:
        return 1          # acyclic: the zero object has one automorphism
    if p ** h > bound:
        raise BoundExceeded("homotopy class enumeration too large", p ** h)
    # representative chain maps of a basis of H^0, then their action on H^*(T)
    basis0 = H.basis(0)
    reps = []
    for j in range(h):
        maps = {}
        for (k, f), c in zip(basis0, W[:, j]):
            if c:
                maps[k] = F.reduce(maps.get(k, 0) + c * f)
        reps.append(maps)
    degs = [n for n in T.degrees() if T.term(n).dim]
    induced = {}
    for n in degs:
        mats = []
        for maps in reps:
            f = maps.get(n, F.zeros((T.term(n).dim, T.term(n).dim)))
            mats.append(_induced_on_h(f, T, n))
        induced[n] = mats
    count = 0
    coeffs = np.array(list(itertools.product(range(p), repeat=h)), dtype=np.int64).reshape(-1, h)
    ok = np.ones(len(coeffs), dtype=bool)
    for n in degs:
        mats = induced[n]
        if not mats or mats[0].shape[0] == 0:
            continue
        stack = np.stack([m.astype(np.int64) for m in mats])      # (h, r, r)
        batch = np.tensordot(coeffs, stack, axes=1) % p              # (N, r, r)
        ok &= la.batch_invertible(batch, p)
    count = int(ok.sum())
    return count


# ---------------------------------------------------------------------------
# orbits of quiver representations

def _gl_elements(n, p):
    for entries in itertools.product(range(p), repeat=n * n):
        g = np.array(entries, dtype=np.int64).reshape(n, n)
        if n == 0 or la.batch_invertible(g[None], p)[0]:
            yield g


def representation_orbits(quiver, dims, p, bound=1 << 16):
    """GL_d(F_p)-orbits on Rep(Q, d) by exhaustion: list of (representative arrow
    matrices, orbit size)."""
    arrows = quiver.arrows
    shapes = [(dims[t], dims[s]) for (_, s, t) in arrows]
    N = sum(a * b for a, b in shapes)
    if p ** N > bound:
        raise BoundExceeded("representation space too large for the orbit oracle", p ** N)
    group = list(itertools.product(*[list(_gl_elements(d, p)) for d in dims]))
    if len(group) * p ** N > bound * 64:
        raise BoundExceeded("group too large for the orbit oracle", len(group))

    def split(flat):
        out, off = [], 0
        for r, c in shapes:
            out.append(np.array(flat[off:off + r * c], dtype=np.int64).reshape(r, c))
            off += r * c
        return out

    def enc(mats):
        return tuple(int(x) for m in mats for x in m.ravel())

    seen = set()
    orbits = []
    for flat in itertools.product(range(p), repeat=N):
        if flat in seen:
            continue
        X = split(flat)
        orbit = set()
        for g in group:
            Y = []
            for (name, s, t), m in zip(arrows, X):
                ginv = la.inverse(g[s], la.GF(p)) if dims[s] else g[s]
                Y.append((g[t] @ m @ ginv) % p if m.size else m)
            orbit.add(enc(Y))
        seen |= orbit
        orbits.append((X, len(orbit)))
    return orbits


def orbit_count(quiver, caps, p):
    """Number of isomorphism classes of representations with per-vertex dims ≤ caps."""
    total = 0
    for dims in itertools.product(*[range(c + 1) for c in caps]):
        total += len(representation_orbits(quiver, list(dims), p))
    return total


def _is_local(M: ModuleRep):
    """End(M) local: every endomorphism is invertible or nilpotent (exhaustive)."""
    F = M.field
    p = F.p
    B = hom_basis(M, M)
    if not B:
        return False
    stack = np.stack([b.astype(np.int64) for b in B])
    coeffs = np.array(list(itertools.product(range(p), repeat=len(B))), dtype=np.int64)
    ends = np.tensordot(coeffs, stack, axes=1) % p
    inv = la.batch_invertible(ends, p)
    pw = ends.copy()
    for _ in range(M.dim - 1):
        pw = np.einsum("bij,bjk->bik", pw, ends) % p
    nil = ~pw.reshape(len(ends), -1).any(axis=1)
    return bool((inv | nil).all())


def _indecomposable_dims(A, caps):
    """Counter: dimension vector -> number of indecomposable classes within caps."""
    q = A.quiver
    p = A.field.p
    ind = Counter()
    for d in itertools.product(*[range(c + 1) for c in caps]):
        if not sum(d):
            continue
        for X, _ in representation_orbits(q, list(d), p):
            M = ModuleRep.from_quiver_rep(A, list(d), [A.field.asarray(m) for m in X])
            if _is_local(M):
                ind[d] += 1
    return ind


def _multisets_summing(d, ind):
    """Number of multisets of indecomposables (with the given counts per dimension
    vector) whose dimension vectors add up to d, using only proper parts."""
    items = [(v, c) for v, c in sorted(ind.items()) if c]

    def rec(i, rem):
        if not any(rem):
            return 1
        if i == len(items):
            return 0
        v, c = items[i]
        total = 0
        k = 0
        cur = rem
        while all(x >= 0 for x in cur):
            # choose a multiset of size k from c kinds
            total += _multichoose(c, k) * rec(i + 1, cur)
            k += 1
            cur = tuple(a - b for a, b in zip(cur, v))
        return total

    return rec(0, tuple(d))


def _multichoose(c, k):
    from math import comb
    return comb(c + k - 1, k) if c else (1 if k == 0 else 0)


def shifted_multiset_count(A, caps, window):
    """Classes of ⊕ M_i[-i] counted as multisets of shifted indecomposables whose
    per-degree dimension vectors stay within caps."""
    ind = _indecomposable_dims(A, caps)
    per_degree = sum(_multisets_summing(d, ind) for d in itertools.product(*[range(c + 1) for c in caps]))
    a, b = window
    return per_degree ** (b - a + 1)
