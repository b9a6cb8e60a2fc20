"""Finite-dimensional left modules given by the action of algebra generators."""
from __future__ import annotations

from functools import cached_property

import numpy as np

from . import exact_linalg as la
from .errors import BoundExceeded, ValidationError
from .fdalgebra import ENUM_BOUND, FinDimAlgebra, TensorAlgebra


class ModuleRep:
    """A left module: ``action[k]`` is the matrix of generator k."""

    def __init__(self, algebra: FinDimAlgebra, dim: int, action, check=False):
        self.algebra = algebra
        self.dim = int(dim)
        F = algebra.field
        if len(action) != len(algebra.gens):
            raise ValidationError("one action matrix per generator expected")
        self.action = [m if isinstance(m, np.ndarray) and m.dtype == F.dtype else F.asarray(m, (self.dim, self.dim))
                       for m in action]
        for m in self.action:
            if m.shape != (self.dim, self.dim):
                raise ValidationError("action matrices must be dim x dim")
        if check:
            self.audit()

    @property
    def field(self):
        return self.algebra.field

    def act(self, k):
        return self.action[k]

    @classmethod
    def zero(cls, A):
        z = A.__dict__.get("_zero_module")
        if z is None:
            z = cls(A, 0, [A.field.zeros((0, 0)) for _ in A.gens])
            A.__dict__["_zero_module"] = z
        return z

    def is_zero(self):
        return self.dim == 0

    # constructions --------------------------------------------------------
    @classmethod
    def from_quiver_rep(cls, A, dims, arrow_mats, check=True):
        """Representation of the path algebra's quiver: a space per vertex and a map
        M_a: M_source -> M_target per arrow."""
        q = A.quiver
        F = A.field
        dims = [int(x) for x in dims]
        if len(dims) != q.n_vertices or len(arrow_mats) != len(q.arrows):
            raise ValidationError("representation does not match the quiver")
        off = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        n = int(off[-1])
        action = []
        for v in range(q.n_vertices):
            m = F.zeros((n, n))
            for i in range(off[v], off[v + 1]):
                m[i, i] = 1
            action.append(m)
        for (name, s, t), mat in zip(q.arrows, arrow_mats):
            mat = F.asarray(mat, (dims[t], dims[s])) if dims[t] * dims[s] else F.zeros((dims[t], dims[s]))
            m = F.zeros((n, n))
            m[off[t]:off[t + 1], off[s]:off[s + 1]] = mat
            action.append(m)
        return cls(A, n, action, check=check)

    def vertex_dims(self):
        A = self.algebra
        return [la.rank(self.action[i], self.field) if self.dim else 0 for i in range(A.n_idem)]

    def arrow_blocks(self):
        """For path-algebra modules: per-vertex offsets and per-arrow matrices."""
        A = self.algebra
        q = A.quiver
        blocks = self.idem_blocks
        mats = []
        for k, (_, s, t) in enumerate(q.arrows):
            g = q.n_vertices + k
            Bs, _ = blocks[s]
            _, Ct = blocks[t]
            mats.append(self.field.matmul(Ct, self.field.matmul(self.action[g], Bs)))
        return mats

    def direct_sum(self, *others):
        mods = (self,) + others
        F = self.field
        action = [la.block_diag([m.action[k] for m in mods], F) for k in range(len(self.action))]
        return ModuleRep(self.algebra, sum(m.dim for m in mods), action)

    def submodule(self, S):
        """Module on span(S) (S with independent columns spanning a submodule)."""
        F = self.field
        sub = la.Subspace(S, F, independent=True)
        action = [sub.coords(F.matmul(m, S)) for m in self.action]
        return ModuleRep(self.algebra, S.shape[1], action)

    def quotient(self, S):
        """(M/span(S), projection matrix, section matrix)."""
        F = self.field
        Q, T = la.quotient_projection(S, self.dim, F)
        action = [F.matmul(Q, F.matmul(m, T)) for m in self.action]
        return ModuleRep(self.algebra, T.shape[1], action), Q, T

    def spin(self, S):
        """Basis of the smallest submodule containing the columns of S."""
        F = self.field
        ech = la.Echelon(self.dim, F)
        new = ech.add_many(S)
        while new.shape[1]:
            cand = np.concatenate([F.matmul(m, new) for m in self.action], axis=1)
            new = ech.add_many(cand)
        return ech.vectors

    def radical_subspace(self, S=None):
        """Basis of J*N where N = span(S) is a submodule (default: the whole module)."""
        F = self.field
        A = self.algebra
        if S is None:
            S = F.eye(self.dim)
        if not S.shape[1]:
            return S
        imgs = [F.matmul(self.action[k], S) for k, kind in enumerate(A.kinds) if kind == "rad"]
        if not imgs:
            return F.zeros((self.dim, 0))
        return self.spin(np.concatenate(imgs, axis=1))

    def top(self):
        J = self.radical_subspace()
        return self.quotient(J)[0]

    # element actions ---------------------------------------------------------
    @cached_property
    def _word_mats(self):
        tree = self.algebra_word_tree
        F = self.field
        mats = []
        for k in range(len(tree.parent)):
            if tree.parent[k] < 0:
                mats.append(F.eye(self.dim))
            else:
                mats.append(F.matmul(self.action[tree.gen[k]], mats[tree.parent[k]]))
        return mats

    @property
    def algebra_word_tree(self):
        A = self.algebra
        if not hasattr(A, "_word_tree"):
            A._word_tree = SpinTree(A, A.unit)
            if A._word_tree.dim != A.dim:
                raise ValidationError("generators do not generate the algebra")
        return A._word_tree

    def element_action(self, x):
        F = self.field
        tree = self.algebra_word_tree
        c = tree.coords(F.asarray(x))
        out = F.zeros((self.dim, self.dim))
        for k in np.nonzero(c)[0]:
            out = out + c[k] * self._word_mats[k]
        return F.reduce(out)

    def audit(self):
        """Check that the generator actions define a unital module structure."""
        A = self.algebra
        F = self.field
        if isinstance(A, TensorAlgebra):
            left, right = restrict_tensor(self)
            left.audit()
            right.audit()
            for a in left.action:
                for b in right.action:
                    if not la.mat_equal(F.matmul(a, b), F.matmul(b, a)):
                        raise ValidationError("left and right actions do not commute")
            return True
        if A.dim > 64:
            return False
        E = F.eye(A.dim)
        acts = [self.element_action(E[:, i]) for i in range(A.dim)]
        if not la.mat_equal(self.element_action(A.unit), F.eye(self.dim)):
            raise ValidationError("unit does not act as identity")
        for i in range(A.dim):
            for j in range(A.dim):
                lhs = self.element_action(A.mul(E[:, i], E[:, j]))
                if not la.mat_equal(lhs, F.matmul(acts[i], acts[j])):
                    raise ValidationError("action is not multiplicative")
        for k, g in enumerate(A.gens):
            if not la.mat_equal(self.element_action(g), self.action[k]):
                raise ValidationError("generator actions are inconsistent with the algebra")
        return True

    # idempotent block data ----------------------------------------------------
    @cached_property
    def idem_blocks(self):
        """For each idempotent generator e: (B, C) with B a basis of eM (columns)
        and C the coordinate map M -> eM, v |-> coords(e v)."""
        F = self.field
        out = []
        for k in range(self.algebra.n_idem):
            e = self.action[k]
            B = la.image_basis(e, F) if self.dim else F.zeros((0, 0))
            if B.shape[1]:
                sub = la.Subspace(B, F, independent=True)
                C = F.matmul(sub._inv, e[sub.rows])
            else:
                C = F.zeros((0, self.dim))
            out.append((B, C))
        return out

    @cached_property
    def gen_blocks(self):
        """For each non-idempotent generator: {(l, k): C_l g B_k} for nonzero blocks."""
        F = self.field
        A = self.algebra
        blocks = self.idem_blocks
        out = {}
        for g in range(A.n_idem, len(A.gens)):
            d = {}
            for k, (Bk, _) in enumerate(blocks):
                if not Bk.shape[1]:
                    continue
                img = F.matmul(self.action[g], Bk)
                if la.is_zero(img):
                    continue
                for l, (_, Cl) in enumerate(blocks):
                    if not Cl.shape[0]:
                        continue
                    m = F.matmul(Cl, img)
                    if not la.is_zero(m):
                        d[(l, k)] = m
            out[g] = d
        return out

    def block_dims(self):
        return tuple(B.shape[1] for B, _ in self.idem_blocks)

    def __repr__(self):
        return f"<ModuleRep dim={self.dim} over {self.algebra.name}>"


def restrict_tensor(M: ModuleRep):
    """Restrictions of an A⊗B-module to A (left) and to B (right)."""
    T = M.algebra
    F = M.field

    def combo(exp):
        out = F.zeros((M.dim, M.dim))
        for k, c in exp:
            out = out + c * M.action[k]
        return F.reduce(out)

    left = ModuleRep(T.A, M.dim, [combo(T.left_gen_expansion(k)) for k in range(len(T.A.gens))])
    right = ModuleRep(T.B, M.dim, [combo(T.right_gen_expansion(k)) for k in range(len(T.B.gens))])
    return left, right


class SpinTree:
    """Basis of A*v found by breadth-first multiplication by generators.  Basis
    vector k equals gen[k] * (basis vector parent[k]); vector 0 is v itself."""

    def __init__(self, A: FinDimAlgebra, v):
        F = A.field
        self.algebra = A
        ech = la.Echelon(A.dim, F)
        parent, gen = [-1], [-1]
        layer = ech.add_many(v.reshape(-1, 1))
        layer_ids = [0]
        if not layer.shape[1]:
            raise ValidationError("zero start vector")
        while layer.shape[1]:
            cands, origin = [], []
            for g in range(len(A.gens)):
                img = A.gen_action(g, layer)
                cands.append(img)
                origin.extend((pid, g) for pid in layer_ids)
            C = np.concatenate(cands, axis=1)
            before = ech.vectors.shape[1]
            X = ech.reduce(C)
            keep = la.independent_columns(X, F) if not la.is_zero(X) else []
            new = ech.add_many(C[:, keep])
            assert new.shape[1] == len(keep)
            layer_ids = []
            for j, c in enumerate(keep):
                parent.append(origin[c][0])
                gen.append(origin[c][1])
                layer_ids.append(before + j)
            layer = new
        self.vectors = ech.vectors
        self.parent, self.gen = parent, gen
        self.dim = self.vectors.shape[1]
        self._sub = la.Subspace(self.vectors, F, independent=True)

    def coords(self, x):
        return self._sub.coords(x)


class IndecomposableProjective:
    """P = A e for an idempotent generator e, on the spin-tree basis."""

    def __init__(self, A: FinDimAlgebra, idem: int):
        self.algebra = A
        self.idem = idem
        self.tree = SpinTree(A, A.gens[idem])
        self.dim = self.tree.dim
        V = self.tree.vectors
        self.action = [self.tree.coords(A.gen_action(g, V)) for g in range(len(A.gens))]
        self.label = A.labels[int(np.nonzero(A.gens[idem])[0][0])] if A.n_idem else str(idem)


class ProjectiveModule(ModuleRep):
    """Direct sum of indecomposable projectives A e_s, one per entry of ``summands``."""

    def __init__(self, A: FinDimAlgebra, summands):
        self.summands = tuple(int(s) for s in summands)
        self.parts = [A.indecomposable_projective(s) for s in self.summands]
        F = A.field
        offs = [0]
        for p in self.parts:
            offs.append(offs[-1] + p.dim)
        self.offsets = offs
        action = [la.block_diag([p.action[k] for p in self.parts], F) if self.parts
                  else F.zeros((0, 0)) for k in range(len(A.gens))]
        super().__init__(A, offs[-1], action)

    @property
    def roots(self):
        return self.offsets[:-1]

    def evaluate(self, X: ModuleRep, images):
        """Matrix of the map P -> X sending root s to images[:, s] (which must lie in e_s X)."""
        F = X.field
        out = F.zeros((X.dim, self.dim))
        for s, part in enumerate(self.parts):
            U = tree_images(part, X, images[:, s:s + 1])
            out[:, self.offsets[s]:self.offsets[s + 1]] = U[:, :, 0].T
        return out


def tree_images(part: IndecomposableProjective, X: ModuleRep, M):
    """Array W with W[k] = (word k) applied to the columns of M, shape (d, dim X, m)."""
    F = X.field
    tree = part.tree
    d = tree.dim
    W = np.empty((d, X.dim, M.shape[1]), dtype=F.dtype)
    W[0] = M
    for k in range(1, d):
        W[k] = F.matmul(X.action[tree.gen[k]], W[tree.parent[k]])
    return W


def regular_module(A: FinDimAlgebra) -> ModuleRep:
    F = A.field
    E = F.eye(A.dim)
    return ModuleRep(A, A.dim, [A.gen_action(k, E) for k in range(len(A.gens))])


def simples_and_projectives(A: FinDimAlgebra):
    """One (simple, indecomposable projective) pair per isomorphism class."""
    if not A.n_idem:
        raise ValidationError("algebra has no idempotent data; rebuild it with fdalgebra.with_structure")
    out = []
    for i in A.class_reps():
        P = ProjectiveModule(A, [i])
        out.append((P.top(), P))
    return out


# ---------------------------------------------------------------------------
# homomorphisms

def _check_same(M, N):
    if M.algebra is not N.algebra:
        M.field.check(N.field)
        if M.algebra.dim != N.algebra.dim or len(M.algebra.gens) != len(N.algebra.gens):
            raise ValidationError("modules over different algebras")


def hom_space(M: ModuleRep, N: ModuleRep):
    """Basis of Hom_A(M, N) as a list of (dim N x dim M) matrices."""
    _check_same(M, N)
    X = hom_parameters(M, N)
    return [X.to_matrix(j) for j in range(X.dim)]


class HomParams:
    """Hom_A(M, N) parametrised by blocks X_k : e_k M -> e_k N."""

    def __init__(self, M, N, K, layout):
        self.M, self.N, self.K, self.layout = M, N, K, layout
        self.dim = K.shape[1]

    def to_matrix(self, j=None, vec=None):
        F = self.M.field
        v = self.K[:, j] if vec is None else vec
        f = F.zeros((self.N.dim, self.M.dim))
        if self.layout is None:
            return F.reduce(v.reshape(self.N.dim, self.M.dim))
        for (k, off, nk, mk) in self.layout:
            Xk = v[off:off + nk * mk].reshape(nk, mk)
            BN = self.N.idem_blocks[k][0]
            CM = self.M.idem_blocks[k][1]
            f = f + F.matmul(BN, F.matmul(Xk, CM))
        return F.reduce(f)

    def combination(self, c):
        return self.to_matrix(vec=self.M.field.matmul(self.K, c))


def hom_parameters(M: ModuleRep, N: ModuleRep) -> HomParams:
    F = M.field
    A = M.algebra
    if M.dim == 0 or N.dim == 0:
        return HomParams(M, N, F.zeros((0, 0)), [])
    if not A.n_idem:
        rows = []
        for a, b in zip(M.action, N.action):
            rows.append(F.reduce(np.kron(b, F.eye(M.dim)) - np.kron(F.eye(N.dim), a.T)))
        K = la.nullspace(np.concatenate(rows, axis=0), F)
        return HomParams(M, N, K, None)
    bm, bn = M.block_dims(), N.block_dims()
    layout, off = [], 0
    index = {}
    for k in range(A.n_idem):
        if bm[k] and bn[k]:
            layout.append((k, off, bn[k], bm[k]))
            index[k] = (off, bn[k], bm[k])
            off += bn[k] * bm[k]
    nvar = off
    if nvar == 0:
        return HomParams(M, N, F.zeros((0, 0)), layout)
    rows = []
    for g in range(A.n_idem, len(A.gens)):
        gm, gn = M.gen_blocks[g], N.gen_blocks[g]
        for (l, k) in set(gm) | set(gn):
            nl, mk = bn[l], bm[k]
            if not nl or not mk:
                continue
            R = F.zeros((nl * mk, nvar))
            if (l, k) in gn and k in index:
                o, nk, _ = index[k]
                R[:, o:o + nk * mk] = np.kron(gn[(l, k)], F.eye(mk))
            if (l, k) in gm and l in index:
                o, _, ml = index[l]
                R[:, o:o + nl * ml] = F.reduce(R[:, o:o + nl * ml] - np.kron(F.eye(nl), gm[(l, k)].T))
            rows.append(R)
    if rows:
        K = la.nullspace(np.concatenate(rows, axis=0), F)
    else:
        K = F.eye(nvar)
    return HomParams(M, N, K, layout)


def is_module_map(f, M: ModuleRep, N: ModuleRep) -> bool:
    F = M.field
    return all(la.mat_equal(F.matmul(b, f), F.matmul(f, a)) for a, b in zip(M.action, N.action))


def _invertible_in_span(H: HomParams, rng, bound=ENUM_BOUND, tries=64):
    """Find an invertible element of span(Hom basis); (found, witness or None)."""
    F = H.M.field
    n, h = H.M.dim, H.dim
    for _ in range(tries if F.is_rational else 16):
        c = F.random(rng, h, bound=max(3, 2 * n))
        f = H.combination(c)
        if la.rank(f, F) == n:
            return True, f
    if F.is_rational:
        return None, None
    p = F.p
    if p ** h > bound:
        return None, None
    mats = np.stack([H.to_matrix(j).astype(np.int64) for j in range(h)]).reshape(h, n * n)
    total = p ** h
    chunk = 1 << 14
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = np.empty((len(idx), h), dtype=np.int64)
        rest = idx.copy()
        for k in range(h):
            digits[:, k] = rest % p
            rest //= p
        batch = (digits @ mats % p).reshape(-1, n, n)
        ok = la.batch_invertible(batch, p)
        if ok.any():
            return True, F.asarray(batch[int(np.argmax(ok))])
    return False, None


def is_isomorphic(M: ModuleRep, N: ModuleRep, rng=None, bound=ENUM_BOUND):
    """(answer, witness): answer is True, False, or None for undecided."""
    _check_same(M, N)
    rng = rng if rng is not None else np.random.default_rng(0)
    if M.dim != N.dim:
        return False, None
    if M.dim == 0:
        return True, M.field.zeros((0, 0))
    if M.algebra.n_idem and M.block_dims() != N.block_dims():
        return False, None
    H = hom_parameters(M, N)
    if H.dim == 0:
        return False, None
    if H.dim != hom_parameters(M, M).dim or H.dim != hom_parameters(N, N).dim:
        return False, None
    found, w = _invertible_in_span(H, rng, bound)
    return found, w


def module_invariants(M: ModuleRep):
    """Cheap isomorphism invariants (used to bucket before searching)."""
    F = M.field
    key = [M.dim, M.block_dims() if M.algebra.n_idem else ()]
    key.append(tuple(la.rank(a, F) for a in M.action))
    J = M.radical_subspace()
    key.append(J.shape[1])
    key.append(hom_parameters(M, M).dim)
    return tuple(key)


# ---------------------------------------------------------------------------
# JSON

def module_to_json(M: ModuleRep):
    F = M.field
    A = M.algebra
    if hasattr(A, "quiver"):
        return {"dims": M.vertex_dims(), "arrows": [F.matrix_to_json(m) for m in M.arrow_blocks()]}
    E = F.eye(A.dim)
    return {"dim": M.dim, "action": [F.matrix_to_json(M.element_action(E[:, i])) for i in range(A.dim)]}


def module_from_json(A: FinDimAlgebra, d) -> ModuleRep:
    F = A.field
    try:
        if "dims" in d:
            if not hasattr(A, "quiver"):
                raise ValidationError("dims/arrows modules need a path algebra")
            dims = d["dims"]
            q = A.quiver
            mats = []
            for (name, s, t), m in zip(q.arrows, d["arrows"]):
                mats.append(F.asarray(m, (int(dims[t]), int(dims[s]))) if dims[s] * dims[t] else
                            F.zeros((int(dims[t]), int(dims[s]))))
            return ModuleRep.from_quiver_rep(A, dims, mats)
        n = int(d["dim"])
        acts = [F.asarray(m, (n, n)) if n else F.zeros((0, 0)) for m in d["action"]]
        if len(acts) != A.dim:
            raise ValidationError("one action matrix per basis element expected")
        action = []
        for g in A.gens:
            m = F.zeros((n, n))
            for i in np.nonzero(g)[0]:
                m = m + g[i] * acts[i]
            action.append(F.reduce(m))
        M = ModuleRep(A, n, action)
        if A.dim <= 64:
            E = F.eye(A.dim)
            for i in range(A.dim):
                if not la.mat_equal(M.element_action(E[:, i]), acts[i]):
                    raise ValidationError("action matrices are not a module structure")
            M.audit()
        return M
    except (KeyError, TypeError) as e:
        raise ValidationError(f"bad module JSON: {e}") from None
