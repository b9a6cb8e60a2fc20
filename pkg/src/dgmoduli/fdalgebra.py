"""Finite-dimensional algebras over a prime field or Q.

An algebra is a vector space F^n with a bilinear associative product and a
unit.  Besides the product every algebra carries a list of generators split
into three kinds:

* ``idem``  -- a complete set of orthogonal primitive idempotents (optional),
* ``rad``   -- elements of the Jacobson radical generating it as a two-sided ideal,
* ``other`` -- anything else needed to generate the algebra.

Modules only store the action of these generators, which keeps enveloping
algebras of path algebras workable without materialising their full
structure-constant tables.
"""
from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from . import exact_linalg as la
from .errors import (BoundExceeded, PreconditionError, UnsupportedCharacteristic,
                     ValidationError)
from .exact_linalg import Field

ENUM_BOUND = 1 << 20


class Quiver:
    """A finite quiver.  Arrows are (name, source, target) with vertex names."""

    def __init__(self, vertices, arrows=()):
        self.vertices = [str(v) for v in vertices]
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("vertex names must be unique")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.arrows = []
        names = set()
        for name, s, t in arrows:
            name, s, t = str(name), str(s), str(t)
            if name in names or name in self.index:
                raise ValidationError(f"duplicate name {name!r}")
            if s not in self.index or t not in self.index:
                raise ValidationError(f"arrow {name!r} has an undeclared endpoint")
            names.add(name)
            self.arrows.append((name, self.index[s], self.index[t]))

    @classmethod
    def linear(cls, n):
        """The A_n quiver 1 -> 2 -> ... -> n."""
        vs = [str(i + 1) for i in range(n)]
        return cls(vs, [(f"a{i + 1}", vs[i], vs[i + 1]) for i in range(n - 1)])

    @classmethod
    def random_acyclic(cls, rng, max_vertices=5, max_arrows=6):
        """Random acyclic quiver: arrows go forward in a random vertex order."""
        n = int(rng.integers(1, max_vertices + 1))
        order = [int(x) for x in rng.permutation(n)]
        vs = [str(i + 1) for i in range(n)]
        m = int(rng.integers(0, max_arrows + 1)) if n > 1 else 0
        arrows = []
        for k in range(m):
            i, j = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
            arrows.append((f"a{k + 1}", vs[order[i]], vs[order[j]]))
        return cls(vs, arrows)

    @property
    def n_vertices(self):
        return len(self.vertices)

    def is_acyclic(self) -> bool:
        indeg = [0] * self.n_vertices
        for _, s, t in self.arrows:
            indeg[t] += 1
        stack = [v for v in range(self.n_vertices) if indeg[v] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for _, s, t in self.arrows:
                if s == v:
                    indeg[t] -= 1
                    if indeg[t] == 0:
                        stack.append(t)
        return seen == self.n_vertices

    def paths(self):
        """All directed paths as (source, target, arrow indices in traversal order)."""
        if not self.is_acyclic():
            raise ValidationError("quiver has an oriented cycle: path algebra is infinite-dimensional")
        out = [(v, v, ()) for v in range(self.n_vertices)]
        # length-one paths in arrow order, so arrow k is basis vector n_vertices + k
        frontier = [(a, b, (k,)) for k, (_, a, b) in enumerate(self.arrows)]
        out.extend(frontier)
        while frontier:
            nxt = []
            for s, t, word in frontier:
                for k, (_, a, b) in enumerate(self.arrows):
                    if a == t:
                        nxt.append((s, b, word + (k,)))
            out.extend(nxt)
            frontier = nxt
        return out

    def to_json(self):
        return {"vertices": list(self.vertices),
                "arrows": [{"name": n, "source": self.vertices[s], "target": self.vertices[t]}
                           for n, s, t in self.arrows]}

    @classmethod
    def from_json(cls, d):
        try:
            return cls(d["vertices"], [(a["name"], a["source"], a["target"]) for a in d.get("arrows", [])])
        except (KeyError, TypeError) as e:
            raise ValidationError(f"bad quiver JSON: {e}") from None

    def __eq__(self, other):
        return isinstance(other, Quiver) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash((tuple(self.vertices), tuple(self.arrows)))


class FinDimAlgebra:
    """Base class.  Subclasses implement ``mul`` and ``gen_action``."""

    def __init__(self, field: Field, dim: int, labels, unit, gens, kinds,
                 idem_class=None, radical_hint=None, name="A"):
        if dim < 0 or (dim == 0 and not getattr(self, "_allow_zero", False)):
            raise ValidationError("the zero algebra is not allowed")
        self.field = field
        self.dim = dim
        self.labels = list(labels)
        self.unit = field.asarray(unit)
        self.gens = [field.asarray(g) for g in gens]
        self.kinds = list(kinds)
        n_idem = sum(1 for k in self.kinds if k == "idem")
        if self.kinds[:n_idem] != ["idem"] * n_idem:
            raise ValidationError("idempotent generators must come first")
        self.n_idem = n_idem
        self.idem_class = list(idem_class) if idem_class is not None else list(range(n_idem))
        self.radical_hint = radical_hint
        self.name = name
        self._proj_cache = {}

    # products -----------------------------------------------------------
    def mul(self, x, y):
        raise NotImplementedError

    def gen_action(self, k, V):
        """gen_k * v for each column v of V."""
        g = self.gens[k]
        return np.stack([self.mul(g, V[:, j]) for j in range(V.shape[1])], axis=1) if V.shape[1] else V

    def basis_vector(self, i):
        v = self.field.zeros(self.dim)
        v[i] = 1
        return v

    @cached_property
    def table(self):
        """L[i] = matrix of left multiplication by basis element i."""
        F, n = self.field, self.dim
        L = F.zeros((n, n, n))
        for i in range(n):
            bi = self.basis_vector(i)
            for j in range(n):
                L[i, :, j] = self.mul(bi, self.basis_vector(j))
        return L

    def left_matrix(self, x):
        return self.field.reduce(np.tensordot(x, self.table, axes=1))

    def power(self, x, e):
        out, base = self.unit.copy(), x.copy()
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    @property
    def idempotents(self):
        return self.gens[:self.n_idem]

    @property
    def radical_gens(self):
        return [g for g, k in zip(self.gens, self.kinds) if k == "rad"]

    @property
    def n_classes(self):
        return len(set(self.idem_class))

    def class_reps(self):
        """One idempotent index per isomorphism class of indecomposable projective."""
        seen, reps = set(), []
        for i, c in enumerate(self.idem_class):
            if c not in seen:
                seen.add(c)
                reps.append(i)
        return reps

    # audits ---------------------------------------------------------------
    def audit(self, exhaustive_limit=64):
        """Check associativity and the unit on basis triples."""
        F, n = self.field, self.dim
        if n > exhaustive_limit:
            return False
        L = self.table
        for i in range(n):
            # (b_i b_j) x == b_i (b_j x) for all j, x
            lhs = F.reduce(np.einsum("kj,kac->jac", L[i], L))
            rhs = F.reduce(np.einsum("ab,jbc->jac", L[i], L))
            if not la.is_zero(F.reduce(lhs - rhs)):
                raise ValidationError("structure constants are not associative")
        for i in range(n):
            b = self.basis_vector(i)
            if not (la.mat_equal(F.reduce(self.mul(self.unit, b)), b)
                    and la.mat_equal(F.reduce(self.mul(b, self.unit)), b)):
                raise ValidationError("unit does not act as identity")
        return True

    # radical ----------------------------------------------------------------
    @cached_property
    def radical_basis(self):
        return radical(self)

    def to_table(self, name=None):
        return TableAlgebra(self.field, self.table, self.unit, labels=self.labels,
                            gens=self.gens, kinds=self.kinds, idem_class=self.idem_class,
                            radical_hint=self.radical_hint, name=name or self.name)

    def indecomposable_projective(self, i):
        """Ae_i for idempotent generator i, cached: (basis vectors, parents, gen labels)."""
        if i not in self._proj_cache:
            from .modules import IndecomposableProjective
            self._proj_cache[i] = IndecomposableProjective(self, i)
        return self._proj_cache[i]

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} dim={self.dim} over {self.field}>"


class TableAlgebra(FinDimAlgebra):
    """Algebra given by a dense table L[i][k, j] = c_{ij}^k."""

    def __init__(self, field, L, unit, labels=None, gens=None, kinds=None,
                 idem_class=None, radical_hint=None, name="A", trusted=False):
        L = field.asarray(L) if not isinstance(L, np.ndarray) or L.dtype != field.dtype else L
        n = L.shape[0]
        if L.shape != (n, n, n):
            raise ValidationError("structure constants must be an n x n x n table")
        if gens is None:
            gens = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
            kinds = ["other"] * n
        super().__init__(field, n, labels or [f"b{i}" for i in range(n)], unit, gens, kinds,
                         idem_class, radical_hint, name)
        self.__dict__["table"] = L
        self._hint_ok = trusted

    def mul(self, x, y):
        F = self.field
        return F.reduce(F.reduce(np.tensordot(x, self.table, axes=1)) @ y)

    def gen_action(self, k, V):
        return self.field.matmul(self._gen_mats[k], V)

    @cached_property
    def _gen_mats(self):
        return [self.left_matrix(g) for g in self.gens]


class TensorAlgebra(FinDimAlgebra):
    """A ⊗ B with basis e_i ⊗ f_j at index i * dim B + j, multiplied lazily."""

    def __init__(self, A: FinDimAlgebra, B: FinDimAlgebra, name=None):
        A.field.check(B.field)
        F = A.field
        self.A, self.B = A, B
        nA, nB = A.dim, B.dim
        gens, kinds, factors, cls = [], [], [], []
        one_a, one_b = A.unit, B.unit
        ia = A.idempotents or []
        ib = B.idempotents or []
        ncls_b = max(B.idem_class) + 1 if B.n_idem else 1
        if ia and ib:
            for i, e in enumerate(ia):
                for j, f in enumerate(ib):
                    factors.append((e, f))
                    kinds.append("idem")
                    cls.append(A.idem_class[i] * ncls_b + B.idem_class[j])
            a_rest = [(g, k) for g, k in zip(A.gens, A.kinds) if k != "idem"]
            b_rest = [(g, k) for g, k in zip(B.gens, B.kinds) if k != "idem"]
        else:
            a_rest = [(g, "other" if k == "idem" else k) for g, k in zip(A.gens, A.kinds)]
            b_rest = [(g, "other" if k == "idem" else k) for g, k in zip(B.gens, B.kinds)]
        for g, k in a_rest:
            factors.append((g, one_b))
            kinds.append(k)
        for g, k in b_rest:
            factors.append((one_a, g))
            kinds.append(k)
        self.factors = factors
        for g, f in factors:
            gens.append(np.kron(g, f))
        labels = [f"{x}⊗{y}" for x in A.labels for y in B.labels]
        super().__init__(F, nA * nB, labels, np.kron(one_a, one_b), gens, kinds,
                         idem_class=cls if ia and ib else None,
                         radical_hint="tensor" if (A.radical_hint is not None and B.radical_hint is not None) else None,
                         name=name or f"{A.name}⊗{B.name}")
        self._fac_mats = [(A.left_matrix(a), B.left_matrix(b)) for a, b in factors]

    def mul(self, x, y):
        F = self.field
        nA, nB = self.A.dim, self.B.dim
        X = x.reshape(nA, nB)
        Y = y.reshape(nA, nB)
        LA, LB = self.A.table, self.B.table
        Z = F.zeros((nA, nB))
        for i in np.nonzero(np.any(X != 0, axis=1))[0]:
            Mi = F.reduce(np.tensordot(X[i], LB, axes=1))
            Z = Z + F.reduce(LA[i] @ Y) @ Mi.T
        return F.reduce(Z).reshape(-1)

    def gen_action(self, k, V):
        F = self.field
        nA, nB = self.A.dim, self.B.dim
        La, Lb = self._fac_mats[k]
        m = V.shape[1]
        Y = V.T.reshape(m, nA, nB)
        if F.dtype == object:
            # object matmul is slow; the factor matrices are sparse
            Z = self._sparse_apply(k, Y)
        else:
            Z = F.reduce(np.matmul(F.reduce(np.matmul(La, Y)), Lb.T))
        return Z.reshape(m, nA * nB).T

    def _sparse_apply(self, k, Y):
        F = self.field
        sp = self.__dict__.setdefault("_sparse", {})
        if k not in sp:
            La, Lb = self._fac_mats[k]
            sp[k] = [[(int(r), int(i), La[r, i]) for r, i in zip(*np.nonzero(La))],
                     [(int(c), int(j), Lb[c, j]) for c, j in zip(*np.nonzero(Lb))]]
        la_nz, lb_nz = sp[k]
        m, nA, nB = Y.shape
        T = F.zeros((m, nA, nB))
        for r, i, a in la_nz:
            T[:, r, :] += Y[:, i, :] if a == 1 else a * Y[:, i, :]
        Z = F.zeros((m, nA, nB))
        for c, j, b in lb_nz:
            Z[:, :, c] += T[:, :, j] if b == 1 else b * T[:, :, j]
        return Z

    def left_gen_expansion(self, k):
        """A generator g of A, written as a combination of tensor generators of g ⊗ 1."""
        A = self.A
        if A.kinds[k] == "idem" and self.n_idem:
            nb = self.B.n_idem
            return [(k * nb + j, 1) for j in range(nb)]
        pos = self._rest_index("A", k)
        return [(pos, 1)]

    def right_gen_expansion(self, k):
        """1 ⊗ h for a generator h of B."""
        B = self.B
        if B.kinds[k] == "idem" and self.n_idem:
            nb = B.n_idem
            return [(i * nb + k, 1) for i in range(self.A.n_idem)]
        pos = self._rest_index("B", k)
        return [(pos, 1)]

    def _rest_index(self, side, k):
        A, B = self.A, self.B
        both = bool(self.n_idem)
        base = self.n_idem
        a_rest = [i for i, kd in enumerate(A.kinds) if not (both and kd == "idem")]
        b_rest = [i for i, kd in enumerate(B.kinds) if not (both and kd == "idem")]
        if side == "A":
            return base + a_rest.index(k)
        return base + len(a_rest) + b_rest.index(k)


# ---------------------------------------------------------------------------
# constructors

def path_algebra(q: Quiver, field: Field) -> TableAlgebra:
    """k[Q] with basis all paths; x * y means 'first y, then x'."""
    paths = q.paths()
    n = len(paths)
    index = {(s, t, w): i for i, (s, t, w) in enumerate(paths)}
    L = np.zeros((n, n, n), dtype=np.int64)
    for i, (s1, t1, w1) in enumerate(paths):
        for j, (s2, t2, w2) in enumerate(paths):
            if t2 == s1:
                L[i, index[(s2, t1, w2 + w1)], j] = 1
    nv = q.n_vertices
    labels = []
    for s, t, w in paths:
        if not w:
            labels.append(f"e{q.vertices[s]}")
        else:
            labels.append("".join(q.arrows[k][0] for k in reversed(w)))
    unit = np.zeros(n, dtype=np.int64)
    unit[:nv] = 1
    gens = [np.eye(n, dtype=np.int64)[i] for i in range(nv + len(q.arrows))]
    kinds = ["idem"] * nv + ["rad"] * len(q.arrows)
    rad = la.int_matrix(np.eye(n, dtype=np.int64)[:, nv:]) if n > nv else np.zeros((n, 0), dtype=np.int64)
    # the empty quiver gives the zero algebra, whose only module is 0
    cls = type("ZeroPathAlgebra", (TableAlgebra,), {"_allow_zero": True}) if n == 0 else TableAlgebra
    A = cls(field, field.asarray(L).reshape(n, n, n), unit, labels=labels, gens=gens, kinds=kinds,
            radical_hint=field.zeros((n, n - nv)) if n == 0 else field.asarray(rad, (n, n - nv)), name="k[Q]")
    A.quiver = q
    A.paths = paths
    A._hint_ok = True
    return A


def opposite(A: FinDimAlgebra) -> FinDimAlgebra:
    if isinstance(A, TensorAlgebra):
        return TensorAlgebra(opposite(A.A), opposite(A.B))
    L = A.table.transpose(2, 1, 0).copy()
    B = TableAlgebra(A.field, L, A.unit, labels=[f"{x}°" for x in A.labels], gens=A.gens,
                     kinds=A.kinds, idem_class=A.idem_class, radical_hint=A.radical_hint,
                     name=A.name + "°" if not A.name.endswith("°") else A.name[:-1])
    for attr in ("quiver", "paths"):
        if hasattr(A, attr):
            setattr(B, "opposite_" + attr, getattr(A, attr))
    return B


def tensor_algebra(A: FinDimAlgebra, B: FinDimAlgebra) -> TensorAlgebra:
    return TensorAlgebra(A, B)


def enveloping_algebra(A: FinDimAlgebra) -> TensorAlgebra:
    return TensorAlgebra(A, opposite(A), name=f"{A.name}^e")


def dual_numbers(field: Field) -> TableAlgebra:
    """k[ε] = k[x]/(x²) with basis (1, ε)."""
    L = np.zeros((2, 2, 2), dtype=np.int64)
    L[0] = np.eye(2, dtype=np.int64)
    L[1, 1, 0] = 1
    return TableAlgebra(field, field.asarray(L), [1, 0], labels=["1", "ε"],
                        gens=[[1, 0], [0, 1]], kinds=["idem", "rad"],
                        radical_hint=field.asarray([[0], [1]]), name="k[ε]", trusted=True)


def matrix_algebra(n: int, field: Field) -> TableAlgebra:
    """M_n(k) with basis matrix units E_ab at index a*n + b."""
    N = n * n
    L = np.zeros((N, N, N), dtype=np.int64)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if b == c:
            L[a * n + b, a * n + d, c * n + d] = 1
    eye = np.eye(N, dtype=np.int64)
    diag = [a * n + a for a in range(n)]
    off = [i for i in range(N) if i not in diag]
    gens = [eye[i] for i in diag] + [eye[i] for i in off]
    kinds = ["idem"] * n + ["other"] * len(off)
    return TableAlgebra(field, field.asarray(L), sum(eye[i] for i in diag),
                        labels=[f"E{a}{b}" for a in range(n) for b in range(n)],
                        gens=gens, kinds=kinds, idem_class=[0] * n,
                        radical_hint=field.zeros((N, 0)), name=f"M{n}", trusted=True)


def product_of_fields(m: int, field: Field) -> TableAlgebra:
    q = Quiver([str(i + 1) for i in range(m)])
    return path_algebra(q, field)


def algebra_from_structure_constants(field: Field, dim, triples, unit, labels=None,
                                     idempotents=None, radical=None, audit=True, name="A"):
    L = field.zeros((dim, dim, dim))
    for i, j, k, c in triples:
        L[i, k, j] = field.reduce(L[i, k, j] + field.scalar(c))
    A = TableAlgebra(field, L, field.asarray(unit), labels=labels, name=name)
    if audit:
        A.audit(exhaustive_limit=max(64, dim))
    if idempotents is not None or radical is not None:
        A = with_structure(A, idempotents, radical)
    return A


def with_structure(A: FinDimAlgebra, idempotents=None, radical_basis=None, idem_class=None):
    """Rebuild A's generator list from given (or computed) idempotents and radical."""
    F = A.field
    if radical_basis is None:
        radical_basis = radical(A)
    radical_basis = F.asarray(radical_basis, (A.dim, -1))
    if idempotents is None:
        idempotents, idem_class = primitive_idempotents(A, radical_basis)
    idempotents = [F.asarray(e) for e in idempotents]
    if idem_class is None:
        idem_class = idempotent_classes(A, idempotents, radical_basis)
    span = np.stack(idempotents, axis=1) if idempotents else F.zeros((A.dim, 0))
    span = np.concatenate([span, radical_basis], axis=1)
    extra = la.extend_mod(span, F.eye(A.dim), F)
    rgens = [radical_basis[:, j] for j in range(radical_basis.shape[1])]
    gens = idempotents + rgens + [extra[:, j] for j in range(extra.shape[1])]
    kinds = ["idem"] * len(idempotents) + ["rad"] * len(rgens) + ["other"] * extra.shape[1]
    B = TableAlgebra(F, A.table, A.unit, labels=A.labels, gens=gens, kinds=kinds,
                     idem_class=idem_class, radical_hint=radical_basis, name=A.name)
    verify_radical_hint(B)
    return B


# ---------------------------------------------------------------------------
# radical, idempotents, Wedderburn data

def _span_closed_products(A, X, Y):
    """Basis of span{x*y}."""
    F = A.field
    if not X.shape[1] or not Y.shape[1]:
        return F.zeros((A.dim, 0))
    cols = [A.mul(X[:, i], Y[:, j]) for i in range(X.shape[1]) for j in range(Y.shape[1])]
    return la.image_basis(np.stack(cols, axis=1), F)


def is_nilpotent_ideal_basis(A, J, check_ideal=True) -> bool:
    F = A.field
    if not J.shape[1]:
        return True
    if check_ideal:
        S = la.Subspace(J, F, independent=True)
        E = F.eye(A.dim)
        for i in range(A.dim):
            for j in range(J.shape[1]):
                if not (S.contains(A.mul(E[:, i], J[:, j])) and S.contains(A.mul(J[:, j], E[:, i]))):
                    return False
    P = J
    for _ in range(A.dim + 1):
        P = _span_closed_products(A, P, J)
        if not P.shape[1]:
            return True
    return False


def trace_radical(A: FinDimAlgebra, L=None, rep=None):
    """Kernel of the trace form; valid when char is 0 or exceeds the representation dimension."""
    F = A.field
    if L is None:
        L = A.table
    n = L.shape[0]
    N = L.shape[1] if rep is None else rep.shape[1]
    if F.p and F.p <= N:
        raise UnsupportedCharacteristic(
            f"trace-form radical needs characteristic 0 or p > {N}, got p = {F.p}")
    R = L if rep is None else rep
    T = F.reduce(np.einsum("iab,jba->ij", R, R))
    return la.nullspace(T, F)


def radical(A: FinDimAlgebra):
    """Basis (columns) of the Jacobson radical."""
    if isinstance(A.radical_hint, np.ndarray):
        verify_radical_hint(A)
        return A.radical_hint
    if A.radical_hint == "tensor":
        raise PreconditionError("radical of a lazily multiplied tensor algebra is only known structurally")
    J = trace_radical(A)
    if not is_nilpotent_ideal_basis(A, J, check_ideal=False):
        raise ValidationError("trace-form kernel is not nilpotent")
    return J


def verify_radical_hint(A: FinDimAlgebra):
    """A declared radical is accepted when it is a nilpotent two-sided ideal with
    semisimple split quotient certified by the idempotents (each e_i A e_i /
    e_i J e_i one-dimensional)."""
    if getattr(A, "_hint_ok", False):
        return True
    F = A.field
    J = A.radical_hint
    if not is_nilpotent_ideal_basis(A, J):
        raise ValidationError("declared radical is not a nilpotent two-sided ideal")
    if A.n_idem:
        Q, _ = la.quotient_projection(J, A.dim, F)
        E = F.eye(A.dim)
        total = 0
        for a, e in enumerate(A.idempotents):
            for b, f in enumerate(A.idempotents):
                cols = np.stack([A.mul(A.mul(e, E[:, i]), f) for i in range(A.dim)], axis=1)
                r = la.rank(F.matmul(Q, cols), F)
                same = A.idem_class[a] == A.idem_class[b]
                if r != (1 if same else 0):
                    raise ValidationError("declared idempotents do not split A/J into matrix blocks")
                total += r
        if total != A.dim - J.shape[1]:
            raise ValidationError("declared idempotents do not exhaust A/J")
    else:
        qa = quotient_algebra(A, J)
        if qa is not None and qa.field.p and qa.dim < qa.field.p:
            if trace_radical(qa).shape[1]:
                raise ValidationError("declared radical leaves A/J non-semisimple")
    A._hint_ok = True
    return True


def quotient_algebra(A: FinDimAlgebra, J):
    """A/J as a table algebra on a complement of J (None if A = J)."""
    F = A.field
    Q, T = la.quotient_projection(J, A.dim, F)
    r = T.shape[1]
    if r == 0:
        return None
    L = F.zeros((r, r, r))
    for i in range(r):
        for j in range(r):
            L[i, :, j] = F.matmul(Q, A.mul(T[:, i], T[:, j]))
    qa = TableAlgebra(F, L, F.matmul(Q, A.unit), name=f"{A.name}/J")
    qa.lift, qa.proj = T, Q
    return qa


def center(A: FinDimAlgebra):
    F, n = A.field, A.dim
    L = A.table
    rows = []
    for i in range(n):
        Ri = L[:, :, i].T
        rows.append(F.reduce(Ri - L[i]))
    return la.nullspace(np.concatenate(rows, axis=0), F)


def _frobenius_split(S: FinDimAlgebra, Z, rng):
    """Primitive idempotents of the commutative semisimple algebra span(Z) over F_p."""
    F = S.field
    p = F.p
    m = Z.shape[1]
    sub = la.Subspace(Z, F, independent=True)
    frob = np.stack([sub.coords(S.power(Z[:, j], p)) for j in range(m)], axis=1)
    W = Z @ la.nullspace(F.reduce(frob - F.eye(m)), F)
    W = F.reduce(W)
    r = W.shape[1]
    idems = [S.unit.copy()]
    tries = 0
    while len(idems) < r:
        tries += 1
        if tries > 200 * (r + 1):
            raise ValidationError("central idempotent splitting failed to converge")
        w = F.reduce(W @ F.random(rng, W.shape[1]))
        new = []
        for e in idems:
            ew = S.mul(e, w)
            if p == 2:
                pieces = [ew, F.reduce(e - ew)]
            else:
                a = int(rng.integers(0, p))
                y = S.mul(e, S.power(F.reduce(ew + a * e), (p - 1) // 2))
                y2 = S.mul(y, y)
                half = F.inv(2)
                pieces = [F.reduce((y2 + y) * half), F.reduce((y2 - y) * half), F.reduce(e - y2)]
            pieces = [x for x in pieces if not la.is_zero(x)]
            new.extend(pieces)
        idems = new
    return idems


def _rational_split(S: FinDimAlgebra, Z, rng):
    """Primitive idempotents of a split commutative semisimple algebra over Q."""
    import sympy
    F = S.field
    m = Z.shape[1]
    if m == 1:
        return [S.unit.copy()]
    x = sympy.Symbol("x")
    for _ in range(64):
        z = F.reduce(Z @ F.random(rng, m, bound=5))
        powers = [S.unit.copy()]
        while True:
            powers.append(S.mul(powers[-1], z))
            K = la.nullspace(np.stack(powers, axis=1), F)
            if K.shape[1]:
                c = K[:, 0]
                break
        lead = c[-1]
        coeffs = [sympy.Rational(int((ci / lead).numerator), int((ci / lead).denominator)) for ci in c]
        poly = sympy.Poly(list(reversed(coeffs)), x)
        roots = [r for r, _ in sympy.roots(poly, filter="Q").items()]
        if len(roots) != poly.degree() or poly.degree() != m:
            continue
        idems = []
        for lam in roots:
            e = S.unit.copy()
            for mu in roots:
                if mu != lam:
                    inv = F.scalar(str(1 / (lam - mu)))
                    e = S.mul(e, F.reduce((z - F.scalar(str(mu)) * S.unit) * inv))
            idems.append(e)
        return idems
    raise PreconditionError("center of A/J does not split over Q")


def central_idempotents(S: FinDimAlgebra, rng=None):
    rng = rng if rng is not None else np.random.default_rng(0)
    Z = center(S)
    if S.field.p:
        return _frobenius_split(S, Z, rng), Z
    return _rational_split(S, Z, rng), Z


def wedderburn_data(S: FinDimAlgebra, rng=None):
    """For semisimple S over F_p: list of (n_i, d_i) with S ≅ Π M_{n_i}(F_{p^{d_i}})."""
    F = S.field
    idems, Z = central_idempotents(S, rng)
    E = F.eye(S.dim)
    out = []
    for e in idems:
        d = la.rank(np.stack([S.mul(e, Z[:, j]) for j in range(Z.shape[1])], axis=1), F)
        blk = la.rank(np.stack([S.mul(e, E[:, i]) for i in range(S.dim)], axis=1), F)
        n2, rem = divmod(blk, d)
        n = int(round(n2 ** 0.5))
        if rem or n * n != n2:
            raise ValidationError("quotient by the radical is not semisimple")
        out.append((n, d))
    return sorted(out)


def primitive_idempotents(A: FinDimAlgebra, J=None, rng=None):
    """Complete orthogonal primitive idempotents of a basic split algebra, lifted through J."""
    F = A.field
    if J is None:
        J = radical(A)
    qa = quotient_algebra(A, J)
    idems_bar, Z = central_idempotents(qa, rng)
    E = F.eye(qa.dim)
    for e in idems_bar:
        d = la.rank(np.stack([qa.mul(e, Z[:, j]) for j in range(Z.shape[1])], axis=1), F)
        blk = la.rank(np.stack([qa.mul(e, E[:, i]) for i in range(qa.dim)], axis=1), F)
        if d != 1 or blk != 1:
            raise PreconditionError(
                "primitive idempotents are only computed for basic split algebras; pass them explicitly")
    lifted = []
    total = F.zeros(A.dim)
    for eb in idems_bar:
        x = F.matmul(qa.lift, eb)
        c = F.reduce(A.unit - total)
        x = A.mul(A.mul(c, x), c)
        for _ in range(2 * A.dim + 2):
            x2 = A.mul(x, x)
            if la.mat_equal(x2, x):
                break
            x = F.reduce(3 * x2 - 2 * A.mul(x2, x))
        lifted.append(x)
        total = F.reduce(total + x)
    return lifted, list(range(len(lifted)))


def idempotent_classes(A, idems, J):
    F = A.field
    Q, _ = la.quotient_projection(J, A.dim, F)
    E = F.eye(A.dim)
    cls = []
    for a, e in enumerate(idems):
        for b in range(a):
            f = idems[b]
            cols = np.stack([A.mul(A.mul(e, E[:, i]), f) for i in range(A.dim)], axis=1)
            if la.rank(F.matmul(Q, cols), F):
                cls.append(cls[b])
                break
        else:
            cls.append(max(cls, default=-1) + 1)
    return cls


def _units_by_enumeration(mats, F: Field, bound=ENUM_BOUND, chunk=1 << 14):
    """Number of x in span(mats) (linearly independent N x N matrices) that are invertible."""
    p = F.p
    m = len(mats)
    if p ** m > bound:
        raise BoundExceeded(f"enumeration of {p}^{m} elements exceeds the bound {bound}", p ** m)
    if m == 0:
        return 0
    N = mats[0].shape[0]
    if N == 0:
        return 1
    stack = np.stack([np.asarray(x, dtype=np.int64) for x in mats]).reshape(m, N * N)
    total = p ** m
    count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = np.empty((len(idx), m), dtype=np.int64)
        rest = idx.copy()
        for k in range(m):
            digits[:, k] = rest % p
            rest //= p
        batch = (digits @ stack % p).reshape(-1, N, N)
        count += int(batch_invertible_count(batch, p))
    return count


def batch_invertible_count(batch, p):
    return np.count_nonzero(la.batch_invertible(batch, p))


def unit_group_order(A: FinDimAlgebra, method="auto", bound=ENUM_BOUND, rng=None) -> int:
    """|A^×| over F_p via Wedderburn data of A/J or, failing that, enumeration."""
    F = A.field
    if not F.p:
        raise PreconditionError("unit groups are infinite over Q")
    if method in ("auto", "wedderburn"):
        try:
            J = radical(A)
            qa = quotient_algebra(A, J)
            if qa is None:
                return 0
            data = wedderburn_data(qa, rng)
            out = F.p ** J.shape[1]
            for n, d in data:
                out *= la.gl_order(n, F.p ** d)
            return out
        except (UnsupportedCharacteristic, PreconditionError):
            if method == "wedderburn":
                raise
    try:
        L = A.table
        return _units_by_enumeration([L[i] for i in range(A.dim)], F, bound)
    except BoundExceeded:
        raise PreconditionError("unit counting unsupported at these parameters") from None


def matrix_algebra_units(mats, F: Field, bound=ENUM_BOUND, rng=None) -> int:
    """Units of the subalgebra of M_N(F_p) spanned by the given matrices."""
    if not mats:
        return 1
    N = mats[0].shape[0]
    flat = np.stack([m.reshape(-1) for m in mats], axis=1)
    basis = la.image_basis(flat, F)
    m = basis.shape[1]
    mats = [basis[:, j].reshape(N, N) for j in range(m)]
    if N == 0:
        return 1
    if F.p ** m <= bound:
        return _units_by_enumeration(mats, F, bound)
    if F.p <= N:
        raise PreconditionError(
            f"unit counting unsupported: {F.p}^{m} elements exceed the bound and p <= {N}")
    sub = la.Subspace(basis, F, independent=True)
    L = F.zeros((m, m, m))
    for i in range(m):
        for j in range(m):
            L[i, :, j] = sub.coords(F.matmul(mats[i], mats[j]).reshape(-1))
    unit = sub.coords(F.eye(N).reshape(-1))
    S = TableAlgebra(F, L, unit, name="S")
    rep = np.stack(mats)
    J = trace_radical(S, rep=rep)
    qa = quotient_algebra(S, J)
    out = F.p ** J.shape[1]
    for n, d in wedderburn_data(qa, rng):
        out *= la.gl_order(n, F.p ** d)
    return out


# ---------------------------------------------------------------------------
# JSON

def algebra_from_json(d, field: Field = None):
    """Either {"quiver": ..., "field"} or explicit structure constants."""
    try:
        if field is None:
            field = parse_field(d["field"])
        if "quiver" in d:
            q = Quiver.from_json(d["quiver"])
            return path_algebra(q, field)
        if "vertices" in d:
            return path_algebra(Quiver.from_json(d), field)
        kind = d.get("kind")
        if kind == "dual_numbers":
            return dual_numbers(field)
        if kind == "matrix":
            return matrix_algebra(int(d["n"]), field)
        dim = int(d["dim"])
        triples = d["structure_constants"]
        basis = d.get("basis")
        rad = d.get("radical")
        if rad is not None:
            rad = np.array(rad, dtype=object).reshape(-1, dim).T
        A = algebra_from_structure_constants(field, dim, triples, d["unit"], labels=basis, audit=True)
        return with_structure(A, d.get("idempotents"), rad)
    except (KeyError, TypeError, IndexError) as e:
        raise ValidationError(f"bad algebra JSON: {e}") from None


def parse_field(x) -> Field:
    if isinstance(x, Field):
        return x
    if isinstance(x, int):
        return Field(x)
    s = str(x).strip()
    if s in ("Q", "QQ", "0"):
        return Field(0)
    if s.startswith("F") or s.startswith("GF"):
        s = s.lstrip("GF")
    try:
        return Field(int(s))
    except ValueError:
        raise ValidationError(f"unknown field {x!r}") from None


def algebra_to_json(A: FinDimAlgebra):
    F = A.field
    if hasattr(A, "quiver"):
        return {"field": str(F), "quiver": A.quiver.to_json()}
    L = A.table
    triples = []
    for i, k, j in zip(*np.nonzero(L)):
        triples.append([int(i), int(j), int(k), F.to_json(L[i, k, j])])
    triples.sort()
    out = {"field": str(F), "dim": A.dim, "basis": list(A.labels),
           "structure_constants": triples, "unit": [F.to_json(x) for x in A.unit]}
    if A.n_idem:
        out["idempotents"] = [[F.to_json(x) for x in e] for e in A.idempotents]
    if A.radical_hint is not None:
        R = A.radical_hint
        out["radical"] = [[F.to_json(x) for x in R[:, j]] for j in range(R.shape[1])]
    return out
