"""Exact dense linear algebra over prime fields, the rationals and the integers.

Matrices are numpy arrays.  Over F_p with small p the dtype is int64 and
entries are kept reduced in [0, p); over Q (and over F_p with large p) the
dtype is object, holding gmpy2 rationals or Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import NamedTuple

import numpy as np
from gmpy2 import mpq
from sympy import isprime

from .errors import CoefficientMismatch, ValidationError

# For p below this bound int64 products of reduced entries summed over a few
# thousand terms cannot overflow.
_SMALL_P = 1 << 26


@dataclass(frozen=True)
class Field:
    """A prime field F_p (p > 0) or the rationals (p == 0)."""

    p: int

    def __post_init__(self):
        if self.p < 0 or (self.p and not isprime(self.p)):
            raise ValidationError(f"{self.p} is not a prime")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def order(self):
        return self.p if self.p else None

    @property
    def dtype(self):
        return np.int64 if 0 < self.p < _SMALL_P else object

    def __str__(self):
        return f"F{self.p}" if self.p else "Q"

    # construction -------------------------------------------------------
    def scalar(self, x):
        if self.p:
            if isinstance(x, str):
                x = Fraction(x)
            if isinstance(x, (Fraction, type(mpq()))):
                num, den = int(x.numerator), int(x.denominator)
                return num * pow(den, -1, self.p) % self.p
            return int(x) % self.p
        if isinstance(x, str):
            return mpq(Fraction(x.strip()))
        if isinstance(x, float):
            raise ValidationError("floating point entries are not exact")
        return mpq(x)

    def asarray(self, data, shape=None) -> np.ndarray:
        if isinstance(data, np.ndarray) and data.dtype != object and self.p:
            a = np.mod(data.astype(np.int64), self.p).astype(self.dtype)
        else:
            raw = np.array(data, dtype=object)
            if raw.size:
                flat = [self.scalar(x) for x in raw.ravel()]
                a = np.empty(raw.size, dtype=object)
                a[:] = flat
                a = a.reshape(raw.shape)
                if self.dtype is not object:
                    a = a.astype(np.int64)
            else:
                a = np.zeros(raw.shape, dtype=self.dtype)
        if shape is not None:
            if -1 not in tuple(shape) and a.size != int(np.prod(shape)):
                raise ValidationError(f"matrix of shape {a.shape} where {tuple(shape)} was expected")
            a = a.reshape(shape)
        return a

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=self.dtype)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64).astype(self.dtype)

    def reduce(self, a):
        if self.p:
            return np.mod(a, self.p)
        return a

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(int(x), -1, self.p)
        return mpq(1) / x

    def matmul(self, a, b):
        if self.p:
            return np.mod(a @ b, self.p)
        return _q_matmul(a, b)

    def elements(self):
        if not self.p:
            raise ValidationError("Q has infinitely many elements")
        return range(self.p)

    def random(self, rng, shape, bound=3):
        if self.p:
            return rng.integers(0, self.p, size=shape).astype(self.dtype)
        return self.asarray(rng.integers(-bound, bound + 1, size=shape))

    def to_json(self, x):
        if self.p:
            return int(x)
        x = mpq(x)
        return f"{int(x.numerator)}/{int(x.denominator)}"

    def matrix_to_json(self, m):
        m = np.asarray(m)
        return [[self.to_json(x) for x in row] for row in m.reshape(m.shape[0], -1)] if m.shape[0] else []

    def check(self, other: "Field"):
        if self != other:
            raise CoefficientMismatch(f"coefficient fields differ: {self} vs {other}")


def _numerators(a):
    """(integer numerator array, common denominator) for an array of rationals."""
    flat = a.ravel()
    den = 1
    for x in flat:
        d = x.denominator if hasattr(x, "denominator") else 1
        if d != 1:
            den = lcm(den, int(d))
    nums = np.empty(flat.size, dtype=object)
    if den == 1:
        nums[:] = [int(x) for x in flat]
    else:
        nums[:] = [int(x * den) for x in flat]
    return nums.reshape(a.shape), den


def _q_matmul(a, b):
    """Exact rational product computed on integer numerators (int64 when safe)."""
    if a.size == 0 or b.size == 0:
        shape = (a @ b).shape
        out = np.empty(shape, dtype=object)
        out[...] = mpq(0)
        return out
    na, da = _numerators(a)
    nb, db = _numerators(b)
    ma = max(abs(int(x)) for x in na.ravel())
    mb = max(abs(int(x)) for x in nb.ravel())
    k = a.shape[-1]
    if ma * mb * k < (1 << 62):
        prod = na.astype(np.int64) @ nb.astype(np.int64)
    else:
        prod = na @ nb
    den = da * db
    flat = prod.ravel()
    out = np.empty(flat.size, dtype=object)
    if den == 1:
        out[:] = [mpq(int(x)) for x in flat]
    else:
        out[:] = [mpq(int(x), den) for x in flat]
    return out.reshape(prod.shape)


def GF(p: int) -> Field:
    return Field(p)


QQ = Field(0)


def is_zero(a) -> bool:
    return not np.any(a != 0) if np.size(a) else True


def mat_equal(a, b) -> bool:
    return a.shape == b.shape and is_zero(a - b)


# ---------------------------------------------------------------------------
# Gaussian elimination

class Decomposition(NamedTuple):
    rank: int
    kernel: np.ndarray   # cols x (cols - rank), columns span the kernel
    image: np.ndarray    # rows x rank, pivot columns of the input
    rref: np.ndarray
    pivots: tuple


def _rref(a: np.ndarray, F: Field, ncols=None):
    """Row reduce a copy of a; only the first ncols columns are used as pivots."""
    A = a.copy()
    rows, cols = A.shape
    if ncols is None:
        ncols = cols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if not len(nz):
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        piv = A[r, c]
        if piv != 1:
            A[r] = F.reduce(A[r] * F.inv(piv))
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if len(others):
            A[others] = F.reduce(A[others] - A[others, c][:, None] * A[r][None, :])
        pivots.append(c)
        r += 1
    return A, tuple(pivots)


def rref(M, F: Field):
    M = np.asarray(M)
    return _rref(M, F)


def _kernel_from_rref(R, pivots, cols, F):
    free = [c for c in range(cols) if c not in set(pivots)]
    K = F.zeros((cols, len(free)))
    for j, f in enumerate(free):
        K[f, j] = 1
        for i, pc in enumerate(pivots):
            K[pc, j] = -R[i, f]
    return F.reduce(K)


def gauss_decompose(M, F: Field) -> Decomposition:
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValidationError("matrix expected")
    rows, cols = M.shape
    if rows == 0 or cols == 0 or not M.any():
        return Decomposition(0, F.eye(cols), F.zeros((rows, 0)), M.copy(), ())
    R, piv = _rref(M, F)
    return Decomposition(len(piv), _kernel_from_rref(R, piv, cols, F), M[:, list(piv)], R, piv)


def rank(M, F: Field) -> int:
    M = np.asarray(M)
    if 0 in M.shape or not M.any():
        return 0
    if M.shape[0] > M.shape[1]:
        M = M.T
    return len(_rref(M, F)[1])


def nullspace(M, F: Field) -> np.ndarray:
    return gauss_decompose(M, F).kernel


def image_basis(M, F: Field) -> np.ndarray:
    return gauss_decompose(M, F).image


def solve(M, b, F: Field):
    """One solution x of M x = b (b a vector or a matrix of columns), or None."""
    M = np.asarray(M)
    b = np.asarray(b)
    vec = b.ndim == 1
    B = b.reshape(M.shape[0], -1) if vec else b
    if B.shape[0] != M.shape[0]:
        raise ValidationError(f"shape mismatch: {M.shape} vs {b.shape}")
    n = M.shape[1]
    if M.shape[0] == 0:
        x = F.zeros((n, B.shape[1]))
        return x.ravel() if vec else x
    aug = np.concatenate([M.astype(F.dtype), B.astype(F.dtype)], axis=1)
    R, piv = _rref(aug, F, ncols=n)
    r = len(piv)
    if not is_zero(R[r:, n:]):
        return None
    x = F.zeros((n, B.shape[1]))
    for i, c in enumerate(piv):
        x[c] = R[i, n:]
    return x.ravel() if vec else x


def inverse(M, F: Field):
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValidationError("square matrix expected")
    x = solve(M, F.eye(n), F)
    if x is None:
        raise ValidationError("matrix is singular")
    return x


def independent_columns(M, F: Field, first: int = 0):
    """Indices j >= first of columns of M independent modulo the span of all
    earlier columns (the pivot columns of a reduction)."""
    if 0 in M.shape:
        return []
    _, piv = _rref(M, F)
    return [c for c in piv if c >= first]


def extend_mod(S, V, F: Field):
    """Columns of V that extend a basis of span(S) to a basis of span(S, V)."""
    k = S.shape[1]
    idx = independent_columns(np.concatenate([S.astype(F.dtype), V.astype(F.dtype)], axis=1), F, first=k)
    return V[:, [j - k for j in idx]]


class Subspace:
    """A subspace of F^n with a fixed basis and fast coordinates."""

    def __init__(self, spanning, F: Field, independent=False):
        self.F = F
        spanning = np.asarray(spanning)
        self.n = spanning.shape[0]
        self.basis = spanning if independent else image_basis(spanning, F)
        self.dim = self.basis.shape[1]
        if self.dim:
            self.rows = list(gauss_decompose(self.basis.T, F).pivots)
            self._inv = inverse(self.basis[self.rows], F)
        else:
            self.rows, self._inv = [], F.zeros((0, 0))

    def coords(self, v):
        """Coordinates of v (vector or columns) assumed to lie in the subspace."""
        return self.F.matmul(self._inv, v[self.rows])

    def contains(self, v) -> bool:
        v = v.reshape(self.n, -1)
        if not self.dim:
            return is_zero(v)
        return mat_equal(self.F.matmul(self.basis, self.coords(v)), self.F.reduce(v))


def quotient_projection(S, n: int, F: Field):
    """For S (n x k, independent columns) return (Q, T): T spans a complement of
    span(S) built from standard vectors, Q (r x n) is the projection onto
    coordinates of F^n/span(S) so that Q S = 0 and Q T = I."""
    T = extend_mod(S, F.eye(n), F)
    full = np.concatenate([S.astype(F.dtype), T], axis=1)
    Q = inverse(full, F)[S.shape[1]:]
    return Q, T


def block_diag(mats, F: Field):
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = F.zeros((rows, cols))
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


# ---------------------------------------------------------------------------
# batched invertibility over F_p

def batch_invertible(mats, p: int):
    """Boolean array: which of the (B, n, n) integer matrices are invertible mod p."""
    A = np.mod(np.asarray(mats, dtype=np.int64), p)
    B, n, _ = A.shape
    ok = np.ones(B, dtype=bool)
    if n == 0 or B == 0:
        return ok
    idx = np.arange(B)
    invtab = None
    if p < 1 << 16:
        invtab = np.zeros(p, dtype=np.int64)
        invtab[1:] = [pow(x, -1, p) for x in range(1, p)]
    for c in range(n):
        nz = A[:, c:, c] != 0
        ok &= nz.any(axis=1)
        r = np.argmax(nz, axis=1) + c
        rowc = A[idx, c].copy()
        A[idx, c] = A[idx, r]
        A[idx, r] = rowc
        piv = A[:, c, c]
        if invtab is not None:
            pinv = invtab[piv]
        else:
            pinv = np.array([pow(int(x), -1, p) if x else 0 for x in piv], dtype=np.int64)
        A[:, c] = A[:, c] * pinv[:, None] % p
        f = A[:, :, c].copy()
        f[:, c] = 0
        A = (A - f[:, :, None] * A[:, c][:, None, :]) % p
    return ok


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


# ---------------------------------------------------------------------------
# integers

def int_matrix(data, shape=None) -> np.ndarray:
    a = np.array(data, dtype=object)
    if a.size:
        flat = np.empty(a.size, dtype=object)
        flat[:] = [int(x) for x in a.ravel()]
        a = flat.reshape(a.shape)
    if shape is not None:
        a = a.reshape(shape)
    return a


def int_eye(n):
    return int_matrix(np.eye(n, dtype=np.int64), (n, n))


def smith_normal_form(M):
    """Return (U, D, V) with D = U M V diagonal, d_1 | d_2 | ..., d_i >= 0 and
    U, V unimodular.  All three are object arrays of Python ints."""
    M = np.asarray(M)
    m, n = M.shape
    A = [[int(x) for x in row] for row in M.tolist()] if m and n else [[0] * n for _ in range(m)]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = A[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            piv = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
            if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return int_matrix(U, (m, m)), int_matrix(A, (m, n)), int_matrix(V, (n, n))


def elementary_divisors(M):
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    M = np.asarray(M)
    if 0 in M.shape:
        return []
    _, D, _ = smith_normal_form(M)
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


def int_det(M) -> int:
    from sympy import Matrix
    return int(Matrix(M.tolist()).det()) if M.shape[0] else 1


class Echelon:
    """Incrementally grown basis of a subspace of F^n, kept in reduced row echelon form."""

    def __init__(self, n: int, F: Field):
        self.n, self.F = n, F
        self.rows = F.zeros((0, n))
        self.piv: list = []
        self.vectors = F.zeros((n, 0))   # the accepted input vectors, in order

    @property
    def dim(self):
        return len(self.piv)

    def reduce(self, C):
        """Reduce the columns of C against the current basis."""
        if not self.piv:
            return C.copy()
        X = C.T
        return self.F.reduce(X - self.F.matmul(X[:, self.piv], self.rows)).T

    def add_many(self, C):
        """Add the columns of C; return the accepted original columns (independent
        modulo everything before them)."""
        F = self.F
        if C.shape[1] == 0:
            return C
        X = self.reduce(C).T
        if is_zero(X):
            return C[:, :0]
        accepted = independent_columns(X.T, F)
        Y = X[accepted]
        R2, piv2 = _rref(Y, F)
        R2 = R2[:len(piv2)]
        if self.piv:
            self.rows = F.reduce(self.rows - F.matmul(self.rows[:, list(piv2)], R2))
        self.rows = np.concatenate([self.rows, R2], axis=0)
        self.piv = self.piv + list(piv2)
        order = np.argsort(self.piv, kind="stable")
        self.rows = self.rows[order]
        self.piv = [self.piv[i] for i in order]
        new = C[:, accepted]
        self.vectors = np.concatenate([self.vectors, new], axis=1)
        return new

    def contains(self, v) -> bool:
        return is_zero(self.reduce(v.reshape(self.n, -1)))


def int_inverse(M):
    """Inverse of a unimodular integer matrix, as an integer object array."""
    from sympy import Matrix
    n = M.shape[0]
    if n == 0:
        return int_matrix(np.zeros((0, 0), dtype=np.int64), (0, 0))
    inv = Matrix(M.tolist()).inv()
    if any(not x.is_integer for x in inv):
        raise ValueError("matrix is not unimodular")
    return int_matrix([[int(x) for x in inv.row(i)] for i in range(n)], (n, n))
