"""Bounded complexes of finitely generated free abelian groups."""
from __future__ import annotations

from functools import cached_property

import numpy as np

from . import exact_linalg as la
from .errors import ValidationError


def _zero(r, c):
    return la.int_matrix(np.zeros((r, c), dtype=np.int64), (r, c))


def _nonneg(r):
    r = int(r)
    if r < 0:
        raise ValidationError("ranks must be nonnegative")
    return r


class IntComplex:
    """ranks: {degree: rank}; diffs: {n: integer matrix Z^{r_n} -> Z^{r_{n+1}}}."""

    def __init__(self, ranks, diffs=None, check=True):
        self.ranks = {int(n): _nonneg(r) for n, r in ranks.items() if int(r)}
        self.diffs = {}
        for n, d in (diffs or {}).items():
            n = int(n)
            shape = (self.rank(n + 1), self.rank(n))
            d = la.int_matrix(d) if np.size(d) else _zero(*shape)
            if d.size == 0:
                d = d.reshape(shape)
            if d.shape != shape:
                raise ValidationError(f"differential {n} has shape {d.shape}, expected {shape}")
            if any(x != 0 for x in d.ravel()):
                self.diffs[n] = d
        if check:
            self.audit()

    def rank(self, n):
        return self.ranks.get(n, 0)

    def diff(self, n):
        d = self.diffs.get(n)
        return _zero(self.rank(n + 1), self.rank(n)) if d is None else d

    @property
    def lo(self):
        return min(self.ranks) if self.ranks else 0

    @property
    def hi(self):
        return max(self.ranks) if self.ranks else -1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def is_zero(self):
        return not self.ranks

    def audit(self):
        for n, d in self.diffs.items():
            if n + 1 in self.diffs:
                dd = self.diffs[n + 1].dot(d)
                if any(x != 0 for x in dd.ravel()):
                    raise ValidationError(f"d∘d != 0 in degree {n}")
        return True

    # invariants --------------------------------------------------------------
    @cached_property
    def divisors(self):
        """{n: elementary divisors of d^n}."""
        return {n: la.elementary_divisors(d) for n, d in self.diffs.items()}

    def diff_rank(self, n):
        return len(self.divisors.get(n, []))

    def cohomology(self):
        """{n: (free rank, [torsion orders > 1])} for nonzero H^n."""
        out = {}
        for n in self.degrees():
            free = self.rank(n) - self.diff_rank(n) - self.diff_rank(n - 1)
            tors = [d for d in self.divisors.get(n - 1, []) if d > 1]
            if free or tors:
                out[n] = (free, tors)
        return out

    def residue_dims(self, p):
        """dim H^n(C ⊗ k) for k = F_p (p > 0) or Q (p = 0), from elementary divisors."""
        out = {}
        for n in self.degrees():
            def rk(m):
                ds = self.divisors.get(m, [])
                return len(ds) if p == 0 else sum(1 for d in ds if d % p)
            h = self.rank(n) - rk(n) - rk(n - 1)
            if h:
                out[n] = h
        return out

    def reduce_mod(self, p):
        """Residue cohomology dims computed by direct reduction of the matrices."""
        F = la.Field(p)
        out = {}
        for n in self.degrees():
            def rk(m):
                d = self.diff(m)
                return la.rank(F.asarray(d), F) if d.size else 0
            h = self.rank(n) - rk(n) - rk(n - 1)
            if h:
                out[n] = h
        return out

    def torsion_test_orders(self, m):
        """{n: |H^n(C ⊗ Z/m)|} for the nonzero groups, via Smith forms."""
        from math import gcd

        def ker_size(k):
            ds = self.divisors.get(k, [])
            out = m ** (self.rank(k) - len(ds))
            for d in ds:
                out *= gcd(d, m)
            return out
        res = {}
        for n in self.degrees():
            kern = ker_size(n)
            img = m ** self.rank(n - 1) // ker_size(n - 1)
            order = kern // img
            if order > 1:
                res[n] = order
        return res

    def is_acyclic(self):
        return not self.cohomology()

    # constructions ----------------------------------------------------------
    def shift(self, k):
        sign = -1 if k % 2 else 1
        return IntComplex({n - k: r for n, r in self.ranks.items()},
                          {n - k: sign * d for n, d in self.diffs.items()}, check=False)

    def direct_sum(self, other):
        degs = set(self.ranks) | set(other.ranks)
        diffs = {}
        for n in degs:
            a, b = self.diff(n), other.diff(n)
            m = _zero(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
            m[:a.shape[0], :a.shape[1]] = a
            m[a.shape[0]:, a.shape[1]:] = b
            diffs[n] = m
        return IntComplex({n: self.rank(n) + other.rank(n) for n in degs}, diffs, check=False)

    def tensor(self, other):
        """(C ⊗ D)^n = ⊕_{i+j=n} C^i ⊗ D^j with d = d⊗1 + (-1)^i 1⊗d."""
        pairs = {}
        for i in self.ranks:
            for j in other.ranks:
                pairs.setdefault(i + j, []).append((i, j))
        layout = {}
        ranks = {}
        for n, ps in pairs.items():
            off = 0
            for (i, j) in sorted(ps):
                layout[(i, j)] = off
                off += self.rank(i) * other.rank(j)
            ranks[n] = off
        diffs = {}
        for n in ranks:
            if n + 1 not in ranks:
                continue
            m = _zero(ranks[n + 1], ranks[n])
            for (i, j) in pairs[n]:
                src = layout[(i, j)]
                w = self.rank(i) * other.rank(j)
                if (i + 1, j) in layout and self.rank(i + 1):
                    blk = np.kron(self.diff(i), la.int_eye(other.rank(j)))
                    t = layout[(i + 1, j)]
                    m[t:t + blk.shape[0], src:src + w] += blk
                if (i, j + 1) in layout and other.rank(j + 1):
                    sign = -1 if i % 2 else 1
                    blk = sign * np.kron(la.int_eye(self.rank(i)), other.diff(j))
                    t = layout[(i, j + 1)]
                    m[t:t + blk.shape[0], src:src + w] += blk
            diffs[n] = m
        return IntComplex(ranks, diffs, check=False)

    def to_json(self):
        return {"context": "Z", "window": [self.lo, self.hi],
                "terms": {str(n): r for n, r in sorted(self.ranks.items())},
                "differentials": {str(n): [[int(x) for x in row] for row in d.tolist()]
                                  for n, d in sorted(self.diffs.items())}}

    @classmethod
    def from_json(cls, d):
        try:
            terms = {int(k): v for k, v in d["terms"].items()} if isinstance(d["terms"], dict) else \
                {d["window"][0] + i: v for i, v in enumerate(d["terms"])}
            diffs = d.get("differentials", {})
            if isinstance(diffs, list):
                diffs = {d["window"][0] + i: v for i, v in enumerate(diffs)}
            ranks = {}
            for n, v in terms.items():
                ranks[n] = v if isinstance(v, int) else int(v["rank"])
            lo, hi = d.get("window", [min(ranks, default=0), max(ranks, default=-1)])
            if any(r and not lo <= n <= hi for n, r in ranks.items()):
                raise ValidationError("term outside the declared window")
            out = {}
            for k, m in diffs.items():
                k = int(k)
                out[k] = la.int_matrix(m, (ranks.get(k + 1, 0), ranks.get(k, 0))) if m else _zero(
                    ranks.get(k + 1, 0), ranks.get(k, 0))
            return cls(ranks, out)
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"bad integer complex JSON: {e}") from None

    def __repr__(self):
        return f"<IntComplex ranks={dict(sorted(self.ranks.items()))}>"


class IntChainMap:
    def __init__(self, source: IntComplex, target: IntComplex, comps, check=True):
        self.source, self.target = source, target
        self.comps = {}
        for n, f in comps.items():
            shape = (target.rank(n), source.rank(n))
            f = la.int_matrix(f) if np.size(f) else _zero(*shape)
            if f.size == 0:
                f = f.reshape(shape)
            if f.shape != shape:
                raise ValidationError("chain map component has the wrong shape")
            self.comps[int(n)] = f
        if check:
            self.audit()

    def __getitem__(self, n):
        f = self.comps.get(n)
        return _zero(self.target.rank(n), self.source.rank(n)) if f is None else f

    def audit(self):
        C, D = self.source, self.target
        degs = set(C.ranks) | set(D.ranks)
        for n in degs | {n - 1 for n in degs}:
            lhs = D.diff(n).dot(self[n]) if D.rank(n) and D.rank(n + 1) else None
            rhs = self[n + 1].dot(C.diff(n)) if C.rank(n) and C.rank(n + 1) else None
            a = lhs if lhs is not None else _zero(D.rank(n + 1), C.rank(n))
            b = rhs if rhs is not None else _zero(D.rank(n + 1), C.rank(n))
            if a.shape != b.shape or any(x != 0 for x in (a - b).ravel()):
                raise ValidationError(f"not a chain map in degree {n}")
        return True


def int_cone(f: IntChainMap) -> IntComplex:
    """cone^n = C^{n+1} ⊕ D^n, d(c, x) = (-d c, f c + d x)."""
    C, D = f.source, f.target
    degs = {n - 1 for n in C.ranks} | set(D.ranks)
    ranks = {n: C.rank(n + 1) + D.rank(n) for n in degs}
    diffs = {}
    for n in degs:
        if n + 1 not in degs:
            continue
        c1, d0, c2, d1 = C.rank(n + 1), D.rank(n), C.rank(n + 2), D.rank(n + 1)
        m = _zero(c2 + d1, c1 + d0)
        if c1 and c2:
            m[:c2, :c1] = -C.diff(n + 1)
        if c1 and d1:
            m[c2:, :c1] = f[n + 1]
        if d0 and d1:
            m[c2:, c1:] = D.diff(n)
        diffs[n] = m
    return IntComplex(ranks, diffs, check=False)


def int_fiber(f: IntChainMap) -> IntComplex:
    return int_cone(f).shift(-1)


# ---------------------------------------------------------------------------
# random instances

def _orthogonal_rows(d, r_next, rng, bound=3):
    """A random r_next x rows(d)... matrix M with M d = 0, entries in [-bound, bound]."""
    rows_d = d.shape[0]
    if rows_d == 0 or r_next == 0:
        return _zero(r_next, rows_d)
    import itertools
    dd = np.array(d.tolist(), dtype=np.int64)
    cands = []
    for v in itertools.product(range(-bound, bound + 1), repeat=rows_d):
        v = np.array(v, dtype=np.int64)
        if not np.any(v @ dd):
            cands.append(v)
    out = []
    for _ in range(r_next):
        if rng.random() < 0.25 or len(cands) <= 1:
            out.append(np.zeros(rows_d, dtype=np.int64))
        else:
            out.append(cands[int(rng.integers(0, len(cands)))])
    return la.int_matrix(np.array(out), (r_next, rows_d))


def random_int_complex(rng, max_rank=4, bound=3, max_len=4):
    """Random bounded free complex: ranks <= max_rank, differential entries in [-bound, bound]."""
    length = int(rng.integers(1, max_len + 1))
    start = int(rng.integers(-2, 2))
    ranks = [int(rng.integers(1, max_rank + 1)) for _ in range(length)]
    diffs = {}
    prev = None
    for i in range(length - 1):
        if prev is None:
            d = la.int_matrix(rng.integers(-bound, bound + 1, size=(ranks[i + 1], ranks[i])),
                              (ranks[i + 1], ranks[i]))
        else:
            d = _orthogonal_rows(prev, ranks[i + 1], rng, bound)
        diffs[start + i] = d
        prev = d
    return IntComplex({start + i: r for i, r in enumerate(ranks)}, diffs)


def random_homotopic_endo(C: IntComplex, rng, bound=1):
    """c·id + (d h + h d) for a random integer h of degree -1."""
    h = {n: la.int_matrix(rng.integers(-bound, bound + 1, size=(C.rank(n - 1), C.rank(n))),
                          (C.rank(n - 1), C.rank(n))) for n in C.ranks}
    c = int(rng.integers(-2, 3))
    comps = {}
    for n in C.ranks:
        m = c * la.int_eye(C.rank(n))
        if C.rank(n - 1) and n in h:
            m = m + C.diff(n - 1).dot(h[n])
        if C.rank(n + 1) and (n + 1) in h:
            m = m + h[n + 1].dot(C.diff(n))
        comps[n] = m
    return IntChainMap(C, C, comps)
