"""Finite-field points of moduli of complexes over quiver path algebras:
enumeration of quasi-isomorphism classes in bounded windows, per-point
homotopy and tangent invariants, rigidity and stacky counts."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import exact_linalg as la
from .complexes import Complex, ExtTable, aut_order, end_algebra
from .errors import BoundExceeded, PreconditionError, ValidationError
from .fdalgebra import ENUM_BOUND, FinDimAlgebra, matrix_algebra_units
from .modules import ModuleRep, hom_space, is_isomorphic, module_invariants


# ---------------------------------------------------------------------------
# windows

@dataclass(frozen=True)
class NuBound:
    values: tuple          # sorted ((degree, cap), ...)

    @classmethod
    def make(cls, d):
        items = []
        for k, v in dict(d).items():
            k, v = int(k), int(v)
            if v < 0:
                raise ValidationError("ν values must be nonnegative")
            if v:
                items.append((k, v))
        return cls(tuple(sorted(items)))

    @classmethod
    def parse(cls, text: str):
        """'0:1,1:2' -> ν(0) = 1, ν(1) = 2, zero elsewhere."""
        d = {}
        text = text.strip()
        if text:
            for part in text.split(","):
                try:
                    k, v = part.split(":")
                    d[int(k)] = int(v)
                except ValueError:
                    raise ValidationError(f"bad ν entry {part!r}") from None
        return cls.make(d)

    def __call__(self, i):
        return dict(self.values).get(i, 0)

    @property
    def support(self):
        return [k for k, _ in self.values]

    def to_json(self):
        return {str(k): v for k, v in self.values}


def _generator_weights(A: FinDimAlgebra, generator=None):
    """Per-vertex multiplicities m_v of the generator ⊕ P_v^{m_v} (default all 1)."""
    n = A.n_idem
    if generator is None:
        return [1] * n
    if isinstance(generator, ModuleRep):
        from .dgcat_props import projective_multiplicities
        mult, proj = projective_multiplicities(generator)
        if not proj or any(m == 0 for m in mult.values()):
            raise PreconditionError("window generator must be a projective generator")
        w = [0] * n
        for e, m in mult.items():
            for i in range(n):
                if A.idem_class[i] == A.idem_class[e]:
                    w[i] = m
        return w
    w = [int(x) for x in generator]
    if len(w) != n or any(x <= 0 for x in w):
        raise PreconditionError("generator multiplicities must be positive, one per vertex")
    return w


def weighted_dim(M: ModuleRep, weights):
    """dim Hom(G, M) = Σ_v m_v dim e_v M."""
    return sum(w * d for w, d in zip(weights, M.vertex_dims()))


def nu_membership(E: Complex, nu: NuBound, generator=None) -> bool:
    """dim H^i(E) <= ν(i) for all i; dimensions measured through the window generator."""
    if E.is_zero():
        return True
    if generator is None:
        dims = E.cohomology_dims()
    else:
        from .complexes import cohomology
        w = _generator_weights(E.algebra, generator)
        dims = {n: weighted_dim(H, w) for n, H in cohomology(E).items()}
    return all(d <= nu(i) for i, d in dims.items())


# ---------------------------------------------------------------------------
# module classes

@dataclass
class ModuleClass:
    module: ModuleRep
    dims: tuple
    aut: int
    orbit: int                 # |GL_d| / |Aut|

    @property
    def key(self):
        return (self.dims, tuple(tuple(int(x) for x in m.ravel()) for m in self.module.arrow_blocks()))


def module_aut_order(M: ModuleRep, rng=None) -> int:
    if M.dim == 0:
        return 1
    return matrix_algebra_units(hom_space(M, M), M.field, rng=rng)


def _gl_d(dims, q):
    out = 1
    for d in dims:
        out *= la.gl_order(d, q)
    return out


def _arrow_entries(q, dims):
    return sum(dims[s] * dims[t] for _, s, t in q.arrows)


def representation_classes(A: FinDimAlgebra, dims, bound=ENUM_BOUND, rng=None):
    """Isomorphism classes of representations with dimension vector ``dims``, by
    scanning arrow tuples; the scan stops once the orbit sizes |GL_d|/|Aut|
    of the classes found add up to the number of tuples."""
    q = A.quiver
    F = A.field
    p = F.p
    if not p:
        raise PreconditionError("enumeration needs a finite field")
    dims = tuple(int(x) for x in dims)
    N = _arrow_entries(q, dims)
    total = p ** N
    if total > bound:
        raise BoundExceeded(f"{total} arrow tuples for dimension vector {dims} exceed the bound {bound}", total)
    gl = _gl_d(dims, p)
    shapes = [(dims[t], dims[s]) for _, s, t in q.arrows]
    found, buckets = [], {}
    covered = 0
    for entries in itertools.product(range(p), repeat=N):
        mats, pos = [], 0
        for (r, c) in shapes:
            mats.append(np.array(entries[pos:pos + r * c], dtype=np.int64).reshape(r, c))
            pos += r * c
        M = ModuleRep.from_quiver_rep(A, dims, mats, check=False)
        key = module_invariants(M)
        new = True
        for c in buckets.get(key, []):
            ok, _ = is_isomorphic(M, c.module, rng)
            if ok is None:
                raise PreconditionError("isomorphism test undecided during enumeration")
            if ok:
                new = False
                break
        if new:
            aut = module_aut_order(M, rng)
            if gl % aut:
                raise AssertionError("automorphism order does not divide |GL_d|")
            c = ModuleClass(M, dims, aut, gl // aut)
            found.append(c)
            buckets.setdefault(key, []).append(c)
            covered += c.orbit
            if covered == total:
                break
            if covered > total:
                raise AssertionError("orbit sizes exceed the number of representations")
    if covered != total:
        raise AssertionError("orbit-stabilizer count does not close up")
    return found


def dimension_vectors(n_vertices, caps=None, total_cap=None, weights=None):
    """All dimension vectors with per-vertex caps and a cap on Σ w_v d_v."""
    if caps is None:
        if total_cap is None:
            raise ValidationError("need per-vertex caps or a total cap")
        caps = [total_cap] * n_vertices
    weights = weights or [1] * n_vertices
    out = []
    for d in itertools.product(*[range(c + 1) for c in caps]):
        if total_cap is not None and sum(w * x for w, x in zip(weights, d)) > total_cap:
            continue
        out.append(tuple(d))
    return out


def module_classes_within(A, caps=None, total_cap=None, weights=None, bound=ENUM_BOUND, rng=None):
    out = []
    for d in dimension_vectors(A.n_idem, caps, total_cap, weights):
        out.extend(representation_classes(A, d, bound, rng))
    return out


# ---------------------------------------------------------------------------
# points

@dataclass
class ModuliPoint:
    representative: Complex
    cohomology: dict                   # {degree: per-vertex dims}
    aut_order: int
    ext: ExtTable
    tangent: dict                      # {i: dim Ext^{i+1}(E,E)}
    rigidity_index: int
    simple: bool
    key: tuple = ()

    @property
    def pi(self):
        """π_1 as a group order, π_i (i >= 2) as dimensions of Ext^{1-i}."""
        out = {1: self.aut_order}
        for i, d in self.ext.items():
            if 1 - i >= 2 and d:
                out[1 - i] = d
        return out

    def weight(self, q) -> Fraction:
        e = sum((-1) ** (i % 2) * d for i, d in ((1 - j, d) for j, d in self.ext.items()) if i >= 2)
        return Fraction(q) ** e / self.aut_order

    def is_rigid(self, n) -> bool:
        return self.rigidity_index <= n

    def to_json(self):
        from .io import complex_to_json
        return {"cohomology": {str(k): v for k, v in sorted(self.cohomology.items())},
                "aut_order": self.aut_order,
                "ext": self.ext.to_json(),
                "tangent": {str(k): v for k, v in sorted(self.tangent.items())},
                "pi": {str(k): v for k, v in sorted(self.pi.items())},
                "rigidity_index": self.rigidity_index,
                "simple": self.simple,
                "representative": complex_to_json(self.representative)}


def rigidity_index(ext) -> int:
    neg = [i for i, d in ext.items() if i <= -1 and d]
    return max(1, 1 - min(neg)) if neg else 1


def point_invariants(E: Complex, cutoff=10, rng=None, key=()) -> ModuliPoint:
    F = E.field
    if not F.p:
        raise PreconditionError("moduli points are computed over finite fields")
    if E.is_acyclic():
        return ModuliPoint(E, {}, 1, ExtTable(), {}, 1, False, key)
    from .complexes import cohomology
    coh = {n: H.vertex_dims() if E.algebra.n_idem else [H.dim] for n, H in cohomology(E).items()}
    end = end_algebra(E, cutoff)
    ext = end.ext
    aut = aut_order(E, cutoff, rng, end=end)
    tangent = {i - 1: d for i, d in ext.items()}
    ri = rigidity_index(ext)
    simple = ext[0] == 1 and ri == 1
    return ModuliPoint(E, coh, aut, ext, tangent, ri, simple, key)


# ---------------------------------------------------------------------------
# tables

@dataclass
class ClassTable:
    points: list
    q: int
    window: tuple
    nu: NuBound = None
    generator: list = None
    caps: tuple = None

    def __len__(self):
        return len(self.points)

    def audit_distinct(self):
        keys = [p.key for p in self.points]
        if len(set(keys)) != len(keys):
            raise AssertionError("duplicate class keys")
        return True

    def to_json(self):
        return {"q": self.q, "window": list(self.window),
                "nu": None if self.nu is None else self.nu.to_json(),
                "generator": self.generator,
                "caps": None if self.caps is None else list(self.caps),
                "count": len(self.points),
                "stacky_count": fraction_str(stacky_count(self)),
                "points": [p.to_json() for p in self.points]}

    def to_csv(self):
        lines = ["index,cohomology,aut_order,ext,tangent,rigidity_index,simple"]
        for i, p in enumerate(self.points):
            coh = ";".join(f"{k}:{'/'.join(map(str, v))}" for k, v in sorted(p.cohomology.items()))
            ext = ";".join(f"{k}:{v}" for k, v in sorted(p.ext.items()))
            tan = ";".join(f"{k}:{v}" for k, v in sorted(p.tangent.items()))
            lines.append(f"{i},{coh},{p.aut_order},{ext},{tan},{p.rigidity_index},{int(p.simple)}")
        return "\n".join(lines) + "\n"


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _degree_caps(window, nu, caps):
    a, b = window
    out = {}
    for i in range(a, b + 1):
        cap_total = nu(i) if nu is not None else None
        c = caps.get(i) if isinstance(caps, dict) else caps
        if cap_total is None and c is None:
            raise ValidationError("need ν or per-vertex caps for every degree of the window")
        out[i] = (c, cap_total)
    return out


def assemble(A, per_degree):
    """Direct sum of M_i[-i]; per_degree is {i: module}."""
    E = Complex(A, {}, {}, check=False)
    for i, M in sorted(per_degree.items()):
        if M.dim:
            E = E.direct_sum(Complex.concentrated(M, i))
    return E


def enumerate_classes(A: FinDimAlgebra, window, nu: NuBound = None, caps=None, generator=None,
                      bound=ENUM_BOUND, cutoff=10, rng=None, invariants=True) -> ClassTable:
    """All quasi-isomorphism classes with cohomology in the window, sorted by a canonical key.
    For hereditary path algebras a class is the sequence of iso-classes of its H^i."""
    if not hasattr(A, "quiver") or not A.quiver.is_acyclic():
        raise PreconditionError("enumeration is implemented for path algebras of acyclic quivers")
    p = A.field.p
    if not p:
        raise PreconditionError("enumeration needs a finite field")
    a, b = window
    if a > b:
        raise ValidationError("empty window")
    weights = _generator_weights(A, generator)
    dc = _degree_caps(window, nu, caps)
    per_degree = {}
    cache = {}
    for i in range(a, b + 1):
        c, total = dc[i]
        key = (tuple(c) if c is not None else None, total)
        if key not in cache:
            cache[key] = module_classes_within(A, c, total, weights, bound, rng)
        per_degree[i] = cache[key]
    degs = list(range(a, b + 1))
    points = []
    for combo in itertools.product(*[range(len(per_degree[i])) for i in degs]):
        mods = {i: per_degree[i][j].module for i, j in zip(degs, combo)}
        E = assemble(A, mods)
        key = tuple((i, per_degree[i][j].key) for i, j in zip(degs, combo) if per_degree[i][j].module.dim)
        if invariants:
            points.append(point_invariants(E, cutoff, rng, key))
        else:
            points.append(ModuliPoint(E, {}, 0, ExtTable(), {}, 0, False, key))
    points.sort(key=lambda pt: pt.key)
    table = ClassTable(points, p, (a, b), nu, weights, None if caps is None else
                       (caps if not isinstance(caps, dict) else tuple(sorted(caps.items()))))
    table.audit_distinct()
    return table


def stacky_count(table: ClassTable) -> Fraction:
    """Σ over classes of q^{Σ_{i>=2} (-1)^i dim Ext^{1-i}(E,E)} / |Aut(E)|."""
    total = Fraction(0)
    for pt in table.points:
        total += pt.weight(table.q)
    return total


def classify_rigidity(table: ClassTable, n=1):
    rigid = [p for p in table.points if p.is_rigid(n)]
    simple = [p for p in table.points if p.simple]
    if any(not p.is_rigid(1) for p in simple):
        raise AssertionError("a simple point must be 1-rigid")
    return (ClassTable(rigid, table.q, table.window, table.nu, table.generator, table.caps),
            ClassTable(simple, table.q, table.window, table.nu, table.generator, table.caps))


def gl_closed_form(n, q) -> Fraction:
    """Σ_{m <= n} 1 / |GL_m(F_q)|."""
    return sum((Fraction(1, la.gl_order(m, q)) for m in range(n + 1)), Fraction(0))
