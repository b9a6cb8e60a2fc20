"""Perfectness certificates, cell structures, Tor amplitude over Z and supports."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from sympy import factorint, primerange

from . import exact_linalg as la
from .complexes import (ChainMap, Complex, Replacement, cone, field_algebra, is_quasi_iso,
                        projective_replacement, vector_space)
from .errors import PreconditionError, ValidationError
from .modules import ModuleRep, ProjectiveModule
from .zcomplex import IntChainMap, IntComplex, int_cone


# ---------------------------------------------------------------------------
# perfectness over a finite-dimensional algebra

@dataclass
class Cell:
    degree: int           # the cell is h_x placed in this degree
    label: str            # label of the idempotent x
    idem: int
    attach: ChainMap      # h_x[-degree-1] -> previous stage


@dataclass
class CellStructure:
    cells: list
    replacement: Replacement = None

    def __len__(self):
        return len(self.cells)

    def replay(self, algebra):
        """Rebuild the complex by iterated cones along the attaching maps."""
        stage = Complex(algebra, {}, {}, check=False)
        for c in self.cells:
            if c.attach.target is not stage:
                c = Cell(c.degree, c.label, c.idem,
                         ChainMap(c.attach.source, stage, c.attach.comps, check=False))
            stage, _, _ = cone(c.attach)
        return stage

    def to_json(self):
        return [{"degree": c.degree, "generator": c.label} for c in self.cells]


@dataclass
class Verdict:
    kind: str                          # perfect | not_perfect | undetermined
    cells: CellStructure = None
    witness: tuple = None              # (n, m, iso) for not_perfect
    replacement: Replacement = None

    @property
    def perfect(self):
        return self.kind == "perfect"

    def to_json(self):
        d = {"verdict": self.kind}
        if self.cells is not None:
            d["cells"] = self.cells.to_json()
            d["cell_count"] = len(self.cells)
        if self.witness is not None:
            n, m, _ = self.witness
            d["periodic_syzygies"] = [n, m]
        return d


def is_perfect(C: Complex, cutoff=10, rng=None) -> Verdict:
    if C.is_zero():
        return Verdict("perfect", CellStructure([]))
    R = projective_replacement(C, cutoff=cutoff, detect_periodic=True, rng=rng)
    if R.status == "terminated":
        return Verdict("perfect", build_cells(R), replacement=R)
    if R.status == "periodic":
        n, m, iso = R.witness
        K, L = R.syzygies[n], R.syzygies[m]
        if not (iso.shape == (L.dim, K.dim) and la.rank(iso, K.field) == K.dim and K.dim
                and _is_map(iso, K, L)):
            raise AssertionError("periodicity witness failed to verify")
        return Verdict("not_perfect", witness=R.witness, replacement=R)
    return Verdict("undetermined", replacement=R)


def _is_map(f, M, N):
    from .modules import is_module_map
    return is_module_map(f, M, N)


def _one_term(M: ModuleRep, degree):
    return Complex(M.algebra, {degree: M}, {}, check=False)


def build_cells(R: Replacement) -> CellStructure:
    """One cell per indecomposable summand, from the top degree down.  Inside a
    degree the summands are attached last-first so the iterated cones
    reproduce P with its own ordering of summands."""
    P = R.P
    A = P.algebra
    F = A.field
    cells = []
    stage = Complex(A, {}, {}, check=False)
    for n in sorted(P.terms, reverse=True):
        Pn = P.terms[n]
        d = P.diff(n)
        for s in reversed(range(len(Pn.parts))):
            part = Pn.parts[s]
            off = Pn.offsets[s]
            src = _one_term(ProjectiveModule(A, [part.idem]), n + 1)
            blk = d[:, off:off + part.dim]
            # the stage already holds all of P^{n+1}, in P's own order
            comps = {n + 1: blk} if stage.term(n + 1).dim else {}
            f = ChainMap(src, stage, comps, check=False)
            cells.append(Cell(n, A.labels[part.idem], part.idem, f))
            stage, _, _ = cone(f)
    cs = CellStructure(cells, R)
    return cs


def cell_structure(C: Complex, verdict: Verdict = None, cutoff=10) -> CellStructure:
    if verdict is None:
        verdict = is_perfect(C, cutoff)
    if not verdict.perfect:
        raise PreconditionError("cell structure requested without a Perfect verdict")
    return verdict.cells


def verify_cells(C: Complex, cs: CellStructure) -> bool:
    """Replay the cones and check the result is quasi-isomorphic to C."""
    if not cs.cells:
        return C.is_acyclic()
    R = cs.replacement
    P = R.P
    rebuilt = cs.replay(P.algebra)
    for n in set(P.terms) | set(rebuilt.terms):
        a, b = P.term(n), rebuilt.term(n)
        if a.dim != b.dim or any(not la.mat_equal(x, y) for x, y in zip(a.action, b.action)):
            return False
        if not la.mat_equal(P.diff(n), rebuilt.diff(n)):
            return False
    q = ChainMap(rebuilt, C, R.q.comps, check=True)
    return is_quasi_iso(q)


# ---------------------------------------------------------------------------
# Tor amplitude over Z

@dataclass(frozen=True)
class AmplitudeBracket:
    lo: int = None
    hi: int = None
    witnesses: tuple = ()        # ((degree, residue characteristic), ...) at the endpoints

    @property
    def acyclic(self):
        return self.lo is None

    def contains(self, other: "AmplitudeBracket") -> bool:
        if other.acyclic:
            return True
        if self.acyclic:
            return False
        return self.lo <= other.lo and other.hi <= self.hi

    def within(self, a, b) -> bool:
        return self.acyclic or (a <= self.lo and self.hi <= b)

    def to_json(self):
        if self.acyclic:
            return "acyclic"
        return [self.lo, self.hi]

    def __repr__(self):
        return "acyclic" if self.acyclic else f"[{self.lo},{self.hi}]"


def _nonvanishing_degrees(C: IntComplex):
    """{n: residue characteristic seeing H^n} (0 for Q), over all residue fields."""
    out = {}
    for n in C.degrees():
        free = C.rank(n) - C.diff_rank(n) - C.diff_rank(n - 1)
        if free:
            out[n] = 0
            continue
        ds = [d for d in C.divisors.get(n, []) + C.divisors.get(n - 1, []) if d > 1]
        if ds:
            out[n] = min(min(factorint(d)) for d in ds)
    return out


def tor_amplitude_Z(C: IntComplex) -> AmplitudeBracket:
    if not isinstance(C, IntComplex):
        raise ValidationError("Tor amplitude over Z needs a complex of free abelian groups")
    nz = _nonvanishing_degrees(C)
    if not nz:
        return AmplitudeBracket()
    a, b = min(nz), max(nz)
    return AmplitudeBracket(a, b, ((a, nz[a]), (b, nz[b])))


def bracket_from_fields(C: IntComplex, primes) -> AmplitudeBracket:
    """Bracket read off from Q and the listed F_p by direct reduction."""
    degs = set(C.reduce_mod(0))
    for p in primes:
        degs |= set(C.reduce_mod(p))
    return AmplitudeBracket(min(degs), max(degs)) if degs else AmplitudeBracket()


def bracket_from_test_modules(C: IntComplex, max_m=30):
    """Definition check with the cyclic test modules Z/m (m <= max_m) and Z/p for
    the primes dividing some elementary divisor, plus Q for free parts."""
    ms = set(range(2, max_m + 1))
    for ds in C.divisors.values():
        for d in ds:
            if d > 1:
                ms.update(factorint(d))
    degs = set()
    for m in sorted(ms):
        degs |= set(C.torsion_test_orders(m))
    degs |= set(C.residue_dims(0))
    return AmplitudeBracket(min(degs), max(degs)) if degs else AmplitudeBracket()


def bracket_of_field_complex(C: Complex) -> AmplitudeBracket:
    h = C.cohomology_dims()
    return AmplitudeBracket(min(h), max(h)) if h else AmplitudeBracket()


# ---------------------------------------------------------------------------
# the shifted-free certificate and truncation steps

def _cycles_and_generators(C: IntComplex, n):
    """Z^n as a saturated basis K and free generators of H^n's minimal presentation:
    returns (K, gens) with gens a list of columns in C^n whose classes generate
    H^n, one per non-unit invariant factor."""
    c = C.rank(n)
    d = C.diff(n)
    if C.rank(n + 1) and c:
        U, D, V = la.smith_normal_form(d)
        r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
        K = V[:, r:]
        Vinv = la.int_inverse(V)
    else:
        r = 0
        K = la.int_eye(c)
        Vinv = la.int_eye(c)
    k = K.shape[1]
    if C.rank(n - 1) and k:
        M = Vinv.dot(C.diff(n - 1))[r:]
        U2, D2, V2 = la.smith_normal_form(M)
        units = sum(1 for i in range(min(D2.shape)) if abs(D2[i, i]) == 1)
        G = K.dot(la.int_inverse(U2))[:, units:]
    else:
        G = K
    return K, G


def free_certificate(C: IntComplex):
    """For bracket [a, a]: a map E[-a] -> C from a free module, checked to be a
    quasi-isomorphism.  Returns (rank of E, the chain map)."""
    br = tor_amplitude_Z(C)
    if br.acyclic or br.lo != br.hi:
        raise PreconditionError(f"free certificate needs a one-point bracket, got {br}")
    a = br.lo
    _, G = _cycles_and_generators(C, a)
    E = IntComplex({a: G.shape[1]}, {})
    f = IntChainMap(E, C, {a: G})
    if not int_cone(f).is_acyclic():
        raise AssertionError("shifted free certificate is not a quasi-isomorphism")
    return G.shape[1], f


@dataclass
class TruncationStep:
    top: int
    rank: int                 # rank of E
    map: object               # E[-top] -> C
    cofiber: object           # the cone D
    bracket: AmplitudeBracket


def underlying_vector_spaces(C: Complex) -> Complex:
    """C with the algebra action forgotten: a complex of vector spaces."""
    F = C.field
    if C.algebra.dim == 1:
        return C
    k = field_algebra(F)
    return Complex(k, {n: vector_space(F, M.dim) for n, M in C.terms.items()}, dict(C.diffs), check=False)


def truncation_step(C, b=None) -> TruncationStep:
    """A map E[-b] -> C from a free module onto the top cohomology; its cone has
    bracket inside [a, b-1].  Works over Z and over a field."""
    is_z = isinstance(C, IntComplex)
    br = tor_amplitude_Z(C) if is_z else bracket_of_field_complex(C)
    if br.acyclic:
        raise PreconditionError("degenerate bracket: complex is acyclic")
    if b is None:
        b = br.hi
    if br.lo >= b:
        raise PreconditionError(f"degenerate bracket {br}: nothing to truncate at {b}")
    if br.hi > b:
        raise PreconditionError(f"bracket {br} exceeds the declared top {b}")
    if is_z:
        if br.hi < b:
            G = la.int_matrix(np.zeros((C.rank(b), 0), dtype=np.int64), (C.rank(b), 0))
        else:
            _, G = _cycles_and_generators(C, b)
        E = IntComplex({b: G.shape[1]}, {})
        f = IntChainMap(E, C, {b: G} if G.shape[1] else {})
        D = int_cone(f)
        nb = tor_amplitude_Z(D)
    else:
        F = C.field
        C = underlying_vector_spaces(C)
        if br.hi < b:
            G = F.zeros((C.term(b).dim, 0))
        else:
            Z = la.nullspace(C.diff(b), F)
            Bm = la.image_basis(C.diff(b - 1), F)
            G = la.extend_mod(Bm, Z, F) if Bm.shape[1] else Z
        E = Complex(C.algebra, {b: vector_space(F, G.shape[1])}, {}, check=False)
        f = ChainMap(E, C, {b: G} if G.shape[1] else {})
        D, _, _ = cone(f)
        nb = bracket_of_field_complex(D)
    if not nb.within(br.lo, b - 1):
        raise AssertionError(f"truncation step left bracket {nb} outside [{br.lo},{b - 1}]")
    return TruncationStep(b, G.shape[1], f, D, nb)


@dataclass
class Peeling:
    steps: list
    final: object
    bracket: AmplitudeBracket
    certificate: tuple = None      # (rank, map) for the final one-point bracket

    def to_json(self):
        return {"bracket": self.bracket.to_json(), "steps": len(self.steps),
                "ranks": [s.rank for s in self.steps],
                "final_bracket": (tor_amplitude_Z(self.final) if isinstance(self.final, IntComplex)
                                  else bracket_of_field_complex(self.final)).to_json(),
                "final_free_rank": None if self.certificate is None else self.certificate[0]}


def peel(C) -> Peeling:
    """Iterate truncation steps from the top of the bracket down: exactly b - a steps."""
    is_z = isinstance(C, IntComplex)
    br = tor_amplitude_Z(C) if is_z else bracket_of_field_complex(C)
    steps = []
    cur = C
    if br.acyclic:
        return Peeling([], C, br)
    for top in range(br.hi, br.lo, -1):
        st = truncation_step(cur, top)
        steps.append(st)
        cur = st.cofiber
    cert = free_certificate(cur) if is_z else None
    return Peeling(steps, cur, br, cert)


# ---------------------------------------------------------------------------
# calculus checks

@dataclass
class CalculusReport:
    checks: dict = dc_field(default_factory=dict)
    details: dict = dc_field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    def to_json(self):
        return {"ok": self.ok, "checks": dict(self.checks), "details": dict(self.details)}


def _hull(b1: AmplitudeBracket, b2: AmplitudeBracket):
    if b1.acyclic:
        return b2
    if b2.acyclic:
        return b1
    return AmplitudeBracket(min(b1.lo, b2.lo), max(b1.hi, b2.hi))


def amplitude_calculus_check(P: IntComplex, Q: IntComplex, f: IntChainMap = None) -> CalculusReport:
    """Verify the bracket calculus: tensor products, fibers of maps, the
    one-point shifted-free certificate and the full peeling."""
    rep = CalculusReport()
    bp, bq = tor_amplitude_Z(P), tor_amplitude_Z(Q)
    bt = tor_amplitude_Z(P.tensor(Q))
    if bp.acyclic or bq.acyclic:
        rep.checks["tensor"] = bt.acyclic
    else:
        rep.checks["tensor"] = bt.within(bp.lo + bq.lo, bp.hi + bq.hi)
    rep.details["tensor"] = [repr(bp), repr(bq), repr(bt)]
    if f is not None:
        from .zcomplex import int_fiber
        h = _hull(bp, bq)
        bf = tor_amplitude_Z(int_fiber(f))
        rep.checks["fiber"] = h.acyclic and bf.acyclic or (not h.acyclic and bf.within(h.lo, h.hi + 1))
        rep.details["fiber"] = repr(bf)
    for name, C, b in (("P", P, bp), ("Q", Q, bq)):
        if not b.acyclic and b.lo == b.hi:
            try:
                r, _ = free_certificate(C)
                rep.checks[f"free_{name}"] = True
                rep.details[f"free_{name}"] = r
            except AssertionError:
                rep.checks[f"free_{name}"] = False
        if not b.acyclic:
            pl = peel(C)
            fb = tor_amplitude_Z(pl.final)
            rep.checks[f"peel_{name}"] = (len(pl.steps) == b.hi - b.lo and not fb.acyclic
                                          and fb.lo == fb.hi == b.lo and pl.certificate is not None)
    return rep


# ---------------------------------------------------------------------------
# supports

@dataclass(frozen=True)
class SupportSet:
    primes: frozenset
    generic: bool

    def __contains__(self, p):
        return self.generic or p in self.primes

    def union(self, other):
        return SupportSet(self.primes | other.primes, self.generic or other.generic)

    def to_json(self):
        return {"primes": sorted(self.primes), "generic": self.generic}


def support_primes(C: IntComplex) -> SupportSet:
    if not isinstance(C, IntComplex):
        raise ValidationError("support needs a complex of free abelian groups")
    ps = set()
    for ds in C.divisors.values():
        for d in ds:
            if d > 1:
                ps.update(factorint(d))
    generic = bool(C.residue_dims(0))
    return SupportSet(frozenset(ps), generic)


def support_by_reduction(C: IntComplex, bound=50):
    """Primes p <= bound with C ⊗ F_p not acyclic, by direct reduction."""
    return {p for p in primerange(2, bound + 1) if C.reduce_mod(p)}
