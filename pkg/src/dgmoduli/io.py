"""JSON documents.  Every document carries "dgmoduli-format": 1."""
from __future__ import annotations

import json


from .complexes import ChainMap, Complex
from .errors import CoefficientMismatch, ValidationError
from .fdalgebra import FinDimAlgebra, Quiver, algebra_from_json, algebra_to_json, parse_field
from .modules import module_from_json, module_to_json
from .zcomplex import IntComplex

FORMAT_KEY = "dgmoduli-format"
FORMAT_VERSION = 1


def stamp(d: dict) -> dict:
    out = {FORMAT_KEY: FORMAT_VERSION}
    out.update(d)
    return out


def check_version(d):
    if not isinstance(d, dict):
        raise ValidationError("expected a JSON object")
    v = d.get(FORMAT_KEY, FORMAT_VERSION)
    if v != FORMAT_VERSION:
        raise ValidationError(f"unsupported {FORMAT_KEY} {v!r}")
    return d


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return check_version(json.load(fh))
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}") from None


def dumps(d) -> str:
    return json.dumps(d, indent=2, sort_keys=True, ensure_ascii=False)


def complex_to_json(C) -> dict:
    if isinstance(C, IntComplex):
        return stamp(C.to_json())
    F = C.field
    A = C.algebra
    return stamp({
        "context": algebra_to_json(A),
        "window": [C.lo, C.hi],
        "terms": {str(n): module_to_json(M) for n, M in sorted(C.terms.items())},
        "differentials": {str(n): F.matrix_to_json(d) for n, d in sorted(C.diffs.items())},
    })


def _check_context(ctx, algebra):
    """A complex carrying its own context must agree with the algebra it is read over."""
    if "field" in ctx and parse_field(ctx["field"]) != algebra.field:
        raise CoefficientMismatch(f"complex is over {ctx['field']}, algebra is over {algebra.field}")
    if "quiver" in ctx:
        if not hasattr(algebra, "quiver") or Quiver.from_json(ctx["quiver"]) != algebra.quiver:
            raise CoefficientMismatch("complex context has a different quiver")
    elif "dim" in ctx and int(ctx["dim"]) != algebra.dim:
        raise CoefficientMismatch("complex context has a different algebra")


def complex_from_json(d, algebra: FinDimAlgebra = None):
    check_version(d)
    ctx = d.get("context")
    if ctx == "Z":
        return IntComplex.from_json(d)
    if algebra is None:
        if not isinstance(ctx, dict):
            raise ValidationError("complex needs an algebra context")
        algebra = algebra_from_json(ctx)
    elif isinstance(ctx, dict):
        _check_context(ctx, algebra)
    F = algebra.field
    try:
        window = d.get("window")
        raw_terms = d["terms"]
        if isinstance(raw_terms, list):
            if window is None:
                raise ValidationError("list-form terms need a window")
            raw_terms = {window[0] + i: t for i, t in enumerate(raw_terms)}
        terms = {int(k): module_from_json(algebra, v) for k, v in raw_terms.items()}
        if window is not None:
            lo, hi = int(window[0]), int(window[1])
            if lo > hi + 1:
                raise ValidationError("bad window")
            if any(M.dim and not lo <= n <= hi for n, M in terms.items()):
                raise ValidationError("term outside the declared window")
        diffs = {}
        for k, m in d.get("differentials", {}).items():
            k = int(k)
            shape = (terms[k + 1].dim if k + 1 in terms else 0, terms[k].dim if k in terms else 0)
            diffs[k] = F.asarray(m, shape) if shape[0] * shape[1] else F.zeros(shape)
        return Complex(algebra, terms, diffs, check=True)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"bad complex JSON: {e}") from None


def chain_map_to_json(f: ChainMap) -> dict:
    F = f.source.field
    return stamp({"components": {str(n): F.matrix_to_json(m) for n, m in sorted(f.comps.items())}})


def chain_map_from_json(d, source: Complex, target: Complex) -> ChainMap:
    check_version(d)
    F = source.field
    comps = {}
    for k, m in d.get("components", {}).items():
        k = int(k)
        shape = (target.term(k).dim, source.term(k).dim)
        comps[k] = F.asarray(m, shape) if shape[0] * shape[1] else F.zeros(shape)
    return ChainMap(source, target, comps)


def algebra_document(d, q=None) -> FinDimAlgebra:
    """Algebra from a document: explicit algebra JSON, or a bare quiver (field from --q)."""
    check_version(d)
    field = parse_field(q) if q is not None else (parse_field(d["field"]) if "field" in d else None)
    if field is None:
        raise ValidationError("no field given: add \"field\" or pass --q")
    if "context" in d and isinstance(d["context"], dict):
        d = d["context"]
    return algebra_from_json(d, field)
