"""Command line entry point: ``dgmoduli <subcommand> [files] [flags]``.

Exit codes: 0 success, 1 failed scenario, 2 invalid input, 3 refused precondition,
4 undetermined verdict."""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import io
from .errors import DGModuliError, PreconditionError, Undetermined, ValidationError
from .fdalgebra import ENUM_BOUND, FinDimAlgebra
from .modules import module_from_json, simples_and_projectives
from .zcomplex import IntComplex

SUBCOMMANDS = ("certify", "hochschild", "morita", "bimod-equiv", "amplitude", "support", "peel",
               "enumerate", "point", "count", "ext", "aut", "cells", "scenario")


# ---------------------------------------------------------------------------
# input helpers

def _algebra(args, path) -> FinDimAlgebra:
    return io.algebra_document(io.load(path), args.q)


def _complex_doc(d):
    """Accept a complex, or a moduli point carrying its representative."""
    if "representative" in d and "terms" not in d:
        return d["representative"]
    return d


def _complex(args, path):
    d = _complex_doc(io.load(path))
    algebra = None
    if d.get("context") != "Z" and args.q is not None:
        ctx = d.get("context")
        if not isinstance(ctx, dict):
            raise ValidationError("complex needs an algebra context")
        algebra = io.algebra_document(ctx, args.q)
    return io.complex_from_json(d, algebra)


def _field_complexes(args, paths):
    """Complexes over a field.  A leading algebra or quiver file sets the algebra
    for the complexes after it, which may then omit their context."""
    docs = [_complex_doc(io.load(p)) for p in paths]
    algebra = None
    if docs and "terms" not in docs[0]:
        algebra = io.algebra_document(docs[0], args.q)
        docs = docs[1:]
        if not docs:
            raise ValidationError("no complex given after the algebra file")
    out = []
    for d in docs:
        if d.get("context") == "Z":
            raise ValidationError("this subcommand needs a complex of modules over a field")
        A = algebra
        if A is None and args.q is not None and isinstance(d.get("context"), dict):
            A = io.algebra_document(d["context"], args.q)
        out.append(io.complex_from_json(d, A))
    return out


def _field_complex(args, path):
    return _field_complexes(args, [path] if isinstance(path, str) else path)[0]


def _generator(args, A):
    """--generator FILE: module JSON, or {"multiplicities": [m_v, ...]} for ⊕ P_v^{m_v}."""
    if not args.generator:
        return None
    d = io.load(args.generator)
    if "multiplicities" in d:
        mult = [int(x) for x in d["multiplicities"]]
        if A is None:
            return mult
        if len(mult) != A.n_idem:
            raise ValidationError("one multiplicity per vertex expected")
        proj = [P for _, P in simples_and_projectives(A)]
        parts = [P for P, m in zip(proj, mult) for _ in range(m)]
        if not parts:
            raise PreconditionError("generator is zero")
        return parts[0].direct_sum(*parts[1:]) if len(parts) > 1 else parts[0]
    if A is None:
        raise ValidationError("module generator needs an algebra")
    return module_from_json(A, d.get("module", d))


def _window(args, default=None):
    if args.window is None:
        return default
    a, b = args.window
    if a > b:
        raise ValidationError("window must have A <= B")
    return (a, b)


# ---------------------------------------------------------------------------
# subcommands; each returns a JSON-ready dict

def cmd_certify(args):
    from .dgcat_props import certify
    A = _algebra(args, args.inputs[0])
    hh = _window(args, (0, 6))
    return certify(A, cutoff=args.cutoff, hh_degrees=hh, rng=_rng(args)).to_json()


def cmd_hochschild(args):
    from .dgcat_props import center_dim, hochschild
    A = _algebra(args, args.inputs[0])
    degs = _window(args, (0, 6))
    hh = hochschild(A, degrees=degs, cutoff=args.cutoff)
    return {"degrees": list(degs), "hochschild": {str(k): v for k, v in sorted(hh.items())},
            "center_dim": center_dim(A)}


def cmd_morita(args):
    from .dgcat_props import morita_transport
    A = _algebra(args, args.inputs[0])
    G = _generator(args, A)
    if G is None:
        raise ValidationError("morita needs --generator")
    targets = []
    for path in args.inputs[1:]:
        d = _complex_doc(io.load(path))
        targets.append(io.complex_from_json(d, A))
    r = morita_transport(G, targets, cutoff=args.cutoff)
    out = r.to_json()
    from .fdalgebra import algebra_to_json
    out["target_algebra"] = algebra_to_json(r.data.algebra)
    out["transported"] = [io.complex_to_json(C) for C in r.transported]
    return out


def cmd_bimod_equiv(args):
    from .dgcat_props import bimodule_is_equivalence, diagonal_bimodule, envelope
    A = _algebra(args, args.inputs[0])
    if len(args.inputs) > 1:
        d = io.load(args.inputs[1])
        if "module" in d:
            E = module_from_json(envelope(A), d["module"])
        else:
            twist = d.get("twist")
            E = diagonal_bimodule(A, twist)
            copies = int(d.get("copies", 1))
            if copies < 1:
                raise ValidationError("copies must be positive")
            if copies > 1:
                E = E.direct_sum(*[E] * (copies - 1))
    else:
        E = diagonal_bimodule(A)
    return bimodule_is_equivalence(E, cutoff=args.cutoff, rng=_rng(args)).to_json()


def cmd_amplitude(args):
    from .perfection import bracket_of_field_complex, tor_amplitude_Z
    C = _complex(args, args.inputs[0])
    b = tor_amplitude_Z(C) if isinstance(C, IntComplex) else bracket_of_field_complex(C)
    return {"bracket": b.to_json(), "witnesses": [list(w) for w in b.witnesses]}


def cmd_support(args):
    from .perfection import support_primes
    C = _complex(args, args.inputs[0])
    if not isinstance(C, IntComplex):
        raise ValidationError("support needs a complex of free abelian groups")
    return {"support": support_primes(C).to_json()}


def cmd_peel(args):
    from .perfection import peel
    C = _complex(args, args.inputs[0])
    return peel(C).to_json()


def _tables_args(args, A, doc):
    from .moduli import NuBound
    nu = NuBound.parse(args.nu) if args.nu is not None else None
    caps = None
    if args.caps is not None:
        try:
            caps = tuple(int(x) for x in args.caps.split(","))
        except ValueError:
            raise ValidationError(f"bad caps {args.caps!r}") from None
    window = _window(args)
    if window is None:
        if nu is None or not nu.support:
            if nu is not None:
                window = (0, 0)
            else:
                raise ValidationError("give --window or --nu")
        else:
            window = (min(nu.support), max(nu.support))
    return window, nu, caps


def cmd_enumerate(args):
    from .moduli import enumerate_classes
    A = _algebra(args, args.inputs[0])
    window, nu, caps = _tables_args(args, A, None)
    gen = _generator(args, A)
    t = enumerate_classes(A, window, nu=nu, caps=caps, generator=gen, bound=args.bound,
                          cutoff=args.cutoff, rng=_rng(args))
    if args.csv:
        return t.to_csv()
    return t.to_json()


def cmd_point(args):
    from .moduli import point_invariants
    C = _field_complex(args, args.inputs)
    return point_invariants(C, args.cutoff, _rng(args)).to_json()


def cmd_count(args):
    from .moduli import enumerate_classes, fraction_str, point_invariants, stacky_count
    d = io.load(args.inputs[0])
    if "points" in d:
        # a class table: recompute the weights of its representatives
        total = Fraction(0)
        q = None
        for p in d["points"]:
            C = io.complex_from_json(p["representative"])
            pt = point_invariants(C, args.cutoff, _rng(args))
            q = C.field.p
            total += pt.weight(q)
        return {"count": fraction_str(total), "classes": len(d["points"]), "q": q}
    A = io.algebra_document(d, args.q)
    window, nu, caps = _tables_args(args, A, d)
    t = enumerate_classes(A, window, nu=nu, caps=caps, generator=_generator(args, A), bound=args.bound,
                          cutoff=args.cutoff, rng=_rng(args))
    return {"count": fraction_str(stacky_count(t)), "classes": len(t), "q": t.q,
            "window": list(window), "nu": None if nu is None else nu.to_json()}


def cmd_ext(args):
    from .complexes import ext_dims
    cs = _field_complexes(args, args.inputs)
    C = cs[0]
    D = cs[1] if len(cs) > 1 else C
    C.field.check(D.field)
    degs = _window(args)
    tab = ext_dims(C, D, degrees=degs, cutoff=args.cutoff)
    if degs is not None:
        tab = {i: tab[i] for i in range(degs[0], degs[1] + 1)}
    return {"ext": {str(k): v for k, v in sorted(tab.items())}}


def cmd_aut(args):
    from .complexes import aut_order
    C = _field_complex(args, args.inputs)
    if not C.field.p:
        raise PreconditionError("automorphism counts need a finite field")
    return {"aut_order": aut_order(C, args.cutoff, _rng(args))}


def cmd_cells(args):
    from .perfection import cell_structure, is_perfect, verify_cells
    C = _field_complex(args, args.inputs)
    v = is_perfect(C, args.cutoff, _rng(args))
    if v.kind == "undetermined":
        raise Undetermined("perfectness undetermined within the cutoff")
    out = v.to_json()
    if v.kind == "perfect":
        cs = cell_structure(C, v)
        out["verified"] = verify_cells(C, cs)
    return out


# ---------------------------------------------------------------------------
# scenarios

def _subset_diff(expected, got, path=""):
    """Differences where ``expected`` is not contained in ``got``."""
    out = []
    if isinstance(expected, dict):
        if not isinstance(got, dict):
            return [{"path": path or "/", "expected": expected, "got": got}]
        for k, v in expected.items():
            if k == io.FORMAT_KEY:
                continue
            if k not in got:
                out.append({"path": f"{path}/{k}", "expected": v, "got": None})
            else:
                out.extend(_subset_diff(v, got[k], f"{path}/{k}"))
        return out
    if expected != got:
        out.append({"path": path or "/", "expected": expected, "got": got})
    return out


def _load_scenarios(path):
    d = io.load(path)
    base = os.path.dirname(os.path.abspath(path))
    items = d.get("scenarios")
    if not isinstance(items, list):
        raise ValidationError("scenario file needs a \"scenarios\" list")
    from .acceptance import CRITERIA
    prepared = []
    for i, s in enumerate(items):
        if not isinstance(s, dict) or "name" not in s:
            raise ValidationError(f"scenario {i} needs a name")
        if "check" in s:
            cid = s["check"]
            try:
                k = int(str(cid).split("-")[-1])
            except ValueError:
                k = None
            if k not in CRITERIA:
                raise ValidationError(f"unknown property check {cid!r}")
            prepared.append((s["name"], "check", k))
            continue
        sub = s.get("subcommand")
        if sub not in SUBCOMMANDS or sub == "scenario":
            raise ValidationError(f"scenario {s['name']!r}: bad subcommand {sub!r}")
        inputs = [os.path.join(base, f) for f in s.get("inputs", [])]
        for f in inputs:
            if not os.path.exists(f):
                raise ValidationError(f"scenario {s['name']!r}: missing input {f}")
        exp = s.get("expected")
        if isinstance(exp, str):
            exp = io.load(os.path.join(base, exp))
        if not isinstance(exp, dict):
            raise ValidationError(f"scenario {s['name']!r}: expected output must be a JSON object")
        argv = [sub] + inputs + [str(a) for a in s.get("args", [])]
        try:
            build_parser().parse_args(argv)
        except SystemExit:
            raise ValidationError(f"scenario {s['name']!r}: bad arguments") from None
        prepared.append((s["name"], "run", (argv, exp)))
    return prepared


def cmd_scenario(args):
    prepared = _load_scenarios(args.inputs[0])
    results = []
    for name, kind, payload in prepared:
        if kind == "check":
            from .acceptance import run_criterion
            r = run_criterion(payload, args.seed)
            diff = [] if r.passed else [{"criterion": payload, "correct": r.correct,
                                         "within_budget": r.elapsed < r.budget, "detail": r.detail}]
            results.append({"name": name, "passed": r.passed, "diff": diff})
        else:
            argv, exp = payload
            sub_args = build_parser().parse_args(argv + ["--seed", str(args.seed)])
            try:
                got = COMMANDS[sub_args.command](sub_args)
            except DGModuliError as e:
                got = {"error": type(e).__name__, "exit_code": e.exit_code, "message": str(e)}
            diff = _subset_diff(exp, got)
            results.append({"name": name, "passed": not diff, "diff": diff})
    failed = [r["name"] for r in results if not r["passed"]]
    return {"scenarios": len(results), "passed": len(results) - len(failed), "failed": failed,
            "results": results}


COMMANDS = {
    "certify": cmd_certify, "hochschild": cmd_hochschild, "morita": cmd_morita,
    "bimod-equiv": cmd_bimod_equiv, "amplitude": cmd_amplitude, "support": cmd_support,
    "peel": cmd_peel, "enumerate": cmd_enumerate, "point": cmd_point, "count": cmd_count,
    "ext": cmd_ext, "aut": cmd_aut, "cells": cmd_cells, "scenario": cmd_scenario,
}

def _rng(args):
    return np.random.default_rng(args.seed)


# ---------------------------------------------------------------------------
# output

def _human(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == io.FORMAT_KEY:
                continue
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_human(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}- [{i}]")
                lines.extend(_human(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return lines


def _flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def build_parser():
    p = argparse.ArgumentParser(prog="dgmoduli", description="Finite-dimensional algebras, "
                                "perfect complexes and field-valued points of their moduli.")
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("inputs", nargs="*", help="input JSON files")
    p.add_argument("--json", action="store_true", help="machine-readable JSON on stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--q", default=None, help="base field: a prime p, or Q")
    p.add_argument("--window", type=int, nargs=2, metavar=("A", "B"))
    p.add_argument("--nu", default=None, help="window bound, e.g. '0:1,1:2'")
    p.add_argument("--caps", default=None, help="per-vertex dimension caps, e.g. '1,1'")
    p.add_argument("--generator", default=None, metavar="FILE")
    p.add_argument("--bound", type=int, default=ENUM_BOUND, help="enumeration bound")
    p.add_argument("--csv", action="store_true", help="emit the class table as CSV")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.cutoff < 1:
        print("error: --cutoff must be positive", file=sys.stderr)
        return 2
    if not args.inputs:
        print(f"error: {args.command} needs an input file", file=sys.stderr)
        return 2
    try:
        out = COMMANDS[args.command](args)
    except DGModuliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    if isinstance(out, str):
        sys.stdout.write(out)
        return 0
    if args.json:
        sys.stdout.write(io.dumps(io.stamp(out)) + "\n")
    else:
        sys.stdout.write("\n".join(_human(out)) + "\n")
    if args.command == "scenario" and out["failed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
