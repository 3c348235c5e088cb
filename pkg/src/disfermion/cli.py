"""Command line entry point: ``disfermion <command> [options]``.

Scalars and verdicts are written as JSON, tables as CSV.  Every output
carries a run manifest; apart from ``runtime_ms`` it depends only on the
command line, so identical manifests give identical outputs.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import re
import sys
import time

import numpy as np
import scipy

from . import __version__
from ._accel import BACKEND as PFAFFIAN_BACKEND
from .dimers import UnbalancedGraphError
from .exact import as_complex
from .lattice import DomainError
from .monomials import PreconditionError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
FLOAT_DEFAULT = {"converge": "float"}

_RECT = re.compile(r"^\s*rect\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*$")


class InputError(ValueError):
    pass


# ----------------------------------------------------------------------
# parsing helpers


def parse_point(text: str):
    try:
        x, y = (int(v) for v in text.replace("(", "").replace(")", "").split(","))
    except ValueError:
        raise InputError(f"bad point {text!r}, expected x,y") from None
    return (x, y)


def parse_pairs(text: str):
    """``"1,0:0,0;0,1:1,1"`` -> ``[((1, 0), (0, 0)), ((0, 1), (1, 1))]``."""
    out = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        if ":" not in chunk:
            raise InputError(f"bad pair {chunk!r}, expected wx,wy:bx,by")
        w, b = chunk.split(":")
        out.append((parse_point(w), parse_point(b)))
    return out


def load_domain(text: str | None, sink: str | None):
    from .lattice import Domain

    if text is None:
        raise InputError("--domain is required")
    s = parse_point(sink) if sink else None
    m = _RECT.match(text)
    if m:
        return Domain.rect(*(int(v) for v in m.groups()), sink=s)
    if not os.path.exists(text):
        raise InputError(f"--domain {text!r} is neither rect(x0,y0,x1,y1) nor a JSON file")
    return Domain.load(text, sink=s)


def _exact_json(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    c = as_complex(v)
    return {"exact": str(v), "re": c.real, "im": c.imag}


# ----------------------------------------------------------------------
# manifest and output


def manifest(args, seconds: float | None = None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("out", "jobs", "func") and v is not None}
    digest = hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()
    out = {
        "command": args.command + (f" {args.action}" if getattr(args, "action", None) else ""),
        "config_hash": digest[:16],
        "config": config,
        "backend": getattr(args, "backend", "exact"),
        "tolerances": {"tol": args.tol},
        "seed": args.seed,
        "versions": {"disfermion": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version(), "pfaffian": PFAFFIAN_BACKEND},
    }
    if seconds is not None:
        out["runtime_ms"] = int(round(seconds * 1000))
    return out


def emit_json(args, payload: dict, seconds: float):
    text = json.dumps({"manifest": manifest(args, seconds), **payload}, indent=2, sort_keys=True,
                      default=str)
    _write(args, text + "\n")


def emit_csv(args, header, rows, seconds: float):
    buf = io.StringIO()
    buf.write("# manifest " + json.dumps(manifest(args, seconds), sort_keys=True, default=str) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    _write(args, buf.getvalue())


def _write(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# commands; each returns (kind, payload, ok)


def cmd_count(args):
    from .dimers import count_covers, induce

    g = induce(load_domain(args.domain, args.sink))
    return "json", {"covers": count_covers(g, backend=args.backend)}, True


def cmd_edges(args):
    from .dimers import edge_open_probability, induce

    g = induce(load_domain(args.domain, args.sink))
    rows = []
    for b, w in g.edge_list():
        p = edge_open_probability(g, (b, w))
        rows.append([f"{b[0]},{b[1]}", f"{w[0]},{w[1]}", str(p), float(p)])
    return "csv", (["black", "white", "probability", "probability_float"], rows), True


def cmd_observable(args):
    from .dimers import induce
    from .observables import pair_observable, pair_observable_disjoint

    g = induce(load_domain(args.domain, args.sink))
    pairs = parse_pairs(args.pairs)
    fn = pair_observable if args.unrestricted else pair_observable_disjoint
    rv = fn(g, pairs)
    return "json", {"pairs": pairs, "paths": "unrestricted" if args.unrestricted else "disjoint",
                    "covers": len(rv.covers), "expectation": _exact_json(rv.expectation())}, True


def cmd_berezin(args):
    from .dimers import induce
    from .grassmann import FermionAction, correlator

    g = induce(load_domain(args.domain, args.sink))
    pairs = parse_pairs(args.pairs)
    ins = [x for w, b in pairs for x in (("eta", w), ("xi", b))]
    val = correlator(FermionAction(g), ins)
    return "json", {"pairs": pairs, "correlator": _exact_json(val)}, True


def cmd_twopoint(args):
    from .correlators import coupling_table
    from .dimers import induce

    g = induce(load_domain(args.domain, args.sink))
    t = coupling_table(g, args.backend)
    pairs = parse_pairs(args.pairs)
    return "json", {"pairs": pairs, "wick": _exact_json(t.multipoint(pairs))}, True


def cmd_holocheck(args):
    from .correlators import coupling_table, verify_holomorphicity
    from .dimers import induce

    g = induce(load_domain(args.domain, args.sink))
    rep = verify_holomorphicity(coupling_table(g, args.backend), tol=args.tol)
    return "json", {"ok": rep.ok, "checked": rep.checked,
                    "violation": None if rep.violation is None else str(rep.violation)}, rep.ok


def cmd_green(args):
    from .greens import check_two_point_green

    d = load_domain(args.domain, args.sink)
    whites = [parse_point(args.w)] if args.w else [
        w for w in d.whites if abs(w[0] - d.sink[0]) + abs(w[1] - d.sink[1]) != 1]
    bad, checked = [], 0
    for w in whites:
        rep = check_two_point_green(d, w)
        checked += rep.checked
        bad += [str(v) for v in rep.violations]
    return "json", {"ok": not bad, "checked": checked, "violations": bad[:20]}, not bad


def cmd_converge(args):
    from .acceptance import CONVERGENCE_PAIRS, convergence_rows

    pairs = parse_pairs(args.pairs) if args.pairs else list(CONVERGENCE_PAIRS)
    rows = convergence_rows(args.nmax, pairs)
    header = ["n", "side"] + [f"abs_err[{w[0]},{w[1]}:{z[0]},{z[1]}]" for w, z in pairs] + ["edge_open"]
    return "csv", (header, [[n, side, *errs, p] for n, side, errs, p in rows]), True


def cmd_monomials(args):
    from .monomials import build_family, load_family, verify_family

    if args.action == "build":
        fam = build_family(args.nmax, args.rmax)
        if args.file:
            fam.save(args.file)
        return "json", {"family": fam.manifest(), "file": args.file}, True
    fam = load_family(args.file) if args.file else build_family(args.nmax, args.rmax)
    rep = verify_family(fam, nmax=min(args.nmax, fam.nmax), tol=args.tol)
    return "json", {"ok": rep.ok, "properties": rep.to_json()}, rep.ok


def _field_arg(args):
    from .fields import parse_field

    try:
        return parse_field(args.field)
    except ValueError as e:
        raise InputError(str(e)) from None


def _suite(args):
    from .fields import DEFAULT_SUITE, ProbeSuite

    if args.halves:
        return ProbeSuite(halves=tuple(int(h) for h in args.halves.split(",")))
    return DEFAULT_SUITE


def cmd_nullcheck(args):
    from .fields import is_null

    v = is_null(_field_arg(args), R=args.R, suite=_suite(args), tol=args.tol)
    return "json", v.to_json(), True


def cmd_anticommute(args):
    from .fields import anticommutator_check

    F = _field_arg(args)
    out, ok = [], True
    for a, n, b, m in _grid4(args):
        rep = anticommutator_check(a, n, b, m, F, tol=args.tol, suite=_suite(args))
        ok = ok and bool(rep.ok)
        out.append({"alpha": a, "n": n, "beta": b, "m": m, "expected_scalar": str(rep.expected),
                    **rep.verdict.to_json()})
    return "json", {"ok": ok, "checks": out}, ok


def _grid4(args):
    alphas = [args.alpha] if args.alpha else ["+", "-"]
    betas = [args.beta] if args.beta else ["+", "-"]
    ns = [args.n] if args.n is not None else range(-args.max, args.max + 1)
    ms = [args.m] if args.m is not None else range(-args.max, args.max + 1)
    return [(a, n, b, m) for a in alphas for b in betas for n in ns for m in ms]


def cmd_virasoro(args):
    from .virasoro import central_charge_fit, commutator_check

    F = _field_arg(args)
    ns = [args.n] if args.n is not None else range(-args.max, args.max + 1)
    ms = [args.m] if args.m is not None else range(-args.max, args.max + 1)
    out, ok = [], True
    for n in ns:
        for m in ms:
            rep = commutator_check(n, m, F, tol=args.tol, suite=_suite(args))
            ok = ok and bool(rep.ok)
            out.append(rep.to_json())
    payload = {"ok": ok, "checks": out}
    if args.fit:
        fit = central_charge_fit(F, suite=_suite(args))
        payload["central_charge"] = fit.c
        payload["scalars"] = {str(k): [v.real, v.imag] for k, v in fit.scalars.items()}
    return "json", payload, ok


def cmd_suite(args):
    from .acceptance import CRITERIA, QUICK, run_criterion

    numbers = QUICK if args.quick else sorted(CRITERIA)
    if args.only:
        numbers = [int(k) for k in args.only.split(",")]
    results = []
    for k in numbers:
        r = run_criterion(k, jobs=args.jobs)
        print(r.line(), file=sys.stderr, flush=True)
        results.append(r)
    ok = all(r.ok for r in results)
    return "json", {"ok": ok, "criteria": [r.to_json() for r in results],
                    "failed": [r.number for r in results if not r.ok]}, ok


COMMANDS = {
    "count": cmd_count, "edges": cmd_edges, "observable": cmd_observable, "berezin": cmd_berezin,
    "twopoint": cmd_twopoint, "holocheck": cmd_holocheck, "green": cmd_green,
    "converge": cmd_converge, "monomials": cmd_monomials, "nullcheck": cmd_nullcheck,
    "anticommute": cmd_anticommute, "virasoro": cmd_virasoro, "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", help="rect(x0,y0,x1,y1) or a JSON file")
    common.add_argument("--sink", help="sink vertex x,y")
    # per-command default resolved in main; set_defaults would leak through the shared parent
    common.add_argument("--backend", choices=("exact", "float"))
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="disfermion", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("count", "edges", "holocheck"):
        sub.add_parser(name, parents=[common])
    for name in ("observable", "berezin", "twopoint"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--pairs", required=True, help="wx,wy:bx,by;...")
        if name == "observable":
            s.add_argument("--unrestricted", action="store_true",
                           help="sum over all path systems instead of disjoint ones")
    s = sub.add_parser("green", parents=[common])
    s.add_argument("--w", help="white vertex (default: every admissible one)")
    s = sub.add_parser("converge", parents=[common])
    s.add_argument("--nmax", type=int, default=20)
    s.add_argument("--pairs")
    s = sub.add_parser("monomials", parents=[common])
    s.add_argument("action", choices=("build", "verify"))
    s.add_argument("--nmax", type=int, default=6)
    s.add_argument("--rmax", type=int, default=34)
    s.add_argument("--file", help=".npz family file")
    for name in ("nullcheck", "anticommute", "virasoro"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--field", required=True, help='e.g. "eta(1,0)*xi(0,0)"')
        s.add_argument("--halves", help="probe domain half sides, e.g. 8,12,16")
        if name == "nullcheck":
            s.add_argument("--R", type=int)
        else:
            s.add_argument("--n", type=int)
            s.add_argument("--m", type=int)
            s.add_argument("--max", type=int, default=2)
        if name == "anticommute":
            s.add_argument("--alpha", choices=("+", "-"))
            s.add_argument("--beta", choices=("+", "-"))
        if name == "virasoro":
            s.add_argument("--fit", action="store_true", help="also fit the central charge")
    s = sub.add_parser("suite", parents=[common])
    s.add_argument("--quick", action="store_true", help="exact fixtures only")
    s.add_argument("--only", help="comma separated criterion numbers")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.backend is None:
        args.backend = FLOAT_DEFAULT.get(args.command, "exact")
    t0 = time.perf_counter()
    try:
        kind, payload, ok = COMMANDS[args.command](args)
    except (InputError, DomainError, UnbalancedGraphError, PreconditionError) as e:
        emit_json(args, {"ok": False, "error": "input", "message": str(e)}, time.perf_counter() - t0)
        return EXIT_INPUT
    except Exception as e:  # machine-readable failure record
        emit_json(args, {"ok": False, "error": type(e).__name__, "message": str(e)},
                  time.perf_counter() - t0)
        return EXIT_FAIL
    dt = time.perf_counter() - t0
    if kind == "csv":
        emit_csv(args, *payload, dt)
    else:
        emit_json(args, payload, dt)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
