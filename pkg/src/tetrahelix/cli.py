"""Command-line interface: ``tetrahelix generate|search|verify|fixtures``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .assembly import FaceRule, HelixSpec, assemble
from .axisfit import align_to_z, fit_helix
from .errors import NotPeriodic, TetrahelixError, TranscriptionMismatch
from .export import ChainDocument, roots_to_csv, roots_to_json, to_obj, to_ply
from .fixtures import TABLE1, TABLE1_EXACT, cross_validate, fixture_to_json, load
from .periodicity import EXACT_FORMS, DETECT_TOL, detect_period, misalignment_grid, search_beta

TABLE_TOL = 2e-5
EXACT_TOL = 1e-12
SEARCH_RANGE = range(2, 21)


class _UsageError(Exception):
    """Flag combination argparse cannot reject by itself (exit 2)."""


def _beta_for_period(m: int, chirality: str) -> float:
    """Period-``m`` beta for the given handedness: closed form when known,
    else the principal-branch root nearest the tabulated value."""
    sign = 1.0 if chirality == "right" else -1.0
    if m in TABLE1_EXACT:
        return sign * EXACT_FORMS[TABLE1_EXACT[m]]
    roots = search_beta(m, FaceRule.from_name(chirality), principal=True)
    if not roots:
        raise NotPeriodic(f"no beta gives least period {m}")
    target = sign * TABLE1[m][0] if m in TABLE1 else 0.0
    return min(roots, key=lambda r: abs(r.beta - target)).beta


def cmd_generate(args) -> int:
    rule = FaceRule.from_name(args.chirality)
    if args.period is not None:
        if args.period < 2:
            raise _UsageError("--period must be at least 2")
        beta = _beta_for_period(args.period, args.chirality)
    else:
        beta = args.beta
        if not -math.pi < beta <= math.pi:
            raise _UsageError("--beta must lie in (-pi, pi]")
    count = args.count if args.count is not None else (3 * args.period if args.period else 12)
    if count < 1:
        raise _UsageError("--count must be positive")

    chain = assemble(HelixSpec(beta, count, rule))
    period = detect_period(beta, rule, bound=max(25, args.period or 0), tol=args.tolerance)
    analysis = None
    if period.periodic:
        m = period.least_period
        # the fit needs two full periods plus one
        aux = assemble(HelixSpec(beta, max(count, 2 * m + 1), rule))
        analysis = fit_helix(aux, m, tol=args.tolerance)
        if args.align_z:
            chain, _ = align_to_z(chain, analysis)
            analysis = fit_helix(align_to_z(aux, analysis)[0], m, tol=args.tolerance)
    elif args.align_z:
        raise NotPeriodic(f"beta={beta!r} has no period up to {period.bound}; cannot find an axis")

    doc = ChainDocument.from_chain(chain, beta, rule.to_json(), period, analysis)
    if args.format == "json":
        _emit(args.out, doc.dumps())
        return 0
    mesh = to_obj(doc) if args.format == "obj" else to_ply(doc)
    _emit(args.out, mesh)
    if args.out:
        Path(args.out).with_suffix(".json").write_text(doc.dumps(), encoding="utf-8")
    return 0


def cmd_search(args) -> int:
    rule = FaceRule.from_name(args.chirality)
    if args.all:
        periods = list(SEARCH_RANGE)
    elif args.m in SEARCH_RANGE:
        periods = [args.m]
    else:
        raise _UsageError(f"--m must be in {SEARCH_RANGE.start}..{SEARCH_RANGE.stop - 1}")
    roots = []
    for m in periods:
        roots.extend(search_beta(m, rule, step=args.step, principal=args.principal))
    text = roots_to_csv(roots) if args.format == "csv" else roots_to_json(roots)
    _emit(args.out, text)
    if not roots:
        print("no roots found", file=sys.stderr)
    return 0


def _table1_checks(step: float):
    """Yield ``(label, ok, detail)`` for every period listed in the table."""
    for m, betas in TABLE1.items():
        found = [r.beta for r in search_beta(m, FaceRule.right(), step=step, principal=True)]
        tol = EXACT_TOL if m in TABLE1_EXACT else TABLE_TOL
        ok = len(found) == len(betas) and all(abs(a - b) <= tol for a, b in zip(sorted(found), sorted(betas)))
        detail = f"found {[round(b, 7) for b in found]} listed {list(betas)}"
        yield f"table m={m}", ok, detail


def _period6_check():
    step = 1e-4
    n = int(math.ceil(2.0 * math.pi / step))
    grid = -math.pi + 2.0 * math.pi * (1 + np.arange(n)) / n
    roots = search_beta(6, FaceRule.right(), step=step, refine_below=1e-3, tol=1e-3)
    floor = float(misalignment_grid(grid, 6).min())
    return "period 6 absent", not roots, f"{len(roots)} roots, grid floor {floor:.3e}"


def cmd_verify(args) -> int:
    checks = []
    for name in args.set or []:
        fs = load(name)
        report = cross_validate(fs, strict=False)
        for item, dev in report.items:
            checks.append((f"{fs.name} {item}", dev <= report.tol, f"deviation {dev:.2e}"))
    if args.table1:
        checks.extend(_table1_checks(args.step))
    if args.period6:
        checks.append(_period6_check())
    if not checks:
        raise _UsageError("nothing to verify: give --set, --table1 or --period6")
    failed = 0
    for label, ok, detail in checks:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def cmd_fixtures(args) -> int:
    _emit(args.out, json.dumps(fixture_to_json(load(args.set)), indent=2) + "\n")
    return 0


def _emit(path, payload):
    if path:
        mode = "wb" if isinstance(payload, bytes) else "w"
        with open(path, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(payload)
    elif isinstance(payload, bytes):
        sys.stdout.buffer.write(payload)
    else:
        sys.stdout.write(payload)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tetrahelix", description="Chains of face-sharing regular tetrahedra.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="assemble a chain and write a mesh or JSON document")
    which = g.add_mutually_exclusive_group(required=True)
    which.add_argument("--period", type=int, metavar="M", help="least period; picks the matching beta")
    which.add_argument("--beta", type=float, metavar="X", help="rotation angle in radians, in (-pi, pi]")
    g.add_argument("--chirality", choices=("right", "left"), default="right", help="face rule (default: right)")
    g.add_argument("--count", type=int, metavar="N", help="tetrahedra to emit (default: 3m, or 12 for --beta)")
    g.add_argument("--align-z", action="store_true", help="rotate the helix axis onto +z; needs a periodic beta")
    g.add_argument("--format", choices=("obj", "ply", "json"), default="obj")
    g.add_argument("--out", metavar="PATH", help="write here plus a .json sidecar; stdout otherwise")
    g.add_argument("--tolerance", type=float, default=DETECT_TOL, help="period detection residual bound")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("search", help="find beta values with a given least period")
    rng = s.add_mutually_exclusive_group(required=True)
    rng.add_argument("--m", type=int, help="least period, 2..20")
    rng.add_argument("--all", action="store_true", help="every m in 2..20")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--step", type=float, default=1e-3, help="grid spacing before refinement")
    s.add_argument("--principal", action="store_true", help="keep roots on the principal beta branch only")
    s.add_argument("--chirality", choices=("right", "left"), default="right")
    s.add_argument("--out", metavar="PATH", help="output file; stdout otherwise")
    s.set_defaults(func=cmd_search)

    v = sub.add_parser("verify", help="cross-check fixtures and tabulated roots")
    v.add_argument("--set", action="append", choices=("5bc", "3bc"), help="fixture set to audit; repeatable")
    v.add_argument("--table1", action="store_true", help="compare searched roots with the tabulated angles")
    v.add_argument("--period6", action="store_true", help="confirm no beta has least period 6")
    v.add_argument("--step", type=float, default=1e-3, help="grid spacing for --table1")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fixtures", help="export a closed-form fixture set as JSON")
    f.add_argument("--set", choices=("5bc", "3bc"), required=True)
    f.add_argument("--out", metavar="PATH", help="output file; stdout otherwise")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tetrahelix: error: {exc}", file=sys.stderr)
        return 2
    except TranscriptionMismatch as exc:
        print(f"tetrahelix: {exc}", file=sys.stderr)
        return 1
    except TetrahelixError as exc:
        print(f"tetrahelix: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
