"""Command line entry point: ``otfkm verify | list-cases | curvature-scan``."""
from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from .report import ConfigError, VerificationReport, fmt, load_config, parse_tolerance
from .suites import CASES, curvature_scan


def run_case(cfg) -> VerificationReport:
    suite, _ = CASES[cfg.case]
    t0 = time.perf_counter()
    checks = tuple(suite(cfg))
    rep = VerificationReport(cfg, checks)
    if cfg.timing:
        rep = rep.with_timing((time.perf_counter() - t0) * 1000.0)
    return rep


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="otfkm", description="Numerical checks for structures on OT-FKM hypersurfaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one verification case")
    v.add_argument("--case", help="case name (see list-cases)")
    v.add_argument("--config", help="JSON file with case, m, k, samples, seed, fd_step, tolerances")
    v.add_argument("--m", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--fd-step", type=float)
    v.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a check tolerance")
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--format", choices=["json", "csv-summary"], default="json")
    v.add_argument("--timing", action="store_true", help="record duration_ms (makes output non-reproducible)")

    sub.add_parser("list-cases", help="list the verification cases")

    c = sub.add_parser("curvature-scan", help="sectional curvatures of random planes on M_+^5")
    c.add_argument("--points", type=int, default=10)
    c.add_argument("--planes", type=int, default=100, help="planes per point")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)
    return ap


def _write(text: str, out):
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-cases":
        for name, (_, desc) in CASES.items():
            print(f"{name:18s} {desc}")
        return 0
    try:
        if args.command == "curvature-scan":
            cfg = load_config(seed=args.seed)
            if args.points < 1 or args.planes < 1:
                raise ConfigError("--points and --planes must be positive")
            rows, *_ = curvature_scan(cfg, args.points, args.planes)
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["point_index", "plane_index", "K"])
                for i, j, K in rows:
                    w.writerow([i, j, fmt(K)])
            print(f"min K = {fmt(min(K for *_, K in rows))} over {len(rows)} planes", file=sys.stderr)
            return 0
        tols = dict(parse_tolerance(t) for t in args.tol)
        cfg = load_config(args.config, known_cases=CASES, case=args.case, m=args.m, k=args.k,
                          samples=args.samples, seed=args.seed, fd_step=args.fd_step,
                          tolerances=tols, timing=args.timing or None)
    except (ConfigError, OSError) as err:
        print(f"otfkm: error: {err}", file=sys.stderr)
        return 2
    rep = run_case(cfg)
    _write(rep.to_json() if args.format == "json" else rep.to_csv(), args.out)
    for c in rep.checks:
        print(c.line(), file=sys.stderr)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
