"""Command-line entry point: ``detpath <subcommand> ...``.

Every report is written with fixed key order and ``repr`` floats, so equal
flags give byte-identical files.
"""

import argparse
import csv
import logging
import sys

import numpy as np

from . import io
from .bench import ENSEMBLES, estimate_constant, write_records_csv
from .shorten import cusp_record
from .strata import project_to_rank
from .surgery import DEFAULT_EPS, build_path, split_segment

log = logging.getLogger("detpath")

CUSP_COLUMNS = ("h", "resolution", "d_ext", "d_int", "ratio")


def _u64(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _h_list(text):
    try:
        hs = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad h list {text!r}") from None
    if not hs or any(not 0 < h for h in hs):
        raise argparse.ArgumentTypeError("h values must be positive")
    return hs


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_path(args):
    A = io.read_matrix(args.a, args.n)
    B = io.read_matrix(args.b, args.n)
    cert = build_path(A, B, eps=args.eps)
    _emit(io.dumps(io.certificate_record(cert)), args.out)
    log.info("ratio %.6g, min det %.3g, feasible %s", cert.ratio, cert.min_det, cert.feasible)
    return 0 if cert.feasible else 1


def cmd_estimate(args):
    est, records = estimate_constant(
        args.n, args.samples, args.seed, eps=args.eps, shorten=args.shorten,
        ensemble=args.ensemble, n_jobs=args.jobs,
    )
    _emit(io.dumps(est.to_dict()), args.out)
    if args.csv:
        write_records_csv(records, args.csv)
    if est.infeasible_count:
        log.warning("%d of %d instances infeasible", est.infeasible_count, est.samples)
    return 0


def cmd_cusp(args):
    rows = [cusp_record(h, args.resolution) for h in args.h_list]
    if args.csv:
        fh = open(args.csv, "w", newline="")
    else:
        fh = sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CUSP_COLUMNS)
        for r in rows:
            w.writerow([repr(float(r[c])) for c in CUSP_COLUMNS])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_project(args):
    A = io.read_matrix(args.a, args.n)
    if not 0 <= args.rank <= A.shape[0]:
        raise ValueError(f"rank must lie in [0, {A.shape[0]}]")
    P = project_to_rank(A, args.rank)
    rec = {
        "n": int(A.shape[0]),
        "rank": int(args.rank),
        "matrix": [[float(x) for x in row] for row in P],
        "distance": float(np.linalg.norm(A - P)),
    }
    _emit(io.dumps(rec), None)
    return 0


def cmd_split(args):
    A = io.read_matrix(args.a, args.n)
    B = io.read_matrix(args.b, args.n)
    dec = split_segment(A, B)
    rec = {"crossings": [float(t) for t in dec.crossings], "signs": list(dec.interval_signs)}
    _emit(io.dumps(rec), None)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="detpath", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("path", help="certified GL+ path between two matrices")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", required=True, help="matrix file or inline 'r1;r2;...'")
    s.add_argument("--b", required=True)
    s.add_argument("--eps", type=float, default=DEFAULT_EPS)
    s.add_argument("--out", help="certificate JSON (default: stdout)")
    s.set_defaults(func=cmd_path)

    s = sub.add_parser("estimate-c", help="Monte Carlo estimate of the ratio constant")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=_u64, required=True)
    s.add_argument("--eps", type=float, default=DEFAULT_EPS)
    s.add_argument("--shorten", action="store_true")
    s.add_argument("--ensemble", choices=ENSEMBLES, default="gaussian")
    s.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")
    s.add_argument("--out", help="summary JSON (default: stdout)")
    s.add_argument("--csv", help="per-instance CSV")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("cusp-demo", help="intrinsic/extrinsic ratio across the cusp")
    s.add_argument("--h-list", type=_h_list, default=[0.4, 0.2, 0.1, 0.05])
    s.add_argument("--resolution", type=float, default=None,
                   help="grid step (default: h**1.5/100 per h)")
    s.add_argument("--csv", help="output table (default: stdout)")
    s.set_defaults(func=cmd_cusp)

    s = sub.add_parser("project", help="nearest matrix of bounded rank")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--rank", type=int, required=True)
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("split", help="determinant sign changes along the chord")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_split)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        parser.exit(2, f"detpath {args.command}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
