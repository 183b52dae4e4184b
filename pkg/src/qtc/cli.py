"""``qtc`` command-line front end.

Every command writes a ``#``-prefixed JSON metadata line (version, command,
config echo, seed, wall time) followed by CSV rows, or a single JSON
document for ``optimize``.  Progress goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time

import numpy as np

from . import __version__
from .channel import (
    EA_HASHING_PMAX,
    DepolarizingChannel,
    bsc_capacity,
    db_gap,
    fourary_classical_capacity,
    hashing_bound,
)
from .exitchart import (
    DEFAULT_FRAMES,
    DEFAULT_GRID,
    DEFAULT_LENGTH,
    ThresholdError,
    inner_curve,
    optimize_search,
    outer_curve,
    threshold_search,
)
from .parallel import STREAM_EXIT, STREAM_SEARCH, default_workers, unit_rng, worker_map
from .qcc import distance_spectrum
from .registry import Registry, resolve_seed
from .turbo import DEFAULT_ITERATIONS, TurboSystem, run_qber, trajectory

log = logging.getLogger("qtc")


class UsageError(Exception):
    pass


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _p_values(args) -> list[float]:
    if args.p is not None:
        ps = args.p
    elif args.p_min is not None and args.p_max is not None and args.p_step is not None:
        if args.p_step <= 0 or args.p_max < args.p_min:
            raise UsageError("need --p-step > 0 and --p-max >= --p-min")
        count = int(math.floor((args.p_max - args.p_min) / args.p_step + 1e-9)) + 1
        ps = [round(args.p_min + i * args.p_step, 12) for i in range(count)]
    elif args.p_min is not None and args.p_max is not None:
        if args.points < 1:
            raise UsageError("--points must be at least 1")
        ps = [float(x) for x in np.linspace(args.p_min, args.p_max, args.points)]
    else:
        raise UsageError("give --p or both --p-min and --p-max")
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise UsageError(f"depolarizing probability {p} outside [0, 1]")
    return ps


def _positive(name, v):
    if v < 1:
        raise UsageError(f"--{name} must be at least 1")


class Output:
    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        self.start = getattr(args, "t0", time.perf_counter())
        self.extra = {}

    def meta(self) -> dict:
        config = {k: v for k, v in vars(self.args).items() if k not in ("func", "out", "verbose", "quiet", "t0")}
        return {
            "version": __version__,
            "command": self.command,
            "config": config,
            "seed": self.args.seed,
            "wall_time": round(time.perf_counter() - self.start, 3),
            **self.extra,
        }

    def _write(self, text: str):
        if self.args.out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.args.out, "w", newline="") as fh:
                fh.write(text)

    def csv(self, fields, rows):
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.meta(), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_fmt(r[f]) for f in fields])
        self._write(buf.getvalue())

    def json(self, payload):
        self._write(json.dumps({"meta": self.meta(), **payload}, indent=2) + "\n")


def read_csv(path_or_text: str):
    """Parse a ``qtc`` CSV file into ``(meta, rows)``; the inverse of the writer."""
    text = path_or_text if "\n" in path_or_text else open(path_or_text).read()
    lines = text.splitlines()
    meta = json.loads(lines[0][2:]) if lines and lines[0].startswith("# ") else {}
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.DictReader(body))
    return meta, rows


# ---------------------------------------------------------------------------
# subcommands


def cmd_capacity(args):
    rows = []
    for p in _p_values(args):
        rows.append(
            {
                "p": p,
                "c_bsc": bsc_capacity(p),
                "c_4ary": fourary_classical_capacity(p),
                "hashing_bound": hashing_bound(p),
                "db_gap": db_gap(p, args.p_ref) if p > 0 else -math.inf,
            }
        )
    out = Output(args, "capacity")
    out.csv(["p", "c_bsc", "c_4ary", "hashing_bound", "db_gap"], rows)


def _codes(args):
    return Registry(args.registry or ())


def cmd_exit(args):
    _positive("grid", args.grid - 1)
    _positive("frames", args.frames)
    seed = resolve_seed(args.code, _codes(args), args.kinds)
    rng = unit_rng(args.seed, STREAM_EXIT, 0)
    with worker_map(args.workers) as pmap:
        if args.role == "inner":
            if args.p is None:
                raise UsageError("--p is required for an inner curve")
            curve = inner_curve(seed, args.p, args.grid, args.frames, args.len, rng, pmap)
        else:
            curve = outer_curve(seed, args.grid, args.frames, args.len, rng, pmap)
    out = Output(args, "exit")
    out.extra["failures"] = curve.failures
    out.csv(["i_a", "i_e"], [{"i_a": a, "i_e": e} for a, e in curve.points])


def cmd_threshold(args):
    if not 0 <= args.p_lo < args.p_hi <= 1:
        raise UsageError("need 0 <= --p-lo < --p-hi <= 1")
    reg = _codes(args)
    inner, outer = resolve_seed(args.inner, reg), resolve_seed(args.outer, reg)
    with worker_map(args.workers) as pmap:
        res = threshold_search(
            inner, outer, args.p_lo, args.p_hi, args.tol, args.grid, args.frames, args.len,
            unit_rng(args.seed, STREAM_EXIT, 0), pmap,
        )
    out = Output(args, "threshold")
    out.extra["evaluations"] = [{"p": p, "open": o, "area": a} for p, o, a in res.evaluations]
    out.csv(
        ["p_star", "p_open", "p_closed", "db_gap"],
        [{"p_star": res.p_star, "p_open": res.lo, "p_closed": res.hi, "db_gap": db_gap(res.p_star, args.p_ref)}],
    )


def _system(args, length):
    reg = _codes(args)
    return TurboSystem.build(resolve_seed(args.inner, reg), resolve_seed(args.outer, reg), length, args.seed, args.iters)


def cmd_trajectory(args):
    _positive("iters", args.iters)
    sys_ = _system(args, args.len)
    tr = trajectory(sys_, DepolarizingChannel(args.p), args.seed, args.mi)
    out = Output(args, "trajectory")
    out.extra["qubit_errors"] = tr.qubit_errors
    fields = ["iteration", "i_a1", "i_e1", "i_a2", "i_e2"]
    rows = [dict(zip(fields, (i + 1, *map(float, row)))) for i, row in enumerate(tr.points)]
    out.csv(fields, rows)


def cmd_qber(args):
    _positive("frames", args.frames)
    _positive("iters", args.iters)
    ps = _p_values(args)
    sys_ = _system(args, args.len)
    rows = []
    for p in ps:
        log.info("qber: p=%g, %d frames", p, args.frames)
        rec = run_qber(sys_, DepolarizingChannel(p), args.frames, args.stop_at_errors, args.seed, args.workers)
        row = rec.row()
        if args.per_iteration:
            for i, q in enumerate(rec.qber_per_iteration()):
                row[f"qber_it{i + 1}"] = q
        rows.append(row)
        log.info("qber: p=%g qber=%.3g wer=%.3g", p, rec.qber, rec.wer)
    fields = ["p", "frames", "qubit_errors", "word_errors", "qber", "wer", "mean_iterations"]
    if args.per_iteration:
        fields += [f"qber_it{i + 1}" for i in range(args.iters)]
    Output(args, "qber").csv(fields, rows)


def cmd_optimize(args):
    _positive("trials", args.trials)
    inject = []
    if args.inject:
        reg = _codes(args)
        for pair in args.inject:
            a, _, b = pair.partition("/")
            inject.append((resolve_seed(a, reg), resolve_seed(b, reg)))
    with worker_map(args.workers) as pmap:
        cands = optimize_search(
            args.n, args.k, args.m, args.target_p, args.trials,
            grid_size=args.grid, frames=args.frames, length=args.len,
            rng=unit_rng(args.seed, STREAM_SEARCH, 0), inject=inject, map_fn=pmap,
        )
    Output(args, "optimize").json({"candidates": [c.to_json() for c in cands]})


def cmd_spectrum(args):
    seed = resolve_seed(args.code, _codes(args), args.kinds)
    spec = distance_spectrum(seed, args.max_weight, args.max_steps, args.logical_only)
    if spec.notice:
        log.warning("%s", spec.notice)
    out = Output(args, "spectrum")
    out.extra.update({"d_min": spec.d_min, "truncated": spec.truncated})
    out.csv(["weight", "count"], [{"weight": w, "count": c} for w, c in spec.counts.items()])


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qtc", description="Quantum turbo code simulator and EXIT-chart workbench.")
    ap.add_argument("--version", action="version", version=f"qtc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--workers", type=int, default=None, help="worker processes (default $QTC_WORKERS or 1)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--registry", action="append", help="extra code registry file (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("-q", "--quiet", action="store_true")

    def sweep(p):
        p.add_argument("--p", type=float, nargs="+", help="depolarizing probabilities")
        p.add_argument("--p-min", "--p-start", dest="p_min", type=float)
        p.add_argument("--p-max", "--p-end", dest="p_max", type=float)
        p.add_argument("--points", type=int, default=11, help="grid size between --p-min and --p-max")
        p.add_argument("--p-step", type=float, default=None, help="grid step (overrides --points)")

    def fidelity(p):
        p.add_argument("--grid", type=int, default=DEFAULT_GRID)
        p.add_argument("--frames", type=int, default=DEFAULT_FRAMES)
        p.add_argument("--len", type=int, default=DEFAULT_LENGTH, help="frame length in qubits")

    def pair(p):
        p.add_argument("--inner", default="opt-inner")
        p.add_argument("--outer", default="opt-outer")

    p = sub.add_parser("capacity", parents=[common], help="capacity and hashing-bound table")
    sweep(p)
    p.add_argument("--p-ref", type=float, default=EA_HASHING_PMAX, help="reference p for db_gap")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("exit", parents=[common], help="one EXIT curve")
    p.add_argument("--role", choices=["inner", "outer"], required=True)
    p.add_argument("--code", required=True, help="registry name or 'n,k,m:d1,...'")
    p.add_argument("--kinds", default=None, help="override ancilla kinds, e.g. 'e,e'")
    p.add_argument("--p", type=float)
    fidelity(p)
    p.set_defaults(func=cmd_exit)

    p = sub.add_parser("threshold", parents=[common], help="EXIT-tunnel convergence threshold")
    pair(p)
    p.add_argument("--p-lo", type=float, default=0.30)
    p.add_argument("--p-hi", type=float, default=0.40)
    p.add_argument("--tol", type=float, default=0.005)
    p.add_argument("--p-ref", type=float, default=EA_HASHING_PMAX)
    fidelity(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("trajectory", parents=[common], help="decoding trajectory of one frame")
    pair(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--len", "--interleaver-len", dest="len", type=int, default=30000, help="interleaver length")
    p.add_argument("--iters", type=int, default=DEFAULT_ITERATIONS)
    p.add_argument("--mi", choices=["true", "entropy"], default="true", help="MI estimator")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("qber", parents=[common], help="Monte-Carlo QBER/WER sweep")
    pair(p)
    sweep(p)
    p.add_argument("--len", "--interleaver-len", dest="len", type=int, default=1500, help="interleaver length")
    p.add_argument("--iters", type=int, default=DEFAULT_ITERATIONS)
    p.add_argument("--frames", type=int, default=100)
    p.add_argument(
        "--stop-at-errors", "--stop-errors", dest="stop_at_errors", type=int, default=None,
        help="stop a point after this many word errors",
    )
    p.add_argument("--per-iteration", action="store_true", help="add QBER columns per iteration")
    p.set_defaults(func=cmd_qber)

    p = sub.add_parser("optimize", parents=[common], help="random search for a narrow open tunnel")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--target-p", type=float, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--inject", action="append", help="extra 'inner/outer' pair to evaluate")
    fidelity(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("spectrum", parents=[common], help="distance spectrum of a code")
    p.add_argument("--code", required=True)
    p.add_argument("--kinds", default=None)
    p.add_argument("--max-weight", type=int, default=5)
    p.add_argument("--max-steps", type=int, default=12)
    p.add_argument("--logical-only", action="store_true", help="skip events with identity logical inputs")
    p.set_defaults(func=cmd_spectrum)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING if args.quiet else (logging.DEBUG if args.verbose else logging.INFO)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    if args.workers is None:
        args.workers = default_workers()
    args.t0 = time.perf_counter()
    try:
        args.func(args)
    except UsageError as exc:
        print(f"qtc {args.command}: {exc}", file=sys.stderr)
        return 2
    except ThresholdError as exc:
        print(f"qtc {args.command}: runtime failure: {exc}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as exc:
        # bad code names, unparseable inline codes, out-of-range parameters
        print(f"qtc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"qtc {args.command}: runtime failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
