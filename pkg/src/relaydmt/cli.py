"""
Command-line front end: analytic curves, channel reduction, partitions,
and reproducible Monte-Carlo runs.

Exit codes: 0 success, 2 usage error, 3 numerical failure.  Every
simulation writes a CSV of points plus a JSON manifest recording the
full configuration and seed; re-running the same command with the same
seed produces byte-identical CSV regardless of the worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import channel_sim, dmt_core, partition, reduction, stbc
from .dmt_core import DecodeSet, as_dimension

SEED_ENV_VAR = "RELAYDMT_SEED"

_SIM_SCHEMES = ("af", "pf", "df", "parallel-af", "ff", "svd-align", "coded-af", "coded-ff")
_CURVES = ("rp", "cutset", "df", "serial", "ff-bound", "parallel-af")


class UsageError(Exception):
    pass


def _parse_dim(text: str):
    try:
        counts = tuple(int(tok) for tok in text.split(","))
        return as_dimension(counts)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"malformed dimension {text!r}: {exc}") from None


def _parse_decode(text: str, dim) -> DecodeSet:
    try:
        decode = DecodeSet(tuple(int(tok) for tok in text.split(",")))
        decode.validate_for(dim)
        return decode
    except ValueError as exc:
        raise UsageError(f"bad decode set {text!r}: {exc}") from None


def _parse_grid(text: str) -> list[float]:
    try:
        start, step, stop = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise UsageError(f"SNR grid must be start:step:stop, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError("SNR grid must be strictly increasing")
    grid = []
    value = start
    while value <= stop + 1e-9:
        grid.append(round(value, 9))
        value += step
    return grid


def _fmt(value) -> str:
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def cmd_dmt(args) -> int:
    dim = _parse_dim(args.dim)
    rows = []
    for name in args.curve.split(","):
        name = name.strip()
        if name not in _CURVES:
            raise UsageError(f"unknown curve {name!r} (choose from {', '.join(_CURVES)})")
        if name == "rp":
            curve = dmt_core.dmt_rp(dim)
        elif name == "cutset":
            curve = dmt_core.cutset_bound(dim)
        elif name == "df":
            curve = dmt_core.dmt_serial_partition(dim, DecodeSet(tuple(range(1, dim.hops + 1))))
        elif name == "serial":
            if not args.decode:
                raise UsageError("--decode is required for the serial curve")
            curve = dmt_core.dmt_serial_partition(dim, _parse_decode(args.decode, dim))
        elif name == "ff-bound":
            if not args.k_modes:
                raise UsageError("--k-modes is required for the ff-bound curve")
            curve = dmt_core.dmt_ff_lower_bound(dim, args.k_modes)
        else:  # parallel-af
            if args.paths:
                dims = [_parse_dim(p) for p in args.paths.split(";")]
            else:
                dims = [dim]
            curve = dmt_core.dmt_parallel_af(dim, dims)
        for r, d in curve.vertices:
            rows.append((name, _fmt(r), _fmt(d)))
        if curve.partial:
            rows.append((name, "partial", "only d(0) is known for heterogeneous paths"))
    out, close = _open_out(args.output)
    try:
        if args.format == "json":
            doc = {}
            for name, r, d in rows:
                doc.setdefault(name, []).append([r, d])
            out.write(json.dumps({"dim": list(dim.counts), "curves": doc}, indent=2) + "\n")
        else:
            out.write("curve,r,d\n")
            for row in rows:
                out.write(",".join(row) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_reduce(args) -> int:
    dim = _parse_dim(args.dim)
    report = reduction.analyze(dim)
    practical = reduction.practical_vertical_reduction(dim)
    doc = {
        "dim": list(dim.counts),
        "order": report.order,
        "minimal_form": list(report.minimal_form.counts),
        "minimal_vertical_form": list(report.minimal_vertical_form.counts),
        "n_bar": report.n_bar,
        "practical_vertical_reduction": list(practical.counts),
    }
    out, close = _open_out(args.output)
    try:
        if args.format == "json":
            out.write(json.dumps(doc, indent=2) + "\n")
        else:
            for key, value in doc.items():
                out.write(f"{key},{' '.join(map(str, value)) if isinstance(value, list) else value}\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_partition(args) -> int:
    dim = _parse_dim(args.dim)
    if args.max:
        part = partition.max_partition(dim)
    elif args.min_full_div:
        if dim.hops != 2:
            raise UsageError("--min-full-div applies to two-hop channels")
        _, part = partition.min_full_div_partition_2hop(*dim.counts)
    else:
        raise UsageError("choose one of --max or --min-full-div")
    text = partition.partition_to_json(dim, part)
    out, close = _open_out(args.output)
    try:
        out.write(text + "\n")
    finally:
        if close:
            out.close()
    return 0


def _build_scheme(args, dim):
    kind = args.scheme
    if kind in ("af", "coded-af"):
        return channel_sim.AfScheme()
    if kind == "pf":
        return channel_sim.PfScheme()
    if kind == "svd-align":
        return channel_sim.SvdAlignScheme()
    if kind == "df":
        if not args.decode:
            raise UsageError("--decode is required for the df scheme")
        return channel_sim.DfScheme(_parse_decode(args.decode, dim))
    # partition-based schemes
    if args.partition:
        with open(args.partition) as fh:
            pdim, part = partition.partition_from_json(fh.read())
        if pdim != dim:
            raise UsageError("partition file was built for a different dimension")
    elif dim.hops == 2:
        _, part = partition.min_full_div_partition_2hop(*dim.counts)
    else:
        raise UsageError(
            f"scheme {kind!r} needs --partition for channels with more than two hops"
        )
    if kind == "parallel-af":
        return channel_sim.ParallelAfScheme(part)
    if kind in ("ff", "coded-ff"):
        return channel_sim.FfScheme(partition.ff_schedule(dim, part))
    raise UsageError(f"unknown scheme {kind!r}")


def _build_codebook(args, scheme):
    q = stbc.QamAlphabet.qam(args.qam)
    if args.code == "alamouti":
        return stbc.alamouti(q)
    if args.code == "golden":
        return stbc.golden(q, m=0)
    if args.code == "parallel-golden":
        return stbc.golden(q, m=1)
    raise UsageError(f"unknown code {args.code!r}")


def cmd_simulate(args) -> int:
    dim = _parse_dim(args.dim)
    if args.scheme not in _SIM_SCHEMES:
        raise UsageError(f"unknown scheme {args.scheme!r}")
    grid = _parse_grid(args.snr)
    trials = int(float(args.trials))
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        seed = int(env) if env else 0
    scheme = _build_scheme(args, dim)
    coded = args.scheme.startswith("coded-")
    if coded:
        cb = _build_codebook(args, scheme)
        points = stbc.simulate_ser(dim, scheme, cb, grid, trials, seed, workers=args.workers)
        rate = points[0].rate_bpcu
        extra = {"code": cb.describe(), "block_size": stbc.CODED_BLOCK_SIZE}
    else:
        if args.rate is None:
            raise UsageError("--rate is required for outage simulations")
        rate = args.rate
        points = channel_sim.outage_curve(
            dim, scheme, rate, grid, trials, seed,
            workers=args.workers, rate_policy=args.rate_policy,
        )
        extra = {"rate_policy": args.rate_policy}
    out, close = _open_out(args.output)
    try:
        channel_sim.write_outage_csv(points, out)
    finally:
        if close:
            out.close()
    manifest = channel_sim.run_manifest(
        command="simulate",
        dim=dim,
        scheme_desc=scheme.describe(),
        rate=rate,
        snr_grid_db=grid,
        trials=trials,
        seed=seed,
        block_size=stbc.CODED_BLOCK_SIZE if coded else channel_sim.BLOCK_SIZE,
        extra=extra,
    )
    manifest_path = args.manifest
    if manifest_path is None and args.output not in (None, "-"):
        manifest_path = args.output + ".manifest.json"
    if manifest_path:
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        # CSV owns stdout; the reproducibility record goes to stderr.
        json.dump(manifest, sys.stderr, indent=2, sort_keys=True)
        sys.stderr.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaydmt",
        description="Diversity-multiplexing analysis and simulation of multihop relay channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dmt = sub.add_parser("dmt", help="analytic tradeoff curves")
    p_dmt.add_argument("--dim", required=True, help="antenna counts, e.g. 2,2,2")
    p_dmt.add_argument("--curve", default="rp", help=f"comma list from {', '.join(_CURVES)}")
    p_dmt.add_argument("--decode", help="decode layers for the serial curve, e.g. 2,3")
    p_dmt.add_argument("--k-modes", type=int, help="mode count for the ff-bound curve")
    p_dmt.add_argument("--paths", help="semicolon list of path dims for parallel-af")
    p_dmt.add_argument("--output", help="output file (default stdout)")
    p_dmt.add_argument("--format", choices=("csv", "json"), default="csv")
    p_dmt.set_defaults(func=cmd_dmt)

    p_red = sub.add_parser("reduce", help="channel order and minimal forms")
    p_red.add_argument("--dim", required=True)
    p_red.add_argument("--output")
    p_red.add_argument("--format", choices=("csv", "json"), default="csv")
    p_red.set_defaults(func=cmd_reduce)

    p_part = sub.add_parser("partition", help="construct parallel partitions")
    p_part.add_argument("--dim", required=True)
    p_part.add_argument("--max", action="store_true", help="maximum single-antenna partition")
    p_part.add_argument(
        "--min-full-div", action="store_true", help="minimum full-diversity partition (2 hops)"
    )
    p_part.add_argument("--output")
    p_part.set_defaults(func=cmd_partition)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo outage / SER")
    p_sim.add_argument("--dim", required=True)
    p_sim.add_argument("--scheme", required=True, help=f"one of {', '.join(_SIM_SCHEMES)}")
    p_sim.add_argument("--rate", type=float, help="target rate (bits/use), or r under --rate-policy multiplexing")
    p_sim.add_argument("--rate-policy", choices=("fixed", "multiplexing"), default="fixed")
    p_sim.add_argument("--snr", required=True, help="dB grid start:step:stop")
    p_sim.add_argument("--trials", default="1e5", help="trials per point (accepts 1e6)")
    p_sim.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV_VAR} or 0)")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--decode", help="decode layers for the df scheme")
    p_sim.add_argument("--partition", help="partition JSON file for ff / parallel-af")
    p_sim.add_argument("--code", default="alamouti", help="alamouti, golden, parallel-golden")
    p_sim.add_argument("--qam", type=int, default=4, choices=(4, 16))
    p_sim.add_argument("--output", help="CSV output (default stdout)")
    p_sim.add_argument("--manifest", help="manifest path (default <output>.manifest.json)")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
