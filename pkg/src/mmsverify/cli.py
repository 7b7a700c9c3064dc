"""Command-line entry points.

Every subcommand prints a result record as JSON on stdout.  Exit status:
0 when a verdict was reached, 2 for INDETERMINATE (budget exhausted, a
checkpoint may have been written), 1 for usage or internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import comb

from .config import PropagationConfig, SearchConfig
from .driver import (
    RunResult,
    append_csv,
    compute_f,
    compute_g,
    compute_g_strong,
    compute_Nk,
    resume,
    scan_two_value,
    two_value_vector,
    verify_run,
    write_json,
)
from .propagation import GTable
from .replay import replay_proof
from .search import INDETERMINATE


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["negative", "positive", "stochastic"],
                   default="negative")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-limit", type=int, default=200)
    p.add_argument("--time-limit", type=float, default=60.0,
                   help="wall-clock budget per stochastic call, seconds")
    p.add_argument("--enable-after-branch-depth", type=int, default=4)
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--strategy", choices=["auto", "bfs", "incexc"],
                   default="auto")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--log", default=None, help="proof log path")
    p.add_argument("--json", default=None, help="result JSON path")
    p.add_argument("--csv", default=None, help="append a CSV table row")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--gtable", default=None,
                   help="JSON file of known g values, loaded and updated")
    p.add_argument("--dump-lp", default=None,
                   help="directory for LP-format dumps of node programs")


def _config(args) -> SearchConfig:
    return SearchConfig(
        mode=args.mode,
        strategy=args.strategy,
        propagation=PropagationConfig(
            sample_limit=args.sample_limit,
            time_limit=args.time_limit,
            rng_seed=args.seed,
            enable_after_branch_depth=args.enable_after_branch_depth),
        node_budget=args.node_budget,
        parallel=args.parallel,
        dump_lp_dir=args.dump_lp)


def _load_gtable(args) -> GTable:
    if args.gtable:
        try:
            with open(args.gtable) as fh:
                return GTable.from_jsonable(json.load(fh))
        except FileNotFoundError:
            pass
    return GTable()


def _finish(args, gtable: GTable, result: RunResult) -> int:
    if args.gtable:
        with open(args.gtable, "w") as fh:
            json.dump(gtable.to_jsonable(), fh, indent=1)
            fh.write("\n")
    if args.json:
        write_json(args.json, result)
    if args.csv:
        append_csv(args.csv, result)
    print(json.dumps(result.to_jsonable(), sort_keys=True))
    return 2 if result.verdict == INDETERMINATE else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mmsverify",
        description="Exact verifier for minimum nonnegative k-sum counts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute-g", help="g(n,k), or verify g(n,k) >= t")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=None,
                   help="verify at this target instead of computing g")
    p.add_argument("--baranyai", action="store_true",
                   help="use the divisibility shortcut when k divides n")
    _common_flags(p)

    p = sub.add_parser("compute-f", help="least n with zero deficiency onward")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--no-baranyai", action="store_true",
                   help="search divisible cases instead of the shortcut")
    _common_flags(p)

    p = sub.add_parser("compute-gs", help="strong variant g_s(n,k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, default=None)
    _common_flags(p)

    p = sub.add_parser("scan-two-value",
                       help="minimum two-value count over a+b=n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--strong", action="store_true")
    _common_flags(p)

    p = sub.add_parser("compute-nk",
                       help="least x with C(x-3,k) >= C(x-1,k-1)")
    p.add_argument("--k", type=int, required=True)
    _common_flags(p)

    p = sub.add_parser("replay-proof", help="re-run a proof log and compare")
    p.add_argument("path")
    _common_flags(p)

    p = sub.add_parser("resume", help="continue from a checkpoint")
    p.add_argument("path", nargs="?", default=None)
    p.add_argument("--resume", dest="resume_path", default=None)
    _common_flags(p)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "replay-proof":
        ok, message = replay_proof(args.path)
        print(message)
        return 0 if ok else 1

    config = _config(args)
    gtable = _load_gtable(args)

    if cmd == "compute-g":
        if args.t is not None:
            result = verify_run(args.n, args.k, args.t, gtable, config,
                                log_path=args.log,
                                checkpoint_path=args.checkpoint)
        else:
            result = compute_g(args.n, args.k, gtable, config,
                               baranyai=args.baranyai, log_path=args.log,
                               checkpoint_path=args.checkpoint)
    elif cmd == "compute-f":
        result = compute_f(args.k, gtable, config,
                           baranyai=not args.no_baranyai, log_path=args.log,
                           checkpoint_path=args.checkpoint)
    elif cmd == "compute-gs":
        if args.t is not None:
            result = verify_run(args.n, args.k, args.t, gtable, config,
                                strong=True, log_path=args.log,
                                checkpoint_path=args.checkpoint)
        else:
            result = compute_g_strong(args.n, args.k, gtable, config,
                                      log_path=args.log,
                                      checkpoint_path=args.checkpoint)
    elif cmd == "scan-two-value":
        tmin, (a, b) = scan_two_value(args.n, args.k,
                                      require_strong=args.strong)
        from .driver import descriptor

        result = RunResult("scan", args.n, args.k, tmin, "HOLDS", value=tmin,
                           example=descriptor(two_value_vector(a, b)),
                           extra={"a": a, "b": b})
    elif cmd == "compute-nk":
        value = compute_Nk(args.k)
        result = RunResult("nk", None, args.k, None, "HOLDS", value=value,
                           extra={"ratio": value / args.k})
        if args.csv:
            import csv as _csv

            with open(args.csv, "w", newline="") as fh:
                writer = _csv.writer(fh)
                writer.writerow(["k", "n_k", "ratio"])
                for kk in range(2, args.k + 1):
                    nk = compute_Nk(kk)
                    writer.writerow([kk, nk, f"{nk / kk:.6f}"])
            args.csv = None  # already written in nk-specific shape
    elif cmd == "resume":
        path = args.path or args.resume_path
        if not path:
            raise ValueError("resume needs a checkpoint path")
        result = resume(path, log_path=args.log,
                        checkpoint_path=args.checkpoint)
    else:  # pragma: no cover
        raise ValueError(f"unknown command {cmd!r}")
    return _finish(args, gtable, result)


if __name__ == "__main__":
    sys.exit(main())
