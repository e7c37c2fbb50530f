"""Command line entry point: ``bscount <subcommand> [--seed N] [--trials N] [--config FILE] [--out DIR] [--jobs N]``."""

import argparse
import json
import sys

from . import config as cfg
from .runner import OUT_ENV, replay, run

SUBCOMMANDS = {
    "verify-abstract": "abstract_bound",
    "verify-antisym": "antisym_oracle",
    "verify-jordan": "jordan",
    "constants": "constants_table",
    "schrodinger": "schrodinger",
    "sweep": "accumulation_sweep",
}

HELP = {
    "verify-abstract": "random ensemble check of the half-plane counting bound",
    "verify-antisym": "Gram-route lifted forms against the full-tensor oracle",
    "verify-jordan": "closed-form splitting of Jordan chains under delta K0",
    "constants": "table of the proven constants for (d, gamma) ranges",
    "schrodinger": "CLR / LT / sector / distance checks on a discretized operator",
    "sweep": "distance-weighted sums for i h chi_B1 over a list of strengths",
    "replay": "re-execute a failure fixture and compare verdicts",
}


def _common(p):
    p.add_argument("--seed", type=int, help="64-bit seed (default 0 or the config's)")
    p.add_argument("--trials", type=int, help="number of trials (families per cell for verify-antisym)")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV}/<kind>-<digest>)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for trial-level parallelism")
    p.add_argument("--quiet", action="store_true", help="print only the summary line")


def build_parser():
    parser = argparse.ArgumentParser(prog="bscount", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, help=HELP[name])
        _common(sp)
        if name == "constants":
            sp.add_argument("--d", type=int, nargs="+", help="space dimensions")
            sp.add_argument("--gamma", type=float, nargs="+", help="gamma values")
    rp = sub.add_parser("replay", help=HELP["replay"])
    rp.add_argument("fixture", help="fixture JSON written by a failing run")
    return parser


def _config_from_args(args):
    kind = SUBCOMMANDS[args.command]
    doc = cfg.load(args.config) if args.config else {"kind": kind}
    doc.setdefault("kind", kind)
    if doc["kind"] != kind:
        raise cfg.ConfigError("config.kind", f"{doc['kind']!r} does not match subcommand {args.command}")
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.trials is not None:
        doc["trials"] = args.trials
    if getattr(args, "d", None) or getattr(args, "gamma", None):
        params = doc.setdefault("params", {})
        if args.d:
            params["ds"] = args.d
        if args.gamma:
            params["gammas"] = args.gamma
    return cfg.from_dict(doc)


def _print_constants(records):
    cols = ["d", "gamma", "p", "C_clr", "C_lt", "gamma_prime", "L_cl", "K_q"]
    print(" ".join(f"{c:>12}" for c in cols))
    for r in records:
        cells = []
        for c in cols:
            v = r.get(c)
            cells.append(f"{'-':>12}" if v is None else f"{v:>12.6g}")
        print(" ".join(cells))
    print("(proven constants, not sharp)")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        try:
            res = replay(args.fixture)
        except (OSError, ValueError, KeyError) as exc:
            print(f"replay error: {exc}", file=sys.stderr)
            return 2
        verdict = "same verdict" if res.same_verdict else "DIFFERENT verdict"
        print(f"replay {res.kind}: {verdict}; expected {json.dumps(res.expected, sort_keys=True)} observed {json.dumps(res.observed, sort_keys=True)}")
        return 0 if res.same_verdict else 1
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        config = _config_from_args(args)
    except cfg.ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"usage error: cannot read config: {exc}", file=sys.stderr)
        return 2
    result = run(config, jobs=args.jobs, out=args.out)
    if config.kind == "constants_table" and not args.quiet:
        _print_constants(result.records)
    s = result.summary()
    print(f"{s['kind']}: {s['checks']} checks, {s['failed']} failed, {len(s['fixtures'])} fixtures -> {result.out_dir} [{s['status']}]")
    for path in s["fixtures"]:
        print(f"  fixture: {path}")
    return result.status


if __name__ == "__main__":
    sys.exit(main())
