"""Command-line front end.

Subcommands: plan (step budgets from a tolerance), generate (write an
ensemble), diagnose (independence sweep over thinning factors), gr
(between-chain convergence check), metrics (observables as CSV).

Exit codes: 0 success, 1 usage, 2 data or input error, 3 a convergence
threshold was missed (outputs are still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from ._version import __version__
from .diagnostics import independence_sweep, record_series
from .edge_model import dd_alpha_beta, jdd_alpha_beta, stopping_steps
from .ensemble import choose_tracked_pairs, generate_ensemble, resolve_threads, run_gr
from .errors import GraphmixError
from .graph import degree_profile, load_graph
from .rng import split_seed


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse default is 2, reserved here for data errors)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_TABLE_MULTIPLIERS = {"dd": (0.5, 2.5, 5.0, 7.5), "jdd": (1.0, 5.0, 10.0, 15.0)}


def _epsilon_of_steps(m: int, steps: int, mode: str) -> float:
    rate = 2.0 / m if mode == "dd" else 1.0 / m
    return math.exp(-rate * steps)


def _load(path):
    return load_graph(path, symmetrize=True)


def _steps_from_args(args, parser, m: int) -> int:
    if args.epsilon is not None:
        if not (0.0 < args.epsilon < 1.0):
            parser.error("--epsilon must be in (0, 1)")
        return stopping_steps(m, args.epsilon, args.mode)
    if args.steps < 0:
        parser.error("--steps must be nonnegative")
    return args.steps


def cmd_plan(args, parser) -> int:
    if args.input is not None:
        g = _load(args.input)
        m = g.m
    else:
        m = args.edges
        g = None
    if m < 1:
        parser.error("--edges must be positive")
    if args.epsilon is not None:
        if not (0.0 < args.epsilon < 1.0):
            parser.error("--epsilon must be in (0, 1)")
        steps = stopping_steps(m, args.epsilon, args.mode)
        epsilon = args.epsilon
    else:
        if args.steps < 1:
            parser.error("--steps must be positive")
        steps = args.steps
        epsilon = _epsilon_of_steps(m, steps, args.mode)
    gamma_bound = 2.0 / m if args.mode == "dd" else 1.0 / m
    table = []
    for mult in _TABLE_MULTIPLIERS[args.mode]:
        eps = math.exp(-(2.0 if args.mode == "dd" else 1.0) * mult)
        table.append(
            {
                "steps_per_edge": mult,
                "steps": stopping_steps(m, eps, args.mode),
                "epsilon": eps,
            }
        )
    out = {
        "mode": args.mode,
        "m": m,
        "steps": steps,
        "steps_per_edge": steps / m,
        "epsilon": epsilon,
        "gamma_lower_bound": gamma_bound,
        "table": table,
    }
    if g is not None:
        du = g.deg[g.eu]
        dv = g.deg[g.ev]
        prod = du * dv
        if args.mode == "dd":
            a_lo, _ = dd_alpha_beta(1, int(prod.min()), m)
            a_hi, beta = dd_alpha_beta(1, int(prod.max()), m)
            out["rate_summary"] = {"alpha_min": a_lo, "alpha_max": a_hi, "beta": beta}
        else:
            prof = degree_profile(g)
            alphas = []
            betas = []
            for (d1, d2), J in prof.joint.items():
                a, b = jdd_alpha_beta(d1, d2, m, prof.f[d1], prof.f[d2], J)
                alphas.append(a)
                betas.append(b)
            frozen = sum(
                1 for (d1, d2) in prof.joint if prof.f[d1] == 1 and prof.f[d2] == 1
            )
            out["rate_summary"] = {
                "alpha_min": min(alphas),
                "alpha_max": max(alphas),
                "beta_min": min(betas),
                "beta_max": max(betas),
                "frozen_degree_pairs": frozen,
            }
    print(json.dumps(out, indent=2))
    return 0


def cmd_generate(args, parser) -> int:
    if args.count < 0:
        parser.error("--count must be nonnegative")
    g = _load(args.input)
    steps = _steps_from_args(args, parser, g.m)
    manifest = generate_ensemble(
        g,
        args.mode,
        args.count,
        steps,
        args.seed,
        args.out_dir,
        threads=args.threads,
        continuous=args.continuous,
    )
    print(
        json.dumps(
            {
                "out_dir": str(args.out_dir),
                "count": manifest["count"],
                "steps": manifest["steps"],
                "mode": manifest["mode"],
                "manifest": str(Path(args.out_dir) / "manifest.json"),
            }
        )
    )
    return 0


def _parse_schedule(text: str, parser):
    try:
        mults = sorted({int(tok) for tok in text.split(",") if tok.strip()})
    except ValueError:
        parser.error("--k-schedule must be a comma list of integers")
    if not mults or mults[0] < 1:
        parser.error("--k-schedule entries must be >= 1")
    return mults


def cmd_diagnose(args, parser) -> int:
    g = _load(args.input)
    m = g.m
    mults = _parse_schedule(args.k_schedule, parser)
    steps = args.chain_steps if args.chain_steps is not None else 10000 * m
    steps -= steps % m
    if steps < 2 * m:
        parser.error("--chain-steps too small: need at least two recorded samples")
    policy = args.track if args.track is not None else ("all" if m <= 10000 else "sample:0.1")
    pairs = choose_tracked_pairs(g, policy, args.seed)
    ks = [mult * m for mult in mults]
    largest = ks[-1]
    if steps // largest < 3:
        print(
            f"graphmix: warning: only {steps // largest} samples at the largest "
            f"thinning factor; results there will be unresolved",
            file=sys.stderr,
        )
    series, stats = record_series(
        g.copy(), args.mode, steps, pairs, seed=split_seed(args.seed, 0), stride=m
    )
    sweep = independence_sweep(
        series, ks, r=args.r, s=args.s, workers=resolve_threads(args.threads)
    )
    records = [asdict(rep) for rep in sweep.reports]
    out_json = Path(f"{args.out}.json")
    out_csv = Path(f"{args.out}.csv")
    payload = {
        "schema": "graphmix.diagnose/1",
        "version": __version__,
        "input": str(args.input),
        "mode": args.mode,
        "seed": args.seed,
        "steps": steps,
        "stride": m,
        "k_schedule": ks,
        "r": args.r,
        "s": args.s,
        "chain": asdict(stats),
        "fraction_by_k": {str(k): v for k, v in sweep.fraction_by_k.items()},
        "pairs": records,
    }
    out_json.parent.mkdir(parents=True, exist_ok=True)
    with open(out_json, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2) + "\n")
    with open(out_csv, "w", encoding="utf-8") as fh:
        fh.write("k_steps,k_per_edge,fraction_independent\n")
        for k in ks:
            fh.write(f"{k},{k // m},{sweep.fraction_by_k[k]:.6f}\n")
    frac = sweep.fraction_by_k[largest]
    print(
        json.dumps(
            {
                "pairs_tracked": len(pairs),
                "steps": steps,
                "fraction_at_max_k": frac,
                "json": str(out_json),
                "csv": str(out_csv),
            }
        )
    )
    if not (frac >= args.min_fraction):
        print(
            f"graphmix: warning: fraction independent at k={largest} is "
            f"{frac:.4f} < {args.min_fraction}",
            file=sys.stderr,
        )
        return 3
    return 0


def cmd_gr(args, parser) -> int:
    if args.chains < 2:
        parser.error("--chains must be at least 2")
    if args.series_length < 100:
        parser.error("--series-length must be at least 100 samples")
    g = _load(args.input)
    m = g.m
    if args.disperse_steps is not None:
        disperse = args.disperse_steps
    else:
        disperse = 100 * m
        print(
            "graphmix: note: using desk-scale default --disperse-steps "
            f"({disperse} = 100 per edge); full-scale runs use 10000 per edge",
            file=sys.stderr,
        )
    policy = args.track if args.track is not None else ("all" if m <= 10000 else "sample:0.1")
    pairs = choose_tracked_pairs(g, policy, args.seed)
    result = run_gr(
        g,
        args.mode,
        args.chains,
        disperse,
        args.series_length * m,
        pairs,
        args.seed,
        stride=m,
        threads=args.threads,
        identical=args.identical_chains,
    )
    summary = {
        "schema": "graphmix.gr/1",
        "version": __version__,
        "input": str(args.input),
        "mode": args.mode,
        "chains": result.chains,
        "disperse_steps": result.disperse_steps,
        "series_steps": result.series_steps,
        "stride": result.stride,
        "pairs_tracked": len(pairs),
        "median_r_hat": result.median,
        "max_r_hat": result.max,
    }
    if args.out is not None:
        full = dict(summary)
        full["pairs"] = [
            {"u": u, "v": v, "r_hat": r}
            for (u, v), r in zip(result.pairs, result.r_hats)
        ]
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(full, indent=2) + "\n")
        summary["out"] = str(out_path)
    print(json.dumps(summary))
    if result.median > 1.1:
        print(
            f"graphmix: warning: median scale-reduction {result.median:.4f} > 1.1",
            file=sys.stderr,
        )
        return 3
    return 0


def cmd_metrics(args, parser) -> int:
    from .metrics import diameter, global_clustering, max_laplacian_eigenvalue

    rows = []
    for path in args.input:
        g = _load(path)
        clus = global_clustering(g)
        diam = diameter(g)
        lam = max_laplacian_eigenvalue(g)
        rows.append(
            f"{path},{clus:.10g},{diam.value},"
            f"{'exact' if diam.exact else 'bound'},{lam:.10g}"
        )
    text = "file,clustering,diameter,diameter_exactness,lambda_max\n" + "".join(
        row + "\n" for row in rows
    )
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _build() -> _Parser:
    parser = _Parser(prog="graphmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"graphmix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="step budget for a tolerance (JSON to stdout)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--edges", type=int, help="edge count m")
    src.add_argument("--input", help="edge-list file to read m (and rates) from")
    tgt = p.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--epsilon", type=float, help="distance-to-limit tolerance in (0,1)")
    tgt.add_argument("--steps", type=int, help="step budget to convert to a tolerance")
    p.add_argument("--mode", choices=("dd", "jdd"), required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("generate", help="write an ensemble of rewired graphs")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("dd", "jdd"), required=True)
    p.add_argument("--count", type=int, required=True, help="number of replicas")
    tgt = p.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--epsilon", type=float)
    tgt.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument(
        "--continuous",
        action="store_true",
        help="snapshot one long chain every N steps instead of independent restarts",
    )
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("diagnose", help="per-edge independence sweep over thinning factors")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("dd", "jdd"), required=True)
    p.add_argument(
        "--k-schedule",
        default="1,2,4,8,16,32",
        help="thinning factors as multiples of the edge count (comma list)",
    )
    p.add_argument("--chain-steps", type=int, default=None, help="default 10000 * edges")
    p.add_argument("--track", default=None, help="all or sample:P (default: all if m<=1e4)")
    p.add_argument("--r", type=float, default=0.01, help="mean tolerance for length check")
    p.add_argument("--s", type=float, default=0.95, help="confidence for length check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--min-fraction", type=float, default=0.95, help="exit 3 below this")
    p.add_argument("--out", default="diagnose", help="output prefix for .json/.csv")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("gr", help="between-chain scale-reduction check")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("dd", "jdd"), required=True)
    p.add_argument("--chains", type=int, default=3)
    p.add_argument("--disperse-steps", type=int, default=None, help="default 100 * edges")
    p.add_argument(
        "--series-length", type=int, default=1000, help="recorded samples per chain"
    )
    p.add_argument("--track", default=None, help="all or sample:P (default: all if m<=1e4)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument(
        "--identical-chains",
        action="store_true",
        help="calibration mode: identical starts and one shared stream",
    )
    p.add_argument("--out", default=None, help="write full per-pair JSON here")
    p.set_defaults(func=cmd_gr)

    p = sub.add_parser("metrics", help="clustering, diameter, top Laplacian eigenvalue (CSV)")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None) -> int:
    parser = _build()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except GraphmixError as exc:
        print(f"graphmix: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"graphmix: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
