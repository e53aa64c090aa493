"""Ensemble generation and multi-chain experiments.

Replica i always derives its stream from split_seed(master, i); auxiliary
streams (edge sampling for tracking, burn-in between starts) use indices
at 2^40 and above so they can never collide with replica indices. Worker
threads each own a graph copy and a generator, and results are merged by
replica index, so outputs do not depend on scheduling.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .diagnostics import gelman_rubin, record_series
from .errors import InvalidInputError
from .graph import Graph, save_graph
from .rewire import run_chain
from .rng import Rng, split_seed

_PAIR_SAMPLE_SPLIT = 1 << 40
_BURN_SPLIT = (1 << 40) + 1


def resolve_threads(requested=None) -> int:
    """Worker count: explicit argument, else GRAPHMIX_THREADS, else cores."""
    if requested is not None:
        n = int(requested)
    else:
        env = os.environ.get("GRAPHMIX_THREADS", "").strip()
        n = int(env) if env else (os.cpu_count() or 1)
    if n < 1:
        raise InvalidInputError("thread count must be >= 1")
    return n


def generate_ensemble(
    g: Graph,
    mode: str,
    count: int,
    steps: int,
    seed: int,
    out_dir,
    threads=None,
    continuous: bool = False,
):
    """Write `count` rewired copies of g plus a manifest.json.

    Default: independent restarts, each replica a fresh copy of g driven
    for `steps` moves by its own split seed. continuous=True instead runs
    one long chain and snapshots it every `steps` moves (replicas are then
    sequential states of a single trajectory, not independent).
    """
    count = int(count)
    if count < 0:
        raise InvalidInputError("replica count must be nonnegative")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(count - 1))) if count > 0 else 4
    if mode == "jdd":
        g.degree_classes()  # build once; copies share the immutable index

    def _one(i: int):
        gi = g.copy()
        rep_seed = split_seed(seed, i)
        stats = run_chain(gi, mode, steps, rng=Rng(rep_seed))
        fname = f"replica_{i:0{width}d}.txt"
        save_graph(gi, out / fname)
        return {
            "file": fname,
            "seed": rep_seed,
            "steps": stats.steps,
            "applied": stats.applied,
            "rejected": stats.rejected,
        }

    if continuous:
        entries = []
        gi = g.copy()
        rng = Rng(split_seed(seed, 0))
        for i in range(count):
            stats = run_chain(gi, mode, steps, rng=rng)
            fname = f"replica_{i:0{width}d}.txt"
            save_graph(gi, out / fname)
            entries.append(
                {
                    "file": fname,
                    "seed": rng.seed,
                    "steps": stats.steps,
                    "applied": stats.applied,
                    "rejected": stats.rejected,
                }
            )
    else:
        workers = resolve_threads(threads)
        if count == 0:
            entries = []
        elif workers == 1:
            entries = [_one(i) for i in range(count)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                entries = list(pool.map(_one, range(count)))
    manifest = {
        "schema": "graphmix.manifest/1",
        "version": __version__,
        "mode": mode,
        "seed": int(seed),
        "steps": int(steps),
        "count": count,
        "continuous": bool(continuous),
        "input": {"n": g.n, "m": g.m},
        "replicas": entries,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, indent=2) + "\n")
    return manifest


def choose_tracked_pairs(g: Graph, policy: str, seed: int):
    """Tracked-pair selection: 'all' edges, or 'sample:p' for a uniform
    p-fraction of the edges drawn from a dedicated split stream."""
    edges = [(int(a), int(b)) for a, b in g.edge_array()]
    if policy == "all":
        return edges
    if policy.startswith("sample:"):
        try:
            p = float(policy[len("sample:") :])
        except ValueError:
            raise InvalidInputError(f"bad tracking policy {policy!r}") from None
        if not (0.0 < p <= 1.0):
            raise InvalidInputError("sample fraction must be in (0, 1]")
        count = max(1, int(round(p * g.m)))
        rng = Rng(split_seed(seed, _PAIR_SAMPLE_SPLIT))
        idx = np.arange(g.m)
        for i in range(count):
            j = i + rng.below(g.m - i)
            idx[i], idx[j] = idx[j], idx[i]
        return [edges[i] for i in sorted(int(x) for x in idx[:count])]
    raise InvalidInputError(f"unknown tracking policy {policy!r}")


@dataclass
class GrResult:
    pairs: list
    r_hats: list
    median: float
    max: float
    chains: int
    disperse_steps: int
    series_steps: int
    stride: int
    chain_stats: list


def run_gr(
    g: Graph,
    mode: str,
    chains: int,
    disperse_steps: int,
    series_steps: int,
    pairs,
    seed: int,
    stride: int = 1,
    threads=None,
    identical: bool = False,
) -> GrResult:
    """Between-chain convergence check from staggered starts.

    Start 0 is the input graph; start i is start i-1 advanced by
    disperse_steps on a shared burn stream, so the starts are spread
    along one trajectory. Each chain then records the tracked pairs for
    series_steps moves on its own split stream and every pair gets a
    scale-reduction factor across chains. identical=True collapses the
    configuration (no burns, one shared stream index) for calibration.
    """
    if chains < 2:
        raise InvalidInputError("need at least 2 chains")
    if disperse_steps < 0:
        raise InvalidInputError("disperse steps must be nonnegative")
    pairs = list(pairs)
    if mode == "jdd":
        g.degree_classes()
    starts = []
    cur = g.copy()
    burn = Rng(split_seed(seed, _BURN_SPLIT))
    for i in range(chains):
        if i > 0 and disperse_steps > 0 and not identical:
            run_chain(cur, mode, disperse_steps, rng=burn)
        starts.append(cur.copy())

    def _one(i: int):
        rng = Rng(split_seed(seed, 0 if identical else i))
        return record_series(starts[i], mode, series_steps, pairs, rng=rng, stride=stride)

    workers = resolve_threads(threads)
    if workers == 1:
        results = [_one(i) for i in range(chains)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, range(chains)))
    per_chain = [res[0] for res in results]
    stats = [res[1] for res in results]
    r_hats = []
    for idx in range(len(pairs)):
        r_hats.append(gelman_rubin([per_chain[c][idx].bits for c in range(chains)]))
    arr = np.array(r_hats, dtype=np.float64)
    return GrResult(
        pairs=pairs,
        r_hats=r_hats,
        median=float(np.median(arr)),
        max=float(arr.max()),
        chains=chains,
        disperse_steps=int(disperse_steps),
        series_steps=int(series_steps),
        stride=int(stride),
        chain_stats=stats,
    )
