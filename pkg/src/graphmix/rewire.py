"""Edge-swap Markov chains over a fixed degree structure.

Two moves are provided. The degree-preserving move (dd) draws two
(edge, orientation) slots uniformly and independently, so every directed
reading of an edge has probability 1/(2m); writing the draws as (a,b) and
(c,d), it proposes replacing those edges with (a,d) and (c,b). The
joint-degree-preserving move (jdd) draws an endpoint slot (vertex u1 with
probability deg/2m and a uniform incident neighbour v), then a uniform
vertex u2 from u1's degree class (u1 itself may be drawn and is then
rejected), then a uniform neighbour w of u2, and proposes (u1,w),(u2,v).

Rejected proposals consume a step and leave the graph unchanged. The
rejection reasons are: identical edge draw (dd) or identical class vertex
(jdd), a proposal that would create a self-loop, and a proposal that
would duplicate an existing edge.

The Python step functions here and the compiled loops in _kernels consume
the random stream identically; a chain may switch between them mid-run
and produce the same trajectory.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import InvalidInputError
from .graph import Graph
from .rng import Rng

_EMPTY = np.zeros(1, dtype=np.int64)


@dataclass
class ChainStats:
    mode: str
    steps: int
    applied: int
    rejected: int
    seed: int | None

    def acceptance_rate(self) -> float:
        return self.applied / self.steps if self.steps else 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _slot_of(g: Graph, u: int, nb: int) -> int:
    s = int(g.off[u])
    for i in range(s, s + int(g.deg[u])):
        if g.adj_nb[i] == nb:
            return i
    raise AssertionError("slot lookup miss")


def dd_swap_step(g: Graph, rng: Rng):
    """One degree-preserving move in place.

    Returns None when rejected, else (removed, added) where each side is a
    pair of min-id-first vertex tuples.
    """
    m = g.m
    s1 = rng.below(2 * m)
    s2 = rng.below(2 * m)
    i = s1 >> 1
    j = s2 >> 1
    if i == j:
        return None
    if s1 & 1:
        a, b = int(g.ev[i]), int(g.eu[i])
    else:
        a, b = int(g.eu[i]), int(g.ev[i])
    if s2 & 1:
        c, d = int(g.ev[j]), int(g.eu[j])
    else:
        c, d = int(g.eu[j]), int(g.ev[j])
    if a == d or c == b:
        return None
    if g.has_edge(a, d) or g.has_edge(c, b):
        return None
    sa = _slot_of(g, a, b)
    sb = _slot_of(g, b, a)
    sc = _slot_of(g, c, d)
    sd = _slot_of(g, d, c)
    g.eu[i] = a
    g.ev[i] = d
    g.eu[j] = c
    g.ev[j] = b
    g.adj_nb[sa] = d
    g.adj_nb[sb] = c
    g.adj_eid[sb] = j
    g.adj_nb[sc] = b
    g.adj_nb[sd] = a
    g.adj_eid[sd] = i
    removed = ((min(a, b), max(a, b)), (min(c, d), max(c, d)))
    added = ((min(a, d), max(a, d)), (min(c, b), max(c, b)))
    return removed, added


def jdd_swap_step(g: Graph, rng: Rng):
    """One joint-degree-preserving move in place. Same return as dd_swap_step."""
    m = g.m
    s1 = rng.below(2 * m)
    i = s1 >> 1
    u1 = int(g.ev[i]) if s1 & 1 else int(g.eu[i])
    du = int(g.deg[u1])
    slot1 = int(g.off[u1]) + rng.below(du)
    v = int(g.adj_nb[slot1])
    e1 = int(g.adj_eid[slot1])
    class_off, class_vert = g.degree_classes()
    lo = int(class_off[du])
    u2 = int(class_vert[lo + rng.below(int(class_off[du + 1]) - lo)])
    if u2 == u1:
        # stream parity with the kernel: no neighbour draw on this path
        return None
    slot2 = int(g.off[u2]) + rng.below(du)
    w = int(g.adj_nb[slot2])
    e2 = int(g.adj_eid[slot2])
    if w == u1 or v == u2:
        return None
    if g.has_edge(u1, w) or g.has_edge(u2, v):
        return None
    sv = _slot_of(g, v, u1)
    sw = _slot_of(g, w, u2)
    g.eu[e1] = u1
    g.ev[e1] = w
    g.eu[e2] = u2
    g.ev[e2] = v
    g.adj_nb[slot1] = w
    g.adj_nb[slot2] = v
    g.adj_nb[sv] = u2
    g.adj_eid[sv] = e2
    g.adj_nb[sw] = u1
    g.adj_eid[sw] = e1
    removed = ((min(u1, v), max(u1, v)), (min(u2, w), max(u2, w)))
    added = ((min(u1, w), max(u1, w)), (min(u2, v), max(u2, v)))
    return removed, added


_STEPPERS = {"dd": dd_swap_step, "jdd": jdd_swap_step}


def run_chain(g: Graph, mode: str, steps: int, seed=None, rng=None, observers=()):
    """Advance the chain by `steps` moves, mutating g. Returns ChainStats.

    Exactly one source of randomness: pass `seed` to start a fresh stream,
    or `rng` to continue an existing one. Without observers the compiled
    loop is used; with observers each step calls observer(t, delta) where
    delta is None on rejection.
    """
    if mode not in _STEPPERS:
        raise InvalidInputError(f"unknown chain mode {mode!r}")
    steps = int(steps)
    if steps < 0:
        raise InvalidInputError("steps must be nonnegative")
    if (seed is None) == (rng is None):
        raise InvalidInputError("pass exactly one of seed, rng")
    if rng is None:
        rng = Rng(seed)
    if not observers:
        if mode == "jdd":
            class_off, class_vert = g.degree_classes()
        else:
            class_off, class_vert = _EMPTY, _EMPTY
        st = rng.state_array()
        applied = _kernels.chain_run(
            0 if mode == "dd" else 1,
            g.eu,
            g.ev,
            g.adj_nb,
            g.adj_eid,
            g.off,
            g.deg,
            class_off,
            class_vert,
            steps,
            st,
        )
        rng.set_state(st)
        applied = int(applied)
    else:
        step = _STEPPERS[mode]
        applied = 0
        for t in range(steps):
            delta = step(g, rng)
            if delta is not None:
                applied += 1
            for obs in observers:
                obs(t, delta)
    return ChainStats(
        mode=mode,
        steps=steps,
        applied=applied,
        rejected=steps - applied,
        seed=rng.seed,
    )
