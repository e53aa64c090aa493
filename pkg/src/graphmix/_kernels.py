"""Compiled inner loops (numba).

Everything here mirrors a pure-Python implementation elsewhere in the
package; tests assert bit-for-bit agreement. The RNG update is the same
xoshiro256** as rng.py so a chain may hop between paths mid-stream.

Graph state layout shared with graph.Graph: endpoint arrays eu/ev of
length m, fixed-slot CSR adjacency (adj_nb = neighbour per slot, adj_eid =
edge index realising that slot, off/deg per vertex). Degrees are invariant
under both swap moves, so slot blocks never move; a swap rewrites two
edges and four slots in place.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

# ---------------------------------------------------------------- RNG


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, nogil=True)
def seed_state(seed):
    out = np.empty(4, dtype=np.uint64)
    x = uint64(seed)
    for i in range(4):
        x = x + uint64(0x9E3779B97F4A7C15)
        out[i] = _mix64(x)
    return out


@njit(cache=True, nogil=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (uint64(64) - k))


@njit(cache=True, nogil=True, inline="always")
def _next_u64(st):
    s0, s1, s2, s3 = st[0], st[1], st[2], st[3]
    result = _rotl(s1 * uint64(5), uint64(7)) * uint64(9)
    t = s1 << uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, uint64(45))
    st[0] = s0
    st[1] = s1
    st[2] = s2
    st[3] = s3
    return result


@njit(cache=True, nogil=True, inline="always")
def _below(st, n):
    un = uint64(n)
    threshold = (uint64(0) - un) % un
    while True:
        r = _next_u64(st)
        if r >= threshold:
            return int64(r % un)


# ---------------------------------------------------------------- swaps


@njit(cache=True, nogil=True, inline="always")
def _has_edge(adj_nb, off, deg, u, v):
    if deg[u] > deg[v]:
        u, v = v, u
    for i in range(off[u], off[u] + deg[u]):
        if adj_nb[i] == v:
            return True
    return False


@njit(cache=True, nogil=True, inline="always")
def _slot_of(adj_nb, off, deg, u, nb):
    for i in range(off[u], off[u] + deg[u]):
        if adj_nb[i] == nb:
            return i
    return int64(-1)


@njit(cache=True, nogil=True, inline="always")
def _dd_step(eu, ev, adj_nb, adj_eid, off, deg, st):
    """One degree-preserving move. Returns (applied, a, b, c, d):
    old edges (a,b),(c,d); new edges (a,d),(c,b) when applied."""
    m = eu.shape[0]
    s1 = _below(st, 2 * m)
    s2 = _below(st, 2 * m)
    i = s1 >> 1
    j = s2 >> 1
    if i == j:
        return False, int64(0), int64(0), int64(0), int64(0)
    if s1 & 1:
        a, b = ev[i], eu[i]
    else:
        a, b = eu[i], ev[i]
    if s2 & 1:
        c, d = ev[j], eu[j]
    else:
        c, d = eu[j], ev[j]
    if a == d or c == b:
        return False, a, b, c, d
    if _has_edge(adj_nb, off, deg, a, d):
        return False, a, b, c, d
    if _has_edge(adj_nb, off, deg, c, b):
        return False, a, b, c, d
    sa = _slot_of(adj_nb, off, deg, a, b)
    sb = _slot_of(adj_nb, off, deg, b, a)
    sc = _slot_of(adj_nb, off, deg, c, d)
    sd = _slot_of(adj_nb, off, deg, d, c)
    eu[i] = a
    ev[i] = d
    eu[j] = c
    ev[j] = b
    adj_nb[sa] = d
    adj_nb[sb] = c
    adj_eid[sb] = j
    adj_nb[sc] = b
    adj_nb[sd] = a
    adj_eid[sd] = i
    return True, a, b, c, d


@njit(cache=True, nogil=True, inline="always")
def _jdd_step(eu, ev, adj_nb, adj_eid, off, deg, class_off, class_vert, st):
    """One joint-degree-preserving move. Returns (applied, u1, v, u2, w):
    old edges (u1,v),(u2,w); new edges (u1,w),(u2,v) when applied."""
    m = eu.shape[0]
    s1 = _below(st, 2 * m)
    i = s1 >> 1
    if s1 & 1:
        u1 = ev[i]
    else:
        u1 = eu[i]
    slot1 = off[u1] + _below(st, deg[u1])
    v = adj_nb[slot1]
    e1 = adj_eid[slot1]
    d = deg[u1]
    lo = class_off[d]
    u2 = class_vert[lo + _below(st, class_off[d + 1] - lo)]
    if u2 == u1:
        # no second neighbour draw on this rejection path
        return False, u1, v, u1, v
    slot2 = off[u2] + _below(st, deg[u2])
    w = adj_nb[slot2]
    e2 = adj_eid[slot2]
    if w == u1 or v == u2:
        return False, u1, v, u2, w
    if _has_edge(adj_nb, off, deg, u1, w):
        return False, u1, v, u2, w
    if _has_edge(adj_nb, off, deg, u2, v):
        return False, u1, v, u2, w
    eu[e1] = u1
    ev[e1] = w
    eu[e2] = u2
    ev[e2] = v
    sv = _slot_of(adj_nb, off, deg, v, u1)
    sw = _slot_of(adj_nb, off, deg, w, u2)
    adj_nb[slot1] = w
    adj_nb[slot2] = v
    adj_nb[sv] = u2
    adj_eid[sv] = e2
    adj_nb[sw] = u1
    adj_eid[sw] = e1
    return True, u1, v, u2, w


@njit(cache=True, nogil=True)
def chain_run(mode, eu, ev, adj_nb, adj_eid, off, deg, class_off, class_vert, steps, st):
    """Run `steps` moves; every draw counts as a step. Returns applied count."""
    applied = 0
    if mode == 0:
        for _ in range(steps):
            ok, _, _, _, _ = _dd_step(eu, ev, adj_nb, adj_eid, off, deg, st)
            if ok:
                applied += 1
    else:
        for _ in range(steps):
            ok, _, _, _, _ = _jdd_step(
                eu, ev, adj_nb, adj_eid, off, deg, class_off, class_vert, st
            )
            if ok:
                applied += 1
    return applied


# ------------------------------------------------------- tracked recording


@njit(cache=True, nogil=True, inline="always")
def _probe(hkeys, hvals, key):
    mask = hkeys.shape[0] - 1
    h = int64((uint64(key) * uint64(0x9E3779B97F4A7C15)) >> uint64(40)) & mask
    while True:
        k = hkeys[h]
        if k == key:
            return hvals[h]
        if k == -1:
            return int64(-1)
        h = (h + 1) & mask


@njit(cache=True, nogil=True, inline="always")
def _mark(hkeys, hvals, state, nverts, x, y, value):
    if x < y:
        key = x * nverts + y
    else:
        key = y * nverts + x
    p = _probe(hkeys, hvals, key)
    if p >= 0:
        state[p] = value


@njit(cache=True, nogil=True, inline="always")
def _pack_row(state, out, row):
    T = state.shape[0]
    for byte in range(out.shape[1]):
        acc = 0
        base = byte * 8
        for bit in range(8):
            idx = base + bit
            if idx < T and state[idx] != 0:
                acc |= 1 << (7 - bit)
        out[row, byte] = acc


@njit(cache=True, nogil=True)
def chain_run_recorded(
    mode,
    eu,
    ev,
    adj_nb,
    adj_eid,
    off,
    deg,
    class_off,
    class_vert,
    steps,
    st,
    hkeys,
    hvals,
    nverts,
    state,
    stride,
    out,
):
    """chain_run plus occupancy recording for a tracked pair set.

    `state` holds the current 0/1 occupancy of each tracked pair and must
    be initialised by the caller. Row r of `out` receives the packed state
    at step r*stride (row 0 = initial state). steps must be a multiple of
    stride.
    """
    _pack_row(state, out, 0)
    snap = 1
    applied = 0
    for t in range(1, steps + 1):
        if mode == 0:
            ok, a, b, c, d = _dd_step(eu, ev, adj_nb, adj_eid, off, deg, st)
            if ok:
                _mark(hkeys, hvals, state, nverts, a, b, 0)
                _mark(hkeys, hvals, state, nverts, c, d, 0)
                _mark(hkeys, hvals, state, nverts, a, d, 1)
                _mark(hkeys, hvals, state, nverts, c, b, 1)
                applied += 1
        else:
            ok, u1, v, u2, w = _jdd_step(
                eu, ev, adj_nb, adj_eid, off, deg, class_off, class_vert, st
            )
            if ok:
                _mark(hkeys, hvals, state, nverts, u1, v, 0)
                _mark(hkeys, hvals, state, nverts, u2, w, 0)
                _mark(hkeys, hvals, state, nverts, u1, w, 1)
                _mark(hkeys, hvals, state, nverts, u2, v, 1)
                applied += 1
        if t % stride == 0:
            _pack_row(state, out, snap)
            snap += 1
    return applied


# ---------------------------------------------------------------- metrics


@njit(cache=True, nogil=True)
def closed_path_ends(sorted_nb, off, deg, eu, ev):
    """Sum over edges of |N(u) & N(v)|, i.e. 3x the triangle count.
    sorted_nb must hold each vertex's neighbour block in ascending order."""
    total = 0
    for k in range(eu.shape[0]):
        u, v = eu[k], ev[k]
        i, iend = off[u], off[u] + deg[u]
        j, jend = off[v], off[v] + deg[v]
        while i < iend and j < jend:
            a, b = sorted_nb[i], sorted_nb[j]
            if a == b:
                total += 1
                i += 1
                j += 1
            elif a < b:
                i += 1
            else:
                j += 1
    return total


@njit(cache=True, nogil=True)
def bfs_fill(adj_nb, off, deg, src, dist, queue):
    """BFS from src; dist must be prefilled with -1. Returns (farthest, ecc)."""
    dist[src] = 0
    queue[0] = src
    head, tail = 0, 1
    far, ecc = src, 0
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if du > ecc:
            ecc = du
            far = u
        for s in range(off[u], off[u] + deg[u]):
            v = adj_nb[s]
            if dist[v] < 0:
                dist[v] = du + 1
                queue[tail] = v
                tail += 1
    return far, ecc


@njit(cache=True, nogil=True)
def component_labels(adj_nb, off, deg):
    n = deg.shape[0]
    label = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    c = 0
    for s in range(n):
        if label[s] >= 0:
            continue
        label[s] = c
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            for k in range(off[u], off[u] + deg[u]):
                v = adj_nb[k]
                if label[v] < 0:
                    label[v] = c
                    queue[tail] = v
                    tail += 1
        c += 1
    return label, c


@njit(cache=True, nogil=True)
def diameter_sweep(adj_nb, off, deg, members):
    """Exact diameter of the (connected) vertex set `members` by all-source BFS."""
    n = deg.shape[0]
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    best = 0
    for idx in range(members.shape[0]):
        for i in range(n):
            dist[i] = -1
        _, ecc = bfs_fill(adj_nb, off, deg, members[idx], dist, queue)
        if ecc > best:
            best = ecc
    return best


@njit(cache=True, nogil=True)
def eccentricity(adj_nb, off, deg, src):
    n = deg.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    far, ecc = bfs_fill(adj_nb, off, deg, src, dist, queue)
    return far, ecc, dist


@njit(cache=True, nogil=True)
def lap_matvec(adj_nb, off, deg, x, y):
    """y = (D - A) x."""
    for u in range(deg.shape[0]):
        s = deg[u] * x[u]
        for k in range(off[u], off[u] + deg[u]):
            s -= x[adj_nb[k]]
        y[u] = s
