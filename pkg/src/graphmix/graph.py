"""Simple undirected graph with O(1) sampling primitives.

The store is array based so the swap kernels can mutate it in place:
endpoint arrays ``eu``/``ev`` (one row per edge, arbitrary orientation),
and a fixed-slot CSR adjacency. Vertex degrees never change under either
swap move, so each vertex owns a fixed block of slots for its whole
lifetime; ``adj_nb[s]`` is the neighbour seen through slot ``s`` and
``adj_eid[s]`` the index of the edge realising it.

Vertex ids from input files are compacted to 0..n-1 (sorted order); the
original ids are retained in ``vertex_ids`` and used when writing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidInputError,
    InvalidStateError,
    ParseError,
    SamplingExhaustedError,
)


class Graph:
    __slots__ = (
        "n",
        "m",
        "eu",
        "ev",
        "adj_nb",
        "adj_eid",
        "off",
        "deg",
        "vertex_ids",
        "loops_dropped",
        "duplicates_collapsed",
        "_classes",
    )

    def __init__(self, edges, n, vertex_ids=None, loops_dropped=0, duplicates_collapsed=0):
        """Build from an iterable of distinct (u, v) pairs with compacted ids.

        Self-loops, duplicate pairs, and out-of-range ids are rejected; use
        load_graph for raw files that need cleaning.
        """
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
            raise InvalidInputError("need a nonempty sequence of vertex pairs")
        if n < 1:
            raise InvalidInputError("vertex count must be positive")
        if arr.min() < 0 or arr.max() >= n:
            raise InvalidInputError("vertex id out of range")
        if (arr[:, 0] == arr[:, 1]).any():
            raise InvalidInputError("self-loops are not allowed")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        key = lo * n + hi
        if np.unique(key).shape[0] != key.shape[0]:
            raise InvalidInputError("duplicate edges are not allowed")
        m = arr.shape[0]
        self.n = int(n)
        self.m = int(m)
        self.eu = arr[:, 0].copy()
        self.ev = arr[:, 1].copy()
        self.deg = np.bincount(arr.ravel(), minlength=n).astype(np.int64)
        self.off = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.deg, out=self.off[1:])
        self.adj_nb = np.empty(2 * m, dtype=np.int64)
        self.adj_eid = np.empty(2 * m, dtype=np.int64)
        cur = self.off[:-1].copy()
        for k in range(m):
            u, v = self.eu[k], self.ev[k]
            self.adj_nb[cur[u]] = v
            self.adj_eid[cur[u]] = k
            cur[u] += 1
            self.adj_nb[cur[v]] = u
            self.adj_eid[cur[v]] = k
            cur[v] += 1
        if vertex_ids is None:
            self.vertex_ids = np.arange(n, dtype=np.int64)
        else:
            self.vertex_ids = np.asarray(vertex_ids, dtype=np.int64)
            if self.vertex_ids.shape[0] != n:
                raise InvalidInputError("vertex_ids length must equal n")
        self.loops_dropped = int(loops_dropped)
        self.duplicates_collapsed = int(duplicates_collapsed)
        self._classes = None

    # ------------------------------------------------------------ queries

    def degree(self, u: int) -> int:
        return int(self.deg[u])

    def neighbors(self, u: int) -> np.ndarray:
        s = self.off[u]
        return self.adj_nb[s : s + self.deg[u]].copy()

    def has_edge(self, u: int, v: int) -> bool:
        if self.deg[u] > self.deg[v]:
            u, v = v, u
        s = self.off[u]
        return bool((self.adj_nb[s : s + self.deg[u]] == v).any())

    def edge_array(self) -> np.ndarray:
        """(m, 2) array, min-id-first per row, rows sorted."""
        lo = np.minimum(self.eu, self.ev)
        hi = np.maximum(self.eu, self.ev)
        order = np.lexsort((hi, lo))
        return np.stack([lo[order], hi[order]], axis=1)

    def edge_set(self) -> set:
        lo = np.minimum(self.eu, self.ev)
        hi = np.maximum(self.eu, self.ev)
        return set(zip(lo.tolist(), hi.tolist()))

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n = self.n
        g.m = self.m
        g.eu = self.eu.copy()
        g.ev = self.ev.copy()
        g.adj_nb = self.adj_nb.copy()
        g.adj_eid = self.adj_eid.copy()
        g.off = self.off
        g.deg = self.deg
        g.vertex_ids = self.vertex_ids
        g.loops_dropped = self.loops_dropped
        g.duplicates_collapsed = self.duplicates_collapsed
        g._classes = self._classes
        return g

    def degree_classes(self):
        """CSR over degree values: vertices grouped by degree, ascending ids.

        Degrees are swap-invariant so this is built once per graph.
        """
        if self._classes is None:
            dmax = int(self.deg.max())
            counts = np.bincount(self.deg, minlength=dmax + 1)
            class_off = np.zeros(dmax + 2, dtype=np.int64)
            np.cumsum(counts, out=class_off[1:])
            class_vert = np.argsort(self.deg, kind="stable").astype(np.int64)
            self._classes = (class_off, class_vert)
        return self._classes

    # ------------------------------------------------------------ checks

    def check_consistency(self) -> None:
        """Full rebuild comparison of the derived structures. Raises on drift."""
        n, m = self.n, self.m
        if self.eu.min() < 0 or self.eu.max() >= n or self.ev.min() < 0 or self.ev.max() >= n:
            raise InvalidStateError("endpoint out of range")
        if (self.eu == self.ev).any():
            raise InvalidStateError("self-loop in edge table")
        lo = np.minimum(self.eu, self.ev)
        hi = np.maximum(self.eu, self.ev)
        if np.unique(lo * n + hi).shape[0] != m:
            raise InvalidStateError("parallel edges in edge table")
        if not (np.bincount(np.concatenate([self.eu, self.ev]), minlength=n) == self.deg).all():
            raise InvalidStateError("degree table inconsistent with edges")
        ref_off = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.deg, out=ref_off[1:])
        if not (ref_off == self.off).all():
            raise InvalidStateError("offset table inconsistent with degrees")
        # slot blocks must hold exactly the incident edges of each vertex
        owner = np.empty(2 * m, dtype=np.int64)
        for u in range(n):
            owner[self.off[u] : self.off[u] + self.deg[u]] = u
        eids = self.adj_eid
        if eids.min() < 0 or eids.max() >= m:
            raise InvalidStateError("edge id out of range in adjacency")
        a, b = self.eu[eids], self.ev[eids]
        other = np.where(a == owner, b, a)
        if not ((a == owner) | (b == owner)).all():
            raise InvalidStateError("slot references an edge not incident to its owner")
        if not (other == self.adj_nb).all():
            raise InvalidStateError("slot neighbour disagrees with its edge")
        blocks = np.sort(owner * n + self.adj_nb)
        expect = np.sort(np.concatenate([self.eu * n + self.ev, self.ev * n + self.eu]))
        if not (blocks == expect).all():
            raise InvalidStateError("adjacency content differs from edge table")


# ---------------------------------------------------------------- profile


@dataclass
class DegreeProfile:
    """Degree histogram f and joint histogram over edge endpoint degrees.

    joint is keyed by unordered degree pairs (d_lo, d_hi); count(i, j) is
    the symmetric accessor.
    """

    f: dict
    joint: dict
    n: int
    m: int

    def count(self, d1: int, d2: int) -> int:
        return self.joint.get((d1, d2) if d1 <= d2 else (d2, d1), 0)

    def f_of(self, d: int) -> int:
        return self.f.get(d, 0)


def degree_profile(g: Graph) -> DegreeProfile:
    counts = np.bincount(g.deg)
    f = {int(d): int(c) for d, c in enumerate(counts) if c > 0}
    du = g.deg[g.eu]
    dv = g.deg[g.ev]
    lo = np.minimum(du, dv)
    hi = np.maximum(du, dv)
    width = int(g.deg.max()) + 1
    packed = lo * width + hi
    uniq, cnt = np.unique(packed, return_counts=True)
    joint = {(int(k // width), int(k % width)): int(c) for k, c in zip(uniq, cnt)}
    return DegreeProfile(f=f, joint=joint, n=g.n, m=g.m)


# ---------------------------------------------------------------- file io


def load_graph(path, symmetrize: bool = True) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with '#' and blank lines are skipped. With symmetrize
    (default) each pair is folded into an undirected edge; self-loops are
    dropped and repeated pairs collapsed, both counted on the returned
    graph. With symmetrize=False the file must already be canonical
    (min-id-first, no loops, no repeats) and violations raise ParseError.
    """
    ids = set()
    seen = set()
    edges = []
    loops = 0
    dups = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected two vertex ids, got {len(parts)} tokens", lineno)
            try:
                u = int(parts[0])
                v = int(parts[1])
            except ValueError:
                raise ParseError("vertex ids must be integers", lineno) from None
            ids.add(u)
            ids.add(v)
            if u == v:
                if not symmetrize:
                    raise ParseError("self-loop in canonical file", lineno)
                loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            if not symmetrize and u > v:
                raise ParseError("canonical file must list min id first", lineno)
            if key in seen:
                if not symmetrize:
                    raise ParseError("duplicate edge in canonical file", lineno)
                dups += 1
                continue
            seen.add(key)
            edges.append(key)
    if not edges:
        raise InvalidInputError(f"{path}: no edges after cleaning")
    order = sorted(ids)
    index = {vid: i for i, vid in enumerate(order)}
    compact = [(index[u], index[v]) for u, v in edges]
    return Graph(
        compact,
        n=len(order),
        vertex_ids=np.array(order, dtype=np.int64),
        loops_dropped=loops,
        duplicates_collapsed=dups,
    )


def save_graph(g: Graph, path) -> None:
    """Write the edge list with original vertex ids, min-first, sorted rows."""
    arr = g.edge_array()
    a = g.vertex_ids[arr[:, 0]]
    b = g.vertex_ids[arr[:, 1]]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    order = np.lexsort((hi, lo))
    with open(path, "w", encoding="utf-8") as fh:
        for i in order:
            fh.write(f"{lo[i]} {hi[i]}\n")


# ---------------------------------------------------------------- sampling


def sample_uniform_edge_endpoint(g: Graph, rng):
    """Uniform (edge, endpoint) slot: each directed form has mass 1/(2m).

    Returns ((u, v), endpoint) with (u, v) in stored orientation.
    """
    slot = rng.below(2 * g.m)
    i = slot >> 1
    endpoint = g.ev[i] if slot & 1 else g.eu[i]
    return (int(g.eu[i]), int(g.ev[i])), int(endpoint)


def sample_edge_at_degree(g: Graph, d: int, rng, exclude: int | None = None):
    """Uniform (vertex, neighbour) pair over endpoint slots at degree d.

    All degree-d vertices expose exactly d slots, so a uniform vertex of
    degree d followed by a uniform neighbour is a uniform slot. `exclude`
    removes one vertex from the candidate set. Raises
    SamplingExhaustedError when no slot remains.
    """
    if d <= 0:
        raise SamplingExhaustedError(f"no endpoint slots at degree {d}")
    class_off, class_vert = g.degree_classes()
    if d >= class_off.shape[0] - 1:
        raise SamplingExhaustedError(f"no vertices of degree {d}")
    lo, hi = int(class_off[d]), int(class_off[d + 1])
    size = hi - lo
    skip = -1
    if exclude is not None and 0 <= exclude < g.n and g.deg[exclude] == d:
        block = class_vert[lo:hi]
        pos = int(np.searchsorted(block, exclude))
        if pos < size and block[pos] == exclude:
            skip = pos
            size -= 1
    if size <= 0:
        raise SamplingExhaustedError(f"no degree-{d} vertices outside the exclusion")
    r = rng.below(size)
    if skip >= 0 and r >= skip:
        r += 1
    u = int(class_vert[lo + r])
    w = int(g.adj_nb[g.off[u] + rng.below(d)])
    return u, w
