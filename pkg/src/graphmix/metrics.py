"""Graph observables used to compare ensembles.

All three are invariant under vertex relabeling and read-only over the
graph, so they are safe to evaluate in parallel across ensemble members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, UndefinedMetricError
from .graph import Graph
from .rng import GOLDEN


def _hashed_start(n: int) -> np.ndarray:
    # a linear ramp can be exactly orthogonal to the top eigenvector on
    # mirror-symmetric graphs; per-index hashing has generic overlap
    z = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GOLDEN)
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return 1.0 + z.astype(np.float64) / 2.0**64


def _sorted_adjacency(g: Graph) -> np.ndarray:
    nb = g.adj_nb.copy()
    for u in range(g.n):
        s = int(g.off[u])
        e = s + int(g.deg[u])
        nb[s:e] = np.sort(nb[s:e])
    return nb


def global_clustering(g: Graph) -> float:
    """3 * triangles / wedges, wedges = sum over vertices of C(d, 2)."""
    d = g.deg.astype(np.float64)
    wedges = float(np.sum(d * (d - 1.0)) / 2.0)
    if wedges == 0.0:
        raise UndefinedMetricError("graph has no wedges")
    closed = _kernels.closed_path_ends(_sorted_adjacency(g), g.off, g.deg, g.eu, g.ev)
    return float(closed) / wedges


@dataclass(frozen=True)
class DiameterResult:
    value: int
    exact: bool

    def __int__(self) -> int:
        return self.value


def diameter(g: Graph, exact_threshold: int = 6000, bfs_budget: int = 2000) -> DiameterResult:
    """Longest shortest path within the largest connected component.

    Components up to exact_threshold vertices get an exact all-source
    scan. Larger ones get a two-sweep lower bound refined by re-scanning
    the deepest layers of a tree rooted between the two sweep ends; the
    refinement certifies exactness unless it runs out of its BFS budget,
    in which case the best lower bound is returned flagged inexact.
    """
    label, ncomp = _kernels.component_labels(g.adj_nb, g.off, g.deg)
    sizes = np.bincount(label, minlength=ncomp)
    comp = int(np.argmax(sizes))
    members = np.nonzero(label == comp)[0].astype(np.int64)
    if members.size == 1:
        return DiameterResult(0, True)
    if members.size <= exact_threshold:
        best = _kernels.diameter_sweep(g.adj_nb, g.off, g.deg, members)
        return DiameterResult(int(best), True)
    start = int(members[np.argmax(g.deg[members])])
    a, _, _ = _kernels.eccentricity(g.adj_nb, g.off, g.deg, start)
    b, lb, dist_a = _kernels.eccentricity(g.adj_nb, g.off, g.deg, int(a))
    used = 3
    # root the refinement midway along the a-b path
    path_mid = int(a)
    _, _, dist_b = _kernels.eccentricity(g.adj_nb, g.off, g.deg, int(b))
    half = lb // 2
    on_path = np.nonzero((dist_a >= 0) & (dist_a + dist_b == lb))[0]
    if on_path.size:
        path_mid = int(on_path[np.argmin(np.abs(dist_a[on_path] - half))])
    _, ecc_r, dist_r = _kernels.eccentricity(g.adj_nb, g.off, g.deg, path_mid)
    used += 1
    lb = max(int(lb), int(ecc_r))
    level = int(dist_r.max())
    order = np.argsort(dist_r[members])[::-1]
    idx = 0
    while level > lb // 2:
        while idx < members.size:
            v = int(members[order[idx]])
            if dist_r[v] < level:
                break
            if used >= bfs_budget:
                return DiameterResult(lb, False)
            _, ecc_v, _ = _kernels.eccentricity(g.adj_nb, g.off, g.deg, v)
            used += 1
            if ecc_v > lb:
                lb = int(ecc_v)
            idx += 1
        if lb >= 2 * level - 1:
            break
        level -= 1
    return DiameterResult(lb, True)


def max_laplacian_eigenvalue(g: Graph, tol: float = 1e-8, max_iter: int = 50000) -> float:
    """Largest eigenvalue of D - A by power iteration.

    The all-ones direction is a null vector of D - A, so it dies after
    one multiply; the deterministic hashed perturbation in the start
    vector supplies the dominant component. Residual check is
    ||Lx - lam*x|| <= tol * lam on the unit vector.
    """
    n = g.n
    x = _hashed_start(n)
    x /= np.linalg.norm(x)
    y = np.empty_like(x)
    lam = 0.0
    for _ in range(max_iter):
        _kernels.lap_matvec(g.adj_nb, g.off, g.deg, x, y)
        lam = float(x @ y)
        resid = float(np.linalg.norm(y - lam * x))
        norm = float(np.linalg.norm(y))
        if lam > 0.0 and resid <= tol * lam:
            return lam
        if norm == 0.0:
            # graph with no edges would give the zero map; m >= 1 rules it out
            raise ConvergenceError("matvec collapsed to zero", estimate=0.0)
        x, y = y / norm, x
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} iterations",
        estimate=lam,
    )
