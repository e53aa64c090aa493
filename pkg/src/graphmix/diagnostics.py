"""Independence and convergence diagnostics for pair occupancy series.

A tracked vertex pair yields a binary series: its occupancy recorded
every `stride` chain steps (stride 1 = after every step, plus the initial
state). The tools here decide, per pair, how much thinning makes the
series indistinguishable from an independent one:

  * 2x2 transition tables compared under an independence model vs a
    one-step memory model via the likelihood-ratio statistic G2 and a
    sample-size penalty (delta_bic < 0 favours independence);
  * 2x2x2 tables compared under one-step vs two-step memory
    (markov_order_test), used as a precondition before estimating
    transition rates;
  * mcest for the transition-rate estimates and required_length for the
    minimum sample count that makes a mean estimate trustworthy;
  * independence_sweep tying those together over a thinning schedule;
  * gelman_rubin comparing parallel chains started far apart.

Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateSeriesError,
    InsufficientDataError,
    InvalidInputError,
    ParseError,
)
from .graph import Graph
from .rewire import ChainStats
from .rng import GOLDEN, Rng

_M64 = (1 << 64) - 1


# ---------------------------------------------------------------- series


@dataclass
class EdgeSeries:
    """Occupancy of one vertex pair sampled every `stride` chain steps.

    bits[0] is the state before any step; bits[t] the state after step
    t*stride. Values are 0/1.
    """

    pair: tuple
    bits: np.ndarray
    stride: int = 1

    def __len__(self) -> int:
        return int(self.bits.size)

    def steps(self) -> int:
        return (int(self.bits.size) - 1) * self.stride

    def mean(self) -> float:
        return float(self.bits.mean())


def _bits_of(series) -> np.ndarray:
    if isinstance(series, EdgeSeries):
        return series.bits
    return np.asarray(series, dtype=np.uint8)


def thin(series, k: int):
    """Every k-th sample, starting at index 0; output length floor(len/k).

    EdgeSeries in, EdgeSeries out (stride multiplied); plain arrays pass
    through as arrays.
    """
    k = int(k)
    if k < 1:
        raise InvalidInputError("thinning factor must be >= 1")
    if isinstance(series, EdgeSeries):
        bits = series.bits
        L = bits.size // k
        return EdgeSeries(pair=series.pair, bits=bits[: L * k : k].copy(), stride=series.stride * k)
    bits = np.asarray(series)
    L = bits.size // k
    return bits[: L * k : k].copy()


def record_series(g: Graph, mode: str, steps: int, pairs, seed=None, rng=None, stride: int = 1):
    """Run a chain on g while recording the occupancy of `pairs`.

    Returns (list of EdgeSeries, ChainStats). steps must be a multiple of
    stride; each series has steps/stride + 1 samples. Tracking is O(1)
    per applied move via a hash of the tracked pairs, so the step cost
    does not depend on how many pairs are tracked.
    """
    if mode not in ("dd", "jdd"):
        raise InvalidInputError(f"unknown chain mode {mode!r}")
    steps = int(steps)
    stride = int(stride)
    if stride < 1:
        raise InvalidInputError("stride must be >= 1")
    if steps < 0 or steps % stride != 0:
        raise InvalidInputError("steps must be a nonnegative multiple of stride")
    if (seed is None) == (rng is None):
        raise InvalidInputError("pass exactly one of seed, rng")
    if rng is None:
        rng = Rng(seed)
    pairs = [(int(u), int(v)) for u, v in pairs]
    if not pairs:
        raise InvalidInputError("no pairs to track")
    T = len(pairs)
    cap = 1
    while cap < 2 * T:
        cap <<= 1
    hkeys = np.full(cap, -1, dtype=np.int64)
    hvals = np.zeros(cap, dtype=np.int64)
    hmask = cap - 1
    state = np.zeros(T, dtype=np.uint8)
    for idx, (u, v) in enumerate(pairs):
        if not (0 <= u < g.n and 0 <= v < g.n) or u == v:
            raise InvalidInputError(f"invalid tracked pair ({u}, {v})")
        key = (u * g.n + v) if u < v else (v * g.n + u)
        h = (((key * GOLDEN) & _M64) >> 40) & hmask
        while hkeys[h] != -1:
            if hkeys[h] == key:
                raise InvalidInputError(f"duplicate tracked pair ({u}, {v})")
            h = (h + 1) & hmask
        hkeys[h] = key
        hvals[h] = idx
        state[idx] = 1 if g.has_edge(u, v) else 0
    rows = steps // stride + 1
    out = np.zeros((rows, (T + 7) // 8), dtype=np.uint8)
    if mode == "jdd":
        class_off, class_vert = g.degree_classes()
    else:
        class_off = np.zeros(1, dtype=np.int64)
        class_vert = np.zeros(1, dtype=np.int64)
    st = rng.state_array()
    applied = _kernels.chain_run_recorded(
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
        hkeys,
        hvals,
        g.n,
        state,
        stride,
        out,
    )
    rng.set_state(st)
    cols = np.unpackbits(out, axis=1)[:, :T]
    series = [
        EdgeSeries(pair=pairs[i], bits=np.ascontiguousarray(cols[:, i]), stride=stride)
        for i in range(T)
    ]
    stats = ChainStats(
        mode=mode, steps=steps, applied=int(applied), rejected=steps - int(applied), seed=rng.seed
    )
    return series, stats


# ---------------------------------------------------------------- tables


@dataclass
class ContingencyTable2:
    """Counts x[i, j] of consecutive sample pairs (i then j)."""

    x: np.ndarray

    @property
    def total(self) -> int:
        return int(self.x.sum())

    @classmethod
    def from_series(cls, series) -> "ContingencyTable2":
        b = _bits_of(series).astype(np.int64)
        if b.size < 2:
            raise InsufficientDataError("need at least 2 samples for a transition table")
        idx = b[:-1] * 2 + b[1:]
        return cls(x=np.bincount(idx, minlength=4).reshape(2, 2))


@dataclass
class ContingencyTable3:
    """Counts x[i, j, k] of consecutive sample triples."""

    x: np.ndarray

    @property
    def total(self) -> int:
        return int(self.x.sum())

    @classmethod
    def from_series(cls, series) -> "ContingencyTable3":
        b = _bits_of(series).astype(np.int64)
        if b.size < 3:
            raise InsufficientDataError("need at least 3 samples for a triple table")
        idx = b[:-2] * 4 + b[1:-1] * 2 + b[2:]
        return cls(x=np.bincount(idx, minlength=8).reshape(2, 2, 2))


@dataclass
class TestReport:
    g2_independence: float
    g2_markov: float
    bic_independence: float
    bic_markov: float
    delta_bic: float
    verdict: str


def _g2(obs: np.ndarray, exp: np.ndarray) -> float:
    # zero observed cells contribute nothing
    mask = obs > 0
    return float(2.0 * np.sum(obs[mask] * np.log(obs[mask] / exp[mask])))


def g2_and_bic(table: ContingencyTable2, model: str):
    """Likelihood-ratio statistic and its penalised score for one model.

    independent: expected x[i,j] = rowsum_i * colsum_j / total, 1 free
    parameter. markov: saturated (expected = observed, G2 = 0), 2 free
    parameters. Score = G2 + params * ln(total).
    """
    x = table.x.astype(np.float64)
    total = x.sum()
    if model == "independent":
        rows = x.sum(axis=1)
        cols = x.sum(axis=0)
        if (rows == 0).any() or (cols == 0).any():
            raise InsufficientDataError("zero marginal: series never leaves one state")
        exp = np.outer(rows, cols) / total
        g2 = _g2(x, exp)
        return g2, g2 + 1.0 * math.log(total)
    if model == "markov":
        if total == 0:
            raise InsufficientDataError("empty table")
        return 0.0, 2.0 * math.log(total)
    raise InvalidInputError(f"unknown model {model!r}")


def independence_test(table: ContingencyTable2) -> TestReport:
    g2_i, bic_i = g2_and_bic(table, "independent")
    g2_m, bic_m = g2_and_bic(table, "markov")
    delta = bic_i - bic_m
    return TestReport(
        g2_independence=g2_i,
        g2_markov=g2_m,
        bic_independence=bic_i,
        bic_markov=bic_m,
        delta_bic=delta,
        verdict="independent" if delta < 0 else "markov",
    )


def delta_bic(table: ContingencyTable2) -> float:
    """Penalised-score difference: negative means the independence model
    explains the transitions at least as well as one-step memory."""
    g2_i, _ = g2_and_bic(table, "independent")
    return g2_i - math.log(table.total)


def markov_order_test(table3: ContingencyTable3) -> TestReport:
    """One-step vs two-step memory on a triple table.

    Under one-step memory the first and third symbols are conditionally
    independent given the middle one: expected x[i,j,k] =
    x[i,j,+] * x[+,j,k] / x[+,j,+]. The two-step model is saturated; the
    penalty gap is 2 parameters. Negative delta_bic: one step suffices.
    """
    x = table3.x.astype(np.float64)
    total = x.sum()
    mid = x.sum(axis=(0, 2))
    if (mid == 0).any() or total == 0:
        raise InsufficientDataError("series never passes through one of the states")
    xij = x.sum(axis=2)
    xjk = x.sum(axis=0)
    exp = xij[:, :, None] * xjk[None, :, :] / mid[None, :, None]
    g2_first = _g2(x, exp)
    bic_first = g2_first + 2.0 * math.log(total)
    bic_second = 4.0 * math.log(total)
    delta = bic_first - bic_second
    return TestReport(
        g2_independence=g2_first,
        g2_markov=0.0,
        bic_independence=bic_first,
        bic_markov=bic_second,
        delta_bic=delta,
        verdict="first-order" if delta < 0 else "second-order",
    )


# ------------------------------------------------------------- estimation


def mcest(series):
    """Transition-rate estimates (alpha_hat, beta_hat) from a series.

    alpha_hat = x01/(x00+x01), beta_hat = x10/(x10+x11). Needs the series
    to leave both states at least once.
    """
    b = _bits_of(series)
    table = ContingencyTable2.from_series(b)
    x = table.x
    n0 = x[0, 0] + x[0, 1]
    n1 = x[1, 0] + x[1, 1]
    if n0 == 0 or n1 == 0:
        raise DegenerateSeriesError("series is constant or visits a state only at the end")
    return float(x[0, 1] / n0), float(x[1, 0] / n1)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF (rational minimax approximation)."""
    if not (0.0 < p < 1.0):
        raise InvalidInputError("p must be in (0, 1)")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (
            (
                (
                    (
                        (
                            (
                                (2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                                + 6.7265770927008700853e4
                            )
                            * r
                            + 4.5921953931549871457e4
                        )
                        * r
                        + 1.3731693765509461125e4
                    )
                    * r
                    + 1.9715909503065514427e3
                )
                * r
                + 1.3314166789178437745e2
            )
            * r
            + 3.3871328727963666080e0
        )
        den = (
            (
                (
                    (
                        (
                            (
                                (5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                                + 3.9307895800092710610e4
                            )
                            * r
                            + 2.1213794301586595867e4
                        )
                        * r
                        + 5.3941960214247511077e3
                    )
                    * r
                    + 6.8718700749205790830e2
                )
                * r
                + 4.2313330701600911252e1
            )
            * r
            + 1.0
        )
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (
            (
                (
                    (
                        (
                            (
                                (7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                                + 2.41780725177450611770e-1
                            )
                            * r
                            + 1.27045825245236838258e0
                        )
                        * r
                        + 3.64784832476320460504e0
                    )
                    * r
                    + 5.76949722146069140550e0
                )
                * r
                + 4.63033784615654529590e0
            )
            * r
            + 1.42343711074968357734e0
        )
        den = (
            (
                (
                    (
                        (
                            (
                                (1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                                + 1.51986665636164571966e-2
                            )
                            * r
                            + 1.48103976427480074590e-1
                        )
                        * r
                        + 6.89767334985100004550e-1
                    )
                    * r
                    + 1.67638483018380384940e0
                )
                * r
                + 2.05319162663775882187e0
            )
            * r
            + 1.0
        )
    else:
        r -= 5.0
        num = (
            (
                (
                    (
                        (
                            (
                                (2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                                + 1.24266094738807843860e-3
                            )
                            * r
                            + 2.65321895265761230930e-2
                        )
                        * r
                        + 2.96560571828504891230e-1
                    )
                    * r
                    + 1.78482653991729133580e0
                )
                * r
                + 5.46378491116411436990e0
            )
            * r
            + 6.65790464350110377720e0
        )
        den = (
            (
                (
                    (
                        (
                            (
                                (2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                                + 1.84631831751005468180e-5
                            )
                            * r
                            + 7.86869131145613259100e-4
                        )
                        * r
                        + 1.48753612908506148525e-2
                    )
                    * r
                    + 1.36929880922735805310e-1
                )
                * r
                + 5.99832206555887937690e-1
            )
            * r
            + 1.0
        )
    val = num / den
    return -val if q < 0.0 else val


def required_length(alpha: float, beta: float, r: float, s: float) -> int:
    """Minimum sample count for the series mean to sit within +-r of the
    true occupancy with confidence s, for a 2-state chain at (alpha, beta).

    ceil( [a*b*(2-a-b)/(a+b)^3] * (z/r)^2 ) with z the normal quantile at
    (1+s)/2.
    """
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise InvalidInputError("alpha and beta must be in (0, 1)")
    if r <= 0.0:
        raise InvalidInputError("mean tolerance r must be positive")
    if not (0.0 < s < 1.0):
        raise InvalidInputError("confidence s must be in (0, 1)")
    var = alpha * beta * (2.0 - alpha - beta) / (alpha + beta) ** 3
    z = normal_quantile(0.5 * (1.0 + s))
    return int(math.ceil(var * (z / r) ** 2))


# ------------------------------------------------------------------ sweep


@dataclass
class PairReport:
    u: int
    v: int
    status: str  # independent | unresolved | degenerate
    k_independent: int | None
    alpha_hat: float | None
    beta_hat: float | None
    n_prime: int | None
    delta_bic_at_k: float | None


@dataclass
class SweepResult:
    reports: list
    fraction_by_k: dict
    k_schedule: list
    r: float
    s: float

    def fraction_at(self, k: int) -> float:
        return self.fraction_by_k[k]


def _sweep_one(series: EdgeSeries, ks, r, s) -> PairReport:
    u, v = series.pair
    bits = series.bits
    if bits.min() == bits.max():
        return PairReport(u, v, "degenerate", None, None, None, None, None)
    last = PairReport(u, v, "unresolved", None, None, None, None, None)
    for k in ks:
        factor = k // series.stride
        L = bits.size // factor
        if L < 3:
            break
        t = bits[: L * factor : factor]
        try:
            order = markov_order_test(ContingencyTable3.from_series(t))
        except InsufficientDataError:
            continue
        if order.delta_bic >= 0.0:
            continue
        try:
            a_hat, b_hat = mcest(t)
            n_prime = required_length(a_hat, b_hat, r, s)
        except (DegenerateSeriesError, InvalidInputError):
            continue
        if L - 1 < n_prime:
            continue
        try:
            dbic = delta_bic(ContingencyTable2.from_series(t))
        except InsufficientDataError:
            continue
        last = PairReport(u, v, "unresolved", None, a_hat, b_hat, n_prime, dbic)
        if dbic < 0.0:
            last.status = "independent"
            last.k_independent = k
            return last
    return last


def independence_sweep(
    series_list, k_schedule, r: float = 0.01, s: float = 0.95, workers: int | None = None
) -> SweepResult:
    """Per-pair smallest thinning that passes the independence test.

    For each pair and each k in the schedule (chain-step units, ascending)
    the series is thinned to every k-th step; the k qualifies only when
    one-step memory is preferred over two-step there, the transition
    estimates give a satisfiable sample-size requirement, the thinned
    length meets it, and the independence score wins. Pairs that never
    qualify are reported unresolved; constant series are reported
    degenerate. fraction_by_k counts pairs independent by each k among
    the non-degenerate ones.
    """
    series_list = list(series_list)
    if not k_schedule:
        raise InvalidInputError("empty thinning schedule")
    ks = sorted({int(k) for k in k_schedule})
    if ks[0] < 1:
        raise InvalidInputError("thinning factors must be >= 1")
    for series in series_list:
        for k in ks:
            if k % series.stride != 0:
                raise InvalidInputError(
                    f"thinning factor {k} is not a multiple of the recording stride {series.stride}"
                )
    if workers is not None and workers > 1 and len(series_list) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda sr: _sweep_one(sr, ks, r, s), series_list))
    else:
        reports = [_sweep_one(series, ks, r, s) for series in series_list]
    eligible = [rep for rep in reports if rep.status != "degenerate"]
    fraction_by_k = {}
    for k in ks:
        if eligible:
            ok = sum(1 for rep in eligible if rep.k_independent is not None and rep.k_independent <= k)
            fraction_by_k[k] = ok / len(eligible)
        else:
            fraction_by_k[k] = float("nan")
    return SweepResult(reports=reports, fraction_by_k=fraction_by_k, k_schedule=ks, r=r, s=s)


# ----------------------------------------------------------- convergence


def gelman_rubin(chains) -> float:
    """Potential scale reduction over parallel chains (split-half form).

    Each chain is halved; with n the half length, W the mean within-half
    variance and B the between-half-mean variance scaled by n, the factor
    is sqrt((n-1)/n + B/(n*W)). Identical constant chains give 1.0 by
    convention; distinct constants give +inf.
    """
    arrs = [np.asarray(c, dtype=np.float64).ravel() for c in chains]
    if len(arrs) < 2:
        raise InvalidInputError("need at least 2 chains")
    L = arrs[0].size
    if any(a.size != L for a in arrs):
        raise InvalidInputError("chains must have equal length")
    if L < 100:
        raise InvalidInputError("chains must have at least 100 samples")
    n = L // 2
    halves = []
    for a in arrs:
        halves.append(a[:n])
        halves.append(a[n : 2 * n])
    x = np.stack(halves)
    means = x.mean(axis=1)
    W = float(x.var(axis=1, ddof=1).mean())
    B = float(n * means.var(ddof=1))
    if W == 0.0:
        return 1.0 if B == 0.0 else float("inf")
    return math.sqrt((n - 1) / n + B / (n * W))


# -------------------------------------------------------------- series io


def save_series(path, series_list) -> None:
    """One header line '# pair u v K' (K = chain steps; a 'stride S' suffix
    is added when samples are coarser than every step) then the bit string."""
    with open(path, "w", encoding="utf-8") as fh:
        for series in series_list:
            u, v = series.pair
            head = f"# pair {u} {v} {series.steps()}"
            if series.stride != 1:
                head += f" stride {series.stride}"
            fh.write(head + "\n")
            fh.write("".join("1" if b else "0" for b in series.bits) + "\n")


def load_series(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        header_line = 0
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if header is not None:
                    raise ParseError("header without a series line", header_line)
                parts = line.split()
                ok = len(parts) in (5, 7) and parts[1] == "pair"
                if ok and len(parts) == 7 and parts[5] != "stride":
                    ok = False
                if not ok:
                    raise ParseError("malformed series header", lineno)
                try:
                    u, v, steps = int(parts[2]), int(parts[3]), int(parts[4])
                    stride = int(parts[6]) if len(parts) == 7 else 1
                except ValueError:
                    raise ParseError("malformed series header", lineno) from None
                if stride < 1 or steps < 0 or steps % stride != 0:
                    raise ParseError("inconsistent series header", lineno)
                header = (u, v, steps, stride)
                header_line = lineno
                continue
            if header is None:
                raise ParseError("series line without a header", lineno)
            if set(line) - {"0", "1"}:
                raise ParseError("series must be '0'/'1' characters", lineno)
            u, v, steps, stride = header
            if len(line) != steps // stride + 1:
                raise ParseError(
                    f"series length {len(line)} does not match header ({steps // stride + 1})",
                    lineno,
                )
            bits = np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")
            out.append(EdgeSeries(pair=(u, v), bits=bits, stride=stride))
            header = None
    if header is not None:
        raise ParseError("header without a series line", header_line)
    return out
