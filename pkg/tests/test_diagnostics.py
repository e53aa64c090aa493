import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphmix import (
    ContingencyTable2,
    ContingencyTable3,
    DegenerateSeriesError,
    EdgeSeries,
    Graph,
    InsufficientDataError,
    InvalidInputError,
    ParseError,
    Rng,
    delta_bic,
    g2_and_bic,
    gelman_rubin,
    independence_sweep,
    independence_test,
    load_series,
    markov_order_test,
    mcest,
    normal_quantile,
    record_series,
    required_length,
    save_series,
    thin,
)

from _synth import gnm_graph


def _sticky_chain(n, p_flip, seed):
    # alpha == beta == p_flip: flips are iid, state is their running parity
    r = np.random.default_rng(seed)
    flips = (r.random(n) < p_flip).astype(np.uint8)
    flips[0] = 0
    return (np.cumsum(flips, dtype=np.int64) % 2).astype(np.uint8)


def _iid_bits(n, p, seed):
    r = np.random.default_rng(seed)
    return (r.random(n) < p).astype(np.uint8)


# ---------------------------------------------------------------- series


def test_edge_series_accessors():
    s = EdgeSeries(pair=(3, 7), bits=np.array([0, 1, 1, 0], dtype=np.uint8), stride=5)
    assert len(s) == 4
    assert s.steps() == 15
    assert s.mean() == 0.5


def test_thin_floor_semantics():
    bits = np.arange(10) % 2
    assert thin(bits, 3).tolist() == [0, 1, 0]
    assert thin(bits, 1).tolist() == bits.tolist()
    assert thin(bits, 10).tolist() == [0]
    s = EdgeSeries(pair=(0, 1), bits=bits.astype(np.uint8), stride=2)
    t = thin(s, 3)
    assert t.stride == 6 and t.pair == (0, 1) and len(t) == 3
    with pytest.raises(InvalidInputError):
        thin(bits, 0)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(0, 1), min_size=1, max_size=300),
    st.integers(1, 10),
    st.integers(1, 10),
)
def test_thin_composes(bits, a, b):
    arr = np.array(bits, dtype=np.uint8)
    assert np.array_equal(thin(thin(arr, a), b), thin(arr, a * b))


def test_record_series_tracks_known_trajectory():
    g = gnm_graph(30, 70, seed=12)
    pairs = [tuple(e) for e in g.edge_array()[:3]] + [(0, 1), (0, 2)]
    pairs = list(dict.fromkeys(pairs))[:4]
    series, stats = record_series(g, "dd", 2000, pairs, seed=55)
    assert stats.steps == 2000 and stats.applied > 0
    for s in series:
        assert len(s) == 2001
        # final sample reflects the final graph
        assert s.bits[-1] == (1 if g.has_edge(*s.pair) else 0)
    # replay the same run with per-step observation and compare one pair
    h = gnm_graph(30, 70, seed=12)
    from graphmix import run_chain

    u, v = series[0].pair
    seen = [1 if h.has_edge(u, v) else 0]

    def watch(t, delta):
        seen.append(1 if h.has_edge(u, v) else 0)

    run_chain(h, "dd", 2000, seed=55, observers=[watch])
    assert np.array_equal(series[0].bits, np.array(seen, dtype=np.uint8))


def test_record_series_stride_is_a_subsample():
    g1 = gnm_graph(30, 70, seed=3)
    g2 = gnm_graph(30, 70, seed=3)
    pairs = [(0, 1), (2, 5)]
    full, _ = record_series(g1, "dd", 2000, pairs, seed=77)
    coarse, _ = record_series(g2, "dd", 2000, pairs, seed=77, stride=5)
    for f, c in zip(full, coarse):
        assert len(c) == 401
        assert np.array_equal(c.bits, f.bits[::5])
        t = thin(f, 5)
        assert np.array_equal(t.bits, c.bits[: len(t)])


def test_record_series_on_frozen_graph():
    g = Graph([(0, 1)], n=3)
    series, stats = record_series(g, "dd", 100, [(0, 1), (1, 2)], seed=4)
    assert stats.applied == 0
    assert series[0].bits.min() == 1
    assert series[1].bits.max() == 0


def test_record_series_validation():
    g = gnm_graph(10, 20, seed=0)
    with pytest.raises(InvalidInputError):
        record_series(g, "dd", 100, [], seed=1)
    with pytest.raises(InvalidInputError):
        record_series(g, "dd", 100, [(0, 1), (1, 0)], seed=1)
    with pytest.raises(InvalidInputError):
        record_series(g, "dd", 100, [(0, 0)], seed=1)
    with pytest.raises(InvalidInputError):
        record_series(g, "dd", 101, [(0, 1)], seed=1, stride=2)
    with pytest.raises(InvalidInputError):
        record_series(g, "dd", 100, [(0, 99)], seed=1)


def test_record_series_deterministic_and_continuable():
    g1 = gnm_graph(25, 60, seed=8)
    g2 = gnm_graph(25, 60, seed=8)
    a, sa = record_series(g1, "jdd", 1500, [(0, 1)], seed=6)
    b, sb = record_series(g2, "jdd", 1500, [(0, 1)], seed=6)
    assert np.array_equal(a[0].bits, b[0].bits)
    assert sa.applied == sb.applied
    # one stream split across two recordings equals one long recording
    g3 = gnm_graph(25, 60, seed=8)
    rng = Rng(6)
    c1, _ = record_series(g3, "jdd", 700, [(0, 1)], rng=rng)
    c2, _ = record_series(g3, "jdd", 800, [(0, 1)], rng=rng)
    joined = np.concatenate([c1[0].bits, c2[0].bits[1:]])
    assert np.array_equal(joined, a[0].bits)


# ---------------------------------------------------------------- tables


def test_contingency_tables_from_series():
    t2 = ContingencyTable2.from_series([0, 1, 1, 0, 0])
    assert t2.x.tolist() == [[1, 1], [1, 1]]
    assert t2.total == 4
    t3 = ContingencyTable3.from_series([0, 1, 0, 1, 0])
    assert t3.x[0, 1, 0] == 2 and t3.x[1, 0, 1] == 1
    assert t3.total == 3
    with pytest.raises(InsufficientDataError):
        ContingencyTable2.from_series([1])
    with pytest.raises(InsufficientDataError):
        ContingencyTable3.from_series([1, 0])


def test_g2_frozen_value():
    t = ContingencyTable2(x=np.array([[90, 10], [10, 90]]))
    g2, bic = g2_and_bic(t, "independent")
    assert g2 == pytest.approx(147.22568286739886, abs=1e-10)
    assert bic == pytest.approx(g2 + math.log(200), abs=1e-12)
    g2m, bicm = g2_and_bic(t, "markov")
    assert g2m == 0.0 and bicm == pytest.approx(2 * math.log(200))
    with pytest.raises(InvalidInputError):
        g2_and_bic(t, "other")


def test_g2_equals_likelihood_ratio():
    # G2 must equal twice the log-likelihood gap between the saturated
    # and the independence fit, computed directly from MLE probabilities
    r = np.random.default_rng(42)
    for _ in range(100):
        x = r.integers(1, 200, size=(2, 2)).astype(np.float64)
        n = x.sum()
        ll_sat = np.sum(x * np.log(x / n))
        rows, cols = x.sum(axis=1), x.sum(axis=0)
        p = np.outer(rows / n, cols / n)
        ll_ind = np.sum(x * np.log(p))
        g2, _ = g2_and_bic(ContingencyTable2(x=x), "independent")
        assert g2 == pytest.approx(2 * (ll_sat - ll_ind), abs=1e-10)


def test_g2_zero_cells_contribute_nothing():
    t = ContingencyTable2(x=np.array([[50, 0], [30, 20]]))
    g2, _ = g2_and_bic(t, "independent")
    x = t.x.astype(float)
    n = x.sum()
    exp = np.outer(x.sum(1), x.sum(0)) / n
    manual = 2 * sum(
        x[i, j] * math.log(x[i, j] / exp[i, j]) for i in range(2) for j in range(2) if x[i, j] > 0
    )
    assert g2 == pytest.approx(manual, abs=1e-12)


def test_zero_marginal_raises():
    t = ContingencyTable2.from_series([0, 0, 0, 1])
    with pytest.raises(InsufficientDataError):
        g2_and_bic(t, "independent")


def test_delta_bic_uniform_table():
    t = ContingencyTable2(x=np.full((2, 2), 50))
    assert delta_bic(t) == pytest.approx(-math.log(200), abs=1e-12)
    rep = independence_test(t)
    assert rep.verdict == "independent"
    assert rep.delta_bic == pytest.approx(-math.log(200), abs=1e-12)


def test_delta_bic_label_swap_invariance():
    x = np.array([[70, 15], [25, 40]])
    swapped = x[::-1, ::-1]
    a = delta_bic(ContingencyTable2(x=x))
    b = delta_bic(ContingencyTable2(x=swapped))
    assert a == pytest.approx(b, abs=1e-12)


def test_independence_verdicts_on_synthetic_series():
    iid = _iid_bits(20000, 0.4, seed=5)
    rep = independence_test(ContingencyTable2.from_series(iid))
    assert rep.verdict == "independent"
    sticky = _sticky_chain(20000, 0.02, seed=5)
    rep = independence_test(ContingencyTable2.from_series(sticky))
    assert rep.verdict == "markov"
    assert rep.delta_bic > 0


def test_markov_order_verdicts():
    # an alternating series is perfectly described by one-step memory
    alt = np.tile([0, 1], 600).astype(np.uint8)
    rep = markov_order_test(ContingencyTable3.from_series(alt))
    assert rep.verdict == "first-order"
    assert rep.g2_independence == pytest.approx(0.0, abs=1e-9)
    # a period-3 pattern needs two steps of memory
    per3 = np.tile([0, 0, 1], 400).astype(np.uint8)
    rep = markov_order_test(ContingencyTable3.from_series(per3))
    assert rep.verdict == "second-order"
    assert rep.delta_bic > 0
    # first-order chain data prefers first order
    sticky = _sticky_chain(20000, 0.05, seed=11)
    rep = markov_order_test(ContingencyTable3.from_series(sticky))
    assert rep.verdict == "first-order"


def test_markov_order_gate_on_missing_state():
    ser = np.zeros(50, dtype=np.uint8)
    ser[-1] = 1
    with pytest.raises(InsufficientDataError):
        markov_order_test(ContingencyTable3.from_series(ser))


# ------------------------------------------------------------- estimation


def test_mcest_counts():
    a, b = mcest([0, 0, 1, 1, 1, 0])
    # from 0: 0->0 once, 0->1 once; from 1: 1->1 twice, 1->0 once
    assert a == pytest.approx(0.5)
    assert b == pytest.approx(1 / 3)
    with pytest.raises(DegenerateSeriesError):
        mcest([0, 0, 0, 0])
    with pytest.raises(DegenerateSeriesError):
        mcest([0, 0, 0, 1])


def test_mcest_converges_with_length():
    errs = []
    for n in (10**3, 10**4, 10**5):
        ch = _sticky_chain(n + 1, 0.05, seed=9)
        a, b = mcest(ch)
        bound = 5 * math.sqrt(0.05 * 0.95 / (n / 2))
        assert abs(a - 0.05) < bound and abs(b - 0.05) < bound
        errs.append(abs(a - 0.05) + abs(b - 0.05))
    assert errs[0] > errs[1] > errs[2]


def test_normal_quantile_against_reference():
    from scipy.special import ndtri

    for p in (1e-10, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999, 1 - 1e-10):
        assert normal_quantile(p) == pytest.approx(float(ndtri(p)), abs=1e-8)
    assert normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-12)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(InvalidInputError):
            normal_quantile(bad)


def test_required_length_frozen_values():
    assert required_length(0.5, 0.5, 0.01, 0.95) == 9604
    # doubling the tolerance divides the requirement by four
    assert required_length(0.5, 0.5, 0.02, 0.95) == 2401
    assert required_length(0.5, 0.5, 0.01, 0.99) > 9604
    # stickier chains need more samples
    assert required_length(0.05, 0.05, 0.01, 0.95) > required_length(0.5, 0.5, 0.01, 0.95)
    for args in ((0.0, 0.5, 0.01, 0.95), (0.5, 1.0, 0.01, 0.95), (0.5, 0.5, 0.0, 0.95), (0.5, 0.5, 0.01, 1.0)):
        with pytest.raises(InvalidInputError):
            required_length(*args)


# ------------------------------------------------------------------ sweep


def _sweep_fixture():
    iid = EdgeSeries(pair=(0, 1), bits=_iid_bits(20001, 0.5, seed=101))
    sticky = EdgeSeries(pair=(2, 3), bits=_sticky_chain(40001, 0.05, seed=202))
    const = EdgeSeries(pair=(4, 5), bits=np.zeros(20001, dtype=np.uint8))
    return [iid, sticky, const]


def test_independence_sweep_classification():
    res = independence_sweep(_sweep_fixture(), [1, 2, 4, 8, 16, 32, 64], r=0.05, s=0.95)
    by_pair = {(rep.u, rep.v): rep for rep in res.reports}
    assert by_pair[(0, 1)].status == "independent"
    assert by_pair[(0, 1)].k_independent == 1
    assert by_pair[(0, 1)].n_prime == 386
    assert by_pair[(2, 3)].status == "independent"
    assert by_pair[(2, 3)].k_independent == 32
    assert by_pair[(4, 5)].status == "degenerate"
    # cumulative fraction over the two non-degenerate pairs
    assert res.fraction_by_k == {1: 0.5, 2: 0.5, 4: 0.5, 8: 0.5, 16: 0.5, 32: 1.0, 64: 1.0}
    assert res.fraction_at(16) == 0.5


def test_independence_sweep_workers_match_serial():
    serial = independence_sweep(_sweep_fixture(), [1, 4, 16, 64], r=0.05, s=0.95)
    pooled = independence_sweep(_sweep_fixture(), [1, 4, 16, 64], r=0.05, s=0.95, workers=3)
    for a, b in zip(serial.reports, pooled.reports):
        assert (a.status, a.k_independent, a.n_prime) == (b.status, b.k_independent, b.n_prime)


def test_independence_sweep_unresolved_when_too_short():
    sticky = EdgeSeries(pair=(0, 1), bits=_sticky_chain(301, 0.05, seed=1))
    res = independence_sweep([sticky], [1, 2], r=0.05, s=0.95)
    assert res.reports[0].status == "unresolved"
    assert math.isnan(res.fraction_by_k[1]) is False
    assert res.fraction_by_k[2] == 0.0


def test_independence_sweep_all_degenerate_gives_nan():
    const = EdgeSeries(pair=(0, 1), bits=np.ones(500, dtype=np.uint8))
    res = independence_sweep([const], [1])
    assert math.isnan(res.fraction_by_k[1])


def test_independence_sweep_validation():
    s = EdgeSeries(pair=(0, 1), bits=np.zeros(10, dtype=np.uint8), stride=4)
    with pytest.raises(InvalidInputError):
        independence_sweep([s], [])
    with pytest.raises(InvalidInputError):
        independence_sweep([s], [0, 4])
    with pytest.raises(InvalidInputError):
        independence_sweep([s], [6])
    independence_sweep([s], [4, 8])


# ----------------------------------------------------------- convergence


def test_gelman_rubin_reference_values():
    alt = np.tile([0.0, 1.0], 50)
    # all four half means agree: only the (n-1)/n term remains
    assert gelman_rubin([alt, alt.copy()]) == pytest.approx(math.sqrt(49 / 50), abs=1e-12)
    const = np.ones(100)
    assert gelman_rubin([const, const.copy()]) == 1.0
    assert gelman_rubin([const, np.zeros(100)]) == math.inf
    drift = np.concatenate([np.zeros(50), np.ones(50)])
    assert gelman_rubin([drift, drift.copy()]) == math.inf


def test_gelman_rubin_detects_disagreement():
    r = np.random.default_rng(77)
    a = r.normal(0, 1, size=10000)
    b = r.normal(0, 1, size=10000)
    assert gelman_rubin([a, b]) < 1.02
    assert gelman_rubin([a, b + 3.0]) > 1.5


def test_gelman_rubin_validation():
    with pytest.raises(InvalidInputError):
        gelman_rubin([np.zeros(100)])
    with pytest.raises(InvalidInputError):
        gelman_rubin([np.zeros(100), np.zeros(101)])
    with pytest.raises(InvalidInputError):
        gelman_rubin([np.zeros(99), np.zeros(99)])


# -------------------------------------------------------------- series io


def test_series_io_round_trip(tmp_path):
    s1 = EdgeSeries(pair=(3, 9), bits=np.array([0, 1, 1, 0, 1], dtype=np.uint8))
    s2 = EdgeSeries(pair=(0, 4), bits=np.array([1, 0, 0], dtype=np.uint8), stride=7)
    p = tmp_path / "series.txt"
    save_series(p, [s1, s2])
    loaded = load_series(p)
    assert len(loaded) == 2
    for orig, back in zip([s1, s2], loaded):
        assert back.pair == orig.pair
        assert back.stride == orig.stride
        assert np.array_equal(back.bits, orig.bits)
        assert back.steps() == orig.steps()


def test_series_io_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0101\n")
    with pytest.raises(ParseError, match="line 1"):
        load_series(p)
    p.write_text("# pair 0 1 3\n01019\n")
    with pytest.raises(ParseError, match="line 2"):
        load_series(p)
    p.write_text("# pair 0 1 3\n01\n")
    with pytest.raises(ParseError, match="length"):
        load_series(p)
    p.write_text("# pair 0 1 3 stride 2\n01\n")
    with pytest.raises(ParseError):
        load_series(p)
    p.write_text("# pair 0 1 4 stride 2\n010\n")
    assert load_series(p)[0].stride == 2
    p.write_text("# pair 0 1 4\n")
    with pytest.raises(ParseError, match="line 1"):
        load_series(p)
    p.write_text("# pair 0 x 4\n01010\n")
    with pytest.raises(ParseError, match="header"):
        load_series(p)
