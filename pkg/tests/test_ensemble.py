import json

import numpy as np
import pytest

from graphmix import (
    InvalidInputError,
    Rng,
    choose_tracked_pairs,
    generate_ensemble,
    load_graph,
    resolve_threads,
    run_chain,
    run_gr,
    split_seed,
)

from _synth import gnm_graph


def test_resolve_threads(monkeypatch):
    assert resolve_threads(4) == 4
    monkeypatch.setenv("GRAPHMIX_THREADS", "2")
    assert resolve_threads() == 2
    monkeypatch.delenv("GRAPHMIX_THREADS")
    assert resolve_threads() >= 1
    with pytest.raises(InvalidInputError):
        resolve_threads(0)


def test_choose_tracked_pairs_policies():
    g = gnm_graph(30, 60, seed=1)
    edges = [(int(a), int(b)) for a, b in g.edge_array()]
    assert choose_tracked_pairs(g, "all", 0) == edges
    half = choose_tracked_pairs(g, "sample:0.5", 7)
    assert len(half) == 30
    assert len(set(half)) == 30
    assert all(p in set(edges) for p in half)
    assert half == sorted(half)
    assert choose_tracked_pairs(g, "sample:0.5", 7) == half
    assert choose_tracked_pairs(g, "sample:0.5", 8) != half
    tiny = choose_tracked_pairs(g, "sample:0.001", 7)
    assert len(tiny) == 1
    for bad in ("sample:0", "sample:1.5", "sample:x", "half"):
        with pytest.raises(InvalidInputError):
            choose_tracked_pairs(g, bad, 0)


def test_generate_ensemble_replicas_are_recomputable(tmp_path):
    g = gnm_graph(30, 60, seed=5)
    manifest = generate_ensemble(g, "dd", 3, 250, 17, tmp_path)
    assert manifest["count"] == 3 and not manifest["continuous"]
    assert manifest["input"] == {"n": 30, "m": 60}
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk == manifest
    # any replica can be regenerated alone from its split seed
    for entry in manifest["replicas"]:
        assert entry["seed"] == split_seed(17, manifest["replicas"].index(entry))
        gi = gnm_graph(30, 60, seed=5)
        stats = run_chain(gi, "dd", 250, rng=Rng(entry["seed"]))
        assert stats.applied == entry["applied"]
        rep = load_graph(tmp_path / entry["file"])
        assert rep.edge_set() == gi.edge_set()


def test_generate_ensemble_empty_and_validation(tmp_path):
    g = gnm_graph(10, 20, seed=0)
    manifest = generate_ensemble(g, "dd", 0, 100, 1, tmp_path / "empty")
    assert manifest["replicas"] == []
    assert (tmp_path / "empty" / "manifest.json").exists()
    with pytest.raises(InvalidInputError):
        generate_ensemble(g, "dd", -1, 100, 1, tmp_path / "neg")


def test_run_gr_staggered_starts(tmp_path):
    g = gnm_graph(30, 60, seed=2)
    pairs = choose_tracked_pairs(g, "all", 0)
    res = run_gr(g, "dd", 3, 500, 100 * 60, pairs, seed=9, stride=60)
    assert res.chains == 3
    assert len(res.chain_stats) == 3
    assert len(res.r_hats) == len(pairs)
    assert res.median == pytest.approx(float(np.median(res.r_hats)))
    assert res.max == max(res.r_hats)
    # chain 0 starts from the input graph itself
    res2 = run_gr(g, "dd", 3, 500, 100 * 60, pairs, seed=9, stride=60)
    assert res2.r_hats == res.r_hats
    with pytest.raises(InvalidInputError):
        run_gr(g, "dd", 1, 500, 6000, pairs, seed=9)
    with pytest.raises(InvalidInputError):
        run_gr(g, "dd", 2, -5, 6000, pairs, seed=9)
