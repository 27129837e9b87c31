from fractions import Fraction

import numpy as np
import pytest

from petcbound import generate_dataset, trigger_cones
from petcbound.data import sample_states
from petcbound.dynamics import ist_sequence
from petcbound.errors import AbstractionMismatchError
from petcbound.traffic import (
    TrafficAbstraction,
    aist_bounds,
    build_slca,
    eac,
    load_abstraction,
    max_mean_cycle,
    min_mean_cycle,
    sac_lac_from,
    sliding_windows,
)

# the three reference automata for the sequence set generated by
# 1 1 1 2 2 2 ... (runs of 1s feeding runs of 2s)
LEFT = build_slca([(1,), (2,)])
CENTER = build_slca([(1, 1), (1, 2), (2, 2)])
RIGHT = build_slca([(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)])


def test_sliding_windows():
    assert sliding_windows((1, 2, 3), 2) == [(1, 2), (2, 3)]
    assert sliding_windows([5], 1) == [(5,)]
    with pytest.raises(ValueError):
        sliding_windows((1, 2), 3)


def test_order_one_is_complete_graph():
    assert LEFT.states == [(1,), (2,)]
    assert sorted(LEFT.edges) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert LEFT.flags == []


def test_order_two_reference_automaton():
    assert CENTER.states == [(1, 1), (1, 2), (2, 2)]
    assert sorted(CENTER.edges) == [(0, 0), (0, 1), (1, 2), (2, 2)]
    assert CENTER.flags == []


def test_order_three_reference_automaton():
    assert RIGHT.states == [(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)]
    assert sorted(RIGHT.edges) == [(0, 0), (0, 1), (1, 2), (2, 3), (3, 3)]
    assert RIGHT.flags == []


def test_reachable_cycle_bounds_per_state():
    assert sac_lac_from(RIGHT, (1, 1, 1)) == (1, 2)
    assert sac_lac_from(RIGHT, (1, 1, 2)) == (2, 2)
    assert sac_lac_from(RIGHT, 0) == (1, 2)


def test_refinement_tightens_expected_gap():
    assert eac(LEFT) == 1.0
    assert eac(CENTER) == pytest.approx(1.0 / 3.0)
    assert eac(RIGHT) == 0.25


def test_build_rejects_bad_input():
    with pytest.raises(ValueError):
        build_slca([])
    with pytest.raises(ValueError):
        build_slca([(1,), (1, 2)])
    with pytest.raises(ValueError):
        build_slca([(0, 1)])


def test_patch_by_relaxed_overlap():
    # (1, 2, 1) has no domino successor; overlap relaxed to one symbol
    abs_ = build_slca([(1, 1, 1), (1, 2, 1)])
    i = abs_.state_index((1, 2, 1))
    assert abs_.flags == [i]
    assert (i, 0) in abs_.edges and (i, 1) in abs_.edges


def test_patch_by_self_loop():
    abs_ = build_slca([(1, 2), (3, 4)])
    assert abs_.flags == [0, 1]
    assert sorted(abs_.edges) == [(0, 0), (1, 1)]


def test_domino_rule_on_benchmark(bench_abs_ell10):
    abs_ = bench_abs_ell10
    ell = abs_.ell
    out_degree = [0] * len(abs_.states)
    patched = set(abs_.flags)
    for u, v in abs_.edges:
        out_degree[u] += 1
        if u not in patched:
            assert abs_.states[u][1:] == abs_.states[v][: ell - 1]
    assert all(d > 0 for d in out_degree)
    assert all(1 <= w <= 4 for w in abs_.weights())


def test_observed_traces_stay_inside_abstraction(benchmark, bench_cones):
    for ell in (1, 2):
        ds = generate_dataset(benchmark, ell, 10000, seed=12345)
        abs_ = build_slca(ds.labels(), h=benchmark.h)
        state_set = set(abs_.states)
        edge_set = set(abs_.edges)
        for seed in (999, 7):
            x0 = sample_states(benchmark.n_x, 1, seed=seed)[0]
            windows = sliding_windows(ist_sequence(bench_cones, x0, 80), ell)
            assert all(w in state_set for w in windows)
            for a, b in zip(windows, windows[1:]):
                assert (abs_.state_index(a), abs_.state_index(b)) in edge_set


def test_refinement_is_monotone(bench_ds_ell10, benchmark):
    # higher-order abstractions of the same traces never loosen bounds
    bounds = []
    for ell in range(1, 7):
        windows = set()
        for lab in bench_ds_ell10.labels():
            windows.update(sliding_windows(lab, ell))
        abs_ = build_slca(windows, h=benchmark.h)
        bounds.append((min_mean_cycle(abs_), max_mean_cycle(abs_)))
    for (lo_a, hi_a), (lo_b, hi_b) in zip(bounds, bounds[1:]):
        assert lo_b >= lo_a
        assert hi_b <= hi_a
        assert lo_b <= hi_b
    assert bounds[0] == (1, 3)
    assert bounds[-1] == (1, 2)


def test_restricted_cycle_search():
    assert min_mean_cycle(RIGHT, [(2, 2, 2)]) == 2
    assert max_mean_cycle(RIGHT, [3]) == 2
    # restriction {112, 122} contains no cycle
    assert min_mean_cycle(RIGHT, [1, 2]) is None
    with pytest.raises(ValueError):
        min_mean_cycle(RIGHT, [])
    with pytest.raises(AbstractionMismatchError):
        max_mean_cycle(RIGHT, [(9, 9, 9)])


def test_cycle_means_are_exact_fractions():
    abs_ = build_slca([(1, 3), (3, 1)])
    assert min_mean_cycle(abs_) == Fraction(2)
    assert max_mean_cycle(abs_) == Fraction(2)


def test_initial_defaults_to_all_states():
    assert LEFT.initial == [0, 1]
    abs_ = TrafficAbstraction(states=[(1,)], edges=[(0, 0)], initial=[0])
    assert abs_.initial == [0]


def test_config_roundtrip(tmp_path, bench_abs_ell10):
    path = tmp_path / "abs.json"
    bench_abs_ell10.save(path)
    loaded = load_abstraction(path)
    assert loaded.states == bench_abs_ell10.states
    assert loaded.edges == bench_abs_ell10.edges
    assert loaded.h == bench_abs_ell10.h
    assert loaded.flags == bench_abs_ell10.flags
    cfg = bench_abs_ell10.to_config()
    scale = Fraction("0.05")
    assert cfg["weights"] == [float(scale * w) for w in bench_abs_ell10.weights()]
    assert "initial" not in cfg


def test_dot_export_lists_all_nodes_and_edges():
    dot = CENTER.to_dot()
    assert dot.startswith("digraph")
    assert dot.count("->") == len(CENTER.edges)
    assert '[label="1,2"]' in dot


def test_single_state_has_zero_gap():
    abs_ = build_slca([(2,)])
    assert abs_.edges == [(0, 0)]
    assert eac(abs_) == 0.0
    assert sac_lac_from(abs_, 0) == (2, 2)


def test_state_query_bounds(benchmark, bench_ds_ell1, bench_model_ell1):
    model, _ = bench_model_ell1
    abs_ = build_slca(bench_ds_ell1.labels(), h=benchmark.h)
    record = aist_bounds(abs_, model, bench_ds_ell1.samples[0].x)
    assert tuple(record["predicted_label"]) in set(abs_.states)
    assert record["sac"] == pytest.approx(0.05)
    assert record["lac"] == pytest.approx(0.15)
    assert record["delta_aist"] == pytest.approx(0.10)
    assert record["sac"] <= record["lac"]


def test_state_query_rejects_foreign_model(bench_model_ell1):
    model, _ = bench_model_ell1
    # an abstraction that never saw the fastest IST class
    abs_ = build_slca([(2,), (3,)], h=0.05)
    x_fast = [1.0, 0.0]
    with pytest.raises(AbstractionMismatchError):
        aist_bounds(abs_, model, x_fast)
