from collections import Counter

import numpy as np
import pytest

from petcbound import generate_dataset, load_jsonl, sample_states, split
from petcbound.data import first_appearance_table


def test_sample_states_unit_norm():
    X = sample_states(2, 3, seed=7)
    assert X.shape == (3, 2)
    assert np.allclose(np.linalg.norm(X, axis=1), 1.0, atol=1e-12)


def test_sample_states_deterministic():
    assert np.array_equal(sample_states(3, 50, seed=11), sample_states(3, 50, seed=11))


def test_sample_states_mean_near_origin():
    X = sample_states(2, 10**4, seed=0)
    assert np.all(np.abs(X.mean(axis=0)) < 0.05)


def test_sample_states_rejects_zero_dimension():
    with pytest.raises(ValueError):
        sample_states(0, 5)


def test_single_class_when_heartbeat_is_one(toy_kbar1):
    ds = generate_dataset(toy_kbar1, 3, 50, seed=1)
    assert ds.label_table == [(1, 1, 1)]
    assert all(s.label == (1, 1, 1) for s in ds.samples)


def test_benchmark_label_counts(benchmark, bench_ds_ell1):
    assert len(bench_ds_ell1.label_table) == 3
    counts = Counter(s.label for s in bench_ds_ell1.samples)
    assert counts == {(1,): 6019, (2,): 2700, (3,): 1281}


def test_labels_within_heartbeat(benchmark):
    ds = generate_dataset(benchmark, 4, 300, seed=2)
    assert all(
        1 <= v <= benchmark.kappa_bar for s in ds.samples for v in s.label
    )
    assert all(len(s.label) == 4 for s in ds.samples)


def test_dataset_regeneration_is_byte_identical(tmp_path, benchmark):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    generate_dataset(benchmark, 2, 200, seed=5).save_jsonl(a)
    generate_dataset(benchmark, 2, 200, seed=5).save_jsonl(b)
    assert a.read_bytes() == b.read_bytes()


def test_dataset_roundtrip(tmp_path, benchmark):
    ds = generate_dataset(benchmark, 2, 100, seed=9)
    path = tmp_path / "ds.jsonl"
    ds.save_jsonl(path)
    again = load_jsonl(path)
    assert again.ell == ds.ell
    assert again.seed == ds.seed
    assert again.fingerprint == ds.fingerprint
    assert again.label_table == ds.label_table
    assert [s.label for s in again.samples] == [s.label for s in ds.samples]
    assert np.allclose(again.states(), ds.states())


def test_first_appearance_table():
    labels = [(2,), (1,), (2,), (3,), (1,)]
    assert first_appearance_table(labels) == [(2,), (1,), (3,)]


def test_split_sizes(benchmark):
    ds = generate_dataset(benchmark, 1, 100, seed=3)
    train_set, holdout = split(ds, 0.8, seed=0)
    assert (len(train_set), len(holdout)) == (80, 20)


def test_split_is_seeded_partition(benchmark):
    ds = generate_dataset(benchmark, 1, 150, seed=3)
    a1, b1 = split(ds, 0.6, seed=4)
    a2, b2 = split(ds, 0.6, seed=4)
    assert [s.label for s in a1.samples] == [s.label for s in a2.samples]
    assert np.allclose(a1.states(), a2.states())

    def key(s):
        return (tuple(s.x), s.label)

    merged = Counter(map(key, a1.samples)) + Counter(map(key, b1.samples))
    assert merged == Counter(map(key, ds.samples))


def test_split_shares_label_table(benchmark):
    ds = generate_dataset(benchmark, 1, 100, seed=3)
    train_set, holdout = split(ds, 0.5, seed=1)
    assert train_set.label_table == ds.label_table
    assert holdout.label_table == ds.label_table


def test_split_rejects_degenerate_fractions(benchmark):
    ds = generate_dataset(benchmark, 1, 10, seed=3)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            split(ds, bad)
    with pytest.raises(ValueError):
        split(ds, 0.01)  # rounds to an empty training side
