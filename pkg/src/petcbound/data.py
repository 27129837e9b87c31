"""Scenario datasets: sampled states labeled with IST sequences.

A dataset is a list of (state, label) pairs plus bookkeeping: the
sequence length, the generator seed, a fingerprint of the sampled
system, and the label table fixing the class order (first appearance).
Datasets round-trip through JSON Lines: one header object, then one
object per sample.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ist_sequence_batch, system_fingerprint, trigger_cones


@dataclass
class LabeledSample:
    x: np.ndarray
    label: tuple

    def to_record(self):
        return {"x": [float(v) for v in self.x], "label": [int(v) for v in self.label]}


def first_appearance_table(labels):
    """Unique labels in order of first appearance."""
    table = []
    seen = set()
    for lab in labels:
        key = tuple(lab)
        if key not in seen:
            seen.add(key)
            table.append(key)
    return table


@dataclass
class ScenarioSet:
    """Labeled samples plus the metadata needed to reproduce them."""

    samples: list
    ell: int
    seed: int = None
    fingerprint: str = None
    label_table: list = field(default_factory=list)

    def __post_init__(self):
        if not self.label_table:
            self.label_table = first_appearance_table(s.label for s in self.samples)

    def __len__(self):
        return len(self.samples)

    def states(self):
        return np.array([s.x for s in self.samples])

    def labels(self):
        return [s.label for s in self.samples]

    def label_indices(self):
        """Label-table index of every sample; unknown labels raise KeyError."""
        lookup = {lab: i for i, lab in enumerate(self.label_table)}
        return np.array([lookup[s.label] for s in self.samples])

    def save_jsonl(self, path):
        header = {
            "ell": self.ell,
            "seed": self.seed,
            "system_fingerprint": self.fingerprint,
            "label_table": [list(lab) for lab in self.label_table],
        }
        with open(path, "w") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for s in self.samples:
                fh.write(json.dumps(s.to_record(), sort_keys=True) + "\n")


def load_jsonl(path):
    with open(path) as fh:
        header = json.loads(fh.readline())
        samples = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            samples.append(
                LabeledSample(x=np.array(rec["x"], dtype=float), label=tuple(rec["label"]))
            )
    return ScenarioSet(
        samples=samples,
        ell=int(header["ell"]),
        seed=header.get("seed"),
        fingerprint=header.get("system_fingerprint"),
        label_table=[tuple(lab) for lab in header["label_table"]],
    )


def sample_states(n_x, n_samples, seed=0):
    """Draw `n_samples` states of dimension `n_x` uniformly on the unit sphere.

    The triggering sets are cones, so only directions matter; sampling
    on the sphere loses no label information.  `seed` may also be an
    existing numpy Generator.
    """
    if n_x < 1:
        raise ValueError(f"state dimension must be positive, got {n_x}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    X = rng.standard_normal((n_samples, n_x))
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    # a zero draw has probability zero but would poison the labels
    bad = (norms == 0.0).ravel()
    while bad.any():
        X[bad] = rng.standard_normal((int(bad.sum()), n_x))
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        bad = (norms == 0.0).ravel()
    return X / norms


def generate_dataset(system, ell, n_samples, seed=0):
    """Sample states and label each with its length-ell IST sequence."""
    cones = trigger_cones(system)
    X = sample_states(system.n_x, n_samples, seed=seed)
    labels = ist_sequence_batch(cones, X, ell)
    samples = [
        LabeledSample(x=x, label=tuple(int(v) for v in lab))
        for x, lab in zip(X, labels)
    ]
    return ScenarioSet(
        samples=samples,
        ell=ell,
        seed=seed if isinstance(seed, int) else None,
        fingerprint=system_fingerprint(system),
    )


def split(scenario_set, fraction, seed=0):
    """Randomly split into (train, holdout) keeping one shared label table.

    `fraction` is the training share; the partition is a seeded random
    permutation, so the two sides are exchangeable draws.  Both children
    inherit the parent's full label table so class indices agree, and
    their sample multisets union back to the parent's.
    """
    total = len(scenario_set.samples)
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie strictly between 0 and 1, got {fraction}")
    n_train = int(round(fraction * total))
    if n_train == 0 or n_train == total:
        raise ValueError(
            f"fraction {fraction} leaves an empty side for {total} samples"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(total)
    common = dict(
        ell=scenario_set.ell,
        seed=scenario_set.seed,
        fingerprint=scenario_set.fingerprint,
        label_table=list(scenario_set.label_table),
    )
    train = ScenarioSet(samples=[scenario_set.samples[i] for i in order[:n_train]], **common)
    holdout = ScenarioSet(samples=[scenario_set.samples[i] for i in order[n_train:]], **common)
    return train, holdout
