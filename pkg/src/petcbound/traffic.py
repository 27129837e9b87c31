"""Weighted traffic abstractions built from inter-sample-time sequences.

Each observed length-ell sequence of discrete inter-sample times
becomes a state; transitions follow the domino rule (the last ell-1
symbols of the source must equal the first ell-1 symbols of the
target).  Edge weights equal the first symbol of the source state, so
cycle means bound the long-run average inter-sample time in units of
the checking period h.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AbstractionMismatchError
from .graphs import maximum_mean_cycle, minimum_mean_cycle, reachable_nodes


def sliding_windows(sequence, ell):
    """All length-ell windows of a symbol sequence, in order of appearance."""
    seq = tuple(sequence)
    if len(seq) < ell:
        raise ValueError(f"sequence of length {len(seq)} has no window of length {ell}")
    return [seq[i:i + ell] for i in range(len(seq) - ell + 1)]


@dataclass
class TrafficAbstraction:
    """Finite weighted transition system over observed IST sequences.

    `initial` is the subset of state indices a trajectory may start
    from; every observed sequence is a valid start, so it defaults to
    all states.  `flags` lists the indices of states whose outgoing
    edges were patched in (see `build_slca`).
    """

    states: list
    edges: list
    h: float = 1.0
    initial: list = None
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.initial is None:
            self.initial = list(range(len(self.states)))

    @property
    def ell(self):
        return len(self.states[0])

    def output(self, i):
        return self.states[i][0]

    def weights(self):
        """Edge weights in units of h (exact integers)."""
        return [self.output(u) for u, _ in self.edges]

    def state_index(self, state):
        key = tuple(state)
        try:
            return self.states.index(key)
        except ValueError:
            raise AbstractionMismatchError(
                f"{key} is not a state of this abstraction"
            ) from None

    def to_config(self):
        return {
            "h": self.h,
            "ell": self.ell,
            "states": [list(s) for s in self.states],
            "edges": [[u, v] for u, v in self.edges],
            "weights": [float(Fraction(str(self.h)) * w) for w in self.weights()],
            "flags": self.flags,
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_config(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_dot(self):
        lines = ["digraph traffic {"]
        for i, s in enumerate(self.states):
            label = ",".join(str(v) for v in s)
            lines.append(f'  n{i} [label="{label}"];')
        for u, v in self.edges:
            lines.append(f'  n{u} -> n{v} [label="{self.output(u)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def load_abstraction(path):
    with open(path) as fh:
        cfg = json.load(fh)
    return TrafficAbstraction(
        states=[tuple(s) for s in cfg["states"]],
        edges=[(int(u), int(v)) for u, v in cfg["edges"]],
        h=float(cfg["h"]),
        flags=[int(i) for i in cfg.get("flags", [])],
    )


def build_slca(labels, h=1.0):
    """Strongest ell-complete abstraction of a set of observed sequences.

    Parameters
    ----------
    labels : iterable of tuples of positive int
        Observed length-ell IST sequences; all must share one length.
    h : float
        Checking period attached to the abstraction as metadata.

    States with no domino successor (possible because the observations
    are a sample, not the full behavior) are patched: first by relaxing
    the overlap to ell-2 symbols, then with a self-loop.  The indices
    of patched states are recorded in ``flags``.
    """
    states = sorted(set(tuple(lab) for lab in labels))
    if not states:
        raise ValueError("no sequences supplied")
    lengths = {len(s) for s in states}
    if len(lengths) != 1:
        raise ValueError(f"sequences of mixed lengths {sorted(lengths)}")
    ell = lengths.pop()
    if ell < 1 or any(v < 1 for s in states for v in s):
        raise ValueError("sequences must be non-empty tuples of positive counts")

    by_prefix = {}
    for j, s in enumerate(states):
        by_prefix.setdefault(s[:ell - 1], []).append(j)

    edges = []
    dangling = []
    for i, s in enumerate(states):
        targets = by_prefix.get(s[1:], [])
        if targets:
            edges.extend((i, j) for j in targets)
        else:
            dangling.append(i)

    patched = []
    for i in dangling:
        s = states[i]
        relaxed = []
        if ell >= 3:
            tail = s[2:]
            relaxed = [j for j, t in enumerate(states) if t[:ell - 2] == tail]
        if relaxed:
            edges.extend((i, j) for j in relaxed)
        else:
            edges.append((i, i))
        patched.append(i)

    return TrafficAbstraction(states=states, edges=sorted(edges), h=h, flags=sorted(patched))


def _as_indices(abstraction, restrict):
    keep = set()
    for s in restrict:
        keep.add(s if isinstance(s, int) else abstraction.state_index(s))
    return keep


def _restricted(abstraction, keep):
    index = {node: i for i, node in enumerate(sorted(keep))}
    edges = [
        (index[u], index[v])
        for u, v in abstraction.edges
        if u in keep and v in keep
    ]
    weights = [
        abstraction.output(u)
        for u, v in abstraction.edges
        if u in keep and v in keep
    ]
    return len(index), edges, weights


def min_mean_cycle(abstraction, restrict=None):
    """Smallest average cycle output, in units of h; None if acyclic.

    `restrict`, when given, must be a nonempty subset of states
    (tuples or indices); only cycles staying inside it count.
    """
    if restrict is None:
        return minimum_mean_cycle(
            len(abstraction.states), abstraction.edges, abstraction.weights()
        )
    keep = _as_indices(abstraction, restrict)
    if not keep:
        raise ValueError("restrict must be a nonempty state subset")
    return minimum_mean_cycle(*_restricted(abstraction, keep))


def max_mean_cycle(abstraction, restrict=None):
    """Largest average cycle output, in units of h; None if acyclic."""
    if restrict is None:
        return maximum_mean_cycle(
            len(abstraction.states), abstraction.edges, abstraction.weights()
        )
    keep = _as_indices(abstraction, restrict)
    if not keep:
        raise ValueError("restrict must be a nonempty state subset")
    return maximum_mean_cycle(*_restricted(abstraction, keep))


def sac_lac_from(abstraction, state):
    """Smallest and largest average cycles reachable from a state.

    `state` may be a state tuple or an index.  Returns a pair of
    Fractions in units of h.
    """
    start = state if isinstance(state, int) else abstraction.state_index(state)
    keep = reachable_nodes(len(abstraction.states), abstraction.edges, [start])
    return min_mean_cycle(abstraction, keep), max_mean_cycle(abstraction, keep)


def eac(abstraction):
    """Expected AIST cycle gap: mean of LAC - SAC over all states, in h units."""
    total = Fraction(0)
    for i in range(len(abstraction.states)):
        sac, lac = sac_lac_from(abstraction, i)
        total += lac - sac
    return float(total / len(abstraction.states))


def aist_bounds(abstraction, model, x0):
    """Per-state bounds on the average inter-sample time, in seconds.

    Classifies the concrete state `x0`, looks up the predicted
    sequence in the abstraction, and returns the record of reachable
    cycle bounds scaled to seconds.  A prediction outside the
    abstraction's state set means the model and the abstraction were
    built from different data and raises AbstractionMismatchError.
    """
    from .classifier import predict

    x0 = [float(v) for v in x0]
    idx = int(predict(model, [x0])[0])
    label = model.label_table[idx]
    state = abstraction.state_index(label)
    sac, lac = sac_lac_from(abstraction, state)
    if sac is None or lac is None:
        raise AbstractionMismatchError(f"no cycle reachable from state {label}")
    scale = Fraction(str(abstraction.h))
    return {
        "x0": x0,
        "predicted_label": [int(v) for v in label],
        "abstract_state": state,
        "sac": float(scale * sac),
        "lac": float(scale * lac),
        "delta_aist": float(scale * (lac - sac)),
    }
