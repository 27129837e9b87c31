"""End-to-end analysis pipeline: generate, train, certify, abstract, bound.

Every entry point is a pure function of its configuration and seed:
reports are written with sorted keys and no timestamps, so reruns are
byte-identical.  Wall-clock timings go to stderr only.
"""

import json
import math
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtri

from .classifier import predict_labels, train
from .data import generate_dataset, sample_states
from .dynamics import (
    ist_sequence_batch,
    load_system,
    system_fingerprint,
    trigger_cones,
)
from .errors import UnsupportedConfigError
from .risk import certify
from .traffic import aist_bounds, build_slca, eac, max_mean_cycle, min_mean_cycle

OUTPUT_DIR_ENV = "PETCBOUND_OUTPUT_DIR"


@dataclass
class PipelineConfig:
    """Knobs for one end-to-end run."""

    system_path: str
    ell: int = 1
    n_samples: int = 10000
    beta: float = 1e-6
    rho: float = 1e3
    zeta: float = 1.0
    seed: int = 0
    mode: str = "conic"
    output_dir: str = "."
    n_queries: int = 10

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError(f"ell must be positive, got {self.ell}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be positive, got {self.n_samples}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.rho <= 0 or self.zeta <= 0:
            raise ValueError("rho and zeta must be positive")
        if self.mode not in ("flat", "conic"):
            raise ValueError(f"mode must be 'flat' or 'conic', got {self.mode!r}")
        if self.n_queries < 0:
            raise ValueError("n_queries must be nonnegative")

    @classmethod
    def from_config(cls, cfg, base_dir="."):
        path = cfg["system"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return cls(
            system_path=path,
            ell=int(cfg.get("ell", 1)),
            n_samples=int(cfg.get("n_samples", 10000)),
            beta=float(cfg.get("beta", 1e-6)),
            rho=float(cfg.get("rho", 1e3)),
            zeta=float(cfg.get("zeta", 1.0)),
            seed=int(cfg.get("seed", 0)),
            mode=cfg.get("mode", "conic"),
            output_dir=cfg.get("output_dir", "."),
            n_queries=int(cfg.get("n_queries", 10)),
        )


def load_pipeline_config(path):
    with open(path) as fh:
        cfg = json.load(fh)
    return PipelineConfig.from_config(cfg, base_dir=os.path.dirname(path) or ".")


def resolve_output_dir(configured):
    """Environment override wins over the configured output directory."""
    return os.environ.get(OUTPUT_DIR_ENV) or configured


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _log(msg):
    print(msg, file=sys.stderr)


def _train_mode(mode, ell):
    # sequence labels have no scalar order for the conic construction
    if mode == "conic" and ell > 1:
        return "flat"
    return mode


def run_pipeline(config):
    """Generate, train, certify, abstract, and bound; returns the report.

    Writes dataset.jsonl, model.json, certificate.json, abstraction.json
    and report.json into the output directory.
    """
    out = resolve_output_dir(config.output_dir)
    os.makedirs(out, exist_ok=True)
    system = load_system(config.system_path)

    t0 = time.perf_counter()
    dataset = generate_dataset(system, config.ell, config.n_samples, seed=config.seed)
    _log(f"generated {len(dataset)} samples in {time.perf_counter() - t0:.2f}s")
    dataset.save_jsonl(os.path.join(out, "dataset.jsonl"))

    t0 = time.perf_counter()
    mode = _train_mode(config.mode, config.ell)
    model, info = train(dataset, mode=mode, zeta=config.zeta, rho=config.rho)
    _log(f"trained {mode} model in {time.perf_counter() - t0:.2f}s "
         f"({info['n_violations']} violations)")
    model.save(os.path.join(out, "model.json"))

    t0 = time.perf_counter()
    certificate = certify(model, dataset, None, beta=config.beta)
    _log(f"certified in {time.perf_counter() - t0:.2f}s")
    certificate.save(os.path.join(out, "certificate.json"))

    predicted = predict_labels(model, dataset.states())
    abstraction = build_slca(predicted, h=system.h)
    abstraction.save(os.path.join(out, "abstraction.json"))

    report = build_report(system, config, dataset, model, info, certificate, abstraction)
    _write_json(report, os.path.join(out, "report.json"))
    return report


def build_report(system, config, dataset, model, info, certificate, abstraction):
    """Assemble the bounds report: per-query records plus global bounds."""
    scale = Fraction(str(abstraction.h))
    sac = min_mean_cycle(abstraction)
    lac = max_mean_cycle(abstraction)

    queries = []
    if config.n_queries:
        X = sample_states(system.n_x, config.n_queries, seed=config.seed + 1)
        queries = [aist_bounds(abstraction, model, x) for x in X]

    return {
        "system": {
            "fingerprint": system_fingerprint(system),
            "n_x": system.n_x,
            "h": system.h,
            "kappa_bar": system.kappa_bar,
        },
        "config": {
            "ell": config.ell,
            "n_samples": config.n_samples,
            "beta": config.beta,
            "rho": config.rho,
            "zeta": config.zeta,
            "seed": config.seed,
            "mode": config.mode,
        },
        "dataset": {
            "n_samples": len(dataset),
            "n_labels": len(dataset.label_table),
            "label_table": [list(lab) for lab in dataset.label_table],
        },
        "training": {
            "objective": info["objective"],
            "n_violations": info["n_violations"],
        },
        "certificate": certificate.to_config(),
        "abstraction": {
            "n_states": len(abstraction.states),
            "n_edges": len(abstraction.edges),
            "patched_states": list(abstraction.flags),
        },
        "global_bounds": {
            "saist_seconds": float(scale * sac),
            "laist_seconds": float(scale * lac),
            "eac_h_units": eac(abstraction),
        },
        "queries": queries,
    }


# fixed palette; cycles if a system shows more labels than entries
_PALETTE = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
    "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
    "#5254a3", "#ad494a", "#8ca252", "#bd9e39", "#a55194",
    "#636363", "#e7969c", "#9c9ede", "#cedb9c", "#e7cb94",
]


def _label_colors(labels):
    table = sorted(set(labels))
    return {lab: _PALETTE[i % len(_PALETTE)] for i, lab in enumerate(table)}


def render_regions(system, ell, grid=360, n_rings=24, n_samples=2000, seed=0):
    """SVG of the unit disk colored by oracle IST-sequence regions.

    Each grid point is labeled by exact simulation; a classifier is
    trained on a fresh sample set and grid cells where its prediction
    flips are marked, tracing the learned decision boundaries.
    Restricted to planar systems.
    """
    if system.n_x != 2:
        raise UnsupportedConfigError(
            f"region plots need a planar state space, got n_x = {system.n_x}"
        )
    if grid < 8:
        raise ValueError(f"grid resolution must be at least 8, got {grid}")
    cones = trigger_cones(system)

    angles = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    boundary = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    oracle = [tuple(int(v) for v in row)
              for row in ist_sequence_batch(cones, boundary, ell)]
    colors = _label_colors(oracle)

    dataset = generate_dataset(system, ell, n_samples, seed=seed)
    mode = _train_mode("conic", ell)
    model, _ = train(dataset, mode=mode)
    predicted = predict_labels(model, boundary)

    size = 640
    c = size / 2.0
    r_max = 0.46 * size
    r_min = 0.10 * size
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]

    step = 2.0 * math.pi / grid
    for i, theta in enumerate(angles):
        # annular sector per angle; labels are constant along rays
        t0, t1 = theta - step / 2.0, theta + step / 2.0
        x0o, y0o = c + r_max * math.cos(t0), c - r_max * math.sin(t0)
        x1o, y1o = c + r_max * math.cos(t1), c - r_max * math.sin(t1)
        x0i, y0i = c + r_min * math.cos(t0), c - r_min * math.sin(t0)
        x1i, y1i = c + r_min * math.cos(t1), c - r_min * math.sin(t1)
        path = (f"M {x0i:.2f} {y0i:.2f} L {x0o:.2f} {y0o:.2f} "
                f"A {r_max:.2f} {r_max:.2f} 0 0 0 {x1o:.2f} {y1o:.2f} "
                f"L {x1i:.2f} {y1i:.2f} "
                f"A {r_min:.2f} {r_min:.2f} 0 0 1 {x0i:.2f} {y0i:.2f} Z")
        fill = colors[oracle[i]]
        parts.append(f'<path d="{path}" fill="{fill}" stroke="{fill}" stroke-width="0.4"/>')

    for i in range(grid):
        j = (i + 1) % grid
        if predicted[i] != predicted[j]:
            theta = angles[i] + step / 2.0
            x_in = c + r_min * math.cos(theta)
            y_in = c - r_min * math.sin(theta)
            x_out = c + (r_max + 12) * math.cos(theta)
            y_out = c - (r_max + 12) * math.sin(theta)
            parts.append(
                f'<line x1="{x_in:.2f}" y1="{y_in:.2f}" x2="{x_out:.2f}" '
                f'y2="{y_out:.2f}" stroke="black" stroke-width="1.6"/>'
            )

    legend = sorted(colors)
    for row, lab in enumerate(legend):
        y = 18 + 18 * row
        parts.append(f'<rect x="8" y="{y - 10}" width="12" height="12" fill="{colors[lab]}"/>')
        name = ",".join(str(v) for v in lab)
        parts.append(f'<text x="26" y="{y}" font-size="12" font-family="sans-serif">({name})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n", oracle


def render_regions_file(system, ell, path, grid=360, n_samples=2000, seed=0):
    svg, _ = render_regions(system, ell, grid=grid, n_samples=n_samples, seed=seed)
    with open(path, "w") as fh:
        fh.write(svg)


def sphere_sweep(n_x, n_points):
    """Deterministic low-discrepancy directions on the unit sphere.

    Planar systems get a uniform angular grid; higher dimensions use a
    Kronecker lattice pushed through the normal quantile, which is
    deterministic and close to uniform in angle.  This under-covers
    very thin cones, so abstractions built from it are reported as
    under-approximations.
    """
    if n_x < 1:
        raise ValueError(f"state dimension must be positive, got {n_x}")
    if n_x == 1:
        return np.array([[1.0], [-1.0]])
    if n_x == 2:
        theta = 2.0 * math.pi * np.arange(n_points) / n_points
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    # generalized golden-ratio lattice (Kronecker sequence)
    phi = 2.0
    for _ in range(40):
        phi = (1.0 + phi) ** (1.0 / (n_x + 1.0))
    alpha = np.array([phi ** -(k + 1) for k in range(n_x)])
    u = ((np.arange(1, n_points + 1)[:, None] * alpha[None, :]) + 0.5) % 1.0
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    X = ndtri(u)
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return X / norms


def _abstraction_summary(abstraction):
    return {
        "n_states": len(abstraction.states),
        "n_edges": len(abstraction.edges),
        "eac_h_units": eac(abstraction),
        "patched_states": list(abstraction.flags),
    }


def run_compare(config, sweep_points=None):
    """Data-driven abstraction vs. a dense-sweep oracle abstraction.

    Both are built on the same sampled states; the oracle side also
    sees a deterministic dense sweep of directions, standing in for
    exact region analysis (and therefore still an under-approximation
    of the true behavior set).
    """
    out = resolve_output_dir(config.output_dir)
    os.makedirs(out, exist_ok=True)
    system = load_system(config.system_path)
    if sweep_points is None:
        sweep_points = 10**5 if system.n_x <= 3 else 10**6
    cones = trigger_cones(system)

    dataset = generate_dataset(system, config.ell, config.n_samples, seed=config.seed)
    mode = _train_mode(config.mode, config.ell)
    model, _ = train(dataset, mode=mode, zeta=config.zeta, rho=config.rho)

    data_labels = predict_labels(model, dataset.states())
    data_abs = build_slca(data_labels, h=system.h)

    t0 = time.perf_counter()
    sweep = sphere_sweep(system.n_x, sweep_points)
    sweep_labels = [tuple(int(v) for v in row)
                    for row in ist_sequence_batch(cones, sweep, config.ell)]
    _log(f"dense sweep of {len(sweep)} directions in {time.perf_counter() - t0:.2f}s")
    oracle_labels = list(dataset.labels()) + sweep_labels
    oracle_abs = build_slca(oracle_labels, h=system.h)

    data_states = set(data_abs.states)
    oracle_states = set(oracle_abs.states)
    data_edges = {(data_abs.states[u], data_abs.states[v]) for u, v in data_abs.edges}
    oracle_edges = {(oracle_abs.states[u], oracle_abs.states[v]) for u, v in oracle_abs.edges}

    report = {
        "config": {
            "ell": config.ell,
            "n_samples": config.n_samples,
            "seed": config.seed,
            "mode": config.mode,
            "sweep_points": int(sweep_points),
        },
        "system": {
            "fingerprint": system_fingerprint(system),
            "n_x": system.n_x,
            "h": system.h,
            "kappa_bar": system.kappa_bar,
        },
        "data_driven": _abstraction_summary(data_abs),
        "oracle": _abstraction_summary(oracle_abs),
        "differences": {
            "states_only_oracle": sorted(list(s) for s in oracle_states - data_states),
            "states_only_data": sorted(list(s) for s in data_states - oracle_states),
            "edges_only_oracle": sorted(
                [list(u), list(v)] for u, v in oracle_edges - data_edges
            ),
            "edges_only_data": sorted(
                [list(u), list(v)] for u, v in data_edges - oracle_edges
            ),
        },
        "oracle_is_underapproximation": True,
    }
    _write_json(report, os.path.join(out, "compare.json"))
    return report
