"""Command-line front end.

Subcommands mirror the pipeline stages so each artifact can also be
produced and inspected on its own.  All outputs are deterministic in
(config, seed); set PETCBOUND_OUTPUT_DIR to redirect file outputs.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import pipeline as pl
from .classifier import count_violations, load_model, objective, predict_labels, train
from .data import generate_dataset, load_jsonl
from .dynamics import load_system
from .errors import PetcBoundError
from .risk import certify, load_certificate
from .traffic import build_slca, load_abstraction


def _out_path(args, default_name):
    out_dir = pl.resolve_output_dir(getattr(args, "output_dir", ".") or ".")
    os.makedirs(out_dir, exist_ok=True)
    name = getattr(args, "out", None) or default_name
    return name if os.path.isabs(name) else os.path.join(out_dir, name)


def _add_common(p):
    p.add_argument("--output-dir", default=".", help="directory for outputs")
    p.add_argument("--out", default=None, help="output file name")


def cmd_gen_data(args):
    system = load_system(args.system)
    dataset = generate_dataset(system, args.ell, args.n_samples, seed=args.seed)
    path = _out_path(args, "dataset.jsonl")
    dataset.save_jsonl(path)
    print(path)
    return 0


def cmd_train(args):
    dataset = load_jsonl(args.dataset)
    mode = pl._train_mode(args.mode, dataset.ell)
    model, info = train(dataset, mode=mode, zeta=args.zeta, rho=args.rho)
    path = _out_path(args, "model.json")
    model.save(path)
    print(json.dumps({"model": path, "objective": info["objective"],
                      "n_violations": info["n_violations"]}, sort_keys=True))
    return 0


def cmd_certify(args):
    model = load_model(args.model)
    train_set = load_jsonl(args.dataset)
    holdout = load_jsonl(args.holdout) if args.holdout else None
    cert = certify(model, train_set, holdout, beta=args.beta,
                   unseen_count=args.unseen_count)
    path = _out_path(args, "certificate.json")
    cert.save(path)
    print(json.dumps(cert.to_config(), sort_keys=True))
    return 0


def cmd_abstract(args):
    dataset = load_jsonl(args.dataset)
    if args.model:
        model = load_model(args.model)
        labels = predict_labels(model, dataset.states())
    else:
        labels = dataset.labels()
    abstraction = build_slca(labels, h=args.h)
    path = _out_path(args, "abstraction.json")
    abstraction.save(path)
    print(path)
    return 0


def cmd_analyze(args):
    system = load_system(args.system)
    model = load_model(args.model)
    dataset = load_jsonl(args.dataset)
    abstraction = load_abstraction(args.abstraction)
    certificate = load_certificate(args.certificate)

    lookup = {lab: i for i, lab in enumerate(model.label_table)}
    y_idx = np.array([lookup[s.label] for s in dataset.samples])
    info = {
        "objective": objective(model, dataset.states(), y_idx),
        "n_violations": count_violations(model, dataset.samples),
    }
    config = pl.PipelineConfig(
        system_path=args.system, ell=dataset.ell, n_samples=len(dataset),
        beta=certificate.beta, seed=args.seed, mode=model.mode,
        output_dir=args.output_dir, n_queries=args.queries,
    )
    report = pl.build_report(system, config, dataset, model, info,
                             certificate, abstraction)
    path = _out_path(args, "report.json")
    pl._write_json(report, path)
    print(path)
    return 0


def cmd_regions(args):
    system = load_system(args.system)
    path = _out_path(args, "regions.svg")
    pl.render_regions_file(system, args.ell, path, grid=args.grid,
                           n_samples=args.n_samples, seed=args.seed)
    print(path)
    return 0


def _pipeline_config(args):
    if args.config:
        cfg = pl.load_pipeline_config(args.config)
        if args.output_dir != ".":
            cfg.output_dir = args.output_dir
        return cfg
    if not args.system:
        raise ValueError("either --config or --system is required")
    return pl.PipelineConfig(
        system_path=args.system, ell=args.ell, n_samples=args.n_samples,
        beta=args.beta, rho=args.rho, zeta=args.zeta, seed=args.seed,
        mode=args.mode, output_dir=args.output_dir, n_queries=args.queries,
    )


def cmd_pipeline(args):
    report = pl.run_pipeline(_pipeline_config(args))
    print(json.dumps(report["global_bounds"], sort_keys=True))
    return 0


def cmd_compare(args):
    report = pl.run_compare(_pipeline_config(args), sweep_points=args.sweep_points)
    print(json.dumps({
        "data_driven": report["data_driven"], "oracle": report["oracle"],
    }, sort_keys=True))
    return 0


def _add_pipeline_flags(p):
    p.add_argument("--config", default=None, help="pipeline config JSON")
    p.add_argument("--system", default=None, help="system config JSON")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--n-samples", type=int, default=10000)
    p.add_argument("--beta", type=float, default=1e-6)
    p.add_argument("--rho", type=float, default=1e3)
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("flat", "conic"), default="conic")
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--output-dir", default=".")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="petcbound",
        description="Average inter-sample-time bounds for event-triggered "
                    "control loops, from samples with a risk certificate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="sample states and label them")
    p.add_argument("--system", required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--n-samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="fit the multiclass classifier")
    p.add_argument("--dataset", required=True)
    p.add_argument("--mode", choices=("flat", "conic"), default="conic")
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1e3)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("certify", help="attach a risk certificate to a model")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True, help="training scenarios")
    p.add_argument("--holdout", default=None)
    p.add_argument("--beta", type=float, default=1e-6)
    p.add_argument("--unseen-count", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("abstract", help="build the traffic abstraction")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", default=None,
                   help="use this model's predictions instead of stored labels")
    p.add_argument("--h", type=float, default=1.0, help="checking period")
    _add_common(p)
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("analyze", help="bounds report from saved artifacts")
    p.add_argument("--system", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--abstraction", required=True)
    p.add_argument("--certificate", required=True)
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("regions", help="SVG of IST regions on the unit disk")
    p.add_argument("--system", required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--grid", type=int, default=360)
    p.add_argument("--n-samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("compare", help="data-driven vs dense-sweep abstraction")
    _add_pipeline_flags(p)
    p.add_argument("--sweep-points", type=int, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pipeline", help="run every stage end to end")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PetcBoundError, ValueError, OSError, KeyError) as exc:
        diagnostic = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(diagnostic, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
