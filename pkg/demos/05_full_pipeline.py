"""Run the whole analysis end to end and render the region plot.

Equivalent to:

    petcbound pipeline --config demos/configs/pipeline_2d.json
    petcbound regions --system demos/configs/benchmark_2d.json --ell 1
    petcbound compare --system demos/configs/benchmark_2d.json --ell 1

All outputs land in demos/out/ and are byte-reproducible: rerunning
with the same config yields identical files.
"""

import json
import os

from petcbound import load_system
from petcbound.pipeline import (
    load_pipeline_config,
    render_regions_file,
    run_compare,
    run_pipeline,
)

here = os.path.dirname(os.path.abspath(__file__))
config = load_pipeline_config(os.path.join(here, "configs", "pipeline_2d.json"))
config.output_dir = os.path.join(here, "out")

report = run_pipeline(config)
print("global AIST bounds:", json.dumps(report["global_bounds"], indent=2))
print("certificate:", json.dumps(report["certificate"], indent=2))
print("first query record:", json.dumps(report["queries"][0], indent=2))

system = load_system(config.system_path)
svg_path = os.path.join(config.output_dir, "regions_ell1.svg")
render_regions_file(system, ell=1, path=svg_path, grid=720, seed=config.seed)
print(f"region plot written to {svg_path}")

comparison = run_compare(config)
print("data-driven vs dense-sweep abstraction:")
print(json.dumps({k: comparison[k] for k in ("data_driven", "oracle")}, indent=2))
