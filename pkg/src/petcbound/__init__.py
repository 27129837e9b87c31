"""Sample-based bounds on the average inter-sample time of PETC loops.

The toolkit simulates a periodic event-triggered control loop to label
sampled states with their inter-sample-time sequences, trains a
multiclass classifier on those scenarios, attaches a PAC risk
certificate to it, folds the observed sequences into a weighted
traffic abstraction, and reads AIST bounds off the abstraction's
extreme cycle means.
"""

from .classifier import (
    MulticlassModel,
    count_violations,
    g_values,
    load_model,
    predict,
    predict_labels,
    train,
    veronese2,
)
from .data import (
    LabeledSample,
    ScenarioSet,
    generate_dataset,
    load_jsonl,
    sample_states,
    split,
)
from .dynamics import (
    LtiPetcSystem,
    calibrate_heartbeat,
    empirical_aist,
    exact_ist,
    hold_transition,
    ist_sequence,
    load_system,
    matrix_exponential,
    system_from_config,
    trigger_cones,
)
from .errors import (
    AbstractionMismatchError,
    DegenerateStateError,
    PetcBoundError,
    RootBracketingError,
    UnsupportedConfigError,
)
from .graphs import maximum_mean_cycle, minimum_mean_cycle
from .pipeline import PipelineConfig, run_compare, run_pipeline
from .risk import (
    RiskCertificate,
    certify,
    epsilon_bounds,
    load_certificate,
    monte_carlo_risk,
)
from .traffic import (
    TrafficAbstraction,
    aist_bounds,
    build_slca,
    eac,
    load_abstraction,
    max_mean_cycle,
    min_mean_cycle,
    sac_lac_from,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractionMismatchError",
    "DegenerateStateError",
    "LabeledSample",
    "LtiPetcSystem",
    "MulticlassModel",
    "PetcBoundError",
    "PipelineConfig",
    "RiskCertificate",
    "RootBracketingError",
    "ScenarioSet",
    "TrafficAbstraction",
    "UnsupportedConfigError",
    "aist_bounds",
    "build_slca",
    "calibrate_heartbeat",
    "certify",
    "count_violations",
    "eac",
    "empirical_aist",
    "epsilon_bounds",
    "exact_ist",
    "g_values",
    "generate_dataset",
    "hold_transition",
    "ist_sequence",
    "load_abstraction",
    "load_certificate",
    "load_jsonl",
    "load_model",
    "load_system",
    "matrix_exponential",
    "max_mean_cycle",
    "maximum_mean_cycle",
    "min_mean_cycle",
    "minimum_mean_cycle",
    "monte_carlo_risk",
    "predict",
    "predict_labels",
    "run_compare",
    "run_pipeline",
    "sac_lac_from",
    "sample_states",
    "split",
    "system_from_config",
    "train",
    "trigger_cones",
    "veronese2",
]
