"""Cross-modal explanation delivery: simulator and metrics toolkit.

Models the delivery of feature-attribution explanations as a noisy,
capacity-limited channel.  An attribution vector is encoded into a
symbol stream (modality x style), degraded by retention limits and
symbol noise, and scored for information retention, cognitive load,
comprehension efficiency, trust calibration and a composite trade-off.
"""

from .core import (
    CompositeWeights,
    ConfigError,
    DomainProfile,
    ExperimentConfig,
    Modality,
    ModalityParams,
    PrefixRetention,
    SerialDecayRetention,
    StreamKey,
    StreamPurpose,
    Style,
    StyleParams,
    TrustParams,
    ValidationIssue,
    ValidationReport,
    config_fingerprint,
    config_from_json,
    config_to_json,
    default_config,
    derive_stream,
    dump_config,
    load_config,
    validate_config,
)
from .encoder import (
    DegenerateSampleError,
    EncodedExplanation,
    MessageSymbol,
    Sign,
    encode,
    quantize_value,
    quantize_vector,
)
from .experiment import (
    PhiMatrix,
    ResultSet,
    lambda_sweep,
    run_ingested,
    run_protocol,
    summarize_kde,
)
from .generator import (
    AttributionVector,
    DataFormatError,
    DegenerateInputError,
    IngestedBatch,
    generate_attribution,
    ingest_attributions,
    write_attributions_csv,
)
from .infotheory import (
    DensityCurve,
    EmptyInputError,
    entropy,
    information_retention,
    kde,
    mutual_information,
    silverman_bandwidth,
)
from .metrics import (
    ConditionSummary,
    SampleRecord,
    TrustDraw,
    cognitive_load,
    composite_score,
    comprehension_efficiency,
    folded_normal_mean,
    simulate_trust,
)
from .percept import MISSING, Missing, Percept, perceive

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "CompositeWeights",
    "ConfigError",
    "DomainProfile",
    "ExperimentConfig",
    "Modality",
    "ModalityParams",
    "PrefixRetention",
    "SerialDecayRetention",
    "StreamKey",
    "StreamPurpose",
    "Style",
    "StyleParams",
    "TrustParams",
    "ValidationIssue",
    "ValidationReport",
    "config_fingerprint",
    "config_from_json",
    "config_to_json",
    "default_config",
    "derive_stream",
    "dump_config",
    "load_config",
    "validate_config",
    # encoder
    "DegenerateSampleError",
    "EncodedExplanation",
    "MessageSymbol",
    "Sign",
    "encode",
    "quantize_value",
    "quantize_vector",
    # percept
    "MISSING",
    "Missing",
    "Percept",
    "perceive",
    # generator
    "AttributionVector",
    "DataFormatError",
    "DegenerateInputError",
    "IngestedBatch",
    "generate_attribution",
    "ingest_attributions",
    "write_attributions_csv",
    # infotheory
    "DensityCurve",
    "EmptyInputError",
    "entropy",
    "information_retention",
    "kde",
    "mutual_information",
    "silverman_bandwidth",
    # metrics
    "ConditionSummary",
    "SampleRecord",
    "TrustDraw",
    "cognitive_load",
    "composite_score",
    "comprehension_efficiency",
    "folded_normal_mean",
    "simulate_trust",
    # experiment
    "PhiMatrix",
    "ResultSet",
    "lambda_sweep",
    "run_ingested",
    "run_protocol",
    "summarize_kde",
]
