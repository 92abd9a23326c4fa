"""Link-level simulator and ADC bit-allocation optimizer for a single-user
mmWave massive-MIMO receiver with SVD-based hybrid combining and
variable-resolution ADCs."""

__version__ = "0.1.0"

from .channel import (
    ArrayGeometry,
    ChannelConfig,
    ChannelRealization,
    channel_from_spectrum,
    generate_channel,
    steering_vector,
)
from .combining import (
    EqualizedReceiver,
    HybridCombiner,
    SingularPathError,
    design_unconstrained_combiner,
    equalize,
    split_constrained,
)
from .precoding import (
    HybridPrecoder,
    effective_transmit_matrix,
    factorize_precoder,
)
from .quantization import (
    DEFAULT_DISTORTION,
    AqnmModel,
    BitAllocation,
    DistortionTable,
    ScalarQuantizer,
    adc_power,
    build_aqnm,
    quantize_vector,
    train_lloyd_max,
)
from .metrics import (
    MseReport,
    NoiseModel,
    analytic_mse,
    crlb,
    mse_closed_form,
    simulate_mc,
    snr_sweep,
)
from .bitalloc import (
    AllocationResult,
    BudgetedSearchSpace,
    ComplexityReport,
    GainTable,
    GaParams,
    allocate_crlb,
    allocate_full_search,
    allocate_ga,
    complexity_report,
    enumerate_bset,
    gain_table,
)
from .config import ExperimentConfig, load_config, parse_config, preset_config, serialize_config
from .runner import run_experiment

__all__ = [
    "ArrayGeometry",
    "ChannelConfig",
    "ChannelRealization",
    "channel_from_spectrum",
    "generate_channel",
    "steering_vector",
    "HybridPrecoder",
    "factorize_precoder",
    "effective_transmit_matrix",
    "HybridCombiner",
    "EqualizedReceiver",
    "SingularPathError",
    "design_unconstrained_combiner",
    "split_constrained",
    "equalize",
    "DistortionTable",
    "DEFAULT_DISTORTION",
    "BitAllocation",
    "AqnmModel",
    "ScalarQuantizer",
    "train_lloyd_max",
    "quantize_vector",
    "build_aqnm",
    "adc_power",
    "NoiseModel",
    "MseReport",
    "analytic_mse",
    "mse_closed_form",
    "crlb",
    "simulate_mc",
    "snr_sweep",
    "BudgetedSearchSpace",
    "GainTable",
    "GaParams",
    "AllocationResult",
    "ComplexityReport",
    "enumerate_bset",
    "gain_table",
    "allocate_crlb",
    "allocate_full_search",
    "allocate_ga",
    "complexity_report",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "serialize_config",
    "preset_config",
    "run_experiment",
]
