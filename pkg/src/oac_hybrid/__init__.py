"""Coherent over-the-air computation under hybrid channel estimation.

Simulates the aggregation of values from distributed devices over a shared
wireless channel, where channel amplitudes are known exactly and phases come
either from quantized uplink-pilot feedback (Variant A) or from calibrated
reciprocity with optimally quantized drift-correction feedback (Variant B).
"""

from .channel import (
    CalibrationCoefficient,
    CalibrationKind,
    ChannelRealization,
    HardwareProfile,
    apply_phase_drift,
    calibrate,
    downlink_channel,
    random_hardware,
    reciprocity_estimate,
    rotate_oscillator_phases,
    sample_channel,
    uplink_channel,
)
from .harness import (
    CSV_HEADER,
    ConfigError,
    SweepConfig,
    SweepResult,
    SweepRow,
    derive_trial_seed,
    sweep_bits,
    sweep_period,
    variant_a_trial_squared_error,
    variant_b_trial_squared_errors,
)
from .oac import (
    RoundOutcome,
    batch_squared_error,
    empirical_mse,
    no_feedback_mse,
    oac_round,
    uniform_feedback_mse,
)
from .protocol import (
    DeviceEstimationState,
    residual_phase_errors,
    variant_a_round,
    variant_b_cycle_errors,
    variant_b_full_fidelity_round,
    variant_b_init,
    variant_b_round,
)
from .quantizer import (
    CodebookFamily,
    LloydMaxConvergenceError,
    QuantizerCodebook,
    circular_quantization_error,
    lloyd_max_codebook,
    quantize_circular,
    quantize_linear,
    uniform_codebook,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "CalibrationCoefficient",
    "CalibrationKind",
    "ChannelRealization",
    "CodebookFamily",
    "ConfigError",
    "DeviceEstimationState",
    "HardwareProfile",
    "LloydMaxConvergenceError",
    "QuantizerCodebook",
    "RoundOutcome",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "apply_phase_drift",
    "batch_squared_error",
    "calibrate",
    "circular_quantization_error",
    "derive_trial_seed",
    "downlink_channel",
    "empirical_mse",
    "lloyd_max_codebook",
    "no_feedback_mse",
    "oac_round",
    "quantize_circular",
    "quantize_linear",
    "random_hardware",
    "reciprocity_estimate",
    "residual_phase_errors",
    "rotate_oscillator_phases",
    "sample_channel",
    "sweep_bits",
    "sweep_period",
    "uniform_codebook",
    "uniform_feedback_mse",
    "uplink_channel",
    "variant_a_round",
    "variant_a_trial_squared_error",
    "variant_b_cycle_errors",
    "variant_b_full_fidelity_round",
    "variant_b_init",
    "variant_b_round",
    "variant_b_trial_squared_errors",
]
