"""Per-round channel-estimation protocols.

Variant A estimates the channel phase purely from quantized feedback of an
uplink pilot each round; it is stateless across rounds. Variant B estimates
the phase by calibrated reciprocity and corrects the oscillator random walk
with optimally quantized feedback of the per-round drift increment; the
access point keeps the exact running sum of un-fed-back quantization
residuals per device and subtracts it before quantizing, so the quantizer
input is always a single pure drift increment.

Both variants return the signed per-device phase error that enters the
aggregation round.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    CalibrationCoefficient,
    ChannelRealization,
    HardwareProfile,
    calibrate,
    downlink_channel,
    reciprocity_estimate,
    rotate_oscillator_phases,
    uplink_channel,
)
from .quantizer import (
    CodebookFamily,
    QuantizerCodebook,
    circular_quantization_error,
    quantize_linear,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DeviceEstimationState:
    """Per-device estimation bookkeeping between recalibrations.

    cumulative_residual is the running sum of quantization residuals of the
    drift increments (known to the AP, unknown to the devices); it is zero
    immediately after (re)calibration. applied_feedback is the net phase
    correction the devices have applied from received feedback (the negated
    sum of fed-back levels). offset_at_calibration snapshots the hardware
    drift state at calibration time so the physical-layer round can relate
    stale estimates to the current oscillator phase.
    """

    calibration: CalibrationCoefficient
    cumulative_residual: np.ndarray
    rounds_since_calibration: int
    recalibration_period: int
    applied_feedback: np.ndarray
    offset_at_calibration: np.ndarray

    def __post_init__(self):
        if self.recalibration_period < 1:
            raise ValueError("recalibration_period must be >= 1")
        if not 0 <= self.rounds_since_calibration <= self.recalibration_period:
            raise ValueError("rounds_since_calibration out of range")
        for name in ("cumulative_residual", "applied_feedback",
                     "offset_at_calibration"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def device_count(self) -> int:
        return self.cumulative_residual.size


def _check_uniform_codebook(bits: int, codebook: QuantizerCodebook | None):
    if bits < 0:
        raise ValueError("bits must be >= 0")
    if bits == 0:
        if codebook is not None:
            raise ValueError("bits=0 means no feedback; pass codebook=None")
        return
    if codebook is None or codebook.family is not CodebookFamily.UNIFORM:
        raise ValueError("a uniform codebook is required when bits >= 1")
    if codebook.bits != bits:
        raise ValueError(f"codebook has {codebook.bits} bits, expected {bits}")


def _check_lloyd_max_codebook(bits: int, codebook: QuantizerCodebook | None,
                              drift_variance: float):
    if bits < 0:
        raise ValueError("bits must be >= 0")
    if drift_variance < 0:
        raise ValueError("drift_variance must be >= 0")
    if bits == 0:
        if codebook is not None:
            raise ValueError("bits=0 means no feedback; pass codebook=None")
        return
    if drift_variance == 0.0:
        # Degenerate limit: Lloyd-Max levels scale with sqrt(variance) and
        # collapse to zero, so feedback carries no correction. No codebook.
        return
    if codebook is None or codebook.family is not CodebookFamily.LLOYD_MAX:
        raise ValueError("a Lloyd-Max codebook is required when bits >= 1")
    if codebook.bits != bits:
        raise ValueError(f"codebook has {codebook.bits} bits, expected {bits}")
    if not math.isclose(codebook.training_variance, drift_variance,
                        rel_tol=1e-9, abs_tol=0.0):
        raise ValueError(
            "codebook must be trained at the drift variance "
            f"({codebook.training_variance} != {drift_variance})"
        )


def variant_a_round(device_count: int, bits: int,
                    codebook: QuantizerCodebook | None,
                    rng: np.random.Generator) -> np.ndarray:
    """One feedback-based estimation round; returns per-device phase errors.

    Channel phases are uniform on [0, 2*pi); with bits >= 1 the error is the
    circular quantization error of the phase, with bits = 0 (no feedback)
    the full phase remains. Stateless across rounds.
    """
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    _check_uniform_codebook(bits, codebook)
    phases = rng.uniform(0.0, TWO_PI, device_count)
    if bits == 0:
        return phases
    return circular_quantization_error(codebook, phases)


def variant_b_init(device_count: int, recalibration_period: int,
                   hardware: HardwareProfile) -> DeviceEstimationState:
    """Full reciprocity calibration for all devices; zeroes the residual."""
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    if recalibration_period < 1:
        raise ValueError("recalibration_period must be >= 1")
    if hardware.device_count != device_count:
        raise ValueError("hardware profile does not match device_count")
    return DeviceEstimationState(
        calibration=calibrate(hardware),
        cumulative_residual=np.zeros(device_count),
        rounds_since_calibration=0,
        recalibration_period=recalibration_period,
        applied_feedback=np.zeros(device_count),
        offset_at_calibration=hardware.oscillator_offset.copy(),
    )


def _feedback_levels(bits: int, codebook: QuantizerCodebook | None,
                     drift_variance: float, increments: np.ndarray) -> np.ndarray:
    if bits == 0 or drift_variance == 0.0:
        return np.zeros_like(increments)
    return quantize_linear(codebook, increments)


def variant_b_round(state: DeviceEstimationState, bits: int,
                    codebook: QuantizerCodebook | None, drift_variance: float,
                    rng: np.random.Generator
                    ) -> tuple[np.ndarray, DeviceEstimationState]:
    """One reciprocity-plus-feedback round via the residual recursion.

    Draws the per-device drift increments, quantizes them (the AP has already
    subtracted its stored residual, so the quantizer input is the pure
    increment), and advances the residual by the quantization error. Returns
    the per-device phase errors (the negated residual) and the new state.
    """
    if state.rounds_since_calibration >= state.recalibration_period:
        raise ValueError(
            "recalibration period reached; re-init before the next round"
        )
    _check_lloyd_max_codebook(bits, codebook, drift_variance)
    increments = rng.normal(0.0, math.sqrt(drift_variance), state.device_count)
    fed_back = _feedback_levels(bits, codebook, drift_variance, increments)
    residual = state.cumulative_residual + (increments - fed_back)
    new_state = dataclasses.replace(
        state,
        cumulative_residual=residual,
        applied_feedback=state.applied_feedback - fed_back,
        rounds_since_calibration=state.rounds_since_calibration + 1,
    )
    return -residual, new_state


def residual_phase_errors(increments: np.ndarray, bits: int,
                          codebook: QuantizerCodebook | None,
                          drift_variance: float) -> np.ndarray:
    """Phase errors implied by a block of drift increments.

    increments has the round axis second-to-last, (..., rounds, devices);
    each round's increment is quantized and the residuals accumulate along
    the round axis, exactly as in variant_b_round.
    """
    _check_lloyd_max_codebook(bits, codebook, drift_variance)
    increments = np.asarray(increments, dtype=float)
    fed_back = _feedback_levels(bits, codebook, drift_variance, increments)
    return -np.cumsum(increments - fed_back, axis=-2)


def variant_b_cycle_errors(device_count: int, bits: int,
                           codebook: QuantizerCodebook | None,
                           drift_variance: float, recalibration_period: int,
                           rng: np.random.Generator) -> np.ndarray:
    """Phase errors for one whole calibration cycle, one row per round.

    Draws all per-round drift increments as a single block, which is
    stream-equivalent to iterating variant_b_round from a fresh state on the
    same generator; row t holds the errors of the round started at
    rounds_since_calibration == t.
    """
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    if recalibration_period < 1:
        raise ValueError("recalibration_period must be >= 1")
    _check_lloyd_max_codebook(bits, codebook, drift_variance)
    increments = rng.normal(0.0, math.sqrt(drift_variance),
                            (recalibration_period, device_count))
    return residual_phase_errors(increments, bits, codebook, drift_variance)


def variant_b_full_fidelity_round(
    state: DeviceEstimationState, hardware: HardwareProfile,
    realization: ChannelRealization, bits: int,
    codebook: QuantizerCodebook | None, drift_variance: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, DeviceEstimationState, HardwareProfile]:
    """One Variant B round played out through the physical-layer primitives.

    Instead of the residual recursion, this drifts the hardware, measures the
    downlink, forms the reciprocity estimate, and compares the precoded
    uplink pilot against the true channel. Consumes the generator exactly
    like variant_b_round, so on a shared stream the two produce identical
    phase errors (up to floating-point roundoff). Returns the errors, the
    advanced state, and the drifted hardware.
    """
    if state.rounds_since_calibration >= state.recalibration_period:
        raise ValueError(
            "recalibration period reached; re-init before the next round"
        )
    if hardware.device_count != state.device_count:
        raise ValueError("hardware profile does not match the state")
    if realization.device_count != state.device_count:
        raise ValueError("channel realization does not match the state")
    _check_lloyd_max_codebook(bits, codebook, drift_variance)

    increments = rng.normal(0.0, math.sqrt(drift_variance), state.device_count)
    # The oscillator rotation of +x/2 on the transmit chain and -x/2 on the
    # receive chain rotates a stale reciprocity estimate by -x, so realizing
    # an estimate-error increment of +increments requires drifting by the
    # negated amount.
    drifted = rotate_oscillator_phases(hardware, -increments)

    uplink = uplink_channel(realization, drifted)
    raw_estimate = reciprocity_estimate(
        state.calibration, downlink_channel(realization, drifted))
    intermediate = raw_estimate * np.exp(1j * state.applied_feedback)

    # AP pilot comparison. Phases of complex samples only resolve the error
    # mod 2*pi, while the feedback recursion is defined on unwrapped phases;
    # the wrap count is reconstructed from the oscillator drift state.
    observed_wrapped = np.angle(uplink * np.conj(intermediate))
    drift_since_calibration = drifted.oscillator_offset - state.offset_at_calibration
    unwrapped_target = drift_since_calibration - state.applied_feedback
    observed = observed_wrapped + TWO_PI * np.round(
        (unwrapped_target - observed_wrapped) / TWO_PI)

    recovered = -(observed + state.cumulative_residual)
    fed_back = _feedback_levels(bits, codebook, drift_variance, recovered)
    residual = state.cumulative_residual + (recovered - fed_back)
    new_state = dataclasses.replace(
        state,
        cumulative_residual=residual,
        applied_feedback=state.applied_feedback - fed_back,
        rounds_since_calibration=state.rounds_since_calibration + 1,
    )
    return observed + fed_back, new_state, drifted
