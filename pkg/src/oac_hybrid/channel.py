"""Block-fading channel with non-reciprocal hardware.

Models the antenna-to-antenna channel as reciprocal while the end-to-end
links pick up multiplicative transmit/receive hardware coefficients on both
sides. Calibration measures the hardware ratio so a downlink observation can
be converted into an uplink estimate; oscillator phase drift then degrades
that estimate as a random walk.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class CalibrationKind(enum.Enum):
    FULL = "full"
    AMPLITUDE_ONLY = "amplitude-only"


@dataclass(frozen=True)
class HardwareProfile:
    """Hardware coefficients for the devices and the access point.

    device_tx/device_rx hold one complex coefficient per device; ap_tx/ap_rx
    are shared scalars. All coefficients must be nonzero (calibration divides
    by them). oscillator_offset records the accumulated phase-drift increment
    per device since the profile was created; drift only ever rotates device
    phases, never amplitudes or the AP coefficients.
    """

    device_tx: np.ndarray
    device_rx: np.ndarray
    ap_tx: complex
    ap_rx: complex
    oscillator_offset: np.ndarray = None

    def __post_init__(self):
        tx = np.array(self.device_tx, dtype=complex)
        rx = np.array(self.device_rx, dtype=complex)
        if tx.ndim != 1 or rx.shape != tx.shape:
            raise ValueError("device_tx and device_rx must be 1-d and match")
        if np.any(tx == 0) or np.any(rx == 0) or self.ap_tx == 0 or self.ap_rx == 0:
            raise ValueError("hardware coefficients must be nonzero")
        offset = self.oscillator_offset
        offset = np.zeros(tx.size) if offset is None else np.array(offset, dtype=float)
        if offset.shape != tx.shape:
            raise ValueError("oscillator_offset must match the device count")
        for name, value in (("device_tx", tx), ("device_rx", rx),
                            ("oscillator_offset", offset)):
            value.flags.writeable = False
            object.__setattr__(self, name, value)
        object.__setattr__(self, "ap_tx", complex(self.ap_tx))
        object.__setattr__(self, "ap_rx", complex(self.ap_rx))

    @property
    def device_count(self) -> int:
        return self.device_tx.size


@dataclass(frozen=True)
class ChannelRealization:
    """One block-fading instance: per-device antenna channel plus AP noise."""

    gains: np.ndarray
    noise: complex

    def __post_init__(self):
        gains = np.array(self.gains, dtype=complex)
        if gains.ndim != 1 or gains.size < 1:
            raise ValueError("gains must be a non-empty 1-d array")
        gains.flags.writeable = False
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "noise", complex(self.noise))

    @property
    def device_count(self) -> int:
        return self.gains.size


@dataclass(frozen=True)
class CalibrationCoefficient:
    """Hardware-ratio correction obtained from bidirectional pilots.

    FULL holds the complex ratio; AMPLITUDE_ONLY holds just its modulus.
    value is scalar when calibrated for one device, or a vector for all.
    """

    kind: CalibrationKind
    value: complex | float | np.ndarray


def sample_channel(device_count: int, rng: np.random.Generator) -> ChannelRealization:
    """Draw one i.i.d. block: unit-variance circularly symmetric complex
    normal gains per device and one such noise sample at the AP."""
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    parts = rng.standard_normal((device_count, 2))
    gains = (parts[:, 0] + 1j * parts[:, 1]) / math.sqrt(2.0)
    nparts = rng.standard_normal(2)
    noise = (nparts[0] + 1j * nparts[1]) / math.sqrt(2.0)
    return ChannelRealization(gains=gains, noise=noise)


def uplink_channel(realization: ChannelRealization, hardware: HardwareProfile,
                   device: int | None = None):
    """End-to-end device-to-AP channel: device_tx * gain * ap_rx."""
    full = hardware.device_tx * realization.gains * hardware.ap_rx
    return complex(full[device]) if device is not None else full


def downlink_channel(realization: ChannelRealization, hardware: HardwareProfile,
                     device: int | None = None):
    """End-to-end AP-to-device channel: ap_tx * gain * device_rx."""
    full = hardware.ap_tx * realization.gains * hardware.device_rx
    return complex(full[device]) if device is not None else full


def calibrate(hardware: HardwareProfile, device: int | None = None,
              kind: CalibrationKind = CalibrationKind.FULL) -> CalibrationCoefficient:
    """Measure the hardware ratio mapping downlink to uplink channels.

    The full coefficient is (device_tx / device_rx) * (ap_rx / ap_tx); the
    amplitude-only kind keeps just its modulus. Calibration pilots are
    modeled as noiseless measurements.
    """
    ratio = (hardware.device_tx / hardware.device_rx) * (hardware.ap_rx / hardware.ap_tx)
    if device is not None:
        ratio = complex(ratio[device])
    if kind is CalibrationKind.AMPLITUDE_ONLY:
        value = np.abs(ratio) if device is None else abs(ratio)
        return CalibrationCoefficient(kind=kind, value=value)
    return CalibrationCoefficient(kind=CalibrationKind.FULL, value=ratio)


def reciprocity_estimate(calibration: CalibrationCoefficient, downlink):
    """Uplink-channel estimate from a downlink measurement.

    Exact while the hardware has not drifted since calibration; drift only
    rotates the estimate's phase, never its amplitude.
    """
    if calibration.kind is not CalibrationKind.FULL:
        raise ValueError("reciprocity_estimate requires a full calibration")
    return calibration.value * downlink


def rotate_oscillator_phases(hardware: HardwareProfile,
                             increments: np.ndarray) -> HardwareProfile:
    """Apply given oscillator phase increments: each device's transmit chain
    rotates by +increment/2 and its receive chain (same oscillator) by
    -increment/2. Amplitudes and AP coefficients are untouched."""
    increments = np.asarray(increments, dtype=float)
    if increments.shape != (hardware.device_count,):
        raise ValueError("one increment per device required")
    half = np.exp(0.5j * increments)
    return HardwareProfile(
        device_tx=hardware.device_tx * half,
        device_rx=hardware.device_rx * np.conj(half),
        ap_tx=hardware.ap_tx,
        ap_rx=hardware.ap_rx,
        oscillator_offset=hardware.oscillator_offset + increments,
    )


def apply_phase_drift(hardware: HardwareProfile, variance: float,
                      rng: np.random.Generator) -> HardwareProfile:
    """One random-walk drift step: independent zero-mean Gaussian increments
    of the given variance per device, applied via rotate_oscillator_phases."""
    if variance < 0:
        raise ValueError("variance must be >= 0")
    increments = rng.normal(0.0, math.sqrt(variance), hardware.device_count)
    return rotate_oscillator_phases(hardware, increments)


def random_hardware(device_count: int, rng: np.random.Generator,
                    amplitude_range: tuple[float, float] = (0.5, 2.0)) -> HardwareProfile:
    """Randomized profile: log-uniform amplitudes over amplitude_range and
    uniform phases, for device and AP coefficients alike. Keeps amplitudes
    away from zero so calibration ratios stay well conditioned."""
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    lo, hi = math.log(amplitude_range[0]), math.log(amplitude_range[1])

    def draw(size=None):
        amp = np.exp(rng.uniform(lo, hi, size))
        phase = rng.uniform(0.0, 2.0 * math.pi, size)
        return amp * np.exp(1j * phase)

    return HardwareProfile(
        device_tx=draw(device_count),
        device_rx=draw(device_count),
        ap_tx=complex(draw()),
        ap_rx=complex(draw()),
    )
