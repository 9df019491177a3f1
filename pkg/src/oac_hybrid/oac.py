"""Sum aggregation over the air and its error statistics.

All devices transmit simultaneously with channel-inverting precoding, so the
receiver observes the sum of their values, each rotated by that device's
residual phase error, plus thermal noise. Closed forms are provided for the
mean-square error under uniform phase feedback and under no feedback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RoundOutcome:
    """True sum, estimate, and squared error of one aggregation round."""

    true_sum: complex
    estimate: complex
    squared_error: float


def oac_round(values, phase_errors, noise) -> RoundOutcome:
    """Aggregate one round: estimate = sum(values * exp(j*phase_error)) + noise."""
    values = np.asarray(values, dtype=complex)
    phase_errors = np.asarray(phase_errors, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise ValueError("values must be a non-empty 1-d array")
    if phase_errors.shape != values.shape:
        raise ValueError("values and phase_errors must have the same length")
    true_sum = complex(values.sum())
    estimate = complex((values * np.exp(1j * phase_errors)).sum() + noise)
    return RoundOutcome(true_sum=true_sum, estimate=estimate,
                        squared_error=abs(estimate - true_sum) ** 2)


def batch_squared_error(values: np.ndarray, phase_errors: np.ndarray,
                        noise: np.ndarray) -> np.ndarray:
    """Vectorized squared errors for a batch of rounds.

    values and phase_errors are (..., K); noise matches the leading shape.
    Row semantics are identical to oac_round.
    """
    values = np.asarray(values, dtype=complex)
    deviation = (values * np.exp(1j * np.asarray(phase_errors))).sum(axis=-1) \
        + np.asarray(noise) - values.sum(axis=-1)
    return np.abs(deviation) ** 2


def uniform_feedback_mse(device_count: int, bits: int) -> float:
    """Exact MSE of the aggregate under uniform phase feedback.

    With channel phases uniform on the circle and an evenly spaced 2**bits
    codebook, the residual phase error is uniform on [-pi/2**bits,
    pi/2**bits] and the MSE evaluates to
    2*K*(1 - (2**bits/pi) * sin(pi/2**bits)) + 1.
    """
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    if bits < 1:
        raise ValueError("bits must be >= 1; see no_feedback_mse for bits=0")
    count = 2 ** bits
    return 2.0 * device_count * (1.0 - (count / math.pi) * math.sin(math.pi / count)) + 1.0


def no_feedback_mse(device_count: int) -> float:
    """Exact MSE with no phase feedback: the phase error is uniform over the
    whole circle, so each device contributes 2 and the noise floor adds 1."""
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    return 2.0 * device_count + 1.0


def empirical_mse(squared_errors) -> tuple[float, float]:
    """Sample mean and standard error of the mean of squared errors.

    Sums run in fixed index order with compensated (exact) summation so the
    result is bit-stable across platforms and schedulers. The standard error
    of a single observation is reported as 0.
    """
    values = [float(v) for v in squared_errors]
    if not values:
        raise ValueError("squared_errors must be non-empty")
    if any(v < 0 for v in values):
        raise ValueError("squared errors must be non-negative")
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    variance = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(variance / n)
