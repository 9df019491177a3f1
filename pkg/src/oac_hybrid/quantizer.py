"""Scalar quantizers for phase feedback.

Two codebook families are supported: uniform codebooks whose levels are
angles evenly spaced on the unit circle (quantized with a circular metric),
and Lloyd-Max codebooks that minimize mean-square quantization error for a
zero-mean Gaussian source (quantized with the plain real-line metric).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

TWO_PI = 2.0 * math.pi
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class CodebookFamily(enum.Enum):
    UNIFORM = "uniform"
    LLOYD_MAX = "lloyd-max"


class LloydMaxConvergenceError(RuntimeError):
    """Lloyd iteration failed to reach the requested tolerance.

    Carries the last iterate and its residual so the caller can diagnose
    (or resume from) the failed run.
    """

    def __init__(self, bits: int, variance: float, levels: np.ndarray,
                 residual: float, iterations: int):
        super().__init__(
            f"Lloyd-Max iteration (bits={bits}, variance={variance}) did not "
            f"converge within {iterations} iterations; last max level change "
            f"{residual:.3e}"
        )
        self.bits = bits
        self.variance = variance
        self.levels = levels
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class QuantizerCodebook:
    """Ordered set of quantization levels plus construction metadata.

    Levels are radians for the uniform family (points on the unit circle,
    all in [0, 2*pi)) and plain reals for the Lloyd-Max family (symmetric
    about zero). Instances are immutable and safe to share across workers.
    """

    levels: np.ndarray
    bits: int
    family: CodebookFamily
    training_variance: float | None = None

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("codebooks require bits >= 1")
        levels = np.array(self.levels, dtype=float)
        if levels.ndim != 1 or levels.size != 2 ** self.bits:
            raise ValueError(
                f"expected {2 ** self.bits} levels, got shape {levels.shape}"
            )
        if not np.all(np.diff(levels) > 0):
            raise ValueError("levels must be strictly increasing")
        if self.family is CodebookFamily.LLOYD_MAX:
            if self.training_variance is None or self.training_variance <= 0:
                raise ValueError(
                    "Lloyd-Max codebooks carry the positive training variance"
                )
        elif self.training_variance is not None:
            raise ValueError("training_variance only applies to Lloyd-Max")
        levels.flags.writeable = False
        object.__setattr__(self, "levels", levels)

    @property
    def size(self) -> int:
        return self.levels.size


def uniform_codebook(bits: int) -> QuantizerCodebook:
    """Codebook of 2**bits angles evenly spread on the unit circle, starting at 0.

    The zero-bit "no feedback" case carries no codebook and is rejected here;
    it is handled at the protocol level.
    """
    if bits < 1:
        raise ValueError("uniform_codebook requires bits >= 1")
    count = 2 ** bits
    levels = np.arange(count) * (math.pi / 2 ** (bits - 1))
    return QuantizerCodebook(levels=levels, bits=bits,
                             family=CodebookFamily.UNIFORM)


def _standard_normal_pdf(x: np.ndarray) -> np.ndarray:
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _cell_conditional_means(edges: np.ndarray) -> np.ndarray:
    """Mean of the standard normal restricted to each cell [edges[i], edges[i+1]].

    Closed-form ratio of density differences to distribution differences;
    edges may include +-inf, where the density contributes zero.
    """
    finite = np.isfinite(edges)
    pdf = np.where(finite, _standard_normal_pdf(np.where(finite, edges, 0.0)), 0.0)
    cdf = ndtr(edges)
    return (pdf[:-1] - pdf[1:]) / (cdf[1:] - cdf[:-1])


def lloyd_max_codebook(bits: int, variance: float, tolerance: float = 1e-10,
                       max_iterations: int = 10000) -> QuantizerCodebook:
    """Minimum-MSE codebook for a zero-mean Gaussian with the given variance.

    Alternates the two optimality conditions until a fixed point: decision
    boundaries at midpoints of adjacent levels, each level at the conditional
    mean of the Gaussian over its cell. Conditional means are evaluated in
    closed form from the Gaussian density and distribution function; no
    sampling is involved.

    The iteration runs at unit variance (the convergence `tolerance` applies
    to the unit-variance iterate) and the result is scaled by sqrt(variance),
    so levels(variance) == sqrt(variance) * levels(1) holds exactly.

    Raises LloydMaxConvergenceError if the maximum absolute level change per
    iteration does not fall below `tolerance` within `max_iterations`.
    """
    if bits < 1:
        raise ValueError("lloyd_max_codebook requires bits >= 1")
    if variance <= 0:
        raise ValueError("variance must be positive")
    if tolerance <= 0 or max_iterations < 1:
        raise ValueError("tolerance and max_iterations must be positive")

    count = 2 ** bits
    # Start at the conditional means of the 2**bits equiprobable cells; the
    # iterate is then ordered and already close to the fixed point.
    quantile_edges = ndtri(np.arange(count + 1) / count)
    levels = _cell_conditional_means(quantile_edges)

    residual = math.inf
    for _ in range(max_iterations):
        boundaries = 0.5 * (levels[:-1] + levels[1:])
        edges = np.concatenate(([-np.inf], boundaries, [np.inf]))
        updated = _cell_conditional_means(edges)
        residual = float(np.max(np.abs(updated - levels)))
        levels = updated
        if residual < tolerance:
            break
    else:
        raise LloydMaxConvergenceError(bits, variance,
                                       levels * math.sqrt(variance),
                                       residual, max_iterations)

    return QuantizerCodebook(levels=levels * math.sqrt(variance), bits=bits,
                             family=CodebookFamily.LLOYD_MAX,
                             training_variance=float(variance))


def _as_float_array(value):
    arr = np.asarray(value, dtype=float)
    return arr, arr.ndim == 0


def quantize_circular(codebook: QuantizerCodebook, angle):
    """Nearest codebook level under circular (mod 2*pi) distance.

    Accepts scalars or arrays of angles in radians (any real value; reduced
    mod 2*pi internally). Exact midpoint ties go to the numerically smaller
    level, which at the 0/2*pi seam is level 0.
    """
    if codebook.family is not CodebookFamily.UNIFORM:
        raise ValueError("quantize_circular requires a uniform codebook")
    x, scalar = _as_float_array(angle)
    if not np.all(np.isfinite(x)):
        raise ValueError("angles must be finite")
    count = codebook.size
    step = TWO_PI / count
    turns = np.mod(x, TWO_PI) / step
    lower = np.floor(turns).astype(np.int64)
    frac = turns - lower
    lower %= count  # mod() can round up to 2*pi for tiny negative inputs
    idx = np.where(frac > 0.5, lower + 1, lower) % count
    # tie at the seam: the competing levels are the last one and 0
    idx = np.where((frac == 0.5) & (lower == count - 1), 0, idx)
    out = codebook.levels[idx]
    return float(out) if scalar else out


def circular_quantization_error(codebook: QuantizerCodebook, angle):
    """Signed circular error angle - Q(angle), wrapped into [-pi, pi).

    For a uniform codebook with 2**N levels the result always lies in
    [-pi/2**N, pi/2**N].
    """
    x, scalar = _as_float_array(angle)
    err = np.mod(x - quantize_circular(codebook, x) + math.pi, TWO_PI) - math.pi
    return float(err) if scalar else err


def quantize_linear(codebook: QuantizerCodebook, value):
    """Nearest codebook level under plain absolute distance.

    Accepts scalars or arrays. Exact ties at cell midpoints go to the
    smaller level, keeping results bit-reproducible across platforms.
    """
    if codebook.family is not CodebookFamily.LLOYD_MAX:
        raise ValueError("quantize_linear requires a Lloyd-Max codebook")
    x, scalar = _as_float_array(value)
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    boundaries = 0.5 * (codebook.levels[:-1] + codebook.levels[1:])
    idx = np.searchsorted(boundaries, x, side="left")
    out = codebook.levels[idx]
    return float(out) if scalar else out
