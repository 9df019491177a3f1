"""Seeded Monte Carlo sweep runner with deterministic CSV output.

Trials are the unit of parallelism: every trial owns a generator seeded by a
counter-mode hash of (master seed, grid point, trial index), so any single
trial can be re-run standalone and results do not depend on execution order
or worker count. Per-point aggregation runs over a fixed chunk grid in trial
order with compensated summation, which keeps the emitted CSV byte-identical
across runs and worker counts.

A trial is one independent replication unit: a single aggregation round for
Variant A, a full calibration cycle (recalibration_period rounds) for
Variant B. Row counts report the number of squared-error samples aggregated
into that row.
"""

from __future__ import annotations

import hashlib
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .oac import batch_squared_error
from .protocol import _check_uniform_codebook, residual_phase_errors
from .quantizer import (
    QuantizerCodebook,
    circular_quantization_error,
    lloyd_max_codebook,
    uniform_codebook,
)

CSV_HEADER = "variant,K,N,alpha,T,t,trials,mse,stderr,seed"

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_CHUNK_TRIALS = 1024  # fixed chunk grid; scheduling must never change results


class ConfigError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one sweep.

    alpha and period only matter for Variant B points. power is the nominal
    per-device transmit power; it is recorded for documentation and never
    enforced, because the simulated estimator applies exact channel
    inversion.
    """

    variant: str = "a"
    device_count: int = 10
    bits: tuple[int, ...] = (0, 1, 2, 3, 4, 5, 6)
    alpha: tuple[float, ...] = (0.001, 0.01, 0.1, 0.5)
    period: tuple[int, ...] = (1, 2, 4, 8, 16, 32)
    trials: int = 100_000
    master_seed: int = 0
    power: float = 1.0
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.variant not in ("a", "b", "both"):
            raise ConfigError(f"variant must be a, b, or both, got {self.variant!r}")
        if self.device_count < 1:
            raise ConfigError("device_count must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not (0 <= self.master_seed < 2 ** 64):
            raise ConfigError("master_seed must fit in 64 bits")
        for name, grid in (("bits", self.bits), ("alpha", self.alpha),
                           ("period", self.period)):
            if len(grid) == 0:
                raise ConfigError(f"{name} grid must be non-empty")
        if any(b < 0 for b in self.bits):
            raise ConfigError("bits must be >= 0")
        if any(a < 0 for a in self.alpha):
            raise ConfigError("alpha must be >= 0")
        if any(t < 1 for t in self.period):
            raise ConfigError("period must be >= 1")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "period", tuple(int(t) for t in self.period))


@dataclass(frozen=True)
class SweepRow:
    """One CSV row; alpha/period/round_index are None where not applicable."""

    variant: str
    device_count: int
    bits: int
    alpha: float | None
    period: int | None
    round_index: int | None
    trials: int
    mse: float
    stderr: float
    seed: int

    def to_fields(self) -> list[str]:
        return [
            self.variant,
            str(self.device_count),
            str(self.bits),
            "" if self.alpha is None else _fmt(self.alpha),
            "" if self.period is None else str(self.period),
            "" if self.round_index is None else str(self.round_index),
            str(self.trials),
            _fmt(self.mse),
            _fmt(self.stderr),
            str(self.seed),
        ]


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(",".join(row.to_fields()) for row in self.rows)
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as handle:
            handle.write(self.to_csv())


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def derive_trial_seed(master_seed: int, grid_point_index: int,
                      trial_index: int) -> int:
    """Collision-free 64-bit seed for one trial.

    Counter-mode hash of the identifying tuple, so a trial is re-runnable in
    isolation and the mapping is stable across platforms.
    """
    return _derive_seed(b"trial", master_seed, grid_point_index, trial_index)


def _point_seed(master_seed: int, grid_point_index: int) -> int:
    return _derive_seed(b"point", master_seed, grid_point_index, 0)


def _derive_seed(domain: bytes, master_seed: int, a: int, b: int) -> int:
    if master_seed < 0 or a < 0 or b < 0:
        raise ValueError("seed components must be non-negative")
    payload = domain + struct.pack(">QQQ", master_seed, a, b)
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


# ---------------------------------------------------------------------------
# grid enumeration

def _grid_points(config: SweepConfig, include_variant_a: bool) -> list[tuple]:
    """Points as (variant, bits, alpha, period); Variant A carries Nones.

    Enumeration order (A points first, then B points nested as bits, alpha,
    period) defines grid_point_index and therefore the seed stream of every
    trial.
    """
    points: list[tuple] = []
    if include_variant_a and config.variant in ("a", "both"):
        points.extend(("a", bits, None, None) for bits in config.bits)
    if config.variant in ("b", "both"):
        points.extend(
            ("b", bits, alpha, period)
            for bits in config.bits
            for alpha in config.alpha
            for period in config.period
        )
    return points


def _assert_unique_seeds(master_seed: int, point_count: int, trials: int) -> None:
    seen: set[int] = set()
    total = 0
    for point_index in range(point_count):
        for trial_index in range(trials):
            seen.add(derive_trial_seed(master_seed, point_index, trial_index))
            total += 1
    if len(seen) != total:
        raise RuntimeError("trial seed collision detected across the sweep")


# ---------------------------------------------------------------------------
# per-trial computation

def _complex_from_parts(parts: np.ndarray) -> np.ndarray:
    return (parts[..., 0] + 1j * parts[..., 1]) * _SQRT_HALF


def _variant_a_chunk(seeds, device_count: int, bits: int,
                     codebook: QuantizerCodebook | None) -> np.ndarray:
    """Squared errors of independent Variant A rounds, one per seed.

    Per-trial draw order: channel phases, device values, AP noise. The
    quantization error is evaluated on the stacked phases, which is
    elementwise and therefore value-identical to per-trial variant_a_round
    calls on the same streams.
    """
    _check_uniform_codebook(bits, codebook)
    count = len(seeds)
    phases = np.empty((count, device_count))
    vparts = np.empty((count, device_count, 2))
    nparts = np.empty((count, 2))
    for i, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        phases[i] = rng.uniform(0.0, 2.0 * math.pi, device_count)
        vparts[i] = rng.standard_normal((device_count, 2))
        nparts[i] = rng.standard_normal(2)
    if bits == 0:
        deltas = phases
    else:
        deltas = circular_quantization_error(codebook, phases)
    return batch_squared_error(_complex_from_parts(vparts), deltas,
                               _complex_from_parts(nparts))


def _variant_b_chunk(seeds, device_count: int, bits: int,
                     codebook: QuantizerCodebook | None, alpha: float,
                     period: int) -> np.ndarray:
    """Squared errors of independent Variant B calibration cycles.

    Returns shape (len(seeds), period); column t is the round started at
    rounds_since_calibration == t. Per-trial draw order: all drift
    increments, all device values, all noise samples.
    """
    count = len(seeds)
    sigma = math.sqrt(alpha)
    increments = np.empty((count, period, device_count))
    vparts = np.empty((count, period, device_count, 2))
    nparts = np.empty((count, period, 2))
    for i, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        increments[i] = rng.normal(0.0, sigma, (period, device_count))
        vparts[i] = rng.standard_normal((period, device_count, 2))
        nparts[i] = rng.standard_normal((period, 2))
    deltas = residual_phase_errors(increments, bits, codebook, alpha)
    return batch_squared_error(_complex_from_parts(vparts), deltas,
                               _complex_from_parts(nparts))


def variant_a_trial_squared_error(seed: int, device_count: int, bits: int,
                                  codebook: QuantizerCodebook | None) -> float:
    """Standalone re-run of one Variant A trial; bit-identical to the same
    trial inside a sweep."""
    return float(_variant_a_chunk([seed], device_count, bits, codebook)[0])


def variant_b_trial_squared_errors(seed: int, device_count: int, bits: int,
                                   codebook: QuantizerCodebook | None,
                                   alpha: float, period: int) -> np.ndarray:
    """Standalone re-run of one Variant B cycle; bit-identical to the same
    trial inside a sweep."""
    return _variant_b_chunk([seed], device_count, bits, codebook,
                            alpha, period)[0]


# ---------------------------------------------------------------------------
# chunked execution and order-stable aggregation

def _run_chunk(task: tuple):
    (variant, device_count, bits, codebook, alpha, period, master_seed,
     point_index, start, count, per_round) = task
    seeds = [derive_trial_seed(master_seed, point_index, start + i)
             for i in range(count)]
    if variant == "a":
        squared = _variant_a_chunk(seeds, device_count, bits, codebook)
    else:
        squared = _variant_b_chunk(seeds, device_count, bits, codebook,
                                   alpha, period)
    if per_round:
        sums = [math.fsum(squared[:, t]) for t in range(period)]
        sqsums = [math.fsum(squared[:, t] ** 2) for t in range(period)]
        return count, sums, sqsums
    flat = squared.ravel()
    return flat.size, [math.fsum(flat)], [math.fsum(flat * flat)]


def _finalize(counts, sums, sqsums) -> tuple[int, float, float]:
    n = sum(counts)
    total = math.fsum(sums)
    mean = total / n
    spread = math.fsum(sqsums) - n * mean * mean
    stderr = 0.0 if n < 2 else math.sqrt(max(spread, 0.0) / ((n - 1) * n))
    return n, mean, stderr


def _chunk_tasks(config: SweepConfig, point: tuple, point_index: int,
                 codebook: QuantizerCodebook | None, per_round: bool):
    variant, bits, alpha, period = point
    for start in range(0, config.trials, _CHUNK_TRIALS):
        count = min(_CHUNK_TRIALS, config.trials - start)
        yield (variant, config.device_count, bits, codebook, alpha, period,
               config.master_seed, point_index, start, count, per_round)


def _run_point(config: SweepConfig, point: tuple, point_index: int,
               codebook: QuantizerCodebook | None, per_round: bool, pool):
    tasks = list(_chunk_tasks(config, point, point_index, codebook, per_round))
    results = pool.map(_run_chunk, tasks) if pool is not None else map(_run_chunk, tasks)
    counts, sums, sqsums = [], [], []
    for count, chunk_sums, chunk_sqsums in results:
        counts.append(count)
        sums.append(chunk_sums)
        sqsums.append(chunk_sqsums)
    columns = len(sums[0])
    per_column = []
    for t in range(columns):
        per_column.append(_finalize(counts,
                                    [s[t] for s in sums],
                                    [s[t] for s in sqsums]))
    return per_column


class _Codebooks:
    """Per-sweep cache; building a Lloyd-Max codebook is deterministic, so
    caching cannot change results."""

    def __init__(self):
        self._cache: dict = {}

    def uniform(self, bits: int) -> QuantizerCodebook | None:
        if bits == 0:
            return None
        key = ("u", bits)
        if key not in self._cache:
            self._cache[key] = uniform_codebook(bits)
        return self._cache[key]

    def lloyd_max(self, bits: int, alpha: float) -> QuantizerCodebook | None:
        if bits == 0 or alpha == 0.0:
            return None
        key = ("lm", bits, alpha)
        if key not in self._cache:
            self._cache[key] = lloyd_max_codebook(bits, alpha)
        return self._cache[key]


def _sweep(config: SweepConfig, per_round: bool,
           include_variant_a: bool) -> SweepResult:
    points = _grid_points(config, include_variant_a)
    _assert_unique_seeds(config.master_seed, len(points), config.trials)
    codebooks = _Codebooks()
    rows: list[SweepRow] = []

    def emit(point_index, point, stats_per_column):
        variant, bits, alpha, period = point
        seed = _point_seed(config.master_seed, point_index)
        if per_round:
            for t, (n, mean, stderr) in enumerate(stats_per_column):
                rows.append(SweepRow(variant, config.device_count, bits,
                                     alpha, period, t, n, mean, stderr, seed))
        else:
            (n, mean, stderr), = stats_per_column
            rows.append(SweepRow(variant, config.device_count, bits, alpha,
                                 period, None, n, mean, stderr, seed))

    pool_ctx = (ProcessPoolExecutor(max_workers=config.workers)
                if config.workers > 1 else None)
    try:
        for point_index, point in enumerate(points):
            variant, bits, alpha, _ = point
            codebook = (codebooks.uniform(bits) if variant == "a"
                        else codebooks.lloyd_max(bits, alpha))
            stats = _run_point(config, point, point_index, codebook,
                               per_round and variant == "b", pool_ctx)
            emit(point_index, point, stats)
    finally:
        if pool_ctx is not None:
            pool_ctx.shutdown()
    return SweepResult(rows=tuple(rows))


def sweep_bits(config: SweepConfig) -> SweepResult:
    """Empirical MSE per quantizer resolution.

    Variant A rows aggregate `trials` independent rounds. Variant B rows
    aggregate every round of `trials` calibration cycles for each
    (bits, alpha, period) point, i.e. the MSE averaged uniformly over the
    rounds of a cycle; their round_index field is empty.
    """
    return _sweep(config, per_round=False, include_variant_a=True)


def sweep_period(config: SweepConfig) -> SweepResult:
    """Time-resolved Variant B MSE within a calibration cycle.

    For each (bits, alpha, period) point, emits one row per round index
    t < period, each aggregating `trials` cycles. The t == period-1 row is
    the last round before recalibration, the worst one of the cycle.
    """
    if config.variant != "b":
        raise ConfigError("sweep_period applies to variant b only")
    return _sweep(config, per_round=True, include_variant_a=False)
