"""Command-line interface.

Subcommands: sweep-bits and sweep-period run Monte Carlo sweeps and emit
CSV; lemma1 prints the closed-form MSE for a device count and feedback
resolution; codebook prints quantizer levels for offline inspection.

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
failures such as codebook training not converging.
"""

from __future__ import annotations

import argparse
import sys

from .harness import ConfigError, SweepConfig, sweep_bits, sweep_period
from .oac import no_feedback_mse, uniform_feedback_mse
from .quantizer import (
    LloydMaxConvergenceError,
    lloyd_max_codebook,
    uniform_codebook,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--variant", choices=("a", "b", "both"), default="a")
    parser.add_argument("--devices", type=int, default=10, metavar="K")
    parser.add_argument("--bits", type=_int_list, default=(0, 1, 2, 3, 4, 5, 6),
                        help="comma-separated feedback resolutions, 0 allowed")
    parser.add_argument("--alpha", type=_float_list,
                        default=(0.001, 0.01, 0.1, 0.5),
                        help="comma-separated drift variances (variant b)")
    parser.add_argument("--period", type=_int_list, default=(1, 2, 4, 8, 16, 32),
                        help="comma-separated recalibration periods (variant b)")
    parser.add_argument("--trials", type=int, default=100_000,
                        help="independent trials per grid point "
                             "(rounds for variant a, cycles for variant b)")
    parser.add_argument("--seed", type=int, default=0, metavar="U64")
    parser.add_argument("--power", type=float, default=1.0,
                        help="nominal transmit power, recorded only")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=None, help="CSV path (default stdout)")
    parser.add_argument("--format", choices=("csv",), default="csv")


def _sweep_config(args: argparse.Namespace) -> SweepConfig:
    return SweepConfig(
        variant=args.variant,
        device_count=args.devices,
        bits=args.bits,
        alpha=args.alpha,
        period=args.period,
        trials=args.trials,
        master_seed=args.seed,
        power=args.power,
        output_path=args.out,
        workers=args.workers,
    )


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as handle:
            handle.write(text)


def _cmd_sweep_bits(args: argparse.Namespace) -> int:
    result = sweep_bits(_sweep_config(args))
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def _cmd_sweep_period(args: argparse.Namespace) -> int:
    result = sweep_period(_sweep_config(args))
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def _cmd_lemma1(args: argparse.Namespace) -> int:
    if args.bits == 0:
        value = no_feedback_mse(args.devices)
    else:
        value = uniform_feedback_mse(args.devices, args.bits)
    sys.stdout.write(format(value, ".17g") + "\n")
    return EXIT_OK


def _cmd_codebook(args: argparse.Namespace) -> int:
    if args.family == "uniform":
        book = uniform_codebook(args.bits)
    else:
        if args.alpha is None:
            raise ConfigError("--alpha is required for the lloyd-max family")
        book = lloyd_max_codebook(args.bits, args.alpha,
                                  tolerance=args.tolerance,
                                  max_iterations=args.max_iterations)
    text = "".join(format(level, ".17g") + "\n" for level in book.levels)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oac-hybrid",
        description="Monte Carlo simulator for coherent over-the-air "
                    "computation under hybrid channel estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bits = sub.add_parser("sweep-bits",
                            help="empirical MSE per feedback resolution")
    _add_sweep_arguments(p_bits)
    p_bits.set_defaults(func=_cmd_sweep_bits)

    p_period = sub.add_parser("sweep-period",
                              help="time-resolved variant-b MSE per "
                                   "recalibration period")
    _add_sweep_arguments(p_period)
    p_period.set_defaults(func=_cmd_sweep_period)

    p_closed = sub.add_parser("lemma1",
                              help="closed-form MSE for a device count and "
                                   "feedback resolution (0 = no feedback)")
    p_closed.add_argument("--devices", type=int, required=True, metavar="K")
    p_closed.add_argument("--bits", type=int, required=True, metavar="N")
    p_closed.set_defaults(func=_cmd_lemma1)

    p_codebook = sub.add_parser("codebook", help="print quantizer levels, "
                                                 "one per line")
    p_codebook.add_argument("--family", choices=("uniform", "lloyd-max"),
                            required=True)
    p_codebook.add_argument("--bits", type=int, required=True, metavar="N")
    p_codebook.add_argument("--alpha", type=float, default=None,
                            help="training variance (lloyd-max)")
    p_codebook.add_argument("--tolerance", type=float, default=1e-10)
    p_codebook.add_argument("--max-iterations", type=int, default=10_000)
    p_codebook.add_argument("--out", default=None)
    p_codebook.set_defaults(func=_cmd_codebook)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LloydMaxConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
