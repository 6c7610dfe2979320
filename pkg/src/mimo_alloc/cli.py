"""Command line entry point: ``mimo-alloc <fig1|fig2|fig3|validate>``."""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import harness
from .errors import MimoAllocError
from .geometry import SystemConfig, load_config

SEED_ENV = "MIMO_ALLOC_SEED"


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def parse_snr_grid(text: str) -> list[float]:
    """``lo:hi:step`` (inclusive) or a comma-separated list, in dB."""
    try:
        if ":" in text:
            lo, hi, step = (float(x) for x in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            n = int(np.floor((hi - lo) / step + 1e-9)) + 1
            return [round(lo + i * step, 10) for i in range(n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR grid {text!r}; use lo:hi:step or a comma list")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mimo-alloc",
        description="Pilot/data power allocation sweeps for multicell massive MIMO uplink.",
    )
    p.add_argument("figure", choices=harness.FIGURES)
    p.add_argument("--config", help="YAML config file (defaults to the built-in 7-cell scenario)")
    p.add_argument("--snapshots", type=int, help="number of fading snapshots")
    p.add_argument("--seed", type=int, help=f"RNG seed (overrides ${SEED_ENV} and the config file)")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--antennas", type=parse_int_list, help="comma-separated BS antenna counts, e.g. 50,100")
    p.add_argument("--snr-db", type=parse_snr_grid, help="SNR grid as lo:hi:step or comma list")
    p.add_argument("--trials", type=int, default=10_000, help="Monte Carlo trials per point (validate)")
    p.add_argument("--no-plot", action="store_true", help="write CSV only")
    return p


def resolve_seed(cli_seed: int | None, file_seed: int | None) -> int:
    if cli_seed is not None:
        return cli_seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise MimoAllocError(f"{SEED_ENV} must be an integer, got {env!r}")
    if file_seed is not None:
        return file_seed
    return harness.DEFAULT_SEED


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse takes "-25:15:1" for an option flag; bind it to --snr-db explicitly
    out = []
    it = iter(argv)
    for arg in it:
        if arg == "--snr-db":
            nxt = next(it, None)
            out.append(arg if nxt is None else f"--snr-db={nxt}")
        else:
            out.append(arg)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        if args.config:
            config, file_seed = load_config(args.config)
        else:
            config, file_seed = SystemConfig(), None
        spec = harness.ExperimentSpec(
            figure_id=args.figure,
            antenna_counts=args.antennas,
            snr_grid_db=args.snr_db,
            snapshots=args.snapshots,
            seed=resolve_seed(args.seed, file_seed),
            output_dir=args.out,
            config=config,
            trials=args.trials,
        )
        result = harness.run(spec)
        if not args.no_plot:
            from .plotting import render

            result.files["figure"] = render(spec.figure_id, result.rows, spec.output_dir)
    except (MimoAllocError, ValueError, OSError) as exc:
        print(f"mimo-alloc: error: {exc}", file=sys.stderr)
        return 1
    for name, path in result.files.items():
        print(f"{name}: {path}")
    for key, value in result.summary.items():
        print(f"{key} = {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
