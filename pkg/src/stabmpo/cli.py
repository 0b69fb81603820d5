"""Command-line interface.

Subcommands: ``tdoped``, ``floquet``, ``temporal`` (T-doped run with the
temporal-entropy sweep), ``compile`` (sample a T-doped circuit and write
its compiled form) and ``selftest``.  Run parameters come from an optional
key=value config file overridden by flags; every run writes meta.txt plus
CSV files into the output directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (
    FloquetConfig,
    TDopedConfig,
    config_from_sources,
    parse_config_file,
    run_floquet,
    run_tdoped,
    sample_tdoped_blocks,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--n", type=int, help="qubit count")
    parser.add_argument("--chi", type=int, help="bond dimension cap")
    parser.add_argument("--realizations", type=int, help="disorder realizations")
    parser.add_argument("--seed", type=int, help="64-bit master seed")
    parser.add_argument("--out", help="output directory")


def _add_tdoped_args(parser: argparse.ArgumentParser) -> None:
    _add_common(parser)
    parser.add_argument("--m", type=int, dest="m_layers", help="number of blocks M")
    parser.add_argument("--d", type=int, dest="depth_d", help="brick-wall depth D")
    parser.add_argument("--observable", help="Pauli literal, default Z at n/2")
    parser.add_argument(
        "--baseline", action="store_true", default=None,
        help="also run the gate-by-gate reference track",
    )
    parser.add_argument(
        "--temporal", action="store_true", default=None,
        help="emit the temporal entropy sweep",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stabmpo",
        description="Clifford-dominated circuit simulation via compiled "
        "Pauli-rotation layers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_td = sub.add_parser("tdoped", help="random Clifford circuit doped with T gates")
    _add_tdoped_args(p_td)

    p_tmp = sub.add_parser("temporal", help="tdoped run with the temporal sweep on")
    _add_tdoped_args(p_tmp)

    p_fl = sub.add_parser("floquet", help="kicked U(1)-Clifford Floquet dynamics")
    _add_common(p_fl)
    p_fl.add_argument("--epsilon", type=float, help="kick deviation from pi")
    p_fl.add_argument("--periods", type=int, help="number of Floquet periods")

    p_cp = sub.add_parser("compile", help="sample blocks and write the compiled circuit")
    _add_common(p_cp)
    p_cp.add_argument("--m", type=int, dest="m_layers", help="number of blocks M")
    p_cp.add_argument("--d", type=int, dest="depth_d", help="brick-wall depth D")

    sub.add_parser("selftest", help="run the built-in oracle checks")
    return parser


_TDOPED_KEYS = (
    "n", "m_layers", "depth_d", "chi", "realizations", "seed",
    "observable", "run_baseline", "run_temporal",
)
_FLOQUET_KEYS = ("n", "epsilon", "periods", "chi", "realizations", "seed")


def _collect(args, keys) -> dict:
    out = {}
    for key in keys:
        if hasattr(args, key):
            out[key] = getattr(args, key)
    if getattr(args, "baseline", None) is not None:
        out["run_baseline"] = args.baseline
    if getattr(args, "temporal", None) is not None:
        out["run_temporal"] = args.temporal
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "selftest":
        from .selftest import run_selftest

        return run_selftest()

    file_values = parse_config_file(args.config) if args.config else {}

    try:
        if args.command in ("tdoped", "temporal"):
            cfg = config_from_sources(
                TDopedConfig, file_values, _collect(args, _TDOPED_KEYS)
            )
            if args.command == "temporal":
                cfg.run_temporal = True
            outdir = Path(args.out) if args.out else Path(f"{args.command}_out")
            res = run_tdoped(cfg, outdir)
            print(f"wrote {res.outdir}")
            return 0

        if args.command == "floquet":
            cfg = config_from_sources(
                FloquetConfig, file_values, _collect(args, _FLOQUET_KEYS)
            )
            outdir = Path(args.out) if args.out else Path("floquet_out")
            res = run_floquet(cfg, outdir)
            print(f"wrote {res.outdir}")
            return 0

        if args.command == "compile":
            import numpy as np

            from .circuit import compile_blocks

            cfg = config_from_sources(
                TDopedConfig, file_values, _collect(args, _TDOPED_KEYS)
            )
            cfg.validate()
            rng = np.random.default_rng([cfg.seed, 0])
            blocks = sample_tdoped_blocks(cfg.n, cfg.m_layers, cfg.depth_d, rng)
            compiled = compile_blocks(cfg.n, blocks)
            out = Path(args.out) if args.out else Path("compiled.stabmpo")
            out.write_text(compiled.to_text(), encoding="utf-8")
            print(f"wrote {out}")
            return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
