"""Command-line harness: physics, make-dataset, nmse-sweep, ber-sweep, infer, selftest.

Exit codes: 0 success, 1 usage, 2 bad config, 3 I/O failure, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit_(EXIT_USAGE, f"{self.prog}: error: {message}")


class SystemExit_(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code
        self.message = message


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="otfskit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", required=True, help="experiment config JSON")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")

    sp = sub.add_parser("physics", help="print derived timing/mobility figures")
    add_common(sp)

    sp = sub.add_parser("make-dataset", help="export DDDS training datasets")
    add_common(sp)
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--psnr-db", type=float, nargs="*", default=None,
                    help="PSNR points (default: config psnr_grid_db)")
    sp.add_argument("--channels-out", default=None,
                    help="also dump each realization's paths to this JSONL file")

    sp = sub.add_parser("nmse-sweep", help="NMSE vs pilot SNR sweep")
    add_common(sp)
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--estimators", default=None, help="comma-separated tags")
    sp.add_argument("--no-plot", action="store_true", help="skip the PNG figure")

    sp = sub.add_parser("ber-sweep", help="BER vs data SNR at a fixed pilot SNR")
    add_common(sp)
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--estimator", default="perfect-csi")
    sp.add_argument("--psnr-db", type=float, default=25.0)
    sp.add_argument("--no-plot", action="store_true")

    sp = sub.add_parser("infer", help="run the denoiser on stored windows")
    sp.add_argument("--weights", required=True)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--parity", help="DDPV file: verify stored outputs")
    group.add_argument("--dataset", help="DDDS file: denoise the noisy frames")
    sp.add_argument("--out", default=None, help="output DDPV path (dataset mode)")
    sp.add_argument("--tol", type=float, default=1e-5, help="parity max-abs tolerance")

    sp = sub.add_parser("selftest", help="run the quick invariant suite")

    return p


def _load_config(args):
    from .config import ConfigError, load_config

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        raise SystemExit_(EXIT_CONFIG, str(exc))
    if getattr(args, "seed", None) is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def _cmd_physics(args) -> int:
    from .physics import derive_physics

    cfg = _load_config(args)
    report = derive_physics(cfg.grid, cfg.v_max_kmh)
    for line in report.lines():
        print(line)
    return EXIT_OK


def _cmd_make_dataset(args) -> int:
    from .experiments import export_dataset

    cfg = _load_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    psnrs = args.psnr_db if args.psnr_db else list(cfg.psnr_grid_db)
    for psnr in psnrs:
        out = out_dir / f"snapshots_psnr{psnr:g}db.ddds"
        export_dataset(cfg, psnr, out)
        print(f"wrote {out}")
    if args.channels_out:
        _dump_channels(cfg, psnrs, args.channels_out)
        print(f"wrote {args.channels_out}")
    return EXIT_OK


def _dump_channels(cfg, psnrs, path) -> None:
    from . import rng as rngmod
    from .grid import sample_paths

    lines = []
    for psnr in psnrs:
        role = f"{rngmod.ROLE_DATASET}-channel-{psnr:g}"
        for r in range(cfg.snapshots_per_psnr):
            paths = sample_paths(
                cfg.grid, cfg.P, rngmod.stream(cfg.seed, r, role),
                fractional=cfg.fractional, gain_profile=cfg.gain_profile,
            )
            lines.append(paths.to_json())
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_nmse_sweep(args) -> int:
    from .config import canonical_tag
    from .experiments import run_nmse_sweep, write_csv

    cfg = _load_config(args)
    if args.estimators:
        tags = tuple(canonical_tag(t.strip()) for t in args.estimators.split(","))
        cfg = dataclasses.replace(cfg, estimators=tags)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = run_nmse_sweep(cfg)
    csv_path = out_dir / "nmse_sweep.csv"
    write_csv(records, csv_path)
    print(f"wrote {csv_path}")
    if not args.no_plot:
        from .plotting import render_nmse_csv

        print(f"wrote {render_nmse_csv(csv_path)}")
    return EXIT_OK


def _cmd_ber_sweep(args) -> int:
    from .config import canonical_tag
    from .experiments import run_ber_sweep, write_csv

    cfg = _load_config(args)
    tag = canonical_tag(args.estimator)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = run_ber_sweep(cfg, tag, fixed_psnr_db=args.psnr_db)
    csv_path = out_dir / f"ber_sweep_{tag}.csv"
    write_csv(records, csv_path)
    print(f"wrote {csv_path}")
    if not args.no_plot:
        from .plotting import render_ber_csv

        print(f"wrote {render_ber_csv(csv_path)}")
    return EXIT_OK


def _cmd_infer(args) -> int:
    from .datasets import read_dataset, read_parity, write_parity
    from .denoiser import denoise_window
    from .weights import load_model

    model = load_model(args.weights)
    if args.parity:
        inputs, expected = read_parity(args.parity)
        worst = 0.0
        for i in range(inputs.shape[0]):
            out = denoise_window(model, inputs[i].astype(complex))
            out32 = np.stack([out.real, out.imag]).astype(np.float32)
            exp32 = np.stack([expected[i].real, expected[i].imag]).astype(np.float32)
            worst = max(worst, float(np.max(np.abs(out32 - exp32))))
        print(f"parity max-abs deviation: {worst:.3e} over {inputs.shape[0]} vectors")
        if worst > args.tol:
            raise SystemExit_(EXIT_NUMERIC, f"parity deviation {worst:.3e} exceeds {args.tol:g}")
        return EXIT_OK
    ds = read_dataset(args.dataset)
    out_path = args.out or (str(args.dataset) + ".denoised.ddpv")
    flat_in = ds.noisy.reshape(-1, ds.M_tau, ds.N_nu)
    outs = np.stack([denoise_window(model, w.astype(complex)) for w in flat_in])
    write_parity(out_path, flat_in.astype(np.complex64), outs.astype(np.complex64))
    print(f"wrote {out_path} ({flat_in.shape[0]} windows)")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_NUMERIC


_COMMANDS = {
    "physics": _cmd_physics,
    "make-dataset": _cmd_make_dataset,
    "nmse-sweep": _cmd_nmse_sweep,
    "ber-sweep": _cmd_ber_sweep,
    "infer": _cmd_infer,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit_ as exc:
        if exc.message:
            print(exc.message, file=sys.stderr)
        return exc.code
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except np.linalg.LinAlgError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
