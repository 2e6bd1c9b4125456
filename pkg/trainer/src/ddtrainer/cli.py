"""Trainer CLI: ddtrainer --config train.json --out model.ddnw [--seed N] [--parity-out p.ddpv]"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .train import TrainConfig, emit_parity_vectors, train
from .weights import export_weights


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ddtrainer", description=__doc__)
    parser.add_argument("--config", required=True, help="TrainConfig JSON")
    parser.add_argument("--out", required=True, help="output DDNW weight file")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--parity-out", default=None, help="also emit parity vectors here")
    parser.add_argument("--parity-count", type=int, default=16)
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = TrainConfig.from_json(args.config)
    except (OSError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)

    log = None if args.quiet else print
    try:
        model, report = train(cfg, log=log)
    except FloatingPointError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 4
    except (OSError, ValueError) as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return 3

    export_weights(model, args.out)
    report_path = Path(args.out).with_suffix(".report.json")
    report_path.write_text(report.to_json())
    print(f"wrote {args.out} (best epoch {report.best_epoch}, "
          f"val MSE {report.best_val_mse:.3e}) and {report_path}")
    if args.parity_out:
        emit_parity_vectors(model, args.parity_count, args.parity_out, seed=cfg.seed)
        print(f"wrote {args.parity_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
