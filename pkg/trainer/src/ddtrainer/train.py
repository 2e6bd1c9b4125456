"""Adam training loop with early stopping on validation MSE."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .data import Split, load_records, split_records
from .model import GatedDenoiser, tensor_to_windows, windows_to_tensor


@dataclass(frozen=True)
class TrainConfig:
    width: int = 13
    blocks: int = 4
    batch_size: int = 64
    learning_rate: float = 1e-3
    max_epochs: int = 500
    early_stop_patience: int = 20
    lr_decay_patience: int = 8  # halve the lr after this many stale epochs
    lr_decay_factor: float = 0.5
    lr_min: float = 1e-6
    identity_init: bool = True
    dataset_paths: tuple = ()
    psnr_list: tuple | None = None  # restrict to these dataset PSNRs if set
    split_ratio: tuple = (0.6, 0.2, 0.2)
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.learning_rate <= 0 or self.early_stop_patience < 1:
            raise ValueError("batch_size >= 1, learning_rate > 0, patience >= 1 required")

    @classmethod
    def from_json(cls, path) -> "TrainConfig":
        obj = json.loads(Path(path).read_text())
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("dataset_paths", "psnr_list", "split_ratio"):
            if key in obj and obj[key] is not None:
                obj[key] = tuple(obj[key])
        return cls(**obj)


@dataclass
class TrainReport:
    train_mse: list = field(default_factory=list)
    val_mse: list = field(default_factory=list)
    best_epoch: int = -1
    best_val_mse: float = float("inf")
    val_nmse_per_psnr: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "train_mse": self.train_mse,
                "val_mse": self.val_mse,
                "best_epoch": self.best_epoch,
                "best_val_mse": self.best_val_mse,
                "val_nmse_per_psnr": self.val_nmse_per_psnr,
                "config": self.config,
            },
            indent=2,
        )


def _epoch_loss(model, inputs, targets, batch_size, optimizer=None) -> float:
    """Mean per-element squared error over one pass; trains when optimizer given."""
    total = 0.0
    count = 0
    for start in range(0, inputs.shape[0], batch_size):
        xb = inputs[start : start + batch_size]
        yb = targets[start : start + batch_size]
        if optimizer is not None:
            optimizer.zero_grad()
            loss = torch.mean((model(xb) - yb) ** 2)
            loss.backward()
            optimizer.step()
        else:
            with torch.no_grad():
                loss = torch.mean((model(xb) - yb) ** 2)
        total += float(loss.detach()) * xb.shape[0]
        count += xb.shape[0]
    return total / max(count, 1)


def train(cfg: TrainConfig, log=None) -> tuple[GatedDenoiser, TrainReport]:
    """Train on the configured DDDS files; returns best-epoch model + report."""
    if not cfg.dataset_paths:
        raise ValueError("no dataset paths configured")
    files = [load_records(p) for p in cfg.dataset_paths]
    if cfg.psnr_list is not None:
        wanted = {float(p) for p in cfg.psnr_list}
        files = [f for f in files if float(f.psnr_db) in wanted]
        if not files:
            raise ValueError("psnr_list filtered out every dataset file")
    train_split, val_split, _ = split_records(files, cfg.split_ratio, cfg.seed)
    if len(train_split) == 0 or len(val_split) == 0:
        raise ValueError("empty train or validation split")

    torch.set_num_threads(1)  # tiny tensors: sync overhead dominates multithreading
    torch.manual_seed(cfg.seed)
    model = GatedDenoiser(width=cfg.width, blocks=cfg.blocks, identity_init=cfg.identity_init)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    x_train = windows_to_tensor(train_split.inputs)
    y_train = windows_to_tensor(train_split.targets)
    x_val = windows_to_tensor(val_split.inputs)
    y_val = windows_to_tensor(val_split.targets)

    report = TrainReport(config={
        "width": cfg.width, "blocks": cfg.blocks, "batch_size": cfg.batch_size,
        "learning_rate": cfg.learning_rate, "max_epochs": cfg.max_epochs,
        "early_stop_patience": cfg.early_stop_patience, "seed": cfg.seed,
        "train_samples": len(train_split), "val_samples": len(val_split),
    })
    shuffler = torch.Generator().manual_seed(cfg.seed)
    best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
    stale = 0
    stale_lr = 0
    lr = cfg.learning_rate
    for epoch in range(cfg.max_epochs):
        order = torch.randperm(x_train.shape[0], generator=shuffler)
        train_mse = _epoch_loss(model, x_train[order], y_train[order],
                                cfg.batch_size, optimizer)
        val_mse = _epoch_loss(model, x_val, y_val, cfg.batch_size)
        if not np.isfinite(train_mse) or not np.isfinite(val_mse):
            raise FloatingPointError(
                f"non-finite loss at epoch {epoch}: train={train_mse} val={val_mse}"
            )
        report.train_mse.append(train_mse)
        report.val_mse.append(val_mse)
        if log:
            log(f"epoch {epoch:4d}  train {train_mse:.3e}  val {val_mse:.3e}  lr {lr:.1e}")
        if val_mse < report.best_val_mse:
            report.best_val_mse = val_mse
            report.best_epoch = epoch
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
            stale = 0
            stale_lr = 0
        else:
            stale += 1
            stale_lr += 1
            if stale >= cfg.early_stop_patience:
                break
            if stale_lr >= cfg.lr_decay_patience and lr > cfg.lr_min:
                lr = max(lr * cfg.lr_decay_factor, cfg.lr_min)
                for group in optimizer.param_groups:
                    group["lr"] = lr
                stale_lr = 0
    model.load_state_dict(best_state)

    # per-PSNR validation NMSE of the retained model
    with torch.no_grad():
        for psnr in sorted(set(val_split.psnr_db.tolist())):
            mask = val_split.psnr_db == psnr
            pred = model(windows_to_tensor(val_split.inputs[mask]))
            est = tensor_to_windows(pred)
            err = np.sum(np.abs(est - val_split.targets[mask]) ** 2)
            ref = np.sum(np.abs(val_split.targets[mask]) ** 2)
            report.val_nmse_per_psnr[f"{psnr:g}"] = float(err / ref)
    return model, report


def evaluate_nmse(model: GatedDenoiser, split: Split) -> float:
    """Mean window NMSE of single-frame denoising over a split."""
    with torch.no_grad():
        pred = tensor_to_windows(model(windows_to_tensor(split.inputs)))
    num = np.sum(np.abs(pred - split.targets) ** 2, axis=(1, 2))
    den = np.sum(np.abs(split.targets) ** 2, axis=(1, 2))
    return float(np.mean(num / den))


def evaluate_records(model: GatedDenoiser, noisy: np.ndarray, clean: np.ndarray) -> dict:
    """Mean NMSE of the four estimator variants on (R, F, Mt, Nn) records."""
    R, F = noisy.shape[:2]
    den = np.sum(np.abs(clean) ** 2, axis=(1, 2))
    with torch.no_grad():
        flat = noisy.reshape(-1, *noisy.shape[2:])
        outs = tensor_to_windows(model(windows_to_tensor(flat))).reshape(noisy.shape)

    def mean_nmse(est):
        return float(np.mean(np.sum(np.abs(est - clean) ** 2, axis=(1, 2)) / den))

    return {
        "raw_single": mean_nmse(noisy[:, 0]),
        "raw_avg": mean_nmse(noisy.mean(axis=1)),
        "denoised_single": mean_nmse(outs[:, 0]),
        "denoised_avg": mean_nmse(outs.mean(axis=1)),
    }


def emit_parity_vectors(model: GatedDenoiser, count: int, path, seed: int = 0,
                        M_tau: int = 8, N_nu: int = 8) -> None:
    """Write (input, output) float32 pairs in the DDPV layout."""
    rng = np.random.default_rng(seed)
    inputs = (rng.standard_normal((count, M_tau, N_nu)) +
              1j * rng.standard_normal((count, M_tau, N_nu))).astype(np.complex64)
    with torch.no_grad():
        outputs = tensor_to_windows(model(windows_to_tensor(inputs))).astype(np.complex64)
    buf = [struct.pack("<4sIIII", b"DDPV", 1, count, M_tau, N_nu)]
    for i in range(count):
        for win in (inputs[i], outputs[i]):
            buf.append(np.ascontiguousarray(win.real, dtype="<f4").tobytes())
            buf.append(np.ascontiguousarray(win.imag, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(buf))
