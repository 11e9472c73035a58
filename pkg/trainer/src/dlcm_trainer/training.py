"""Training loop: identical batches for all four subnetworks, separate losses."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch

from .augment import random_augment
from .bundles import Bundle, oriented_pair_input
from .export import evaluate_table
from .metrics import pooled_rank1
from .nets import SUBNET_NAMES, FourNet, triplet_loss
from .triplets import TrainConfig, Triplet, sample_triplets


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite; the last finite state is on disk."""


@dataclass
class EpochStats:
    epoch: int
    losses: dict[str, float]
    val_rank1: Optional[float]


def _pair_tensor(corpus, triplets: list[Triplet], rng: np.random.Generator
                 ) -> tuple[torch.Tensor, torch.Tensor]:
    """Augmented positive and negative pair batches for a triplet list."""
    pos = np.empty((len(triplets), 50, 100, 3), dtype=np.float32)
    neg = np.empty_like(pos)
    for i, t in enumerate(triplets):
        tiles = corpus[t.bundle_index].tiles
        pos[i] = oriented_pair_input(
            random_augment(tiles[t.anchor[0]], rng), t.anchor[1],
            random_augment(tiles[t.positive[0]], rng), t.positive[1])
        neg[i] = oriented_pair_input(
            random_augment(tiles[t.anchor[0]], rng), t.anchor[1],
            random_augment(tiles[t.negative[0]], rng), t.negative[1])
    to = lambda a: torch.from_numpy(a).permute(0, 3, 1, 2)
    return to(pos), to(neg)


def _save_checkpoint(net: FourNet, epoch: int, path: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    torch.save({"model": net.state_dict(), "epoch": epoch}, tmp)
    os.replace(tmp, path)


def load_checkpoint(path: str) -> FourNet:
    net = FourNet()
    state = torch.load(path, map_location="cpu", weights_only=True)
    net.load_state_dict(state["model"])
    return net


def train(train_bundles: list[Bundle], val_bundles: list[Bundle],
          cfg: TrainConfig, out_dir: str) -> tuple[FourNet, list[EpochStats]]:
    """Run the full training schedule; checkpoints and a CSV log land in out_dir.

    All four subnetworks see identical batches; each loss is computed
    separately (their parameters are disjoint, so gradients never mix).
    Aborts with the last finite checkpoint on disk if a loss diverges.
    """
    os.makedirs(out_dir, exist_ok=True)
    torch.manual_seed(cfg.seed)
    net = FourNet()
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.lr)
    log: list[EpochStats] = []
    best_rank1 = -1.0
    last_path = os.path.join(out_dir, "checkpoint_last.pt")
    best_path = os.path.join(out_dir, "checkpoint_best.pt")
    _save_checkpoint(net, 0, last_path)  # a finite state exists even if epoch 1 diverges

    for epoch in range(1, cfg.epochs + 1):
        rng = np.random.default_rng((cfg.seed, epoch))
        triplets = sample_triplets(train_bundles, rng.integers(1 << 62), cfg)
        sums = {name: 0.0 for name in SUBNET_NAMES}
        batches = 0
        net.train()
        for start in range(0, len(triplets), cfg.batch):
            chunk = triplets[start:start + cfg.batch]
            pos, neg = _pair_tensor(train_bundles, chunk, rng)
            f_pos = net(pos)
            f_neg = net(neg)
            losses = {name: triplet_loss(f_pos[name], f_neg[name])
                      for name in SUBNET_NAMES}
            total = sum(losses.values())
            if not torch.isfinite(total):
                raise TrainingDiverged(
                    f"non-finite loss in epoch {epoch}; last state: {last_path}")
            optimizer.zero_grad()
            total.backward()
            optimizer.step()
            for name in SUBNET_NAMES:
                sums[name] += float(losses[name].detach())
            batches += 1

        means = {name: sums[name] / max(batches, 1) for name in SUBNET_NAMES}
        val_rank1 = None
        if val_bundles and (epoch % cfg.val_every == 0 or epoch == cfg.epochs):
            tables = [evaluate_table(net, b, variant=2) for b in val_bundles]
            val_rank1 = pooled_rank1(tables, val_bundles)
            if val_rank1 > best_rank1:
                best_rank1 = val_rank1
                _save_checkpoint(net, epoch, best_path)
        log.append(EpochStats(epoch, means, val_rank1))
        _save_checkpoint(net, epoch, last_path)
        _write_log(log, os.path.join(out_dir, "train_log.csv"))
    return net, log


def _write_log(log: list[EpochStats], path: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch"] + [f"loss_{n}" for n in SUBNET_NAMES] + ["val_rank1"])
        for row in log:
            writer.writerow([row.epoch]
                            + [f"{row.losses[n]:.6f}" for n in SUBNET_NAMES]
                            + ["" if row.val_rank1 is None else f"{row.val_rank1:.6f}"])
    os.replace(tmp, path)
