"""Online triplet generation from ground-truth bundles."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bundles import Bundle, DIRECTION_VECS, OPPOSITE, SIDE_FACING


@dataclass(frozen=True)
class Triplet:
    bundle_index: int
    anchor: tuple[int, int]    # (tile, side)
    positive: tuple[int, int]  # ground-truth neighbour of the anchor edge
    negative: tuple[int, int]  # a non-adjacent edge of another tile


@dataclass
class TrainConfig:
    lr: float = 0.0001
    batch: int = 64
    epochs: int = 850
    pieces_per_puzzle_per_epoch: int = 25
    seed: int = 0
    val_every: int = 1

    def __post_init__(self):
        if min(self.lr, self.batch, self.epochs,
               self.pieces_per_puzzle_per_epoch, self.val_every) <= 0:
            raise ValueError("all training parameters must be positive")


def positive_pairs(bundle: Bundle, tile: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Anchor/positive edge pairs of one piece: one per ground-truth neighbour
    (four for interior pieces, three along borders, two at corners)."""
    grid = {(r, c): (t, k) for t, r, c, k in bundle.ground_truth}
    cell = {t: (r, c) for t, r, c, k in bundle.ground_truth}
    rot = {t: k for t, r, c, k in bundle.ground_truth}
    r, c = cell[tile]
    pairs = []
    for d in range(4):
        dr, dc = DIRECTION_VECS[d]
        other = grid.get((r + dr, c + dc))
        if other is None:
            continue
        q = other[0]
        anchor = (tile, SIDE_FACING[rot[tile]][d])
        positive = (q, SIDE_FACING[rot[q]][OPPOSITE[d]])
        pairs.append((anchor, positive))
    return pairs


def sample_triplets(corpus: list[Bundle], epoch_seed, cfg: TrainConfig) -> list[Triplet]:
    """One epoch's triplets: per puzzle, a random subset of pieces anchors all
    of its edges; each positive pair gets one uniform non-adjacent negative.

    Deterministic for a fixed epoch seed.
    """
    rng = np.random.default_rng(epoch_seed)
    out: list[Triplet] = []
    for b_idx, bundle in enumerate(corpus):
        if bundle.n_tiles < 2:
            warnings.warn(f"{bundle.name}: fewer than two tiles, skipped")
            continue
        contacts = bundle.contacts()
        n = bundle.n_tiles
        k = min(cfg.pieces_per_puzzle_per_epoch, n)
        pieces = rng.choice(n, size=k, replace=False)
        for tile in pieces:
            for anchor, positive in positive_pairs(bundle, int(tile)):
                e_a = 4 * anchor[0] + anchor[1]
                candidates = [
                    (t, s) for t in range(n) if t != anchor[0] for s in range(4)
                    if (e_a, 4 * t + s) not in contacts
                ]
                neg = candidates[int(rng.integers(len(candidates)))]
                out.append(Triplet(b_idx, anchor, positive, neg))
    return out
