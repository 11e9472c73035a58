"""Evaluating trained nets over whole bundles and writing CMAT files.

CMAT layout (little-endian): magic ``CMAT``, version u16 = 1, variant u8
(1|2), flags u8 (bit0 similarity, bit1 normalized, bit2 symmetric), tile
count u32, then (4n)^2 float32 scores in row-major edge order (edge index =
4 * tile + side, L=0 R=1 T=2 B=3); undefined entries are NaN.
"""

from __future__ import annotations

import os
import struct

import numpy as np
import torch

from .bundles import Bundle, admissible_pairs, oriented_pair_input

CMAT_MAGIC = b"CMAT"
CMAT_VERSION = 1
FLAG_SIMILARITY = 1


def evaluate_table(net, bundle: Bundle, variant: int, combine: str = "sum",
                   batch: int = 512) -> np.ndarray:
    """Score every admissible ordered edge pair; rows are anchor edges.

    Pairs are evaluated in the canonical anchor-left orientation without any
    augmentation.
    """
    if bundle.tile_px != 50:
        raise ValueError(f"{bundle.name}: tiles must be 50x50 pixels")
    n4 = 4 * bundle.n_tiles
    table = np.full((n4, n4), np.nan, dtype=np.float32)
    pairs = admissible_pairs(bundle.n_tiles, variant)
    net.eval()
    with torch.no_grad():
        for start in range(0, len(pairs), batch):
            chunk = pairs[start:start + batch]
            inputs = np.stack([
                oriented_pair_input(bundle.tiles[e_i // 4], e_i % 4,
                                    bundle.tiles[e_j // 4], e_j % 4)
                for e_i, e_j in chunk
            ])
            x = torch.from_numpy(inputs).permute(0, 3, 1, 2)
            scores = net.combined(x, combine).numpy()
            for (e_i, e_j), s in zip(chunk, scores):
                table[e_i, e_j] = s
    if not np.isfinite(table[~np.isnan(table)]).all():
        raise ValueError("network produced non-finite scores")
    return table


def write_cmat(table: np.ndarray, variant: int, path: str) -> None:
    """Write a raw similarity CMAT file (not normalized, not symmetric)."""
    n4 = table.shape[0]
    if table.shape != (n4, n4) or n4 % 4:
        raise ValueError("table must be square with 4n rows")
    header = CMAT_MAGIC + struct.pack("<HBBI", CMAT_VERSION, variant,
                                      FLAG_SIMILARITY, n4 // 4)
    payload = np.ascontiguousarray(table, dtype="<f4")
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())
    os.replace(tmp, path)


def export_matrix(net, bundle: Bundle, variant: int, path: str,
                  combine: str = "sum") -> np.ndarray:
    """Evaluate the bundle and write the scores as a CMAT file."""
    table = evaluate_table(net, bundle, variant, combine)
    write_cmat(table, variant, path)
    return table
