"""Rank-1 evaluation of score tables and the SSD reference measure."""

from __future__ import annotations

import numpy as np

from .bundles import Bundle, admissible_pairs, oriented_pair_input


def rank1(table: np.ndarray, bundle: Bundle) -> float:
    """Fraction of ground-truth neighbours ranked first by a similarity table.

    Tied candidates share the worst rank of their group, so an uninformative
    constant table scores zero.
    """
    total = 0
    hits = 0
    for e_a, e_b in sorted(bundle.contacts()):
        row = table[e_a]
        finite = np.isfinite(row)
        s_true = row[e_b]
        if not np.isfinite(s_true):
            raise ValueError("true neighbour entry undefined in the table")
        rank = int((row[finite] >= s_true).sum())
        hits += rank == 1
        total += 1
    if total == 0:
        raise ValueError("bundle has no ground-truth adjacencies")
    return hits / total


def ssd_table(bundle: Bundle, variant: int) -> np.ndarray:
    """Similarity table of the negated sum-of-squared-differences baseline."""
    n4 = 4 * bundle.n_tiles
    table = np.full((n4, n4), np.nan, dtype=np.float32)
    for e_i, e_j in admissible_pairs(bundle.n_tiles, variant):
        pair = oriented_pair_input(bundle.tiles[e_i // 4], e_i % 4,
                                   bundle.tiles[e_j // 4], e_j % 4)
        d = pair[:, 49, :].astype(np.float64) - pair[:, 50, :].astype(np.float64)
        table[e_i, e_j] = -float((d * d).sum())
    return table


def pooled_rank1(tables: list[np.ndarray], bundles: list[Bundle]) -> float:
    """Rank-1 over the union of several bundles' ground-truth relations."""
    hits = 0
    total = 0
    for table, bundle in zip(tables, bundles):
        for e_a, e_b in sorted(bundle.contacts()):
            row = table[e_a]
            finite = np.isfinite(row)
            rank = int((row[finite] >= row[e_b]).sum())
            hits += rank == 1
            total += 1
    return hits / total if total else 0.0
