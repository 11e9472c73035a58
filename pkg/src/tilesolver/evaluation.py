"""Measurement apparatus: rank histograms, reconstruction accuracy, best buddies.

All metrics are defined against a bundle's ground truth. Edge ranks use the
pessimistic tie rule: candidates with equal score share the worst rank of
their tie group, so an uninformative constant matrix scores rank-1 of zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .compat import CompatibilityMatrix, admissible_mask
from .geometry import DIRECTION_VECS, OPPOSITE, SIDE_FACING, Side
from .model import Placement, PuzzleBundle, Variant


def ground_truth_adjacencies(bundle: PuzzleBundle) -> list[tuple[Placement, Placement, Side]]:
    """All ground-truth neighbour pairs as (left/top placement, other, direction)."""
    if bundle.ground_truth is None:
        raise ValueError("bundle has no ground truth")
    grid = {(p.row, p.col): p for p in bundle.ground_truth}
    out = []
    for (r, c), p in sorted(grid.items()):
        for d in (Side.RIGHT, Side.BOTTOM):
            dr, dc = DIRECTION_VECS[d]
            q = grid.get((r + dr, c + dc))
            if q is not None:
                out.append((p, q, d))
    return out


def contact_edges(rot_a: int, rot_b: int, direction: Side) -> tuple[Side, Side]:
    """Original-frame sides that meet when b sits in `direction` from a."""
    side_a = SIDE_FACING[rot_a % 4][direction]
    side_b = SIDE_FACING[rot_b % 4][OPPOSITE[direction]]
    return side_a, side_b


def ground_truth_contacts(bundle: PuzzleBundle) -> set[tuple[int, int]]:
    """Directed set of abutting edge-index pairs in the ground truth."""
    contacts = set()
    for a, b, d in ground_truth_adjacencies(bundle):
        sa, sb = contact_edges(a.rot, b.rot, d)
        e_a = 4 * a.tile + int(sa)
        e_b = 4 * b.tile + int(sb)
        contacts.add((e_a, e_b))
        contacts.add((e_b, e_a))
    return contacts


def oracle_matrix(bundle: PuzzleBundle, variant: Variant) -> CompatibilityMatrix:
    """The ideal measure: 1.0 on ground-truth abutments, 0.0 elsewhere."""
    if bundle.ground_truth is None:
        raise ValueError("oracle matrix requires ground truth")
    if variant == Variant.TYPE1 and any(p.rot for p in bundle.ground_truth):
        raise ValueError("TYPE1 oracle requires unrotated ground truth")
    n = bundle.n_tiles
    mask = admissible_mask(n, variant)
    scores = np.where(mask, 0.0, np.nan).astype(np.float32)
    for e_a, e_b in ground_truth_contacts(bundle):
        if not mask[e_a, e_b]:
            raise ValueError("ground-truth contact outside the admissible entry set")
        scores[e_a, e_b] = 1.0
    return CompatibilityMatrix(n, variant, scores,
                               similarity=True, normalized=True, symmetric=True)


@dataclass
class RankHistogram:
    """Counts of ground-truth neighbours found at each sorted rank (1-based)."""

    counts: np.ndarray
    total: int

    def fractions(self) -> np.ndarray:
        return self.counts / self.total

    def percentages(self) -> np.ndarray:
        return 100.0 * self.counts / self.total

    def rank_percent(self, alpha: int) -> float:
        if not 1 <= alpha <= len(self.counts):
            return 0.0
        return float(100.0 * self.counts[alpha - 1] / self.total)


def rank_histogram(matrix: CompatibilityMatrix, bundle: PuzzleBundle) -> RankHistogram:
    """Rank of every true neighbour in its anchor's sorted candidate list."""
    if not matrix.similarity:
        raise ValueError("rank evaluation requires similarity semantics")
    if matrix.n_tiles != bundle.n_tiles:
        raise ValueError("matrix and bundle tile counts differ")
    scores = matrix.scores
    finite = np.isfinite(scores)
    per_anchor = int(finite[0].sum())
    counts = np.zeros(per_anchor, dtype=np.int64)
    total = 0
    for a, b, d in ground_truth_adjacencies(bundle):
        sa, sb = contact_edges(a.rot, b.rot, d)
        e_a = 4 * a.tile + int(sa)
        e_b = 4 * b.tile + int(sb)
        for anchor, true in ((e_a, e_b), (e_b, e_a)):
            row = scores[anchor]
            ok = finite[anchor]
            s_true = row[true]
            if not np.isfinite(s_true):
                raise ValueError("true neighbour entry undefined; variant mismatch?")
            rank = int((row[ok] >= s_true).sum())  # pessimistic tie rank
            counts[rank - 1] += 1
            total += 1
    if total == 0:
        raise ValueError("bundle has no ground-truth adjacencies")
    return RankHistogram(counts, total)


@dataclass
class AccuracyReport:
    neighbor_accuracy: float
    perfect: bool
    numerator: int
    denominator: int
    variant: Optional[Variant] = None
    dims_known: Optional[bool] = None


def neighbor_accuracy(placements: Sequence[Placement], bundle: PuzzleBundle,
                      variant: Optional[Variant] = None,
                      dims_known: Optional[bool] = None) -> AccuracyReport:
    """Fraction of ground-truth neighbour pairs realized in a solution.

    A pair counts when the two tiles abut along the same original edges as in
    the ground truth (same relative direction and relative orientation); the
    count is invariant under translating or globally rotating the solution.
    """
    n = bundle.n_tiles
    if sorted(p.tile for p in placements) != list(range(n)):
        raise ValueError("solution must place every tile exactly once")
    cell = {p.tile: (p.row, p.col) for p in placements}
    rot = {p.tile: p.rot % 4 for p in placements}
    if len(set(cell.values())) != n:
        raise ValueError("solution places two tiles on one cell")

    adjacencies = ground_truth_adjacencies(bundle)
    hits = 0
    for a, b, d_gt in adjacencies:
        (ra, ca), (rb, cb) = cell[a.tile], cell[b.tile]
        dr, dc = rb - ra, cb - ca
        d_sol = None
        for d in Side:
            if DIRECTION_VECS[d] == (dr, dc):
                d_sol = d
                break
        if d_sol is None:
            continue
        if contact_edges(rot[a.tile], rot[b.tile], d_sol) == contact_edges(a.rot, b.rot, d_gt):
            hits += 1
    total = len(adjacencies)
    acc = hits / total if total else 1.0
    return AccuracyReport(acc, hits == total, hits, total, variant, dims_known)


def best_buddy_precision(matrix: CompatibilityMatrix,
                         bundle: PuzzleBundle) -> Optional[float]:
    """Fraction of mutual-top-rank edge pairs that are truly adjacent.

    An edge's top candidate exists only when its row maximum is unique
    (a tied maximum has no rank-1 candidate under the pessimistic tie rule).
    Returns None when no best-buddy pair exists.
    """
    scores = matrix.scores
    finite = np.isfinite(scores)
    n4 = scores.shape[0]
    top = np.full(n4, -1, dtype=np.int64)
    masked = np.where(finite, scores.astype(np.float64), -np.inf)
    arg = masked.argmax(axis=1)
    for i in range(n4):
        j = int(arg[i])
        if not finite[i].any():
            continue
        if (masked[i] == masked[i, j]).sum() == 1:
            top[i] = j
    pairs = [(i, int(top[i])) for i in range(n4)
             if top[i] >= 0 and i < top[i] and top[int(top[i])] == i]
    if not pairs:
        return None
    contacts = ground_truth_contacts(bundle)
    correct = sum(1 for p in pairs if p in contacts)
    return correct / len(pairs)
