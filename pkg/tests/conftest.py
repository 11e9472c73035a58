import numpy as np

from tilesolver import PuzzleBundle, Tile, Placement, Variant
from tilesolver.compat import CompatibilityMatrix, admissible_mask


def make_bundle(rows, cols, seed=0, tile_px=8, constant=None):
    """A small bundle with ground truth; random pixels unless constant given."""
    rng = np.random.default_rng(seed)
    n = rows * cols
    tiles = []
    gt = []
    for t in range(n):
        if constant is None:
            px = rng.integers(0, 256, (tile_px, tile_px, 3), dtype=np.uint8)
        else:
            px = np.full((tile_px, tile_px, 3), constant, dtype=np.uint8)
        tiles.append(Tile(t, px))
        gt.append(Placement(t, t // cols, t % cols, 0))
    return PuzzleBundle(tiles, rows, cols, gt)


def random_matrix(n, variant, rng, similarity=False, normalized=False,
                  symmetric=False, lattice=None):
    """Random matrix with values at admissible entries (optionally on a lattice)."""
    mask = admissible_mask(n, variant)
    if lattice:
        vals = rng.integers(0, lattice + 1, mask.shape).astype(np.float64) / lattice
    else:
        vals = rng.random(mask.shape)
    scores = np.where(mask, vals, np.nan).astype(np.float32)
    return CompatibilityMatrix(n, variant, scores, similarity=similarity,
                               normalized=normalized, symmetric=symmetric)


def canonical_form(chrom, variant):
    """Translation- (and for TYPE2, rotation-) independent form of a chromosome."""
    placements = [(t, int(chrom.pos_r[t]), int(chrom.pos_c[t]), int(chrom.rot[t]))
                  for t in range(chrom.n_tiles)]
    rotations = (0, 1, 2, 3) if variant == Variant.TYPE2 else (0,)
    forms = []
    for g in rotations:
        pts = []
        for t, r, c, k in placements:
            rr, cc = r, c
            for _ in range(g):
                rr, cc = -cc, rr  # one counterclockwise quarter-turn of the plane
            pts.append((t, rr, cc, (k + g) % 4))
        r0 = min(p[1] for p in pts)
        c0 = min(p[2] for p in pts)
        forms.append(tuple(sorted((t, r - r0, c - c0, k) for t, r, c, k in pts)))
    return min(forms)
