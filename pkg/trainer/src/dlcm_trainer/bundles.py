"""Reading tile bundle directories and their ground-truth structure.

A bundle directory holds ``manifest.json`` plus one RGB PNG per tile; tiles
are indexed ``0..n-1`` and edges ``4 * tile + side`` with sides L=0, R=1,
T=2, B=3. Rotations are counterclockwise quarter-turns.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
from PIL import Image

SIDE_L, SIDE_R, SIDE_T, SIDE_B = 0, 1, 2, 3
OPPOSITE = (SIDE_R, SIDE_L, SIDE_B, SIDE_T)
DIRECTION_VECS = ((0, -1), (0, 1), (-1, 0), (1, 0))  # L, R, T, B

# Side facing grid direction d after rotating a tile by k ccw quarter-turns.
_CW_CYCLE = (SIDE_R, SIDE_B, SIDE_L, SIDE_T)
_CW_IDX = {s: i for i, s in enumerate(_CW_CYCLE)}
SIDE_FACING = tuple(
    tuple(_CW_CYCLE[(_CW_IDX[d] + k) % 4] for d in range(4)) for k in range(4)
)
# Rotation that makes side s face grid direction d.
ROTATION_TO_FACE = tuple(
    tuple((_CW_IDX[s] - _CW_IDX[d]) % 4 for d in range(4)) for s in range(4)
)


def rotate(pixels: np.ndarray, k: int) -> np.ndarray:
    k %= 4
    return pixels if k == 0 else np.rot90(pixels, k)


@dataclass
class Bundle:
    name: str
    tiles: list[np.ndarray]          # (px, px, 3) uint8 each
    rows: Optional[int]
    cols: Optional[int]
    ground_truth: Optional[list[tuple[int, int, int, int]]]  # (tile, row, col, rot)

    @property
    def n_tiles(self) -> int:
        return len(self.tiles)

    @property
    def tile_px(self) -> int:
        return self.tiles[0].shape[0]

    def adjacencies(self) -> list[tuple[int, int, int]]:
        """Ground-truth neighbour pairs as (tile_a, tile_b, direction a->b),
        one per undirected adjacency, direction in {R, B}."""
        if self.ground_truth is None:
            raise ValueError(f"{self.name}: bundle has no ground truth")
        grid = {(r, c): (t, k) for t, r, c, k in self.ground_truth}
        out = []
        for (r, c), (t, _) in sorted(grid.items()):
            for d in (SIDE_R, SIDE_B):
                dr, dc = DIRECTION_VECS[d]
                other = grid.get((r + dr, c + dc))
                if other is not None:
                    out.append((t, other[0], d))
        return out

    def contacts(self) -> set[tuple[int, int]]:
        """Directed set of abutting edge-index pairs in the ground truth."""
        rot = {t: k for t, _, _, k in self.ground_truth}
        pairs = set()
        for a, b, d in self.adjacencies():
            e_a = 4 * a + SIDE_FACING[rot[a]][d]
            e_b = 4 * b + SIDE_FACING[rot[b]][OPPOSITE[d]]
            pairs.add((e_a, e_b))
            pairs.add((e_b, e_a))
        return pairs


def load_bundle(path: str) -> Bundle:
    manifest_path = os.path.join(path, "manifest.json")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if manifest.get("version") != 1:
        raise ValueError(f"{path}: unsupported manifest version")
    tiles = []
    for entry in sorted(manifest["tiles"], key=lambda e: e["id"]):
        img = Image.open(os.path.join(path, entry["file"])).convert("RGB")
        tiles.append(np.asarray(img))
    gt = manifest.get("ground_truth")
    placements = None if gt is None else [
        (p["tile"], p["row"], p["col"], p["rot"]) for p in gt
    ]
    return Bundle(os.path.basename(path.rstrip("/")), tiles,
                  manifest.get("rows"), manifest.get("cols"), placements)


def load_corpus(paths: list[str]) -> list[Bundle]:
    return [load_bundle(p) for p in paths]


def oriented_pair_input(anchor_px: np.ndarray, anchor_side: int,
                        cand_px: np.ndarray, cand_side: int) -> np.ndarray:
    """Concatenate two tiles into the canonical anchor-left network input.

    The anchor is rotated so its named edge faces right, the candidate so its
    named edge faces left; the result is (px, 2*px, 3) float32 in [0, 1].
    """
    a = rotate(anchor_px, ROTATION_TO_FACE[anchor_side][SIDE_R])
    c = rotate(cand_px, ROTATION_TO_FACE[cand_side][SIDE_L])
    return np.concatenate([a, c], axis=1).astype(np.float32) / 255.0


def admissible_pairs(n_tiles: int, variant: int) -> list[tuple[int, int]]:
    """Ordered edge pairs a matrix defines for the variant (1 or 2)."""
    out = []
    for e_i in range(4 * n_tiles):
        for e_j in range(4 * n_tiles):
            if e_i // 4 == e_j // 4:
                continue
            if variant == 1 and e_j % 4 != OPPOSITE[e_i % 4]:
                continue
            out.append((e_i, e_j))
    return out
