"""Tiles, puzzle bundles and dataset tooling (cutting, scrambling, augmentation, I/O).

A bundle is a set of equally sized square RGB tiles plus optional grid
dimensions and an optional ground-truth placement. On disk it is a directory
holding ``manifest.json`` and one PNG per tile.
"""

from __future__ import annotations

import json
import os
import shutil
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple, Optional, Sequence

import numpy as np
from PIL import Image

from .geometry import (
    Side,
    anchor_rotation,
    candidate_rotation,
    rotate_pixels,
)

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


class Variant(IntEnum):
    """Puzzle variant: TYPE1 = known tile orientation, TYPE2 = unknown orientation."""

    TYPE1 = 1
    TYPE2 = 2


class EdgeRef(NamedTuple):
    tile: int
    side: Side


class Placement(NamedTuple):
    tile: int
    row: int
    col: int
    rot: int


@dataclass(frozen=True, eq=False)
class Tile:
    """A square RGB tile; ``pixels`` is (H, W, 3) uint8 and treated as immutable."""

    id: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError("tile pixels must be an HxWx3 array")
        if self.pixels.shape[0] == 0 or self.pixels.shape[1] == 0:
            raise ValueError("tile pixels must be non-empty")
        self.pixels.flags.writeable = False


@dataclass
class PuzzleBundle:
    """Tiles plus optional dimensions and ground truth."""

    tiles: list[Tile]
    rows: Optional[int] = None
    cols: Optional[int] = None
    ground_truth: Optional[list[Placement]] = None
    provenance: str = ""

    def __post_init__(self):
        n = len(self.tiles)
        if n == 0:
            raise ValueError("bundle must contain at least one tile")
        if [t.id for t in self.tiles] != list(range(n)):
            raise ValueError("tile ids must be contiguous from 0 in listing order")
        shapes = {t.pixels.shape for t in self.tiles}
        if len(shapes) != 1:
            raise ValueError("all tiles in a bundle must share identical dimensions")
        h, w, _ = self.tiles[0].pixels.shape
        if h != w:
            raise ValueError("tiles must be square")
        if (self.rows is None) != (self.cols is None):
            raise ValueError("rows and cols must be given together")
        if self.rows is not None:
            if self.rows < 1 or self.cols < 1:
                raise ValueError("rows and cols must be positive")
            if self.rows * self.cols != n:
                raise ValueError("rows * cols must equal the number of tiles")
        if self.ground_truth is not None:
            self._check_ground_truth()

    def _check_ground_truth(self):
        n = len(self.tiles)
        gt = self.ground_truth
        if self.rows is None:
            raise ValueError("ground truth requires known rows/cols")
        if sorted(p.tile for p in gt) != list(range(n)):
            raise ValueError("ground truth must place every tile exactly once")
        cells = {(p.row, p.col) for p in gt}
        if len(cells) != n:
            raise ValueError("ground truth cells must be distinct")
        for p in gt:
            if not (0 <= p.row < self.rows and 0 <= p.col < self.cols):
                raise ValueError("ground truth cell outside the rows x cols rectangle")
            if p.rot not in (0, 1, 2, 3):
                raise ValueError("ground truth rotation must be in 0..3")

    @property
    def n_tiles(self) -> int:
        return len(self.tiles)

    @property
    def tile_px(self) -> int:
        return self.tiles[0].pixels.shape[0]

    def gt_placement(self, tile: int) -> Placement:
        if self.ground_truth is None:
            raise ValueError("bundle has no ground truth")
        for p in self.ground_truth:
            if p.tile == tile:
                return p
        raise KeyError(tile)


# ---------------------------------------------------------------------------
# Cutting and synthesis
# ---------------------------------------------------------------------------

def _grid_edges(total: int, parts: int) -> list[int]:
    # Rounding cumulative fractional widths avoids dropping pixel rows when
    # the image dimension is not divisible by the grid.
    return [int(round(i * total / parts)) for i in range(parts + 1)]


def cut_image(image: np.ndarray, rows: int, cols: int, out_tile_px: int = 50,
              provenance: str = "") -> PuzzleBundle:
    """Cut an RGB image into a rows x cols bundle of square tiles.

    Each grid cell is resampled (bilinear) to ``out_tile_px`` square; cells
    that already have the target size are copied verbatim. Ground truth
    records the source grid position of every tile with rotation 0.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError("image must be an HxWx3 array")
    h, w, _ = image.shape
    if h == 0 or w == 0:
        raise ValueError("image has zero area")
    if rows > h or cols > w:
        raise ValueError("rows/cols exceed the image pixel dimensions")
    if out_tile_px < 1:
        raise ValueError("out_tile_px must be >= 1")

    r_edges = _grid_edges(h, rows)
    c_edges = _grid_edges(w, cols)
    tiles = []
    gt = []
    for r in range(rows):
        for c in range(cols):
            cell = image[r_edges[r]:r_edges[r + 1], c_edges[c]:c_edges[c + 1]]
            if cell.shape[0] != out_tile_px or cell.shape[1] != out_tile_px:
                im = Image.fromarray(np.ascontiguousarray(cell))
                cell = np.asarray(im.resize((out_tile_px, out_tile_px), Image.BILINEAR))
            tid = r * cols + c
            tiles.append(Tile(tid, cell.copy()))
            gt.append(Placement(tid, r, c, 0))
    return PuzzleBundle(tiles, rows, cols, gt, provenance)


def _value_noise(rng: np.random.Generator, h: int, w: int, cells: int) -> np.ndarray:
    """Smooth random field in [0, 1): a coarse random grid upsampled bilinearly."""
    coarse = rng.random((cells + 1, cells + 1, 3))
    im = Image.fromarray((coarse * 255).astype(np.uint8))
    return np.asarray(im.resize((w, h), Image.BILINEAR)).astype(np.float64) / 255.0


def synth_image(style: str, height: int, width: int, seed: int) -> np.ndarray:
    """Synthesize a deterministic RGB test image.

    ``noise``    - independent uniform pixels.
    ``gradient`` - a photo-like smooth color field: bilinear blend of random
                   corner colors plus two octaves of smooth value noise.
    """
    rng = np.random.default_rng(seed)
    if style == "noise":
        return rng.integers(0, 256, (height, width, 3), dtype=np.uint8)
    if style == "gradient":
        corners = rng.random((2, 2, 3))
        im = Image.fromarray((corners * 255).astype(np.uint8))
        base = np.asarray(im.resize((width, height), Image.BILINEAR)).astype(np.float64) / 255.0
        field = 0.55 * base
        field += 0.30 * _value_noise(rng, height, width, 6)
        field += 0.15 * _value_noise(rng, height, width, 13)
        return np.clip(field * 255.0, 0, 255).astype(np.uint8)
    raise ValueError(f"unknown style: {style!r}")


def generate_bundle(rows: int, cols: int, style: str, seed: int, tile_px: int = 50,
                    photo: Optional[np.ndarray] = None) -> PuzzleBundle:
    """Build a bundle from a synthetic image (or a supplied photo array)."""
    if style == "photo":
        if photo is None:
            raise ValueError("style 'photo' requires an image")
        im = Image.fromarray(photo).resize((cols * tile_px, rows * tile_px), Image.BILINEAR)
        image = np.asarray(im)
        prov = f"photo rows={rows} cols={cols}"
    else:
        image = synth_image(style, rows * tile_px, cols * tile_px, seed)
        prov = f"synthetic style={style} seed={seed}"
    return cut_image(image, rows, cols, tile_px, provenance=prov)


# ---------------------------------------------------------------------------
# Scrambling and augmentation
# ---------------------------------------------------------------------------

def scramble(bundle: PuzzleBundle, variant: Variant, seed: int) -> PuzzleBundle:
    """Permute tile order (and rotate tiles for TYPE2); ground truth follows.

    Solving the scrambled bundle against its updated ground truth is
    equivalent to solving the original. Deterministic for a fixed seed.
    """
    if bundle.ground_truth is None:
        raise ValueError("scramble requires a bundle with ground truth")
    rng = np.random.default_rng(seed)
    n = bundle.n_tiles
    perm = rng.permutation(n)
    if variant == Variant.TYPE2:
        spins = rng.integers(0, 4, n)
    else:
        spins = np.zeros(n, dtype=int)

    tiles = []
    gt = []
    for new_id in range(n):
        old = bundle.tiles[int(perm[new_id])]
        k = int(spins[new_id])
        pixels = np.ascontiguousarray(rotate_pixels(old.pixels, k))
        tiles.append(Tile(new_id, pixels))
        p = bundle.gt_placement(old.id)
        gt.append(Placement(new_id, p.row, p.col, (p.rot - k) % 4))
    return PuzzleBundle(tiles, bundle.rows, bundle.cols, gt,
                        provenance=f"{bundle.provenance} | scrambled type{int(variant)} seed={seed}")


def degrade(tile: Tile, frame_width: int) -> Tile:
    """Zero the outermost ``frame_width`` pixel frame of the tile (0, 1 or 2)."""
    if frame_width not in (0, 1, 2):
        raise ValueError("frame_width must be 0, 1 or 2")
    if frame_width == 0:
        return tile
    px = tile.pixels.copy()
    f = frame_width
    px[:f, :, :] = 0
    px[-f:, :, :] = 0
    px[:, :f, :] = 0
    px[:, -f:, :] = 0
    return Tile(tile.id, px)


def shift(tile: Tile, dx: int, dy: int) -> Tile:
    """Translate pixel content by (dx, dy), zero-filling vacated rows/columns.

    Positive dx moves content right, positive dy moves it down; both are
    limited to two pixels.
    """
    if abs(dx) > 2 or abs(dy) > 2:
        raise ValueError("dx and dy must be within [-2, 2]")
    h, w, _ = tile.pixels.shape
    out = np.zeros_like(tile.pixels)
    src_r = slice(max(0, -dy), h - max(0, dy))
    src_c = slice(max(0, -dx), w - max(0, dx))
    dst_r = slice(max(0, dy), h - max(0, -dy))
    dst_c = slice(max(0, dx), w - max(0, -dx))
    out[dst_r, dst_c] = tile.pixels[src_r, src_c]
    return Tile(tile.id, out)


def oriented_pair(anchor: EdgeRef, candidate: EdgeRef,
                  bundle: PuzzleBundle) -> tuple[np.ndarray, np.ndarray]:
    """Rotate both tiles into the canonical anchor-left-of-candidate abutment.

    The anchor tile is rotated so its named edge faces right, the candidate so
    its named edge faces left; every compatibility measure scores pairs in
    this orientation.
    """
    if anchor.tile == candidate.tile:
        raise ValueError("anchor and candidate must be distinct tiles")
    a = bundle.tiles[anchor.tile].pixels
    c = bundle.tiles[candidate.tile].pixels
    return (rotate_pixels(a, anchor_rotation(anchor.side)),
            rotate_pixels(c, candidate_rotation(candidate.side)))


def reassemble(bundle: PuzzleBundle, placements: Optional[Sequence[Placement]] = None) -> np.ndarray:
    """Raster a placement list (default: ground truth) into a single image."""
    if placements is None:
        if bundle.ground_truth is None:
            raise ValueError("bundle has no ground truth to reassemble")
        placements = bundle.ground_truth
    rows = [p.row for p in placements]
    cols = [p.col for p in placements]
    r0, c0 = min(rows), min(cols)
    h = max(rows) - r0 + 1
    w = max(cols) - c0 + 1
    px = bundle.tile_px
    out = np.zeros((h * px, w * px, 3), dtype=np.uint8)
    for p in placements:
        img = rotate_pixels(bundle.tiles[p.tile].pixels, p.rot)
        r, c = p.row - r0, p.col - c0
        out[r * px:(r + 1) * px, c * px:(c + 1) * px] = img
    return out


# ---------------------------------------------------------------------------
# Bundle directory I/O
# ---------------------------------------------------------------------------

def save_bundle(bundle: PuzzleBundle, path: str) -> None:
    """Write a bundle directory (manifest.json + one PNG per tile) atomically."""
    tmp = f"{path}.tmp{os.getpid()}"
    if os.path.exists(tmp):
        shutil.rmtree(tmp)
    os.makedirs(tmp)
    tiles_meta = []
    for t in bundle.tiles:
        fname = f"tile_{t.id:04d}.png"
        Image.fromarray(np.asarray(t.pixels)).save(os.path.join(tmp, fname))
        tiles_meta.append({"id": t.id, "file": fname})
    manifest = {
        "version": MANIFEST_VERSION,
        "rows": bundle.rows,
        "cols": bundle.cols,
        "tile_px": bundle.tile_px,
        "tiles": tiles_meta,
        "ground_truth": None if bundle.ground_truth is None else [
            {"tile": p.tile, "row": p.row, "col": p.col, "rot": p.rot}
            for p in bundle.ground_truth
        ],
        "provenance": bundle.provenance,
    }
    with open(os.path.join(tmp, MANIFEST_NAME), "w") as fh:
        json.dump(manifest, fh, indent=2)
    if os.path.exists(path):
        shutil.rmtree(path)
    os.rename(tmp, path)


def load_bundle(path: str) -> PuzzleBundle:
    """Read a bundle directory written by :func:`save_bundle`."""
    manifest_path = os.path.join(path, MANIFEST_NAME)
    if not os.path.isfile(manifest_path):
        raise ValueError(f"not a bundle directory (missing {MANIFEST_NAME}): {path}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if manifest.get("version") != MANIFEST_VERSION:
        raise ValueError(f"unsupported bundle manifest version: {manifest.get('version')}")
    tiles = []
    for entry in sorted(manifest["tiles"], key=lambda e: e["id"]):
        img = Image.open(os.path.join(path, entry["file"])).convert("RGB")
        tiles.append(Tile(entry["id"], np.asarray(img)))
    gt = manifest.get("ground_truth")
    placements = None if gt is None else [
        Placement(p["tile"], p["row"], p["col"], p["rot"]) for p in gt
    ]
    return PuzzleBundle(tiles, manifest.get("rows"), manifest.get("cols"),
                        placements, manifest.get("provenance", ""))
