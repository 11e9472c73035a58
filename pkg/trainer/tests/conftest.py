import json
import os

import numpy as np
import pytest
from PIL import Image

from dlcm_trainer import load_bundle


def _value_noise(rng, h, w, cells):
    coarse = rng.random((cells + 1, cells + 1, 3))
    im = Image.fromarray((coarse * 255).astype(np.uint8))
    return np.asarray(im.resize((w, h), Image.BILINEAR)).astype(np.float64) / 255.0


def write_bundle(path, rows, cols, seed, tile_px=50, border_frame=1):
    """A smooth synthetic panel cut into tiles with worn (zeroed) borders.

    Writes the standard bundle directory format: manifest.json + one PNG per
    tile, identity ground truth.
    """
    rng = np.random.default_rng(seed)
    h, w = rows * tile_px, cols * tile_px
    img = (0.55 * _value_noise(rng, h, w, 5) + 0.45 * _value_noise(rng, h, w, 11)) * 255
    img = np.clip(img, 0, 255).astype(np.uint8)
    os.makedirs(path, exist_ok=True)
    tiles_meta, gt = [], []
    for t in range(rows * cols):
        r, c = divmod(t, cols)
        cell = img[r * tile_px:(r + 1) * tile_px, c * tile_px:(c + 1) * tile_px].copy()
        if border_frame:
            f = border_frame
            cell[:f] = 0
            cell[-f:] = 0
            cell[:, :f] = 0
            cell[:, -f:] = 0
        fname = f"tile_{t:04d}.png"
        Image.fromarray(cell).save(os.path.join(path, fname))
        tiles_meta.append({"id": t, "file": fname})
        gt.append({"tile": t, "row": r, "col": c, "rot": 0})
    manifest = {"version": 1, "rows": rows, "cols": cols, "tile_px": tile_px,
                "tiles": tiles_meta, "ground_truth": gt,
                "provenance": f"toy synthetic seed={seed}"}
    with open(os.path.join(path, "manifest.json"), "w") as fh:
        json.dump(manifest, fh)
    return path


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    paths = [write_bundle(str(root / f"b{i}"), 3, 3, seed=100 + i) for i in range(10)]
    return [load_bundle(p) for p in paths]
