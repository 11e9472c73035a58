"""Sides, rotations and the conventions tying pixel grids to grid directions.

Conventions used everywhere in this package:

- Pixel grids are ``(H, W, 3)`` arrays, row 0 at the top, column 0 on the left.
- A rotation is an integer number of quarter-turns in ``{0, 1, 2, 3}``,
  applied counterclockwise (``np.rot90`` with the same ``k``).
- Grid directions are named by the same four values as tile sides:
  RIGHT means "towards larger column", BOTTOM "towards larger row".
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

__all__ = [
    "Side",
    "OPPOSITE",
    "SIDE_FACING",
    "FACING_DIRECTION",
    "ROTATION_TO_FACE",
    "ROTATE_DIRECTION",
    "DIRECTION_VECS",
    "rotate_pixels",
    "anchor_rotation",
    "candidate_rotation",
]


class Side(IntEnum):
    """One of the four tile sides; the numeric order fixes edge indexing (4*tile + side)."""

    LEFT = 0
    RIGHT = 1
    TOP = 2
    BOTTOM = 3


# The side cycle traversed when a tile is rotated one quarter-turn
# counterclockwise: the side facing a fixed direction advances along it.
_CYCLE = (Side.RIGHT, Side.BOTTOM, Side.LEFT, Side.TOP)
_CYCLE_IDX = {s: i for i, s in enumerate(_CYCLE)}

OPPOSITE = {Side.LEFT: Side.RIGHT, Side.RIGHT: Side.LEFT,
            Side.TOP: Side.BOTTOM, Side.BOTTOM: Side.TOP}

# (drow, dcol) unit steps for each direction.
DIRECTION_VECS = {Side.LEFT: (0, -1), Side.RIGHT: (0, 1),
                  Side.TOP: (-1, 0), Side.BOTTOM: (1, 0)}


def _side_facing(direction: Side, rot: int) -> Side:
    return _CYCLE[(_CYCLE_IDX[direction] + rot) % 4]


def _facing_direction(side: Side, rot: int) -> Side:
    return _CYCLE[(_CYCLE_IDX[side] - rot) % 4]


def _rotate_direction(direction: Side, rot: int) -> Side:
    return _CYCLE[(_CYCLE_IDX[direction] - rot) % 4]


# SIDE_FACING[rot][d]: original-frame side of a tile that faces grid
# direction d once the tile has been rotated by `rot` quarter-turns.
SIDE_FACING = tuple(tuple(_side_facing(Side(d), k) for d in range(4)) for k in range(4))

# FACING_DIRECTION[rot][s]: grid direction that original side s faces after
# rotating the tile by `rot` quarter-turns (inverse of SIDE_FACING per rot).
FACING_DIRECTION = tuple(tuple(_facing_direction(Side(s), k) for s in range(4)) for k in range(4))

# ROTATION_TO_FACE[s][d]: the unique rotation that makes original side s face
# grid direction d.
ROTATION_TO_FACE = tuple(
    tuple((_CYCLE_IDX[Side(s)] - _CYCLE_IDX[Side(d)]) % 4 for d in range(4)) for s in range(4)
)

# ROTATE_DIRECTION[rot][d]: direction d after the whole frame is rotated by
# `rot` counterclockwise quarter-turns (a neighbour seen to the RIGHT is seen
# on TOP after one quarter-turn).
ROTATE_DIRECTION = tuple(tuple(_rotate_direction(Side(d), k) for d in range(4)) for k in range(4))


def rotate_pixels(pixels: np.ndarray, rot: int) -> np.ndarray:
    """Rotate a pixel grid counterclockwise by ``rot`` quarter-turns."""
    rot %= 4
    if rot == 0:
        return pixels
    return np.rot90(pixels, rot)


def anchor_rotation(side: Side) -> int:
    """Rotation that makes ``side`` face RIGHT (anchor role in an oriented pair)."""
    return ROTATION_TO_FACE[side][Side.RIGHT]


def candidate_rotation(side: Side) -> int:
    """Rotation that makes ``side`` face LEFT (candidate role in an oriented pair)."""
    return ROTATION_TO_FACE[side][Side.LEFT]


def edge_index(tile: int, side: Side | int) -> int:
    """Flat edge index used by compatibility matrices: 4*tile + side."""
    return 4 * tile + int(side)
