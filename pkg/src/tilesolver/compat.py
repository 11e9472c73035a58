"""Edge compatibility: SSD/MGC measures, score post-processing, CMAT files.

A compatibility matrix is a dense (4n, 4n) float32 table over ordered edge
pairs, indexed by ``4 * tile + side`` (L=0, R=1, T=2, B=3). Entry (i, j) is
the score of the canonical abutment in which edge i faces right and edge j
faces left. Undefined entries (same tile; non-complementary sides for
TYPE1 matrices) hold NaN.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .geometry import OPPOSITE, Side, anchor_rotation, candidate_rotation, rotate_pixels
from .model import EdgeRef, PuzzleBundle, Variant, oriented_pair

CMAT_MAGIC = b"CMAT"
CMAT_VERSION = 1

_FLAG_SIMILARITY = 1
_FLAG_NORMALIZED = 2
_FLAG_SYMMETRIC = 4


class MatrixFormatError(ValueError):
    """Base class for malformed CMAT files."""


class BadMagicError(MatrixFormatError):
    pass


class VersionMismatchError(MatrixFormatError):
    pass


class TruncatedFileError(MatrixFormatError):
    pass


class NonFiniteScoreError(MatrixFormatError):
    pass


class MeasureKind(Enum):
    SSD = "ssd"
    MGC = "mgc"
    EXTERNAL = "external"


def admissible_mask(n_tiles: int, variant: Variant) -> np.ndarray:
    """Boolean (4n, 4n) mask of defined entries for the given variant."""
    n4 = 4 * n_tiles
    tiles = np.arange(n4) // 4
    cross = tiles[:, None] != tiles[None, :]
    if variant == Variant.TYPE2:
        return cross
    sides = np.arange(n4) % 4
    opposite = np.array([int(OPPOSITE[Side(s)]) for s in range(4)])
    complementary = opposite[sides][:, None] == sides[None, :]
    return cross & complementary


@dataclass
class CompatibilityMatrix:
    """Dense edge-pair score table plus its interpretation flags."""

    n_tiles: int
    variant: Variant
    scores: np.ndarray  # (4n, 4n) float32, NaN where undefined
    similarity: bool = False
    normalized: bool = False
    symmetric: bool = False

    def __post_init__(self):
        n4 = 4 * self.n_tiles
        if self.scores.shape != (n4, n4):
            raise ValueError(f"scores must be ({n4}, {n4})")
        if self.scores.dtype != np.float32:
            raise ValueError("scores must be float32")

    @property
    def mask(self) -> np.ndarray:
        return admissible_mask(self.n_tiles, self.variant)

    def score(self, anchor: EdgeRef, candidate: EdgeRef) -> float:
        return float(self.scores[4 * anchor.tile + int(anchor.side),
                                 4 * candidate.tile + int(candidate.side)])

    def defined_count(self) -> int:
        return int(np.isfinite(self.scores).sum())


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def ssd(pair: tuple[np.ndarray, np.ndarray]) -> float:
    """Sum of squared color differences across the abutting pixel columns."""
    g1, g2 = pair
    d = g1[:, -1, :].astype(np.int64) - g2[:, 0, :].astype(np.int64)
    return float(np.sum(d * d))


def _regularized_inverse(cov: np.ndarray) -> np.ndarray:
    # Trace-scaled ridge keeps the matrix invertible on flat tiles.
    eps = 1e-6 * max(float(np.trace(cov)) / 3.0, 1.0)
    return np.linalg.inv(cov + eps * np.eye(3))


def _gradient_stats(edge_col: np.ndarray, inner_col: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    grads = edge_col - inner_col
    mu = grads.mean(axis=0)
    centered = grads - mu
    denom = max(grads.shape[0] - 1, 1)
    cov = centered.T @ centered / denom
    return mu, _regularized_inverse(cov)


def _mgc_directed(edge_col: np.ndarray, inner_col: np.ndarray, other_col: np.ndarray) -> float:
    mu, prec = _gradient_stats(edge_col, inner_col)
    x = (other_col - edge_col) - mu
    return float(np.einsum("rc,cd,rd->", x, prec, x))


def mgc(pair: tuple[np.ndarray, np.ndarray]) -> float:
    """Two-sided Mahalanobis gradient cost for an oriented pair.

    Boundary color jumps are scored against each tile's own near-edge
    gradient statistics; the two directed costs are summed.
    """
    g1 = pair[0].astype(np.float64)
    g2 = pair[1].astype(np.float64)
    if g1.shape[1] < 2:
        inner1 = g1[:, -1, :]
        inner2 = g2[:, 0, :]
    else:
        inner1 = g1[:, -2, :]
        inner2 = g2[:, 1, :]
    left_to_right = _mgc_directed(g1[:, -1, :], inner1, g2[:, 0, :])
    right_to_left = _mgc_directed(g2[:, 0, :], inner2, g1[:, -1, :])
    return left_to_right + right_to_left


def _edge_columns(bundle: PuzzleBundle) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Boundary and inner pixel columns of every edge in both canonical roles.

    Returns (a_edge, a_inner, b_edge, b_inner), each (4n, tile_px, 3) float64:
    the `a` arrays view each edge rotated to face right (anchor role), the `b`
    arrays rotated to face left (candidate role).
    """
    n = bundle.n_tiles
    px = bundle.tile_px
    a_edge = np.empty((4 * n, px, 3))
    a_inner = np.empty((4 * n, px, 3))
    b_edge = np.empty((4 * n, px, 3))
    b_inner = np.empty((4 * n, px, 3))
    inner = -2 if px >= 2 else -1
    for t in bundle.tiles:
        for side in Side:
            e = 4 * t.id + int(side)
            ga = rotate_pixels(t.pixels, anchor_rotation(side)).astype(np.float64)
            a_edge[e] = ga[:, -1, :]
            a_inner[e] = ga[:, inner, :]
            gb = rotate_pixels(t.pixels, candidate_rotation(side)).astype(np.float64)
            b_edge[e] = gb[:, 0, :]
            b_inner[e] = gb[:, -1 - inner, :]
    return a_edge, a_inner, b_edge, b_inner


def build_matrix(bundle: PuzzleBundle, kind: MeasureKind, variant: Variant) -> CompatibilityMatrix:
    """Evaluate a measure on every admissible ordered edge pair of the bundle."""
    if bundle.n_tiles < 2:
        raise ValueError("compatibility requires at least two tiles")
    if kind == MeasureKind.SSD:
        raw = _ssd_table(bundle)
    elif kind == MeasureKind.MGC:
        raw = _mgc_table(bundle)
    else:
        raise ValueError("build_matrix computes SSD or MGC; external measures arrive as CMAT files")
    mask = admissible_mask(bundle.n_tiles, variant)
    scores = np.where(mask, raw, np.nan).astype(np.float32)
    return CompatibilityMatrix(bundle.n_tiles, variant, scores)


def _ssd_table(bundle: PuzzleBundle) -> np.ndarray:
    a_edge, _, b_edge, _ = _edge_columns(bundle)
    a = a_edge.reshape(len(a_edge), -1)
    b = b_edge.reshape(len(b_edge), -1)
    # Integer-valued float64 arithmetic: the expansion is exact.
    sq_a = np.einsum("ik,ik->i", a, a)
    sq_b = np.einsum("ik,ik->i", b, b)
    return sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)


def _mgc_table(bundle: PuzzleBundle) -> np.ndarray:
    a_edge, a_inner, b_edge, b_inner = _edge_columns(bundle)
    n4 = len(a_edge)
    mu_a = np.empty((n4, 3))
    prec_a = np.empty((n4, 3, 3))
    mu_b = np.empty((n4, 3))
    prec_b = np.empty((n4, 3, 3))
    for e in range(n4):
        mu_a[e], prec_a[e] = _gradient_stats(a_edge[e], a_inner[e])
        mu_b[e], prec_b[e] = _gradient_stats(b_edge[e], b_inner[e])

    out = np.empty((n4, n4))
    for i in range(n4):
        x = (b_edge - a_edge[i]) - mu_a[i]
        out[i] = np.einsum("jrc,cd,jrd->j", x, prec_a[i], x)
    for j in range(n4):
        y = (a_edge - b_edge[j]) - mu_b[j]
        out[:, j] += np.einsum("irc,cd,ird->i", y, prec_b[j], y)
    return out


def pair_measure(bundle: PuzzleBundle, kind: MeasureKind,
                 anchor: EdgeRef, candidate: EdgeRef) -> float:
    """Evaluate one measure on one oriented pair (reference path for the tables)."""
    pair = oriented_pair(anchor, candidate, bundle)
    return ssd(pair) if kind == MeasureKind.SSD else mgc(pair)


# ---------------------------------------------------------------------------
# Post-processing
# ---------------------------------------------------------------------------

def to_similarity(matrix: CompatibilityMatrix) -> CompatibilityMatrix:
    """Negate dissimilarities so that larger means more compatible."""
    if matrix.similarity:
        raise ValueError("matrix already has similarity semantics")
    return replace(matrix, scores=-matrix.scores, similarity=True)


def normalize_minmax(matrix: CompatibilityMatrix) -> CompatibilityMatrix:
    """Per-anchor min-max normalization to [0, 1]; tied anchors collapse to 0."""
    if not matrix.similarity:
        raise ValueError("normalize_minmax requires similarity semantics")
    scores = matrix.scores.astype(np.float64)
    out = np.full_like(scores, np.nan)
    defined = np.isfinite(scores)
    for i in range(scores.shape[0]):
        row_mask = defined[i]
        if not row_mask.any():
            continue
        row = scores[i, row_mask]
        lo, hi = row.min(), row.max()
        if hi == lo:
            out[i, row_mask] = 0.0
        else:
            out[i, row_mask] = (row - lo) / (hi - lo)
    return replace(matrix, scores=out.astype(np.float32), normalized=True, symmetric=False)


def symmetrize(matrix: CompatibilityMatrix) -> CompatibilityMatrix:
    """Average each entry with its transpose; the result is exactly symmetric."""
    if not matrix.normalized:
        raise ValueError("symmetrize requires a normalized matrix")
    scores = matrix.scores.astype(np.float64)
    sym = (scores + scores.T) / 2.0
    return replace(matrix, scores=sym.astype(np.float32), symmetric=True)


def postprocess(matrix: CompatibilityMatrix, level: str = "symmetric") -> CompatibilityMatrix:
    """Bring a matrix to the requested pipeline stage: raw | normalized | symmetric."""
    if level == "raw":
        return matrix
    if level not in ("normalized", "symmetric"):
        raise ValueError(f"unknown post-processing level: {level!r}")
    m = matrix
    if not m.similarity:
        m = to_similarity(m)
    if not m.normalized:
        m = normalize_minmax(m)
    if level == "symmetric" and not m.symmetric:
        m = symmetrize(m)
    return m


# ---------------------------------------------------------------------------
# CMAT files
# ---------------------------------------------------------------------------

def save_matrix(matrix: CompatibilityMatrix, path: str) -> None:
    """Write a CMAT file (little-endian, float32 payload) atomically."""
    flags = 0
    if matrix.similarity:
        flags |= _FLAG_SIMILARITY
    if matrix.normalized:
        flags |= _FLAG_NORMALIZED
    if matrix.symmetric:
        flags |= _FLAG_SYMMETRIC
    header = CMAT_MAGIC + struct.pack("<HBBI", CMAT_VERSION, int(matrix.variant),
                                      flags, matrix.n_tiles)
    payload = np.where(matrix.mask, matrix.scores, np.float32(np.nan))
    payload = np.ascontiguousarray(payload, dtype="<f4")
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())
    os.replace(tmp, path)


def load_matrix(path: str) -> CompatibilityMatrix:
    """Read a CMAT file, rejecting malformed input with a specific error."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 or data[:4] != CMAT_MAGIC:
        raise BadMagicError(f"{path}: not a CMAT file (bad magic)")
    if len(data) < 12:
        raise TruncatedFileError(f"{path}: truncated CMAT header")
    version, variant_byte, flags, n_tiles = struct.unpack("<HBBI", data[4:12])
    if version != CMAT_VERSION:
        raise VersionMismatchError(f"{path}: unsupported CMAT version {version}")
    if variant_byte not in (1, 2):
        raise MatrixFormatError(f"{path}: invalid variant byte {variant_byte}")
    if flags & ~(_FLAG_SIMILARITY | _FLAG_NORMALIZED | _FLAG_SYMMETRIC):
        raise MatrixFormatError(f"{path}: unknown flag bits 0x{flags:02x}")
    if n_tiles < 1:
        raise MatrixFormatError(f"{path}: invalid tile count {n_tiles}")
    n4 = 4 * n_tiles
    expected = n4 * n4 * 4
    payload = data[12:]
    if len(payload) < expected:
        raise TruncatedFileError(
            f"{path}: payload holds {len(payload)} bytes, header declares {expected}")
    if len(payload) > expected:
        raise MatrixFormatError(f"{path}: {len(payload) - expected} trailing bytes")
    scores = np.frombuffer(payload, dtype="<f4").reshape(n4, n4).astype(np.float32)
    variant = Variant(variant_byte)
    mask = admissible_mask(n_tiles, variant)
    if not np.isfinite(scores[mask]).all():
        raise NonFiniteScoreError(f"{path}: non-finite score at a defined entry")
    scores = np.where(mask, scores, np.float32(np.nan))
    return CompatibilityMatrix(
        n_tiles, variant, scores,
        similarity=bool(flags & _FLAG_SIMILARITY),
        normalized=bool(flags & _FLAG_NORMALIZED),
        symmetric=bool(flags & _FLAG_SYMMETRIC),
    )
