"""Kernel-growth genetic algorithm: chromosomes, six-phase crossover, GA loop.

A chromosome is a complete placement of all tiles on an integer grid (cells
may start negative during growth; stored positions are translated so the
bounding box starts at (0, 0)). The crossover grows a child kernel one tile
at a time through six phases tried in strict priority order; the phase
semantics and all hyper-parameter defaults follow the solver's published
configuration (population 100, 500 generations, roulette-wheel selection,
phase skip probabilities 10%/10%/20%).
"""

from __future__ import annotations

from bisect import bisect_left, insort
from heapq import heappop, heappush
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .compat import CompatibilityMatrix
from .geometry import (
    DIRECTION_VECS,
    OPPOSITE,
    ROTATE_DIRECTION,
    ROTATION_TO_FACE,
    SIDE_FACING,
    Side,
)
from .model import Placement, Variant

_SF = np.array(SIDE_FACING, dtype=np.int64)          # [rot][dir] -> side
_OPP = [int(OPPOSITE[Side(d)]) for d in range(4)]
_DR = [DIRECTION_VECS[Side(d)][0] for d in range(4)]
_DC = [DIRECTION_VECS[Side(d)][1] for d in range(4)]


@dataclass
class GaConfig:
    population_size: int = 100
    generations: int = 500
    skip_p1: float = 0.10
    skip_p2: float = 0.10
    skip_p3: float = 0.20
    score_threshold_floor: float = 0.8
    elite_count: int = 1
    runs: int = 10
    seed: int = 0

    def __post_init__(self):
        for p in (self.skip_p1, self.skip_p2, self.skip_p3):
            if not 0.0 <= p <= 1.0:
                raise ValueError("skip probabilities must be in [0, 1]")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must be in [0, population_size)")
        if self.generations < 0 or self.runs < 1:
            raise ValueError("generations must be >= 0 and runs >= 1")


class Chromosome:
    """A complete puzzle configuration plus caches used when it acts as a parent."""

    __slots__ = ("pos_r", "pos_c", "rot", "fitness", "boundary_count", "c_mean",
                 "piece_scores", "nb", "nb_rot", "rot_list", "ok", "any_ok")

    def __init__(self, pos_r: np.ndarray, pos_c: np.ndarray, rot: np.ndarray,
                 scores: np.ndarray, threshold_floor: float):
        pos_r = pos_r - pos_r.min()
        pos_c = pos_c - pos_c.min()
        self.pos_r = pos_r.astype(np.int32)
        self.pos_c = pos_c.astype(np.int32)
        self.rot = rot.astype(np.int8)
        self._score(scores, threshold_floor)

    def _score(self, scores: np.ndarray, floor: float) -> None:
        n = len(self.pos_r)
        h = int(self.pos_r.max()) + 1
        w = int(self.pos_c.max()) + 1
        grid = np.full((h, w), -1, dtype=np.int64)
        grid[self.pos_r, self.pos_c] = np.arange(n)
        rot = self.rot.astype(np.int64)

        nb = np.full((n, 4), -1, dtype=np.int64)
        nb_rot = np.zeros((n, 4), dtype=np.int64)
        tile_sum = np.zeros(n)
        tile_cnt = np.zeros(n, dtype=np.int64)
        total = 0.0
        pairs = 0
        for d, d_opp in ((int(Side.RIGHT), int(Side.LEFT)), (int(Side.BOTTOM), int(Side.TOP))):
            if d == Side.RIGHT:
                a, b = grid[:, :-1], grid[:, 1:]
            else:
                a, b = grid[:-1, :], grid[1:, :]
            m = (a >= 0) & (b >= 0)
            if not m.any():
                continue
            at, bt = a[m], b[m]
            a_edge = 4 * at + _SF[rot[at], d]
            b_edge = 4 * bt + _SF[rot[bt], d_opp]
            s = scores[a_edge, b_edge].astype(np.float64)
            total += float(s.sum())
            pairs += len(at)
            np.add.at(tile_sum, at, s)
            np.add.at(tile_sum, bt, s)
            np.add.at(tile_cnt, at, 1)
            np.add.at(tile_cnt, bt, 1)
            nb[at, d] = bt
            nb[bt, d_opp] = at
            nb_rot[at, d] = rot[bt]
            nb_rot[bt, d_opp] = rot[at]

        self.fitness = total
        self.boundary_count = pairs
        self.c_mean = total / pairs if pairs else 0.0
        with np.errstate(invalid="ignore"):
            piece = np.where(tile_cnt > 0, tile_sum / np.maximum(tile_cnt, 1), 0.0)
        self.piece_scores = piece
        threshold = max(floor, self.c_mean)
        ok = (piece > threshold) & (tile_cnt > 0)
        # Plain lists: the crossover hot loop reads these per placement.
        self.nb = nb.tolist()
        self.nb_rot = nb_rot.tolist()
        self.rot_list = rot.tolist()
        self.ok = ok.tolist()
        self.any_ok = bool(ok.any())

    @property
    def n_tiles(self) -> int:
        return len(self.pos_r)

    def placements(self) -> list[Placement]:
        return [Placement(t, int(self.pos_r[t]), int(self.pos_c[t]), int(self.rot[t]))
                for t in range(self.n_tiles)]


def fitness(chrom: Chromosome, matrix: CompatibilityMatrix) -> float:
    """Sum of compatibility scores over all horizontally/vertically adjacent pairs."""
    return _rescore(chrom, matrix)[0]


def mean_boundary_compat(chrom: Chromosome, matrix: CompatibilityMatrix) -> float:
    """Fitness divided by the number of adjacent placed pairs (0 when none)."""
    total, pairs, _, _ = _rescore(chrom, matrix)
    return total / pairs if pairs else 0.0


def piece_score(chrom: Chromosome, tile: int, matrix: CompatibilityMatrix) -> float:
    """Mean compatibility between one tile and its placed neighbours."""
    _, _, tile_sum, tile_cnt = _rescore(chrom, matrix)
    if tile_cnt[tile] == 0:
        raise ValueError(f"tile {tile} has no placed neighbours")
    return float(tile_sum[tile] / tile_cnt[tile])


def _rescore(chrom: Chromosome, matrix: CompatibilityMatrix):
    scores = matrix.scores
    n = chrom.n_tiles
    total = 0.0
    pairs = 0
    tile_sum = np.zeros(n)
    tile_cnt = np.zeros(n, dtype=np.int64)
    cell = {(int(chrom.pos_r[t]), int(chrom.pos_c[t])): t for t in range(n)}
    for (r, c), a in cell.items():
        for d in (int(Side.RIGHT), int(Side.BOTTOM)):
            b = cell.get((r + _DR[d], c + _DC[d]))
            if b is None:
                continue
            a_edge = 4 * a + SIDE_FACING[chrom.rot[a]][d]
            b_edge = 4 * b + SIDE_FACING[chrom.rot[b]][_OPP[d]]
            s = float(scores[a_edge, b_edge])
            total += s
            pairs += 1
            tile_sum[a] += s
            tile_sum[b] += s
            tile_cnt[a] += 1
            tile_cnt[b] += 1
    return total, pairs, tile_sum, tile_cnt


def roulette_select(population: Sequence[Chromosome], rng: np.random.Generator) -> Chromosome:
    """Fitness-proportional selection; uniform when all fitnesses are zero."""
    if not population:
        raise ValueError("population must be non-empty")
    fits = np.array([c.fitness for c in population])
    if (fits < 0).any():
        raise ValueError("roulette selection requires non-negative fitness")
    total = fits.sum()
    if total <= 0.0:
        return population[int(rng.integers(len(population)))]
    cum = np.cumsum(fits)
    idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
    return population[min(idx, len(population) - 1)]


def validate_chromosome(chrom: Chromosome, n_tiles: int,
                        dims: Optional[tuple[int, int]], variant: Variant) -> None:
    """Raise unless the chromosome satisfies the structural validity invariant."""
    if chrom.n_tiles != n_tiles:
        raise AssertionError(f"expected {n_tiles} placements, got {chrom.n_tiles}")
    cells = set(zip(chrom.pos_r.tolist(), chrom.pos_c.tolist()))
    if len(cells) != n_tiles:
        raise AssertionError("placements collide on a cell")
    h = int(chrom.pos_r.max() - chrom.pos_r.min()) + 1
    w = int(chrom.pos_c.max() - chrom.pos_c.min()) + 1
    if dims is not None:
        rows, cols = dims
        allowed = {(rows, cols)}
        if variant == Variant.TYPE2:
            allowed.add((cols, rows))
        if not any(h <= hh and w <= ww for hh, ww in allowed):
            raise AssertionError(f"bounding box {h}x{w} exceeds {dims}")
    else:
        if h > n_tiles or w > n_tiles or h * w < n_tiles:
            raise AssertionError(f"bounding box {h}x{w} infeasible for {n_tiles} tiles")
    if variant == Variant.TYPE1 and chrom.rot.any():
        raise AssertionError("TYPE1 chromosomes must not rotate tiles")


@dataclass
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    phase_placements: tuple[int, int, int, int, int, int]


@dataclass
class GaResult:
    best: Chromosome
    log: list[GenerationStats] = field(default_factory=list)
    seed: Optional[int] = None


class KernelGrowthSolver:
    """Bundles one matrix + configuration and runs crossovers / full GA runs."""

    def __init__(self, matrix: CompatibilityMatrix, cfg: GaConfig,
                 dims: Optional[tuple[int, int]] = None):
        if not matrix.similarity or not matrix.normalized:
            raise ValueError("the solver requires a normalized similarity matrix")
        self.matrix = matrix
        self.cfg = cfg
        self.n = matrix.n_tiles
        self.variant = matrix.variant
        self.dims = dims
        self._bounds_targets = None
        if dims is not None:
            rows, cols = dims
            if rows * cols != self.n:
                raise ValueError("dims do not match the matrix tile count")
            targets = [(rows, cols)]
            if self.variant == Variant.TYPE2 and rows != cols:
                targets.append((cols, rows))
            self._bounds_targets = targets
        self._prepare_rank_tables()

    def _prepare_rank_tables(self) -> None:
        sc = self.matrix.scores
        finite = np.isfinite(sc)
        neg = np.where(finite, sc.astype(np.float64), -np.inf)
        if self.n < 2:
            self.top1 = [-1] * (4 * self.n)
            self.top2 = [-1] * (4 * self.n)
            self.top1_score = [0.0] * (4 * self.n)
            self.top2_score = [0.0] * (4 * self.n)
            return
        top1 = neg.argmax(axis=1)
        rows = np.arange(len(neg))
        s1 = neg[rows, top1]
        neg2 = neg.copy()
        neg2[rows, top1] = -np.inf
        top2 = neg2.argmax(axis=1)
        s2 = neg2[rows, top2]
        self.top1 = np.where(np.isfinite(s1), top1, -1).tolist()
        self.top2 = np.where(np.isfinite(s2), top2, -1).tolist()
        self.top1_score = np.where(np.isfinite(s1), s1, 0.0).tolist()
        self.top2_score = np.where(np.isfinite(s2), s2, 0.0).tolist()

    # -- kernel growth ------------------------------------------------------

    def crossover(self, parent_a: Chromosome, parent_b: Chromosome,
                  rng: np.random.Generator, trace: Optional[list] = None
                  ) -> tuple[Chromosome, tuple[int, ...]]:
        """Grow a child from two parents; returns (child, per-phase placement counts)."""
        hi, lo = ((parent_a, parent_b) if parent_a.fitness >= parent_b.fitness
                  else (parent_b, parent_a))
        return self._grow(hi, lo, rng, trace)

    def random_chromosome(self, rng: np.random.Generator) -> Chromosome:
        """Random kernel growth: the seeding rule plus phase VI only."""
        child, _ = self._grow(None, None, rng, None)
        return child

    def _grow(self, hi: Optional[Chromosome], lo: Optional[Chromosome],
              rng: np.random.Generator, trace: Optional[list]
              ) -> tuple[Chromosome, tuple[int, ...]]:
        # Hot path. Cells are packed into single ints, (r + bias) << shift |
        # (c + bias), so integer order equals row-major cell order; a boundary
        # entry packs its anchor cell and direction as cell << 2 | d.
        #
        # Every phase condition is either fixed for the whole crossover
        # (parent links, thresholds, rank tables) or monotone (tiles only ever
        # become placed, cells only ever become occupied, the bounding box
        # only grows), so each new boundary entry is classified once, at
        # creation, into per-phase structures: sorted candidate queues for
        # phases I-III (fired in cyclic cell order from a per-crossover random
        # start key) and best-score heaps for phases IV-V. Invalidated
        # candidates are discarded lazily when encountered.
        n = self.n
        cfg = self.cfg
        type2 = self.variant == Variant.TYPE2
        targets = self._bounds_targets
        sf = SIDE_FACING
        opp = _OPP
        rot_to_face = ROTATION_TO_FACE
        rotate_dir = ROTATE_DIRECTION
        top1, top1_score = self.top1, self.top1_score
        top2, top2_score = self.top2, self.top2_score

        bias = n + 1
        shift = (2 * n + 3).bit_length()
        colmask = (1 << shift) - 1
        origin = (bias << shift) | bias
        dcell = (-1, 1, -(1 << shift), 1 << shift)  # L, R, T, B
        tn_shift = n.bit_length() + 2  # packed queue item: entry << tn_shift | t_n << 2 | k_n
        tn_mask = (1 << (tn_shift - 2)) - 1

        with_parents = hi is not None
        use1 = use2 = use3 = False
        if with_parents:
            en1 = rng.random() >= cfg.skip_p1
            en2 = rng.random() >= cfg.skip_p2
            en3 = rng.random() >= cfg.skip_p3
            start_packed = int(rng.integers(1 << (2 * shift + 2))) << tn_shift
            hi_ok, hi_nb, hi_nbrot, hi_rot = hi.ok, hi.nb, hi.nb_rot, hi.rot_list
            lo_ok, lo_nb, lo_nbrot, lo_rot = lo.ok, lo.nb, lo.nb_rot, lo.rot_list
            use1 = en1 and hi.any_ok
            use2 = en2 and lo.any_ok
            use3 = en3
        counts = [0, 0, 0, 0, 0, 0]

        occ: dict[int, int] = {}           # cell -> tile << 2 | rot
        placed = bytearray(n)
        unplaced = list(range(n))
        where_unplaced = list(range(n))
        entries: list[int] = []            # every boundary entry ever created
        q1: list[int] = []                 # phase I-III candidates, sorted packed ints
        q2: list[int] = []
        q3: list[int] = []
        h4: list[tuple] = []               # phase IV/V: (-score, anchor, cand, entry)
        h5: list[tuple] = []
        bounds = [bias, bias, bias, bias]  # min_r, max_r, min_c, max_c (biased)

        def admissible(cell: int) -> bool:
            r = cell >> shift
            c = cell & colmask
            h = (bounds[1] if bounds[1] > r else r) - (bounds[0] if bounds[0] < r else r) + 1
            w = (bounds[3] if bounds[3] > c else c) - (bounds[2] if bounds[2] < c else c) + 1
            for th, tw in targets:
                if h <= th and w <= tw:
                    return True
            return False

        def classify(entry: int, t_o: int, k_o: int, d: int) -> None:
            if with_parents:
                a_edge = 4 * t_o + sf[k_o][d]
                cand = top1[a_edge]
                if cand >= 0:
                    heappush(h4, (-top1_score[a_edge], a_edge, cand, entry))
                cand = top2[a_edge]
                if cand >= 0:
                    heappush(h5, (-top2_score[a_edge], a_edge, cand, entry))
                base = entry << tn_shift
                if use1 and hi_ok[t_o]:
                    delta = (k_o - hi_rot[t_o]) & 3
                    d_p = rotate_dir[(4 - delta) & 3][d]
                    t_n = hi_nb[t_o][d_p]
                    if t_n >= 0 and hi_ok[t_n]:
                        insort(q1, base | (t_n << 2) | ((hi_nbrot[t_o][d_p] + delta) & 3))
                if use2 and lo_ok[t_o]:
                    delta = (k_o - lo_rot[t_o]) & 3
                    d_p = rotate_dir[(4 - delta) & 3][d]
                    t_n = lo_nb[t_o][d_p]
                    if t_n >= 0 and lo_ok[t_n]:
                        insort(q2, base | (t_n << 2) | ((lo_nbrot[t_o][d_p] + delta) & 3))
                if use3:
                    delta = (k_o - hi_rot[t_o]) & 3
                    d_p = rotate_dir[(4 - delta) & 3][d]
                    t_n = hi_nb[t_o][d_p]
                    if t_n >= 0:
                        k_n = (hi_nbrot[t_o][d_p] + delta) & 3
                        delta2 = (k_o - lo_rot[t_o]) & 3
                        d_p2 = rotate_dir[(4 - delta2) & 3][d]
                        if lo_nb[t_o][d_p2] == t_n and (lo_nbrot[t_o][d_p2] + delta2) & 3 == k_n:
                            insort(q3, base | (t_n << 2) | k_n)

        def place(tile: int, cell: int, k: int, phase: int) -> None:
            occ[cell] = (tile << 2) | k
            placed[tile] = 1
            pos = where_unplaced[tile]
            last = unplaced[-1]
            unplaced[pos] = last
            where_unplaced[last] = pos
            unplaced.pop()
            r = cell >> shift
            c = cell & colmask
            if r < bounds[0]:
                bounds[0] = r
            elif r > bounds[1]:
                bounds[1] = r
            if c < bounds[2]:
                bounds[2] = c
            elif c > bounds[3]:
                bounds[3] = c
            counts[phase - 1] += 1
            if trace is not None:
                trace.append((phase, tile, (r - bias, c - bias), k))
            base = cell << 2
            for d in range(4):
                tgt = cell + dcell[d]
                if tgt not in occ and (targets is None or admissible(tgt)):
                    entry = base | d
                    entries.append(entry)
                    classify(entry, tile, k, d)

        def try_queue(q: list[int]):
            if not q:
                return None
            i0 = bisect_left(q, start_packed)
            hit = None
            todel = []
            for i in range(i0, len(q)):
                packed = q[i]
                entry = packed >> tn_shift
                tgt = (entry >> 2) + dcell[entry & 3]
                if tgt in occ or placed[(packed >> 2) & tn_mask] or (
                        targets is not None and not admissible(tgt)):
                    todel.append(i)
                    continue
                hit = (packed >> 2) & tn_mask, tgt, packed & 3
                break
            if hit is None:
                for i in range(0, i0):
                    packed = q[i]
                    entry = packed >> tn_shift
                    tgt = (entry >> 2) + dcell[entry & 3]
                    if tgt in occ or placed[(packed >> 2) & tn_mask] or (
                            targets is not None and not admissible(tgt)):
                        todel.append(i)
                        continue
                    hit = (packed >> 2) & tn_mask, tgt, packed & 3
                    break
            for i in sorted(todel, reverse=True):
                del q[i]
            return hit

        def try_heap(h: list[tuple]):
            while h:
                _, _, cand, entry = h[0]
                tgt = (entry >> 2) + dcell[entry & 3]
                if tgt in occ or placed[cand >> 2] or (
                        targets is not None and not admissible(tgt)):
                    heappop(h)
                    continue
                d = entry & 3
                rot = rot_to_face[cand & 3][opp[d]] if type2 else 0
                return cand >> 2, tgt, rot
            return None

        def phase6():
            cells = set()
            for e in entries:
                tgt = (e >> 2) + dcell[e & 3]
                if tgt not in occ and (targets is None or admissible(tgt)):
                    cells.add(tgt)
            if not cells:
                raise RuntimeError("kernel growth ran out of admissible boundary cells")
            ordered = sorted(cells)
            tile = unplaced[int(rng.integers(len(unplaced)))]
            cell = ordered[int(rng.integers(len(ordered)))]
            k = int(rng.integers(4)) if type2 else 0
            return tile, cell, k

        seed_tile = int(rng.integers(n))
        seed_rot = int(rng.integers(4)) if type2 else 0
        place(seed_tile, origin, seed_rot, 6)
        counts[5] -= 1  # seeding is not a phase placement
        if trace is not None:
            trace[-1] = (0, seed_tile, (0, 0), seed_rot)

        while unplaced:
            if with_parents:
                if use1:
                    hit = try_queue(q1)
                    if hit:
                        place(hit[0], hit[1], hit[2], 1)
                        continue
                if use2:
                    hit = try_queue(q2)
                    if hit:
                        place(hit[0], hit[1], hit[2], 2)
                        continue
                if use3:
                    hit = try_queue(q3)
                    if hit:
                        place(hit[0], hit[1], hit[2], 3)
                        continue
                hit = try_heap(h4)
                if hit:
                    place(hit[0], hit[1], hit[2], 4)
                    continue
                hit = try_heap(h5)
                if hit:
                    place(hit[0], hit[1], hit[2], 5)
                    continue
            tile, cell, k = phase6()
            place(tile, cell, k, 6)

        pos_r = np.empty(n, dtype=np.int64)
        pos_c = np.empty(n, dtype=np.int64)
        rot = np.zeros(n, dtype=np.int64)
        for cell, v in occ.items():
            t = v >> 2
            pos_r[t] = (cell >> shift) - bias
            pos_c[t] = (cell & colmask) - bias
            rot[t] = v & 3
        child = Chromosome(pos_r, pos_c, rot, self.matrix.scores,
                           self.cfg.score_threshold_floor)
        return child, tuple(counts)

    # -- generational loop --------------------------------------------------

    def run(self, seed) -> GaResult:
        """One full GA run; deterministic for a fixed seed."""
        rng = np.random.default_rng(seed)
        cfg = self.cfg
        pop = [self.random_chromosome(rng) for _ in range(cfg.population_size)]
        for ch in pop:
            validate_chromosome(ch, self.n, self.dims, self.variant)
        best = max(pop, key=lambda c: c.fitness)
        log: list[GenerationStats] = []
        for gen in range(1, cfg.generations + 1):
            order = sorted(range(len(pop)), key=lambda i: (-pop[i].fitness, i))
            nxt = [pop[i] for i in order[:cfg.elite_count]]
            fits = np.array([c.fitness for c in pop])
            if (fits < 0).any():
                raise ValueError("negative fitness encountered; matrix must be normalized")
            total = float(fits.sum())
            cum = np.cumsum(fits) if total > 0 else None
            phase_totals = [0] * 6
            while len(nxt) < cfg.population_size:
                pa = self._pick(pop, cum, total, rng)
                pb = self._pick(pop, cum, total, rng)
                child, counts = self.crossover(pa, pb, rng)
                validate_chromosome(child, self.n, self.dims, self.variant)
                for k in range(6):
                    phase_totals[k] += counts[k]
                nxt.append(child)
            pop = nxt
            gen_best = max(pop, key=lambda c: c.fitness)
            if gen_best.fitness > best.fitness:
                best = gen_best
            log.append(GenerationStats(
                generation=gen,
                best_fitness=max(c.fitness for c in pop),
                mean_fitness=float(np.mean([c.fitness for c in pop])),
                phase_placements=tuple(phase_totals),
            ))
        return GaResult(best=best, log=log)

    @staticmethod
    def _pick(pop, cum, total, rng: np.random.Generator) -> Chromosome:
        if cum is None:
            return pop[int(rng.integers(len(pop)))]
        idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
        return pop[min(idx, len(pop) - 1)]


def crossover(parent_a: Chromosome, parent_b: Chromosome, matrix: CompatibilityMatrix,
              cfg: GaConfig, rng: np.random.Generator,
              dims: Optional[tuple[int, int]] = None,
              trace: Optional[list] = None) -> Chromosome:
    """Standalone crossover entry point (builds a solver context per call)."""
    solver = KernelGrowthSolver(matrix, cfg, dims)
    child, _ = solver.crossover(parent_a, parent_b, rng, trace)
    return child


def make_chromosome(placements: Sequence[Placement], matrix: CompatibilityMatrix,
                    threshold_floor: float = 0.8) -> Chromosome:
    """Build a chromosome from explicit placements (tests, ground truth)."""
    n = len(placements)
    pos_r = np.empty(n, dtype=np.int64)
    pos_c = np.empty(n, dtype=np.int64)
    rot = np.empty(n, dtype=np.int64)
    seen = set()
    for p in placements:
        if p.tile in seen:
            raise ValueError("duplicate tile in placements")
        seen.add(p.tile)
        pos_r[p.tile] = p.row
        pos_c[p.tile] = p.col
        rot[p.tile] = p.rot
    return Chromosome(pos_r, pos_c, rot, matrix.scores, threshold_floor)


def run_ga(matrix: CompatibilityMatrix, cfg: GaConfig,
           dims: Optional[tuple[int, int]] = None, seed=None) -> GaResult:
    """One GA run with the given matrix/config; see KernelGrowthSolver.run."""
    solver = KernelGrowthSolver(matrix, cfg, dims)
    result = solver.run(cfg.seed if seed is None else seed)
    return result


def run_many(matrix: CompatibilityMatrix, cfg: GaConfig,
             dims: Optional[tuple[int, int]] = None,
             jobs: int = 1) -> tuple[GaResult, list[GaResult]]:
    """Run cfg.runs independent GA runs; returns (best result, all results).

    Per-run seeds derive deterministically from cfg.seed, so results do not
    depend on the level of parallelism.
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.runs)
    if jobs > 1 and cfg.runs > 1:
        from concurrent.futures import ProcessPoolExecutor
        args = [(matrix, cfg, dims, s, i) for i, s in enumerate(seeds)]
        with ProcessPoolExecutor(max_workers=min(jobs, cfg.runs)) as ex:
            results = list(ex.map(_run_one, args))
    else:
        results = [_run_one((matrix, cfg, dims, s, i)) for i, s in enumerate(seeds)]
    best = max(results, key=lambda r: r.best.fitness)
    return best, results


def _run_one(args) -> GaResult:
    matrix, cfg, dims, seed_seq, index = args
    solver = KernelGrowthSolver(matrix, cfg, dims)
    result = solver.run(seed_seq)
    result.seed = index
    return result
