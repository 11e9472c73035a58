"""Square-tile puzzle reconstruction toolkit."""

from .geometry import Side
from .model import (
    EdgeRef,
    Placement,
    PuzzleBundle,
    Tile,
    Variant,
    cut_image,
    degrade,
    generate_bundle,
    load_bundle,
    oriented_pair,
    reassemble,
    save_bundle,
    scramble,
    shift,
)
from .compat import (
    CompatibilityMatrix,
    MeasureKind,
    build_matrix,
    load_matrix,
    mgc,
    normalize_minmax,
    save_matrix,
    ssd,
    symmetrize,
    to_similarity,
)
from .evaluation import (
    AccuracyReport,
    RankHistogram,
    best_buddy_precision,
    neighbor_accuracy,
    oracle_matrix,
    rank_histogram,
)
from .solver import (
    Chromosome,
    GaConfig,
    GaResult,
    KernelGrowthSolver,
    crossover,
    fitness,
    make_chromosome,
    mean_boundary_compat,
    piece_score,
    roulette_select,
    run_ga,
    run_many,
)

__version__ = "0.1.0"
