"""Deep-learned edge compatibility trainer for square-tile puzzle bundles."""

from .bundles import Bundle, load_bundle, load_corpus, oriented_pair_input
from .export import evaluate_table, export_matrix, write_cmat
from .metrics import pooled_rank1, rank1, ssd_table
from .nets import SUBNET_NAMES, EdgeScorer, FourNet, triplet_loss
from .training import EpochStats, TrainingDiverged, load_checkpoint, train
from .triplets import TrainConfig, Triplet, positive_pairs, sample_triplets

__version__ = "0.1.0"
