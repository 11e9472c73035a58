import numpy as np
import pytest

from tilesolver import Placement, Variant, scramble
from tilesolver.compat import CompatibilityMatrix, admissible_mask, symmetrize
from tilesolver.evaluation import (
    best_buddy_precision,
    ground_truth_contacts,
    neighbor_accuracy,
    oracle_matrix,
    rank_histogram,
)

from conftest import make_bundle, random_matrix


# -- oracle matrix ------------------------------------------------------------

def test_oracle_rank1_is_100():
    for rows, cols in ((2, 2), (3, 4)):
        bundle = make_bundle(rows, cols, seed=rows * 10 + cols)
        for variant in (Variant.TYPE1, Variant.TYPE2):
            om = oracle_matrix(bundle, variant)
            hist = rank_histogram(om, bundle)
            assert hist.rank_percent(1) == 100.0
            assert hist.counts[1:].sum() == 0


def test_oracle_on_scrambled_type2_bundle():
    bundle = scramble(make_bundle(3, 3, seed=5), Variant.TYPE2, seed=8)
    om = oracle_matrix(bundle, Variant.TYPE2)
    assert rank_histogram(om, bundle).rank_percent(1) == 100.0


def test_oracle_type1_rejects_rotated_ground_truth():
    bundle = scramble(make_bundle(2, 2, seed=1), Variant.TYPE2, seed=30)
    assert any(p.rot for p in bundle.ground_truth)
    with pytest.raises(ValueError):
        oracle_matrix(bundle, Variant.TYPE1)


def test_oracle_2x2_type1_has_eight_unit_entries():
    bundle = make_bundle(2, 2, seed=3)
    om = oracle_matrix(bundle, Variant.TYPE1)
    assert int(np.nansum(om.scores)) == 8  # 4 undirected adjacencies, both directions


def test_oracle_is_symmetrize_fixed_point():
    bundle = make_bundle(2, 3, seed=9)
    om = oracle_matrix(bundle, Variant.TYPE2)
    sym = symmetrize(om)
    assert np.array_equal(np.nan_to_num(sym.scores), np.nan_to_num(om.scores))


# -- rank histogram -------------------------------------------------------------

def test_anti_oracle_rank1_zero():
    bundle = make_bundle(2, 3, seed=2)
    om = oracle_matrix(bundle, Variant.TYPE1)
    inverted = CompatibilityMatrix(
        bundle.n_tiles, Variant.TYPE1, (1.0 - om.scores).astype(np.float32),
        similarity=True)
    hist = rank_histogram(inverted, bundle)
    assert hist.rank_percent(1) == 0.0
    # every true neighbour lands at the very worst rank (ties pessimistic)
    assert hist.counts[-1] == hist.total


def test_rank_histogram_brute_force_oracle():
    rng = np.random.default_rng(14)
    bundle = make_bundle(2, 2, seed=6)
    contacts = sorted(ground_truth_contacts(bundle))
    for variant in (Variant.TYPE1, Variant.TYPE2):
        m = random_matrix(4, variant, rng, similarity=True, lattice=13)
        hist = rank_histogram(m, bundle)
        # brute force: sort candidates per anchor, worst rank among ties
        expected = np.zeros(len(hist.counts), dtype=int)
        for e_a, e_b in contacts:
            row = m.scores[e_a]
            cands = [j for j in range(16) if np.isfinite(row[j])]
            s_true = row[e_b]
            rank = sum(1 for j in cands if row[j] >= s_true)
            expected[rank - 1] += 1
        assert np.array_equal(hist.counts, expected)
        assert hist.total == len(contacts)


def test_rank_fractions_sum_to_one():
    from fractions import Fraction
    rng = np.random.default_rng(3)
    bundle = make_bundle(3, 3, seed=1)
    m = random_matrix(9, Variant.TYPE2, rng, similarity=True)
    hist = rank_histogram(m, bundle)
    assert int(hist.counts.sum()) == hist.total
    assert sum(Fraction(int(c), hist.total) for c in hist.counts) == 1


def test_rank_invariant_under_monotone_transform():
    rng = np.random.default_rng(10)
    bundle = make_bundle(2, 3, seed=4)
    m = random_matrix(6, Variant.TYPE2, rng, similarity=True, lattice=501)
    before = rank_histogram(m, bundle)
    squashed = CompatibilityMatrix(6, Variant.TYPE2,
                                   np.tanh(m.scores).astype(np.float32), similarity=True)
    after = rank_histogram(squashed, bundle)
    assert np.array_equal(before.counts, after.counts)


def test_rank_requires_similarity():
    rng = np.random.default_rng(0)
    bundle = make_bundle(2, 2)
    with pytest.raises(ValueError):
        rank_histogram(random_matrix(4, Variant.TYPE1, rng), bundle)


# -- neighbor accuracy ------------------------------------------------------------

def test_ground_truth_scores_perfect():
    bundle = make_bundle(3, 4, seed=3)
    report = neighbor_accuracy(bundle.ground_truth, bundle)
    assert report.neighbor_accuracy == 1.0 and report.perfect
    assert report.denominator == 3 * 3 + 2 * 4  # rows*(cols-1) + (rows-1)*cols


def test_accuracy_invariant_under_translation():
    bundle = make_bundle(2, 3, seed=7)
    moved = [Placement(p.tile, p.row + 5, p.col - 2, p.rot) for p in bundle.ground_truth]
    assert neighbor_accuracy(moved, bundle).neighbor_accuracy == 1.0


def test_accuracy_invariant_under_global_rotation_type2():
    bundle = scramble(make_bundle(3, 3, seed=5), Variant.TYPE2, seed=2)
    for g in range(4):
        rotated = []
        for p in bundle.ground_truth:
            r, c = p.row, p.col
            for _ in range(g):
                r, c = -c, r
            rotated.append(Placement(p.tile, r, c, (p.rot + g) % 4))
        report = neighbor_accuracy(rotated, bundle)
        assert report.neighbor_accuracy == 1.0, f"failed at global rotation {g}"


def test_rotating_tiles_in_place_scores_zero():
    bundle = make_bundle(2, 2, seed=8)
    spun = [Placement(p.tile, p.row, p.col, 1) for p in bundle.ground_truth]
    assert neighbor_accuracy(spun, bundle).neighbor_accuracy == 0.0


def test_diagonal_swap_breaks_all_pairs_2x2():
    bundle = make_bundle(2, 2, seed=4)
    gt = {p.tile: p for p in bundle.ground_truth}
    # swap the two diagonal tiles (0 at (0,0) and 3 at (1,1))
    swapped = [Placement(0, 1, 1, 0), gt[1], gt[2], Placement(3, 0, 0, 0)]
    report = neighbor_accuracy(swapped, bundle)
    assert report.neighbor_accuracy == 0.0
    # hand oracle: the four adjacencies each pair a wrong tile combination
    assert report.denominator == 4 and report.numerator == 0


def test_accuracy_rejects_incomplete_solutions():
    bundle = make_bundle(2, 2)
    with pytest.raises(ValueError):
        neighbor_accuracy(bundle.ground_truth[:3], bundle)
    collided = [Placement(0, 0, 0, 0), Placement(1, 0, 0, 0),
                Placement(2, 1, 0, 0), Placement(3, 1, 1, 0)]
    with pytest.raises(ValueError):
        neighbor_accuracy(collided, bundle)


# -- best buddies -----------------------------------------------------------------

def test_best_buddy_precision_oracle_is_one():
    for variant in (Variant.TYPE1, Variant.TYPE2):
        bundle = make_bundle(3, 3, seed=6)
        om = oracle_matrix(bundle, variant)
        assert best_buddy_precision(om, bundle) == 1.0


def test_best_buddy_requires_mutuality():
    # e0's best is e4, but e4's best is e8: no pair between e0 and e4.
    mask = admissible_mask(3, Variant.TYPE2)
    scores = np.where(mask, 0.0, np.nan).astype(np.float32)
    scores[0, 4] = 1.0
    scores[4, 8] = 1.0
    scores[8, 4] = 1.0
    bundle = make_bundle(1, 3, seed=0)
    m = CompatibilityMatrix(3, Variant.TYPE2, scores, similarity=True)
    pairs_precision = best_buddy_precision(m, bundle)
    # only (4, 8) is mutual; whether it is correct depends on ground truth
    contacts = ground_truth_contacts(bundle)
    assert pairs_precision == (1.0 if (4, 8) in contacts else 0.0)


def test_best_buddy_brute_force_random():
    rng = np.random.default_rng(19)
    bundle = make_bundle(1, 3, seed=2)
    m = random_matrix(3, Variant.TYPE2, rng, similarity=True)
    result = best_buddy_precision(m, bundle)
    # brute force mutual-argmax enumeration
    scores = np.where(np.isfinite(m.scores), m.scores, -np.inf)
    def top(i):
        j = int(np.argmax(scores[i]))
        return j if (scores[i] == scores[i, j]).sum() == 1 else None
    pairs = [(i, top(i)) for i in range(12)
             if top(i) is not None and i < top(i) and top(top(i)) == i]
    contacts = ground_truth_contacts(bundle)
    expected = (sum(1 for p in pairs if p in contacts) / len(pairs)) if pairs else None
    assert result == expected


def test_best_buddy_undefined_when_no_pairs():
    # constant matrix: every row maximum is tied, so no edge has a top candidate
    bundle = make_bundle(2, 2, seed=0)
    mask = admissible_mask(4, Variant.TYPE1)
    scores = np.where(mask, 0.5, np.nan).astype(np.float32)
    m = CompatibilityMatrix(4, Variant.TYPE1, scores, similarity=True)
    assert best_buddy_precision(m, bundle) is None
