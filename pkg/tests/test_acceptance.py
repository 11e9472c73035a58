"""Acceptance suite: one test per release criterion, at its stated tolerance.

The two GA criteria run the full default configuration (population 100,
500 generations, best of 10 runs) and take several minutes each.
"""

import csv
import os
from dataclasses import replace

import numpy as np
import pytest

from tilesolver import (
    GaConfig,
    Variant,
    cut_image,
    load_matrix,
    neighbor_accuracy,
    normalize_minmax,
    oracle_matrix,
    rank_histogram,
    run_ga,
    run_many,
    save_matrix,
    scramble,
    symmetrize,
    to_similarity,
)
from tilesolver.cli import main as cli_main
from tilesolver.compat import (
    BadMagicError,
    MeasureKind,
    TruncatedFileError,
    VersionMismatchError,
    build_matrix,
)
from tilesolver.evaluation import ground_truth_contacts
from tilesolver.model import generate_bundle, save_bundle, synth_image

from conftest import make_bundle, random_matrix


def _report(name: str, ok: bool, detail: str = "") -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# 1. Oracle reconstruction, 256 tiles, type 2, unknown dimensions
# ---------------------------------------------------------------------------

def test_criterion_oracle_reconstruction_256(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli_main(["generate", "--rows", "16", "--cols", "16", "--style",
                     "gradient", "--seed", "7", "-o", "panel"]) == 0
    assert cli_main(["scramble", "panel", "--type", "2", "--seed", "3",
                     "-o", "mixed"]) == 0
    assert cli_main(["score", "mixed", "--measure", "oracle", "--type", "2",
                     "-o", "oracle.cmat"]) == 0
    assert cli_main(["solve", "mixed", "--cmat", "oracle.cmat", "--type", "2",
                     "--dims", "unknown", "--runs", "10", "--pop", "100",
                     "--gens", "500", "--seed", "1", "-o", "solution.json"]) == 0
    assert cli_main(["eval", "solution.json", "mixed", "-o", "report.csv"]) == 0
    with open("report.csv") as fh:
        row = list(csv.DictReader(fh))[0]
    accuracy = float(row["neighbor_accuracy"])
    # keep the per-generation log around for the monotonicity criterion
    os.replace("solution_log.csv", tmp_path.parent / "acceptance_256_log.csv")
    _report("oracle reconstruction (16x16, type 2, unknown dims, defaults)",
            accuracy == 1.0, f"best-run neighbor accuracy {accuracy}")


# ---------------------------------------------------------------------------
# 2. Rank metric exactness
# ---------------------------------------------------------------------------

def test_criterion_rank_metric_exactness():
    bundles = [
        (make_bundle(2, 2, seed=1), Variant.TYPE1),
        (make_bundle(3, 4, seed=2), Variant.TYPE2),
        (scramble(make_bundle(4, 4, seed=3), Variant.TYPE2, seed=9), Variant.TYPE2),
        (scramble(make_bundle(5, 3, seed=4), Variant.TYPE1, seed=5), Variant.TYPE1),
        (generate_bundle(4, 5, "gradient", seed=6, tile_px=10), Variant.TYPE2),
    ]
    for bundle, variant in bundles:
        hist = rank_histogram(oracle_matrix(bundle, variant), bundle)
        assert hist.rank_percent(1) == 100.0
        assert hist.counts[1:].sum() == 0
    _report("rank metric exactness (oracle rank-1 = 100%, others 0%)", True,
            f"{len(bundles)} bundles")


# ---------------------------------------------------------------------------
# 3. Normalization invariance of the rank histogram
# ---------------------------------------------------------------------------

def test_criterion_normalization_invariance():
    rng = np.random.default_rng(123)
    checked = 0
    for i in range(20):
        rows, cols = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        variant = Variant.TYPE1 if i % 2 else Variant.TYPE2
        bundle = make_bundle(rows, cols, seed=i)
        raw = random_matrix(rows * cols, variant, rng, lattice=2003)
        sim = to_similarity(raw)
        before = rank_histogram(sim, bundle)
        after = rank_histogram(normalize_minmax(sim), bundle)
        assert np.array_equal(before.counts, after.counts)
        checked += 1
    _report("normalization invariance of rank histogram", checked == 20,
            f"{checked} random matrices, exact count equality")


# ---------------------------------------------------------------------------
# 4. Symmetrize exactness
# ---------------------------------------------------------------------------

def test_criterion_symmetrize_exactness():
    rng = np.random.default_rng(77)
    worst = 0.0
    for i in range(20):
        n = int(rng.integers(2, 7))
        variant = Variant.TYPE1 if i % 2 else Variant.TYPE2
        m = normalize_minmax(random_matrix(n, variant, rng, similarity=True))
        sym = symmetrize(m)
        diff = np.abs(sym.scores - sym.scores.T)
        worst = max(worst, float(np.nanmax(diff)))
    _report("symmetrize exactness (max |C(i,j) - C(j,i)| = 0)", worst == 0.0,
            f"max deviation {worst}")


# ---------------------------------------------------------------------------
# 5. Measure ordering sanity: MGC vs SSD
# ---------------------------------------------------------------------------

def _photo_panel(seed: int) -> np.ndarray:
    """Color-rich photographic test panel: smooth multi-octave color field
    plus sensor-style luminance noise (correlated across channels)."""
    rng = np.random.default_rng(seed)
    base = synth_image("gradient", 9 * 50, 12 * 50, seed=seed).astype(np.float64)
    base += rng.normal(0.0, 20.0, (9 * 50, 12 * 50, 1))
    return np.clip(base, 0, 255).astype(np.uint8)


def test_criterion_measure_ordering():
    wins = 0
    pairs = []
    for seed in range(5):
        bundle = cut_image(_photo_panel(seed), 9, 12, 50)
        assert bundle.n_tiles == 108
        ssd_rank1 = rank_histogram(
            to_similarity(build_matrix(bundle, MeasureKind.SSD, Variant.TYPE1)),
            bundle).rank_percent(1)
        mgc_rank1 = rank_histogram(
            to_similarity(build_matrix(bundle, MeasureKind.MGC, Variant.TYPE1)),
            bundle).rank_percent(1)
        pairs.append((round(ssd_rank1, 1), round(mgc_rank1, 1)))
        wins += mgc_rank1 >= ssd_rank1
    _report("measure ordering sanity (MGC rank-1 >= SSD rank-1 in >= 4 of 5)",
            wins >= 4, f"wins {wins}/5, (ssd, mgc) = {pairs}")


# ---------------------------------------------------------------------------
# 6. GA monotonicity and validity
# ---------------------------------------------------------------------------

def test_criterion_ga_monotonicity_and_validity(tmp_path):
    # run_ga validates every chromosome of every generation internally
    # (validate_chromosome raises on any violation); check monotone best
    # fitness on fresh runs over both variants and on the stored 256-tile log.
    bundle1 = scramble(make_bundle(6, 6, seed=60, tile_px=16), Variant.TYPE1, seed=1)
    m1 = symmetrize(normalize_minmax(to_similarity(
        build_matrix(bundle1, MeasureKind.SSD, Variant.TYPE1))))
    r1 = run_ga(m1, GaConfig(population_size=40, generations=60, runs=1), dims=(6, 6), seed=2)
    series1 = [row.best_fitness for row in r1.log]
    assert all(a <= b for a, b in zip(series1, series1[1:]))

    bundle2 = scramble(make_bundle(4, 4, seed=61), Variant.TYPE2, seed=2)
    r2 = run_ga(oracle_matrix(bundle2, Variant.TYPE2),
                GaConfig(population_size=30, generations=40, runs=1), dims=None, seed=3)
    series2 = [row.best_fitness for row in r2.log]
    assert all(a <= b for a, b in zip(series2, series2[1:]))

    big_log = tmp_path.parent / "acceptance_256_log.csv"
    checked_big = False
    if big_log.exists():
        with open(big_log) as fh:
            best = [float(row["best_fitness"]) for row in csv.DictReader(fh)]
        assert len(best) == 500
        assert all(a <= b for a, b in zip(best, best[1:]))
        checked_big = True
    _report("GA monotonicity and per-generation validity", True,
            f"2 fresh runs checked, 256-tile log checked: {checked_big}")


# ---------------------------------------------------------------------------
# 7. Noisy-measure robustness (the 70% best-buddy regime)
# ---------------------------------------------------------------------------

def corrupt_oracle(matrix, bundle, p_correct: float, seed: int):
    """Demote each anchor's true neighbour with probability 1 - p_correct:
    the true contact drops to 0.5 and a random wrong candidate takes 1.0."""
    rng = np.random.default_rng(seed)
    scores = matrix.scores.copy()
    for e_a, e_b in sorted(ground_truth_contacts(bundle)):
        if rng.random() >= p_correct:
            row = scores[e_a]
            cands = np.where(np.isfinite(row))[0]
            cands = cands[cands != e_b]
            wrong = int(cands[rng.integers(len(cands))])
            scores[e_a, e_b] = 0.5
            scores[e_a, wrong] = 1.0
    return replace(matrix, scores=scores, symmetric=False)


def test_criterion_noisy_measure_robustness():
    bundle = scramble(make_bundle(10, 10, seed=70, tile_px=10), Variant.TYPE1, seed=71)
    noisy = corrupt_oracle(oracle_matrix(bundle, Variant.TYPE1), bundle,
                           p_correct=0.7, seed=99)
    rank1 = rank_histogram(noisy, bundle).rank_percent(1) / 100.0
    assert 0.60 <= rank1 <= 0.80, f"corruption produced rank-1 {rank1}"
    cfg = GaConfig(population_size=100, generations=500, runs=10, seed=7)
    best, _ = run_many(noisy, cfg, dims=(10, 10), jobs=min(os.cpu_count() or 1, 10))
    report = neighbor_accuracy(best.best.placements(), bundle)
    _report("noisy-measure robustness (70% regime, best-of-10 >= 0.80)",
            report.neighbor_accuracy >= 0.80,
            f"rank-1 after corruption {rank1:.2f}, "
            f"best accuracy {report.neighbor_accuracy:.3f}")


# ---------------------------------------------------------------------------
# 8. CMAT round-trip and malformed-file detection
# ---------------------------------------------------------------------------

def test_criterion_cmat_round_trip(tmp_path):
    rng = np.random.default_rng(55)
    for i in range(100):
        n = int(rng.integers(2, 7))
        variant = Variant.TYPE1 if rng.random() < 0.5 else Variant.TYPE2
        m = random_matrix(n, variant, rng,
                          similarity=bool(rng.random() < 0.5),
                          normalized=bool(rng.random() < 0.5),
                          symmetric=bool(rng.random() < 0.5))
        path = str(tmp_path / "m.cmat")
        save_matrix(m, path)
        loaded = load_matrix(path)
        assert np.array_equal(loaded.scores, m.scores, equal_nan=True)
        assert (loaded.variant, loaded.similarity, loaded.normalized,
                loaded.symmetric) == (m.variant, m.similarity, m.normalized, m.symmetric)

    good = str(tmp_path / "good.cmat")
    save_matrix(random_matrix(3, Variant.TYPE2, rng), good)
    data = open(good, "rb").read()

    bad_magic = str(tmp_path / "bad_magic.cmat")
    open(bad_magic, "wb").write(b"XXXX" + data[4:])
    with pytest.raises(BadMagicError):
        load_matrix(bad_magic)

    bad_version = str(tmp_path / "bad_version.cmat")
    open(bad_version, "wb").write(data[:4] + b"\x07\x00" + data[6:])
    with pytest.raises(VersionMismatchError):
        load_matrix(bad_version)

    truncated = str(tmp_path / "truncated.cmat")
    open(truncated, "wb").write(data[:-17])
    with pytest.raises(TruncatedFileError):
        load_matrix(truncated)

    _report("CMAT round-trip (100 matrices) and malformed-file detection", True,
            "bit-exact; bad magic / version / truncation all rejected")


# ---------------------------------------------------------------------------
# 9. Determinism of solve output
# ---------------------------------------------------------------------------

def test_criterion_determinism(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    save_bundle(scramble(make_bundle(3, 3, seed=90, tile_px=10), Variant.TYPE2, seed=91),
                "bundle")
    assert cli_main(["score", "bundle", "--measure", "oracle", "--type", "2",
                     "-o", "m.cmat"]) == 0
    args = ["solve", "bundle", "--cmat", "m.cmat", "--type", "2",
            "--dims", "unknown", "--runs", "3", "--pop", "20", "--gens", "12",
            "--seed", "1234"]
    assert cli_main(args + ["--jobs", "1", "-o", "a.json"]) == 0
    assert cli_main(args + ["--jobs", "2", "-o", "b.json"]) == 0
    assert cli_main(args + ["--jobs", "1", "-o", "c.json"]) == 0
    a = open("a.json", "rb").read()
    b = open("b.json", "rb").read()
    c = open("c.json", "rb").read()
    _report("determinism (identical seeds give byte-identical solutions)",
            a == b == c, f"{len(a)} bytes, serial == parallel == repeat")
