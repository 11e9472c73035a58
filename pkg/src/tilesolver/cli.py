"""Command-line front end: dataset preparation, scoring, solving, evaluation.

Every command records its full invocation in a ``run.json`` sidecar next to
its output, and file outputs are written atomically (temp + rename).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional

import numpy as np
from PIL import Image

from . import compat, evaluation, model, solver
from .model import Placement, Variant


class CliError(Exception):
    """A user-facing command error; printed as a diagnostic, exit code 2."""


def _atomic_write_bytes(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _atomic_write_text(path: str, text: str) -> None:
    _atomic_write_bytes(path, text.encode())


def _write_sidecar(out_path: str, argv: list[str]) -> None:
    record = {"command": argv[0] if argv else "", "argv": argv}
    payload = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if os.path.isdir(out_path):
        _atomic_write_text(os.path.join(out_path, "run.json"), payload)
    else:
        _atomic_write_text(f"{out_path}.run.json", payload)


def _load_image(path: str) -> np.ndarray:
    if not os.path.isfile(path):
        raise CliError(f"image not found: {path}")
    return np.asarray(Image.open(path).convert("RGB"))


def _load_bundle(path: str) -> model.PuzzleBundle:
    if not os.path.isdir(path):
        raise CliError(f"bundle directory not found: {path}")
    try:
        return model.load_bundle(path)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _load_matrix(path: str) -> compat.CompatibilityMatrix:
    if not os.path.isfile(path):
        raise CliError(f"matrix file not found: {path}")
    try:
        return compat.load_matrix(path)
    except compat.MatrixFormatError as exc:
        raise CliError(str(exc)) from exc


def _variant(value: str) -> Variant:
    return Variant.TYPE1 if value == "1" else Variant.TYPE2


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_cut(args, argv) -> int:
    image = _load_image(args.image)
    try:
        bundle = model.cut_image(image, args.rows, args.cols, args.tile_px,
                                 provenance=f"cut {os.path.basename(args.image)}")
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    model.save_bundle(bundle, args.output)
    _write_sidecar(args.output, argv)
    print(f"wrote bundle with {bundle.n_tiles} tiles to {args.output}")
    return 0


def _cmd_generate(args, argv) -> int:
    photo = None
    if args.style == "photo":
        if not args.image:
            raise CliError("--style photo requires --image")
        photo = _load_image(args.image)
    try:
        bundle = model.generate_bundle(args.rows, args.cols, args.style,
                                       args.seed, args.tile_px, photo)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    model.save_bundle(bundle, args.output)
    _write_sidecar(args.output, argv)
    print(f"wrote {args.style} bundle with {bundle.n_tiles} tiles to {args.output}")
    return 0


def _cmd_scramble(args, argv) -> int:
    bundle = _load_bundle(args.bundle)
    try:
        out = model.scramble(bundle, _variant(args.type), args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    model.save_bundle(out, args.output)
    _write_sidecar(args.output, argv)
    print(f"wrote scrambled type-{args.type} bundle to {args.output}")
    return 0


def _cmd_score(args, argv) -> int:
    bundle = _load_bundle(args.bundle)
    variant = _variant(args.type)
    level = "symmetric"
    if args.raw:
        level = "raw"
    elif args.normalized:
        level = "normalized"
    try:
        if args.measure == "oracle":
            matrix = evaluation.oracle_matrix(bundle, variant)
        else:
            kind = compat.MeasureKind.SSD if args.measure == "ssd" else compat.MeasureKind.MGC
            matrix = compat.build_matrix(bundle, kind, variant)
        matrix = compat.postprocess(matrix, level)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    compat.save_matrix(matrix, args.output)
    _write_sidecar(args.output, argv)
    print(f"wrote {args.measure} matrix ({level}) for {bundle.n_tiles} tiles to {args.output}")
    return 0


def _cmd_solve(args, argv) -> int:
    bundle = _load_bundle(args.bundle)
    matrix = _load_matrix(args.cmat)
    variant = _variant(args.type)
    if matrix.variant != variant:
        raise CliError(f"variant mismatch: matrix is type {int(matrix.variant)}, "
                       f"--type asked for {args.type}")
    if matrix.n_tiles != bundle.n_tiles:
        raise CliError(f"matrix covers {matrix.n_tiles} tiles but bundle has {bundle.n_tiles}")
    dims = None
    if args.dims == "known":
        if bundle.rows is None:
            raise CliError("--dims known requires a bundle with rows/cols in its manifest")
        dims = (bundle.rows, bundle.cols)
    try:
        matrix = compat.postprocess(matrix, args.post)
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    cfg = solver.GaConfig(population_size=args.pop, generations=args.gens,
                          runs=args.runs, seed=args.seed)
    jobs = args.jobs if args.jobs else min(args.runs, os.cpu_count() or 1)
    best, _results = solver.run_many(matrix, cfg, dims, jobs=jobs)

    placements = best.best.placements()
    doc = {
        "variant": int(variant),
        "dims_known": dims is not None,
        "placements": [{"tile": p.tile, "row": p.row, "col": p.col, "rot": p.rot}
                       for p in placements],
        "fitness": best.best.fitness,
        "seed": args.seed,
        "generations": args.gens,
    }
    _atomic_write_text(args.output, json.dumps(doc, indent=2, sort_keys=True) + "\n")

    log_path = os.path.splitext(args.output)[0] + "_log.csv"
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["generation", "best_fitness", "mean_fitness"]
                    + [f"phase{i}_placements" for i in range(1, 7)])
    for row in best.log:
        writer.writerow([row.generation, f"{row.best_fitness:.6f}",
                         f"{row.mean_fitness:.6f}", *row.phase_placements])
    _atomic_write_text(log_path, buf.getvalue())
    _write_sidecar(args.output, argv)
    print(f"best of {args.runs} runs: fitness {best.best.fitness:.3f} "
          f"(run {best.seed}); wrote {args.output}")
    return 0


def _read_solution(path: str) -> tuple[dict, list[Placement]]:
    if not os.path.isfile(path):
        raise CliError(f"solution file not found: {path}")
    with open(path) as fh:
        doc = json.load(fh)
    placements = [Placement(p["tile"], p["row"], p["col"], p["rot"])
                  for p in doc["placements"]]
    return doc, placements


def _cmd_eval(args, argv) -> int:
    doc, placements = _read_solution(args.solution)
    bundle = _load_bundle(args.bundle)
    try:
        report = evaluation.neighbor_accuracy(
            placements, bundle,
            variant=Variant(doc.get("variant", 1)),
            dims_known=doc.get("dims_known"))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    header = ["variant", "dims_known", "neighbor_accuracy", "perfect",
              "correct_pairs", "total_pairs"]
    row = [int(report.variant), report.dims_known,
           f"{report.neighbor_accuracy:.6f}", report.perfect,
           report.numerator, report.denominator]
    if args.cmat:
        matrix = compat.postprocess(_load_matrix(args.cmat), "symmetric")
        sol = solver.make_chromosome(placements, matrix)
        gt = solver.make_chromosome(bundle.ground_truth, matrix)
        header += ["fitness_solution", "fitness_ground_truth"]
        row += [f"{sol.fitness:.6f}", f"{gt.fitness:.6f}"]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerow(row)
    _atomic_write_text(args.output, buf.getvalue())
    _write_sidecar(args.output, argv)
    print(f"neighbor accuracy {report.neighbor_accuracy:.4f} "
          f"({report.numerator}/{report.denominator}); wrote {args.output}")
    return 0


def _cmd_rank(args, argv) -> int:
    matrix = _load_matrix(args.cmat)
    bundle = _load_bundle(args.bundle)
    if not matrix.similarity:
        matrix = compat.to_similarity(matrix)
    try:
        hist = evaluation.rank_histogram(matrix, bundle)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    pct = hist.percentages()
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["rank", "count", "percentage"])
    for i, count in enumerate(hist.counts):
        writer.writerow([i + 1, int(count), f"{pct[i]:.4f}"])
    _atomic_write_text(args.output, buf.getvalue())
    series = {"rank": list(range(1, len(hist.counts) + 1)),
              "percentage": [float(f"{p:.6f}") for p in pct]}
    _atomic_write_text(os.path.splitext(args.output)[0] + ".json",
                       json.dumps(series, indent=2) + "\n")
    _write_sidecar(args.output, argv)
    print(f"rank-1: {hist.rank_percent(1):.2f}% over {hist.total} relations; "
          f"wrote {args.output}")
    return 0


def _cmd_render(args, argv) -> int:
    doc, placements = _read_solution(args.solution)
    bundle = _load_bundle(args.bundle)
    solution_img = model.reassemble(bundle, placements)
    if bundle.ground_truth is not None:
        gt_img = model.reassemble(bundle)
        gap = 8
        h = max(gt_img.shape[0], solution_img.shape[0])
        w = gt_img.shape[1] + gap + solution_img.shape[1]
        canvas = np.full((h, w, 3), 255, dtype=np.uint8)
        canvas[:gt_img.shape[0], :gt_img.shape[1]] = gt_img
        canvas[:solution_img.shape[0], gt_img.shape[1] + gap:] = solution_img
    else:
        canvas = solution_img
    buf = io.BytesIO()
    Image.fromarray(canvas).save(buf, format="PNG")
    _atomic_write_bytes(args.output, buf.getvalue())
    _write_sidecar(args.output, argv)
    print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilesolver",
        description="Square-tile puzzle reconstruction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cut", help="cut an image into a tile bundle")
    p.add_argument("image")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--tile-px", type=int, default=50)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_cut)

    p = sub.add_parser("generate", help="generate a synthetic bundle")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--style", choices=["noise", "gradient", "photo"], default="gradient")
    p.add_argument("--image", help="source image for --style photo")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tile-px", type=int, default=50)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("scramble", help="permute (and rotate) a bundle")
    p.add_argument("bundle")
    p.add_argument("--type", choices=["1", "2"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_scramble)

    p = sub.add_parser("score", help="build a compatibility matrix")
    p.add_argument("bundle")
    p.add_argument("--measure", choices=["ssd", "mgc", "oracle"], required=True)
    p.add_argument("--type", choices=["1", "2"], required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--raw", action="store_true",
                   help="store the raw measure without post-processing")
    g.add_argument("--normalized", action="store_true",
                   help="stop after per-edge min-max normalization")
    g.add_argument("--symmetric", action="store_true",
                   help="full pipeline: similarity, normalize, symmetrize (default)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("solve", help="run the kernel-growth GA")
    p.add_argument("bundle")
    p.add_argument("--cmat", required=True)
    p.add_argument("--type", choices=["1", "2"], required=True)
    p.add_argument("--dims", choices=["known", "unknown"], required=True)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--gens", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=0,
                   help="parallel GA runs (default: one per core, capped at --runs)")
    p.add_argument("--post", choices=["normalized", "symmetric"], default="symmetric",
                   help="post-processing applied to the matrix before solving")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("eval", help="score a solution against ground truth")
    p.add_argument("solution")
    p.add_argument("bundle")
    p.add_argument("--cmat", help="include fitness of solution vs ground truth")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("rank", help="rank histogram of a matrix on a bundle")
    p.add_argument("cmat")
    p.add_argument("bundle")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("render", help="raster a solution next to ground truth")
    p.add_argument("solution")
    p.add_argument("bundle")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
