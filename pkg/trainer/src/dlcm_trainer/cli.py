"""Command line: train on bundle directories, export CMAT score files."""

from __future__ import annotations

import argparse
import sys

from .bundles import load_bundle, load_corpus
from .export import export_matrix
from .training import load_checkpoint, train
from .triplets import TrainConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dlcm-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the four-subnetwork measure")
    p.add_argument("--train", nargs="+", required=True, help="training bundle dirs")
    p.add_argument("--val", nargs="*", default=[], help="validation bundle dirs")
    p.add_argument("--epochs", type=int, default=850)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.0001)
    p.add_argument("--pieces", type=int, default=25,
                   help="pieces sampled per puzzle per epoch")
    p.add_argument("--val-every", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True, help="checkpoint directory")

    p = sub.add_parser("export", help="score a bundle with a checkpoint")
    p.add_argument("bundle")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--type", choices=["1", "2"], required=True)
    p.add_argument("--combine", default="sum",
                   choices=["sum", "red", "green", "blue", "rgb"])
    p.add_argument("-o", "--output", required=True)

    args = parser.parse_args(argv)
    if args.command == "train":
        cfg = TrainConfig(lr=args.lr, batch=args.batch, epochs=args.epochs,
                          pieces_per_puzzle_per_epoch=args.pieces,
                          seed=args.seed, val_every=args.val_every)
        net, log = train(load_corpus(args.train), load_corpus(args.val), cfg, args.out)
        last = log[-1]
        print(f"trained {args.epochs} epochs; "
              f"final losses {[round(last.losses[n], 4) for n in sorted(last.losses)]}; "
              f"checkpoints in {args.out}")
        return 0
    net = load_checkpoint(args.checkpoint)
    bundle = load_bundle(args.bundle)
    export_matrix(net, bundle, int(args.type), args.output, combine=args.combine)
    print(f"wrote {args.output} ({bundle.n_tiles} tiles, combine={args.combine})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
