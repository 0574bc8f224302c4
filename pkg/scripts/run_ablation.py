#!/usr/bin/env python3
"""Baseline / full / no_matching / no_first BLEU on synthetic corpora, several seeds."""

import argparse
from dataclasses import replace

from phrasemem.cli import format_ablation, run_ablation
from phrasemem.decoder import DecodeConfig
from phrasemem.synthetic import make_synthetic_task


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--sentences", type=int, default=200)
    ap.add_argument("--beam", type=int, default=12)
    ap.add_argument("--lambdas", type=float, nargs="+", default=[0.5],
                    help="several values give a small grid search")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    for lam in args.lambdas:
        cfg = DecodeConfig(beam_width=args.beam, lam=lam)
        totals = None
        for seed in range(args.seeds):
            task = make_synthetic_task(seed, n_sentences=args.sentences)
            refs = [[" ".join(r)] for r in task.references]
            rows = run_ablation(task.sources, refs, task.scorer(), task.table, cfg, args.workers)
            print(f"== lambda={lam} seed={seed}")
            print(format_ablation(rows))
            scores = [rep.bleu for _, _, rep in rows]
            totals = scores if totals is None else [t + s for t, s in zip(totals, scores)]
        means = ", ".join(f"{label}={t / args.seeds:.2f}"
                          for (label, _, _), t in zip(rows, totals))
        print(f"== lambda={lam} mean over {args.seeds} seeds: {means}\n")


if __name__ == "__main__":
    main()
