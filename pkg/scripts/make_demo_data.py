#!/usr/bin/env python3
"""Write one synthetic task to disk so the CLI can be tried end to end.

Produces src.txt, ref.txt, table.txt (Moses format), lexicon.txt and
decode.cfg in the output directory.
"""

import argparse
from pathlib import Path

from phrasemem.phrase_table import format_entry
from phrasemem.synthetic import make_synthetic_task


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sentences", type=int, default=200)
    args = ap.parse_args()

    task = make_synthetic_task(args.seed, n_sentences=args.sentences)
    out = args.outdir
    out.mkdir(parents=True, exist_ok=True)
    (out / "src.txt").write_text("".join(" ".join(s) + "\n" for s in task.sources))
    (out / "ref.txt").write_text("".join(" ".join(r) + "\n" for r in task.references))
    (out / "table.txt").write_text("".join(format_entry(e) + "\n" for e in task.table))
    (out / "lexicon.txt").write_text("".join(
        f"{s} {t} {w!r}\n" for s, tgts in task.lexicon.items() for t, w in tgts.items()))
    (out / "decode.cfg").write_text(
        "beam_width = 12\nlambda = 0.5\ntop_n = 10\nmax_phrase_len = 7\n"
        "ablation = full\nmax_len_factor = 2.0\n")
    print(f"wrote demo data to {out}")


if __name__ == "__main__":
    main()
