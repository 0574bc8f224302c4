"""Command-line entry point: ``phrasemem <subcommand> ...``."""

import argparse
import json
import logging
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from .bleu import bleu as corpus_bleu
from .bonus import Ablation, bonus_values
from .candidate_index import dump, index_sentence
from .decoder import DecodeConfig, decode_corpus
from .phrase_table import PhraseTableError, load_table, load_vocab
from .recommender import drop_first_words, recommend, recommend_all_words, state_for
from .scorer import LexiconScorer, load_lexicon

logger = logging.getLogger("phrasemem")


def _read_lines(path) -> List[List[str]]:
    with open(path, encoding="utf-8") as f:
        return [line.split() for line in f]


def _load_table(args):
    vocab_src = load_vocab(args.src_vocab, args.vocab_size) if args.src_vocab else None
    vocab_tgt = load_vocab(args.tgt_vocab, args.vocab_size) if args.tgt_vocab else None
    return load_table(args.table, vocab_src, vocab_tgt, args.max_targets,
                      unk=args.unk, strict=not args.lenient)


def _config(args) -> DecodeConfig:
    cfg = DecodeConfig.from_file(args.config) if getattr(args, "config", None) else DecodeConfig()
    overrides = {}
    for name in ("beam_width", "lam", "top_n", "max_phrase_len", "ablation"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return replace(cfg, **overrides)


def _sources(args, table) -> List[List[str]]:
    if getattr(args, "source", None):
        sents = [args.source.split()]
    else:
        sents = _read_lines(args.source_file)
    return [table.map_unk(s) for s in sents]


def cmd_build_index(args) -> int:
    table = _load_table(args)
    cfg = _config(args)
    for sent in _sources(args, table):
        if not sent:
            continue
        index = index_sentence(sent, table, cfg.top_n, cfg.max_phrase_len)
        sys.stdout.write(dump(index))
    return 0


def _origin_json(match):
    o = match.origin
    return {
        "source": " ".join(o.entry.source_phrase),
        "target": " ".join(o.entry.target_phrase),
        "span": [o.span.start, o.span.end],
        "p_pht": o.p_pht,
        "prefix_len": match.prefix_len,
    }


def cmd_recommend(args) -> int:
    table = _load_table(args)
    cfg = _config(args)
    source = table.map_unk(args.source.split())
    if not source:
        raise SystemExit("error: empty source sentence")
    index = index_sentence(source, table, cfg.top_n, cfg.max_phrase_len)
    partial = args.partial.split()

    if cfg.ablation is Ablation.NO_MATCHING:
        recs = recommend_all_words(index)
    elif cfg.ablation is Ablation.BASELINE:
        recs = []
    else:
        recs = recommend(state_for(index, partial), index)
        if cfg.ablation is Ablation.NO_FIRST:
            recs = drop_first_words(recs)

    if args.attention:
        with open(args.attention, encoding="utf-8") as f:
            attn = np.array([float(x) for x in f.read().split()])
        if len(attn) != len(source):
            raise SystemExit("error: attention length differs from source length")
    else:
        attn = np.full(len(source), 1.0 / len(source))
    bonuses = bonus_values(recs, attn, dedup=cfg.dedup)
    for rec in recs:
        print(json.dumps({
            "word": rec.word,
            "bonus": bonuses[rec.word],
            "origins": [_origin_json(m) for m in rec.matches],
        }, ensure_ascii=False))
    return 0


def _scorer(args) -> LexiconScorer:
    return LexiconScorer(load_lexicon(args.lexicon), floor=args.floor)


def cmd_decode(args) -> int:
    table = _load_table(args)
    cfg = _config(args)
    scorer = _scorer(args)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    failures = 0
    try:
        for res in decode_corpus(_sources(args, table), scorer, table, cfg,
                                 workers=args.workers, strict=args.strict):
            if res.error:
                failures += 1
            if args.json:
                best = res.hypotheses[0] if res.hypotheses else None
                out.write(json.dumps({
                    "id": res.sentence_id,
                    "tokens": list(best.tokens) if best else [],
                    "log_prob": best.log_prob if best else None,
                    "forced": best.forced if best else None,
                    "error": res.error,
                }, ensure_ascii=False) + "\n")
            else:
                out.write(" ".join(res.best) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 1 if failures else 0


def cmd_eval(args) -> int:
    hyps = [" ".join(t) for t in _read_lines(args.hyp)]
    ref_sets = [[" ".join(t) for t in _read_lines(p)] for p in args.ref]
    if any(len(r) != len(hyps) for r in ref_sets):
        raise SystemExit("error: hypothesis and reference files differ in length")
    report = corpus_bleu(hyps, list(zip(*ref_sets)), smooth=args.smooth)
    if args.json:
        print(json.dumps({"bleu": report.bleu,
                          "ngram_precisions": list(report.ngram_precisions),
                          "brevity_penalty": report.brevity_penalty,
                          "hyp_len": report.hyp_len, "ref_len": report.ref_len}))
    else:
        print(report)
    return 0


ABLATION_ROWS = [("Baseline", Ablation.BASELINE), ("Our method", Ablation.FULL),
                 ("system(no matching)", Ablation.NO_MATCHING),
                 ("system(no first)", Ablation.NO_FIRST)]


def run_ablation(sources, references, scorer, table, cfg, workers=1):
    """BLEU for each recommendation variant; returns [(label, ablation, report)]."""
    rows = []
    for label, ablation in ABLATION_ROWS:
        run_cfg = replace(cfg, ablation=ablation)
        hyps = [r.best for r in decode_corpus(sources, scorer, table, run_cfg, workers)]
        rows.append((label, ablation, corpus_bleu(hyps, references)))
    return rows


def format_ablation(rows) -> str:
    lines = [f"{'#':>2}  {'Method':<22}{'BLEU':>8}{'delta':>8}"]
    base = rows[0][2].bleu
    for i, (label, _, report) in enumerate(rows, start=1):
        lines.append(f"{i:>2}  {label:<22}{report.bleu:>8.2f}{report.bleu - base:>+8.2f}")
    return "\n".join(lines)


def cmd_ablate(args) -> int:
    table = _load_table(args)
    cfg = _config(args)
    sources = _sources(args, table)
    ref_sets = [[" ".join(t) for t in _read_lines(p)] for p in args.ref]
    if any(len(r) != len(sources) for r in ref_sets):
        raise SystemExit("error: source and reference files differ in length")
    rows = run_ablation(sources, list(zip(*ref_sets)), _scorer(args), table, cfg, args.workers)
    print(format_ablation(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phrasemem",
        description="Phrase-table word recommendations for sequence decoding.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def table_args(p):
        p.add_argument("--table", required=True, help="Moses phrase table")
        p.add_argument("--src-vocab")
        p.add_argument("--tgt-vocab")
        p.add_argument("--vocab-size", type=int, default=30000)
        p.add_argument("--unk", default="UNK")
        p.add_argument("--max-targets", type=int, default=10,
                       help="targets kept per source phrase")
        p.add_argument("--lenient", action="store_true",
                       help="skip malformed table lines instead of failing")
        p.add_argument("--config", help="key = value decode config file")
        p.add_argument("--top-n", dest="top_n", type=int)
        p.add_argument("--max-phrase-len", dest="max_phrase_len", type=int)
        p.add_argument("--ablation", choices=[a.value for a in Ablation])
        p.add_argument("--lambda", dest="lam", type=float)

    def source_args(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--source", help="one tokenized source sentence")
        g.add_argument("--source-file", help="one tokenized sentence per line")

    def scorer_args(p):
        p.add_argument("--lexicon", required=True, help="'source target weight' lines")
        p.add_argument("--floor", type=float, default=1e-3)
        p.add_argument("--beam", dest="beam_width", type=int)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("build-index", help="dump the candidate-phrase trie")
    table_args(p)
    source_args(p)
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("recommend", help="recommendations for a partial translation")
    table_args(p)
    p.add_argument("--source", required=True)
    p.add_argument("--partial", default="")
    p.add_argument("--attention", help="file of whitespace-separated weights (default uniform)")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("decode", help="beam-search a corpus with the lexicon scorer")
    table_args(p)
    source_args(p)
    scorer_args(p)
    p.add_argument("--output")
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true", help="abort on the first failing sentence")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="case-insensitive 4-gram BLEU")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True, nargs="+")
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="compare baseline / full / no_matching / no_first")
    table_args(p)
    source_args(p)
    scorer_args(p)
    p.add_argument("--ref", required=True, nargs="+")
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PhraseTableError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
