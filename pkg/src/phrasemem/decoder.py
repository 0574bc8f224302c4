"""Beam search with phrase-table recommendations at every step.

Per step and per live hypothesis: ask the base scorer for logits and
attention, collect the hypothesis' recommended words from its trie
cursors, turn them into bonuses, rescale the logits and expand.
"""

import configparser
import functools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .bonus import (Ablation, BonusConfig, ContractError, StepStats, bonus_values,
                    check_attention, log_rescore, log_softmax)
from .candidate_index import (DEFAULT_MAX_PHRASE_LEN, DEFAULT_TOP_N, CandidateIndex,
                              TrieNode, index_sentence)
from .phrase_table import PhraseTable
from .recommender import (MatcherState, Recommendation, advance, as_multiset,
                          drop_first_words, recommend, recommend_all_words,
                          recommend_brute)
from .scorer import Scorer

logger = logging.getLogger(__name__)

DEFAULT_BEAM = 12


@dataclass(frozen=True)
class DecodeConfig:
    beam_width: int = DEFAULT_BEAM
    lam: float = 0.5
    top_n: int = DEFAULT_TOP_N
    max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN
    ablation: Ablation = Ablation.FULL
    max_len_factor: float = 2.0
    max_len_offset: int = 5
    length_norm: bool = False
    dedup: bool = False
    # re-derive every hypothesis' recommendations by brute force
    check_matcher: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ablation", Ablation(self.ablation))
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        self.bonus_config()  # validates lambda

    def bonus_config(self) -> BonusConfig:
        return BonusConfig(self.lam, self.ablation, self.dedup)

    def max_len(self, source_len: int) -> int:
        return max(1, int(self.max_len_factor * source_len + self.max_len_offset))

    @classmethod
    def from_mapping(cls, values: Dict[str, str]) -> "DecodeConfig":
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in values.items():
            name = "lam" if key == "lambda" else key
            if name not in types:
                raise ValueError(f"unknown config key {key!r}")
            kind = types[name]
            if kind in (bool, "bool"):
                kwargs[name] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif kind in (int, "int"):
                kwargs[name] = int(raw)
            elif kind in (float, "float"):
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw.strip()
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "DecodeConfig":
        """Read a flat ``key = value`` file; ``lambda`` maps to ``lam``."""
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        with open(path, encoding="utf-8") as f:
            parser.read_string("[decode]\n" + f.read())
        return cls.from_mapping(dict(parser["decode"]))


@dataclass(frozen=True)
class Hypothesis:
    tokens: Tuple[str, ...]
    log_prob: float
    matcher: MatcherState = field(repr=False, compare=False)
    finished: bool = False
    forced: bool = False
    step_log_probs: Tuple[float, ...] = field(default=(), repr=False)

    def score(self, length_norm: bool = False) -> float:
        if length_norm:
            return self.log_prob / max(1, len(self.step_log_probs))
        return self.log_prob


class _BonusTables:
    """Per-node arrays used to compute bonuses as one vector operation.

    Equivalent to :func:`bonus_values` over :func:`recommend`, minus
    words outside the scorer vocabulary.
    """

    def __init__(self, index: CandidateIndex, vocab_index: Dict[str, int]):
        self.vocab_index = vocab_index
        self.size = len(vocab_index)
        self._cache: Dict[TrieNode, tuple] = {}
        self.all_words = self._compile(
            [(r.word, m.origin) for r in recommend_all_words(index) for m in r.matches])

    def _compile(self, pairs):
        ids, starts, ends, probs = [], [], [], []
        oov = 0
        for word, origin in pairs:
            idx = self.vocab_index.get(word)
            if idx is None:
                oov += 1
                continue
            ids.append(idx)
            starts.append(origin.span.start)
            ends.append(origin.span.end)
            probs.append(origin.p_pht)
        ends_a = np.array(ends, dtype=np.intp)
        starts_a = np.array(starts, dtype=np.intp)
        width = np.maximum(ends_a - starts_a, 1)
        return (np.array(ids, dtype=np.intp), starts_a, ends_a,
                np.array(probs, dtype=np.float64) / width, oov)

    def node(self, node: TrieNode):
        table = self._cache.get(node)
        if table is None:
            table = self._cache[node] = self._compile(node.continuations)
        return table

    def bonus(self, tables, attn: np.ndarray, stats: Optional[StepStats]) -> np.ndarray:
        cum = np.concatenate(([0.0], np.cumsum(attn)))
        total = np.zeros(self.size)
        for ids, starts, ends, weights, oov in tables:
            if len(ids):
                total += np.bincount(ids, weights=(cum[ends] - cum[starts]) * weights,
                                     minlength=self.size)
            if stats is not None:
                stats.dropped_oov += oov
        return total


def _top_k(logp: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest entries; ties go to the lower index."""
    if k >= len(logp):
        return np.argsort(-logp, kind="stable")
    kth = np.partition(logp, len(logp) - k)[len(logp) - k]
    cand = np.flatnonzero(logp >= kth)
    order = np.lexsort((cand, -logp[cand]))
    return cand[order[:k]]


class BeamDecoder:
    """Decodes a single sentence; see :func:`decode`."""

    def __init__(self, source: Sequence[str], scorer: Scorer, table: PhraseTable,
                 cfg: DecodeConfig, stats: Optional[StepStats] = None,
                 index: Optional[CandidateIndex] = None):
        self.source = tuple(source)
        if not self.source:
            raise ValueError("source sentence is empty")
        self.scorer = scorer
        self.cfg = cfg
        self.bcfg = cfg.bonus_config()
        self.stats = stats
        if index is None:
            index = index_sentence(self.source, table, cfg.top_n, cfg.max_phrase_len)
        self.index = index
        self.vocab = list(scorer.vocab)
        self.vocab_index = {w: i for i, w in enumerate(self.vocab)}
        self.eos_id = self.vocab_index[scorer.eos]
        self._tables = _BonusTables(index, self.vocab_index) if self.bcfg.enabled else None
        self._all_words = recommend_all_words(index) if self.bcfg.enabled else []

    def recommendations(self, hyp: Hypothesis) -> List[Recommendation]:
        ablation = self.bcfg.ablation
        if not self.bcfg.enabled:
            return []
        if ablation is Ablation.NO_MATCHING:
            return self._all_words
        recs = recommend(hyp.matcher, self.index)
        if ablation is Ablation.NO_FIRST:
            recs = drop_first_words(recs)
        return recs

    def bonus_vector(self, hyp: Hypothesis, attn: np.ndarray) -> np.ndarray:
        ablation = self.bcfg.ablation
        if ablation is Ablation.NO_MATCHING:
            tables = [self._tables.all_words]
        else:
            tables = [self._tables.node(n) for n in hyp.matcher.cursors
                      if not (ablation is Ablation.NO_FIRST and n.depth == 0)]
        return self._tables.bonus(tables, attn, self.stats)

    def step_log_probs(self, hyp: Hypothesis) -> np.ndarray:
        scores, attn = self.scorer.score(self.source, hyp.tokens)
        attn = check_attention(attn)
        if len(attn) != len(self.source):
            raise ContractError("attention length differs from source length")
        scores = np.asarray(scores, dtype=np.float64)
        if scores.shape != (len(self.vocab),):
            raise ContractError("score vector does not match vocabulary size")
        if not np.all(np.isfinite(scores)):
            raise ContractError("scores must be finite")

        if self.cfg.check_matcher:
            self._check(hyp)
        if not self.bcfg.enabled:
            if self.stats is not None:
                self.stats.steps += 1
            return log_softmax(scores)
        if self.bcfg.dedup:
            bonuses = bonus_values(self.recommendations(hyp), attn, dedup=True)
            bonuses.pop(self.scorer.eos, None)
            return log_rescore(scores, bonuses, self.bcfg, self.vocab_index, self.stats)

        v = self.bonus_vector(hyp, attn)
        v[self.eos_id] = 0.0
        scaled = scores * (1.0 + self.bcfg.lam * v)
        if self.stats is not None:
            boosted = v > 0
            self.stats.steps += 1
            self.stats.recommendations += int(np.count_nonzero(boosted))
            self.stats.nonzero_bonus += int(np.count_nonzero(boosted))
            self.stats.max_bonus = max(self.stats.max_bonus, float(v.max(initial=0.0)))
            self.stats.negative_logit_bonus += int(np.count_nonzero(boosted & (scores < 0)))
        return log_softmax(scaled)

    def _check(self, hyp: Hypothesis) -> None:
        fast = as_multiset(recommend(hyp.matcher, self.index))
        slow = as_multiset(recommend_brute(self.index, hyp.tokens))
        if fast != slow:
            raise AssertionError(f"matcher state diverged at {hyp.tokens!r}")

    def run(self) -> List[Hypothesis]:
        cfg = self.cfg
        beam = cfg.beam_width
        live = [Hypothesis((), 0.0, MatcherState.initial(self.index))]
        finished: List[Hypothesis] = []
        max_len = cfg.max_len(len(self.source))

        for _ in range(max_len):
            candidates = []
            for h in live:
                logp = self.step_log_probs(h)
                for idx in _top_k(logp, beam):
                    candidates.append((h.log_prob + float(logp[idx]), h, int(idx), float(logp[idx])))
            candidates.sort(key=lambda c: (-c[0], c[1].tokens, c[2]))

            live = []
            for total, h, idx, lp in candidates[:beam]:
                steps = h.step_log_probs + (lp,)
                if idx == self.eos_id:
                    finished.append(Hypothesis(h.tokens, total, h.matcher, True, False, steps))
                else:
                    tok = self.vocab[idx]
                    live.append(Hypothesis(h.tokens + (tok,), total,
                                           advance(h.matcher, self.index, tok), False, False, steps))
            if not live or len(finished) >= beam:
                break
            # scores only decrease, so no live hypothesis can overtake
            if not cfg.length_norm and finished and \
                    max(f.log_prob for f in finished) >= live[0].log_prob:
                break
        else:
            finished.extend(replace(h, finished=True, forced=True) for h in live)

        finished.sort(key=lambda h: (-h.score(cfg.length_norm), h.tokens))
        return finished


def decode(source: Sequence[str], scorer: Scorer, table: PhraseTable,
           cfg: Optional[DecodeConfig] = None, stats: Optional[StepStats] = None,
           index: Optional[CandidateIndex] = None) -> List[Hypothesis]:
    """Beam-search translate one sentence.

    Returns finished hypotheses, best first. When ``max_len`` is hit the
    surviving hypotheses are returned with ``forced=True``.
    """
    return BeamDecoder(source, scorer, table, cfg or DecodeConfig(), stats, index).run()


@dataclass
class CorpusResult:
    sentence_id: int
    hypotheses: List[Hypothesis]
    error: Optional[str] = None

    @property
    def best(self) -> Tuple[str, ...]:
        return self.hypotheses[0].tokens if self.hypotheses else ()


def _decode_one(item, scorer, table, cfg, strict):
    i, source = item
    try:
        return CorpusResult(i, decode(source, scorer, table, cfg))
    except Exception as exc:
        if strict:
            raise
        logger.warning("sentence %d failed: %s", i, exc)
        return CorpusResult(i, [], f"{type(exc).__name__}: {exc}")


def decode_corpus(sources: Iterable[Sequence[str]], scorer: Scorer, table: PhraseTable,
                  cfg: Optional[DecodeConfig] = None, workers: int = 1,
                  strict: bool = False) -> Iterator[CorpusResult]:
    """Decode a stream of sentences, preserving order.

    With ``workers > 1`` sentences are spread over worker processes;
    results are identical to a sequential run.
    """
    cfg = cfg or DecodeConfig()
    work = functools.partial(_decode_one, scorer=scorer, table=table, cfg=cfg, strict=strict)
    items = enumerate(tuple(s) for s in sources)
    if workers <= 1:
        yield from map(work, items)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(work, items, chunksize=8)
