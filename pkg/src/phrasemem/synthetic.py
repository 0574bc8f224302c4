"""Constructed fixtures and synthetic corpora.

None of this needs a trained model: translation quality comes from a
:class:`LexiconScorer` whose lexicon is deliberately wrong in places,
and a phrase table that knows the right phrases.
"""

import random
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .phrase_table import PhraseEntry, PhraseTable
from .scorer import LexiconScorer


def entry(source: str, target: str, p: float) -> PhraseEntry:
    return PhraseEntry(tuple(source.split()), tuple(target.split()), p, (p, p, p, p))


# --- the worked example ------------------------------------------------------

FIG2_SENTENCE = "ta dingju zai meiguo , bing zhu zai mierwoji jiaoqu".split()

def fig2_table() -> PhraseTable:
    return PhraseTable.from_entries([
        entry("ta dingju zai", "he settled in", 0.6),
        entry("ta dingju zai", "he settled down", 0.4),
        entry("meiguo", "the US", 0.8),
        entry("mierwoji jiaoqu", "suburb of Milwaukee", 0.7),
    ])


# --- a single decision flipped by the phrase bonus ---------------------------

@dataclass
class FlipFixture:
    source: List[str]
    scorer: LexiconScorer
    table: PhraseTable
    lam: float
    phrase_translation: Tuple[str, ...]
    baseline_translation: Tuple[str, ...]


def flip_fixture(lam: float = 0.9) -> FlipFixture:
    """Two-word sentence where the lexicon slightly prefers a wrong second word.

    ``shuncha`` scores ``deficit`` above ``surplus`` by a small margin;
    the phrase pair ``maoyi shuncha -> trade surplus`` recommends
    ``surplus`` once ``trade`` has been produced.
    """
    lexicon = {
        "maoyi": {"trade": 0.9},
        "shuncha": {"deficit": 0.55, "surplus": 0.45},
    }
    table = PhraseTable.from_entries([entry("maoyi shuncha", "trade surplus", 0.95)])
    return FlipFixture(["maoyi", "shuncha"], LexiconScorer(lexicon), table, lam,
                       ("trade", "surplus"), ("trade", "deficit"))


# --- corpora with planted phrase-pair signal -----------------------------------

@dataclass
class SyntheticTask:
    sources: List[List[str]]
    references: List[List[str]]
    table: PhraseTable
    lexicon: Dict[str, Dict[str, float]]

    def scorer(self) -> LexiconScorer:
        return LexiconScorer(self.lexicon)


def make_synthetic_task(seed: int, n_sentences: int = 200, n_phrases: int = 40,
                        coverage: float = 0.8, p_first_error: float = 0.4,
                        p_inner_error: float = 0.5,
                        chunks_per_sentence: Tuple[int, int] = (2, 5)) -> SyntheticTask:
    """Monotone word-for-word task with two kinds of lexicon mistakes.

    Every pool phrase has its own source words ``s*`` whose correct
    translations ``t*`` are one-to-one. Mistakes are planted per phrase:

    * at the first word, a distractor outside every phrase wins by a
      small margin;
    * at the middle word of a three-word phrase, the phrase's own last
      word wins by a small margin.

    Only ``coverage`` of the pool phrases make it into the phrase table,
    together with a few low-probability alternative targets.
    """
    rng = random.Random(seed)
    lexicon: Dict[str, Dict[str, float]] = {}
    pool: List[Tuple[List[str], List[str]]] = []
    counter = 0
    for _ in range(n_phrases):
        length = rng.choices([1, 2, 3], weights=[1, 2, 3])[0]
        src = [f"s{counter + i}" for i in range(length)]
        tgt = [f"t{counter + i}" for i in range(length)]
        counter += length
        pool.append((src, tgt))
        for s, t in zip(src, tgt):
            lexicon[s] = {t: rng.uniform(0.35, 0.45)}
        if rng.random() < p_first_error:
            w = lexicon[src[0]][tgt[0]]
            lexicon[src[0]][f"d{src[0][1:]}"] = w * rng.uniform(1.05, 1.2)
        if length == 3 and rng.random() < p_inner_error:
            w = lexicon[src[1]][tgt[1]]
            lexicon[src[1]][tgt[2]] = w * rng.uniform(1.05, 1.2)

    entries = []
    all_targets = [t for _, tgt in pool for t in tgt]
    for src, tgt in pool:
        if rng.random() >= coverage:
            continue
        entries.append(entry(" ".join(src), " ".join(tgt), rng.uniform(0.6, 0.95)))
        for _ in range(rng.randint(0, 2)):
            alt = [rng.choice([w for w in all_targets if w not in tgt]) for _ in tgt]
            entries.append(entry(" ".join(src), " ".join(alt), rng.uniform(0.05, 0.3)))
    table = PhraseTable.from_entries(entries)

    sources, references = [], []
    for _ in range(n_sentences):
        chunks = [rng.choice(pool) for _ in range(rng.randint(*chunks_per_sentence))]
        sources.append([w for src, _ in chunks for w in src])
        references.append([w for _, tgt in chunks for w in tgt])
    return SyntheticTask(sources, references, table, lexicon)


# --- large random tables for timing ------------------------------------------

def make_random_table(n_entries: int = 100_000, src_vocab: int = 2000,
                      tgt_vocab: int = 3000, max_len: int = 3,
                      seed: int = 0) -> PhraseTable:
    rng = random.Random(seed)
    entries = []
    seen = set()
    while len(entries) < n_entries:
        src = " ".join(f"s{rng.randrange(src_vocab)}" for _ in range(rng.randint(1, max_len)))
        if src in seen:  # keep every group under the per-source cap
            continue
        seen.add(src)
        for _ in range(rng.randint(1, 10)):
            tgt = " ".join(f"t{rng.randrange(tgt_vocab)}" for _ in range(rng.randint(1, max_len)))
            entries.append(entry(src, tgt, rng.uniform(0.01, 1.0)))
    return PhraseTable.from_entries(entries[:n_entries])


def sentence_from_table(table: PhraseTable, length: int, seed: int = 0) -> List[str]:
    """Concatenate random source phrases of the table until ``length`` tokens."""
    rng = random.Random(seed)
    keys = sorted(table.entries)
    out: List[str] = []
    while len(out) < length:
        out.extend(rng.choice(keys))
    return out[:length]
