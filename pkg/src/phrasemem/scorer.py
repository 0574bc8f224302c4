"""Base scorers: anything that yields next-word logits plus attention.

The decoder only needs the :class:`Scorer` protocol. :class:`LexiconScorer`
is a small deterministic stand-in for a neural model, used by the tests,
the CLI and the synthetic experiments.
"""

import math
from typing import Dict, Mapping, Optional, Protocol, Sequence, Tuple

import numpy as np

EOS = "</s>"


class Scorer(Protocol):
    vocab: Sequence[str]
    eos: str
    # False if concurrent score() calls are unsafe
    thread_safe: bool

    def score(self, source: Sequence[str], history: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        """Return (scores over ``vocab``, attention over ``source``) for the next step."""
        ...


class LexiconScorer:
    """Word-by-word lexicon translation with a monotone one-hot attention.

    At step ``i`` the scorer attends source position
    ``floor(i * len(source) / expected_len)`` and gives every target word
    the score ``log(weight / floor)`` where ``weight`` is its lexicon
    weight for the attended source word; words outside the lexicon score
    zero. Once ``expected_len`` words have been produced, only the
    end-of-sentence token has a positive score.

    Shifting by ``log(floor)`` leaves the softmax unchanged but keeps the
    scores of lexicon words positive, so multiplicative bonuses raise
    their probability.
    """

    thread_safe = True

    def __init__(self, lexicon: Mapping[str, Mapping[str, float]],
                 vocab: Optional[Sequence[str]] = None,
                 eos: str = EOS,
                 floor: float = 1e-3,
                 length_ratio: float = 1.0) -> None:
        if not 0 < floor < 1:
            raise ValueError("floor must lie in (0, 1)")
        self.lexicon = {src: dict(tgts) for src, tgts in lexicon.items()}
        if vocab is None:
            words = {t for tgts in self.lexicon.values() for t in tgts}
            words.discard(eos)
            vocab = sorted(words) + [eos]
        self.vocab = list(vocab)
        if eos not in self.vocab:
            self.vocab.append(eos)
        self.eos = eos
        self.floor = floor
        self.length_ratio = length_ratio
        self.vocab_index = {w: i for i, w in enumerate(self.vocab)}
        self._rows: Dict[str, np.ndarray] = {}
        self._eos_row = np.zeros(len(self.vocab))
        self._eos_row[self.vocab_index[eos]] = math.log(1.0 / floor)

    def expected_len(self, n: int) -> int:
        return max(1, int(round(self.length_ratio * n)))

    def _row(self, word: str) -> np.ndarray:
        row = self._rows.get(word)
        if row is None:
            row = np.zeros(len(self.vocab))
            for tgt, w in self.lexicon.get(word, {}).items():
                idx = self.vocab_index.get(tgt)
                if idx is not None and w > 0:
                    row[idx] = math.log(w / self.floor)
            row.setflags(write=False)
            self._rows[word] = row
        return row

    def attended(self, n: int, i: int) -> int:
        return min(n - 1, i * n // self.expected_len(n))

    def score(self, source, history):
        n = len(source)
        i = len(history)
        j = self.attended(n, i)
        attn = np.zeros(n)
        attn[j] = 1.0
        if i >= self.expected_len(n):
            return self._eos_row, attn
        return self._row(source[j]), attn

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_rows"] = {}
        return state


def load_lexicon(path) -> Dict[str, Dict[str, float]]:
    """Read ``source target weight`` lines into a nested mapping."""
    lexicon: Dict[str, Dict[str, float]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'source target weight'")
            src, tgt, weight = parts
            lexicon.setdefault(src, {})[tgt] = float(weight)
    return lexicon
