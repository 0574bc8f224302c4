"""Case-insensitive corpus BLEU over pre-tokenized text.

Modified n-gram precision with clipping against multiple references and
a brevity penalty computed from the closest reference length (the
shorter one on ties). Without smoothing the score is zero as soon as one
n-gram order has no match. An order for which the hypotheses contain no
n-grams at all counts as precision 1.
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

MAX_ORDER = 4

Sentence = Union[str, Sequence[str]]


@dataclass(frozen=True)
class BleuReport:
    bleu: float
    ngram_precisions: Tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    matches: Tuple[int, ...] = ()
    totals: Tuple[int, ...] = ()

    def __str__(self) -> str:
        precs = "/".join(f"{100 * p:.1f}" for p in self.ngram_precisions)
        return (f"BLEU = {self.bleu:.2f}, {precs} (BP={self.brevity_penalty:.3f}, "
                f"ratio={self.hyp_len / max(1, self.ref_len):.3f}, "
                f"hyp_len={self.hyp_len}, ref_len={self.ref_len})")


def _tokens(sentence: Sentence) -> List[str]:
    if isinstance(sentence, str):
        sentence = sentence.split()
    return [tok.lower() for tok in sentence]


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def closest_ref_length(hyp_len: int, ref_lens: Sequence[int]) -> int:
    return min(ref_lens, key=lambda r: (abs(r - hyp_len), r))


def bleu(hypotheses: Sequence[Sentence], references: Sequence[Sequence[Sentence]],
         max_order: int = MAX_ORDER, smooth: bool = False) -> BleuReport:
    """Corpus BLEU.

    ``references[i]`` holds every reference for ``hypotheses[i]``.
    ``smooth`` adds one to the numerator and denominator of orders above 1,
    which keeps tiny corpora from collapsing to zero.
    """
    if len(hypotheses) != len(references):
        raise ValueError(
            f"{len(hypotheses)} hypotheses but {len(references)} reference sets")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = ref_len = 0

    for hyp, refs in zip(hypotheses, references):
        if not refs:
            raise ValueError("every hypothesis needs at least one reference")
        hyp_toks = _tokens(hyp)
        ref_toks = [_tokens(r) for r in refs]
        hyp_len += len(hyp_toks)
        ref_len += closest_ref_length(len(hyp_toks), [len(r) for r in ref_toks])
        for n in range(1, max_order + 1):
            counts = ngram_counts(hyp_toks, n)
            max_ref = Counter()
            for r in ref_toks:
                max_ref |= ngram_counts(r, n)
            matches[n - 1] += sum(min(c, max_ref[g]) for g, c in counts.items())
            totals[n - 1] += max(0, len(hyp_toks) - n + 1)

    precisions = []
    for n in range(max_order):
        m, t = matches[n], totals[n]
        if smooth and n > 0:
            m, t = m + 1, t + 1
        # an order with no n-grams at all (every sentence too short) is vacuous
        precisions.append(m / t if t > 0 else 1.0)

    if hyp_len == 0:
        bp = 0.0
    elif hyp_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)

    if min(precisions) > 0.0 and bp > 0.0:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / max_order)
    else:
        score = 0.0
    return BleuReport(score, tuple(precisions), bp if hyp_len else 0.0, hyp_len, ref_len,
                      tuple(matches), tuple(totals))
