"""Bonus values for recommended words and rescoring of the next-word scores.

The bonus of a word sums, over each phrase pair it was recommended from,
the attention mass on the pair's source span (averaged over the span's
length) times the pair's translation probability. The decoder's logits
are then scaled by ``1 + lam * bonus`` before the softmax.
"""

import enum
import json
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, Mapping, Optional

import numpy as np

from .candidate_index import SourceSpan
from .recommender import Recommendation

BonusMap = Dict[str, float]


class ContractError(ValueError):
    """An input violated the documented preconditions."""


class Ablation(str, enum.Enum):
    FULL = "full"
    NO_MATCHING = "no_matching"
    NO_FIRST = "no_first"
    # bonuses switched off entirely
    BASELINE = "baseline"


@dataclass(frozen=True)
class BonusConfig:
    lam: float = 0.5
    ablation: Ablation = Ablation.FULL
    dedup: bool = False

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda must lie in [0, 1), got {self.lam}")
        object.__setattr__(self, "ablation", Ablation(self.ablation))

    @property
    def enabled(self) -> bool:
        return self.ablation is not Ablation.BASELINE and self.lam > 0.0


def sigmoid(x: float) -> float:
    """Map an unbounded parameter to a bonus weight in (0, 1)."""
    return float(1.0 / (1.0 + np.exp(-x)))


@dataclass
class StepStats:
    """Diagnostic counters, per step or accumulated over a decode."""

    steps: int = 0
    recommendations: int = 0
    nonzero_bonus: int = 0
    max_bonus: float = 0.0
    dropped_oov: int = 0
    negative_logit_bonus: int = 0

    def merge(self, other: "StepStats") -> None:
        self.steps += other.steps
        self.recommendations += other.recommendations
        self.nonzero_bonus += other.nonzero_bonus
        self.max_bonus = max(self.max_bonus, other.max_bonus)
        self.dropped_oov += other.dropped_oov
        self.negative_logit_bonus += other.negative_logit_bonus

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def check_attention(attn, tol: float = 1e-6) -> np.ndarray:
    attn = np.asarray(attn, dtype=np.float64)
    if attn.ndim != 1 or attn.size == 0:
        raise ContractError("attention must be a nonempty vector")
    if not np.all(np.isfinite(attn)) or np.any(attn < 0):
        raise ContractError("attention weights must be finite and nonnegative")
    if abs(attn.sum() - 1.0) > tol:
        raise ContractError(f"attention weights sum to {attn.sum()!r}, not 1")
    return attn


def phrase_attention(attn, span: SourceSpan) -> float:
    """Mean attention weight over the source positions of ``span``."""
    if span.end > len(attn) or span.start < 0:
        raise ContractError(
            f"span [{span.start}, {span.end}) outside attention of length {len(attn)}")
    return float(sum(attn[span.start:span.end])) / (span.end - span.start)


def bonus_values(recs: Iterable[Recommendation], attn, dedup: bool = False) -> BonusMap:
    """Bonus per recommended word.

    With ``dedup`` an origin reached through several prefix lengths is
    counted once.
    """
    cache: Dict[SourceSpan, float] = {}
    bonuses: BonusMap = {}
    for rec in recs:
        origins = rec.origins
        if dedup:
            origins = list(dict.fromkeys(origins))
        total = 0.0
        for origin in origins:
            a = cache.get(origin.span)
            if a is None:
                a = cache[origin.span] = phrase_attention(attn, origin.span)
            total += a * origin.p_pht
        bonuses[rec.word] = total
    return bonuses


def _check_scores(base_scores) -> np.ndarray:
    scores = np.asarray(base_scores, dtype=np.float64)
    if scores.ndim != 1:
        raise ContractError("scores must be a vector")
    if not np.all(np.isfinite(scores)):
        raise ContractError("scores must be finite")
    return scores


def scale_scores(base_scores, bonuses: Mapping[str, float], cfg: BonusConfig,
                 vocab_index: Mapping[str, int],
                 stats: Optional[StepStats] = None) -> np.ndarray:
    """Logits multiplied by ``1 + lam * V(w)``; V is zero for unrecommended words."""
    scores = _check_scores(base_scores)
    if stats is not None:
        stats.steps += 1
        stats.recommendations += len(bonuses)
    if not cfg.enabled or not bonuses:
        return scores
    scaled = scores.copy()
    for word, v in bonuses.items():
        idx = vocab_index.get(word)
        if idx is None:
            if stats is not None:
                stats.dropped_oov += 1
            continue
        if v == 0.0:
            continue
        scaled[idx] = scores[idx] * (1.0 + cfg.lam * v)
        if stats is not None:
            stats.nonzero_bonus += 1
            stats.max_bonus = max(stats.max_bonus, v)
            if scores[idx] < 0:
                stats.negative_logit_bonus += 1
    return scaled


def log_softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max()
    return shifted - np.log(np.exp(shifted).sum())


def softmax(x) -> np.ndarray:
    shifted = np.asarray(x, dtype=np.float64)
    shifted = shifted - shifted.max()
    e = np.exp(shifted)
    return e / e.sum()


def rescore(base_scores, bonuses: Mapping[str, float], cfg: BonusConfig,
            vocab_index: Mapping[str, int],
            stats: Optional[StepStats] = None) -> np.ndarray:
    """Probability distribution over the vocabulary after applying bonuses."""
    return softmax(scale_scores(base_scores, bonuses, cfg, vocab_index, stats))


def log_rescore(base_scores, bonuses: Mapping[str, float], cfg: BonusConfig,
                vocab_index: Mapping[str, int],
                stats: Optional[StepStats] = None) -> np.ndarray:
    return log_softmax(scale_scores(base_scores, bonuses, cfg, vocab_index, stats))
