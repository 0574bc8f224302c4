"""Phrase translation tables as recommendation memory for sequence decoders."""

from .bleu import BleuReport, bleu
from .bonus import (Ablation, BonusConfig, ContractError, StepStats, bonus_values,
                    phrase_attention, rescore)
from .candidate_index import (CandidateIndex, Origin, SourceSpan, build_index, dump,
                              index_sentence, match_source, walk)
from .decoder import DecodeConfig, Hypothesis, decode, decode_corpus
from .phrase_table import (PhraseEntry, PhraseTable, PhraseTableError, load_table,
                           load_vocab, parse_line)
from .recommender import (MatcherState, Recommendation, advance, recommend,
                          recommend_brute)
from .scorer import LexiconScorer, Scorer

__version__ = "0.1.0"
