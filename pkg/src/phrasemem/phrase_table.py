"""Reading and filtering Moses-format phrase translation tables.

A record looks like::

    ta dingju zai ||| he settled in ||| 0.6 0.6 0.6 0.6 2.718

Only the first four scores are used (the two phrase translation
probabilities and the two lexical weights); their mean becomes the
aggregated probability ``p_pht`` attached to each :class:`PhraseEntry`.
"""

import logging
import unicodedata
from dataclasses import dataclass, field
from typing import Collection, Dict, Iterable, List, Optional, Tuple

logger = logging.getLogger(__name__)

UNK = "UNK"
FIELD_SEP = " ||| "
NUM_SCORES = 4
DEFAULT_MAX_TARGETS = 10

Phrase = Tuple[str, ...]


class PhraseTableError(ValueError):
    """A phrase-table record could not be parsed."""

    def __init__(self, message: str, lineno: Optional[int] = None) -> None:
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class PhraseEntry:
    source_phrase: Phrase
    target_phrase: Phrase
    p_pht: float
    raw_scores: Tuple[float, float, float, float]

    def __str__(self) -> str:
        return format_entry(self)


def sort_key(entry: PhraseEntry):
    """Highest probability first, ties broken by lexicographic target order."""
    return (-entry.p_pht, entry.target_phrase)


@dataclass(frozen=True)
class PhraseTable:
    """Filtered phrase table, grouped by source phrase.

    Every group is sorted with :func:`sort_key` and holds at most
    ``max_targets_per_source`` entries.
    """

    entries: Dict[Phrase, Tuple[PhraseEntry, ...]] = field(default_factory=dict)
    vocab_src: Optional[frozenset] = None
    vocab_tgt: Optional[frozenset] = None
    unk: str = UNK
    max_targets_per_source: int = DEFAULT_MAX_TARGETS
    skipped: int = 0

    def __len__(self) -> int:
        return sum(len(group) for group in self.entries.values())

    def __contains__(self, source_phrase) -> bool:
        return tuple(source_phrase) in self.entries

    def lookup(self, source_phrase) -> Tuple[PhraseEntry, ...]:
        return self.entries.get(tuple(source_phrase), ())

    def __iter__(self):
        for group in self.entries.values():
            yield from group

    @property
    def max_source_len(self) -> int:
        return max((len(k) for k in self.entries), default=0)

    def map_unk(self, sentence: Iterable[str]) -> List[str]:
        """Replace out-of-vocabulary source tokens the same way the table did."""
        if self.vocab_src is None:
            return list(sentence)
        return [tok if tok in self.vocab_src else self.unk for tok in sentence]

    @classmethod
    def from_entries(cls, entries: Iterable[PhraseEntry],
                     max_targets_per_source: int = DEFAULT_MAX_TARGETS,
                     **kwargs) -> "PhraseTable":
        if max_targets_per_source < 1:
            raise ValueError("max_targets_per_source must be positive")
        groups: Dict[Phrase, List[PhraseEntry]] = {}
        for entry in entries:
            groups.setdefault(entry.source_phrase, []).append(entry)
        truncated = {
            src: tuple(sorted(group, key=sort_key)[:max_targets_per_source])
            for src, group in groups.items()
        }
        return cls(entries=truncated,
                   max_targets_per_source=max_targets_per_source, **kwargs)


def is_punctuation(token: str) -> bool:
    """True iff every character falls in a Unicode punctuation category."""
    return bool(token) and all(unicodedata.category(ch).startswith("P") for ch in token)


def _is_noise(tokens: Phrase, unk: str) -> bool:
    return all(tok == unk or is_punctuation(tok) for tok in tokens)


def _replace_oov(tokens: List[str], vocab: Optional[Collection[str]], unk: str) -> Phrase:
    if vocab is None:
        return tuple(tokens)
    return tuple(tok if tok in vocab else unk for tok in tokens)


def parse_line(line: str,
               vocab_src: Optional[Collection[str]] = None,
               vocab_tgt: Optional[Collection[str]] = None,
               *,
               unk: str = UNK,
               lineno: Optional[int] = None,
               strict: bool = True) -> Optional[PhraseEntry]:
    """Parse one phrase-table record.

    Returns ``None`` when the pair is filtered out, i.e. when either side
    consists only of punctuation and UNK tokens once out-of-vocabulary
    words have been replaced. A vocabulary of ``None`` accepts every token.

    Scores outside [0, 1] raise in strict mode and are clamped (with a
    warning) otherwise.
    """
    fields = line.rstrip("\r\n").split("|||")
    if len(fields) < 3:
        raise PhraseTableError("expected at least 3 '|||'-separated fields", lineno)
    src_tokens = fields[0].split()
    tgt_tokens = fields[1].split()
    if not src_tokens or not tgt_tokens:
        raise PhraseTableError("empty source or target phrase", lineno)

    score_fields = fields[2].split()
    if len(score_fields) < NUM_SCORES:
        raise PhraseTableError(
            f"expected at least {NUM_SCORES} scores, got {len(score_fields)}", lineno)
    try:
        scores = [float(s) for s in score_fields[:NUM_SCORES]]
    except ValueError as exc:
        raise PhraseTableError(f"non-numeric score ({exc})", lineno) from None

    for i, s in enumerate(scores):
        if not 0.0 <= s <= 1.0:  # also catches nan
            if strict:
                raise PhraseTableError(f"score {s!r} outside [0, 1]", lineno)
            clamped = min(1.0, max(0.0, s)) if s == s else 0.0
            logger.warning("line %s: clamping score %r to %r", lineno, s, clamped)
            scores[i] = clamped

    source = _replace_oov(src_tokens, vocab_src, unk)
    target = _replace_oov(tgt_tokens, vocab_tgt, unk)
    if _is_noise(source, unk) or _is_noise(target, unk):
        return None

    p_pht = sum(scores) / NUM_SCORES
    if p_pht <= 0.0:
        # contributes nothing to any bonus
        return None
    return PhraseEntry(source, target, p_pht, tuple(scores))


def format_entry(entry: PhraseEntry) -> str:
    """Serialize an entry back into a Moses record (four scores only)."""
    scores = " ".join(repr(s) for s in entry.raw_scores)
    return FIELD_SEP.join((" ".join(entry.source_phrase),
                           " ".join(entry.target_phrase), scores))


def parse_lines(lines: Iterable[str],
                vocab_src: Optional[Collection[str]] = None,
                vocab_tgt: Optional[Collection[str]] = None,
                *,
                unk: str = UNK,
                strict: bool = True) -> Tuple[List[PhraseEntry], int]:
    """Parse many records; returns (kept entries, number of malformed lines skipped)."""
    entries = []
    skipped = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entry = parse_line(line, vocab_src, vocab_tgt, unk=unk,
                               lineno=lineno, strict=strict)
        except PhraseTableError as exc:
            if strict:
                raise
            logger.warning("skipping malformed record: %s", exc)
            skipped += 1
            continue
        if entry is not None:
            entries.append(entry)
    return entries, skipped


def load_table(path,
               vocab_src: Optional[Collection[str]] = None,
               vocab_tgt: Optional[Collection[str]] = None,
               max_targets_per_source: int = DEFAULT_MAX_TARGETS,
               *,
               unk: str = UNK,
               strict: bool = True) -> PhraseTable:
    """Load, filter and truncate a phrase table from a UTF-8 text file.

    Filtering happens before the per-source top-k truncation.
    """
    with open(path, encoding="utf-8") as f:
        entries, skipped = parse_lines(f, vocab_src, vocab_tgt, unk=unk, strict=strict)
    return PhraseTable.from_entries(
        entries, max_targets_per_source,
        vocab_src=frozenset(vocab_src) if vocab_src is not None else None,
        vocab_tgt=frozenset(vocab_tgt) if vocab_tgt is not None else None,
        unk=unk, skipped=skipped)


def load_vocab(path, limit: Optional[int] = 30000) -> List[str]:
    """Read a frequency-ranked vocabulary file (one token per line)."""
    vocab: List[str] = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            tok = line.strip()
            if not tok:
                continue
            # tolerate "token count" lines
            vocab.append(tok.split()[0])
            if limit is not None and len(vocab) >= limit:
                break
    return vocab
