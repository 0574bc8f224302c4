"""Word recommendation sets.

A word is recommended at a decoding step when some suffix of the partial
translation (possibly empty) equals a prefix (possibly empty) of a
candidate target phrase; the recommended word is the token following
that prefix in the phrase.

:func:`recommend_brute` is the literal suffix x prefix double loop and
serves as the reference. Decoding uses :class:`MatcherState`, which keeps
one trie cursor per suffix that is still inside the trie and is advanced
one token at a time.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple

from .candidate_index import CandidateIndex, Origin, TrieNode, origin_key


class Match(NamedTuple):
    origin: Origin
    prefix_len: int


@dataclass(frozen=True)
class Recommendation:
    word: str
    matches: Tuple[Match, ...]

    @property
    def origins(self) -> List[Origin]:
        return [m.origin for m in self.matches]

    @property
    def prefix_lens(self) -> List[int]:
        return [m.prefix_len for m in self.matches]


def _merge(pairs: Iterable[Tuple[str, Match]]) -> List[Recommendation]:
    by_word: Dict[str, List[Match]] = {}
    for word, match in pairs:
        by_word.setdefault(word, []).append(match)
    return [
        Recommendation(word, tuple(sorted(matches, key=lambda m: (m.prefix_len,) + origin_key(m.origin))))
        for word, matches in sorted(by_word.items())
    ]


def recommend_brute(index: CandidateIndex, partial: Sequence[str]) -> List[Recommendation]:
    """Reference construction: compare every suffix with every phrase prefix."""
    partial = tuple(partial)
    suffixes = [partial[j:] for j in range(len(partial) + 1)]  # includes ()
    pairs = []
    for sf in suffixes:
        for origin in index.phrases:
            phrase = origin.target
            for k in range(len(phrase)):  # prefix phrase[:k] has a next word
                if sf == phrase[:k]:
                    pairs.append((phrase[k], Match(origin, k)))
    return _merge(pairs)


@dataclass(frozen=True)
class MatcherState:
    """Trie nodes reachable by suffixes of the partial translation.

    ``cursors`` holds the nodes ordered by depth; the root (empty suffix)
    is always present. The tuple is immutable, so beam hypotheses can
    share states freely.
    """

    cursors: Tuple[TrieNode, ...]

    @classmethod
    def initial(cls, index: CandidateIndex) -> "MatcherState":
        return cls((index.root,))

    def __len__(self) -> int:
        return len(self.cursors)


def advance(state: MatcherState, index: CandidateIndex, token: str) -> MatcherState:
    # advancing the root covers the one-word suffix [token]
    cursors = [index.root]
    for node in state.cursors:
        nxt = node.children.get(token)
        if nxt is not None:
            cursors.append(nxt)
    return MatcherState(tuple(cursors))


def state_for(index: CandidateIndex, partial: Sequence[str]) -> MatcherState:
    state = MatcherState.initial(index)
    for tok in partial:
        state = advance(state, index, tok)
    return state


def recommend(state: MatcherState, index: CandidateIndex) -> List[Recommendation]:
    return _merge(
        (word, Match(origin, node.depth))
        for node in state.cursors
        for word, origin in node.continuations
    )


def recommend_all_words(index: CandidateIndex) -> List[Recommendation]:
    """Every word of every candidate phrase, without any matching.

    Each phrase instance contributes one match per distinct word it
    contains, at the word's first position.
    """
    pairs = []
    for origin in index.phrases:
        seen = set()
        for pos, word in enumerate(origin.target):
            if word not in seen:
                seen.add(word)
                pairs.append((word, Match(origin, pos)))
    return _merge(pairs)


def drop_first_words(recs: Iterable[Recommendation]) -> List[Recommendation]:
    """Remove matches produced by the empty prefix."""
    out = []
    for rec in recs:
        matches = tuple(m for m in rec.matches if m.prefix_len > 0)
        if matches:
            out.append(Recommendation(rec.word, matches))
    return out


def as_multiset(recs: Iterable[Recommendation]) -> Counter:
    return Counter((rec.word, m.origin, m.prefix_len) for rec in recs for m in rec.matches)
