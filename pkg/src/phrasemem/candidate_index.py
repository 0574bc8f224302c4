"""Per-sentence prefix trie over candidate target phrases.

For a source sentence we collect every phrase pair whose source side
occurs contiguously in the sentence, keep the best ``top_n`` targets for
each (source phrase, span) group and merge the target phrases into a
prefix trie. Each node records, for every phrase passing through it, the
token that follows the node's prefix together with the phrase's origin.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .phrase_table import PhraseEntry, PhraseTable, sort_key

DEFAULT_MAX_PHRASE_LEN = 7
DEFAULT_TOP_N = 10


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    tokens: Tuple[str, ...]

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")
        if len(self.tokens) != self.end - self.start:
            raise ValueError("span tokens do not match span length")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Origin:
    """A phrase pair together with the source span its source side matched."""

    entry: PhraseEntry
    span: SourceSpan

    @property
    def p_pht(self) -> float:
        return self.entry.p_pht

    @property
    def target(self) -> Tuple[str, ...]:
        return self.entry.target_phrase


def origin_key(origin: Origin):
    return (origin.span.start, origin.span.end) + sort_key(origin.entry) + (
        origin.entry.source_phrase,)


@dataclass(eq=False)
class TrieNode:
    token: Optional[str] = None
    depth: int = 0
    children: Dict[str, "TrieNode"] = field(default_factory=dict)
    # (next_token, origin) for every indexed phrase passing through this node
    continuations: List[Tuple[str, Origin]] = field(default_factory=list)
    # origins of phrases that end exactly here
    terminals: List[Origin] = field(default_factory=list)

    def child(self, token: str) -> Optional["TrieNode"]:
        return self.children.get(token)

    def __repr__(self) -> str:
        return (f"TrieNode({self.token!r}, depth={self.depth}, "
                f"children={sorted(self.children)})")


@dataclass(eq=False)
class CandidateIndex:
    root: TrieNode
    phrases: Tuple[Origin, ...]

    @property
    def phrase_count(self) -> int:
        return len(self.phrases)

    def nodes(self) -> Iterator[TrieNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.children.values())))

    def __len__(self) -> int:
        return sum(1 for _ in self.nodes())


def match_source(sentence: Sequence[str], table: PhraseTable,
                 max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN) -> List[Origin]:
    """Every (entry, span) such that the entry's source side equals the slice."""
    if max_phrase_len < 1:
        raise ValueError("max_phrase_len must be >= 1")
    sentence = tuple(sentence)
    origins = []
    n = len(sentence)
    for start in range(n):
        for end in range(start + 1, min(n, start + max_phrase_len) + 1):
            key = sentence[start:end]
            group = table.entries.get(key)
            if not group:
                continue
            span = SourceSpan(start, end, key)
            origins.extend(Origin(entry, span) for entry in group)
    return origins


def build_index(origins: Sequence[Origin], top_n: int = DEFAULT_TOP_N) -> CandidateIndex:
    """Build the candidate-phrase trie.

    ``top_n`` caps the number of targets kept for each distinct
    (source phrase, span) group. Children are stored in lexicographic
    order so two builds from the same input are structurally identical.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    groups: Dict[tuple, List[Origin]] = {}
    for origin in origins:
        key = (origin.entry.source_phrase, origin.span.start, origin.span.end)
        groups.setdefault(key, []).append(origin)

    kept: List[Origin] = []
    for group in groups.values():
        group.sort(key=lambda o: sort_key(o.entry))
        kept.extend(group[:top_n])
    kept.sort(key=origin_key)

    root = TrieNode()
    for origin in kept:
        node = root
        for tok in origin.target:
            node.continuations.append((tok, origin))
            nxt = node.children.get(tok)
            if nxt is None:
                nxt = node.children[tok] = TrieNode(tok, node.depth + 1)
            node = nxt
        node.terminals.append(origin)

    _sort_children(root)
    return CandidateIndex(root=root, phrases=tuple(kept))


def _sort_children(root: TrieNode) -> None:
    stack = [root]
    while stack:
        node = stack.pop()
        node.children = {k: node.children[k] for k in sorted(node.children)}
        stack.extend(node.children.values())


def index_sentence(sentence: Sequence[str], table: PhraseTable,
                   top_n: int = DEFAULT_TOP_N,
                   max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN) -> CandidateIndex:
    return build_index(match_source(sentence, table, max_phrase_len), top_n)


def walk(index: CandidateIndex, tokens: Sequence[str]) -> Optional[TrieNode]:
    node = index.root
    for tok in tokens:
        node = node.children.get(tok)
        if node is None:
            return None
    return node


def dump(index: CandidateIndex) -> str:
    """Indented text rendering of the trie, one token per line.

    Nodes where a phrase ends carry ``(span_start,span_end,p_pht)``
    suffixes, one per ending phrase instance.
    """
    lines = ["<root>"]

    def visit(node: TrieNode, indent: int):
        for tok, child in node.children.items():
            suffix = "".join(f" ({o.span.start},{o.span.end},{o.p_pht:g})"
                             for o in child.terminals)
            lines.append("  " * indent + tok + suffix)
            visit(child, indent + 1)

    visit(index.root, 1)
    return "\n".join(lines) + "\n"
