import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from phrasemem.candidate_index import (Origin, SourceSpan, build_index, dump,
                                       index_sentence, match_source, walk)
from phrasemem.phrase_table import PhraseTable
from phrasemem.synthetic import FIG2_SENTENCE, entry, fig2_table
from conftest import random_instance


def test_fig2_four_candidates():
    origins = match_source(FIG2_SENTENCE, fig2_table())
    assert len(origins) == 4
    assert sorted(" ".join(o.target) for o in origins) == [
        "he settled down", "he settled in", "suburb of Milwaukee", "the US"]


def test_no_match():
    assert match_source(["nothing", "here"], fig2_table()) == []


def test_repeated_source_phrase_gives_one_origin_per_span():
    table = PhraseTable.from_entries([entry("a b", "x", 0.5)])
    origins = match_source("a b a b".split(), table)
    # brute-force slice enumeration
    sent = "a b a b".split()
    expected = [(i, j) for i in range(4) for j in range(i + 1, 5) if sent[i:j] == ["a", "b"]]
    assert [(o.span.start, o.span.end) for o in origins] == expected == [(0, 2), (2, 4)]


def test_max_phrase_len_caps_probes():
    table = PhraseTable.from_entries([entry("a b c", "x", 0.5)])
    assert match_source("a b c".split(), table, max_phrase_len=2) == []
    assert len(match_source("a b c".split(), table, max_phrase_len=3)) == 1


def test_fig2_trie_shape(fig2):
    _, idx = fig2
    assert list(idx.root.children) == ["he", "suburb", "the"]
    node = walk(idx, ["he", "settled"])
    assert sorted(tok for tok, _ in node.continuations) == ["down", "in"]
    assert idx.phrase_count == 4


def test_fig2_dump_golden(fig2, data_dir):
    _, idx = fig2
    assert dump(idx) == (data_dir / "fig2_trie.txt").read_text(encoding="utf-8")


def test_empty_index():
    idx = build_index([])
    assert idx.phrase_count == 0
    assert idx.root.children == {} and idx.root.continuations == []


def test_identical_targets_from_two_spans_share_path():
    table = PhraseTable.from_entries([entry("a", "x y", 0.5)])
    idx = index_sentence("a b a".split(), table)
    assert idx.phrase_count == 2
    assert list(idx.root.children) == ["x"]
    node = walk(idx, ["x"])
    assert list(node.children) == ["y"]
    spans = [(o.span.start, o.span.end) for tok, o in node.continuations]
    assert spans == [(0, 1), (2, 3)]
    assert [tok for tok, _ in idx.root.continuations] == ["x", "x"]


def test_walk(fig2):
    _, idx = fig2
    assert walk(idx, []) is idx.root
    node = walk(idx, ["suburb", "of"])
    assert [tok for tok, _ in node.continuations] == ["Milwaukee"]
    assert walk(idx, ["he", "walked"]) is None


def test_top_n_per_group():
    table = PhraseTable.from_entries([entry("a", f"t{i}", 0.1 * (i + 1)) for i in range(5)])
    idx = index_sentence(["a"], table, top_n=2)
    assert sorted(" ".join(o.target) for o in idx.phrases) == ["t3", "t4"]


def test_span_validation():
    with pytest.raises(ValueError):
        SourceSpan(2, 2, ())
    with pytest.raises(ValueError):
        SourceSpan(0, 2, ("a",))


def _leaf_phrases(idx):
    found = Counter()

    def visit(node, path):
        for origin in node.terminals:
            found[(path, origin)] += 1
        for tok, child in node.children.items():
            visit(child, path + (tok,))

    visit(idx.root, ())
    return found


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_trie_complete_and_sound(seed):
    table, sentence = random_instance(random.Random(seed))
    idx = index_sentence(sentence, table)

    # completeness: every proper prefix walks and offers the next token with the origin
    records = 0
    for origin in idx.phrases:
        phrase = origin.target
        for k in range(len(phrase)):
            node = walk(idx, phrase[:k])
            assert node is not None
            assert (phrase[k], origin) in node.continuations
        records += len(phrase)
    assert records == sum(len(n.continuations) for n in idx.nodes())

    # soundness: terminal records recover exactly the indexed phrases
    assert _leaf_phrases(idx) == Counter((o.target, o) for o in idx.phrases)

    # each origin's source side is the sentence slice
    for o in idx.phrases:
        assert tuple(sentence[o.span.start:o.span.end]) == o.entry.source_phrase


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_build_is_deterministic(seed):
    table, sentence = random_instance(random.Random(seed))
    origins = match_source(sentence, table)
    shuffled = list(origins)
    random.Random(seed).shuffle(shuffled)
    def structure(idx):
        return [(n.token, n.depth, n.continuations, n.terminals) for n in idx.nodes()]

    assert structure(build_index(origins)) == structure(build_index(shuffled))
