import random
from pathlib import Path

import pytest

from phrasemem.candidate_index import index_sentence
from phrasemem.synthetic import FIG2_SENTENCE, entry, fig2_table
from phrasemem.phrase_table import PhraseTable

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fig2():
    table = fig2_table()
    return table, index_sentence(FIG2_SENTENCE, table)


def random_instance(rng: random.Random, target_vocab="abcd", source_vocab="pqrs"):
    """Small random (table, sentence) pair with plenty of shared prefixes."""
    entries = []
    for _ in range(rng.randint(0, 8)):
        src = " ".join(rng.choice(source_vocab) for _ in range(rng.randint(1, 3)))
        tgt = " ".join(rng.choice(target_vocab) for _ in range(rng.randint(1, 4)))
        entries.append(entry(src, tgt, round(rng.uniform(0.05, 1.0), 3)))
    table = PhraseTable.from_entries(entries)
    sentence = [rng.choice(source_vocab) for _ in range(rng.randint(1, 8))]
    return table, sentence


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def report(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
