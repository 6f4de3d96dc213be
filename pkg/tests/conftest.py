import os
from pathlib import Path

import pytest

from miht.datasets import load_ts
from miht.synthetic import planted_concept

DATA_DIR = Path(__file__).parent / "data"

_acceptance_lines = []


def find_dataset(name):
    """Locate ``<name>_TRAIN.ts``/``_TEST.ts`` under tests/data or ``$MIHT_DATA_DIR``."""
    roots = [DATA_DIR]
    if os.environ.get("MIHT_DATA_DIR"):
        roots.insert(0, Path(os.environ["MIHT_DATA_DIR"]))
    for root in roots:
        for base in (root, root / name):
            train, test = base / f"{name}_TRAIN.ts", base / f"{name}_TEST.ts"
            if train.exists() and test.exists():
                return train, test
    return None


@pytest.fixture(scope="session")
def japanese_vowels():
    train, test = find_dataset("JapaneseVowels")
    return load_ts(train), load_ts(test)


@pytest.fixture(scope="session")
def load_pair():
    """Loader returning ``(train, test)`` for a dataset name, or None when absent."""
    def load(name):
        paths = find_dataset(name)
        return None if paths is None else (load_ts(paths[0]), load_ts(paths[1]))
    return load


@pytest.fixture(scope="session")
def small_planted():
    return planted_concept(60, seed=11), planted_concept(60, seed=12)


@pytest.fixture
def record_criterion():
    def record(number, name, passed, detail=""):
        _acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} {detail}".rstrip())
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
