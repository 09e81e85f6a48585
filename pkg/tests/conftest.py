from __future__ import annotations

from functools import lru_cache

import pytest

from fairshare.generators import random_corpus
from fairshare.shares import exact_aps, exact_mms, exact_wmms

# (criterion, passed, detail) rows appended by tests/test_acceptance.py
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@lru_cache(maxsize=None)
def cached_aps(instance, agent):
    return exact_aps(instance, agent)


@lru_cache(maxsize=None)
def cached_mms(instance, agent):
    return exact_mms(instance, agent)


@lru_cache(maxsize=None)
def cached_wmms(instance, agent):
    return exact_wmms(instance, agent)


@lru_cache(maxsize=None)
def binary_xos_corpus():
    return tuple(random_corpus("random_binary_xos", 200, n_max=4, m_max=9, seed=20240601, clause_count=6))


@lru_cache(maxsize=None)
def xos_corpus():
    return tuple(random_corpus("random_xos", 200, n_max=3, m_max=8, seed=20240602, clause_count=4))


@lru_cache(maxsize=None)
def binary_additive_corpus():
    return tuple(random_corpus("random_binary_additive", 200, n_max=4, m_max=10, seed=20240603))


@pytest.fixture(scope="session")
def bxos_corpus():
    return binary_xos_corpus()


@pytest.fixture(scope="session")
def gen_xos_corpus():
    return xos_corpus()


@pytest.fixture(scope="session")
def badd_corpus():
    return binary_additive_corpus()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
