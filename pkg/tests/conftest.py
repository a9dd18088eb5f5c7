"""Shared fixtures: one sieve table per session and the zero-table path."""

from __future__ import annotations

from pathlib import Path

import pytest

from goldbach_averages import psi2_direct, psi2_fast, sieve_von_mangoldt

REPO_ROOT = Path(__file__).resolve().parent.parent
ZEROS_PATH = REPO_ROOT / "data" / "zeta_zeros_100k.txt"


@pytest.fixture(scope="session")
def table100k():
    return sieve_von_mangoldt(100_000)


@pytest.fixture(scope="session")
def table20k():
    return sieve_von_mangoldt(20_000)


@pytest.fixture(scope="session")
def series2k(table20k):
    return psi2_direct(table20k, 2000)


@pytest.fixture(scope="session")
def series100k(table100k):
    return psi2_fast(table100k, 100_000)


@pytest.fixture(scope="session")
def zeros_path():
    if not ZEROS_PATH.exists():
        pytest.fail(
            f"zero table missing at {ZEROS_PATH}; generate it with "
            "scripts/generate_zero_table.py"
        )
    return ZEROS_PATH
