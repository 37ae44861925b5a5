from pathlib import Path

import pytest

from spinal.hashfam import HashSeed

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture()
def seed() -> HashSeed:
    return HashSeed.from_hex("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f")
