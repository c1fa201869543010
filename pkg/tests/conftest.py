from pathlib import Path

import pytest

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
GOLDEN_DIR = Path(__file__).resolve().parent / "data" / "golden"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def tower1_log() -> str:
    return (DATA_DIR / "tower1_ping.log").read_text()


@pytest.fixture(scope="session")
def tower2_log() -> str:
    return (DATA_DIR / "tower2_ping.log").read_text()


@pytest.fixture(scope="session")
def tower3_log() -> str:
    return (DATA_DIR / "tower3_ping.log").read_text()
