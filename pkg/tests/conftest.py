from __future__ import annotations

from pathlib import Path

import pytest

from refinery.fixtures import mock_endpoint

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def mock_chain():
    """Matched clean mock endpoints for the whole speech chain."""
    return {
        "tts": mock_endpoint("tts", seed=7),
        "asr": mock_endpoint("asr", seed=7),
        "validator": mock_endpoint("validator_asr", seed=7),
        "aligner": mock_endpoint("aligner", seed=7),
    }
