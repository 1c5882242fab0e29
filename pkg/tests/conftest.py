import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from flopslack.characterizer import CharConfig, characterize  # noqa: E402
from flopslack.oracle import REF45, AnalyticOracle  # noqa: E402


@pytest.fixture(scope="session")
def ref45():
    return AnalyticOracle(REF45)


@pytest.fixture(scope="session")
def ref45_model(ref45):
    return characterize(ref45, CharConfig())
