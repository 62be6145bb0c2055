import math
import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from core.instance import instance_from_overlap  # noqa: E402

# eta1 = 0.3, |<phi1|phi2>| = 0.9
BASE_ETA1 = 0.3
BASE_OVERLAP = 0.9
BASE_M_C = 0.217335
BASE_M_C_PRIME = 0.072178


@pytest.fixture
def base_instance():
    return instance_from_overlap(BASE_ETA1, BASE_OVERLAP)


@pytest.fixture
def base_kets():
    return (1.0, 0.0), (BASE_OVERLAP, math.sqrt(1.0 - BASE_OVERLAP ** 2))


@pytest.fixture
def make_instance():
    def _make(eta1, S):
        return instance_from_overlap(eta1, math.sqrt(S))
    return _make


@pytest.fixture(autouse=True)
def no_run_log(monkeypatch):
    monkeypatch.delenv('QMARGIN_RUN_LOG', raising=False)
