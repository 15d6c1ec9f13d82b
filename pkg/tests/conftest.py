import numpy as np
import pytest

from pasim.constellation import AmplitudeAlphabet


@pytest.fixture
def ask8():
    return AmplitudeAlphabet.pam(4)


@pytest.fixture
def ask4():
    return AmplitudeAlphabet.pam(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20191)
