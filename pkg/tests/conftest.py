import pytest

from blowup_paths import YCharge, default_model


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def zy(model):
    return YCharge(model, alpha=1.0, beta=0.0, B=(0.0,), omega=(1.0,))
