import pytest

from semiosc import ModelParams, ScenarioConfig


@pytest.fixture
def unit_params():
    return ModelParams(m=1.0, e=1.0, hbar=1.0)


@pytest.fixture
def decoupled_params():
    return ModelParams(m=1.0, e=0.0, hbar=1.0)


def quick_config(params, **kw):
    defaults = dict(A0=1.0, Adot0=1.0, t_end=5.0, dt=1e-3, sample_every=10)
    defaults.update(kw)
    return ScenarioConfig(params=params, **defaults)
