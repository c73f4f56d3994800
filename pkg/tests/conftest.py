import numpy as np
import pytest

from quasibohm import SuperpositionState, build_harmonic, build_infinite_well
from quasibohm.cli import build_scenario, preset


@pytest.fixture(scope="session")
def two_mode_box():
    state, x0, _ = build_scenario(preset("two-mode-box"))
    return state, x0


@pytest.fixture(scope="session")
def harmonic_three():
    state, x0, _ = build_scenario(preset("harmonic-three"))
    return state, x0


@pytest.fixture(scope="session")
def doublewell_five():
    state, x0, _ = build_scenario(preset("doublewell-five"))
    return state, x0


@pytest.fixture(scope="session")
def all_presets(two_mode_box, harmonic_three, doublewell_five):
    return {
        "two-mode-box": two_mode_box,
        "harmonic-three": harmonic_three,
        "doublewell-five": doublewell_five,
    }


@pytest.fixture(scope="session")
def stationary():
    basis = build_infinite_well(np.pi, 1)
    return SuperpositionState(basis, [1.0]), 1.0


@pytest.fixture(scope="session")
def stationary_harmonic():
    basis = build_harmonic(1.0, 1.0, 1)
    return SuperpositionState(basis, [1.0]), 0.4
