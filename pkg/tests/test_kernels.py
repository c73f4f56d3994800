"""Backend equivalence: the pure-numpy fallback (QUASIBOHM_NO_NUMBA=1) must
reproduce the jitted kernels to rounding error."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from quasibohm import kernels
from quasibohm.cli import build_scenario, preset
from quasibohm.trajectory import evolve_cdf, evolve_ode

WORKER = r"""
import json
import numpy as np
from quasibohm import kernels
from quasibohm.cli import build_scenario, preset
from quasibohm.trajectory import evolve_cdf, evolve_ode

assert not kernels.USE_NUMBA
state, x0, _ = build_scenario(preset("two-mode-box"))
t = np.linspace(0.0, 10.0, 21)
ode = evolve_ode(state, x0, t)
cdf = evolve_cdf(state, x0, t)
v, g, rho = kernels.field_at(state.table, state.coeffs_at(2.5), 1.3)
print(json.dumps({
    "ode": ode.positions.tolist(),
    "cdf": cdf.positions.tolist(),
    "field": [v, g, rho],
}))
"""


@pytest.fixture(scope="module")
def fallback_results():
    env = dict(os.environ, QUASIBOHM_NO_NUMBA="1")
    proc = subprocess.run(
        [sys.executable, "-c", WORKER], env=env,
        capture_output=True, text=True, timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


class TestBackendEquivalence:
    def test_flag_reflects_environment(self):
        expected = not os.environ.get("QUASIBOHM_NO_NUMBA")
        assert kernels.USE_NUMBA == expected

    def test_trajectories_match(self, fallback_results, two_mode_box):
        state, x0 = two_mode_box
        t = np.linspace(0.0, 10.0, 21)
        ode = evolve_ode(state, x0, t)
        cdf = evolve_cdf(state, x0, t)
        np.testing.assert_allclose(
            ode.positions, fallback_results["ode"], rtol=0, atol=1e-12
        )
        np.testing.assert_allclose(
            cdf.positions, fallback_results["cdf"], rtol=0, atol=1e-12
        )

    def test_pointwise_fields_match(self, fallback_results, two_mode_box):
        state, _ = two_mode_box
        got = kernels.field_at(state.table, state.coeffs_at(2.5), 1.3)
        np.testing.assert_allclose(
            got, fallback_results["field"], rtol=1e-14, atol=1e-15
        )


class TestKernelEdgeCases:
    def test_out_of_domain_density_flag(self, two_mode_box):
        state, _ = two_mode_box
        _, _, rho = kernels.field_at(state.table, state.coeffs_at(0.0), -1.0)
        assert rho == -1.0

    def test_single_state_velocity_exactly_zero(self, stationary):
        state, _ = stationary
        v, g, rho = kernels.field_at(state.table, state.coeffs_at(4.2), 1.1)
        assert v == 0.0 and g == 0.0 and rho > 0.0
