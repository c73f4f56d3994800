"""Acceptance suite: one test per criterion, each printing a single
PASS/FAIL line (past the capture) in addition to the usual assertion."""

import time

import numpy as np
import pytest

from quasibohm import (
    evolve_ensemble,
    evolve_ode,
    evolve_ode_with_tangent,
    lyapunov_ratio,
    lyapunov_two_trajectory,
    lyapunov_variational,
    quasiperiodic_F,
    stratified_uniform,
)
from quasibohm.ensemble import equilibrium_distance
from quasibohm.spectrum import analyze_trajectory
from quasibohm.trajectory import evolve_cdf

TWO_PI = 2.0 * np.pi


def report(capsys, num, desc, ok, detail=""):
    tail = f" ({detail})" if detail else ""
    with capsys.disabled():
        print(f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}: {desc}{tail}")
    assert ok, f"criterion {num}: {desc}{tail}"


@pytest.fixture(scope="module", autouse=True)
def warm_kernels(stationary, doublewell_five):
    # compile every jitted kernel before any timed criterion runs
    state, x0 = doublewell_five
    t = np.linspace(0.0, 1.0, 3)
    evolve_ode(state, x0, t, drift_samples=3)
    evolve_cdf(state, x0, t)
    evolve_ode_with_tangent(state, x0, t)
    evolve_ensemble(state, np.array([2.0, 3.0]), t, method="CDF")
    evolve_ensemble(state, np.array([2.0, 3.0]), t, method="ODE")
    s2, y2 = stationary
    evolve_ode(s2, y2, t, drift_samples=0)


def test_01_stationary_state(stationary, capsys):
    state, x0 = stationary
    start = time.perf_counter()
    t = np.linspace(0.0, 100.0, 201)
    traj = evolve_ode(state, x0, t)
    dev = np.max(np.abs(traj.positions - x0))
    lam = np.max(np.abs(lyapunov_variational(state, x0, t).lambda_hat))
    elapsed = time.perf_counter() - start
    ok = dev < 1e-9 and lam < 1e-12 and elapsed < 1.0
    report(capsys, 1, "stationary trajectory fixed, lambda = 0, under 1 s", ok,
           f"|x-x0|={dev:.2e}, |lambda|={lam:.2e}, {elapsed:.2f}s")


def test_02_equivariance_drift(all_presets, capsys):
    worst = 0.0
    t = np.arange(0.0, 100.05, 0.1)
    for state, x0 in all_presets.values():
        traj = evolve_ode(state, x0, t, drift_samples=101)
        worst = max(worst, traj.diagnostics["cdf_drift"])
    ok = worst < 1e-6
    report(capsys, 2, "CDF conservation drift < 1e-6 on all presets", ok,
           f"max drift {worst:.2e}")


def test_03_cross_method_agreement(all_presets, capsys):
    worst = 0.0
    t = np.arange(0.0, 100.05, 0.1)
    for state, x0 in all_presets.values():
        ode = evolve_ode(state, x0, t, drift_samples=0)
        cdf = evolve_cdf(state, x0, t)
        worst = max(worst, float(np.max(np.abs(ode.positions - cdf.positions))))
    ok = worst < 1e-6
    report(capsys, 3, "ODE and CDF trajectories agree < 1e-6 on all presets",
           ok, f"sup gap {worst:.2e}")


def test_04_single_frequency_period(two_mode_box, capsys):
    state, x0 = two_mode_box
    period = TWO_PI / 1.5
    ts = np.arange(0.0, 100.0, 0.25)
    grid = np.unique(np.round(np.concatenate([ts, ts + period]), 12))
    traj = evolve_ode(state, x0, grid, drift_samples=0)
    a = traj.positions[np.searchsorted(grid, np.round(ts, 12))]
    b = traj.positions[np.searchsorted(grid, np.round(ts + period, 12))]
    gap = float(np.max(np.abs(a - b)))
    ok = gap < 1e-6
    report(capsys, 4, "two-mode trajectory periodic with T = 4 pi / 3", ok,
           f"max |x(t+T)-x(t)| = {gap:.2e}")


def test_05_quasiperiodic_representation(doublewell_five, capsys):
    state, x0 = doublewell_five
    p0 = state.cdf(x0, 0.0)
    rng = np.random.default_rng(29)
    times = np.sort(rng.uniform(0.01, 1000.0, 100))
    traj = evolve_cdf(state, x0, np.concatenate([[0.0], times]))
    worst = 0.0
    for t, x in zip(times, traj.positions[1:]):
        y = np.mod(state.frequencies * t, TWO_PI)
        worst = max(worst, abs(quasiperiodic_F(state, p0, y) - x))
    ok = worst < 1e-10
    report(capsys, 5, "x(t) = F(omega_i t mod 2 pi) at 100 random times", ok,
           f"max gap {worst:.2e}")


def test_06_lyapunov_zero(doublewell_five, capsys):
    state, x0 = doublewell_five
    start = time.perf_counter()
    t = np.arange(0.0, 1000.5, 1.0)
    var = lyapunov_variational(state, x0, t)
    rat = lyapunov_ratio(state, evolve_ode(state, x0, t, drift_samples=0))
    two = lyapunov_two_trajectory(state, x0, t, renorm_every=1.0)
    elapsed = time.perf_counter() - start
    stretch_bound = float(np.max(np.abs(var.log_stretch)))
    finals = [var.lambda_hat[-1], rat.lambda_hat[-1], two.lambda_hat[-1]]
    sel = var.horizons >= 100.0
    coef = np.polyfit(1.0 / var.horizons[sel], var.lambda_hat[sel], 1)
    intercept = float(coef[1])
    ok = (
        np.isfinite(stretch_bound)
        and all(abs(f) < 1e-2 for f in finals)
        and abs(intercept) < 1e-3
        and elapsed < 60.0
    )
    report(capsys, 6, "lambda = 0: bounded stretch, three estimators, 1/T fit",
           ok,
           f"|ln delta| <= {stretch_bound:.3g}, finals "
           f"{['%.1e' % f for f in finals]}, intercept {intercept:.1e}, "
           f"{elapsed:.1f}s")


def test_07_stretch_ratio_identity(all_presets, capsys):
    worst = 0.0
    t = np.arange(0.0, 100.05, 0.1)
    for state, x0 in all_presets.values():
        traj, tan = evolve_ode_with_tangent(state, x0, t)
        rat = lyapunov_ratio(state, traj)
        worst = max(worst, float(np.max(np.abs(tan[1:] - rat.log_stretch))))
    ok = worst < 1e-5
    report(capsys, 7, "ln delta equals ln(rho_0 / rho_t) on all presets", ok,
           f"max gap {worst:.2e}")


def test_08_spectral_quasiperiodicity(all_presets, capsys):
    dt = 0.05
    t = np.arange(0.0, 2000.0, dt)
    n_unmatched = 0
    worst_resid = 0.0
    for state, x0 in all_presets.values():
        traj = evolve_ode(state, x0, t, drift_samples=0)
        rep = analyze_trajectory(traj.positions, dt, state.frequencies,
                                 k_max=4, threshold=0.01)
        n_unmatched += len(rep.unmatched)
        matched = [p.residual for p in rep.peaks if p.matched]
        if matched:
            worst_resid = max(worst_resid, max(matched))
    ok = n_unmatched == 0 and worst_resid < 2.0 * (TWO_PI / 2000.0)
    report(capsys, 8, "every >= 1% peak matches the frequency lattice", ok,
           f"{n_unmatched} unmatched, max residual {worst_resid:.2e}")


def test_09_order_preservation(doublewell_five, capsys):
    state, _ = doublewell_five
    x0 = stratified_uniform(1000, 1e-3, 10.0 - 1e-3)
    t = np.linspace(0.0, 100.0, 11)
    inversions = 0
    for method in ("CDF", "ODE"):
        run = evolve_ensemble(state, x0, t, method=method)
        inversions += run.diagnostics["order_inversions"]
    ok = inversions == 0
    report(capsys, 9, "N = 1000 ensemble order preserved by both methods", ok,
           f"{inversions} inversions")


def test_10_non_convergence(doublewell_five, capsys):
    state, _ = doublewell_five
    x0 = stratified_uniform(10000, 1e-3, 10.0 - 1e-3)
    run = evolve_ensemble(state, x0, np.array([0.0, 500.0]), method="CDF")
    dist = equilibrium_distance(run, state)
    ok = dist[1] > 0.5 * dist[0]
    report(capsys, 10, "uniform ensemble keeps its Kolmogorov distance", ok,
           f"D(0) = {dist[0]:.4f}, D(500) = {dist[1]:.4f}")


def test_11_numerics_hygiene(doublewell_five, capsys):
    state, _ = doublewell_five
    rng = np.random.default_rng(31)
    worst = 0.0
    checked = 0
    while checked < 100:
        x = rng.uniform(0.5, 9.5)
        t = rng.uniform(0.0, 50.0)
        if state.density(x, t) < 1e-4:
            continue
        g = state.velocity_gradient(x, t)
        h = 1e-5
        fd = (state.velocity(x + h, t) - state.velocity(x - h, t)) / (2 * h)
        worst = max(worst, abs(g - fd) / max(abs(fd), 1e-7))
        checked += 1

    from quasibohm import PiecewiseBox, build_numeric

    def energy(n):
        pot = PiecewiseBox(0.0, np.pi, [((0.0, np.pi), 0.0)])
        return build_numeric(pot, n, 2).energies[1]

    e_ref = energy(16384)
    ratio = abs(energy(1024) - e_ref) / abs(energy(2048) - e_ref)
    ok = worst < 1e-4 and 3.0 < ratio < 5.0
    report(capsys, 11, "gradient matches finite differences; solver is O(dx^2)",
           ok, f"max rel err {worst:.2e}, refinement ratio {ratio:.2f}")
