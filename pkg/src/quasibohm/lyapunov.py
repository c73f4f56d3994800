"""Three independent Lyapunov-exponent estimators for the 1D guidance flow:
the exact density-ratio identity, tangent-space (variational) integration,
and a naive finite-separation two-trajectory method."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidParameterError, NodeProximityError
from .trajectory import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    _check_grid,
    _check_start,
    _run_dopri,
)


@dataclass
class LyapunovEstimate:
    horizons: np.ndarray
    lambda_hat: np.ndarray
    log_stretch: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)


def _series(t, t0, log_stretch, method, diagnostics=None):
    horizons = t[1:] - t0
    return LyapunovEstimate(
        horizons=horizons,
        lambda_hat=log_stretch[1:] / horizons,
        log_stretch=log_stretch[1:],
        method=method,
        diagnostics=diagnostics or {},
    )


def lyapunov_ratio(state, trajectory):
    """ln(dx(t)/dx(0)) from the conserved-density identity rho_0 / rho_t."""
    t = trajectory.times
    rho = kernels.rho_along(state.table, t, trajectory.positions)
    bad = np.argmax(rho < state.eps_node) if np.any(rho < state.eps_node) else -1
    if bad >= 0:
        raise NodeProximityError(trajectory.positions[bad], t[bad], rho[bad])
    log_stretch = np.log(rho[0]) - np.log(rho)
    return _series(t, t[0], log_stretch, "Ratio", {"min_density": float(np.min(rho))})


def lyapunov_variational(state, x0, t_grid, rel_tol=DEFAULT_REL_TOL,
                         abs_tol=DEFAULT_ABS_TOL):
    """Integrate the tangent dynamics d(ln delta)/dt = dv/dx along the path."""
    t = _check_grid(t_grid)
    _check_start(state, x0, t[0])
    _, log_stretch, diagnostics = _run_dopri(state, x0, t, rel_tol, abs_tol, True)
    return _series(t, t[0], log_stretch, "Variational", diagnostics)


def lyapunov_two_trajectory(state, x0, t_grid, d0=1e-8, renorm_every=1.0,
                            rel_tol=1e-12, abs_tol=1e-13):
    """Benettin-style finite-separation estimator with periodic renormalization.

    Deliberately naive (the method a numerical chaos claim would reach for);
    tight default tolerances keep the separation signal above integrator noise.
    """
    t = _check_grid(t_grid)
    if d0 <= 0 or renorm_every <= 0:
        raise InvalidParameterError("need d0 > 0 and renorm_every > 0")
    t0, t_end = t[0], t[-1]
    _check_start(state, x0, t0)
    x1 = float(x0)
    x2 = x1 + d0
    if x2 > state.basis.x_hi:
        x2 = x1 - d0
    acc = 0.0
    collapses = 0
    horizons = []
    lam = []
    stretch = []
    t_cur = t0
    while t_cur < t_end - 1e-12:
        t_next = min(t_cur + renorm_every, t_end)
        seg = np.array([t_cur, t_next])
        out1, _, _ = _run_dopri(state, x1, seg, rel_tol, abs_tol, False)
        out2, _, _ = _run_dopri(state, x2, seg, rel_tol, abs_tol, False)
        x1 = float(out1[-1])
        d = float(out2[-1]) - x1
        if abs(d) < 1e-15:
            collapses += 1
            d = d0 if d >= 0 else -d0  # re-seed a collapsed separation
        acc += math.log(abs(d) / d0)
        x2 = x1 + math.copysign(d0, d)
        if x2 > state.basis.x_hi or x2 < state.basis.x_lo:
            x2 = x1 - math.copysign(d0, d)
        t_cur = t_next
        horizons.append(t_cur - t0)
        lam.append(acc / (t_cur - t0))
        stretch.append(acc)
    diagnostics = {"separation_collapses": collapses, "d0": d0}
    return LyapunovEstimate(
        horizons=np.array(horizons),
        lambda_hat=np.array(lam),
        log_stretch=np.array(stretch),
        method="TwoTrajectory",
        diagnostics=diagnostics,
    )
