"""Superpositions of energy eigenstates: wavefunction, density, guidance
velocity, and the cumulative distribution H_t with its inverse."""

import threading
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, InvalidParameterError, NodeProximityError

DEFAULT_EPS_NODE = 1e-12
DEFAULT_CDF_PANELS = 1 << 14
DEFAULT_CDF_XTOL = 1e-12

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseVector:
    """Angles y_1..y_n, reduced mod 2*pi."""

    values: tuple

    def __init__(self, values):
        object.__setattr__(
            self, "values", tuple(float(v) % TWO_PI for v in np.atleast_1d(values))
        )

    def __len__(self):
        return len(self.values)

    def asarray(self):
        return np.array(self.values)


class SuperpositionState:
    """Normalized superposition sum_i a_i e^{-i E_i t / hbar} phi_i(x).

    Immutable; holds a one-slot cache of the cumulative-Simpson CDF table for
    the most recently queried time, guarded by a lock so concurrent readers
    stay consistent.
    """

    def __init__(self, basis, coefficients, eps_node=DEFAULT_EPS_NODE,
                 cdf_panels=DEFAULT_CDF_PANELS, cdf_xtol=DEFAULT_CDF_XTOL):
        coeffs = np.asarray(coefficients, dtype=complex)
        if coeffs.ndim != 1 or len(coeffs) != basis.count:
            raise InvalidParameterError(
                f"expected {basis.count} coefficients, got {coeffs.shape}"
            )
        norm = np.sqrt(np.sum(np.abs(coeffs) ** 2))
        if norm == 0:
            raise InvalidParameterError("coefficient vector must be nonzero")
        self.basis = basis
        self.coefficients = coeffs / norm
        self.hbar = basis.hbar
        self.mass = basis.mass
        self.n = basis.count - 1
        self.frequencies = (basis.energies[1:] - basis.energies[0]) / basis.hbar
        self.eps_node = float(eps_node)
        self.cdf_panels = int(cdf_panels)
        self.cdf_xtol = float(cdf_xtol)
        self._table = basis.table(self.coefficients)
        self._cdf_lock = threading.Lock()
        self._cdf_cache = None

    # -- coefficient views ---------------------------------------------------

    @property
    def table(self):
        return self._table

    def coeffs_at(self, t):
        return kernels.coeffs_at_time(self._table, float(t))

    def coeffs_phases(self, phases):
        return kernels.coeffs_with_phases(self._table, self._phases_array(phases))

    def _phases_array(self, phases):
        if isinstance(phases, PhaseVector):
            y = phases.asarray()
        else:
            y = np.atleast_1d(np.asarray(phases, dtype=float))
        if len(y) != self.n:
            raise InvalidParameterError(
                f"phase vector has length {len(y)}, state has n={self.n}"
            )
        return np.mod(y, TWO_PI)

    def _check_domain(self, x):
        if x < self.basis.x_lo or x > self.basis.x_hi:
            raise DomainError(
                f"x={x} outside domain [{self.basis.x_lo}, {self.basis.x_hi}]"
            )

    # -- pointwise fields ----------------------------------------------------

    def psi(self, x, t, derivatives=False):
        """Wavefunction at (x, t); with derivatives=True also psi' and psi''."""
        self._check_domain(x)
        parts = kernels.wave_parts(self._table, self.coeffs_at(t), float(x))
        return parts if derivatives else parts[0]

    def psi_phases(self, x, phases, derivatives=False):
        """Wavefunction with the time phases replaced by explicit angles y_i."""
        self._check_domain(x)
        parts = kernels.wave_parts(self._table, self.coeffs_phases(phases), float(x))
        return parts if derivatives else parts[0]

    def density(self, x, t):
        self._check_domain(x)
        return kernels.rho_at(self._table, self.coeffs_at(t), float(x))

    def density_phases(self, x, phases):
        self._check_domain(x)
        return kernels.rho_at(self._table, self.coeffs_phases(phases), float(x))

    def _field(self, x, t):
        self._check_domain(x)
        v, g, rho = kernels.field_at(self._table, self.coeffs_at(t), float(x))
        if rho < self.eps_node:
            raise NodeProximityError(x, t, rho)
        return v, g

    def velocity(self, x, t):
        """Guidance velocity (hbar/m) Im psi'/psi."""
        return self._field(x, t)[0]

    def velocity_gradient(self, x, t):
        """Spatial derivative of the guidance velocity (tangent dynamics rate)."""
        return self._field(x, t)[1]

    # -- cumulative distribution ---------------------------------------------

    def _cdf_table(self, t):
        t = float(t)
        with self._cdf_lock:
            cached = self._cdf_cache
            if cached is not None and cached[0] == t:
                return cached[1], cached[2], cached[3]
            coeffs = self.coeffs_at(t)
            edges, cum = kernels.simpson_table(self._table, coeffs, self.cdf_panels)
            self._cdf_cache = (t, coeffs, edges, cum)
            return coeffs, edges, cum

    def cdf(self, x, t):
        """H_t(x): probability mass to the left of x."""
        self._check_domain(x)
        coeffs, edges, cum = self._cdf_table(t)
        return kernels.cdf_lookup(self._table, coeffs, edges, cum, float(x))

    def cdf_inverse(self, p, t):
        """Leftmost x with H_t(x) = p."""
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise InvalidParameterError(f"probability {p} outside [0, 1]")
        coeffs, edges, cum = self._cdf_table(t)
        return kernels.cdf_invert(self._table, coeffs, edges, cum, p, self.cdf_xtol)

    def cdf_phases(self, x, phases):
        self._check_domain(x)
        coeffs = self.coeffs_phases(phases)
        edges, cum = kernels.simpson_table(self._table, coeffs, self.cdf_panels)
        return kernels.cdf_lookup(self._table, coeffs, edges, cum, float(x))

    def cdf_inverse_phases(self, p, phases):
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise InvalidParameterError(f"probability {p} outside [0, 1]")
        coeffs = self.coeffs_phases(phases)
        edges, cum = kernels.simpson_table(self._table, coeffs, self.cdf_panels)
        return kernels.cdf_invert(self._table, coeffs, edges, cum, p, self.cdf_xtol)
