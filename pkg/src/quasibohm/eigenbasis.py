"""Energy eigenbases of 1D potentials: analytic wells/oscillators and a
finite-difference solver for piecewise-constant boxes with hard walls."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import kernels
from .errors import CapabilityError, InvalidParameterError, NumericError

_MAX_HARMONIC_STATES = 64


@dataclass(frozen=True)
class InfiniteWell:
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise InvalidParameterError("well width must be positive")


@dataclass(frozen=True)
class Harmonic:
    mass: float
    angular_frequency: float

    def __post_init__(self):
        if self.mass <= 0 or self.angular_frequency <= 0:
            raise InvalidParameterError("mass and angular frequency must be positive")


@dataclass(frozen=True)
class PiecewiseBox:
    """Hard-walled box [x_lo, x_hi] with a piecewise-constant potential.

    segments: list of ((a, b), V) that must tile [x_lo, x_hi] exactly.
    """

    x_lo: float
    x_hi: float
    segments: tuple = field(default=())

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise InvalidParameterError("need x_lo < x_hi")
        if not self.segments:
            raise InvalidParameterError("at least one potential segment required")
        segs = tuple(((float(a), float(b)), float(v)) for (a, b), v in self.segments)
        object.__setattr__(self, "segments", segs)
        edge = self.x_lo
        for (a, b), _ in segs:
            if abs(a - edge) > 1e-12 * (1 + abs(edge)) or b <= a:
                raise InvalidParameterError("segments must tile the box without gaps or overlaps")
            edge = b
        if abs(edge - self.x_hi) > 1e-12 * (1 + abs(self.x_hi)):
            raise InvalidParameterError("segments must end at x_hi")

    def edges_values(self):
        edges = np.array([a for (a, _), _ in self.segments])
        values = np.array([v for _, v in self.segments])
        return edges, values

    def value_at(self, x):
        edges, values = self.edges_values()
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(values) - 1)
        return values[idx]


class EigenBasis:
    """Ordered bound states (E_i, phi_i) of a 1D potential.

    Immutable after construction; evaluation goes through the jit kernels so
    the same code path serves trajectories and direct queries.
    """

    def __init__(self, kind, energies, potential, hbar, mass, x_lo, x_hi,
                 well_width=0.0, omega_ho=0.0, grid_x=None, grid_phi=None):
        self.kind = kind
        self.energies = np.asarray(energies, dtype=float)
        self.potential = potential
        self.hbar = float(hbar)
        self.mass = float(mass)
        self.x_lo = float(x_lo)
        self.x_hi = float(x_hi)
        self.well_width = float(well_width)
        self.omega_ho = float(omega_ho)
        self.grid_x = np.empty(0) if grid_x is None else np.asarray(grid_x, dtype=float)
        if grid_phi is None:
            self.grid_phi = np.empty((len(self.energies), 0))
        else:
            self.grid_phi = np.asarray(grid_phi, dtype=float)
        if np.any(np.diff(self.energies) <= 0):
            raise NumericError("energies are not strictly increasing")

    @property
    def count(self):
        return len(self.energies)

    def table(self, coeffs=None):
        """Pack into the flat StateTable consumed by the kernels."""
        if coeffs is None:
            coeffs = np.zeros(self.count, dtype=complex)
        if isinstance(self.potential, PiecewiseBox):
            seg_edges, seg_v = self.potential.edges_values()
        else:
            seg_edges, seg_v = np.zeros(1), np.zeros(1)
        return kernels.StateTable(
            kind=self.kind,
            energies=self.energies,
            coeffs=np.asarray(coeffs, dtype=complex),
            hbar=self.hbar,
            mass=self.mass,
            x_lo=self.x_lo,
            x_hi=self.x_hi,
            well_width=self.well_width,
            omega_ho=self.omega_ho,
            grid_x=self.grid_x,
            grid_phi=self.grid_phi,
            seg_edges=seg_edges,
            seg_v=seg_v,
        )

    def _eval(self, x):
        tab = self.table()
        phi = np.empty(self.count)
        dphi = np.empty(self.count)
        kernels.phi_all(tab, float(x), phi, dphi)
        return phi, dphi

    def phi(self, i, x):
        """phi_i(x); x may be a scalar or an array."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([self._eval(xi)[0][i] for xi in xs])
        return out if np.ndim(x) else out[0]

    def dphi(self, i, x):
        """phi_i'(x)."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([self._eval(xi)[1][i] for xi in xs])
        return out if np.ndim(x) else out[0]

    def d2phi(self, i, x):
        """phi_i'' from the eigenvalue relation (2m/hbar^2)(V - E_i) phi_i."""
        v = self.potential_value(x)
        return (2.0 * self.mass / self.hbar**2) * (v - self.energies[i]) * self.phi(i, x)

    def potential_value(self, x):
        if self.kind == kernels.KIND_WELL:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        if self.kind == kernels.KIND_HARMONIC:
            return 0.5 * self.mass * self.omega_ho**2 * np.asarray(x, dtype=float) ** 2
        return self.potential.value_at(x)

    def sample_grid(self, n=2049):
        return np.linspace(self.x_lo, self.x_hi, n)

    def phi_matrix(self, xs):
        """phi_i(x_j) for all states, shape (count, len(xs))."""
        tab = self.table()
        phi = np.empty(self.count)
        dphi = np.empty(self.count)
        out = np.empty((self.count, len(xs)))
        for j, xi in enumerate(xs):
            kernels.phi_all(tab, float(xi), phi, dphi)
            out[:, j] = phi
        return out

    def orthonormality_matrix(self, n=8193):
        """Trapezoid Gram matrix; should be the identity to ~1e-8."""
        xs = self.sample_grid(n)
        pm = self.phi_matrix(xs)
        w = np.full(len(xs), xs[1] - xs[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return (pm * w) @ pm.T

    def node_counts(self, n=8193):
        """Interior sign changes per state; state i must have exactly i."""
        xs = self.sample_grid(n)[1:-1]
        pm = self.phi_matrix(xs)
        counts = []
        for row in pm:
            mask = np.abs(row) > 1e-9 * np.max(np.abs(row))
            signs = np.sign(row[mask])
            counts.append(int(np.sum(signs[1:] != signs[:-1])))
        return counts


def build_infinite_well(L, count, hbar=1.0, m=1.0):
    """Analytic particle-in-a-box basis: E_k = hbar^2 pi^2 k^2 / (2 m L^2)."""
    if L <= 0 or count < 1:
        raise InvalidParameterError("need L > 0 and count >= 1")
    k = np.arange(1, count + 1)
    energies = (hbar * math.pi * k / L) ** 2 / (2.0 * m)
    return EigenBasis(
        kernels.KIND_WELL, energies, InfiniteWell(L), hbar, m, 0.0, L, well_width=L
    )


def build_harmonic(m, omega_ho, count, hbar=1.0):
    """Harmonic oscillator basis via the normalized Hermite-function recurrence."""
    if m <= 0 or omega_ho <= 0 or count < 1:
        raise InvalidParameterError("need m, omega_ho > 0 and count >= 1")
    if count > _MAX_HARMONIC_STATES:
        raise CapabilityError(
            f"harmonic basis supports at most {_MAX_HARMONIC_STATES} states"
        )
    energies = hbar * omega_ho * (np.arange(count) + 0.5)
    ell = math.sqrt(hbar / (m * omega_ho))
    return EigenBasis(
        kernels.KIND_HARMONIC,
        energies,
        Harmonic(m, omega_ho),
        hbar,
        m,
        -12.0 * ell,
        12.0 * ell,
        omega_ho=omega_ho,
    )


def build_numeric(potential, grid_points, count, hbar=1.0, m=1.0):
    """Lowest bound states of a PiecewiseBox by the 3-point finite-difference
    Hamiltonian with Dirichlet walls and a symmetric tridiagonal eigensolve."""
    if not isinstance(potential, PiecewiseBox):
        raise InvalidParameterError("numeric bases require a PiecewiseBox potential")
    if grid_points < 512:
        raise InvalidParameterError("need at least 512 grid points")
    if count < 1 or count >= grid_points / 8:
        raise InvalidParameterError("need 1 <= count < grid_points/8")
    xs = np.linspace(potential.x_lo, potential.x_hi, grid_points)
    dx = xs[1] - xs[0]
    interior = xs[1:-1]
    v = potential.value_at(interior)
    kin = hbar * hbar / (2.0 * m * dx * dx)
    diag = 2.0 * kin + v
    off = np.full(grid_points - 3, -kin)
    try:
        energies, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise NumericError("tridiagonal eigensolver failed", {"cause": repr(exc)}) from exc
    grid_phi = np.zeros((count, grid_points))
    for i in range(count):
        vec = vecs[:, i]
        norm = math.sqrt(dx * float(np.dot(vec, vec)))
        vec = vec / norm
        lead = vec[np.argmax(np.abs(vec) > 1e-8 * np.max(np.abs(vec)))]
        if lead < 0:
            vec = -vec
        grid_phi[i, 1:-1] = vec
    return EigenBasis(
        kernels.KIND_NUMERIC,
        energies,
        potential,
        hbar,
        m,
        potential.x_lo,
        potential.x_hi,
        grid_x=xs,
        grid_phi=grid_phi,
    )
