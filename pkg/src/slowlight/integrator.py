"""Numerical Maxwell-Bloch solver in retarded coordinates and a residual oracle.

The atoms are kept as pure states psi = (psi1, psi2, psi3) obeying
d psi/d tau = -i H psi, and the fields obey

    d Omega_a/d zeta = i nu0 psi3 conj(psi1)
    d Omega_b/d zeta = i nu0 psi3 conj(psi2)

(the 31 and 32 entries of the commutator [D, rho] are -2 rho_31, -2 rho_32).

``integrate`` marches in zeta.  On every zeta slice the Schroedinger equation
is advanced over the whole tau axis with classical RK4, the fields at the
half steps being the linear interpolation of the nodal values.  Because that
ODE is linear, each RK4 step is a 3x3 matrix, and the sweep is evaluated as
a cumulative matrix product (log-depth scan) instead of a Python loop.  The
fields are then advanced in zeta with Heun's predictor-corrector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import AtomState, FieldSample
from .errors import ConfigError, NormDriftError

__all__ = [
    "Grid2D",
    "ResidualReport",
    "SolutionGrid",
    "hamiltonian",
    "integrate",
    "maxwell_rhs",
    "residual",
    "schrodinger_rhs",
]

log = logging.getLogger(__name__)

NORM_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class Grid2D:
    zeta_min: float = 0.0
    zeta_max: float = 3.0
    tau_min: float = -15.0
    tau_max: float = 30.0
    n_zeta: int = 151
    n_tau: int = 451

    def __post_init__(self):
        if not (self.zeta_max > self.zeta_min >= 0):
            raise ConfigError("grid needs zeta_max > zeta_min >= 0")
        if not self.tau_max > self.tau_min:
            raise ConfigError("grid needs tau_max > tau_min")
        if self.n_zeta < 2 or self.n_tau < 2:
            raise ConfigError("grid needs at least 2 nodes per axis")

    @property
    def zeta(self):
        return np.linspace(self.zeta_min, self.zeta_max, self.n_zeta)

    @property
    def tau(self):
        return np.linspace(self.tau_min, self.tau_max, self.n_tau)

    @property
    def d_zeta(self):
        return (self.zeta_max - self.zeta_min) / (self.n_zeta - 1)

    @property
    def d_tau(self):
        return (self.tau_max - self.tau_min) / (self.n_tau - 1)

    def refined(self, factor=2):
        """Same box with every spacing divided by ``factor`` (nodes nest)."""
        return Grid2D(
            self.zeta_min, self.zeta_max, self.tau_min, self.tau_max,
            (self.n_zeta - 1) * factor + 1, (self.n_tau - 1) * factor + 1,
        )


@dataclass
class SolutionGrid:
    """Fields and states on the nodes of ``grid``, indexed [i_zeta, i_tau].

    ``breakpoints`` lists tau values where the control field has a kink;
    ``residual`` never lets a difference stencil straddle one.
    """

    grid: Grid2D
    omega_a: np.ndarray
    omega_b: np.ndarray
    psi: np.ndarray
    breakpoints: tuple = ()

    @property
    def populations(self):
        p = np.abs(self.psi) ** 2
        return p[..., 0], p[..., 1], p[..., 2]

    @property
    def intensities(self):
        return np.abs(self.omega_a) ** 2, np.abs(self.omega_b) ** 2

    @property
    def norm_deviation(self):
        with np.errstate(over="ignore", invalid="ignore"):
            dev = np.abs(np.sqrt(np.sum(np.abs(self.psi) ** 2, axis=-1)) - 1.0)
        return float(np.max(dev)) if np.all(np.isfinite(dev)) else float("inf")


@dataclass
class ResidualReport:
    liouville_max: float
    liouville_l2: float
    maxwell_a_max: float
    maxwell_a_l2: float
    maxwell_b_max: float
    maxwell_b_l2: float
    d_zeta: float
    d_tau: float

    def as_dict(self):
        return dict(self.__dict__)


def hamiltonian(fs: FieldSample, delta):
    """H = -(delta/2) diag(1, 1, -1) - (Oa|3><1| + Ob|3><2|)/2 + h.c.

    Broadcasts over array-valued fields; the result has shape (..., 3, 3).
    """
    oa, ob = np.broadcast_arrays(np.asarray(fs.omega_a, dtype=complex),
                                 np.asarray(fs.omega_b, dtype=complex))
    H = np.zeros(oa.shape + (3, 3), dtype=complex)
    H[..., 0, 0] = -0.5 * delta
    H[..., 1, 1] = -0.5 * delta
    H[..., 2, 2] = 0.5 * delta
    H[..., 2, 0] = -0.5 * oa
    H[..., 2, 1] = -0.5 * ob
    H[..., 0, 2] = -0.5 * np.conj(oa)
    H[..., 1, 2] = -0.5 * np.conj(ob)
    return H


def _psi_array(psi):
    if isinstance(psi, AtomState):
        return psi.as_array()
    return np.asarray(psi, dtype=complex)


def schrodinger_rhs(psi, H):
    """-i H psi for psi of shape (..., 3)."""
    psi = _psi_array(psi)
    return -1j * np.einsum("...ij,...j->...i", H, psi)


def maxwell_rhs(psi, nu0):
    """(dOmega_a/dzeta, dOmega_b/dzeta) = i nu0 psi3 (conj psi1, conj psi2)."""
    psi = _psi_array(psi)
    p3 = psi[..., 2]
    return 1j * nu0 * p3 * np.conj(psi[..., 0]), 1j * nu0 * p3 * np.conj(psi[..., 1])


def _step_matrices(omega_a, omega_b, delta, h):
    """RK4 one-step propagators for d psi/d tau = A(tau) psi on every interval."""
    A = -1j * hamiltonian(FieldSample(omega_a, omega_b), delta)
    A0, A1 = A[:-1], A[1:]
    Am = 0.5 * (A0 + A1)
    eye = np.eye(3, dtype=complex)
    K1 = A0
    K2 = Am @ (eye + 0.5 * h * K1)
    K3 = Am @ (eye + 0.5 * h * K2)
    K4 = A1 @ (eye + h * K3)
    return eye + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


def _cumulative_product(M):
    """P[n] = M[n] @ M[n-1] @ ... @ M[0] (Hillis-Steele scan)."""
    P = M.copy()
    d = 1
    n = len(P)
    while d < n:
        P[d:] = P[d:] @ P[:-d]
        d *= 2
    return P


def _sweep_tau(omega_a, omega_b, psi0, delta, h):
    P = _cumulative_product(_step_matrices(omega_a, omega_b, delta, h))
    out = np.empty((len(omega_a), 3), dtype=complex)
    out[0] = psi0
    out[1:] = P @ psi0
    return out


def integrate(mp, boundary_fields: FieldSample, initial_state, grid: Grid2D,
              breakpoints=(), check_norm=True):
    """March the Maxwell-Bloch system from zeta_min to zeta_max.

    ``boundary_fields`` holds the tau profiles at zeta = zeta_min, one value per
    tau node.  ``initial_state`` is the atomic state at tau_min, either one
    state for every zeta or an (n_zeta, 3) profile.
    """
    nz, nt = grid.n_zeta, grid.n_tau
    oa = np.asarray(boundary_fields.omega_a, dtype=complex)
    ob = np.asarray(boundary_fields.omega_b, dtype=complex)
    if oa.shape != (nt,) or ob.shape != (nt,):
        raise ConfigError(f"boundary fields must have shape ({nt},), got {oa.shape} / {ob.shape}")
    init = _psi_array(initial_state)
    if init.shape == (3,):
        init = np.broadcast_to(init, (nz, 3))
    elif init.shape != (nz, 3):
        raise ConfigError(f"initial state must have shape (3,) or ({nz}, 3), got {init.shape}")
    if np.max(np.abs(np.linalg.norm(init, axis=-1) - 1.0)) > 1e-10:
        raise ConfigError("initial state is not normalized")

    h, dz = grid.d_tau, grid.d_zeta
    delta, nu0 = mp.delta, mp.nu0
    omega_a = np.empty((nz, nt), dtype=complex)
    omega_b = np.empty((nz, nt), dtype=complex)
    psi = np.empty((nz, nt, 3), dtype=complex)
    omega_a[0], omega_b[0] = oa, ob
    # Under-resolved grids can blow up; the norm check below reports that.
    with np.errstate(over="ignore", invalid="ignore"):
        psi[0] = _sweep_tau(oa, ob, init[0], delta, h)
        for j in range(nz - 1):
            fa, fb = maxwell_rhs(psi[j], nu0)
            pa, pb = oa + dz * fa, ob + dz * fb
            trial = _sweep_tau(pa, pb, init[j + 1], delta, h)
            ga, gb = maxwell_rhs(trial, nu0)
            oa = oa + 0.5 * dz * (fa + ga)
            ob = ob + 0.5 * dz * (fb + gb)
            omega_a[j + 1], omega_b[j + 1] = oa, ob
            psi[j + 1] = _sweep_tau(oa, ob, init[j + 1], delta, h)

    sol = SolutionGrid(grid, omega_a, omega_b, psi, tuple(breakpoints))
    drift = sol.norm_deviation
    log.debug("integrate: %d x %d nodes, max norm drift %.3e", nz, nt, drift)
    if check_norm and drift > NORM_DRIFT_LIMIT:
        raise NormDriftError(f"state norm drifted by {drift:.3e} (limit {NORM_DRIFT_LIMIT:g})")
    return sol


def _tau_derivative(f, tau, breakpoints):
    """Second-order d/dtau along axis 1 at interior nodes 1..n-2.

    Stencils that would straddle a breakpoint are replaced by the one-sided
    three-point formula on the smooth side.
    """
    h = tau[1] - tau[0]
    d = (f[:, 2:] - f[:, :-2]) / (2 * h)
    for b in breakpoints:
        for i in range(1, len(tau) - 1):
            if tau[i - 1] < b < tau[i + 1]:
                if tau[i] >= b and i + 2 < len(tau):
                    d[:, i - 1] = (-3 * f[:, i] + 4 * f[:, i + 1] - f[:, i + 2]) / (2 * h)
                elif tau[i] < b and i - 2 >= 0:
                    d[:, i - 1] = (3 * f[:, i] - 4 * f[:, i - 1] + f[:, i - 2]) / (2 * h)
    return d


def _norms(r):
    a = np.abs(r)
    return float(a.max()), float(np.sqrt(np.mean(a**2)))


def residual(candidate: SolutionGrid, mp) -> ResidualReport:
    """Finite-difference defect of ``candidate`` in both evolution equations.

    Central differences at interior nodes; ``*_l2`` entries are root mean
    squares over those nodes.
    """
    g = candidate.grid
    if g.n_zeta < 3 or g.n_tau < 3:
        raise ConfigError("residual needs at least 3 nodes per axis")
    tau, dz = g.tau, g.d_zeta
    psi = candidate.psi
    dpsi = np.stack(
        [_tau_derivative(psi[..., k], tau, candidate.breakpoints) for k in range(3)], axis=-1
    )
    inner = slice(1, -1)
    H = hamiltonian(FieldSample(candidate.omega_a[:, inner], candidate.omega_b[:, inner]), mp.delta)
    rl = dpsi + 1j * np.einsum("...ij,...j->...i", H, psi[:, inner])
    rl = np.linalg.norm(rl, axis=-1)

    fa, fb = maxwell_rhs(psi[inner], mp.nu0)
    ra = (candidate.omega_a[2:] - candidate.omega_a[:-2]) / (2 * dz) - fa
    rb = (candidate.omega_b[2:] - candidate.omega_b[:-2]) / (2 * dz) - fb
    return ResidualReport(*_norms(rl), *_norms(ra), *_norms(rb), dz, g.d_tau)
