"""Exact single-soliton solution for light stopped by a decaying control field.

Everything is dimensionless: frequencies in units of a reference Rabi
frequency, times in its inverse, lengths in c / reference (so c = 1 by
default).  Retarded coordinates are zeta = (z - z0)/c and tau = t - zeta.

The control field is Omega0 for tau < 0 and Omega0 * exp(-alpha tau)
afterwards.  The soliton rides on it; the auxiliary pair (w, z) carries all
of the time dependence and obeys

    dw/dtau = (i/2) Omega(tau) (1 - w**2) - i lambda w
    dz/dtau = (i/2) Omega(tau) w

with w(0) = w0, z(0) = 0.  For tau >= 0 the pair is written through Bessel
functions of order +-gamma, gamma = (alpha + i lambda)/(2 alpha).

All public functions broadcast over numpy arrays of ``zeta`` and ``tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import specfun
from .errors import DegenerateError, DomainError, ValidationError

__all__ = [
    "AtomState",
    "ControlField",
    "FieldSample",
    "MediumParams",
    "SolitonParams",
    "WZPair",
    "atom_state",
    "coefficient_C",
    "constant_bg_reference",
    "control_field",
    "evaluate",
    "fields",
    "group_velocity",
    "memory_width",
    "soliton_phase",
    "stopping_distance",
    "stopping_distance_limit",
    "w_initial",
    "wz",
    "wz_limit",
]


@dataclass(frozen=True)
class MediumParams:
    """Coupling nu0, detuning delta and light speed c of the medium."""

    nu0: float = 10.0
    delta: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        if not self.nu0 > 0:
            raise ValidationError(f"nu0 must be > 0, got {self.nu0}")
        if not self.c > 0:
            raise ValidationError(f"c must be > 0, got {self.c}")


@dataclass(frozen=True)
class ControlField:
    """Background Rabi frequency omega0 switched off at rate alpha (0 = never)."""

    omega0: float = 2.0
    alpha: float = 1.0

    def __post_init__(self):
        if not self.omega0 >= 0:
            raise ValidationError(f"omega0 must be >= 0, got {self.omega0}")
        if not self.alpha >= 0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")


@dataclass(frozen=True)
class SolitonParams:
    """Spectral parameter ``lam`` (Im < 0) and the two phase offsets."""

    lam: complex = -2.1j
    phi0: float = 0.0
    theta0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if not self.lam.imag < 0:
            raise ValidationError(f"Im(lambda) must be < 0, got {self.lam}")

    @classmethod
    def imaginary(cls, epsilon0, phi0=0.0, theta0=0.0):
        """The usual choice lambda = -i epsilon0."""
        return cls(lam=-1j * epsilon0, phi0=phi0, theta0=theta0)


@dataclass
class AtomState:
    """Amplitudes of levels |1>, |2>, |3>; scalars or equally shaped arrays."""

    c1: complex
    c2: complex
    c3: complex

    @property
    def populations(self):
        return abs(self.c1) ** 2, abs(self.c2) ** 2, abs(self.c3) ** 2

    @property
    def norm(self):
        p1, p2, p3 = self.populations
        return np.sqrt(p1 + p2 + p3)

    def as_array(self):
        """Stack into shape (..., 3)."""
        return np.stack(np.broadcast_arrays(self.c1, self.c2, self.c3), axis=-1)


@dataclass
class FieldSample:
    """Rabi frequencies of the probe (a) and control (b) channels."""

    omega_a: complex
    omega_b: complex


@dataclass
class WZPair:
    w: complex
    z: complex


def control_field(tau, cf: ControlField):
    tau = np.asarray(tau, dtype=float)
    out = np.where(tau < 0, cf.omega0, cf.omega0 * np.exp(-cf.alpha * np.maximum(tau, 0.0)))
    return float(out) if out.ndim == 0 else out


def w_initial(lam, omega0):
    """Stationary value w0 = Omega0 / (lambda + s), s**2 = lambda**2 + Omega0**2.

    The root s is taken on the same side as lambda, Re(s conj(lambda)) >= 0,
    which sends w0 to zero with Omega0.
    """
    lam = complex(lam)
    if not lam.imag < 0:
        raise ValidationError(f"Im(lambda) must be < 0, got {lam}")
    s = np.sqrt(lam * lam + omega0 * omega0 + 0j)
    if (s * lam.conjugate()).real < 0:
        s = -s
    den = lam + s
    if abs(den) < 1e-14:
        raise DegenerateError("lambda + sqrt(lambda**2 + omega0**2) vanished")
    return complex(omega0 / den)


def _gamma_order(lam, alpha):
    return (alpha + 1j * lam) / (2.0 * alpha)


def _log_half_arg(tau, cf: ControlField, branch):
    # Log(x/2) for x = -Omega(tau)/(2 alpha), written out so that it never underflows.
    return math.log(cf.omega0 / (4.0 * cf.alpha)) - cf.alpha * tau + 1j * math.pi * branch


def _bessel_parts(lam, cf: ControlField, tau, branch):
    """Common-factor-scaled Bessel combinations at x = -Omega(tau)/(2 alpha).

    Every J_{+-gamma}, J_{+-(1-gamma)} is multiplied by (x/2)**gamma so that the
    large factor exp(alpha gamma tau) cancels analytically.  Returns
    (s_mg, e2g_sg, half_s_1mg, e2gm1_s_gm1): the pieces of
    C J_{-g} + J_g and C J_{1-g} - J_{g-1}.
    """
    g = _gamma_order(lam, cf.alpha)
    tau = np.asarray(tau, dtype=float)
    x = -control_field(tau, cf) / (2.0 * cf.alpha)
    L = _log_half_arg(tau, cf, branch)
    s_mg = specfun.bessel_series(-g, x)
    s_g = specfun.bessel_series(g, x)
    s_1mg = specfun.bessel_series(1.0 - g, x)
    s_gm1 = specfun.bessel_series(g - 1.0, x)
    return (
        s_mg,
        np.exp(2.0 * g * L) * s_g,
        np.exp(L) * s_1mg,
        np.exp((2.0 * g - 1.0) * L) * s_gm1,
    )


def _check_bessel_domain(cf: ControlField):
    if cf.omega0 / (2.0 * cf.alpha) > specfun.MAX_ARGUMENT:
        raise DomainError(
            f"Omega0/(2 alpha) = {cf.omega0 / (2 * cf.alpha):.6g} is beyond the Bessel series range"
        )


def coefficient_C(lam, cf: ControlField, branch=1):
    """Constant fixing w(0) = w0 in the Bessel representation of w."""
    if not cf.alpha > 0:
        raise DomainError("coefficient_C needs alpha > 0")
    _check_bessel_domain(cf)
    w0 = w_initial(lam, cf.omega0)
    s_mg, e_sg, h_s1mg, e_sgm1 = _bessel_parts(lam, cf, 0.0, branch)
    num = -1j * w0 * e_sg + e_sgm1
    den = h_s1mg + 1j * w0 * s_mg
    if abs(den) < 1e-300:
        raise DegenerateError("denominator of C vanished")
    return complex(num / den)


def _wz_bessel(tau, lam, cf, branch):
    C = coefficient_C(lam, cf, branch)
    s_mg, e_sg, h_s1mg, e_sgm1 = _bessel_parts(lam, cf, tau, branch)
    v = C * s_mg + e_sg
    s0, e0, _, _ = _bessel_parts(lam, cf, 0.0, branch)
    v0 = C * s0 + e0
    w = 1j * (C * h_s1mg - e_sgm1) / v
    z = np.log(v / v0)
    return w, z


def _wz_riccati(tau, lam, cf):
    """Direct integration of the (w, z) ODE; used when the series cannot reach."""
    w0 = w_initial(lam, cf.omega0)
    t_eval = np.unique(tau)

    def rhs(t, y):
        w = y[0] + 1j * y[1]
        om = cf.omega0 * math.exp(-cf.alpha * t)
        dw = 0.5j * om * (1.0 - w * w) - 1j * lam * w
        dz = 0.5j * om * w
        return [dw.real, dw.imag, dz.real, dz.imag]

    t_end = float(t_eval[-1])
    if t_end == 0.0:
        return np.full(tau.shape, w0), np.zeros(tau.shape, dtype=complex)
    sol = solve_ivp(
        rhs, (0.0, t_end), [w0.real, w0.imag, 0.0, 0.0],
        method="DOP853", t_eval=t_eval, rtol=1e-12, atol=1e-14,
    )
    if not sol.success:
        raise DegenerateError(f"Riccati integration failed: {sol.message}")
    idx = np.searchsorted(t_eval, tau)
    w = (sol.y[0] + 1j * sol.y[1])[idx]
    z = (sol.y[2] + 1j * sol.y[3])[idx]
    return w, z


def wz(tau, lam, cf: ControlField, branch=1, method="auto"):
    """Auxiliary functions (w, z) at retarded time ``tau``.

    ``method`` is "bessel", "riccati" or "auto"; auto uses the Bessel closed
    form whenever Omega0/(2 alpha) is inside the series range and falls back
    to integrating the Riccati equation otherwise.  Im z is only defined
    modulo 2 pi.
    """
    lam = complex(lam)
    w0 = w_initial(lam, cf.omega0)
    tau = np.asarray(tau, dtype=float)
    scalar = tau.ndim == 0
    tau1 = np.atleast_1d(tau)
    w = np.full(tau1.shape, w0, dtype=complex)
    z = 0.5j * cf.omega0 * w0 * tau1.astype(complex)
    if cf.alpha > 0 and cf.omega0 > 0:
        pos = tau1 >= 0
        if np.any(pos):
            if method == "auto":
                method = "bessel" if cf.omega0 / (2 * cf.alpha) <= specfun.MAX_ARGUMENT else "riccati"
            if method == "bessel":
                wp, zp = _wz_bessel(tau1[pos], lam, cf, branch)
            elif method == "riccati":
                wp, zp = _wz_riccati(tau1[pos], lam, cf)
            else:
                raise ValueError(f"unknown method {method!r}")
            w[pos] = wp
            z[pos] = zp
    elif cf.alpha > 0:
        # No background at all: w0 = 0 and the pair is identically zero.
        z = np.zeros(tau1.shape, dtype=complex)
    if scalar:
        return WZPair(complex(w[0]), complex(z[0]))
    return WZPair(w, z)


def wz_limit(lam, cf: ControlField, branch=1):
    """z(tau -> infinity); its real part is never positive."""
    if not cf.alpha > 0:
        raise DomainError("wz_limit needs alpha > 0")
    lam = complex(lam)
    if cf.omega0 == 0:
        return 0j
    g = _gamma_order(lam, cf.alpha)
    C = coefficient_C(lam, cf, branch)
    s0, e0, _, _ = _bessel_parts(lam, cf, 0.0, branch)
    v0 = C * s0 + e0
    return complex(np.log(C * specfun.rgamma(1.0 - g) / v0))


def soliton_phase(zeta, tau, mp: MediumParams, sp: SolitonParams, cf: ControlField, _wz=None):
    """Envelope argument phi_s and carrier phase theta_s."""
    lam = sp.lam
    pair = _wz if _wz is not None else wz(tau, lam, cf)
    zeta = np.asarray(zeta, dtype=float)
    dl = lam - mp.delta
    phi = (
        sp.phi0
        - mp.nu0 * lam.imag * zeta / (2.0 * abs(dl) ** 2)
        + np.real(pair.z)
        + 0.5 * np.log1p(np.abs(pair.w) ** 2)
    )
    theta = sp.theta0 - 0.5 * mp.nu0 * zeta * (1.0 / dl).real + np.imag(pair.z)
    return phi, theta


def _sech(x):
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def evaluate(zeta, tau, mp: MediumParams, sp: SolitonParams, cf: ControlField):
    """Fields and atomic state together, sharing one (w, z) evaluation."""
    lam = sp.lam
    pair = wz(tau, lam, cf)
    zeta, tau = np.asarray(zeta, dtype=float), np.asarray(tau, dtype=float)
    phi, theta = soliton_phase(zeta, tau, mp, sp, cf, _wz=pair)
    w = pair.w
    root = np.sqrt(1.0 + np.abs(w) ** 2)
    sech = _sech(phi)
    th = np.tanh(phi)
    carrier = np.exp(1j * theta)
    two_i_im = lam.conjugate() - lam
    # Omega_a / w, kept separate so the state stays finite as w -> 0.
    oa_over_w = two_i_im / root * carrier * sech
    omega_a = oa_over_w * w
    omega_b = -two_i_im * w / root**2 * (1.0 + th) - control_field(tau, cf)

    dl = lam - mp.delta
    adl = abs(dl)
    # Imaginary part of i(nu0 zeta/(2(lam-delta)) - theta0) - z; its real part
    # combines with sech(phi) into 1 - tanh(phi).
    im_e = 0.5 * mp.nu0 * zeta * (1.0 / dl).real - sp.theta0 - np.imag(pair.z)
    cross = two_i_im / (2.0 * adl) * np.exp(1j * (theta + im_e)) * (1.0 - th)
    phase = np.exp(0.5j * mp.delta * tau)
    c1 = phase * ((lam.conjugate() - mp.delta) / adl - cross)
    c2 = phase * oa_over_w / (2.0 * adl)
    c3 = -phase * omega_a / (2.0 * adl)
    return FieldSample(omega_a, omega_b), AtomState(c1, c2, c3)


def fields(zeta, tau, mp: MediumParams, sp: SolitonParams, cf: ControlField):
    return evaluate(zeta, tau, mp, sp, cf)[0]


def atom_state(zeta, tau, mp: MediumParams, sp: SolitonParams, cf: ControlField):
    """Atomic amplitudes; the probability of |2> is what stores the pulse.

    The global factor is exp(+i delta tau/2), which is what the Schroedinger
    equation with H0 = -(delta/2) diag(1, 1, -1) gives for level |1>.
    """
    return evaluate(zeta, tau, mp, sp, cf)[1]


def constant_bg_reference(zeta, tau, mp: MediumParams, epsilon0, omega0, phi0=0.0):
    """Closed-form soliton on a constant background (lambda = -i eps0, delta = 0)."""
    if mp.delta != 0:
        raise DomainError("constant-background form requires delta = 0")
    if not epsilon0 > omega0:
        raise DomainError(f"need epsilon0 > omega0, got {epsilon0} <= {omega0}")
    k = math.sqrt(epsilon0**2 - omega0**2)
    zeta, tau = np.asarray(zeta, dtype=float), np.asarray(tau, dtype=float)
    phi = mp.nu0 * zeta / (2 * epsilon0) - 0.5 * tau * (epsilon0 - k) + phi0
    amp = math.sqrt(2 * epsilon0) * omega0 / math.sqrt(epsilon0 + k)
    omega_a = -1j * amp * _sech(phi)
    omega_b = omega0 * np.tanh(phi) + 0j
    return FieldSample(omega_a, omega_b)


def group_velocity(tau, mp: MediumParams, sp: SolitonParams, cf: ControlField):
    """Soliton speed as a fraction of c."""
    w2 = np.abs(wz(tau, sp.lam, cf).w) ** 2
    k = mp.nu0 / (2.0 * abs(mp.delta - sp.lam) ** 2)
    v = w2 / (k * (1.0 + w2) + w2)
    return float(v) if np.ndim(v) == 0 else v


def _length_scale(mp: MediumParams, sp: SolitonParams):
    return 2.0 * mp.c * abs(mp.delta - sp.lam) ** 2 / (mp.nu0 * abs(sp.lam.imag))


def stopping_distance(mp: MediumParams, sp: SolitonParams, cf: ControlField):
    """Distance covered between switch-off reaching the soliton and full stop."""
    w0 = w_initial(sp.lam, cf.omega0)
    zinf = wz_limit(sp.lam, cf)
    return _length_scale(mp, sp) * (0.5 * math.log1p(abs(w0) ** 2) - zinf.real)


def stopping_distance_limit(mp: MediumParams, sp: SolitonParams, cf: ControlField):
    """Instant switch-off (alpha -> infinity) value of the stopping distance."""
    w0 = w_initial(sp.lam, cf.omega0)
    return _length_scale(mp, sp) * 0.5 * math.log1p(abs(w0) ** 2)


def memory_width(mp: MediumParams, sp: SolitonParams):
    """Full width at quarter maximum of the stored |2> population; alpha-free."""
    return 2.0 * math.log(2.0 + math.sqrt(3.0)) * _length_scale(mp, sp)
