"""Self-consistency checks behind ``slowlight verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core
from .integrator import integrate, residual
from .scenario import Scenario, exact_solution, numeric_solution

FD_STEP = 1e-4


@dataclass
class Check:
    name: str
    value: float
    limit: object
    passed: bool

    def as_dict(self):
        v = self.value if math.isfinite(self.value) else None
        return {"name": self.name, "value": v, "limit": self.limit, "passed": self.passed}


def _upper(name, value, limit):
    value = float(value)
    return Check(name, value, limit, bool(value <= limit))


def _window(name, value, lo, hi):
    value = float(value)
    return Check(name, value, [lo, hi], bool(lo <= value <= hi))


def ode_defects(lam, cf, tau, h=FD_STEP):
    """Central-difference defects of the (w, z) ODE at the given times.

    Points closer than 2h to the kink at tau = 0 are dropped; the jump in
    Im z by 2 pi from the principal logarithm is folded away.
    """
    tau = np.asarray(tau, dtype=float)
    if cf.alpha > 0:
        tau = tau[np.abs(tau) >= 2 * h]
    plus, minus, mid = core.wz(tau + h, lam, cf), core.wz(tau - h, lam, cf), core.wz(tau, lam, cf)
    om = core.control_field(tau, cf)
    dw = (plus.w - minus.w) / (2 * h)
    dz = plus.z - minus.z
    dz = (dz.real + 1j * ((dz.imag + np.pi) % (2 * np.pi) - np.pi)) / (2 * h)
    rw = dw - (0.5j * om * (1 - mid.w**2) - 1j * lam * mid.w)
    rz = dz - 0.5j * om * mid.w
    return float(np.max(np.abs(rw))), float(np.max(np.abs(rz)))


def run_checks(scn: Scenario):
    """Evaluate every check; returns a list of Check records."""
    mp, sp, cf, g, tol = scn.medium, scn.soliton, scn.control, scn.grid, scn.tolerances
    checks = []

    rw, rz = ode_defects(sp.lam, cf, np.linspace(g.tau_min, g.tau_max, 401))
    checks.append(_upper("riccati_w", rw, tol.riccati))
    checks.append(_upper("quadrature_z", rz, tol.riccati))
    w0 = core.w_initial(sp.lam, cf.omega0)
    checks.append(_upper("boundary_w0", abs(core.wz(0.0, sp.lam, cf).w - w0), tol.boundary))

    exact = exact_solution(g, mp, sp, cf)
    checks.append(_upper("exact_norm", exact.norm_deviation, tol.norm))
    # the residual stencils need three nodes per axis; smaller grids fail the check
    usable = g.n_zeta >= 3 and g.n_tau >= 3
    if usable:
        coarse = residual(exact, mp)
        fine = residual(exact_solution(g.refined(), mp, sp, cf), mp)
    for part in ("liouville", "maxwell_a", "maxwell_b"):
        ratio = float("nan")
        if usable:
            a, b = getattr(coarse, f"{part}_max"), getattr(fine, f"{part}_max")
            ratio = a / b if b > 0 else float("inf")
        checks.append(_window(f"residual_order_{part}", ratio,
                              tol.residual_order_min, tol.residual_order_max))

    num = numeric_solution(g, mp, sp, cf, check_norm=False)
    peak = np.max(np.abs(exact.omega_a))
    with np.errstate(over="ignore", invalid="ignore"):
        field_err = np.max(np.abs(num.omega_a - exact.omega_a)) / peak
        pop_err = np.max(np.abs(np.abs(num.psi) ** 2 - np.abs(exact.psi) ** 2))
    checks.append(_upper("numeric_field", field_err if np.isfinite(field_err) else np.inf,
                         tol.numeric_field))
    checks.append(_upper("numeric_population", pop_err if np.isfinite(pop_err) else np.inf,
                         tol.numeric_population))
    checks.append(_upper("numeric_norm_drift", num.norm_deviation, tol.norm_drift))

    background = core.FieldSample(np.zeros(g.n_tau, dtype=complex),
                                  -core.control_field(g.tau, cf) + 0j)
    dark = integrate(mp, background, np.array([1, 0, 0], dtype=complex), g, check_norm=False)
    with np.errstate(over="ignore", invalid="ignore"):
        leak = max(np.max(np.abs(dark.omega_b - background.omega_b)), np.max(np.abs(dark.omega_a)))
    checks.append(_upper("dark_state_transparency", leak if np.isfinite(leak) else np.inf,
                         tol.transparency))
    return checks


def report(scn: Scenario, checks):
    return {
        "scenario": scn.to_dict(),
        "checks": [c.as_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }
