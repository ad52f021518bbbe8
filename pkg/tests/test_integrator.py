import numpy as np
import pytest

from slowlight import core
from slowlight.core import AtomState, ControlField, FieldSample, MediumParams
from slowlight.errors import ConfigError, NormDriftError
from slowlight.integrator import (
    Grid2D,
    SolutionGrid,
    hamiltonian,
    integrate,
    maxwell_rhs,
    residual,
    schrodinger_rhs,
)
from slowlight.scenario import exact_solution, numeric_solution, parse_scenario, sample

from conftest import NU0, OMEGA0

SMALL = Grid2D(0, 1.5, -10, 12, 41, 221)


def _random_state(rng, shape=()):
    v = rng.normal(size=shape + (3,)) + 1j * rng.normal(size=shape + (3,))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


# --- Hamiltonian and right-hand sides -----------------------------------------

def test_hamiltonian_bare():
    H = hamiltonian(FieldSample(0, 0), 0.8)
    np.testing.assert_array_equal(H, -0.4 * np.diag([1, 1, -1]).astype(complex))


def test_hamiltonian_hermitian(rng):
    oa = rng.normal(size=20) + 1j * rng.normal(size=20)
    ob = rng.normal(size=20) + 1j * rng.normal(size=20)
    H = hamiltonian(FieldSample(oa, ob), 0.3)
    assert H.shape == (20, 3, 3)
    np.testing.assert_array_equal(H, np.conj(np.swapaxes(H, -1, -2)))


def test_hamiltonian_matrix_elements():
    oa = 2.476 * np.exp(0.7j)
    ob = -1.5 + 0.2j
    H = hamiltonian(FieldSample(oa, ob), 0.0)
    assert H[2, 0] == -oa / 2
    assert H[2, 1] == -ob / 2
    assert H[0, 2] == -np.conj(oa) / 2
    assert H[0, 1] == 0


def test_schrodinger_rhs_examples(rng):
    ground = np.array([1, 0, 0], dtype=complex)
    assert np.all(schrodinger_rhs(ground, np.zeros((3, 3))) == 0)
    # dark state: control alone does not couple |1>
    H = hamiltonian(FieldSample(0, 1.7 - 0.4j), 0.0)
    assert np.all(schrodinger_rhs(ground, H) == 0)
    psi = _random_state(rng, (50,))
    H = hamiltonian(FieldSample(rng.normal(size=50) + 1j, rng.normal(size=50) - 2j), 0.6)
    dnorm = 2 * np.real(np.sum(np.conj(psi) * schrodinger_rhs(psi, H), axis=-1))
    assert np.max(np.abs(dnorm)) < 1e-14


def test_schrodinger_rhs_accepts_atom_state():
    st = AtomState(1 / np.sqrt(2), 0, 1 / np.sqrt(2))
    H = hamiltonian(FieldSample(1.0, 0.0), 0.0)
    np.testing.assert_allclose(schrodinger_rhs(st, H), -1j * H @ st.as_array())


def test_maxwell_rhs_examples():
    assert maxwell_rhs(np.array([1, 0, 0]), NU0) == (0, 0)
    assert maxwell_rhs(np.array([0, 0, 1]), NU0) == (0, 0)
    da, db = maxwell_rhs(np.array([1, 0, 1]) / np.sqrt(2), NU0)
    assert abs(da - 5j) < 1e-14
    assert db == 0


def test_maxwell_rhs_from_commutator(rng):
    """The rhs equals the 31 and 32 entries of -(i nu0/2) [D, rho] with rho = |psi><psi|."""
    D = np.diag([1, 1, -1]).astype(complex)
    for psi in _random_state(rng, (5,)):
        rho = np.outer(psi, np.conj(psi))
        comm = -0.5j * NU0 * (D @ rho - rho @ D)
        da, db = maxwell_rhs(psi, NU0)
        assert abs(da - comm[2, 0]) < 1e-13
        assert abs(db - comm[2, 1]) < 1e-13


# --- Grid2D --------------------------------------------------------------------

def test_grid_spacing_and_refinement():
    g = Grid2D(0, 3, -15, 30, 151, 451)
    assert g.d_zeta == pytest.approx(0.02)
    assert g.d_tau == pytest.approx(0.1)
    r = g.refined()
    assert (r.n_zeta, r.n_tau) == (301, 901)
    np.testing.assert_allclose(r.tau[::2], g.tau, atol=1e-12)


@pytest.mark.parametrize("kwargs", [
    dict(zeta_min=-1.0), dict(zeta_max=0.0), dict(tau_max=-20.0), dict(n_zeta=1), dict(n_tau=0),
])
def test_grid_rejects_bad_input(kwargs):
    with pytest.raises(ConfigError):
        Grid2D(**kwargs)


# --- integrate -----------------------------------------------------------------

def test_dark_state_transparency(medium, control):
    g = Grid2D(0, 3, -15, 30, 61, 451)
    background = FieldSample(np.zeros(g.n_tau, complex), -core.control_field(g.tau, control) + 0j)
    sol = integrate(medium, background, np.array([1, 0, 0], complex), g)
    assert np.max(np.abs(sol.omega_b - background.omega_b)) <= 1e-8
    assert np.max(np.abs(sol.omega_a)) <= 1e-8
    assert sol.norm_deviation < 1e-12


def test_integrate_tracks_exact_solution(medium, soliton, control):
    num = numeric_solution(SMALL, medium, soliton, control)
    exact = exact_solution(SMALL, medium, soliton, control)
    peak = np.max(np.abs(exact.omega_a))
    assert np.max(np.abs(num.omega_a - exact.omega_a)) < 2e-2 * peak
    assert np.max(np.abs(np.abs(num.psi) ** 2 - np.abs(exact.psi) ** 2)) < 2e-2


def test_integrate_second_order(medium, soliton, control):
    errs = []
    for g in (Grid2D(0, 1.5, -10, 12, 41, 221), Grid2D(0, 1.5, -10, 12, 81, 441)):
        num = numeric_solution(g, medium, soliton, control)
        exact = exact_solution(g, medium, soliton, control)
        errs.append(np.max(np.abs(num.omega_a - exact.omega_a)))
    assert 3.0 <= errs[0] / errs[1] <= 5.0


def test_integrate_is_deterministic(medium, soliton, control):
    a = numeric_solution(SMALL, medium, soliton, control)
    b = numeric_solution(SMALL, medium, soliton, control)
    assert np.array_equal(a.omega_a, b.omega_a)
    assert np.array_equal(a.psi, b.psi)


def test_integrate_shape_errors(medium):
    bad = FieldSample(np.zeros(5, complex), np.zeros(5, complex))
    with pytest.raises(ConfigError):
        integrate(medium, bad, np.array([1, 0, 0], complex), SMALL)
    ok = FieldSample(np.zeros(SMALL.n_tau, complex), np.zeros(SMALL.n_tau, complex))
    with pytest.raises(ConfigError):
        integrate(medium, ok, np.ones((3, 3), complex), SMALL)
    with pytest.raises(ConfigError):
        integrate(medium, ok, np.array([1, 1, 0], complex), SMALL)


def test_norm_drift_error(medium, soliton, control):
    coarse = Grid2D(0, 3, -15, 30, 4, 7)
    with pytest.raises(NormDriftError):
        numeric_solution(coarse, medium, soliton, control)
    sol = numeric_solution(coarse, medium, soliton, control, check_norm=False)
    assert sol.norm_deviation > 1e-6


def test_step_propagator_matches_rk4_loop(rng):
    from slowlight.integrator import _sweep_tau

    n, h, delta = 33, 0.05, 0.4
    oa = rng.normal(size=n) + 1j * rng.normal(size=n)
    ob = rng.normal(size=n) + 1j * rng.normal(size=n)
    psi0 = _random_state(rng)

    def f(k, frac, y):
        a = oa[k] + frac * (oa[k + 1] - oa[k])
        b = ob[k] + frac * (ob[k + 1] - ob[k])
        return schrodinger_rhs(y, hamiltonian(FieldSample(a, b), delta))

    y = psi0.copy()
    ref = [y]
    for k in range(n - 1):
        k1 = f(k, 0, y)
        k2 = f(k, 0.5, y + 0.5 * h * k1)
        k3 = f(k, 0.5, y + 0.5 * h * k2)
        k4 = f(k, 1, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ref.append(y)
    np.testing.assert_allclose(_sweep_tau(oa, ob, psi0, delta, h), np.array(ref), atol=1e-13)


# --- residual -------------------------------------------------------------------

def test_residual_zero_for_dark_grid():
    g = Grid2D(0, 1, -2, 2, 5, 9)
    psi = np.zeros((5, 9, 3), complex)
    psi[..., 0] = 1
    sol = SolutionGrid(g, np.zeros((5, 9)), np.full((5, 9), -2.0 + 0j), psi)
    r = residual(sol, MediumParams())
    assert max(r.liouville_max, r.maxwell_a_max, r.maxwell_b_max) == 0
    assert r.as_dict()["d_zeta"] == pytest.approx(0.25)


def test_residual_needs_three_nodes():
    g = Grid2D(0, 1, -2, 2, 2, 9)
    sol = SolutionGrid(g, np.zeros((2, 9)), np.zeros((2, 9)), np.zeros((2, 9, 3)))
    with pytest.raises(ConfigError):
        residual(sol, MediumParams())


def test_residual_second_order(medium, soliton, control):
    g = Grid2D(0, 3, -15, 30, 151, 451)
    a = residual(exact_solution(g, medium, soliton, control), medium)
    b = residual(exact_solution(g.refined(), medium, soliton, control), medium)
    for part in ("liouville_max", "maxwell_a_max", "maxwell_b_max"):
        assert 3.5 <= getattr(a, part) / getattr(b, part) <= 4.5, part
    assert a.liouville_l2 <= a.liouville_max


def test_residual_detects_field_error(medium, soliton, control):
    # a 1% error only stands out once the tau truncation error is small
    g = Grid2D(0, 3, -15, 30, 601, 6001)
    exact = exact_solution(g, medium, soliton, control)
    bumped = SolutionGrid(g, 1.01 * exact.omega_a, exact.omega_b, exact.psi, exact.breakpoints)
    assert residual(bumped, medium).liouville_max >= 10 * residual(exact, medium).liouville_max


def test_residual_flags_wrong_maxwell_sign(medium, soliton, control):
    g = Grid2D(0, 3, -15, 30, 151, 451)
    exact = exact_solution(g, medium, soliton, control)
    mirrored = SolutionGrid(g, exact.omega_a, exact.omega_b, np.conj(exact.psi), exact.breakpoints)
    ok = residual(exact, medium)
    bad = residual(mirrored, medium)
    assert bad.maxwell_a_max > 100 * ok.maxwell_a_max


# --- physical properties of the default scenario ----------------------------------

@pytest.fixture(scope="module")
def lab_numeric():
    return sample(parse_scenario({}), "numeric")


def test_frozen_imprint(lab_numeric):
    d = lab_numeric
    p2 = d.grids["P2"]
    final = d.time >= d.time[0] + 0.75 * (d.time[-1] - d.time[0])
    beyond = d.space >= d.space[np.argmax(p2[-1])]
    spread = p2[final][:, beyond].max(axis=0) - p2[final][:, beyond].min(axis=0)
    assert spread.max() <= 1e-3
    assert p2[-1].max() > 0.9


def test_shock_front_overshoot(lab_numeric):
    d = lab_numeric
    assert d.grids["I_b"][d.time > 0].max() > OMEGA0**2
