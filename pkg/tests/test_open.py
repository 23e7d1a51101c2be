import numpy as np
import pytest
from scipy.integrate import solve_ivp

from nhdyn import closed_system as cs
from nhdyn import models, states
from nhdyn import open_system as op
from nhdyn.errors import DefectiveMatrixError, NonUniqueSteadyStateError, ZeroGapError
from nhdyn.linalg import unvec, vec
from nhdyn.models import SIGMA_X, SIGMA_Z
from nhdyn.models import apt_two_qubit
from nhdyn.open_system import DephasingConfig, strong_dephasing_scaling

from conftest import frob

# independent oracle values: Liouvillian assembled from matrix units E_ij,
# eigenvalues by numpy, b = 0.5
TAU_COLLECTIVE = {0.05: 0.5704061362743756, 0.1: 0.5688063343092574,
                  0.2: 0.5731638638605995, 0.3: 0.5822018129150347, 1.0: 0.67209168764923}
TAU_LOCAL = {0.05: 0.5886713204040681, 0.1: 0.6003982326088038,
             0.2: 0.6250000000000053, 0.3: 0.6510413461260852, 1.0: 0.8674850621292918}


def oracle_liouvillian(h, jumps):
    """Superoperator from its action on matrix units, column-stacked."""
    d = h.shape[0]
    cols = []
    for j in range(d):
        for i in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            out = -1j * (h @ e - e @ h.conj().T)
            for g, l in jumps:
                ll = l.conj().T @ l
                out += g * (l @ e @ l.conj().T - 0.5 * (ll @ e + e @ ll))
            cols.append(out.T.ravel())
    return np.array(cols).T


COLLECTIVE = np.kron(SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), SIGMA_Z)
LOCAL1 = np.kron(SIGMA_Z, np.eye(2))
LOCAL2 = np.kron(np.eye(2), SIGMA_Z)


def test_dephasing_config_validation():
    with pytest.raises(ValueError):
        DephasingConfig.two_qubit(-0.1, 0, 0)
    with pytest.raises(ValueError):
        DephasingConfig((np.nan,), 0)
    d = DephasingConfig.two_qubit(0.1, 0.2, 0.3)
    assert (d.gamma1, d.gamma2, d.gamma3) == (0.1, 0.2, 0.3)
    with pytest.raises(ValueError):
        d.jump_operators(3)


def test_jump_operators_two_qubit():
    ops = DephasingConfig.two_qubit(0.1, 0.2, 0.3).jump_operators(2)
    assert [g for g, _ in ops] == [0.1, 0.2, 0.3]
    assert np.array_equal(ops[0][1], LOCAL1)
    assert np.array_equal(ops[1][1], LOCAL2)
    assert np.array_equal(ops[2][1], COLLECTIVE)


def test_liouvillian_zero():
    assert not np.any(op.build_liouvillian(np.zeros((2, 2))))


def test_liouvillian_matches_oracle(rng):
    h = models.apt_two_qubit(0.5).matrix
    deph = DephasingConfig.two_qubit(0.1, 0.2, 0.3)
    ref = oracle_liouvillian(h, [(0.1, LOCAL1), (0.2, LOCAL2), (0.3, COLLECTIVE)])
    assert np.abs(op.build_liouvillian(h, deph) - ref).max() < 1e-14


@pytest.mark.parametrize("h", [models.pt_two_qubit(1.25), models.apt_two_qubit(0.5),
                               models.pt_two_qubit(0.4)])
@pytest.mark.parametrize("deph", [DephasingConfig.two_qubit(0, 0, 0.1),
                                  DephasingConfig.two_qubit(0.3, 0.7, 0.2)])
def test_liouvillian_action(h, deph, rng):
    sup = op.build_liouvillian(h, deph)
    for _ in range(100):
        rho = states.random_density_matrix(4, rng)
        assert frob(unvec(sup @ vec(rho)), op.apply_liouvillian(h, deph, rho)) < 1e-12


def test_liouvillian_action_three_qubits(rng):
    h = models.apt_general(3, 0.5, 0.2)
    deph = DephasingConfig((0.1, 0.2, 0.3), 0.4)
    sup = op.build_liouvillian(h, deph)
    for _ in range(20):
        rho = states.random_density_matrix(8, rng)
        assert frob(unvec(sup @ vec(rho)), op.apply_liouvillian(h, deph, rho)) < 1e-12


def test_hermitian_spectrum_is_imaginary(rng):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = g + g.conj().T
    mu = op.liouvillian_eigenvalues(h)
    assert np.abs(mu.real).max() < 1e-10


@pytest.mark.parametrize("h", [models.pt_two_qubit(1.25), models.apt_two_qubit(0.4),
                               models.apt_two_qubit(2.0)])
def test_closed_limit_spectrum(h):
    lam = np.linalg.eigvals(h.matrix)
    expected = np.array([-1j * (lm - ln.conj()) for lm in lam for ln in lam])
    mu = op.liouvillian_eigenvalues(h)
    # match as multisets
    for z in expected:
        k = np.argmin(np.abs(mu - z))
        assert abs(mu[k] - z) < 1e-8
    assert np.all(np.diff(mu.real) <= 1e-9)


def test_rhs_open_special_cases(rng):
    h = models.apt_two_qubit(0.5)
    rho = states.random_density_matrix(4, rng)
    assert np.array_equal(op.rhs_open(h, op.NO_DEPHASING, rho), cs.rhs_closed(h, rho))
    mixed = states.maximally_mixed(2)
    deph = DephasingConfig.two_qubit(0.4, 0.5, 0.6)
    assert frob(op.rhs_open(h, deph, mixed), cs.rhs_closed(h, mixed)) < 1e-15
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    herm = g + g.conj().T
    lindblad = op.apply_liouvillian(herm, deph, rho)
    assert frob(op.rhs_open(herm, deph, rho), lindblad) < 1e-12


def test_rhs_open_trace_free(rng):
    deph = DephasingConfig.two_qubit(0.3, 0.1, 0.5)
    for h in (models.pt_two_qubit(1.25), models.apt_two_qubit(0.5)):
        rho = states.random_density_matrix(4, rng)
        assert abs(np.trace(op.rhs_open(h, deph, rho))) < 1e-12


def test_propagate_open_limits(rng):
    h = models.apt_two_qubit(0.5)
    rho = states.random_density_matrix(4, rng)
    deph = DephasingConfig.two_qubit(0, 0, 0.2)
    assert np.array_equal(op.propagate_open(h, deph, rho, 0.0), rho)
    for t in (0.5, 3.0):
        assert frob(op.propagate_open(h, op.NO_DEPHASING, rho, t),
                    cs.propagate_closed(h, rho, t)) < 1e-9


def test_propagate_open_matches_integration():
    h = models.apt_two_qubit(0.5)
    deph = DephasingConfig.two_qubit(0, 0, 0.2)
    rho0 = states.bell_state()
    grid = np.linspace(0, 5, 11)
    ys = op.integrate_open(h, deph, rho0, grid)
    for t, y in zip(grid, ys):
        assert frob(y, op.propagate_open(h, deph, rho0, t)) < 1e-7


def test_propagate_open_matches_solve_ivp():
    h = models.pt_two_qubit(1.25)
    deph = DephasingConfig.two_qubit(0.1, 0.2, 0.05)
    rho0 = states.all_up(2)

    def f(_, y):
        return op.rhs_open(h, deph, y.reshape(4, 4)).ravel()

    sol = solve_ivp(f, (0, 3), rho0.ravel(), t_eval=[3.0], rtol=1e-11, atol=1e-13,
                    method="DOP853")
    assert frob(op.propagate_open(h, deph, rho0, 3.0), sol.y[:, 0].reshape(4, 4)) < 1e-7


def test_evolve_open_matches_propagation():
    h = models.apt_two_qubit(0.5)
    deph = DephasingConfig.two_qubit(0.1, 0.1, 0)
    t, ys = op.evolve_open(h, deph, states.bell_state(), 4.0, 0.02)
    for k in (0, 50, 200):
        assert frob(ys[k], op.propagate_open(h, deph, states.bell_state(), t[k])) < 1e-9


def test_spectrum_sigma_x():
    mu = op.liouvillian_eigenvalues(SIGMA_X)
    for z in (0, 0, 2j, -2j):
        assert np.abs(mu - z).min() < 1e-12
    assert np.abs(mu.real).max() < 1e-12
    spec = op.liouvillian_spectrum(SIGMA_X)
    assert spec.gap == pytest.approx(0, abs=1e-12)
    assert spec.steady_state is None


def test_nonunique_steady_state():
    with pytest.raises(NonUniqueSteadyStateError):
        op.liouvillian_spectrum(np.zeros((2, 2)), DephasingConfig((1.0,), 0))


def test_spectrum_closed_apt_gap():
    spec = op.liouvillian_spectrum(models.apt_two_qubit(0.5))
    assert spec.gap == pytest.approx(2 * np.sqrt(0.75), abs=1e-9)
    assert spec.gap == pytest.approx(1.732051, abs=1e-6)
    assert op.relaxation_time_open(spec) == pytest.approx(1 / (2 * np.sqrt(0.75)), rel=1e-9)
    assert op.relaxation_time_open(spec) == pytest.approx(0.57735, abs=1e-5)


def test_spectrum_sorted_and_normalized():
    spec = op.liouvillian_spectrum(models.apt_two_qubit(0.5), DephasingConfig.two_qubit(0, 0, 0.2))
    e = spec.eigenvalues.real
    assert np.all(np.diff(e) <= spec.tie_tol)
    assert np.trace(spec.steady_state) == pytest.approx(1)
    for m in spec.eigenmatrices[1:]:
        assert np.linalg.norm(m) == pytest.approx(1)
        flat = m.ravel(order="F")
        first = flat[np.flatnonzero(np.abs(flat) > 1e-12 * np.abs(flat).max())[0]]
        assert abs(first.imag) < 1e-12 and first.real > 0


@pytest.mark.parametrize("deph", [DephasingConfig.two_qubit(0, 0, 0.2),
                                  DephasingConfig.two_qubit(0.1, 0.1, 0),
                                  DephasingConfig.two_qubit(0.3, 0.05, 1.0)])
def test_steady_state_stationary(deph):
    h = models.apt_two_qubit(0.5)
    spec = op.liouvillian_spectrum(h, deph)
    ss = spec.steady_state
    sup = op.build_liouvillian(h, deph)
    assert np.linalg.norm(sup @ vec(ss) - spec.eigenvalues[0] * vec(ss)) < 1e-8
    assert np.linalg.norm(op.rhs_open(h, deph, ss)) < 1e-8


def test_expansion_reconstructs_initial_state():
    h = models.pt_two_qubit(1.25)
    spec = op.liouvillian_spectrum(h, DephasingConfig.two_qubit(0.1, 0.1, 0))
    rho0 = states.bell_state()
    c = spec.expansion(rho0)
    back = sum(cj * m for cj, m in zip(c, spec.eigenmatrices))
    assert frob(back, rho0) < 1e-9
    r = spec.r_matrix(rho0)
    assert r.shape == (4, 4)


@pytest.mark.parametrize("gamma", [0.05, 0.1, 0.2, 0.3, 1.0])
def test_relaxation_time_against_oracle(gamma):
    h = models.apt_two_qubit(0.5)
    spec = op.liouvillian_spectrum(h, DephasingConfig.two_qubit(0, 0, gamma))
    assert op.relaxation_time_open(spec) == pytest.approx(TAU_COLLECTIVE[gamma], rel=1e-9)
    spec = op.liouvillian_spectrum(h, DephasingConfig.two_qubit(gamma, gamma, 0))
    assert op.relaxation_time_open(spec) == pytest.approx(TAU_LOCAL[gamma], rel=1e-9)


def test_relaxation_time_increases_with_collective_rate():
    h = models.apt_two_qubit(0.5)
    taus = [op.relaxation_time_open(op.liouvillian_spectrum(h, DephasingConfig.two_qubit(0, 0, g)))
            for g in (0.1, 0.3, 1.0)]
    assert taus[0] < taus[1] < taus[2]


def test_relaxation_time_errors():
    assert op.relaxation_time_open(2.0) == 0.5
    with pytest.raises(ZeroGapError):
        op.relaxation_time_open(0.0)


def test_asymptotic_decay_rate():
    h = models.apt_two_qubit(0.5)
    deph = DephasingConfig.two_qubit(0, 0, 0.2)
    spec = op.liouvillian_spectrum(h, deph)
    ts = np.linspace(0, 40, 801)
    d = np.array([frob(op.propagate_open(h, deph, states.all_up(2), t), spec.steady_state)
                  for t in ts])
    mask = (d > 1e-9) & (d < 1e-8)
    slope = np.polyfit(ts[mask], np.log(d[mask]), 1)[0]
    assert -slope == pytest.approx(spec.gap, rel=0.03)


DIAG = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)


@pytest.mark.parametrize("gamma", [0.0, 1.0, 1e3])
def test_freezing_apt(gamma):
    h = models.apt_two_qubit(0.5)
    for deph in (DephasingConfig.two_qubit(0, 0, gamma), DephasingConfig.two_qubit(gamma, gamma, 0)):
        assert op.freezing_diagnostic(h, deph, DIAG) <= 1e-12


def test_freezing_three_qubit_apt(rng):
    h = models.apt_general(3, 0.5, 0.2)
    rho = np.diag(rng.dirichlet(np.ones(8))).astype(complex)
    for g in (0.0, 1.0, op.STRONG_DEPHASING):
        assert op.freezing_diagnostic(h, DephasingConfig.local(3, g), rho) <= 1e-12
        assert op.freezing_diagnostic(h, DephasingConfig((), g), rho) <= 1e-12


def test_freezing_pt_nonzero():
    h = models.pt_two_qubit(1.25)
    val = op.freezing_diagnostic(h, DephasingConfig.two_qubit(0, 0, 1.0), DIAG)
    assert val > 0.1


def fig6_family(h):
    return op.spectrum_sweep(h, lambda g: DephasingConfig((g,), 0.0), np.linspace(0, 20, 201))


def test_spectrum_sweep_fig6_hermitian():
    sw = fig6_family(SIGMA_X + 0.5 * SIGMA_Z)
    assert sw.argmax_gap == pytest.approx(1.5)
    assert sw.gaps.max() == pytest.approx(2.0, abs=1e-9)
    assert not sw.is_strictly_decreasing()
    assert sw.gap_at_max_gamma == pytest.approx(0.10018816688288723, rel=1e-8)


def test_spectrum_sweep_fig6_apt():
    sw = fig6_family(1j * SIGMA_X + 0.5 * SIGMA_Z)
    assert sw.is_strictly_decreasing()
    assert sw.argmax_gap == 0.0
    assert sw.gaps[0] == pytest.approx(np.sqrt(3), rel=1e-9)
    assert sw.gap_at_max_gamma == pytest.approx(0.09968939961022426, rel=1e-8)


def test_spectrum_sweep_fig6_pt():
    sw = fig6_family(SIGMA_X + 0.5j * SIGMA_Z)
    assert sw.gap_at_max_gamma == pytest.approx(2.0050236029049318, rel=1e-8)
    assert sw.gaps.max() == pytest.approx(3.2215910530942855, rel=1e-8)
    assert sw.argmax_gap == pytest.approx(2.2)


def test_spectrum_sweep_rows_keep_order():
    h = models.apt_two_qubit(0.5)
    gammas = [1.0, 0.0, 0.3, 0.05, 0.2]
    fam = lambda g: DephasingConfig.two_qubit(0, 0, g)
    serial = op.spectrum_sweep(h, fam, gammas)
    threaded = op.spectrum_sweep(h, fam, gammas, workers=3)
    assert list(threaded.gammas) == gammas
    assert np.array_equal(serial.gaps, threaded.gaps)


def test_spectrum_sweep_records_errors():
    h_family = lambda g: SIGMA_X if g else np.zeros((2, 2))
    sw = op.spectrum_sweep(h_family, lambda g: DephasingConfig((g,), 0), [0.0, 1.0])
    assert sw.rows[0].error is not None and sw.rows[0].error.startswith("nonunique-steady-state")
    assert sw.rows[0].gap == pytest.approx(0, abs=1e-12)
    assert sw.rows[1].error is None
    with pytest.raises(ValueError):
        op.spectrum_sweep(SIGMA_X, lambda g: DephasingConfig((g,), 0), [])


def test_defective_top_is_reported():
    # Jordan block at the top of the Liouvillian spectrum
    h = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises((DefectiveMatrixError, NonUniqueSteadyStateError)):
        op.liouvillian_spectrum(h)


def test_zero_dephasing_strongly_non_normal(rng):
    # eigenvector condition ~470; the 64 x 64 superoperator exponential
    # loses about three digits here, the 8 x 8 Hamiltonian one does not
    import scipy.linalg
    h = models.apt_general(3, 1.5259374018810057, 0.48624270002482284,
                           1.4517892169982494, 0.15961814874849534)
    rho0 = states.random_density_matrix(8, rng)
    t = 7.076412726869003
    u = scipy.linalg.expm(-1j * h.matrix * t)
    ref = u @ rho0 @ u.conj().T
    ref /= np.trace(ref)
    assert frob(op.propagate_open(h, op.NO_DEPHASING, rho0, t), ref) < 1e-9
    ys = op.integrate_open(h, DephasingConfig((0.01,) * 3, 0.0), rho0, [0.0, t],
                           rtol=1e-12, atol=1e-14)
    assert frob(ys[1], op.propagate_open(h, DephasingConfig((0.01,) * 3, 0.0), rho0, t)) < 1e-7


def test_strong_dephasing_scaling_single_qubit():
    fam = lambda g: DephasingConfig((g,), 0.0)
    r = strong_dephasing_scaling(SIGMA_X + 0.5 * SIGMA_Z, fam)
    # sigma_z dephasing damps the coherence at 2 gamma
    np.testing.assert_allclose(r.coherence_rates, 2 * r.gammas, rtol=1e-2)
    assert abs(r.coherence_exponent - 1) < 1e-3
    assert abs(r.gap_exponent + 1) < 1e-3


def test_strong_dephasing_scaling_finite_plateau():
    fam = lambda g: DephasingConfig((g,), 0.0)
    r = strong_dephasing_scaling(SIGMA_X + 0.5j * SIGMA_Z, fam)
    assert abs(r.coherence_exponent - 1) < 1e-2
    assert abs(r.gap_exponent) < 1e-3


def test_strong_dephasing_scaling_collective_protected_coherence():
    # |01><10| is untouched by collective sigma_z, so the slowest coherence stays finite
    r = strong_dephasing_scaling(apt_two_qubit(0.5), DephasingConfig.collective)
    assert r.coherence_exponent < 0
    r = strong_dephasing_scaling(apt_two_qubit(0.5), lambda g: DephasingConfig.local(2, g))
    assert abs(r.coherence_exponent - 1) < 1e-3


def test_strong_dephasing_scaling_rejects_bad_gammas():
    fam = lambda g: DephasingConfig((g,), 0.0)
    with pytest.raises(ValueError):
        strong_dephasing_scaling(SIGMA_X, fam, gammas=(10.0,))
    with pytest.raises(ValueError):
        strong_dephasing_scaling(SIGMA_X, fam, gammas=(0.0, 10.0))
