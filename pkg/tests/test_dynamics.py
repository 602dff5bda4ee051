import numpy as np
import pytest

from chiralpulse import (
    GridTooCoarse,
    Handedness,
    NonFiniteHamiltonian,
    QuantumState,
    RabiSample,
    basis_state,
    build_general_hamiltonian,
    build_hamiltonian,
    fidelity,
    make_grid,
    propagate,
    schedule_hamiltonian,
    sps_schedule,
)

L, R = Handedness.LEFT, Handedness.RIGHT


def test_build_hamiltonian_left_example():
    h = build_hamiltonian(L, RabiSample(omega=1.0, omega_q=2.0))
    expected = np.array([[0, 1, -2j], [1, 0, 1], [2j, 1, 0]], dtype=complex)
    np.testing.assert_array_equal(h, expected)


def test_build_hamiltonian_right_sign_flip():
    h = build_hamiltonian(R, RabiSample(omega=1.0, omega_q=2.0))
    expected = np.array([[0, 1, 2j], [1, 0, 1], [-2j, 1, 0]], dtype=complex)
    np.testing.assert_array_equal(h, expected)


def test_build_hamiltonian_zero_couplings():
    h = build_hamiltonian(R, RabiSample(omega=0.0, omega_q=0.0))
    np.testing.assert_array_equal(h, np.zeros((3, 3), dtype=complex))


def test_left_right_related_by_omega_q_negation():
    for om, oq in ((0.3, 1.7), (2.0, -0.4)):
        hl = build_hamiltonian(L, RabiSample(om, oq))
        hr = build_hamiltonian(R, RabiSample(om, oq))
        hl_neg = build_hamiltonian(L, RabiSample(om, -oq))
        np.testing.assert_array_equal(hr, hl_neg)


def test_hermiticity_exact():
    rng = np.random.default_rng(7)
    for _ in range(50):
        om, oq = rng.uniform(0, 5), rng.uniform(-5, 5)
        for hand in (L, R):
            h = build_hamiltonian(hand, RabiSample(om, oq))
            np.testing.assert_array_equal(h, h.conj().T)
        g = build_general_hamiltonian(hand, rng.uniform(0, 2), rng.uniform(0, 2),
                                      oq, rng.uniform(0, 2 * np.pi))
        np.testing.assert_array_equal(g, g.conj().T)


def test_general_hamiltonian_specializes_exactly():
    for hand in (L, R):
        g = build_general_hamiltonian(hand, 1.3, 1.3, 0.7, np.pi / 2)
        h = build_hamiltonian(hand, RabiSample(1.3, 0.7))
        np.testing.assert_array_equal(g, h)


def test_general_hamiltonian_zero_phase():
    g = build_general_hamiltonian(L, 1.0, 1.0, 1.0, 0.0)
    assert g[0, 2] == -1.0


def test_general_hamiltonian_right_pi_phase():
    g = build_general_hamiltonian(R, 2.0, 3.0, 1.0, np.pi)
    assert abs(g[0, 2] - (-1.0)) < 1e-15
    assert g[0, 1] == 2.0 and g[1, 2] == 3.0


def test_rabi_sample_rejects_negative_omega():
    with pytest.raises(ValueError):
        RabiSample(omega=-1.0, omega_q=0.0)


def test_build_hamiltonian_requires_quadrature_phase():
    with pytest.raises(ValueError):
        build_hamiltonian(L, RabiSample(1.0, 1.0, gamma=0.3))


def test_quantum_state_normalization_guard():
    QuantumState(np.array([0, 1, 0], dtype=complex))
    with pytest.raises(ValueError):
        QuantumState(np.array([0, 1.1, 0], dtype=complex))


def test_zero_hamiltonian_is_identity_evolution():
    traj = propagate(lambda t: np.zeros((3, 3), complex),
                     QuantumState.basis(2), make_grid(1.0, 100))
    np.testing.assert_allclose(traj.final_state.amplitudes,
                               basis_state(2), atol=1e-14)


def test_sps_discrimination_left_and_right():
    grid = make_grid(1.0, 4000)
    schedule = sps_schedule(1.0)
    for hand, level in ((L, 3), (R, 1)):
        traj = propagate(schedule_hamiltonian(schedule, hand),
                         QuantumState.basis(2), grid)
        pops = traj.final_populations
        assert pops[level - 1] > 1.0 - 1e-4
        assert traj.norm_deviation() < 1e-10


def test_norm_preserved_everywhere():
    schedule = sps_schedule(1.0)
    traj = propagate(schedule_hamiltonian(schedule, L),
                     QuantumState.basis(2), make_grid(1.0, 2000))
    sums = traj.populations.sum(axis=1)
    assert np.max(np.abs(sums - 1.0)) < 1e-10


def test_populations_match_amplitudes():
    traj = propagate(schedule_hamiltonian(sps_schedule(1.0), R),
                     QuantumState.basis(2), make_grid(1.0, 500))
    np.testing.assert_allclose(traj.populations, np.abs(traj.states) ** 2)


def test_scalar_and_vectorized_callables_agree():
    schedule = sps_schedule(1.0)
    vec = schedule_hamiltonian(schedule, L)

    def scalar(t):
        return vec(float(t))

    grid = make_grid(1.0, 300)
    a = propagate(vec, QuantumState.basis(2), grid)
    b = propagate(scalar, QuantumState.basis(2), grid)
    np.testing.assert_allclose(a.states, b.states, atol=1e-14)


def test_second_order_convergence_on_smooth_schedule():
    from chiralpulse import ansatz_schedule
    schedule = ansatz_schedule(0.9, 1.0)
    ham = schedule_hamiltonian(schedule, L)
    ref = propagate(ham, QuantumState.basis(2), make_grid(1.0, 32000)).final_state
    errs = []
    for steps in (500, 1000):
        fin = propagate(ham, QuantumState.basis(2), make_grid(1.0, steps)).final_state
        errs.append(np.linalg.norm(fin.amplitudes - ref.amplitudes))
    ratio = errs[0] / errs[1]
    assert 3.0 < ratio < 6.0, f"halving the step gave error ratio {ratio}"


def test_non_finite_hamiltonian_raises():
    def bad(t):
        h = np.zeros((3, 3), complex)
        h[0, 1] = h[1, 0] = np.inf if t > 0.5 else 1.0
        return h

    with pytest.raises(NonFiniteHamiltonian):
        propagate(bad, QuantumState.basis(2), make_grid(1.0, 50))


def test_grid_too_coarse_raises_on_crude_grid():
    schedule = sps_schedule(1.0)
    with pytest.raises(GridTooCoarse):
        propagate(schedule_hamiltonian(schedule, L), QuantumState.basis(2),
                  make_grid(1.0, 40), check=True)


def test_default_grid_passes_convergence_check():
    schedule = sps_schedule(1.0)
    traj = propagate(schedule_hamiltonian(schedule, L), QuantumState.basis(2),
                     make_grid(1.0, 4000), check=True)
    assert traj.final_populations[2] > 0.999


def test_fidelity_examples():
    v = np.array([0.6, 0.8j, 0.0])
    assert fidelity(v, v) == pytest.approx(1.0)
    assert fidelity(basis_state(1), basis_state(3)) == 0.0
    half = (basis_state(2) + basis_state(3)) / np.sqrt(2)
    assert fidelity(basis_state(2), half) == pytest.approx(0.5, abs=1e-15)


def test_make_grid_validation():
    with pytest.raises(ValueError):
        make_grid(0.0, 100)
    with pytest.raises(ValueError):
        make_grid(1.0, 0)
    g = make_grid(2.0, 10)
    assert g[0] == 0.0 and g[-1] == 2.0 and len(g) == 11
