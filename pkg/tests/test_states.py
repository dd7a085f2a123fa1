from itertools import permutations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noisyent.errors import ArgumentError
from noisyent.qmat import check_density_matrix, herm_eig, kron, partial_trace
from noisyent.states import (HWP, PAULI_PLATES, PAULI_SINGLE_HWP, QWP, NoiseSchedule, NoiseTerm, WavePlate,
                             apply_schedule, bell_projector, bell_state, compose_plates, equal_up_to_phase,
                             key_basis_state, pauli, phi_plus_pairs, private_schedule, private_state,
                             random_density_matrix, smolin_pauli_form, smolin_schedule, smolin_state,
                             waveplate_unitary)


def permute_qubits(rho, perm):
    t = rho.reshape([2] * 8)
    return t.transpose(list(perm) + [p + 4 for p in perm]).reshape(16, 16)


def test_pauli_definitions():
    np.testing.assert_array_equal(pauli("Z"), np.diag([1, -1]))
    np.testing.assert_array_equal(pauli("X") @ pauli("X"), np.eye(2))
    np.testing.assert_allclose(1j * pauli("X") @ pauli("Z"), pauli("Y"))
    # sigma_y = i(|V><H| - |H><V|)
    np.testing.assert_array_equal(pauli("Y"), 1j * (np.array([[0, 0], [1, 0]]) - np.array([[0, 1], [0, 0]])))
    with pytest.raises(ArgumentError):
        pauli("Q")


def test_bell_states():
    np.testing.assert_allclose(bell_state("phi_plus"), [2**-0.5, 0, 0, 2**-0.5])
    assert abs(np.vdot(bell_state("phi_plus"), bell_state("psi_minus"))) == 0
    gram = np.array([[np.vdot(bell_state(a), bell_state(b)) for b in
                      ("phi_plus", "phi_minus", "psi_plus", "psi_minus")] for a in
                     ("phi_plus", "phi_minus", "psi_plus", "psi_minus")])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-15)


def test_x_on_second_qubit_maps_phi_plus_to_psi_plus():
    m = np.zeros((4, 4), dtype=complex)
    # (I x X) by explicit basis permutation |a b> -> |a, 1-b>
    for a, b in product((0, 1), repeat=2):
        m[2 * a + (1 - b), 2 * a + b] = 1
    np.testing.assert_allclose(m @ bell_state("phi_plus"), bell_state("psi_plus"))


def test_key_basis():
    np.testing.assert_allclose(key_basis_state(0), np.array([1, 1j]) / np.sqrt(2))
    assert abs(np.vdot(key_basis_state(0), key_basis_state(1))) < 1e-15
    np.testing.assert_allclose(pauli("Y") @ key_basis_state(0), key_basis_state(0))
    np.testing.assert_allclose(pauli("Y") @ key_basis_state(1), -key_basis_state(1))
    with pytest.raises(ArgumentError):
        key_basis_state(2)


def test_smolin_definitions_agree():
    rho = smolin_state()
    assert np.max(np.abs(rho - smolin_pauli_form())) <= 1e-12
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.sum(herm_eig(rho)[0] > 1e-9) == 4


def test_smolin_permutation_invariant():
    rho = smolin_state()
    for perm in permutations(range(4)):
        assert np.max(np.abs(permute_qubits(rho, perm) - rho)) <= 1e-12


def test_private_state():
    rho = private_state()
    check_density_matrix(rho)
    w = herm_eig(rho)[0]
    np.testing.assert_allclose(w, [0.0] * 12 + [0.25] * 4, atol=1e-12)
    key = partial_trace(rho, [0, 1])
    np.testing.assert_allclose(key, 0.25 * bell_projector("phi_minus") + 0.75 * bell_projector("psi_plus"),
                               atol=1e-12)
    k = {(i, j): kron(key_basis_state(i), key_basis_state(j)) for i in (0, 1) for j in (0, 1)}
    assert abs(k[0, 0].conj() @ key @ k[0, 0] - 0.5) < 1e-12
    assert abs(k[1, 1].conj() @ key @ k[1, 1] - 0.5) < 1e-12
    assert abs(k[0, 0].conj() @ key @ k[1, 1] - (-0.25)) < 1e-12
    assert abs(k[0, 1].conj() @ key @ k[0, 1]) < 1e-12
    assert abs(k[1, 0].conj() @ key @ k[1, 0]) < 1e-12


def test_waveplate_examples():
    assert equal_up_to_phase(waveplate_unitary(HWP(0)), pauli("Z"))
    assert equal_up_to_phase(waveplate_unitary(HWP(np.pi / 4)), pauli("X"))
    for theta in np.linspace(0, np.pi, 7):
        q = waveplate_unitary(QWP(theta))
        assert np.max(np.abs(q.conj().T @ q - np.eye(2))) < 1e-12
        assert equal_up_to_phase(q @ q, waveplate_unitary(HWP(theta)))


def test_waveplate_angle_normalized():
    assert WavePlate("half", 3 * np.pi / 2).angle == pytest.approx(np.pi / 2)
    with pytest.raises(ArgumentError):
        WavePlate("half", np.inf)


def test_compose_plates():
    theta = 0.3
    assert equal_up_to_phase(compose_plates([QWP(theta), QWP(theta + np.pi / 2)]), np.eye(2))
    # QWP(pi/4)^2 = HWP(pi/4) ~ X, then HWP(0) ~ Z: Z X = iY
    u = compose_plates([QWP(np.pi / 4), QWP(np.pi / 4), HWP(0)])
    np.testing.assert_allclose(u, pauli("Z") @ pauli("X"), atol=1e-12)
    assert equal_up_to_phase(u, pauli("Y"))
    with pytest.raises(ArgumentError):
        compose_plates([])


def _search_three_plate(target):
    grid = [0.0, np.pi / 4, np.pi / 2]
    for kinds in product("QH", repeat=3):
        for angles in product(grid, repeat=3):
            plates = [(QWP if k == "Q" else HWP)(a) for k, a in zip(kinds, angles)]
            if equal_up_to_phase(compose_plates(plates), target):
                return plates
    return None


@pytest.mark.parametrize("label", ["I", "X", "Y", "Z"])
def test_every_pauli_has_three_plate_setting(label):
    found = _search_three_plate(pauli(label))
    assert found is not None
    assert equal_up_to_phase(compose_plates(PAULI_PLATES[label]), pauli(label))
    assert len(PAULI_PLATES[label]) == 3


@pytest.mark.parametrize("label", ["X", "Z"])
def test_single_hwp_settings(label):
    assert equal_up_to_phase(compose_plates(PAULI_SINGLE_HWP[label]), pauli(label))


def test_equal_up_to_phase():
    u = waveplate_unitary(QWP(0.2))
    assert equal_up_to_phase(u, u)
    assert equal_up_to_phase(pauli("X"), 1j * pauli("X"))
    assert not equal_up_to_phase(pauli("X"), pauli("Z"))
    with pytest.raises(ArgumentError):
        equal_up_to_phase(np.eye(2), np.eye(4))


def test_schedules():
    s = smolin_schedule()
    assert s.weights == [0.25] * 4
    for t in s.terms:
        np.testing.assert_array_equal(t.op_b, t.op_bprime)
    p = private_schedule()
    assert len(p) == 4
    for t in p.terms:
        for op in (t.op_b, t.op_bprime):
            np.testing.assert_allclose(op.conj().T @ op, np.eye(2), atol=1e-12)


def test_schedule_validation():
    with pytest.raises(ArgumentError):
        NoiseSchedule((NoiseTerm(0.5, np.eye(2), np.eye(2)),))
    with pytest.raises(ArgumentError):
        NoiseTerm(1.0, 2 * np.eye(2), np.eye(2))
    with pytest.raises(ArgumentError):
        NoiseTerm(-1.0, np.eye(2), np.eye(2))


def test_apply_schedule_constructions():
    src = phi_plus_pairs()
    assert np.max(np.abs(apply_schedule(src, smolin_schedule()) - smolin_state())) <= 1e-12
    assert np.max(np.abs(apply_schedule(src, private_schedule()) - private_state())) <= 1e-12


def test_identity_schedule_is_noop(rng):
    rho = random_density_matrix(4, rng)
    s = NoiseSchedule((NoiseTerm(1.0, np.eye(2), np.eye(2)),))
    np.testing.assert_allclose(apply_schedule(rho, s), rho, atol=1e-15)


def test_uneven_weights():
    s = NoiseSchedule((NoiseTerm(1 / 3, np.eye(2), np.eye(2)), NoiseTerm(2 / 3, pauli("X"), pauli("X"))))
    rho = apply_schedule(phi_plus_pairs(), s)
    expected = (kron(bell_projector("phi_plus"), bell_projector("phi_plus")) / 3
                + 2 * kron(bell_projector("psi_plus"), bell_projector("psi_plus")) / 3)
    np.testing.assert_allclose(rho, expected, atol=1e-12)


def test_misaligned_schedule_is_valid_and_seeded():
    a = apply_schedule(phi_plus_pairs(), smolin_schedule(), 0.05, rng_seed=11)
    b = apply_schedule(phi_plus_pairs(), smolin_schedule(), 0.05, rng_seed=11)
    check_density_matrix(a)
    np.testing.assert_array_equal(a, b)
    assert np.max(np.abs(a - smolin_state())) > 1e-4


def test_apply_schedule_errors():
    with pytest.raises(ArgumentError):
        apply_schedule(np.eye(4) / 4, smolin_schedule())
    with pytest.raises(ArgumentError):
        apply_schedule(smolin_state(), smolin_schedule(), -0.1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_schedule_is_cptp_on_random_inputs(seed):
    rho = random_density_matrix(4, np.random.default_rng(seed))
    for s in (smolin_schedule(), private_schedule()):
        out = apply_schedule(rho, s)
        assert abs(np.trace(out) - 1) < 1e-12
        assert np.linalg.eigvalsh(out)[0] >= -1e-12
