import numpy as np
import pytest

from detwitness import circuit, criteria, measures, states, witness
from detwitness.circuit import (
    DEFAULT_NETWORK, NetworkSpec, RegisterState, apply_gate, controlled_apply, run_exact, run_shots,
    verdict_from_circuit,
)
from detwitness.states import bell_state, random_density, werner


def basis(n, index):
    a = np.zeros(2**n, dtype=complex)
    a[index] = 1
    return RegisterState(a, tuple(f"q{i}" for i in range(n)))


def test_x_flips():
    out = apply_gate(basis(1, 0), circuit.X, [0])
    np.testing.assert_array_equal(out.amplitudes, [0, 1])


def test_controlled_swap_inactive_control(rng):
    psi = states.random_pure((2, 2, 2), rng).amplitudes
    reg = RegisterState(psi, ("c", "a", "b"))
    swap = np.eye(4)[[0, 2, 1, 3]]
    out = controlled_apply(reg, swap, {0: 1}, [1, 2])
    # control |0> part untouched, |1> part swapped
    np.testing.assert_array_equal(out.amplitudes[:4], psi[:4])
    np.testing.assert_array_equal(out.amplitudes[4:], swap @ psi[4:])
    zero_ctrl = RegisterState(np.r_[psi[:4] / np.linalg.norm(psi[:4]), np.zeros(4)], ("c", "a", "b"))
    np.testing.assert_array_equal(controlled_apply(zero_ctrl, swap, {0: 1}, [1, 2]).amplitudes,
                                  zero_ctrl.amplitudes)


def test_bell_preparation():
    reg = apply_gate(basis(2, 0), circuit.H, [0])
    reg = controlled_apply(reg, circuit.X, {0: 1}, [1])
    np.testing.assert_allclose(reg.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)


def test_gate_targets_match_kron_order(rng):
    psi = states.random_pure((2, 2, 2), rng).amplitudes
    u = states.random_unitary(2, rng)
    reg = RegisterState(psi, ("a", "b", "c"))
    for q in range(3):
        ops = [np.eye(2)] * 3
        ops[q] = u
        full = np.kron(np.kron(ops[0], ops[1]), ops[2])
        np.testing.assert_allclose(apply_gate(reg, u, [q]).amplitudes, full @ psi, atol=1e-14)
    v = states.random_unitary(4, rng)
    # two-qubit gate on (c, a): compare against a permuted kron
    full = np.zeros((8, 8), dtype=complex)
    for col in range(8):
        a, b, c = (col >> 2) & 1, (col >> 1) & 1, col & 1
        for out in range(4):
            c2, a2 = out >> 1, out & 1
            full[(a2 << 2) | (b << 1) | c2, col] += v[out, (c << 1) | a]
    np.testing.assert_allclose(apply_gate(reg, v, [2, 0]).amplitudes, full @ psi, atol=1e-14)


def test_gate_errors(rng):
    reg = basis(3, 0)
    with pytest.raises(ValueError):
        apply_gate(reg, np.array([[1, 1], [0, 1]]), [0])
    with pytest.raises(ValueError):
        apply_gate(reg, np.eye(4), [1, 1])
    with pytest.raises(ValueError):
        controlled_apply(reg, circuit.X, {1: 1}, [1])


def test_norm_preserved_through_random_sequence(rng):
    reg = RegisterState.zero()
    for _ in range(30):
        k = int(rng.integers(1, 3))
        qubits = rng.permutation(circuit.N_QUBITS)
        targets, ctrl = list(qubits[:k]), int(qubits[k])
        reg = controlled_apply(reg, states.random_unitary(2**k, rng), {ctrl: int(rng.integers(2))}, targets)
        assert abs(np.linalg.norm(reg.amplitudes) - 1) <= 1e-10


def test_selector_preparation():
    reg = RegisterState.zero()
    for gate, ctrl, targets in circuit.selector_preparation(DEFAULT_NETWORK.selector_amplitudes):
        reg = controlled_apply(reg, gate, ctrl, targets)
    amps = reg.amplitudes.reshape(2, 4, 256)[0, :, 0]
    np.testing.assert_allclose(amps, np.sqrt(np.array([3, 6, 8, 6]) / 23), atol=1e-15)


def test_network_spec_validation():
    with pytest.raises(ValueError):
        NetworkSpec(selector_amplitudes=(1, 1, 0, 0))
    with pytest.raises(ValueError):
        NetworkSpec(branch_signs=(1, 1, 2, 1))
    assert sum(DEFAULT_NETWORK.weights) == pytest.approx(1)
    for tag in circuit.BRANCHES:
        u = circuit.branch_unitary(tag)
        np.testing.assert_array_equal(u @ u.conj().T, np.eye(256))


def test_branch_unitaries_give_their_moments(rng):
    rho = random_density(4, rng=rng)
    m = witness.pt_moments(rho)
    expect = {"pi2_squared": m.pi2**2, "pi2": m.pi2, "pi3": m.pi3, "pi4": m.pi4}
    for tag, value in expect.items():
        assert witness.copy_expectation(circuit.branch_unitary(tag), rho, 4) == pytest.approx(value, abs=1e-12)


def test_run_exact_examples():
    assert run_exact(states.maximally_mixed()) == pytest.approx(-29 / 736, abs=1e-12)
    assert run_exact(bell_state()) == pytest.approx(-5 / 46, abs=1e-12)
    assert run_exact(werner(1 / 3)) == pytest.approx(-1 / 23, abs=1e-12)
    with pytest.raises(ValueError):
        run_exact(states.maximally_mixed((3, 3)))


def test_run_exact_matches_density_matrix_route(rng):
    for i in range(3):
        rho = random_density(4, 2 + i, rng)
        assert circuit.run_density(rho) == pytest.approx(run_exact(rho), abs=1e-12)


def test_circuit_determinant_identity(rng):
    for i in range(300):
        rho = random_density(4, 1 + i % 4, rng)
        m = witness.pt_moments(rho)
        assert run_exact(rho) == pytest.approx((24 * witness.newton_girard_det(m) - 1) / 23, abs=1e-9)


def test_branch_decomposition(rng):
    for i in range(20):
        rho = random_density(4, 1 + i % 4, rng)
        m = witness.pt_moments(rho)
        parts = circuit.branch_contributions(rho)
        assert parts["pi2_squared"] == pytest.approx(3 * m.pi2**2 / 23, abs=1e-9)
        assert parts["pi2"] == pytest.approx(-6 * m.pi2 / 23, abs=1e-9)
        assert parts["pi3"] == pytest.approx(8 * m.pi3 / 23, abs=1e-9)
        assert parts["pi4"] == pytest.approx(-6 * m.pi4 / 23, abs=1e-9)
        assert sum(parts.values()) == pytest.approx(run_exact(rho), abs=1e-9)


def test_threshold_equivalence(rng):
    for i in range(300):
        rho = random_density(4, 1 + i % 4, rng)
        det = measures.pt_det(rho)
        if abs(det) > 1e-12:
            assert verdict_from_circuit(rho).decision is criteria.det_ppt_test(rho).decision


def test_verdict_examples():
    assert verdict_from_circuit(bell_state()).entangled
    v = verdict_from_circuit(states.maximally_mixed())
    assert not v.entangled and v.sigma_z > circuit.THRESHOLD
    assert not verdict_from_circuit(werner(1 / 3)).entangled


def test_run_shots_single(rng):
    est, err = run_shots(bell_state(), shots=1, rng=rng)
    assert est in (-1.0, 1.0)


def test_run_shots_deterministic():
    a = run_shots(bell_state(), shots=1000, rng=states.make_rng(5))
    b = run_shots(bell_state(), shots=1000, rng=states.make_rng(5))
    np.testing.assert_array_equal(a.outcomes, b.outcomes)


def test_run_shots_bell_million():
    res = run_shots(bell_state(), shots=10**6, rng=states.make_rng(11))
    assert abs(res.estimate + 5 / 46) <= 4 * res.stderr
    assert res.stderr < 2e-3


def test_stderr_scaling():
    exact = run_exact(bell_state())
    errs = {n: run_shots(bell_state(), shots=n, rng=states.make_rng(n), exact=exact).stderr
            for n in (10**2, 10**4, 10**6)}
    for n, e in errs.items():
        assert e * np.sqrt(n) == pytest.approx(errs[10**6] * 1000, rel=0.2)


def test_shot_verdict_reports_margin():
    v = verdict_from_circuit(bell_state(), shots=10**5, rng=states.make_rng(1))
    assert v.entangled and v.margin > 4


def test_shot_transcript_csv(tmp_path):
    res = run_shots(bell_state(), shots=10, rng=states.make_rng(0))
    circuit.write_shot_csv(tmp_path / "t.csv", res.outcomes)
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "shot_index,outcome" and len(lines) == 11
    assert all(line.split(",")[1] in ("1", "-1") for line in lines[1:])
