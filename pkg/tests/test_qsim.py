import numpy as np
import pytest

from heartqcnn.errors import InvalidGate, InvalidInput, Unsupported
from heartqcnn.qsim import (
    Circuit,
    Gate,
    StateVector,
    apply_gate,
    dense_oracle_unitary,
    expectation_z,
    gate_unitary,
    run_circuit,
    zero_state,
    _apply_kind,
)

from helpers import random_circuit


def test_zero_state_basics():
    s = zero_state(3)
    assert s.amplitudes.shape == (8,)
    assert s.amplitudes[0] == 1.0
    assert np.all(s.amplitudes[1:] == 0.0)
    assert s.norm == pytest.approx(1.0, abs=0)


def test_zero_state_bounds():
    with pytest.raises(InvalidInput):
        zero_state(0)
    with pytest.raises(InvalidInput):
        zero_state(13)


def test_statevector_is_read_only():
    s = zero_state(1)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0.0


def test_gate_validation():
    with pytest.raises(InvalidGate):
        Gate("Y", (0,))
    with pytest.raises(InvalidGate):
        Gate("H", (0, 1))
    with pytest.raises(InvalidGate):
        Gate("CX", (1, 1))
    with pytest.raises(InvalidGate):
        Gate("CX", (0,))
    with pytest.raises(InvalidGate):
        Gate("RY", (0,))  # needs an angle or a slot
    with pytest.raises(InvalidGate):
        Gate("RY", (0,), angle=0.1, param=0)
    with pytest.raises(InvalidGate):
        Gate("H", (0,), angle=0.3)
    with pytest.raises(InvalidGate):
        Gate("X", (-1,))


def test_apply_gate_target_out_of_range():
    with pytest.raises(InvalidGate):
        apply_gate(zero_state(1), Gate("X", (1,)))


def test_little_endian_convention():
    # X on qubit 0 populates basis index 1; X on qubit 1 populates index 2
    s = apply_gate(zero_state(2), Gate("X", (0,)))
    assert s.amplitudes[1] == 1.0
    s = apply_gate(zero_state(2), Gate("X", (1,)))
    assert s.amplitudes[2] == 1.0


def test_hadamard_on_zero():
    s = apply_gate(zero_state(1), Gate("H", (0,)))
    np.testing.assert_allclose(
        s.amplitudes, np.array([1.0, 1.0]) / np.sqrt(2.0), atol=1e-15)


def test_rotation_conventions():
    theta = 0.7
    s = apply_gate(zero_state(1), Gate("RY", (0,), angle=theta))
    np.testing.assert_allclose(
        s.amplitudes, [np.cos(theta / 2), np.sin(theta / 2)], atol=1e-15)

    s = apply_gate(zero_state(1), Gate("RX", (0,), angle=theta))
    np.testing.assert_allclose(
        s.amplitudes, [np.cos(theta / 2), -1j * np.sin(theta / 2)], atol=1e-15)

    plus = apply_gate(zero_state(1), Gate("H", (0,)))
    s = apply_gate(plus, Gate("RZ", (0,), angle=theta))
    np.testing.assert_allclose(
        s.amplitudes,
        np.array([np.exp(-0.5j * theta), np.exp(0.5j * theta)]) / np.sqrt(2.0),
        atol=1e-15)

    s = apply_gate(plus, Gate("P", (0,), angle=theta))
    np.testing.assert_allclose(
        s.amplitudes,
        np.array([1.0, np.exp(1j * theta)]) / np.sqrt(2.0),
        atol=1e-15)


def test_bell_state():
    c = Circuit(2, [Gate("H", (0,)), Gate("CX", (0, 1))])
    s = run_circuit(c)
    np.testing.assert_allclose(
        s.amplitudes, np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0), atol=1e-15)


def test_cx_control_target_roles():
    # |q1 q0> = |0 1>: control qubit 0 set -> CX(0,1) flips qubit 1
    s = apply_gate(zero_state(2), Gate("X", (0,)))
    s = apply_gate(s, Gate("CX", (0, 1)))
    assert abs(s.amplitudes[3]) == pytest.approx(1.0, abs=0)
    # control clear -> no action
    s = apply_gate(zero_state(2), Gate("CX", (0, 1)))
    assert s.amplitudes[0] == 1.0


def test_cz_and_crz_phases():
    c = Circuit(2, [Gate("H", (0,)), Gate("H", (1,)), Gate("CZ", (0, 1))])
    s = run_circuit(c)
    np.testing.assert_allclose(
        s.amplitudes, np.array([1, 1, 1, -1]) / 2.0, atol=1e-15)

    lam = 1.1
    c = Circuit(2, [Gate("H", (0,)), Gate("H", (1,)), Gate("CRZ", (0, 1), angle=lam)])
    s = run_circuit(c)
    expect = np.array([1.0, np.exp(-0.5j * lam), 1.0, np.exp(0.5j * lam)]) / 2.0
    np.testing.assert_allclose(s.amplitudes, expect, atol=1e-15)


def test_expectation_z_values():
    assert expectation_z(zero_state(1), 0) == pytest.approx(1.0, abs=0)
    s = apply_gate(zero_state(1), Gate("X", (0,)))
    assert expectation_z(s, 0) == pytest.approx(-1.0, abs=0)
    for theta in np.linspace(-np.pi, np.pi, 9):
        s = apply_gate(zero_state(1), Gate("RY", (0,), angle=float(theta)))
        assert expectation_z(s, 0) == pytest.approx(np.cos(theta), abs=1e-12)
    with pytest.raises(InvalidInput):
        expectation_z(zero_state(2), 2)


def test_expectation_z_targets_correct_qubit():
    s = apply_gate(zero_state(3), Gate("X", (1,)))
    assert expectation_z(s, 0) == pytest.approx(1.0, abs=0)
    assert expectation_z(s, 1) == pytest.approx(-1.0, abs=0)
    assert expectation_z(s, 2) == pytest.approx(1.0, abs=0)


def test_param_slot_binding():
    c = Circuit(1, [Gate("RY", (0,), param=0)])
    s = run_circuit(c, [0.9])
    np.testing.assert_allclose(
        s.amplitudes, [np.cos(0.45), np.sin(0.45)], atol=1e-15)
    with pytest.raises(InvalidInput):
        run_circuit(c, [0.1, 0.2])
    with pytest.raises(InvalidInput):
        run_circuit(c)


def test_param_slots_must_be_contiguous():
    c = Circuit(1, [Gate("RY", (0,), param=0), Gate("RZ", (0,), param=2)])
    with pytest.raises(InvalidInput):
        run_circuit(c, [0.1, 0.2, 0.3])


def test_norm_preserved_gate_by_gate():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        circuit = random_circuit(rng, n)
        state = zero_state(n)
        for gate in circuit.gates:
            state = apply_gate(state, gate)
            assert abs(state.norm - 1.0) < 1e-10


def test_random_circuits_match_dense_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        circuit = random_circuit(rng, n)
        fast = run_circuit(circuit).amplitudes
        u = dense_oracle_unitary(circuit)
        ref = u[:, 0]
        assert np.max(np.abs(fast - ref)) < 1e-12


def test_dense_oracle_is_unitary():
    rng = np.random.default_rng(13)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        u = dense_oracle_unitary(random_circuit(rng, n))
        np.testing.assert_allclose(
            u.conj().T @ u, np.eye(2 ** n), atol=1e-12)


def test_dense_oracle_register_limit():
    c = Circuit(5, [Gate("H", (0,))])
    with pytest.raises(Unsupported):
        dense_oracle_unitary(c)
    with pytest.raises(Unsupported):
        gate_unitary(Gate("H", (0,)), 5)


def test_batched_kernel_matches_single():
    # the trainer runs gates over a stacked batch; rows must equal the
    # one-at-a-time result bit for bit
    rng = np.random.default_rng(3)
    n = 3
    circuit = random_circuit(rng, n)
    raw = rng.normal(size=(4, 2 ** n)) + 1j * rng.normal(size=(4, 2 ** n))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)

    batch = raw.copy()
    for g in circuit.gates:
        _apply_kind(batch, n, g.kind, g.targets, g.angle)

    for i in range(4):
        row = raw[i].copy()
        for g in circuit.gates:
            _apply_kind(row, n, g.kind, g.targets, g.angle)
        assert np.array_equal(batch[i], row)


def test_statevector_shape_validation():
    with pytest.raises(InvalidInput):
        StateVector(2, np.zeros(3))
