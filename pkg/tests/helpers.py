"""Shared test utilities: random circuit sampling for simulator checks."""

import numpy as np

from heartqcnn.qsim import Circuit, Gate, FIXED_GATES, PARAM_GATES, TWO_QUBIT_GATES

ALL_KINDS = sorted(FIXED_GATES | PARAM_GATES)


def random_gate(rng, n_qubits):
    while True:
        kind = ALL_KINDS[rng.integers(len(ALL_KINDS))]
        if n_qubits >= 2 or kind not in TWO_QUBIT_GATES:
            break
    arity = 2 if kind in TWO_QUBIT_GATES else 1
    targets = tuple(int(q) for q in rng.choice(n_qubits, size=arity, replace=False))
    if kind in PARAM_GATES:
        return Gate(kind, targets, angle=float(rng.uniform(-2 * np.pi, 2 * np.pi)))
    return Gate(kind, targets)


def random_circuit(rng, n_qubits, max_depth=30):
    depth = int(rng.integers(1, max_depth + 1))
    return Circuit(n_qubits, [random_gate(rng, n_qubits) for _ in range(depth)])
