"""Dense statevector simulator for small gate circuits.

Amplitudes are stored as a complex128 vector of length 2**n in little-endian
order: qubit 0 is the least-significant bit of the basis index.  Gates are
applied by reshaping the vector to an n-axis tensor of shape [2]*n and
slicing out the target axis, which keeps every gate O(2**n) without building
any full unitary.  A dense Kronecker-product builder is provided separately
(for <= 4 qubits) so the fast path can be checked against textbook matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGate, InvalidInput, Unsupported

MAX_QUBITS = 12

#: gates that take no angle
FIXED_GATES = frozenset({"H", "X", "CX", "CZ"})
#: gates that take exactly one angle (bound or a parameter-slot reference)
PARAM_GATES = frozenset({"RX", "RY", "RZ", "P", "CRZ"})
TWO_QUBIT_GATES = frozenset({"CX", "CZ", "CRZ"})

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """One circuit operation.

    ``targets`` is ``(qubit,)`` for single-qubit gates and
    ``(control, target)`` for two-qubit gates.  Parameterized kinds carry
    either a bound ``angle`` or a ``param`` slot index (resolved against the
    parameter vector when the circuit runs), never both.
    """

    kind: str
    targets: tuple
    angle: float | None = None
    param: int | None = None

    def __post_init__(self):
        if self.kind not in FIXED_GATES and self.kind not in PARAM_GATES:
            raise InvalidGate(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "targets", targets)
        arity = 2 if self.kind in TWO_QUBIT_GATES else 1
        if len(targets) != arity:
            raise InvalidGate(
                f"{self.kind} expects {arity} target(s), got {targets!r}")
        if len(set(targets)) != len(targets):
            raise InvalidGate(f"duplicate target qubits in {targets!r}")
        if any(q < 0 for q in targets):
            raise InvalidGate(f"negative qubit index in {targets!r}")
        if self.kind in PARAM_GATES:
            if (self.angle is None) == (self.param is None):
                raise InvalidGate(
                    f"{self.kind} needs exactly one of angle= or param=")
            if self.param is not None and self.param < 0:
                raise InvalidGate("parameter slot must be >= 0")
        elif self.angle is not None or self.param is not None:
            raise InvalidGate(f"{self.kind} takes no angle")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list acting on ``n_qubits`` qubits."""

    n_qubits: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidInput(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n_qubits:
                raise InvalidGate(
                    f"gate {g.kind} on {g.targets} exceeds register size "
                    f"{self.n_qubits}")

    @property
    def n_params(self):
        """Number of parameter slots; slots must be contiguous from 0."""
        slots = sorted({g.param for g in self.gates if g.param is not None})
        if slots and slots != list(range(len(slots))):
            raise InvalidInput(f"parameter slots not contiguous: {slots}")
        return len(slots)

    def extended(self, gates):
        return Circuit(self.n_qubits, self.gates + tuple(gates))


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2 ** self.n_qubits,):
            raise InvalidInput(
                f"expected {2 ** self.n_qubits} amplitudes, got {amps.shape}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


def zero_state(n_qubits):
    """|0...0> on ``n_qubits`` qubits."""
    if not 1 <= int(n_qubits) <= MAX_QUBITS:
        raise InvalidInput(
            f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(2 ** int(n_qubits), dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n_qubits), amps)


def _matrix_1q(kind, angle):
    """2x2 matrix of a single-qubit gate, conventions pinned here."""
    if kind == "H":
        return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) * _INV_SQRT2
    if kind == "X":
        return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    if kind == "RX":
        c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.array(
            [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]],
            dtype=np.complex128)
    if kind == "P":
        return np.array(
            [[1.0, 0.0], [0.0, np.exp(1j * angle)]], dtype=np.complex128)
    raise InvalidGate(f"not a single-qubit kind: {kind}")


def _axis_index(n_qubits, batch_ndim, qubit):
    # after reshape to batch + [2]*n the last axis is qubit 0 (little-endian)
    return batch_ndim + (n_qubits - 1 - qubit)


def _slice_for(view_ndim, assignments):
    idx = [slice(None)] * view_ndim
    for axis, bit in assignments:
        idx[axis] = bit
    return tuple(idx)


def _broadcast_batch(values, target_ndim):
    """Right-pad a batch-shaped array with singleton axes for broadcasting."""
    arr = np.asarray(values)
    return arr.reshape(arr.shape + (1,) * (target_ndim - arr.ndim))


def _apply_kind(amps, n_qubits, kind, targets, angle):
    """Apply one gate in place on ``amps`` of shape batch + (2**n,).

    ``angle`` may be a scalar, or (for the diagonal kinds P/RZ/CRZ only) an
    array matching the batch shape, which is how the image-to-phase encoding
    runs a whole dataset at once.
    """
    batch_ndim = amps.ndim - 1
    view = amps.reshape(amps.shape[:-1] + (2,) * n_qubits)
    ax = [_axis_index(n_qubits, batch_ndim, q) for q in targets]

    if kind == "P":
        phase = np.exp(1j * np.asarray(angle, dtype=np.float64))
        sub = _slice_for(view.ndim, [(ax[0], 1)])
        view[sub] *= _broadcast_batch(phase, view[sub].ndim)
        return
    if kind == "RZ":
        half = 0.5 * np.asarray(angle, dtype=np.float64)
        lo, hi = np.exp(-1j * half), np.exp(1j * half)
        s0 = _slice_for(view.ndim, [(ax[0], 0)])
        s1 = _slice_for(view.ndim, [(ax[0], 1)])
        view[s0] *= _broadcast_batch(lo, view[s0].ndim)
        view[s1] *= _broadcast_batch(hi, view[s1].ndim)
        return
    if kind == "CRZ":
        half = 0.5 * np.asarray(angle, dtype=np.float64)
        lo, hi = np.exp(-1j * half), np.exp(1j * half)
        s0 = _slice_for(view.ndim, [(ax[0], 1), (ax[1], 0)])
        s1 = _slice_for(view.ndim, [(ax[0], 1), (ax[1], 1)])
        view[s0] *= _broadcast_batch(lo, view[s0].ndim)
        view[s1] *= _broadcast_batch(hi, view[s1].ndim)
        return
    if kind == "CX":
        s0 = _slice_for(view.ndim, [(ax[0], 1), (ax[1], 0)])
        s1 = _slice_for(view.ndim, [(ax[0], 1), (ax[1], 1)])
        tmp = view[s0].copy()
        view[s0] = view[s1]
        view[s1] = tmp
        return
    if kind == "CZ":
        s11 = _slice_for(view.ndim, [(ax[0], 1), (ax[1], 1)])
        view[s11] *= -1.0
        return

    # generic single-qubit kinds go through their 2x2 matrix
    m = _matrix_1q(kind, angle)
    s0 = _slice_for(view.ndim, [(ax[0], 0)])
    s1 = _slice_for(view.ndim, [(ax[0], 1)])
    a0 = view[s0].copy()
    a1 = view[s1].copy()
    view[s0] = m[0, 0] * a0 + m[0, 1] * a1
    view[s1] = m[1, 0] * a0 + m[1, 1] * a1


def _resolve_angle(gate, params):
    if gate.kind in FIXED_GATES:
        return None
    if gate.param is not None:
        if params is None or gate.param >= len(params):
            raise InvalidInput(
                f"gate references parameter slot {gate.param} but only "
                f"{0 if params is None else len(params)} value(s) supplied")
        return float(params[gate.param])
    return float(gate.angle)


def _check_targets(n_qubits, gate):
    if max(gate.targets) >= n_qubits:
        raise InvalidGate(
            f"gate {gate.kind} on {gate.targets} exceeds register size {n_qubits}")


def apply_gate(state, gate, params=None):
    """Return a new StateVector with ``gate`` applied."""
    _check_targets(state.n_qubits, gate)
    amps = state.amplitudes.copy()
    _apply_kind(amps, state.n_qubits, gate.kind, gate.targets,
                _resolve_angle(gate, params))
    return StateVector(state.n_qubits, amps)


def run_circuit(circuit, params=None):
    """Run ``circuit`` from |0...0> and return the final StateVector."""
    n_params = circuit.n_params
    if params is None:
        params = np.zeros(0)
    params = np.asarray(params, dtype=np.float64)
    if params.ndim != 1 or params.size != n_params:
        raise InvalidInput(
            f"circuit has {n_params} parameter slot(s), got {params.size} value(s)")
    amps = np.zeros(2 ** circuit.n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    for gate in circuit.gates:
        _apply_kind(amps, circuit.n_qubits, gate.kind, gate.targets,
                    _resolve_angle(gate, params))
    return StateVector(circuit.n_qubits, amps)


def expectation_z(state, qubit):
    """<Z> on one qubit: P(bit=0) - P(bit=1)."""
    if not 0 <= int(qubit) < state.n_qubits:
        raise InvalidInput(
            f"qubit {qubit} out of range for {state.n_qubits}-qubit state")
    qubit = int(qubit)
    probs = state.probabilities().reshape((2,) * state.n_qubits)
    axis = state.n_qubits - 1 - qubit
    marg = probs.sum(axis=tuple(a for a in range(state.n_qubits) if a != axis))
    return float(marg[0] - marg[1])


# ---------------------------------------------------------------------------
# dense reference path (small registers only)
# ---------------------------------------------------------------------------

def _matrix_2q(kind, angle):
    """4x4 matrix on the (control, target) pair, index = control + 2*target."""
    m = np.zeros((4, 4), dtype=np.complex128)
    for tin in range(4):
        c, t = tin & 1, (tin >> 1) & 1
        if kind == "CX":
            tout = c + 2 * (t ^ c)
            m[tout, tin] = 1.0
        elif kind == "CZ":
            m[tin, tin] = -1.0 if (c and t) else 1.0
        elif kind == "CRZ":
            if c:
                m[tin, tin] = np.exp(1j * angle * (0.5 if t else -0.5))
            else:
                m[tin, tin] = 1.0
        else:
            raise InvalidGate(f"not a two-qubit kind: {kind}")
    return m


def gate_unitary(gate, n_qubits, params=None):
    """Full 2**n x 2**n matrix of one gate, built by explicit embedding."""
    if n_qubits > 4:
        raise Unsupported("dense matrices are only built for <= 4 qubits")
    _check_targets(n_qubits, gate)
    angle = _resolve_angle(gate, params)
    dim = 2 ** n_qubits
    if gate.kind in TWO_QUBIT_GATES:
        m4 = _matrix_2q(gate.kind, angle)
        qc, qt = gate.targets
        out = np.zeros((dim, dim), dtype=np.complex128)
        mask = ~((1 << qc) | (1 << qt))
        for col in range(dim):
            sub_in = ((col >> qc) & 1) + 2 * ((col >> qt) & 1)
            rest = col & mask
            for sub_out in range(4):
                row = rest | ((sub_out & 1) << qc) | (((sub_out >> 1) & 1) << qt)
                out[row, col] = m4[sub_out, sub_in]
        return out
    q = gate.targets[0]
    m = _matrix_1q(gate.kind, angle)
    eye_hi = np.eye(2 ** (n_qubits - 1 - q), dtype=np.complex128)
    eye_lo = np.eye(2 ** q, dtype=np.complex128)
    return np.kron(eye_hi, np.kron(m, eye_lo))


def dense_oracle_unitary(circuit, params=None):
    """Multiply out the circuit's full unitary (reference implementation)."""
    if circuit.n_qubits > 4:
        raise Unsupported("dense oracle is limited to 4 qubits")
    n_params = circuit.n_params
    if params is None:
        params = np.zeros(0)
    params = np.asarray(params, dtype=np.float64)
    if params.size != n_params:
        raise InvalidInput(
            f"circuit has {n_params} parameter slot(s), got {params.size} value(s)")
    u = np.eye(2 ** circuit.n_qubits, dtype=np.complex128)
    for gate in circuit.gates:
        u = gate_unitary(gate, circuit.n_qubits, params) @ u
    return u
