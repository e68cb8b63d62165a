"""Quantum convolutional network over 8 qubits.

The circuit starts from a phase encoding of the 8 compressed features
(H then P(2*f) per qubit), then alternates convolution and pooling stages
until a single qubit is left; its Pauli-Z expectation is the classifier
output.  Convolution pairs qubits on a ring; each pooling block folds one
qubit of a pair into the other, after which the discarded wire is never
touched again.  All parameterized gates are emitted with parameter-slot
references, so one circuit serves every evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGate, InvalidInput, Unsupported
from .labels import MURMUR, S3
from .qsim import Circuit, Gate, _apply_kind, _resolve_angle

N_QUBITS = 8
N_PARAMS = 60
READOUT_QUBIT = 7

PARAMS_PER_BLOCK = 3

MODEL_VERSION = 1
ARCHITECTURE_NAME = "qcnn-v1"
FEATURE_METHODS = ("wavelet", "mel", "raw")


@dataclass(frozen=True)
class QcnnArchitecture:
    """Per-stage conv pairs and pool pairs; pool pairs are (discard, keep)."""

    n_qubits: int
    conv_pairs: tuple
    pool_pairs: tuple
    readout_qubit: int


def default_architecture():
    return QcnnArchitecture(
        n_qubits=N_QUBITS,
        conv_pairs=(
            ((0, 1), (2, 3), (4, 5), (6, 7), (1, 2), (3, 4), (5, 6), (7, 0)),
            ((1, 3), (5, 7), (3, 5), (7, 1)),
            ((3, 7),),
        ),
        pool_pairs=(
            ((0, 1), (2, 3), (4, 5), (6, 7)),
            ((1, 3), (5, 7)),
            ((3, 7),),
        ),
        readout_qubit=READOUT_QUBIT,
    )


def _conv_angles(theta):
    if len(theta) != PARAMS_PER_BLOCK:
        raise InvalidInput(f"blocks take {PARAMS_PER_BLOCK} angles, got {len(theta)}")
    return [{"angle": float(t)} for t in theta]


def _conv_gates(a, b, refs):
    return [
        Gate("RZ", (b,), angle=-np.pi / 2),
        Gate("CX", (b, a)),
        Gate("RZ", (a,), **refs[0]),
        Gate("RY", (b,), **refs[1]),
        Gate("CX", (a, b)),
        Gate("RY", (b,), **refs[2]),
        Gate("CX", (b, a)),
        Gate("RZ", (a,), angle=np.pi / 2),
    ]


def _pool_gates(keep, discard, refs):
    # the conv sequence cut after its second CX, with the discarded qubit in
    # the a-role: the block ends with CX(discard -> keep) followed by RY on
    # keep, so the fold lands in the surviving wire.  (With the roles the
    # other way around, Z on the kept qubit pulls back through every block
    # to the product of all eight equatorial Z's and the readout is
    # identically zero.)  The discarded wire receives nothing afterwards.
    return [
        Gate("RZ", (keep,), angle=-np.pi / 2),
        Gate("CX", (keep, discard)),
        Gate("RZ", (discard,), **refs[0]),
        Gate("RY", (keep,), **refs[1]),
        Gate("CX", (discard, keep)),
        Gate("RY", (keep,), **refs[2]),
    ]


def conv_block(theta, qubit_a, qubit_b):
    """Gate list of one 3-parameter convolution block on (qubit_a, qubit_b)."""
    if qubit_a == qubit_b:
        raise InvalidGate("conv_block needs two distinct qubits")
    return _conv_gates(qubit_a, qubit_b, _conv_angles(theta))


def pool_block(theta, keep, discard):
    """Gate list folding ``discard`` into ``keep`` with 3 angles."""
    if keep == discard:
        raise InvalidGate("pool_block needs two distinct qubits")
    return _pool_gates(keep, discard, _conv_angles(theta))


def _check_architecture(arch):
    if arch.n_qubits != N_QUBITS:
        raise Unsupported(f"architecture must use {N_QUBITS} qubits")
    if len(arch.conv_pairs) != len(arch.pool_pairs):
        raise Unsupported("conv and pool stage counts differ")
    alive = set(range(arch.n_qubits))
    for conv_stage, pool_stage in zip(arch.conv_pairs, arch.pool_pairs):
        for a, b in conv_stage:
            if a == b or a not in alive or b not in alive:
                raise Unsupported(f"conv pair ({a},{b}) not on surviving qubits")
        touched = [q for pair in pool_stage for q in pair]
        if sorted(touched) != sorted(alive):
            raise Unsupported("pool pairs must partition the surviving qubits")
        alive = {keep for _, keep in pool_stage}
    if len(alive) != 1 or arch.readout_qubit not in alive:
        raise Unsupported("architecture must pool down to the readout qubit")


def build_qcnn(arch=None):
    """Slot-parameterized QCNN circuit (no feature map)."""
    if arch is None:
        arch = default_architecture()
    _check_architecture(arch)
    gates = []
    slot = 0

    def refs():
        nonlocal slot
        out = [{"param": slot + i} for i in range(PARAMS_PER_BLOCK)]
        slot += PARAMS_PER_BLOCK
        return out

    for conv_stage, pool_stage in zip(arch.conv_pairs, arch.pool_pairs):
        for a, b in conv_stage:
            gates.extend(_conv_gates(a, b, refs()))
        for discard, keep in pool_stage:
            gates.extend(_pool_gates(keep, discard, refs()))
    return Circuit(arch.n_qubits, gates)


def param_count(arch=None):
    return build_qcnn(arch).n_params


def feature_map(features):
    """Phase-encode 8 features in [0,1]: H then P(2*f) on each qubit."""
    feats = _check_features(np.asarray(features, dtype=np.float64))
    gates = []
    for q in range(N_QUBITS):
        gates.append(Gate("H", (q,)))
        gates.append(Gate("P", (q,), angle=2.0 * feats[q]))
    return Circuit(N_QUBITS, gates)


def full_circuit(features, arch=None):
    """feature_map followed by the QCNN ansatz; 60 parameter slots."""
    fm = feature_map(features)
    return fm.extended(build_qcnn(arch).gates)


def _check_features(feats):
    if feats.ndim != 1 or feats.shape[0] != N_QUBITS:
        raise InvalidInput(f"expected {N_QUBITS} features, got shape {feats.shape}")
    if not np.all(np.isfinite(feats)):
        raise InvalidInput("features must be finite")
    if feats.min() < 0.0 or feats.max() > 1.0:
        raise InvalidInput("features must lie in [0, 1]")
    return feats


def _check_params(params):
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (N_PARAMS,):
        raise InvalidInput(f"expected {N_PARAMS} parameters, got shape {params.shape}")
    if not np.all(np.isfinite(params)):
        raise InvalidInput("parameters must be finite")
    return params


_ANSATZ_GATES = None


def _ansatz_gates():
    global _ANSATZ_GATES
    if _ANSATZ_GATES is None:
        _ANSATZ_GATES = build_qcnn().gates
    return _ANSATZ_GATES


def forward_batch(features, params):
    """Readout expectations for a whole feature matrix, shape (n, 8) -> (n,).

    Runs every row through the same gate sequence at once; this is the code
    path used by loss, training, evaluation, and single-row forward, so all
    of them agree bit for bit.
    """
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[1] != N_QUBITS:
        raise InvalidInput(f"expected (n, {N_QUBITS}) features, got {feats.shape}")
    if feats.shape[0] == 0:
        raise InvalidInput("empty feature batch")
    for row in feats:
        _check_features(row)
    params = _check_params(params)

    amps = np.zeros((feats.shape[0], 2 ** N_QUBITS), dtype=np.complex128)
    amps[:, 0] = 1.0
    for q in range(N_QUBITS):
        _apply_kind(amps, N_QUBITS, "H", (q,), None)
        _apply_kind(amps, N_QUBITS, "P", (q,), 2.0 * feats[:, q])
    for gate in _ansatz_gates():
        _apply_kind(amps, N_QUBITS, gate.kind, gate.targets,
                    _resolve_angle(gate, params))

    probs = np.abs(amps) ** 2
    below = 2 ** READOUT_QUBIT
    above = 2 ** (N_QUBITS - 1 - READOUT_QUBIT)
    grouped = probs.reshape(feats.shape[0], above, 2, below)
    return grouped[:, :, 0, :].sum(axis=(1, 2)) - grouped[:, :, 1, :].sum(axis=(1, 2))


def forward(features, params):
    """Z-expectation on the readout qubit after encoding + ansatz."""
    feats = np.asarray(features, dtype=np.float64)
    return float(forward_batch(feats.reshape(1, -1), params)[0])


def predict(features, params):
    """S3 when the readout is non-negative, MURMUR otherwise."""
    return S3 if forward(features, params) >= 0.0 else MURMUR


# ---------------------------------------------------------------------------
# model document
# ---------------------------------------------------------------------------

def model_document(params, feature_method):
    if feature_method not in FEATURE_METHODS:
        raise InvalidInput(f"unknown feature method {feature_method!r}")
    params = _check_params(params)
    return {
        "version": MODEL_VERSION,
        "n_qubits": N_QUBITS,
        "architecture": ARCHITECTURE_NAME,
        "feature_method": feature_method,
        "params": [float(p) for p in params],
        "label_map": {S3: 1, MURMUR: -1},
    }


def save_model(path, params, feature_method):
    doc = model_document(params, feature_method)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    """Read and validate a model document; returns the dict form."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"model file is not valid JSON: {exc}") from exc
    required = {"version", "n_qubits", "architecture", "feature_method",
                "params", "label_map"}
    missing = required - set(doc)
    if missing:
        raise InvalidInput(f"model file missing fields: {sorted(missing)}")
    if doc["version"] != MODEL_VERSION:
        raise InvalidInput(f"unsupported model version {doc['version']!r}")
    if doc["n_qubits"] != N_QUBITS or doc["architecture"] != ARCHITECTURE_NAME:
        raise InvalidInput("model was built for a different architecture")
    if doc["feature_method"] not in FEATURE_METHODS:
        raise InvalidInput(f"unknown feature method {doc['feature_method']!r}")
    params = np.asarray(doc["params"], dtype=np.float64)
    if params.shape != (N_PARAMS,) or not np.all(np.isfinite(params)):
        raise InvalidInput(f"model must carry {N_PARAMS} finite parameters")
    if doc["label_map"] != {S3: 1, MURMUR: -1}:
        raise InvalidInput("unexpected label map")
    doc["params"] = params
    return doc
