"""Hybrid quantum-classical classification of heart sounds.

The package takes phonocardiogram recordings through a classical front-end
(cycle segmentation, time-frequency imaging, compression to 8 features) and
a simulated 8-qubit convolutional network trained with a derivative-free
trust-region optimizer.

Two entry styles are exposed: the scikit-learn estimators
(:class:`PcgFeatureExtractor`, :class:`QcnnClassifier`) for fit/predict
workflows, and the functional layer (``wav_features``, ``train``,
``forward`` and friends) the estimators are built on.  The ``heartqcnn``
console script drives the same code from the command line.
"""

from .cobyla import CobylaResult, cobyla_minimize
from .compress import (
    binarize_otsu,
    compress_pipeline,
    max_pool,
    read_features,
    reduce_to_8,
    write_features,
)
from .dsp import (
    PcgSegment,
    PcgSignal,
    load_wav,
    resample,
    save_wav,
    segment_by_cycles,
    synthesize_pcg,
)
from .errors import (
    HeartQcnnError,
    InvalidGate,
    InvalidInput,
    OptimizerFailure,
    SegmentationFailed,
    Unsupported,
)
from .estimator import PcgFeatureExtractor, QcnnClassifier
from .labels import LABELS, MURMUR, S3
from .pipeline import segment_features, signal_features, wav_features
from .qcnn import (
    FEATURE_METHODS,
    N_PARAMS,
    N_QUBITS,
    build_qcnn,
    feature_map,
    forward,
    forward_batch,
    full_circuit,
    load_model,
    predict,
    save_model,
)
from .qsim import Circuit, Gate, StateVector, apply_gate, expectation_z, run_circuit, zero_state
from .timefreq import cwt_scalogram, mel_spectrogram, normalize01, raw_grayscale, resize_bilinear
from .train import (
    Dataset,
    HistoryRecord,
    TrainConfig,
    evaluate,
    init_params,
    loss,
    read_history,
    split_dataset,
    train,
    write_history,
)

__version__ = "0.1.0"

__all__ = [
    "CobylaResult",
    "cobyla_minimize",
    "binarize_otsu",
    "compress_pipeline",
    "max_pool",
    "read_features",
    "reduce_to_8",
    "write_features",
    "PcgSegment",
    "PcgSignal",
    "load_wav",
    "resample",
    "save_wav",
    "segment_by_cycles",
    "synthesize_pcg",
    "HeartQcnnError",
    "InvalidGate",
    "InvalidInput",
    "OptimizerFailure",
    "SegmentationFailed",
    "Unsupported",
    "PcgFeatureExtractor",
    "QcnnClassifier",
    "LABELS",
    "MURMUR",
    "S3",
    "segment_features",
    "signal_features",
    "wav_features",
    "FEATURE_METHODS",
    "N_PARAMS",
    "N_QUBITS",
    "build_qcnn",
    "feature_map",
    "forward",
    "forward_batch",
    "full_circuit",
    "load_model",
    "predict",
    "save_model",
    "Circuit",
    "Gate",
    "StateVector",
    "apply_gate",
    "expectation_z",
    "run_circuit",
    "zero_state",
    "cwt_scalogram",
    "mel_spectrogram",
    "normalize01",
    "raw_grayscale",
    "resize_bilinear",
    "Dataset",
    "HistoryRecord",
    "TrainConfig",
    "evaluate",
    "init_params",
    "loss",
    "read_history",
    "split_dataset",
    "train",
    "write_history",
    "__version__",
]
