"""Command-line workflow: synth -> preprocess -> train -> eval / plot.

Exit codes are a stable scripting contract: 0 success, 1 usage or
validation problem, 2 I/O or environment problem.  Every command is
deterministic given its flags; randomness always comes from explicit
--seed values, never the clock.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .compress import read_features, write_features
from .dsp import save_wav, synthesize_pcg
from .errors import HeartQcnnError, InvalidInput
from .labels import LABELS
from .pipeline import wav_features
from .plot import render_history_svg
from .qcnn import FEATURE_METHODS, load_model, save_model
from .train import (
    Dataset,
    TrainConfig,
    evaluate,
    read_history,
    split_dataset,
    train,
    write_history,
)

MANIFEST_HEADER = "path,label"
MANIFEST_NAME = "manifest.csv"


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit with code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

def read_manifest(path):
    """Entries of (wav path, label); relative paths resolve next to the file."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != MANIFEST_HEADER:
        raise InvalidInput(f"{path}: first line must be '{MANIFEST_HEADER}'")
    entries = []
    for ln in lines[1:]:
        if "," not in ln:
            raise InvalidInput(f"{path}: malformed row {ln!r}")
        wav, label = ln.rsplit(",", 1)
        if label not in LABELS:
            raise InvalidInput(f"{path}: unknown label {label!r}")
        wav_path = Path(wav)
        if not wav_path.is_absolute():
            wav_path = path.parent / wav_path
        entries.append((wav_path, label))
    if not entries:
        raise InvalidInput(f"{path}: manifest has no entries")
    return entries


def write_manifest(path, rows):
    lines = [MANIFEST_HEADER] + [f"{name},{label}" for name, label in rows]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_synth(args):
    if args.n_per_class < 1:
        raise InvalidInput(f"--n-per-class must be >= 1, got {args.n_per_class}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = np.random.SeedSequence(args.seed).generate_state(
        2 * args.n_per_class)
    rows = []
    next_seed = iter(seeds)
    for label in LABELS:
        for k in range(args.n_per_class):
            name = f"{label.lower()}_{k:03d}.wav"
            synth = synthesize_pcg(label, args.cycles, int(next(next_seed)))
            save_wav(out_dir / name, synth.signal)
            rows.append((name, label))
    write_manifest(out_dir / MANIFEST_NAME, rows)
    print(f"wrote {len(rows)} recordings and {MANIFEST_NAME} in {out_dir}")
    return 0


def cmd_preprocess(args):
    if args.jobs < 1:
        raise InvalidInput(f"--jobs must be >= 1, got {args.jobs}")
    entries = read_manifest(args.manifest)

    def one(entry):
        wav_path, label = entry
        try:
            return "ok", wav_features(str(wav_path), args.method), label
        except (HeartQcnnError, OSError, ValueError) as exc:
            return "err", f"{wav_path}: {exc}", label

    if args.jobs == 1:
        results = [one(e) for e in entries]
    else:
        # rows stay ordered by (manifest position, segment index) because
        # map() preserves input order regardless of completion order
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, entries))

    rows, labels, skipped = [], [], 0
    for status, payload, label in results:
        if status == "err":
            print(f"warning: skipping {payload}", file=sys.stderr)
            skipped += 1
            continue
        for feature_row in payload:
            rows.append(feature_row)
            labels.append(label)
    if not rows:
        print("error: no features could be extracted from any file",
              file=sys.stderr)
        return 2
    if skipped:
        print(f"warning: skipped {skipped} of {len(entries)} file(s)",
              file=sys.stderr)
    write_features(args.out, np.stack(rows), labels, method=args.method)
    print(f"wrote {len(rows)} feature rows from "
          f"{len(entries) - skipped} file(s) to {args.out}")
    return 0


def cmd_train(args):
    features, labels, method = read_features(args.features)
    if method is None:
        raise InvalidInput(
            f"{args.features} has no '# method=' line; preprocess writes it, "
            "and the model file needs it to guard evaluation")
    if method not in FEATURE_METHODS:
        raise InvalidInput(f"unsupported feature method {method!r}")
    rows = list(zip(features, labels))
    train_set, test_set = split_dataset(rows, args.test_fraction, args.seed)
    cfg = TrainConfig(max_iter=args.max_iter, rhobeg=args.rhobeg,
                      rhoend=args.rhoend, seed=args.seed,
                      init_scale=args.init_scale)
    params, history = train(train_set, cfg)
    save_model(args.out_model, params, method)
    write_history(args.out_history, history)

    metrics_train = evaluate(train_set, params)
    metrics_test = evaluate(test_set, params)
    full_set = Dataset(features, tuple(labels), "test")
    metrics_full = evaluate(full_set, params)
    print(f"n_train={train_set.n_rows}")
    print(f"n_test={test_set.n_rows}")
    print(f"train_accuracy={metrics_train['accuracy']!r}")
    print(f"train_loss={metrics_train['loss']!r}")
    print(f"test_accuracy={metrics_test['accuracy']!r}")
    print(f"test_loss={metrics_test['loss']!r}")
    print(f"full_accuracy={metrics_full['accuracy']!r}")
    print(f"full_loss={metrics_full['loss']!r}")
    return 0


def cmd_eval(args):
    features, labels, method = read_features(args.features)
    doc = load_model(args.model)
    if method is None:
        raise InvalidInput(
            f"{args.features} has no '# method=' line, so it cannot be "
            f"checked against the model (which expects "
            f"{doc['feature_method']!r} features)")
    if doc["feature_method"] != method:
        raise InvalidInput(
            f"model was trained on {doc['feature_method']!r} features but "
            f"{args.features} records method {method!r}")
    dataset = Dataset(features, tuple(labels), "test")
    metrics = evaluate(dataset, doc["params"])
    for key in ("accuracy", "loss", "tp", "fp", "fn", "tn", "n_rows"):
        print(f"{key}={metrics[key]!r}")
    return 0


def cmd_plot(args):
    history = read_history(args.history)
    render_history_svg(history, args.out)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = _Parser(
        prog="heartqcnn",
        description="Heart-sound classification with a simulated "
                    "quantum convolutional network.")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser(
        "synth", help="generate labeled synthetic recordings + manifest")
    synth.add_argument("--out-dir", required=True)
    synth.add_argument("--n-per-class", type=int, default=10)
    synth.add_argument("--cycles", type=int, default=5,
                       help="cardiac cycles per recording")
    synth.add_argument("--seed", type=int, default=0)
    synth.set_defaults(func=cmd_synth)

    pre = sub.add_parser(
        "preprocess", help="extract 8-value features from a WAV manifest")
    pre.add_argument("--manifest", required=True)
    pre.add_argument("--method", required=True, choices=FEATURE_METHODS)
    pre.add_argument("--out", required=True, help="output feature CSV")
    pre.add_argument("--jobs", type=int, default=1,
                     help="parallel workers over files (results identical)")
    pre.set_defaults(func=cmd_preprocess)

    tr = sub.add_parser("train", help="fit the classifier on a feature CSV")
    tr.add_argument("--features", required=True)
    tr.add_argument("--out-model", required=True)
    tr.add_argument("--out-history", required=True)
    tr.add_argument("--max-iter", type=int, default=200,
                    help="objective evaluation budget")
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--test-fraction", type=float, default=0.3)
    tr.add_argument("--rhobeg", type=float, default=0.01)
    tr.add_argument("--rhoend", type=float, default=1e-6)
    tr.add_argument("--init-scale", type=float, default=math.pi)
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="score a model against a feature CSV")
    ev.add_argument("--features", required=True)
    ev.add_argument("--model", required=True)
    ev.set_defaults(func=cmd_eval)

    pl = sub.add_parser("plot", help="render a history CSV as an SVG chart")
    pl.add_argument("--history", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return parser


def entrypoint(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return 0 if not exc.code else int(exc.code)
    try:
        return args.func(args)
    except HeartQcnnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(entrypoint())
