"""Command-line front end.

Subcommands: ``synth``, ``extract``, ``train``, ``recognize``, ``verify``.
Every output file is written to a temporary sibling and renamed into place,
so a failed run never leaves partial output.

Exit codes: 0 ok, 2 unparsable input or bad flags, 3 I/O failure,
4 extraction failure, 5 model/partition mismatch, 6 theorem precondition
violated (without ``--allow-violation``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import features, partition as part_mod, riccati_net, signal_io, verify
from .errors import (
    ManifestError,
    PreconditionViolated,
    RiccatiPhonemeError,
    UnassignableNeuron,
)
from .spectrum import WindowKind

logger = logging.getLogger("riccati_phoneme")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_EXTRACT = 4
EXIT_MISMATCH = 5
EXIT_PRECONDITION = 6


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# file helpers

def atomic_write(path, data) -> None:
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def dump_lines(objs) -> str:
    return "".join(json.dumps(o) + "\n" for o in objs)


def read_jsonl(path, required=()) -> list[dict]:
    try:
        fh = open(path)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    out = []
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CLIError(EXIT_PARSE, f"{path}: line {lineno}: invalid JSON ({exc.msg})")
            if not isinstance(obj, dict) or any(k not in obj for k in required):
                raise CLIError(EXIT_PARSE, f"{path}: line {lineno}: expected keys {list(required)}")
            out.append(obj)
    return out


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: invalid JSON ({exc.msg})") from exc


def read_patterns(path) -> list[dict]:
    rows = read_jsonl(path, required=("label", "components"))
    for n, row in enumerate(rows, 1):
        if len(row["components"]) != features.N_CHANNELS:
            raise CLIError(EXIT_PARSE, f"{path}: pattern {n} has {len(row['components'])} components")
    return rows


# --------------------------------------------------------------------------
# subcommands

def run_synth(args) -> int:
    try:
        entries = signal_io.read_manifest(args.manifest)
    except ManifestError as exc:
        raise CLIError(EXIT_PARSE, f"{args.manifest}: {exc}") from exc
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read {args.manifest}: {exc}") from exc
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot create {out_dir}: {exc}") from exc

    signals = []
    for n, e in enumerate(entries, 1):
        try:
            signals.append(signal_io.synth_vowel(e.spec, args.rate, e.seed))
        except RiccatiPhonemeError as exc:
            raise CLIError(EXIT_PARSE, f"{args.manifest}: entry {n}: {exc}") from exc

    segments = []
    for n, (e, sig) in enumerate(zip(entries, signals)):
        name = f"{n:04d}_{e.label}.wav"
        path = out_dir / name
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
        os.close(fd)
        try:
            signal_io.write_wav(tmp, sig)
            os.replace(tmp, path)
        except OSError as exc:
            raise CLIError(EXIT_IO, f"cannot write {path}: {exc}") from exc
        segments.append({"file": name, "label": e.label, "start": 0, "stop": len(sig)})
        print(f"{name}\tlabel={e.label}\tf0={e.spec.f0:g}\tsamples={len(sig)}\tseed={e.seed}")
    atomic_write(out_dir / "segments.jsonl", dump_lines(segments))
    return EXIT_OK


def run_extract(args) -> int:
    segments = read_jsonl(args.segments, required=("file", "label"))
    audio_dir = Path(args.audio_dir)
    for seg in segments:
        if not (audio_dir / seg["file"]).is_file():
            raise CLIError(EXIT_IO, f"missing audio file {audio_dir / seg['file']}")

    window = WindowKind.parse(args.window)
    rows, spectra = [], []
    cache: dict[str, signal_io.Signal] = {}
    for n, seg in enumerate(segments, 1):
        where = f"segment {n} ({seg['file']} [{seg.get('start', 0)}:{seg.get('stop')}])"
        try:
            sig = cache.get(seg["file"])
            if sig is None:
                sig = cache[seg["file"]] = signal_io.read_wav(audio_dir / seg["file"])
            span = (int(seg.get("start", 0)), seg.get("stop"))
            spectrum = features.segment_spectrum(sig, span, window, args.stride)
            pattern = features.normalize_unit(features.band_energies(spectrum))
        except (RiccatiPhonemeError, ValueError) as exc:
            raise CLIError(EXIT_EXTRACT, f"extraction failed for {where}: {exc}") from exc
        ok = features.gamma_floor(pattern, args.gamma)
        if not ok:
            logger.warning("%s: min component %.3g below gamma=%g", where, pattern.min(), args.gamma)
        rows.append({"label": seg["label"], "components": pattern.tolist(), "gamma_ok": ok})
        spectra.append({"label": seg["label"], "bin_width": spectrum.bin_width,
                        "bins": spectrum.bins.tolist()})
    atomic_write(args.out, dump_lines(rows))
    if args.dump_spectra:
        atomic_write(args.dump_spectra, dump_lines(spectra))
    return EXIT_OK


def run_train(args) -> int:
    rows = read_patterns(args.patterns)
    labeled = []
    for n, row in enumerate(rows, 1):
        x = np.asarray(row["components"], dtype=float)
        if row.get("gamma_ok") is False or not features.gamma_floor(x, args.gamma):
            logger.warning("pattern %d (%s) fails the gamma floor; skipped", n, row["label"])
            continue
        labeled.append((x, str(row["label"])))
    n_classes = len({label for _, label in labeled})
    if n_classes < 2:
        raise CLIError(EXIT_PARSE, f"need patterns of at least two classes, got {n_classes}")
    if args.neurons < n_classes:
        raise CLIError(EXIT_PARSE, f"--neurons {args.neurons} < {n_classes} classes")

    config = riccati_net.NetworkConfig(alpha=args.alpha, beta=args.beta, gamma=args.gamma,
                                       dt=args.dt, n_neurons=args.neurons)
    net = riccati_net.init_network(config, jitter=args.jitter, seed=args.seed)
    stream = riccati_net.presentation_order(labeled, args.order, args.epochs)
    net = riccati_net.train(net, stream)
    partition = part_mod.build_partition(labeled)
    atomic_write(args.out_model, json.dumps(net.to_dict()) + "\n")
    atomic_write(args.out_partition, json.dumps(partition.to_dict()) + "\n")
    touched = sum(label is not None for label in net.labels)
    print(f"trained {touched}/{len(net)} neurons on {len(labeled)} patterns, "
          f"{n_classes} classes, delta={partition.delta:.4g}")
    return EXIT_OK


def _load_model(path) -> riccati_net.Network:
    try:
        return riccati_net.Network.from_dict(read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"{path}: not a model file ({exc})") from exc


def _load_partition(path) -> part_mod.VoronoiPartition:
    try:
        return part_mod.VoronoiPartition.from_dict(read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"{path}: not a partition file ({exc})") from exc


def run_recognize(args) -> int:
    net = _load_model(args.model)
    partition = _load_partition(args.partition)
    rows = read_patterns(args.patterns)

    if net.weights.shape[1] != partition.centrals.shape[1]:
        raise CLIError(EXIT_MISMATCH, "model and partition dimensions differ")
    scaled = net.weights / net.config.scale
    for i, label in enumerate(net.labels):
        if label is None:
            continue
        try:
            k = part_mod.assign_neuron(partition, scaled[i])
        except UnassignableNeuron as exc:
            raise CLIError(EXIT_MISMATCH, f"neuron {i} ({label}): {exc}") from exc
        if partition.atoms[k].label != label:
            raise CLIError(EXIT_MISMATCH, f"neuron {i} is labeled {label!r} but sits in "
                                          f"atom {partition.atoms[k].label!r}")

    out, confusion = [], {}
    hits = {"partition": 0, "network": 0}
    for n, row in enumerate(rows):
        x = np.asarray(row["components"], dtype=float)
        truth = row.get("label")
        by_partition = part_mod.recognize(partition, x).to_dict()
        try:
            by_network = part_mod.recognize_via_network(net, partition, x).to_dict()
        except UnassignableNeuron:
            by_network = {"recognized": False, "label": None, "rho": None,
                          "atom_index": None, "unassignable": True}
        for route, res in (("partition", by_partition), ("network", by_network)):
            hits[route] += int(res["recognized"] and res["label"] == truth)
        predicted = by_partition["label"] if by_partition["recognized"] else "<unrecognized>"
        confusion.setdefault(str(truth), {}).setdefault(predicted, 0)
        confusion[str(truth)][predicted] += 1
        out.append({"index": n, "label": truth, "partition": by_partition, "network": by_network})

    total = len(rows)
    summary = {
        "n": total,
        "partition_accuracy": hits["partition"] / total if total else None,
        "network_accuracy": hits["network"] / total if total else None,
        "confusion": confusion,
    }
    out.append({"summary": summary})
    atomic_write(args.out, dump_lines(out))
    print(f"recognized {hits['partition']}/{total} (partition), {hits['network']}/{total} (network)")
    return EXIT_OK


def _default_patterns(per_class: int, seed: int) -> list[tuple[np.ndarray, str]]:
    corpus = signal_io.default_corpus(per_class=per_class, seed=seed)
    return [
        (features.extract_pattern(signal_io.synth_vowel(e.spec, signal_io.DEFAULT_RATE, e.seed)), e.label)
        for e in corpus
    ]


def _verify_patterns(args) -> list[tuple[np.ndarray, str]]:
    if args.patterns:
        return [(np.asarray(r["components"], float), str(r["label"])) for r in read_patterns(args.patterns)]
    return _default_patterns(args.per_class, args.seed)


def run_verify(args) -> int:
    gamma = args.gamma
    if args.theorem in ("1", "5"):
        patterns = (_verify_patterns(args) if args.patterns
                    else _default_patterns(1, args.seed))
        x_hat = patterns[0][0]

    if args.theorem == "1":
        gamma = features.DEFAULT_GAMMA if gamma is None else gamma
        config = riccati_net.NetworkConfig(alpha=args.alpha, beta=args.beta, gamma=gamma, dt=args.dt)
        strict = not args.allow_violation
        try:
            rep = verify.check_theorem1(x_hat, config, steps=args.steps, strict=strict)
        except PreconditionViolated as exc:
            raise CLIError(EXIT_PRECONDITION, str(exc)) from exc
        report = {"theorem": 1, **asdict(rep)}
        report.pop("errors")
    elif args.theorem == "5":
        gamma = float(x_hat.min()) if gamma is None else gamma
        delta = gamma / 16 if args.delta is None else args.delta
        config = riccati_net.NetworkConfig(alpha=args.alpha, beta=args.beta, gamma=gamma, dt=args.dt)
        pert = verify.PerturbationSpec(kind=args.kind, amplitude=delta, seed=args.seed)
        horizon = args.steps * args.dt if args.steps_given else None
        rep = verify.check_theorem5(x_hat, pert, config, horizon=horizon, gamma=gamma)
        if not rep.precondition_ok and not args.allow_violation:
            raise CLIError(EXIT_PRECONDITION,
                           f"delta={delta:.3g} is not below gamma/8={gamma / 8:.3g} "
                           f"(or x_hat dips below gamma); pass --allow-violation to report anyway")
        report = {"theorem": 5, **asdict(rep)}
    elif args.theorem == "3":
        gamma = features.DEFAULT_GAMMA if gamma is None else gamma
        partition = part_mod.build_partition(_verify_patterns(args))
        report = {"theorem": 3, **asdict(verify.check_gamma_criterion(partition, gamma))}
    else:
        corpus = [
            (signal_io.synth_vowel(e.spec, signal_io.DEFAULT_RATE, e.seed), e.label)
            for e in signal_io.default_corpus(per_class=args.per_class, seed=args.seed)
        ]
        pairs = verify.window_sensitivity(corpus, list(WindowKind))
        report = {"theorem": "window",
                  "pairs": [{k: v for k, v in asdict(p).items() if k != "distances"} for p in pairs]}

    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CLIError(EXIT_PARSE, f"{self.prog}: {message}")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="riccati-phoneme", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    pos_f, pos_i = _positive(float), _positive(int)

    s = sub.add_parser("synth", help="synthesise WAV files from a vowel manifest")
    s.add_argument("--manifest", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--rate", type=pos_i, default=signal_io.DEFAULT_RATE)
    s.set_defaults(func=run_synth)

    e = sub.add_parser("extract", help="extract 15-channel pattern vectors")
    e.add_argument("--audio-dir", required=True)
    e.add_argument("--segments", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--window", choices=[w.value for w in WindowKind], default="rect")
    e.add_argument("--stride", type=pos_i, default=signal_io.DEFAULT_STRIDE)
    e.add_argument("--gamma", type=pos_f, default=features.DEFAULT_GAMMA)
    e.add_argument("--dump-spectra", metavar="PATH")
    e.set_defaults(func=run_extract)

    t = sub.add_parser("train", help="train the network and build the partition")
    t.add_argument("--patterns", required=True)
    t.add_argument("--out-model", required=True)
    t.add_argument("--out-partition", required=True)
    t.add_argument("--neurons", type=pos_i, default=8)
    t.add_argument("--alpha", type=pos_f, default=1.0)
    t.add_argument("--beta", type=pos_f, default=1.0)
    t.add_argument("--gamma", type=pos_f, default=features.DEFAULT_GAMMA)
    t.add_argument("--dt", type=pos_f, default=0.1)
    t.add_argument("--epochs", type=pos_i, default=10)
    t.add_argument("--order", choices=("grouped", "given"), default="grouped")
    t.add_argument("--jitter", type=float, default=0.0)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=run_train)

    r = sub.add_parser("recognize", help="recognise patterns against a model and partition")
    r.add_argument("--model", required=True)
    r.add_argument("--partition", required=True)
    r.add_argument("--patterns", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=run_recognize)

    v = sub.add_parser("verify", help="numerical theorem checks")
    v.add_argument("--theorem", choices=("1", "3", "5", "window"), required=True)
    v.add_argument("--alpha", type=pos_f, default=1.0)
    v.add_argument("--beta", type=pos_f, default=1.0)
    v.add_argument("--gamma", type=pos_f, default=None)
    v.add_argument("--delta", type=float, default=None)
    v.add_argument("--dt", type=pos_f, default=0.1)
    v.add_argument("--steps", type=pos_i, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--kind", choices=verify.PERTURBATION_KINDS, default="sinusoidal")
    v.add_argument("--patterns", help="pattern file; the default synthetic corpus otherwise")
    v.add_argument("--per-class", type=pos_i, default=10)
    v.add_argument("--allow-violation", action="store_true")
    v.add_argument("--out")
    v.set_defaults(func=run_verify)
    return p


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("RP_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "command", None) == "verify":
            args.steps_given = args.steps is not None
            if args.steps is None:
                args.steps = 150
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
