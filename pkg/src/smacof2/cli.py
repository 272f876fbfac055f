"""Command line interface: ``mds run`` and ``mds compare``.

Exit codes: 0 converged, 2 iteration limit reached, 3 input error,
4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import InputError, IoFailure, NumericError
from .io import (
    DATASETS,
    RunConfig,
    _atomic_write,
    alignment_report,
    checksum,
    emit_results,
    load_dataset,
    read_configuration_csv,
    read_matrix,
)
from .model import DissimilarityMatrix, normalize_weights, uniform_weights
from .solver import SolverOptions, run_raw_smacof, run_stress2

EXIT_CONVERGED = 0
EXIT_ITMAX = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

_OUTPUTS = ("log", "json", "csv", "svg")


def _load_input(source: str):
    if source in DATASETS:
        return load_dataset(source)
    values, labels = read_matrix(source)
    return DissimilarityMatrix(values, labels=labels)


def _parse_init(source: str, n: int, ndim: int) -> dict:
    if source == "torgerson":
        return {"init": "torgerson"}
    if source.startswith("random:"):
        try:
            return {"init": "random", "seed": int(source.split(":", 1)[1])}
        except ValueError:
            raise InputError(f"bad random seed in {source!r}") from None
    if source.startswith("file:"):
        path = source.split(":", 1)[1]
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise IoFailure(f"cannot read {path}: {exc}") from exc
        if path.endswith(".csv"):
            x, _ = read_configuration_csv(text)
        else:
            x = np.loadtxt(path, comments="#", ndmin=2)
        return {"init": x}
    raise InputError(f"unknown --init {source!r}")


def _emit_list(text: str):
    kinds = tuple(k.strip() for k in text.split(",") if k.strip())
    bad = [k for k in kinds if k not in _OUTPUTS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown output kind(s): {', '.join(bad)}")
    return kinds


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="matrix file or builtin dataset (ekman)")
    p.add_argument("--ndim", type=int, default=2)
    p.add_argument("--itmax", type=int, default=1000)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--weights", default=None, help="weight matrix file")
    p.add_argument("--init", default="torgerson", help="torgerson | random:<seed> | file:<path>")
    p.add_argument("--allow-indefinite", action="store_true")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--emit", type=_emit_list, default=_OUTPUTS, help="comma list of log,json,csv,svg")
    p.add_argument("--verbose", action="store_true", help="print the iteration log")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mds", description="Metric MDS by stress majorization")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="fit one configuration")
    _add_common(run)
    run.add_argument("--loss", choices=("stress2", "raw"), default="stress2")
    cmp_ = sub.add_parser("compare", help="fit stress two and raw stress, then align them")
    _add_common(cmp_)
    return parser


def _setup(args):
    delta = _load_input(args.input)
    if args.weights:
        w, _ = read_matrix(args.weights, header=False)
        weights = normalize_weights(w)
    else:
        weights = uniform_weights(delta.n)
    init = _parse_init(args.init, delta.n, args.ndim)
    opts = SolverOptions(ndim=args.ndim, itmax=args.itmax, eps=args.eps, verbose=args.verbose,
                         allow_indefinite=args.allow_indefinite, **init)
    return delta, weights, opts


def _config(args, loss):
    return RunConfig(input=args.input, loss=loss, ndim=args.ndim, itmax=args.itmax, eps=args.eps,
                     allow_indefinite=args.allow_indefinite, init=args.init, weights=args.weights,
                     outputs=args.emit, out_dir=args.out)


def _solve(loss, delta, weights, opts):
    fn = run_stress2 if loss == "stress2" else run_raw_smacof
    return fn(delta, weights, opts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        delta, weights, opts = _setup(args)
        digest = checksum(delta.values)
        losses = [args.loss] if args.command == "run" else ["stress2", "raw"]
        results = []
        for loss in losses:
            res = _solve(loss, delta, weights, opts)
            emit_results(res, _config(args, loss), labels=delta.labels, input_checksum=digest)
            results.append(res)
        if args.command == "compare":
            report = alignment_report(results[0], results[1])
            _atomic_write(Path(args.out) / "alignment.json", json.dumps(report, indent=2) + "\n")
            print(f"relative Procrustes residual {report['relative_residual']:.6g}")
    except (InputError, IoFailure) as exc:
        print(f"mds: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"mds: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for res in results:
        print(f"{res.loss}: itel {res.itel} loss {res.s:.10f} converged {res.converged}")
    return EXIT_CONVERGED if all(r.converged for r in results) else EXIT_ITMAX


if __name__ == "__main__":
    sys.exit(main())
