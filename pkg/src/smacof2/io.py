"""Reading matrices, the bundled Ekman data, and writing run results."""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import IoFailure, NonNumericToken, NonSquare, RaggedRows, UnknownDataset
from .linalg import procrustes_align
from .model import DissimilarityMatrix

_SPLIT = re.compile(r"[,\s]+")


def _rows(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([tok for tok in _SPLIT.split(line) if tok])
    return rows


def _to_float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise NonNumericToken(f"row {lineno}: cannot parse {tok!r} as a number") from None


def parse_labeled_matrix(text: str, header: Optional[bool] = None, row_labels: bool = False):
    """Parse a square matrix, returning ``(matrix, labels)``.

    Fields are separated by commas and/or whitespace; ``#`` starts a comment.
    ``header=None`` treats the first row as labels when there is exactly one
    more row than columns (or when it is not numeric).  With ``row_labels``
    the first field of every data row is a label.  Asymmetric input is
    averaged with its transpose, with a warning above ``1e-9``.
    """
    rows = _rows(text)
    if not rows:
        raise NonSquare("no data rows")
    labels = None
    if header is None:
        first_numeric = all(_is_number(t) for t in rows[0])
        header = not first_numeric or (len(rows) == len(rows[0]) + 1 and not row_labels)
    if header:
        labels, rows = list(rows[0]), rows[1:]
    if row_labels:
        names = [r[0] for r in rows]
        rows = [r[1:] for r in rows]
        labels = labels if labels is not None and len(labels) == len(rows) else names
    if not rows:
        raise NonSquare("no data rows")
    width = len(rows[0])
    for k, r in enumerate(rows):
        if len(r) != width:
            raise RaggedRows(f"row {k + 1} has {len(r)} fields, expected {width}")
    if len(rows) != width:
        raise NonSquare(f"{len(rows)} rows but {width} columns")
    a = np.array([[_to_float(t, k + 1) for t in r] for k, r in enumerate(rows)])
    asym = np.abs(a - a.T).max(initial=0.0)
    if asym > 1e-9:
        warnings.warn(f"matrix asymmetric by up to {asym:.3g}; averaging with its transpose", stacklevel=2)
    a = (a + a.T) / 2
    if labels is not None and len(labels) != a.shape[0]:
        labels = None
    return a, labels


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def parse_matrix(text: str, header: bool = False, row_labels: bool = False) -> np.ndarray:
    return parse_labeled_matrix(text, header=header, row_labels=row_labels)[0]


def read_matrix(path, header: Optional[bool] = None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return parse_labeled_matrix(text, header=header)


DATASETS = ("ekman",)


def load_ekman_similarities():
    text = resources.files("smacof2").joinpath("data/ekman.txt").read_text()
    return parse_labeled_matrix(text, header=True)


def load_dataset(name: str) -> DissimilarityMatrix:
    """Bundled dissimilarities.  ``ekman`` is converted by ``delta = 1 - s``."""
    if name != "ekman":
        raise UnknownDataset(f"unknown dataset {name!r}; available: {', '.join(DATASETS)}")
    s, labels = load_ekman_similarities()
    delta = 1.0 - s
    np.fill_diagonal(delta, 0.0)
    return DissimilarityMatrix(delta, labels=labels)


def format_iteration_line(record) -> str:
    return f"itel  {record.itel:d} sold  {record.sold:.10f} snew  {record.snew:.10f}"


def format_iteration_log(records) -> str:
    return "".join(format_iteration_line(r) + "\n" for r in records)


def checksum(matrix) -> str:
    a = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    return hashlib.sha256(a.tobytes()).hexdigest()


@dataclass
class RunConfig:
    input: str
    loss: str = "stress2"
    ndim: int = 2
    itmax: int = 1000
    eps: float = 1e-10
    allow_indefinite: bool = False
    init: str = "torgerson"
    weights: Optional[str] = None
    outputs: Sequence[str] = ("log", "json", "csv", "svg")
    out_dir: str = "."

    def options_echo(self) -> dict:
        return {
            "input": self.input,
            "loss": self.loss,
            "ndim": self.ndim,
            "itmax": self.itmax,
            "eps": self.eps,
            "allow_indefinite": self.allow_indefinite,
            "init": self.init,
            "weights": self.weights,
        }


def _atomic_write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _labels_for(result, labels):
    n = result.x.shape[0]
    return list(labels) if labels is not None else [str(i + 1) for i in range(n)]


def result_to_dict(result, config: RunConfig, labels=None, input_checksum: str = "") -> dict:
    rep = result.stress
    return {
        "loss": result.loss,
        "ndim": int(result.x.shape[1]),
        "itel": result.itel,
        "converged": bool(result.converged),
        "final_stress": result.s,
        "records": [{"itel": r.itel, "sold": r.sold, "snew": r.snew} for r in result.records],
        "configuration": [[float(v) for v in row] for row in result.x],
        "labels": _labels_for(result, labels),
        "skipped_pairs": result.skipped_pairs,
        "options": config.options_echo(),
        "input_checksum": input_checksum,
        "stress_report": {
            "sigma_raw": rep.sigma_raw,
            "eta1_sq": rep.eta1_sq,
            "eta2_sq": rep.eta2_sq,
            "eta_delta_sq": rep.eta_delta_sq,
            "d_bar": rep.d_bar,
            "sigma1": rep.sigma1,
            "sigma2": rep.sigma2,
            "sqrt_sigma1": rep.sqrt_sigma1,
        },
        "emergency_steps": result.emergency_steps,
    }


def configuration_csv(x, labels) -> str:
    p = x.shape[1]
    lines = ["label," + ",".join(f"dim{k + 1}" for k in range(p))]
    for lab, row in zip(labels, x):
        lines.append(f"{lab}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def read_configuration_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    labels, rows = [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        labels.append(parts[0])
        rows.append([float(v) for v in parts[1:]])
    return np.array(rows), labels


def _svg_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def scatter_svg(x, labels, title: str = "", size: int = 480, margin: int = 40) -> str:
    """Labeled 2-D scatter plot of the first two columns, equal axis scaling."""
    x = np.asarray(x, dtype=float)
    xy = x[:, :2] if x.shape[1] >= 2 else np.column_stack([x[:, 0], np.zeros(len(x))])
    lo = xy.min(axis=0)
    span = float((xy.max(axis=0) - lo).max()) or 1.0
    scale = (size - 2 * margin) / span
    center = (xy.max(axis=0) + lo) / 2
    px = size / 2 + (xy[:, 0] - center[0]) * scale
    py = size / 2 - (xy[:, 1] - center[1]) * scale
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{size / 2:.1f}" y="20" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{_svg_escape(title)}</text>')
    if x.shape[1] > 2:
        out.append(f'<text x="4" y="{size - 6}" font-family="sans-serif" font-size="10">'
                   f'first two of {x.shape[1]} dimensions shown</text>')
    for lab, a, b in zip(labels, px, py):
        out.append(f'<g class="point"><circle cx="{a:.3f}" cy="{b:.3f}" r="3" fill="black"/>'
                   f'<text x="{a + 5:.3f}" y="{b - 5:.3f}" font-family="sans-serif" '
                   f'font-size="11">{_svg_escape(str(lab))}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_results(result, config: RunConfig, labels=None, input_checksum: str = "",
                 stem: Optional[str] = None) -> dict:
    """Write the requested outputs into ``config.out_dir``; return ``{kind: path}``."""
    out = Path(config.out_dir)
    stem = stem or result.loss
    labels = _labels_for(result, labels)
    written = {}
    for kind in config.outputs:
        path = out / f"{stem}.{kind}"
        if kind == "log":
            text = format_iteration_log(result.records)
        elif kind == "json":
            text = json.dumps(result_to_dict(result, config, labels, input_checksum), indent=2) + "\n"
        elif kind == "csv":
            text = configuration_csv(result.x, labels)
        elif kind == "svg":
            title = "Stress two solution" if result.loss == "stress2" else "Raw stress solution"
            text = scatter_svg(result.x, labels, title)
        else:
            raise ValueError(f"unknown output kind {kind!r}")
        _atomic_write(path, text)
        written[kind] = path
    return written


def alignment_report(first, second) -> dict:
    """Procrustes comparison (rotation, reflection and dilation) of two solutions."""
    res = procrustes_align(first.x, second.x, dilation=True)
    return {
        "first": first.loss,
        "second": second.loss,
        "scale": res.scale,
        "residual": res.residual,
        "relative_residual": res.relative_residual,
    }
