import json
import warnings
from pathlib import Path

import numpy as np
import pytest

from smacof2 import load_dataset, run_raw_smacof, run_stress2
from smacof2.errors import IoFailure, NonNumericToken, NonSquare, RaggedRows, UnknownDataset
from smacof2.io import (
    RunConfig,
    alignment_report,
    configuration_csv,
    emit_results,
    format_iteration_line,
    format_iteration_log,
    parse_labeled_matrix,
    parse_matrix,
    read_configuration_csv,
    read_matrix,
)
from smacof2.solver import IterationRecord

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def ekman():
    return load_dataset("ekman")


@pytest.fixture(scope="module")
def ekman_run(ekman):
    return run_stress2(ekman)


# --- parsing -----------------------------------------------------------------

def test_parse_whitespace_and_commas():
    a = parse_matrix("0 1 2\n1 0 1\n2 1 0\n")
    assert a[0, 2] == 2.0
    b = parse_matrix("0,1,2\n1,0,1\n2,1,0")
    assert np.array_equal(a, b)
    c = parse_matrix("0, 1, 2\n1 ,0 ,1\n\n2\t1\t0\n")
    assert np.array_equal(a, c)


def test_parse_comments_and_header():
    text = "# a comment\na b c\n0 1 2  # trailing\n1 0 1\n2 1 0\n"
    a, labels = parse_labeled_matrix(text)
    assert labels == ["a", "b", "c"]
    assert a.shape == (3, 3)


def test_parse_row_labels():
    a, labels = parse_labeled_matrix("x 0 1 2\ny 1 0 1\nz 2 1 0\n", header=False, row_labels=True)
    assert labels == ["x", "y", "z"] and a[2, 0] == 2.0


@pytest.mark.parametrize("text, err", [
    ("0 1 2 3\n1 0 1 2\n2 1 0 1\n", NonSquare),
    ("0 1 2\n1 0\n2 1 0\n", RaggedRows),
    ("0 1 2\n1 0 x\n2 1 0\n", NonNumericToken),
    ("# only comments\n", NonSquare),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_matrix(text)


def test_parse_symmetrizes_with_warning():
    with pytest.warns(UserWarning, match="asymmetric"):
        a = parse_matrix("0 1 2\n1.2 0 1\n2 1 0\n")
    assert a[0, 1] == a[1, 0] == pytest.approx(1.1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_matrix("0 1 2\n1.0000000000001 0 1\n2 1 0\n")


def test_read_matrix_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        read_matrix(tmp_path / "nope.txt")


def test_load_ekman(ekman):
    d = ekman.values
    assert d.shape == (14, 14)
    assert np.array_equal(d, d.T)
    assert not np.any(np.diag(d))
    assert d.min() >= 0 and d.max() <= 1
    assert ekman.labels[0] == "434" and ekman.labels[-1] == "674"


def test_unknown_dataset():
    with pytest.raises(UnknownDataset):
        load_dataset("gruijter")


def test_ekman_smoke_run(ekman_run):
    assert ekman_run.itel <= 1000


# --- iteration log -----------------------------------------------------------

def test_format_first_line():
    rec = IterationRecord(1, 0.1577255150, 0.1321216983)
    assert format_iteration_line(rec) == "itel  1 sold  0.1577255150 snew  0.1321216983"


def test_format_equal_fields():
    line = format_iteration_line(IterationRecord(7, 0.25, 0.25))
    assert line.split()[3] == line.split()[5]


def test_ekman_log_matches_reference(ekman_run):
    expected = (DATA / "ekman_stress2.log").read_text()
    assert format_iteration_log(ekman_run.records) == expected


# --- emission ----------------------------------------------------------------

def _emit(result, tmp_path, labels=None, outputs=("log", "json", "csv", "svg")):
    cfg = RunConfig(input="ekman", loss=result.loss, outputs=outputs, out_dir=str(tmp_path))
    return emit_results(result, cfg, labels=labels, input_checksum="abc")


def test_json_round_trip(ekman, ekman_run, tmp_path):
    paths = _emit(ekman_run, tmp_path, ekman.labels)
    data = json.loads(paths["json"].read_text())
    for key in ("loss", "ndim", "itel", "converged", "final_stress", "records", "configuration",
                "labels", "skipped_pairs", "options", "input_checksum"):
        assert key in data
    assert np.array_equal(np.array(data["configuration"]), ekman_run.x)
    assert data["final_stress"] == ekman_run.s
    assert len(data["records"]) == 28 and data["labels"] == list(ekman.labels)


def test_csv_round_trip(ekman, ekman_run):
    x, labels = read_configuration_csv(configuration_csv(ekman_run.x, ekman.labels))
    assert np.array_equal(x, ekman_run.x) and labels == list(ekman.labels)


def test_svg_has_one_group_per_point(ekman, ekman_run, tmp_path):
    svg = _emit(ekman_run, tmp_path, ekman.labels)["svg"].read_text()
    assert svg.count('<g class="point">') == 14
    assert ">434<" in svg


def test_svg_notice_for_three_dimensions(ekman, tmp_path):
    res = run_stress2(ekman, ndim=3)
    svg = _emit(res, tmp_path, outputs=("svg",))["svg"].read_text()
    assert "first two of 3 dimensions" in svg
    assert svg.count('<g class="point">') == 14


def test_default_labels(ekman_run, tmp_path):
    data = json.loads(_emit(ekman_run, tmp_path, outputs=("json",))["json"].read_text())
    assert data["labels"] == [str(i) for i in range(1, 15)]


def test_emission_is_deterministic(ekman, tmp_path):
    a = _emit(run_stress2(ekman), tmp_path / "a", ekman.labels)
    b = _emit(run_stress2(ekman), tmp_path / "b", ekman.labels)
    for kind in a:
        assert a[kind].read_bytes() == b[kind].read_bytes()


def test_emit_unwritable_directory(ekman_run, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(IoFailure):
        _emit(ekman_run, blocker / "sub", outputs=("log",))


def test_alignment_report(ekman, ekman_run):
    rep = alignment_report(ekman_run, run_raw_smacof(ekman))
    assert rep["first"] == "stress2" and rep["second"] == "raw"
    assert rep["relative_residual"] < 0.05
