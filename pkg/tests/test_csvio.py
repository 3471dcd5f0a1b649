import io
import math

import pytest

from arcsim import csvio
from arcsim.errors import ArcSimError


def test_format_float():
    assert csvio.format_float(1.0) == "1.0000000000000000e+00"
    assert csvio.format_float(-2.5) == "-2.5000000000000000e+00"
    assert csvio.format_float(math.nan) == "nan"
    assert csvio.format_float(math.inf) == "inf"
    assert csvio.format_float(-math.inf) == "-inf"


def test_render_layout():
    text = csvio.render(["photon.nu0 = 4.0"], ["x", "y"], [[1.0, 0.5]], ["crossing_gamma = nan"])
    assert text == (
        "# photon.nu0 = 4.0\n"
        "## crossing_gamma = nan\n"
        "x,y\n"
        "1.0000000000000000e+00,5.0000000000000000e-01\n"
    )


def test_render_rejects_ragged_rows():
    with pytest.raises(ArcSimError):
        csvio.render([], ["x", "y"], [[1.0]])


def test_write_csv_to_stream():
    stream = io.StringIO()
    text = csvio.write_csv(None, ["a = 1"], ["x"], [[2.0]], stream=stream)
    assert stream.getvalue() == text
    assert text.endswith("x\n2.0000000000000000e+00\n")


def test_write_and_read_file(tmp_path):
    path = tmp_path / "out.csv"
    rows = [[0.1, -3.0], [math.pi, 1e-300]]
    csvio.write_csv(path, ["photon.kind = fock"], ["a", "b"], rows, ["note = 1"])
    config_lines, annotations, columns, parsed = csvio.read_csv(path)
    assert config_lines == ["photon.kind = fock"]
    assert annotations == ["note = 1"]
    assert columns == ["a", "b"]
    assert parsed == rows
    assert b"\r\n" not in path.read_bytes()


def test_write_csv_unwritable(tmp_path):
    with pytest.raises(ArcSimError, match="Cannot write"):
        csvio.write_csv(tmp_path / "missing" / "out.csv", [], ["x"], [[1.0]])


def test_non_finite_values_survive_a_round_trip():
    text = csvio.render([], ["a", "b", "c"], [[math.nan, math.inf, -math.inf]])
    assert text.splitlines()[-1] == "nan,inf,-inf"
    _, _, columns, rows = csvio.parse(text)
    assert columns == ["a", "b", "c"]
    assert math.isnan(rows[0][0])
    assert rows[0][1:] == [math.inf, -math.inf]


def test_header_only_table():
    text = csvio.render(["photon.kind = fock"], ["x", "y"], [])
    assert text == "# photon.kind = fock\nx,y\n"
    config_lines, _, columns, rows = csvio.parse(text)
    assert config_lines == ["photon.kind = fock"]
    assert columns == ["x", "y"]
    assert rows == []


def test_to_frame_is_float_typed():
    frame = csvio.to_frame(["n", "p"], [[1, 2], [3, 4]])
    assert list(frame.columns) == ["n", "p"]
    assert all(dtype.kind == "f" for dtype in frame.dtypes)
    assert csvio.render([], ["n"], [[1]]) == "n\n1.0000000000000000e+00\n"


def test_read_csv_missing_file(tmp_path):
    with pytest.raises(ArcSimError, match="Cannot read"):
        csvio.read_csv(tmp_path / "absent.csv")


def test_parse_without_table():
    assert csvio.parse("# photon.nu0 = 4.0\n") == (["photon.nu0 = 4.0"], [], [], [])
