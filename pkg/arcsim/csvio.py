"""
Deterministic CSV output.
A file starts with the originating configuration as '# key = value' lines,
then '## ' annotation lines, then one header row and the data rows. Floats
are written as '%.16e', the separator is a comma and lines end in LF.
"""

import io
import logging
import math
import sys
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from arcsim.errors import ArcSimError

log = logging.getLogger(__name__)

FLOAT_FORMAT = "%.16e"
NA_REP = "nan"


def format_float(value: float) -> str:
    if math.isnan(value):
        return NA_REP
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return FLOAT_FORMAT % value


def to_frame(columns: Sequence[str], rows: Iterable[Sequence[float]]) -> pd.DataFrame:
    """Float table with one column per header entry; ragged rows are refused."""
    data = []
    for row in rows:
        if len(row) != len(columns):
            raise ArcSimError(f"Row has {len(row)} values for {len(columns)} columns")
        data.append([float(value) for value in row])
    return pd.DataFrame(data, columns=list(columns), dtype=float)


def render(
    config_lines: Iterable[str],
    columns: Sequence[str],
    rows: Iterable[Sequence[float]],
    annotations: Iterable[str] = (),
) -> str:
    frame = to_frame(columns, rows)
    buffer = io.StringIO()
    for line in config_lines:
        buffer.write(f"# {line}\n")
    for line in annotations:
        buffer.write(f"## {line}\n")
    frame.to_csv(
        buffer,
        index=False,
        float_format=FLOAT_FORMAT,
        na_rep=NA_REP,
        lineterminator="\n",
    )
    return buffer.getvalue()


def write_csv(
    path: Optional[Union[str, Path]],
    config_lines: Iterable[str],
    columns: Sequence[str],
    rows: Iterable[Sequence[float]],
    annotations: Iterable[str] = (),
    stream: Optional[IO[str]] = None,
) -> str:
    """Write to path, or to stream (stdout by default) when path is empty. Returns the text."""
    text = render(config_lines, columns, rows, annotations)
    if path:
        try:
            with open(path, "w", newline="\n") as f:
                f.write(text)
        except IOError as e:
            raise ArcSimError(f"Cannot write {path}: {e}") from e
        log.info(f"Wrote {text.count(chr(10))} lines to {path}")
    else:
        (stream or sys.stdout).write(text)
    return text


def parse(text: str) -> Tuple[List[str], List[str], List[str], List[List[float]]]:
    """Split CSV text into (config lines, annotations, columns, rows)."""
    config_lines: List[str] = []
    annotations: List[str] = []
    for line in text.splitlines():
        if line.startswith("## "):
            annotations.append(line[3:])
        elif line.startswith("# "):
            config_lines.append(line[2:])
    try:
        frame = pd.read_csv(io.StringIO(text), comment="#", float_precision="round_trip")
    except pd.errors.EmptyDataError:
        return config_lines, annotations, [], []
    rows = frame.to_numpy(dtype=float).tolist()
    return config_lines, annotations, [str(column) for column in frame.columns], rows


def read_csv(path: Union[str, Path]) -> Tuple[List[str], List[str], List[str], List[List[float]]]:
    try:
        text = Path(path).read_text()
    except IOError as e:
        raise ArcSimError(f"Cannot read {path}: {e}") from e
    return parse(text)
