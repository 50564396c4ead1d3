"""Matrix and trajectory file formats.

Matrix files: JSON object {"d": int, "rows": [[...], ...]} or CSV with d rows
of d comma-separated floats; state indices are implicit and 0-based.
Trajectory files: plain text, one 0-based state index per line.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterator

import numpy as np

from .chain import TransitionMatrix
from .errors import ParseError
from .trajectory import Trajectory


def matrix_to_json_dict(tm: TransitionMatrix) -> dict:
    return {"d": tm.dim, "rows": [list(map(float, row)) for row in tm.entries]}


def matrix_from_json_dict(obj: dict) -> TransitionMatrix:
    try:
        d = int(obj["d"])
        rows = obj["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"matrix JSON must carry 'd' and 'rows': {exc}") from exc
    entries = np.asarray(rows, dtype=float)
    if entries.shape != (d, d):
        raise ParseError(f"matrix rows have shape {entries.shape}, expected ({d}, {d})")
    try:
        return TransitionMatrix(entries=entries)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def load_matrix(path: str | Path) -> TransitionMatrix:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read matrix file {path}: {exc}") from exc
    if path.suffix.lower() == ".csv":
        return _matrix_from_csv(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        return _matrix_from_csv(text)
    return matrix_from_json_dict(obj)


def _matrix_from_csv(text: str) -> TransitionMatrix:
    rows = []
    for record in csv.reader(filter(None, (line.strip() for line in text.splitlines()))):
        try:
            rows.append([float(x) for x in record])
        except ValueError as exc:
            raise ParseError(f"bad CSV matrix row {record!r}") from exc
    if not rows:
        raise ParseError("empty matrix file")
    entries = np.asarray(rows, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ParseError(f"CSV matrix must be square, got shape {entries.shape}")
    try:
        return TransitionMatrix(entries=entries)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def save_matrix(tm: TransitionMatrix, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            for row in tm.entries:
                writer.writerow([repr(float(x)) for x in row])
    else:
        path.write_text(json.dumps(matrix_to_json_dict(tm)) + "\n")


def iter_trajectory_states(path: str | Path) -> Iterator[int]:
    """Stream state indices from a trajectory file, one integer per line."""
    with Path(path).open() as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield int(line)
            except ValueError as exc:
                raise ParseError(f"bad trajectory line {lineno}: {line!r}") from exc


def load_trajectory(path: str | Path, d: int) -> Trajectory:
    try:
        states = np.fromiter(iter_trajectory_states(path), dtype=np.int64)
    except OSError as exc:
        raise ParseError(f"cannot read trajectory file {path}: {exc}") from exc
    if states.size == 0:
        raise ParseError(f"trajectory file {path} is empty")
    try:
        return Trajectory(states=states, d=d)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def save_trajectory(traj: Trajectory, path: str | Path) -> None:
    Path(path).write_text("".join(f"{int(s)}\n" for s in traj.states))
