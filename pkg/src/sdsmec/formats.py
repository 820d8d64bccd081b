"""CSV/JSON file formats.

* bipartite edgelist: header ``agent,artifact``
* constraints: header ``agent,artifact,constraint`` (``prohibited``/``required``)
* backbone: header ``agent_i,agent_j``, smaller label first
* projection: header ``agent_i,agent_j,weight``, positive weights only
* p-values: dense square CSV, first row/column hold the agent labels
* space spec (oracle input): JSON ``{"rows": [...], "cols": [...],
  "prohibited": [[i, k], ...], "required": [[i, k], ...]}``

A path of ``-`` means stdin/stdout. Everything is UTF-8.
"""

from __future__ import annotations

import contextlib
import csv
import json
import math
import sys
import warnings

import numpy as np

from .core import CellState, ConstraintMask, IncidenceMatrix, Projection
from .errors import FormatError

EDGE_HEADER = ["agent", "artifact"]
CONSTRAINT_HEADER = ["agent", "artifact", "constraint"]
BACKBONE_HEADER = ["agent_i", "agent_j"]
PROJECTION_HEADER = ["agent_i", "agent_j", "weight"]


class DuplicateEdgeWarning(UserWarning):
    pass


@contextlib.contextmanager
def _open_read(path):
    if str(path) == "-":
        yield sys.stdin
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            yield fh


@contextlib.contextmanager
def _open_write(path):
    if str(path) == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _rows(fh, path, header):
    reader = csv.reader(fh)
    try:
        first = next(reader)
    except StopIteration:
        raise FormatError("file is empty", path, 1) from None
    if [h.strip().lower() for h in first] != header:
        raise FormatError(f"expected header {','.join(header)!r}, got {','.join(first)!r}", path, 1)
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(row)}", path, line)
        row = [cell.strip() for cell in row]
        if any(cell == "" for cell in row):
            raise FormatError("empty field", path, line)
        yield line, row


def read_edgelist(path) -> IncidenceMatrix:
    """Read a bipartite edgelist; duplicate pairs collapse with a warning."""
    with _open_read(path) as fh:
        edges = [(a, k) for _, (a, k) in _rows(fh, path, EDGE_HEADER)]
    if not edges:
        raise FormatError("edgelist contains no edges", path)
    B, dupes = IncidenceMatrix.from_edges(edges)
    if dupes:
        warnings.warn(f"{path}: collapsed {dupes} duplicate edge(s)", DuplicateEdgeWarning, stacklevel=2)
    return B


def write_edgelist(B: IncidenceMatrix, path) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGE_HEADER)
        w.writerows(B.edges())


def read_constraints(path, B: IncidenceMatrix) -> ConstraintMask:
    """Read constraints for the agents/artifacts of B.

    Pairs need not be edges of B, but both labels must appear in B.
    """
    agents = {a: i for i, a in enumerate(B.agent_labels)}
    artifacts = {k: i for i, k in enumerate(B.artifact_labels)}
    states = np.zeros(B.shape, dtype=np.int8)
    with _open_read(path) as fh:
        for line, (a, k, state) in _rows(fh, path, CONSTRAINT_HEADER):
            if a not in agents:
                raise FormatError(f"unknown agent label {a!r}", path, line)
            if k not in artifacts:
                raise FormatError(f"unknown artifact label {k!r}", path, line)
            try:
                parsed = CellState.parse(state)
            except ValueError:
                raise FormatError(
                    f"constraint must be 'prohibited' or 'required', got {state!r}", path, line
                ) from None
            if parsed == CellState.FREE:
                raise FormatError("constraint must be 'prohibited' or 'required'", path, line)
            cell = agents[a], artifacts[k]
            if states[cell] and states[cell] != parsed:
                raise FormatError(f"conflicting constraints for ({a}, {k})", path, line)
            states[cell] = parsed
    return ConstraintMask(states)


def write_constraints(mask: ConstraintMask, B: IncidenceMatrix, path) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONSTRAINT_HEADER)
        for i, k in np.argwhere(mask.states != CellState.FREE):
            w.writerow(
                [B.agent_labels[i], B.artifact_labels[k], CellState(mask.states[i, k]).name.lower()]
            )


def write_backbone(backbone, path) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BACKBONE_HEADER)
        w.writerows(backbone.edges())


def read_backbone(path) -> list[tuple[str, str]]:
    with _open_read(path) as fh:
        return [tuple(row) for _, row in _rows(fh, path, BACKBONE_HEADER)]


def write_projection(P: Projection, path) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROJECTION_HEADER)
        for a, b, weight in P.edges():
            if str(b) < str(a):
                a, b = b, a
            w.writerow([a, b, weight])


def write_pvalues(labels, pvalues: np.ndarray, path) -> None:
    """Dense labelled matrix; ``repr`` floats round-trip exactly, diagonal left blank."""
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + [str(x) for x in labels])
        for lab, row in zip(labels, pvalues):
            w.writerow([lab] + ["" if math.isnan(v) else repr(float(v)) for v in row])


def read_pvalues(path) -> tuple[list[str], np.ndarray]:
    with _open_read(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        labels = header[1:]
        rows = []
        for row in reader:
            if row[0] != labels[len(rows)]:
                raise FormatError(f"row label {row[0]!r} does not match header", path, reader.line_num)
            rows.append([float(v) if v else float("nan") for v in row[1:]])
    return labels, np.array(rows, dtype=np.float64)


def read_space_spec(path):
    from .oracle import SpaceSpec

    try:
        with _open_read(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    try:
        rows, cols = doc["rows"], doc["cols"]
    except (KeyError, TypeError):
        raise FormatError("space spec needs 'rows' and 'cols' lists", path) from None
    shape = (len(rows), len(cols))
    try:
        mask = ConstraintMask.from_cells(
            shape,
            [tuple(c) for c in doc.get("prohibited", [])],
            [tuple(c) for c in doc.get("required", [])],
        )
    except (IndexError, ValueError, TypeError) as exc:
        raise FormatError(f"bad constraint cells: {exc}", path) from None
    return SpaceSpec(rows, cols, mask)


def write_space_spec(spec, path) -> None:
    doc = {
        "rows": [int(x) for x in spec.row_sums],
        "cols": [int(x) for x in spec.col_sums],
        "prohibited": np.argwhere(spec.mask.prohibited).tolist(),
        "required": np.argwhere(spec.mask.required).tolist(),
    }
    with _open_write(path) as fh:
        json.dump(doc, fh)
        fh.write("\n")

