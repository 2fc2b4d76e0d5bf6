"""File formats: JSON for operators, POVMs, matrices and configs; CSV for grids.

Operator
    ``{"dim": d, "entries": [[re, im], ...]}`` with ``d*d`` entries, row-major.
Operator collection (POVM, bivariate POVM, Wigner measure)
    ``{"kind": ..., "shape": [M] or [M, N], "dim": d, "elements": [operator, ...]}``,
    elements row-major over the outcome indices.
Real matrix (nonideality matrices and their inverses)
    ``{"kind": "matrix", "rows": r, "cols": c, "entries": [[...], ...]}``.
Phase-space field
    CSV with header ``q,p,value`` (``q,p,value_re,value_im`` if complex), one
    row per grid point, ``q`` varying slowest; plus a sidecar ``.json`` with
    the grid.
Quadrature set
    CSV with header ``theta,x,w``, angles in radians, ``theta`` varying slowest.
Polarization config
    ``{"gamma": g, "directions": ...}`` (two-port) or
    ``{"gamma1": .., "gamma2": .., "gamma3": .., "directions": ...}`` (four-port),
    directions either ``[[x, y, z], ...]`` or ``{"linear_angle_degrees": [...]}``.

CSV numbers are written with 17 significant digits; JSON floats use
Python's round-trip representation. Both are deterministic.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidParameter
from .hilbert import as_operator
from .phasespace.grid import PhaseSpaceField, PhaseSpaceGrid, QuadratureSet
from .polarization import FourPortConfig, PoincareDirection, TwoPortConfig

COLLECTION_KINDS = ("povm", "bivariate_povm", "wigner_measure")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_json(path, obj: Any) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def read_json(path) -> Any:
    return json.loads(Path(path).read_text())


def operator_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def operator_from_json(doc: dict) -> np.ndarray:
    try:
        d = int(doc["dim"])
        entries = np.asarray(doc["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed operator document: {exc}") from exc
    if entries.shape != (d * d, 2):
        raise InvalidParameter(f"operator of dim {d} needs {d * d} [re, im] pairs")
    return as_operator((entries[:, 0] + 1j * entries[:, 1]).reshape(d, d))


def collection_to_json(ops, kind: str) -> dict:
    if kind not in COLLECTION_KINDS:
        raise InvalidParameter(f"unknown collection kind {kind!r}")
    ops = np.asarray(ops, dtype=complex)
    shape = list(ops.shape[:-2])
    d = ops.shape[-1]
    return {
        "kind": kind,
        "shape": shape,
        "dim": int(d),
        "elements": [operator_to_json(x) for x in ops.reshape(-1, d, d)],
    }


def collection_from_json(doc: dict) -> tuple[str, np.ndarray]:
    try:
        kind = doc["kind"]
        shape = [int(n) for n in doc["shape"]]
        d = int(doc["dim"])
        elements = [operator_from_json(e) for e in doc["elements"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed collection document: {exc}") from exc
    if kind not in COLLECTION_KINDS:
        raise InvalidParameter(f"unknown collection kind {kind!r}")
    if int(np.prod(shape)) != len(elements) or any(e.shape != (d, d) for e in elements):
        raise InvalidParameter("collection shape does not match its elements")
    return kind, np.array(elements).reshape(shape + [d, d])


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=float)
    return {"kind": "matrix", "rows": m.shape[0], "cols": m.shape[1], "entries": m.tolist()}


def matrix_from_json(doc: dict) -> np.ndarray:
    try:
        m = np.asarray(doc["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed matrix document: {exc}") from exc
    if m.ndim != 2 or m.shape != (doc.get("rows", m.shape[0]), doc.get("cols", m.shape[1])):
        raise InvalidParameter("matrix entries do not match rows/cols")
    return m


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def write_field(path, field: PhaseSpaceField) -> tuple[Path, Path]:
    """Write ``field`` as CSV plus a grid sidecar next to it."""
    path = Path(path)
    q, p = field.grid.mesh()
    cplx = field.is_complex
    header = ["q", "p", "value_re", "value_im"] if cplx else ["q", "p", "value"]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for qi, pi, v in zip(q.ravel(), p.ravel(), field.values.ravel()):
            row = [fmt(qi), fmt(pi)]
            row += [fmt(v.real), fmt(v.imag)] if cplx else [fmt(v)]
            writer.writerow(row)
    side = write_json(
        _sidecar(path),
        {"grid": field.grid.to_dict(), "dtype": "complex" if cplx else "real", "columns": header},
    )
    return path, side


def read_field(path) -> PhaseSpaceField:
    path = Path(path)
    meta = read_json(_sidecar(path))
    grid = PhaseSpaceGrid(**meta["grid"])
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.array([[float(x) for x in row] for row in reader])
    if header != meta["columns"] or rows.shape[0] != grid.nq * grid.np:
        raise InvalidParameter(f"{path} does not match its sidecar grid")
    values = rows[:, 2] + 1j * rows[:, 3] if meta["dtype"] == "complex" else rows[:, 2]
    return PhaseSpaceField(grid, values.reshape(grid.shape))


def write_quadratures(path, qs: QuadratureSet) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "x", "w"])
        for th, row in zip(qs.angles, qs.w):
            for x, w in zip(qs.x, row):
                writer.writerow([fmt(th), fmt(x), fmt(w)])
    return path


def read_quadratures(path) -> QuadratureSet:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["theta", "x", "w"]:
            raise InvalidParameter(f"{path}: expected header theta,x,w")
        rows = np.array([[float(v) for v in row] for row in reader])
    angles = np.unique(rows[:, 0])
    x = rows[rows[:, 0] == rows[0, 0], 1]
    if rows.shape[0] != angles.size * x.size:
        raise InvalidParameter(f"{path}: quadrature table is not rectangular")
    w = np.empty((angles.size, x.size))
    for i, th in enumerate(angles):
        block = rows[rows[:, 0] == th]
        w[i] = block[np.argsort(block[:, 1]), 2]
    return QuadratureSet(angles, np.sort(x), w)


def _directions(spec) -> list[PoincareDirection]:
    if isinstance(spec, dict):
        if "linear_angle_degrees" not in spec:
            raise InvalidParameter("directions object needs 'linear_angle_degrees'")
        return [PoincareDirection.linear_degrees(float(t)) for t in spec["linear_angle_degrees"]]
    return [PoincareDirection.normalized(v) for v in spec]


def polarization_config(doc: dict) -> TwoPortConfig | FourPortConfig:
    """Build a two-port or four-port config from its JSON document."""
    try:
        if "gamma1" in doc:
            kwargs = {k: float(doc[k]) for k in ("gamma1", "gamma2", "gamma3")}
            if "directions" in doc:
                kwargs["directions"] = tuple(_directions(doc["directions"]))
            return FourPortConfig(**kwargs)
        dirs = _directions(doc["directions"])
        if len(dirs) != 2:
            raise InvalidParameter(f"two-port setup needs 2 directions, got {len(dirs)}")
        return TwoPortConfig(float(doc["gamma"]), dirs[0], dirs[1])
    except (KeyError, TypeError) as exc:
        raise InvalidParameter(f"malformed polarization config: {exc}") from exc


def polarization_config_to_json(c: TwoPortConfig | FourPortConfig) -> dict:
    if isinstance(c, TwoPortConfig):
        return {"gamma": c.gamma, "directions": [list(c.d1.n), list(c.d2.n)]}
    return {
        "gamma1": c.gamma1,
        "gamma2": c.gamma2,
        "gamma3": c.gamma3,
        "directions": [list(d.n) for d in c.directions],
    }
