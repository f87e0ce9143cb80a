"""Profile ingestion, parameter files and plot-data emission.

Profiles are a UTF-8 CSV with header ``y,c`` plus an optional JSON sidecar::

    {"name": "Run 10", "h": 0.172, "y_r": 0.004, "c_r": 5.2, "surface_sample": false}

Parameter files follow schema 1::

    {"schema": 1, "alpha": 0.5, "lambda0": ..., "lambda1": ..., "a": ...,
     "c_m_hat": ..., "y_r": ..., "h": ..., "c_r": ..., "fit_objective": ...,
     "flags": [...]}
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .baselines import baseline_profile
from .entropy import MultiplierPair
from .errors import (
    DataError,
    MissingDepth,
    NonMonotoneHeights,
    NumericalError,
    ParseError,
    SchemaVersionMismatch,
)
from .profile import (
    FdeModelParameters,
    FlowGeometry,
    concentration_profile_normalized,
    hypothetical_cdf_normalized,
)
from .series import cdf_two_term

SCHEMA_VERSION = 1
NUMERIC_FIELDS = ("alpha", "lambda0", "lambda1", "a", "c_m_hat", "y_r", "h", "c_r", "fit_objective")


def fmt(x: float) -> str:
    """Format a number with 17 significant digits (round-trips a double)."""
    return format(float(x), ".17g")


@dataclass(frozen=True, eq=False)
class SedimentProfileDataset:
    name: str
    y: np.ndarray
    c: np.ndarray
    geometry: FlowGeometry
    provenance: str = ""
    surface_sample: bool = False

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        c = np.asarray(self.c, dtype=float).ravel()
        if y.shape != c.shape:
            raise DataError("height and concentration columns differ in length")
        if np.any(np.diff(y) <= 0):
            raise NonMonotoneHeights("heights must be strictly increasing")
        if np.any(c < 0):
            raise DataError("concentrations must be non-negative")
        g = self.geometry
        tol = 1e-12 * max(1.0, abs(g.h))
        if y.size and (y[0] < g.y_r - tol or y[-1] > g.h + tol):
            raise DataError(f"samples must lie in [y_r, h] = [{g.y_r}, {g.h}]")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "c", c)

    def __len__(self):
        return self.y.size

    def normalized(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.geometry
        y_hat = np.clip((self.y - g.y_r) / (g.h - g.y_r), 0.0, 1.0)
        return y_hat, self.c / g.c_r

    @property
    def surface_index(self) -> Optional[int]:
        return len(self) - 1 if self.surface_sample else None


def _read_samples(csv_path):
    path = Path(csv_path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    ys, cs = [], []
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["y", "c"]:
            raise ParseError(f"{path}: line 1: expected header 'y,c', got {header}")
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ParseError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
            try:
                y, c = float(row[0]), float(row[1])
            except ValueError:
                raise ParseError(f"{path}: line {line}: non-numeric value in {','.join(row)!r}") from None
            if not (math.isfinite(y) and math.isfinite(c)):
                raise ParseError(f"{path}: line {line}: non-finite value")
            ys.append(y)
            cs.append(c)
    return path, np.array(ys), np.array(cs)


def _read_metadata(metadata_path):
    if metadata_path is None:
        return {}
    path = Path(metadata_path)
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(meta, dict):
        raise ParseError(f"{path}: metadata must be a JSON object")
    for key in ("h", "y_r", "c_r"):
        if key in meta and meta[key] is not None and not isinstance(meta[key], (int, float)):
            raise ParseError(f"{path}: metadata field {key!r} must be a number")
    return meta


def load_profile(csv_path, metadata_path=None, *, h=None, y_r=None, c_r=None) -> SedimentProfileDataset:
    """Read a ``y,c`` profile and apply the reference-level defaults.

    ``y_r`` defaults to the lowest sampled height and ``c_r`` to the
    concentration measured there.  ``h`` comes from the metadata (or the
    keyword), otherwise from a final sample flagged as (or measured at zero
    concentration at) the surface.  Keyword values override the metadata.
    """
    path, y, c = _read_samples(csv_path)
    meta = _read_metadata(metadata_path)
    if y.size == 0:
        raise DataError(f"{path}: no samples")
    if np.any(np.diff(y) <= 0):
        bad = int(np.flatnonzero(np.diff(y) <= 0)[0]) + 3
        raise NonMonotoneHeights(f"{path}: line {bad}: heights must be strictly increasing")
    if np.any(c < 0):
        raise DataError(f"{path}: concentrations must be non-negative")

    h = h if h is not None else meta.get("h")
    y_r = y_r if y_r is not None else meta.get("y_r")
    c_r = c_r if c_r is not None else meta.get("c_r")
    surface_flag = meta.get("surface_sample")
    if h is None:
        if surface_flag or (surface_flag is None and c[-1] == 0):
            h = float(y[-1])
        else:
            raise MissingDepth(
                f"{path}: flow depth h is not given and the last sample is not at the surface")
    h = float(h)
    y_r = float(y[0]) if y_r is None else float(y_r)
    if c_r is None:
        match = np.flatnonzero(np.abs(y - y_r) <= 1e-12 * max(1.0, abs(y_r)))
        if match.size == 0:
            raise DataError(f"{path}: c_r is required when y_r = {y_r} is not a sampled height")
        c_r = float(c[match[0]])
    try:
        geometry = FlowGeometry(h=h, y_r=y_r, c_r=float(c_r))
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if surface_flag is None:
        surface_flag = abs(y[-1] - h) <= 1e-12 * max(1.0, abs(h))
    return SedimentProfileDataset(
        name=str(meta.get("name", path.stem)), y=y, c=c, geometry=geometry,
        provenance=str(path), surface_sample=bool(surface_flag))


def normalize(dataset: SedimentProfileDataset) -> list[tuple[float, float]]:
    """``(y_hat, c_hat)`` pairs: ``(y - y_r)/(h - y_r)`` and ``c/c_r``."""
    y_hat, c_hat = dataset.normalized()
    return list(zip(y_hat.tolist(), c_hat.tolist()))


def denormalize(pairs, geometry: FlowGeometry) -> list[tuple[float, float]]:
    g = geometry
    return [(g.y_r + yh * (g.h - g.y_r), ch * g.c_r) for yh, ch in pairs]


def write_profile(path, y, c) -> None:
    """Write a ``y,c`` CSV readable by :func:`load_profile`."""
    with Path(path).open("w", newline="", encoding="utf-8") as out:
        out.write("y,c\n")
        for yi, ci in zip(y, c):
            out.write(f"{fmt(yi)},{fmt(ci)}\n")


# --------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class ParameterRecord:
    params: FdeModelParameters
    fit_objective: float = 0.0
    flags: tuple[str, ...] = field(default=())
    name: Optional[str] = None
    mean_method: Optional[str] = None

    def to_json_dict(self) -> dict:
        p, g = self.params, self.params.geometry
        out = {
            "schema": SCHEMA_VERSION,
            "alpha": float(p.alpha),
            "lambda0": float(p.lam.lambda0),
            "lambda1": float(p.lam.lambda1),
            "a": float(p.a),
            "c_m_hat": float(p.c_m_hat),
            "y_r": float(g.y_r),
            "h": float(g.h),
            "c_r": float(g.c_r),
            "fit_objective": float(self.fit_objective),
            "flags": list(self.flags),
        }
        if self.name is not None:
            out["name"] = self.name
        if self.mean_method is not None:
            out["mean_method"] = self.mean_method
        return out

    @classmethod
    def from_json_dict(cls, data: dict, source: str = "<parameters>") -> "ParameterRecord":
        if not isinstance(data, dict):
            raise ParseError(f"{source}: parameter file must hold a JSON object")
        if "schema" not in data:
            raise ParseError(f"{source}: missing field 'schema'")
        if data["schema"] != SCHEMA_VERSION:
            raise SchemaVersionMismatch(
                f"{source}: schema {data['schema']!r} is not supported (expected {SCHEMA_VERSION})")
        values = {}
        for key in NUMERIC_FIELDS:
            if key not in data:
                raise ParseError(f"{source}: missing field {key!r}")
            v = data[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParseError(f"{source}: field {key!r} must be a finite number")
            values[key] = float(v)
        flags = data.get("flags", [])
        if not isinstance(flags, list) or not all(isinstance(f, str) for f in flags):
            raise ParseError(f"{source}: field 'flags' must be a list of strings")
        try:
            geometry = FlowGeometry(h=values["h"], y_r=values["y_r"], c_r=values["c_r"])
            params = FdeModelParameters(
                lam=MultiplierPair(values["lambda0"], values["lambda1"]),
                a=values["a"], c_m_hat=values["c_m_hat"], geometry=geometry,
                alpha=values["alpha"])
        except ValueError as exc:
            raise ParseError(f"{source}: {exc}") from None
        return cls(params, values["fit_objective"], tuple(flags),
                   data.get("name"), data.get("mean_method"))


def dumps_parameters(rec: ParameterRecord) -> str:
    return json.dumps(rec.to_json_dict(), indent=2) + "\n"


def save_parameters(rec: ParameterRecord, path) -> None:
    Path(path).write_text(dumps_parameters(rec), encoding="utf-8")


def load_parameters(path) -> ParameterRecord:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return ParameterRecord.from_json_dict(data, str(path))


# --------------------------------------------------------------------------
# plot data

PLOT_COLUMNS = ("y_over_h", "c_hat_observed", "c_hat_fde", "c_hat_rouse",
                "c_hat_shannon", "c_hat_tsallis", "F_hypothetical", "F_estimated")


def plot_rows(dataset: Optional[SedimentProfileDataset], params: FdeModelParameters,
              baselines: Sequence = (), grid_size: int = 101,
              include_samples: bool = False) -> tuple[list[str], list[list[Optional[float]]]]:
    """Tabulate model curves on an even height grid from ``y_r`` to ``h``.

    Observed values (and the estimated cdf computed from them) are filled
    only on rows whose height matches a sample to 1e-12; with
    ``include_samples`` the sample heights are merged into the grid.
    Baseline columns appear only for the baselines passed in.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be at least 2, got {grid_size}")
    g = params.geometry
    y = np.linspace(g.y_r, g.h, int(grid_size))
    if include_samples and dataset is not None:
        y = np.union1d(y, dataset.y)
        keep = np.concatenate(([True], np.diff(y) > 1e-12 * max(1.0, g.h)))
        y = y[keep]
    y_hat = np.clip((y - g.y_r) / (g.h - g.y_r), 0.0, 1.0)

    observed = [None] * y.size
    if dataset is not None:
        for yi, ci in zip(dataset.y, dataset.c):
            hit = np.flatnonzero(np.abs(y - yi) <= 1e-12 * max(1.0, abs(g.h)))
            if hit.size:
                observed[int(hit[0])] = float(ci / g.c_r)

    columns = {
        "y_over_h": (y / g.h).tolist(),
        "c_hat_observed": observed,
        "c_hat_fde": np.atleast_1d(concentration_profile_normalized(y_hat, params)).tolist(),
    }
    for spec in baselines:
        try:
            columns[spec.column] = np.atleast_1d(baseline_profile(spec, y)).tolist()
        except (NumericalError, ValueError):
            columns[spec.column] = _pointwise(spec, y)
    columns["F_hypothetical"] = np.atleast_1d(hypothetical_cdf_normalized(y_hat, params.a)).tolist()
    columns["F_estimated"] = [None if o is None else float(cdf_two_term(o, params.lam))
                               for o in observed]
    header = [name for name in PLOT_COLUMNS if name in columns]
    rows = [[columns[name][i] for name in header] for i in range(y.size)]
    return header, rows


def _pointwise(spec, y):
    out = []
    for yi in y:
        try:
            out.append(float(baseline_profile(spec, yi)))
        except (NumericalError, ValueError):
            out.append(None)
    return out


def write_rows(path, header, rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as out:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join("" if v is None else fmt(v) for v in row) + "\n")


def emit_plot_data(dataset, params, baselines=(), grid_size=101, out_path="plot_data.csv",
                   include_samples=False) -> Path:
    header, rows = plot_rows(dataset, params, baselines, grid_size, include_samples)
    try:
        write_rows(out_path, header, rows)
    except OSError as exc:
        raise DataError(f"cannot write {out_path}: {exc}") from exc
    return Path(out_path)
