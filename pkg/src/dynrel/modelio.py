"""JSON model-file schema (version 1) and loaders.

Continuous files carry ``{"v": 1, "A": [[..]], "B": [[..]], "C": [[..]]}``
with optional ``"D"`` (needed only for general transfer-function inputs)
and optional ``"labels"``. Sampled files carry
``{"v": 1, "Ad": [[..]], "Qd": [[..]] or "Bd": [[..]], "Cd": [[..]], "h": ..}``;
when both ``Qd`` and ``Bd`` are present, ``Qd`` wins.
"""

import json
import numbers
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ParseError, SchemaVersionUnsupported
from .kernels import DEFAULT_TOL, Tolerances
from .lti import CtModel, StateSpace, validate_ct_model
from .sampling import SampledModel

__all__ = [
    "SCHEMA_VERSION",
    "ContinuousModelFile",
    "SampledModelFile",
    "parse_model",
    "build_ct_model",
    "build_state_space",
    "build_sampled_model",
]

SCHEMA_VERSION = 1


@dataclass
class ContinuousModelFile:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray | None
    labels: tuple[str, ...] | None


@dataclass
class SampledModelFile:
    Ad: np.ndarray
    Qd: np.ndarray | None
    Bd: np.ndarray | None
    Cd: np.ndarray
    h: float | None


def _load_text(src) -> str:
    if isinstance(src, Path):
        try:
            return src.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read model file {src}: {exc}") from exc
    text = str(src)
    if text.lstrip().startswith("{"):
        return text
    try:
        return Path(text).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read model file {text}: {exc}") from exc


def _matrix_field(data: dict, field: str, required: bool = True) -> np.ndarray | None:
    raw = data.get(field)
    if raw is None:
        if required:
            raise DimensionMismatch(f"{field}: required matrix field is missing")
        return None
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise DimensionMismatch(f"{field}: must be a non-empty list of rows")
    width = len(raw[0])
    for i, row in enumerate(raw):
        if len(row) != width:
            raise DimensionMismatch(
                f"{field}: row {i} has {len(row)} entries, expected {width}")
        for j, entry in enumerate(row):
            if isinstance(entry, bool) or not isinstance(entry, numbers.Real):
                raise ParseError(f"{field}[{i}][{j}]: not a real number: {entry!r}")
    if width == 0:
        raise DimensionMismatch(f"{field}: rows must be non-empty")
    arr = np.array(raw, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{field}: contains non-finite entries")
    return arr


def _require_shape(name: str, arr: np.ndarray, rows: int | None, cols: int | None):
    r, c = arr.shape
    if rows is not None and r != rows:
        raise DimensionMismatch(f"{name}: expected {rows} rows, got {r}")
    if cols is not None and c != cols:
        raise DimensionMismatch(f"{name}: expected {cols} columns, got {c}")


def parse_model(src) -> ContinuousModelFile | SampledModelFile:
    """Parse a model file from a path, Path, or raw JSON text.

    Strings starting with ``{`` are treated as JSON text, anything else
    as a filesystem path.
    """
    text = _load_text(src)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("model file must hold a JSON object")
    version = data.get("v")
    if version != SCHEMA_VERSION:
        raise SchemaVersionUnsupported(
            f"schema version {version!r} unsupported; expected {SCHEMA_VERSION}")
    if "A" in data:
        return _parse_continuous(data)
    if "Ad" in data:
        return _parse_sampled(data)
    raise ParseError("model file carries neither 'A' (continuous) nor 'Ad' (sampled)")


def _parse_continuous(data: dict) -> ContinuousModelFile:
    a = _matrix_field(data, "A")
    _require_shape("A", a, a.shape[0], a.shape[0])
    n = a.shape[0]
    b = _matrix_field(data, "B")
    _require_shape("B", b, n, None)
    c = _matrix_field(data, "C")
    _require_shape("C", c, None, n)
    d = _matrix_field(data, "D", required=False)
    if d is not None:
        _require_shape("D", d, c.shape[0], b.shape[1])
    labels = data.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ParseError("labels: must be a list of strings")
        if len(labels) != c.shape[0]:
            raise DimensionMismatch(
                f"labels: expected {c.shape[0]} entries, got {len(labels)}")
        labels = tuple(labels)
    return ContinuousModelFile(A=a, B=b, C=c, D=d, labels=labels)


def _parse_sampled(data: dict) -> SampledModelFile:
    ad = _matrix_field(data, "Ad")
    _require_shape("Ad", ad, ad.shape[0], ad.shape[0])
    n = ad.shape[0]
    qd = _matrix_field(data, "Qd", required=False)
    bd = _matrix_field(data, "Bd", required=False)
    if qd is None and bd is None:
        raise DimensionMismatch("Qd: sampled model needs either 'Qd' or 'Bd'")
    if qd is not None:
        _require_shape("Qd", qd, n, n)
    if bd is not None:
        _require_shape("Bd", bd, n, None)
    cd = _matrix_field(data, "Cd")
    _require_shape("Cd", cd, None, n)
    h = data.get("h")
    if h is not None:
        if isinstance(h, bool) or not isinstance(h, numbers.Real) or not h > 0:
            raise ParseError(f"h: must be a positive number, got {h!r}")
        h = float(h)
    return SampledModelFile(Ad=ad, Qd=qd, Bd=bd, Cd=cd, h=h)


def build_ct_model(mf: ContinuousModelFile, tol: Tolerances = DEFAULT_TOL) -> CtModel:
    """Validate a continuous model file into a CtModel (D must be absent
    or zero)."""
    ss = StateSpace(mf.A, mf.B, mf.C, mf.D)
    return validate_ct_model(ss, tol, labels=mf.labels)


def build_state_space(mf: ContinuousModelFile) -> StateSpace:
    """Read a continuous file as a plain realization (D allowed)."""
    return StateSpace(mf.A, mf.B, mf.C, mf.D)


def build_sampled_model(
    mf: SampledModelFile,
    h: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> SampledModel:
    """Build a SampledModel from a sampled file; ``h`` overrides the
    file's period when given."""
    period = h if h is not None else mf.h
    if period is None:
        raise ParseError("h: sampling period missing from file and command line")
    if mf.Qd is not None:
        return SampledModel.from_intensity(mf.Ad, mf.Qd, mf.Cd, period, tol)
    return SampledModel.from_factor(mf.Ad, mf.Bd, mf.Cd, period)
