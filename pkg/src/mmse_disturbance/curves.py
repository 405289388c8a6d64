"""Curve containers, grid/input spec parsing and CSV output."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .design import load_input, pam, reference_inputs, xa
from .distributions import Gaussian, InputDistribution

NORMALIZATIONS = ("none", "dof", "mmse_dim")
MAX_POINTS = 10_000
CSV_HEADER = ("snr_db", "snr", "value", "normalized_value")


class SpecError(ValueError):
    """Malformed grid or input specification; carries the offending token."""

    def __init__(self, token: str, why: str):
        super().__init__(f"{why}: {token!r}")
        self.token = token


@dataclass(frozen=True, eq=False)
class CurveSeries:
    label: str
    snr: np.ndarray
    values: np.ndarray
    normalization: str = "none"

    def __post_init__(self):
        snr = np.asarray(self.snr, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if snr.shape != values.shape:
            raise ValueError("snr and values must have equal length")
        if np.any(snr < 0) or np.any(np.diff(snr) <= 0):
            raise ValueError("snr values must be nonnegative and strictly increasing")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        object.__setattr__(self, "snr", snr)
        object.__setattr__(self, "values", values)

    def normalized(self) -> np.ndarray:
        """Normalized values; NaN where the normalization is undefined (dof at snr=0)."""
        if self.normalization == "dof":
            half_log = 0.5 * np.log1p(self.snr)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(half_log > 0, self.values / half_log, np.nan)
        if self.normalization == "mmse_dim":
            return self.values * (1.0 + self.snr)
        return self.values.copy()

    def with_normalization(self, normalization: str) -> "CurveSeries":
        return CurveSeries(self.label, self.snr, self.values, normalization)

    def at(self, snr: float) -> float:
        idx = np.flatnonzero(np.isclose(self.snr, snr, rtol=1e-12, atol=0))
        if idx.size == 0:
            raise KeyError(f"{self.label} has no point at snr={snr}")
        return float(self.values[idx[0]])


def _fmt(v: float) -> str:
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return f"{v:.17g}"


def to_csv(series: CurveSeries) -> tuple[str, int]:
    """CSV text of ``series`` and the number of rows whose normalization was skipped."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    norm = series.normalized()
    skipped = 0
    with np.errstate(divide="ignore"):
        snr_db = 10.0 * np.log10(series.snr)
    for d, s, v, nv in zip(snr_db, series.snr, series.values, norm):
        skipped += int(math.isnan(nv))
        w.writerow((_fmt(d), _fmt(s), _fmt(v), _fmt(nv)))
    return buf.getvalue(), skipped


def write_csv(series: CurveSeries, path: Path) -> int:
    text, skipped = to_csv(series)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return skipped


def parse_grid(spec: str) -> np.ndarray:
    """``log:<lo>:<hi>:<count>`` or ``lin:<lo>:<hi>:<count>``."""
    parts = spec.split(":")
    if len(parts) != 4 or parts[0] not in ("log", "lin"):
        raise SpecError(spec, "grid must look like log:<lo>:<hi>:<count> or lin:<lo>:<hi>:<count>")
    kind = parts[0]
    try:
        lo, hi = float(parts[1]), float(parts[2])
    except ValueError:
        raise SpecError(spec, "grid bounds must be numbers") from None
    try:
        count = int(parts[3])
    except ValueError:
        raise SpecError(parts[3], "grid count must be an integer") from None
    if not 2 <= count <= MAX_POINTS:
        raise SpecError(parts[3], f"grid count must lie in [2, {MAX_POINTS}]")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise SpecError(spec, "grid needs finite bounds with lo < hi")
    if kind == "log":
        if lo <= 0:
            raise SpecError(parts[1], "log grid needs a positive lower bound")
        return np.geomspace(lo, hi, count)
    if lo < 0:
        raise SpecError(parts[1], "snr must be nonnegative")
    return np.linspace(lo, hi, count)


def parse_input(spec: str) -> InputDistribution:
    """``gaussian:<var>``, ``pam:<N>``, ``xa:<a>``, a reference name or a catalog file path."""
    catalog = reference_inputs()
    if spec in catalog:
        return catalog[spec]
    kind, sep, arg = spec.partition(":")
    if sep:
        try:
            if kind == "gaussian":
                return Gaussian(float(arg))
            if kind == "pam":
                return pam(int(arg))
            if kind == "xa":
                return xa(float(arg))
        except ValueError as exc:
            raise SpecError(arg, str(exc)) from None
    if os.path.isfile(spec):
        with open(spec) as fh:
            return load_input(fh.read())
    raise SpecError(spec, "unknown input (use gaussian:<v>, pam:<N>, xa:<a>, a reference name or a file)")
