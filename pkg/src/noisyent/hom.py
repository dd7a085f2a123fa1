"""Hong-Ou-Mandel dip: Gaussian model, least-squares fit and simulated scans.

Delay units are whatever the input uses (e.g. stage position in mm).
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import ArgumentError, FitError

MIN_POINTS = 5
MAX_ITER = 500


@dataclass(frozen=True)
class HomFit:
    baseline: float
    visibility: float
    center: float
    width: float
    residual_rms: float = 0.0

    def __post_init__(self):
        if not self.baseline > 0:
            raise ArgumentError("baseline must be positive")
        if not 0 <= self.visibility <= 1:
            raise ArgumentError("visibility must lie in [0, 1]")
        if not self.width > 0:
            raise ArgumentError("width must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class HomCurve:
    delays: np.ndarray
    counts: np.ndarray
    count_errors: Optional[np.ndarray] = None

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=float)
        c = np.asarray(self.counts, dtype=float)
        if d.ndim != 1 or d.shape != c.shape:
            raise ArgumentError("delays and counts must be equal-length 1-D arrays")
        if np.any(c < 0):
            raise ArgumentError("counts must be non-negative")
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "counts", c)
        if self.count_errors is not None:
            e = np.asarray(self.count_errors, dtype=float)
            if e.shape != d.shape or np.any(e <= 0):
                raise ArgumentError("count_errors must be positive and match counts")
            object.__setattr__(self, "count_errors", e)


def hom_model(f: HomFit, delay):
    """baseline * (1 - visibility * exp(-(delay - center)**2 / (2 width**2)))."""
    delay = np.asarray(delay, dtype=float)
    return f.baseline * (1 - f.visibility * np.exp(-((delay - f.center) ** 2) / (2 * f.width**2)))


def _residuals(x, t, y, w):
    b, v, c, s = x
    g = np.exp(-((t - c) ** 2) / (2 * s**2))
    return w * (b * (1 - v * g) - y)


def _jacobian(x, t, y, w):
    b, v, c, s = x
    g = np.exp(-((t - c) ** 2) / (2 * s**2))
    return np.column_stack([
        w * (1 - v * g),
        -w * b * g,
        -w * b * v * g * (t - c) / s**2,
        -w * b * v * g * (t - c) ** 2 / s**3,
    ])


def fit_gaussian_dip(c: HomCurve) -> HomFit:
    """Levenberg-Marquardt fit of :func:`hom_model` to a delay scan.

    Weights are 1/error**2 when ``count_errors`` is given, uniform otherwise.
    Starts from baseline = max count, center = delay of the min count,
    visibility = 1 - min/max and width = a quarter of the scan range.

    Raises:
        FitError: fewer than 5 points, no dip (min >= 0.9 max), or no
            convergence within 500 iterations.
    """
    t, y = c.delays, c.counts
    if t.size < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} points, got {t.size}")
    ymax, ymin = float(y.max()), float(y.min())
    if not ymax > 0 or ymin >= 0.9 * ymax:
        raise FitError("no dip in the data")
    w = np.ones_like(y) if c.count_errors is None else 1.0 / c.count_errors
    span = float(t.max() - t.min())
    x0 = np.array([ymax, 1 - ymin / ymax, t[np.argmin(y)], span / 4])
    res = least_squares(_residuals, x0, jac=_jacobian, args=(t, y, w), method="lm",
                        xtol=1e-8, ftol=1e-15, gtol=1e-15, max_nfev=MAX_ITER * (len(x0) + 1))
    if res.status <= 0 or not np.all(np.isfinite(res.x)):
        raise FitError(f"fit did not converge: {res.message}")
    b, v, cen, s = res.x
    s = abs(s)
    if b <= 0 or s == 0:
        raise FitError("fit converged to a non-physical dip")
    fit = HomFit(float(b), float(np.clip(v, 0.0, 1.0)), float(cen), float(s))
    rms = float(np.sqrt(np.mean((hom_model(fit, t) - y) ** 2)))
    return HomFit(fit.baseline, fit.visibility, fit.center, fit.width, rms)


def simulate_hom_scan(f: HomFit, delays: Sequence[float], rng_seed: int | None = 0) -> HomCurve:
    """Poisson counts around :func:`hom_model`; errors are sqrt(counts), at least 1."""
    rng = np.random.default_rng(rng_seed)
    mean = hom_model(f, delays)
    counts = rng.poisson(mean).astype(float)
    return HomCurve(np.asarray(delays, dtype=float), counts, np.sqrt(np.maximum(counts, 1.0)))


def read_curve_csv(path: str | Path) -> HomCurve:
    """Read a ``delay,counts[,error]`` CSV with a header row."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "delay" not in rows[0] or "counts" not in rows[0]:
        raise ArgumentError(f"{path}: expected header delay,counts[,error]")
    try:
        delays = [float(r["delay"]) for r in rows]
        counts = [float(r["counts"]) for r in rows]
        errors = [float(r["error"]) for r in rows] if "error" in rows[0] and rows[0]["error"] not in (None, "") else None
    except (TypeError, ValueError) as exc:
        raise ArgumentError(f"{path}: {exc}") from exc
    return HomCurve(np.array(delays), np.array(counts), None if errors is None else np.array(errors))


def write_curve_csv(path: str | Path, curve: HomCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        has_err = curve.count_errors is not None
        w.writerow(["delay", "counts"] + (["error"] if has_err else []))
        for i in range(curve.delays.size):
            row = [repr(float(curve.delays[i])), repr(float(curve.counts[i]))]
            if has_err:
                row.append(repr(float(curve.count_errors[i])))
            w.writerow(row)
