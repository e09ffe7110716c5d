"""Least-squares slope fitting in log2 coordinates, with verdicts.

All empirical decay claims are tested as fitted-slope inequalities
against a predicted bound slope; constants are never asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FitError


def fit_log2_slope(xs, values) -> tuple[float, float, float]:
    """Fit log2(values) ~ slope * x + intercept.

    Returns (slope, intercept, residual_rms).  Zero or negative values
    are rejected; fewer than two points raise FitError.
    """
    xs = np.asarray(xs, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if xs.size != values.size or xs.size < 2:
        raise FitError(f"need at least 2 samples, got {xs.size}")
    if np.any(values <= 0):
        raise FitError("values must be positive for a log fit")
    y = np.log2(values)
    coeff, res = np.polyfit(xs, y, 1), None
    slope, intercept = float(coeff[0]), float(coeff[1])
    resid = y - (slope * xs + intercept)
    return slope, intercept, float(np.sqrt(np.mean(resid**2)))


@dataclass
class DecayFitReport:
    """One fitted decay slope with its predicted bound.

    The verdict is deterministic from the stored numbers:
    slope <= bound_slope + tol.  Raw samples are retained so reports can
    be re-derived offline.
    """

    axis: str
    xs: list[float]
    log2_values: list[float]
    slope: float
    intercept: float
    residual_rms: float
    bound_slope: float | None = None
    tol: float = 0.3
    two_sided: bool = False
    label: str = ""

    @classmethod
    def from_samples(cls, axis, xs, values, bound_slope=None, tol=0.3,
                     two_sided=False, label=""):
        slope, intercept, rms = fit_log2_slope(xs, values)
        return cls(axis=axis, xs=[float(x) for x in xs],
                   log2_values=[float(v) for v in np.log2(values)],
                   slope=slope, intercept=intercept, residual_rms=rms,
                   bound_slope=bound_slope, tol=tol, two_sided=two_sided,
                   label=label)

    @property
    def verdict(self) -> bool | None:
        if self.bound_slope is None:
            return None
        if self.two_sided:
            return abs(self.slope - self.bound_slope) <= self.tol
        return self.slope <= self.bound_slope + self.tol

    def to_dict(self) -> dict:
        d = {
            "axis": self.axis,
            "label": self.label,
            "xs": self.xs,
            "log2_values": self.log2_values,
            "slope": self.slope,
            "intercept": self.intercept,
            "residual_rms": self.residual_rms,
        }
        if self.bound_slope is not None:
            d["bound_slope"] = self.bound_slope
            d["tol"] = self.tol
            d["two_sided"] = self.two_sided
            d["verdict"] = self.verdict
        return d
