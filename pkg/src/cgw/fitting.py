"""Least-squares fits to truncated Frobenius-type expansions.

The model is a sum of columns delta^e and optionally log(delta)*delta^e
over a geometric ladder of separations.  Columns are scaled to unit norm
before the solve, so the conditioning of the ladder, not the raw exponent
magnitudes, limits accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class SeriesModel:
    """Fit columns: plain exponents plus optional logarithmic exponents."""

    exponents: tuple
    log_exponents: tuple = ()

    def dedupe(self, tol: float = 1e-9) -> "SeriesModel":
        exps = []
        for e in self.exponents:
            if not any(abs(e - f) < tol for f in exps):
                exps.append(e)
        return SeriesModel(tuple(exps), self.log_exponents)

    def design(self, deltas: np.ndarray) -> np.ndarray:
        cols = [deltas ** e for e in self.exponents]
        cols += [np.log(deltas) * deltas ** e for e in self.log_exponents]
        return np.array(cols).T


@dataclass(frozen=True)
class SeriesFit:
    coefficients: np.ndarray       # plain-column coefficients
    log_coefficients: np.ndarray   # logarithmic-column coefficients
    residual: float                # relative rms residual
    model: SeriesModel

    def coefficient(self, exponent: float, tol: float = 1e-9) -> float:
        for e, c in zip(self.model.exponents, self.coefficients):
            if abs(e - exponent) < tol:
                return float(c)
        raise KeyError(f"no column with exponent {exponent}")

    def log_coefficient(self, exponent: float, tol: float = 1e-9) -> float:
        for e, c in zip(self.model.log_exponents, self.log_coefficients):
            if abs(e - exponent) < tol:
                return float(c)
        raise KeyError(f"no log column with exponent {exponent}")


def fit_series(deltas: Sequence[float], values: Sequence[float],
               model: SeriesModel) -> SeriesFit:
    d = np.asarray(deltas, dtype=float)
    y = np.asarray(values, dtype=float)
    model = model.dedupe()
    A = model.design(d)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0.0] = 1.0
    coef, *_ = np.linalg.lstsq(A / norms, y, rcond=None)
    coef = coef / norms
    resid = np.linalg.norm(A @ coef - y)
    scale = np.linalg.norm(y)
    nplain = len(model.exponents)
    return SeriesFit(coef[:nplain], coef[nplain:],
                     float(resid / scale) if scale > 0 else float(resid), model)


def richardson_limit(offsets: Sequence[float], values: Sequence[float],
                     order: int = 2):
    """Polynomial extrapolation to offset 0; returns (limit, residual).

    Used for the kappa-ladder limits: values analytic in the offset, so a
    low-order polynomial fit on a shrinking ladder converges rapidly.
    """
    t = np.asarray(offsets, dtype=float)
    y = np.asarray(values, dtype=float)
    order = min(order, len(t) - 1)
    A = np.vander(t, order + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = np.linalg.norm(A @ coef - y)
    scale = max(np.max(np.abs(y)), 1e-300)
    return float(coef[0]), float(resid / scale)
