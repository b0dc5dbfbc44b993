"""Quadrature rules for the contour integrals.

tanh-sinh nodes handle the algebraic endpoint singularities of the simple
upper-half-plane arcs; Gauss-Legendre handles the smooth legs of the
endpoint-loop (Pochhammer) representation.  Nodes carry both t and 1-t so
integrands can form endpoint distances without cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Rule:
    t: np.ndarray       # nodes in (0, 1)
    one_minus_t: np.ndarray  # 1 - t, computed without cancellation
    w: np.ndarray       # weights for int_0^1


@lru_cache(maxsize=None)
def tanh_sinh(level: int) -> Rule:
    """Double-exponential rule on (0, 1); node count roughly 2^(level+2)."""
    h = 2.0 ** (1 - level)
    kmax = int(math.ceil(6.1 / h))
    k = np.arange(-kmax, kmax + 1)
    s = 0.5 * math.pi * np.sinh(k * h)
    # t = (1 + tanh s)/2 and 1 - t = (1 - tanh s)/2, each via exp to keep
    # full precision near its own endpoint
    with np.errstate(over="ignore"):
        t = 1.0 / (1.0 + np.exp(-2.0 * s))
        omt = 1.0 / (1.0 + np.exp(2.0 * s))
    sech2 = 4.0 * np.exp(-2.0 * np.abs(s)) / (1.0 + np.exp(-2.0 * np.abs(s))) ** 2
    w = h * 0.25 * math.pi * np.cosh(k * h) * sech2
    keep = (t > 0.0) & (omt > 0.0) & (w > 1e-300) & np.isfinite(w)
    r = Rule(t[keep], omt[keep], w[keep])
    for arr in (r.t, r.one_minus_t, r.w):
        arr.setflags(write=False)
    return r


@lru_cache(maxsize=None)
def gauss(npts: int) -> Rule:
    x, w = np.polynomial.legendre.leggauss(npts)
    t = 0.5 * (x + 1.0)
    r = Rule(t, 1.0 - t, 0.5 * w)
    for arr in (r.t, r.one_minus_t, r.w):
        arr.setflags(write=False)
    return r


@lru_cache(maxsize=None)
def jacobi(npts: int, beta: float) -> Rule:
    """Gauss-Jacobi rule absorbing t^beta (1-t)^beta on (0, 1).

    Weights are for int_0^1 t^b (1-t)^b f(t) dt, so callers must divide the
    t^b(1-t)^b part out of their integrand (conveniently done in log space).
    """
    from scipy.special import roots_jacobi
    x, w = roots_jacobi(npts, beta, beta)
    t = 0.5 * (x + 1.0)
    omt = 0.5 * (1.0 - x)
    r = Rule(t, omt, w * 2.0 ** (-2.0 * beta - 1.0))
    for arr in (r.t, r.one_minus_t, r.w):
        arr.setflags(write=False)
    return r


class QuadratureError(RuntimeError):
    """Raised when the error estimate stays above the requested tolerance."""
