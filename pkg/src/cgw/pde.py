"""Finite-difference residuals of the null-state and Ward identities.

All residuals are normalized by the sum of absolute values of the
individual operator terms, so a solution gives a small dimensionless number
regardless of the scale of F.  Central differences with optional Richardson
refinement keep the truncation error at O(h^4) while the quadrature noise
grows only like tol/h^2, giving a wide stable window for the step size.
"""
from __future__ import annotations

from typing import Callable, Sequence


from .config import FDConfig

Evaluator = Callable[[Sequence[float]], float]


def _shift(xs, j, dh):
    out = list(xs)
    out[j] += dh
    return out


def _d1(f: Evaluator, xs, j, h, richardson):
    def central(hh):
        return (f(_shift(xs, j, hh)) - f(_shift(xs, j, -hh))) / (2 * hh)
    if not richardson:
        return central(h)
    return (4 * central(h / 2) - central(h)) / 3


def _d2(f: Evaluator, xs, j, h, richardson, f0=None):
    f0 = f(xs) if f0 is None else f0
    def central(hh):
        return (f(_shift(xs, j, hh)) - 2 * f0 + f(_shift(xs, j, -hh))) / hh ** 2
    if not richardson:
        return central(h)
    return (4 * central(h / 2) - central(h)) / 3


def _d3(f: Evaluator, xs, j, h):
    def central(hh):
        return (f(_shift(xs, j, 2 * hh)) - 2 * f(_shift(xs, j, hh))
                + 2 * f(_shift(xs, j, -hh)) - f(_shift(xs, j, -2 * hh))) / (2 * hh ** 3)
    return central(h)


def _d1d1(f: Evaluator, xs, j, k, h):
    """Mixed second derivative d_j d_k by the 4-point cross stencil."""
    pp = f(_shift(_shift(xs, j, h), k, h))
    pm = f(_shift(_shift(xs, j, h), k, -h))
    mp = f(_shift(_shift(xs, j, -h), k, h))
    mm = f(_shift(_shift(xs, j, -h), k, -h))
    return (pp - pm - mp + mm) / (4 * h ** 2)


def _normalized(terms) -> float:
    scale = sum(abs(t) for t in terms)
    if scale == 0.0:
        return 0.0
    return abs(sum(terms)) / scale


def _step(xs, h_frac):
    return h_frac * min(b - a for a, b in zip(xs, xs[1:]))


def null_state_residual(f: Evaluator, x, j: int, kappa: float,
                        fd: FDConfig = FDConfig()) -> float:
    """Normalized residual of the second-order null-state operator at x_j.

    ``j`` is 1-based.  The operator is
    (kappa/4) d_j^2 + sum_k [ d_k/(x_k - x_j) - ((6-kappa)/2kappa)/(x_k - x_j)^2 ].
    """
    xs = list(x)
    j0 = j - 1
    h = _step(xs, fd.h_frac)
    f0 = f(xs)
    terms = [kappa / 4.0 * _d2(f, xs, j0, h, fd.richardson, f0)]
    for k in range(len(xs)):
        if k == j0:
            continue
        dx = xs[k] - xs[j0]
        terms.append(_d1(f, xs, k, h, fd.richardson) / dx)
        terms.append(-((6.0 - kappa) / (2.0 * kappa)) * f0 / dx ** 2)
    return _normalized(terms)


def ward_residuals(f: Evaluator, x, kappa: float,
                   fd: FDConfig = FDConfig()) -> tuple:
    """Normalized residuals of the three conformal Ward identities.

    Each identity is normalized by the summed magnitudes of its elementary
    pieces (derivative terms and weight terms separately), so a residual
    stays meaningful even when single terms vanish on their own.
    """
    xs = list(x)
    h = _step(xs, fd.h_frac)
    f0 = f(xs)
    d1 = [_d1(f, xs, k, h, fd.richardson) for k in range(len(xs))]
    w = (6.0 - kappa) / (2.0 * kappa)
    translation = _normalized(d1)
    dilation = _normalized([xs[k] * d1[k] for k in range(len(xs))]
                           + [w * f0] * len(xs))
    special = _normalized([xs[k] ** 2 * d1[k] for k in range(len(xs))]
                          + [2.0 * w * xs[k] * f0 for k in range(len(xs))])
    return translation, dilation, special


def phi13_residual(f: Evaluator, x, j: int, kappa: float,
                   fd: FDConfig = FDConfig()) -> float:
    """Normalized residual of the third-order operator tied to the (1,3) slot.

    (2/kappa) d_j^3
      + 2 sum_k [ d_k/(x_k-x_j) - (kappa/2-1)/(x_k-x_j)^2 ] d_j
      - (kappa/2-1) sum_k [ d_k/(x_k-x_j)^2 - (kappa-2)/(x_k-x_j)^3 ].
    The third-derivative stencil leaves a noise floor near 1e-3 normalized.
    """
    xs = list(x)
    j0 = j - 1
    h = _step(xs, fd.h_frac)
    f0 = f(xs)
    dj = _d1(f, xs, j0, h, fd.richardson)
    lam = kappa / 2.0 - 1.0
    terms = [2.0 / kappa * _d3(f, xs, j0, h)]
    for k in range(len(xs)):
        if k == j0:
            continue
        dx = xs[k] - xs[j0]
        terms.append(2.0 * _d1d1(f, xs, j0, k, h) / dx)
        terms.append(-2.0 * lam * dj / dx ** 2)
        terms.append(-lam * _d1(f, xs, k, h, fd.richardson) / dx ** 2)
        terms.append(lam * (kappa - 2.0) * f0 / dx ** 3)
    return _normalized(terms)
