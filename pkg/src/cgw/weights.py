"""Connectivity weights, crossing probabilities, and derived constructions.

At a fixed configuration the basis values and the connectivity weights are
related by the meander matrix: F = M_N(n) Pi.  Solving that system pointwise
gives the weights; the dual pairing [L_sigma] Pi_theta = delta then makes
Pi_sigma / F ratios into the conjectured crossing probabilities.  Near the
degenerate speeds the solve is refused and a kappa-ladder limit is used
instead.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Union

import numpy as np

from .config import LadderConfig, QuadConfig, RunConfig
from .diagrams import (ArcDiagram, catalan, cut_map_chi, diagram_index,
                       enumerate_connectivities)
from .evaluators import BasisCombination, basis_value
from .fitting import richardson_limit
from .limits import apply_L
from .meander import MAX_N_ARCS, build_meander_matrix, fugacity, is_exceptional


class SingularSpeedError(RuntimeError):
    """The meander matrix is (near) singular; use the regularized path."""


@dataclass(frozen=True)
class WeightVector:
    """Values of Pi_1..Pi_CN at one configuration, canonical enumeration."""

    values: np.ndarray
    provenance: str                 # solved_from_meander | limit_regularized
    condition_number: float
    basis_values: np.ndarray


@dataclass(frozen=True)
class CrossingDistribution:
    probs: np.ndarray
    partition_value: float
    negative_entries: bool


def basis_vector(xs, kappa: float, quad: Optional[QuadConfig] = None) -> np.ndarray:
    """F_theta(x) over the canonical enumeration."""
    xs = tuple(float(v) for v in xs)
    n_arcs = len(xs) // 2
    return np.array([basis_value(d, kappa, xs, quad=quad)
                     for d in enumerate_connectivities(n_arcs)])


def solve_weights(xs, kappa: float, quad: Optional[QuadConfig] = None,
                  config: Optional[RunConfig] = None) -> WeightVector:
    """Solve M_N(n) Pi = F at the configuration ``xs``.

    Refuses near the determinant zeros; ``regularized_weights`` handles
    those speeds by a kappa-ladder limit.
    """
    config = config or RunConfig()
    xs = tuple(float(v) for v in xs)
    n_arcs = len(xs) // 2
    if n_arcs > MAX_N_ARCS:
        raise ValueError("configuration too large for dense meander solve")
    M = build_meander_matrix(n_arcs, kappa=kappa)
    det = M.determinant()
    scale = max(abs(M.fugacity), 1.0) ** (n_arcs * M.size)
    if abs(det) < config.near_singular_det * scale:
        exc = is_exceptional(kappa, n_arcs)
        raise SingularSpeedError(
            f"meander matrix singular at kappa={kappa}"
            + (f" (q={exc.q}, q'={exc.q_prime})" if exc else ""))
    F = basis_vector(xs, kappa, quad)
    pi = np.linalg.solve(M.entries, F)
    return WeightVector(pi, "solved_from_meander", M.condition_number(), F)


def _auto_dk(xs, base: float = 0.01) -> float:
    """Kappa-ladder step scaled down when the configuration has tiny gaps.

    Coordinate powers like gap^(1-6/kappa) vary in kappa on the scale
    1/|ln gap|, so the extrapolation step must shrink accordingly.
    """
    span = max(xs) - min(xs)
    gap = min(b - a for a, b in zip(xs, xs[1:])) / span
    return base * min(1.0, 2.0 / max(abs(math.log(gap)), 2.0))


def regularized_weights(xs, kappa: float, dk: Optional[float] = None,
                        rungs: int = 3,
                        quad: Optional[QuadConfig] = None) -> WeightVector:
    """Weights at a degenerate speed: solve at kappa +- dk/2^j, extrapolate."""
    xs = tuple(float(v) for v in xs)
    if dk is None:
        dk = _auto_dk(xs)
    offsets, rows = [], []
    for j in range(rungs):
        for sign in (1.0, -1.0):
            k = kappa + sign * dk * 2.0 ** (-j)
            try:
                w = solve_weights(xs, k, quad)
            except SingularSpeedError:
                continue
            offsets.append(k - kappa)
            rows.append(w.values)
    if len(rows) < 4:
        raise SingularSpeedError("no invertible neighbors found for the ladder")
    rows = np.array(rows)
    vals = np.empty(rows.shape[1])
    for col in range(rows.shape[1]):
        vals[col], _ = richardson_limit(offsets, rows[:, col], order=3)
    return WeightVector(vals, "limit_regularized", math.inf, rows[0])


def weight_evaluator(sigma: Union[int, ArcDiagram], kappa: float,
                     n_arcs: Optional[int] = None,
                     quad: Optional[QuadConfig] = None) -> BasisCombination:
    """Pi_sigma as a structured combination: row of M_N^{-1} against the basis."""
    if isinstance(sigma, ArcDiagram):
        n_arcs = sigma.n_arcs
        sigma = diagram_index(sigma)
    if n_arcs is None:
        raise ValueError("n_arcs required when sigma is an index")
    M = build_meander_matrix(n_arcs, kappa=kappa)
    if abs(M.determinant()) < 1e-10:
        raise SingularSpeedError(f"meander matrix singular at kappa={kappa}")
    row = np.linalg.inv(M.entries)[sigma - 1]
    diags = enumerate_connectivities(n_arcs)
    return BasisCombination.of(kappa, {d: float(c) for d, c in zip(diags, row)},
                               quad)


def crossing_probabilities(f, xs, kappa: float,
                           quad: Optional[QuadConfig] = None,
                           ladder: LadderConfig = LadderConfig(),
                           config: Optional[RunConfig] = None) -> CrossingDistribution:
    """Conjectured connectivity distribution of the process with partition f.

    P_sigma = a_sigma Pi_sigma(x) / sum_theta a_theta Pi_theta(x) with
    a_sigma = [L_sigma] f; the normalized form makes the probabilities sum
    to one identically.  Negative entries are reported, never clamped.
    """
    xs = tuple(float(v) for v in xs)
    a = decompose(f, xs, kappa, ladder)
    w = solve_weights(xs, kappa, quad, config)
    terms = a * w.values
    total = float(np.sum(terms))
    if total == 0.0:
        raise ZeroDivisionError("partition function vanishes at this configuration")
    probs = terms / total
    negative = bool(np.any(probs < 0))
    if negative:
        warnings.warn("negative crossing probabilities: the positivity "
                      "conjecture fails for this input", stacklevel=2)
    return CrossingDistribution(probs, total, negative)


def decompose(f, xs, kappa: float, ladder: LadderConfig = LadderConfig()) -> np.ndarray:
    """Coefficients a_sigma = [L_sigma] f over the canonical enumeration."""
    xs = tuple(float(v) for v in xs)
    n_arcs = len(xs) // 2
    return np.array([apply_L(d, f, xs, kappa, ladder)
                     for d in enumerate_connectivities(n_arcs)])


@dataclass(frozen=True)
class ThetaReport:
    """apply_L image of Theta against the expected coefficient pattern."""

    applied: np.ndarray
    expected: np.ndarray
    max_error: float


def build_theta(sigma: int, interval: int, n_arcs: int, kappa: float,
                quad: Optional[QuadConfig] = None) -> BasisCombination:
    """Promote the reduced weight Xi_sigma to N arcs by inserting an interval.

    ``sigma`` indexes the reduced (N-1)-system in its canonical enumeration;
    ``interval`` is the 1-based slot i where the points (x_i, x_{i+1}) are
    inserted.  The result is sum_theta b_{sigma,theta} F_{insert(theta)} with
    b the inverse reduced meander matrix.
    """
    if n_arcs < 2:
        raise ValueError("need n_arcs >= 2 to insert an interval")
    reduced_diags = enumerate_connectivities(n_arcs - 1)
    if not 1 <= sigma <= len(reduced_diags):
        raise ValueError("sigma out of range for the reduced system")
    M = build_meander_matrix(n_arcs - 1, kappa=kappa)
    if abs(M.determinant()) < 1e-10:
        raise SingularSpeedError("reduced meander matrix is singular; "
                                 "use the cut-map form of Theta instead")
    b = np.linalg.inv(M.entries)[sigma - 1]
    terms: Dict[ArcDiagram, float] = {}
    for coeff, d in zip(b, reduced_diags):
        terms[d.insert_arc(interval - 1)] = float(coeff)
    return BasisCombination.of(kappa, terms, quad)


def theta_expected_pattern(sigma: int, interval: int, n_arcs: int) -> np.ndarray:
    """[L_rho] Theta_sigma: n at the matching contractible slot, 1 at each
    rho with chi(rho) = insert(sigma), 0 elsewhere (canonical enumeration;
    the fugacity slot is tagged with nan and filled by the caller)."""
    diags = enumerate_connectivities(n_arcs)
    target = enumerate_connectivities(n_arcs - 1)[sigma - 1].insert_arc(interval - 1)
    a, b = interval - 1, interval % (2 * n_arcs)
    out = np.zeros(len(diags))
    for k, d in enumerate(diags):
        if d.pairing == target.pairing:
            out[k] = math.nan  # the fugacity goes here
        elif not d.contains_arc(a, b):
            image = cut_map_chi(d, interval)
            if image.pairing == target.pairing:
                out[k] = 1.0
    return out


def theta_identity_report(sigma: int, interval: int, n_arcs: int, kappa: float,
                          xs, quad: Optional[QuadConfig] = None,
                          ladder: LadderConfig = LadderConfig()) -> ThetaReport:
    theta = build_theta(sigma, interval, n_arcs, kappa, quad)
    applied = decompose(theta, xs, kappa, ladder)
    expected = theta_expected_pattern(sigma, interval, n_arcs)
    expected = np.where(np.isnan(expected), fugacity(kappa), expected)
    return ThetaReport(applied, expected, float(np.max(np.abs(applied - expected))))


def regularized_basis_element(theta: Union[int, ArcDiagram], xs, kappa: float,
                              dk: Optional[float] = None, rungs: int = 3,
                              quad: Optional[QuadConfig] = None) -> float:
    """lim n(k')^{-1} F_theta(k') as k' -> kappa, for the n = 0 speeds.

    Coordinate powers make the kappa-dependence steep when the configuration
    has a tiny gap (terms like gap^{1-6/k'} vary on the scale 1/|ln gap|),
    so the default ladder step shrinks accordingly and the extrapolation is
    cubic.
    """
    xs = tuple(float(v) for v in xs)
    if isinstance(theta, int):
        theta = enumerate_connectivities(len(xs) // 2)[theta - 1]
    if dk is None:
        dk = _auto_dk(xs)
    offsets, vals = [], []
    for j in range(rungs):
        for sign in (1.0, -1.0):
            k = kappa + sign * dk * 2.0 ** (-j)
            offsets.append(k - kappa)
            vals.append(basis_value(theta, k, xs, quad=quad) / fugacity(k))
    value, resid = richardson_limit(offsets, vals, order=3)
    if resid > 1e-3:
        raise SingularSpeedError(f"kappa-ladder failed to converge ({resid:.1e})")
    return value


def regularized_combination(coeffs: Sequence[float], kappa: float,
                            quad: Optional[QuadConfig] = None):
    """Evaluator for sum_theta coeffs[theta] * F_theta^bullet at an n=0 speed."""
    def f(xs):
        n_arcs = len(list(xs)) // 2
        diags = enumerate_connectivities(n_arcs)
        return sum(c * regularized_basis_element(d, xs, kappa, quad=quad)
                   for c, d in zip(coeffs, diags) if c != 0.0)
    return f


def fusion_power(s: int, kappa: float) -> float:
    """Exponent 2s/kappa absorbed when a one-leg point joins an s-leg cluster."""
    return 2.0 * s / kappa


def multi_collapse_limit(f, xs, kappa: float, max_abs: float = 1e6,
                         ladder: LadderConfig = LadderConfig()):
    """Iterated left-edge collapse x_2 -> x_1, x_3 -> x_2(=x_1), ...

    Step j strips (x_{j+1} - x_j)^{fusion_power(j)}.  Returns (value, exists)
    where ``exists`` reports whether every stepwise ladder stayed bounded
    and stable; the limit exists only for multiples of the rainbow weight.
    """
    n_arcs = len(list(xs)) // 2
    xs = [float(v) for v in xs]
    g = f
    value = None
    for j in range(1, n_arcs):
        power = fusion_power(j, kappa)
        deltas = ladder.deltas(_left_gap(xs))
        vals = []
        for d in deltas:
            ys = list(xs)
            ys[1] = ys[0] + d
            vals.append(d ** (-power) * g(ys))
        vals = np.asarray(vals)
        if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > max_abs:
            return None, False
        # bounded and converging: ratios between rungs must approach 1
        tail = vals[-3:]
        spread = np.max(np.abs(tail - tail[-1]))
        if spread > 0.05 * max(np.max(np.abs(tail)), 1e-12):
            return None, False
        value = float(tail[-1])
        g = _left_collapsed(g, power)
        xs = [xs[0]] + xs[2:]
    return value, True


def _left_gap(xs):
    return (xs[2] - xs[0]) if len(xs) > 2 else (xs[1] - xs[0])


def _left_collapsed(g, power: float, frac: float = 1e-3):
    def h(ys):
        d = frac * (ys[1] - ys[0] if len(ys) > 1 else 1.0)
        zs = [ys[0], ys[0] + d] + list(ys[1:])
        return d ** (-power) * g(zs)
    return h


def rainbow_extended_basis_check(n_arcs: int, kappa: float, xs,
                                 quad: Optional[QuadConfig] = None,
                                 ladder: LadderConfig = LadderConfig()) -> dict:
    """Rank of {v(F_theta)} at a degenerate speed and its repair by the
    rainbow weight computed through the regularized solve."""
    xs = tuple(float(v) for v in xs)
    diags = enumerate_connectivities(n_arcs)
    c_n = catalan(n_arcs)
    images = []
    for d in diags[:-1]:
        comb = BasisCombination.single(kappa, d, quad)
        images.append([apply_L(s, comb, xs, kappa, ladder) for s in diags])
    base_rank = int(np.linalg.matrix_rank(np.array(images), tol=1e-6))
    w = regularized_weights(xs, kappa, quad=quad)
    rainbow_idx = diagram_index(_rainbow(n_arcs))
    v_pi = np.zeros(c_n)
    v_pi[rainbow_idx - 1] = 1.0  # duality: [L_sigma] Pi_rainbow = delta
    extended = int(np.linalg.matrix_rank(np.array(images + [list(v_pi)]), tol=1e-6))
    return {"rank_basis_images": base_rank, "rank_extended": extended,
            "rainbow_index": rainbow_idx, "rainbow_weight_value":
                float(w.values[rainbow_idx - 1])}


def _rainbow(n_arcs: int) -> ArcDiagram:
    return ArcDiagram.from_arcs([(j, 2 * n_arcs - 1 - j) for j in range(n_arcs)])
