"""Two-point collapse expansions and interval classification.

Near x_{i+1} = x_i every solution is a sum of two Frobenius series with
indicial powers 1 - 6/kappa and 2/kappa; when 8/kappa is an odd integer a
logarithmic term rides on the second series.  The fitted leading
coefficients (A0, B0, C0) drive the interval taxonomy: vanishing A0 (and C0
in the logarithmic case) marks a two-leg interval, a vanishing second
series marks an identity interval, and the multiple-SLE classification
reads the decomposition over the connectivity weights instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .config import LadderConfig, RunConfig
from .diagrams import catalan, enumerate_connectivities
from .limits import _ladder_values, _local_gap, limit_model
from .fitting import SeriesModel, fit_series
from .meander import EightOverKappaClass, classify_eight_over_kappa

Evaluator = Callable[[Sequence[float]], float]


class SleIntervalType(Enum):
    CONTRACTIBLE = "contractible"
    PROPAGATING = "propagating"
    MIXED = "mixed"
    INDETERMINATE = "indeterminate"


class CftIntervalType(Enum):
    TWO_LEG = "two_leg"
    IDENTITY = "identity"
    NEITHER = "neither"
    UNDEFINED_IDENTITY = "undefined_identity"  # 8/kappa odd
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class FrobeniusFit:
    a0: float
    a1: float
    b0: float
    c0: Optional[float]          # present only when 8/kappa is an odd integer
    indicial_powers: tuple       # (1 - 6/kappa, 2/kappa)
    residual: float
    scale: float                 # largest fitted coefficient, for thresholds


@dataclass(frozen=True)
class IntervalClassification:
    sle_type: SleIntervalType
    cft_type: CftIntervalType
    fit: Optional[FrobeniusFit]        # None for the wrap-around interval
    coefficients: Optional[np.ndarray] = None


def fit_expansion(f: Evaluator, xs, i: int, kappa: float,
                  ladder: LadderConfig = LadderConfig(),
                  order: int = 2) -> FrobeniusFit:
    """Least-squares Frobenius fit of delta^{6/kappa-1} f at interval i.

    The column set follows the 8/kappa class: the first series is truncated
    for even integers and a log(delta) column is added for odd ones.
    ``order`` is the truncation depth of each series.
    """
    xs = [float(v) for v in xs]
    if not 1 <= i <= len(xs) - 1:
        raise ValueError("collapse fits need an interior interval")
    model = limit_model(kappa, order)
    deltas = ladder.deltas(_local_gap(xs, i))
    values = _ladder_values(f, xs, i, deltas, kappa)
    fit = fit_series(deltas, values, model)
    r = 8.0 / kappa
    cls = classify_eight_over_kappa(kappa)
    a1 = fit.coefficient(1.0) if any(abs(e - 1.0) < 1e-9 for e in fit.model.exponents) else 0.0
    c0 = fit.log_coefficient(r - 1.0) if cls is EightOverKappaClass.ODD_INTEGER else None
    a0, b0 = fit.coefficient(0.0), fit.coefficient(r - 1.0)
    scale = max(abs(a0), abs(a1), abs(b0), abs(c0) if c0 is not None else 0.0)
    return FrobeniusFit(
        a0=a0, a1=a1, b0=b0, c0=c0,
        indicial_powers=(1.0 - 6.0 / kappa, 2.0 / kappa),
        residual=fit.residual, scale=scale)


def leading_exponent(f: Evaluator, xs, i: int,
                     ladder: LadderConfig = LadderConfig()) -> float:
    """Free power-law exponent of f as the interval (i, i+1) collapses.

    Independent of the model dictionary: consecutive-rung log-slopes are
    accelerated by Aitken's delta-squared, so no indicial power is assumed.
    """
    xs = [float(v) for v in xs]
    deep = LadderConfig(delta0_frac=ladder.delta0_frac, count=max(ladder.count, 10),
                       shrink=ladder.shrink, residual_tol=ladder.residual_tol,
                       stability_tol=ladder.stability_tol)
    deltas = deep.deltas(_local_gap(xs, i))
    i0 = i - 1
    vals = []
    for d in deltas:
        ys = list(xs)
        ys[i0 + 1] = ys[i0] + d
        vals.append(f(ys))
    slopes = [math.log(abs(vals[k] / vals[k + 1])) / math.log(deep.shrink)
              for k in range(len(vals) - 1)]
    s0, s1, s2 = slopes[-3], slopes[-2], slopes[-1]
    denom = (s2 - s1) - (s1 - s0)
    if abs(denom) < 1e-14:
        return s2
    return s2 - (s2 - s1) ** 2 / denom


def conditioned_limits_check(f, xs, i: int, kappa: float, config=None) -> dict:
    """Summary numbers for the probability-collapse criterion."""
    from .config import RunConfig

    config = config or RunConfig()
    lim = conditioned_probability_limits(f, xs, i, kappa, config.ladder)
    q_error = float(np.max(np.abs(lim.contractible_limits - lim.reduced_probs)))
    prop_max = float(np.max(np.abs(lim.propagating_limits))) \
        if lim.propagating_limits.size else 0.0
    return {"q_error": q_error, "prop_max": prop_max}


def detect_log_term(f: Evaluator, xs, i: int, kappa: float,
                    ladder: LadderConfig = LadderConfig()) -> float:
    """Fitted log-column coefficient with the log column forced into the model.

    Used to confirm the absence of logarithms away from the odd-integer
    speeds; returns the coefficient relative to the ladder scale.
    """
    xs = [float(v) for v in xs]
    r = 8.0 / kappa
    base = limit_model(kappa)
    model = SeriesModel(base.exponents, tuple(sorted(set(base.log_exponents) | {r - 1.0})))
    deltas = ladder.deltas(_local_gap(xs, i))
    values = _ladder_values(f, xs, i, deltas, kappa)
    fit = fit_series(deltas, values, model)
    scale = float(np.max(np.abs(values)))
    return fit.log_coefficient(r - 1.0) / scale if scale > 0 else 0.0


def classify_interval(f, xs, i: int, kappa: float,
                      config: Optional[RunConfig] = None,
                      coefficients: Optional[Sequence[float]] = None,
                      ladder: Optional[LadderConfig] = None,
                      coef_floor: float = 0.0) -> IntervalClassification:
    """Joint multiple-SLE / CFT classification of the interval (x_i, x_{i+1}).

    The SLE side needs the decomposition a_sigma = [L_sigma] f; pass it via
    ``coefficients`` (canonical enumeration) or let it be computed.  The
    CFT side reads the Frobenius fit.  Coefficients within the indeterminate
    band of the threshold yield explicit INDETERMINATE verdicts.

    ``coef_floor`` raises the scale-relative zero threshold when f itself is
    only known to limited accuracy (kappa-ladder evaluators at degenerate
    speeds); the default keeps the exact-dichotomy band.
    """
    from .weights import decompose  # local import to avoid a cycle

    config = config or RunConfig()
    ladder = ladder or config.ladder
    xs = [float(v) for v in xs]
    n_arcs = len(xs) // 2
    if coefficients is None:
        coefficients = decompose(f, xs, kappa, ladder)
    a = np.asarray(coefficients, dtype=float)

    # sort into the interval-anchored order: contractible block first
    anchored = enumerate_connectivities(n_arcs, i)
    canonical = enumerate_connectivities(n_arcs)
    order = [canonical.index(d) for d in anchored]
    a_anch = a[order]
    c_prev = catalan(n_arcs - 1) if n_arcs > 1 else 1
    scale = float(np.max(np.abs(a))) or 1.0
    thr = max(config.zero_coef_rel, coef_floor) * scale
    band = config.indeterminate_factor * thr

    def block_state(vals):
        big = np.max(np.abs(vals)) if len(vals) else 0.0
        if big < thr:
            return "zero"
        if big < band:
            return "ambiguous"
        return "nonzero"

    contract = block_state(a_anch[:c_prev])
    propagate = block_state(a_anch[c_prev:])
    if "ambiguous" in (contract, propagate):
        sle = SleIntervalType.INDETERMINATE
    elif propagate == "zero" and contract == "nonzero":
        sle = SleIntervalType.CONTRACTIBLE
    elif contract == "zero" and propagate == "nonzero":
        sle = SleIntervalType.PROPAGATING
    else:
        sle = SleIntervalType.MIXED

    if i == len(xs):
        # wrap-around interval: only the two-leg criterion is available,
        # through the scaled at-infinity limit of the decomposition blocks
        if sle is SleIntervalType.PROPAGATING:
            cft = CftIntervalType.TWO_LEG
        elif classify_eight_over_kappa(kappa) is EightOverKappaClass.ODD_INTEGER:
            cft = CftIntervalType.UNDEFINED_IDENTITY
        else:
            cft = CftIntervalType.INDETERMINATE
        return IntervalClassification(sle, cft, None, a)

    # a deeper dictionary and ladder push series-truncation leak below the
    # zero band, which plain collapse fits do not need
    deep = LadderConfig(delta0_frac=ladder.delta0_frac,
                        count=max(ladder.count, 9), shrink=ladder.shrink,
                        residual_tol=ladder.residual_tol,
                        stability_tol=ladder.stability_tol)
    fit = fit_expansion(f, xs, i, kappa, deep, order=3)
    cls = classify_eight_over_kappa(kappa)
    fthr = max(config.zero_coef_rel, coef_floor) * max(fit.scale, 1e-300)
    fband = config.indeterminate_factor * fthr

    def state(v):
        if v is None:
            return "zero"
        if abs(v) < fthr:
            return "zero"
        if abs(v) < fband:
            return "ambiguous"
        return "nonzero"

    sa, sb, sc = state(fit.a0), state(fit.b0), state(fit.c0)
    if "ambiguous" in (sa, sb, sc):
        cft = CftIntervalType.INDETERMINATE
    elif sa == "zero" and sc == "zero":
        cft = CftIntervalType.TWO_LEG
    elif cls is EightOverKappaClass.ODD_INTEGER:
        cft = CftIntervalType.UNDEFINED_IDENTITY
    elif sb == "zero" and sa == "nonzero":
        cft = CftIntervalType.IDENTITY
    else:
        cft = CftIntervalType.NEITHER
    return IntervalClassification(sle, cft, fit, a)


@dataclass(frozen=True)
class ConditionedLimits:
    contractible_limits: np.ndarray   # fitted lim P_sigma, anchored order block
    reduced_probs: np.ndarray         # Q_sigma from the reduced system
    propagating_limits: np.ndarray    # fitted lim P_sigma, must vanish
    lambda_ratios: np.ndarray         # normalized propagating-block ratios


def conditioned_probability_limits(f, xs, i: int, kappa: float,
                                   ladder: LadderConfig = LadderConfig(),
                                   rungs: int = 4) -> ConditionedLimits:
    """Limits of the crossing probabilities as the interval (i, i+1) closes.

    The contractible block tends to the reduced-system distribution Q and
    the propagating block tends to zero; the Lambda-ratios report the
    normalized propagating-block weights on the way down.
    """
    from .weights import crossing_probabilities  # local import, cycle

    xs = [float(v) for v in xs]
    n_arcs = len(xs) // 2
    if not 1 <= i <= len(xs) - 1:
        raise ValueError("collapse limits need an interior interval")
    anchored = enumerate_connectivities(n_arcs, i)
    canonical = enumerate_connectivities(n_arcs)
    order = [canonical.index(d) for d in anchored]
    c_prev = catalan(n_arcs - 1) if n_arcs > 1 else 1
    i0 = i - 1

    deltas = ladder.deltas(_local_gap(xs, i))[:rungs]
    rows = []
    for d in deltas:
        ys = list(xs)
        ys[i0 + 1] = ys[i0] + d
        probs = crossing_probabilities(f, ys, kappa, ladder=ladder).probs
        rows.append(probs[order])
    rows = np.array(rows)
    limits = np.empty(rows.shape[1])
    for col in range(rows.shape[1]):
        fit = fit_series(deltas, rows[:, col],
                         SeriesModel((0.0, 1.0, 8.0 / kappa - 1.0)))
        limits[col] = fit.coefficient(0.0)

    # reduced-system oracle: collapse f exactly, then redo the distribution
    reduced = f.reduce_at_interval(i)
    ys = xs[:i0] + xs[i0 + 2:]
    q = crossing_probabilities(reduced, ys, kappa, ladder=ladder).probs
    # map reduced canonical order onto the anchored contractible block
    red_diags = enumerate_connectivities(n_arcs - 1)
    block = [d.remove_arc(i0, i0 + 1) for d in anchored[:c_prev]]
    q_mapped = np.array([q[red_diags.index(d)] for d in block])

    prop = rows[-1, c_prev:]
    lam = prop / np.sum(np.abs(prop)) if np.sum(np.abs(prop)) > 0 else prop
    return ConditionedLimits(limits[:c_prev], q_mapped, limits[c_prev:], lam)
