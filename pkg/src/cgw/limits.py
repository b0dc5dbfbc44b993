"""Collapse limits and the composed limit functionals.

The elementary limit takes (x_{i+1} - x_i)^{6/kappa - 1} F as x_{i+1} -> x_i
along a geometric ladder of separations and fits the expansion

    A0 + A1 d + A2 d^2 + d^{8/kappa - 1} (B0 + B1 d + ...)
    [+ log d * d^{8/kappa - 1} (C0 + ...)  when 8/kappa is an odd integer]

returning A0.  A composed functional applies one such limit per arc of a
target connectivity.  For structured basis combinations the collapse is
measured numerically at each step and the next function to collapse is the
exact reduced combination, so the composition both measures and checks the
step identities.  A fully numerical nested mode is kept as a cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import LadderConfig
from .diagrams import ArcDiagram, ConnectivityIndex
from .evaluators import BasisCombination, ScalarFunction
from .fitting import SeriesFit, SeriesModel, fit_series
from .meander import EightOverKappaClass, classify_eight_over_kappa

Evaluator = Callable[[Sequence[float]], float]


class CollapseError(RuntimeError):
    """Fit residual or stability check failed during a collapse."""


@dataclass(frozen=True)
class CollapseStep:
    interval: int          # 1-based i: collapse x_{i+1} -> x_i
    kind: str = "adjacent"  # or "at_infinity"


@dataclass(frozen=True)
class LimitSequence:
    """Per-arc collapse order realizing one connectivity."""

    target: ConnectivityIndex
    steps: Tuple[CollapseStep, ...]


def limit_sequence(target) -> LimitSequence:
    """The deterministic collapse order realizing one connectivity."""
    if isinstance(target, ArcDiagram):
        from .diagrams import diagram_index
        target = ConnectivityIndex(diagram_index(target), target.n_arcs)
    return LimitSequence(target, tuple(collapse_sequence(target.diagram())))


def collapse_sequence(diagram: ArcDiagram) -> List[CollapseStep]:
    """Deterministic order: always the leftmost nearest-neighbor arc."""
    steps = []
    d = diagram
    while d.n_arcs >= 1:
        pick = None
        for i, j in d.arcs():
            if j == i + 1:
                pick = (i, j)
                break
        if pick is None:  # cannot happen for noncrossing diagrams
            raise AssertionError("no adjacent arc found")
        steps.append(CollapseStep(pick[0] + 1))
        if d.n_arcs == 1:
            break
        d = d.remove_arc(*pick)
    return steps


def limit_model(kappa: float, order: int = 2) -> SeriesModel:
    """Fit model for delta^{6/kappa-1} F per the 8/kappa class.

    ``order`` truncates both series at delta^order; odd-integer 8/kappa adds
    the log columns and even-integer 8/kappa truncates the first series at
    the analytic cutoff.
    """
    r = 8.0 / kappa
    cls = classify_eight_over_kappa(kappa)
    a_exps: Tuple[float, ...] = tuple(float(m) for m in range(order + 1))
    if cls is EightOverKappaClass.EVEN_INTEGER:
        a_exps = tuple(float(m) for m in range(min(order + 1, max(1, round(r) - 1))))
    b_exps = tuple(r - 1.0 + m for m in range(order + 1))
    log_exps: Tuple[float, ...] = ()
    if cls is EightOverKappaClass.ODD_INTEGER:
        log_exps = (r - 1.0, r)
    return SeriesModel(a_exps + b_exps, log_exps)


def _ladder_values(f: Evaluator, xs: Sequence[float], i: int,
                   deltas: Sequence[float], kappa: float) -> np.ndarray:
    """delta^{6/kappa-1} f at configurations with x_{i+1} = x_i + delta."""
    i0 = i - 1
    vals = []
    for d in deltas:
        ys = list(xs)
        ys[i0 + 1] = ys[i0] + d
        vals.append(d ** (6.0 / kappa - 1.0) * f(ys))
    return np.asarray(vals)


def _local_gap(xs: Sequence[float], i: int) -> float:
    """Room available for the ladder at interval (i, i+1), 1-based.

    Uses the distances to the surviving neighbors, never the collapsing
    coordinate itself (which nested collapses pass in as a placeholder).
    """
    i0 = i - 1
    cands = []
    if i0 + 2 < len(xs):
        cands.append(xs[i0 + 2] - xs[i0])
    if i0 >= 1:
        cands.append(xs[i0] - xs[i0 - 1])
    if not cands:
        cands.append(xs[i0 + 1] - xs[i0])
    return min(cands)


def collapse_fit(f: Evaluator, xs: Sequence[float], i: int, kappa: float,
                 ladder: LadderConfig = LadderConfig()) -> SeriesFit:
    xs = [float(v) for v in xs]
    deltas = ladder.deltas(_local_gap(xs, i))
    values = _ladder_values(f, xs, i, deltas, kappa)
    return fit_series(deltas, values, limit_model(kappa))


def collapse_limit(f: Evaluator, xs: Sequence[float], i: int, kappa: float,
                   ladder: LadderConfig = LadderConfig(),
                   check_independence: bool = False) -> float:
    """Fitted limit of (x_{i+1}-x_i)^{6/kappa-1} F as x_{i+1} -> x_i.

    The limit is independent of the surviving coordinate x_i; with
    ``check_independence`` the fit is repeated at a shifted x_i and the two
    values must agree within the ladder stability tolerance.
    """
    fit = collapse_fit(f, xs, i, kappa, ladder)
    _require_converged(fit, ladder)
    a0 = fit.coefficient(0.0)
    if check_independence:
        ys = list(xs)
        i0 = i - 1
        room = ys[i0] - ys[i0 - 1] if i0 >= 1 else 1.0
        ys[i0] -= 0.25 * room
        other = collapse_fit(f, ys, i, kappa, ladder).coefficient(0.0)
        scale = max(abs(a0), abs(other), 1e-12)
        if abs(a0 - other) > 100 * ladder.stability_tol * scale:
            raise CollapseError(
                f"limit depends on x_i: {a0} vs {other} after shifting")
    return a0


def _require_converged(fit: SeriesFit, ladder: LadderConfig):
    ceiling = max(1e3 * ladder.residual_tol, 1e-3)
    if not np.isfinite(fit.residual) or fit.residual > ceiling:
        raise CollapseError(f"ladder fit residual {fit.residual:.2e} too large")


def collapse_at_infinity(f: Evaluator, inner: Sequence[float], kappa: float,
                         r_ladder: Optional[Sequence[float]] = None) -> float:
    """Fitted limit of (2R)^{6/kappa-1} F(-R, inner..., R) as R -> infinity."""
    inner = [float(v) for v in inner]
    span = max(abs(inner[0]), abs(inner[-1]), 1.0)
    if r_ladder is None:
        r_ladder = [span * 8.0 * 2.0 ** k for k in range(6)]
    vals = []
    for R in r_ladder:
        ys = [-R] + inner + [R]
        vals.append((2.0 * R) ** (6.0 / kappa - 1.0) * f(ys))
    r = 8.0 / kappa
    invR = [1.0 / R for R in r_ladder]
    model = SeriesModel((0.0, 1.0, 2.0, r - 1.0, r))
    fit = fit_series(invR, np.asarray(vals), model)
    return fit.coefficient(0.0)


FunctionLike = Union[BasisCombination, ScalarFunction, Evaluator]


def apply_L(sigma: Union[ArcDiagram, ConnectivityIndex, int], f: FunctionLike,
            xs: Sequence[float], kappa: float,
            ladder: LadderConfig = LadderConfig(),
            numeric_nesting: bool = False) -> float:
    """The composed limit functional [L_sigma] applied to f at x.

    ``sigma`` may be a diagram or an index into the canonical enumeration.
    Structured combinations collapse one interval per step, each step
    measured by a ladder fit; the product of stepwise measurements divided
    by the predicted reduced values telescopes to the functional value and
    stays honest about numerical error.  ``numeric_nesting`` forces the
    fallback that never uses reductions (slow; for cross-checks).
    """
    if isinstance(sigma, int):
        n_arcs = len(list(xs)) // 2
        sigma = ConnectivityIndex(sigma, n_arcs)
    if isinstance(sigma, ConnectivityIndex):
        sigma = sigma.diagram()
    steps = collapse_sequence(sigma)
    if isinstance(f, BasisCombination) and not numeric_nesting:
        return _apply_structured(steps, f, list(xs), kappa, ladder)
    return _apply_numeric(steps, f, list(xs), kappa, ladder)


def _drop_interval(xs: List[float], i: int) -> List[float]:
    i0 = i - 1
    return xs[:i0] + xs[i0 + 2:]


def _apply_structured(steps, f: BasisCombination, xs: List[float],
                      kappa: float, ladder: LadderConfig) -> float:
    value = 1.0
    for step in steps:
        measured = collapse_limit(f, xs, step.interval, kappa, ladder)
        reduced = f.reduce_at_interval(step.interval)
        xs = _drop_interval(xs, step.interval)
        if isinstance(reduced, ScalarFunction):
            return value * measured  # final step: the measurement is the value
        ref = reduced(xs)
        if abs(ref) < 1e-14 * max(1.0, abs(measured)):
            # reduced combination vanishes: the measured limit is the value,
            # and all later limits of the zero function are zero
            return value * measured if abs(measured) > 1e-300 else 0.0
        value *= measured / ref
        f = reduced
    return value


def _apply_numeric(steps, f: Evaluator, xs: List[float], kappa: float,
                   ladder: LadderConfig) -> float:
    """Pure nested-ladder evaluation; exponential cost in the depth."""
    if len(steps) == 1:
        return collapse_limit(f, xs, steps[0].interval, kappa, ladder)
    step, rest = steps[0], steps[1:]

    def collapsed(ys: Sequence[float]) -> float:
        # rebuild a full configuration by inserting the collapsed pair; the
        # limit is independent of where x_i sits between its neighbors, and
        # the slot for x_{i+1} is driven by the ladder inside collapse_limit
        ys = list(ys)
        i0 = step.interval - 1
        mean_gap = (ys[-1] - ys[0]) / max(len(ys) - 1, 1) if len(ys) > 1 else 1.0
        if i0 == 0:
            xi = ys[0] - mean_gap
        elif i0 >= len(ys):
            xi = ys[-1] + mean_gap
        else:
            xi = 0.5 * (ys[i0 - 1] + ys[i0])
        zs = ys[:i0] + [xi, xi] + ys[i0:]
        return collapse_limit(f, zs, step.interval, kappa, ladder)

    return _apply_numeric(rest, collapsed, _drop_interval(xs, step.interval),
                          kappa, ladder)
