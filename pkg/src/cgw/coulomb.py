"""Numerical evaluation of the Coulomb-gas basis functions.

A basis function is a prefactor times coordinate-difference powers times an
(N-1)-fold contour integral over screening variables, one contour per arc
of the connectivity diagram except the arc carrying the conjugate charge at
x_c.  For kappa > 4 the contours are simple arcs in the upper half-plane
(endpoint exponents -4/kappa > -1); otherwise each contour is evaluated in
an endpoint-loop form equivalent to a normalized Pochhammer contour, which
continues the arc integral analytically in kappa and avoids the endpoint
singularities entirely.

The prefactor used here is the reduced one,

    n * [ n Gamma(2 - 8/kappa) / Gamma(1 - 4/kappa)^2 ]^(N-1),

matching the simple-contour normalization of the integrals; the sin^2
factors of the Pochhammer normalization are absorbed into the endpoint-loop
weights 1/(1 - e^{2 pi i beta}).
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import gamma as _gamma

from .config import QuadConfig
from .contours import Arc, Position, flat_phase, pair_log, point_log
from .diagrams import ArcDiagram, ConnectivityIndex
from .meander import fugacity
from .quadrature import QuadratureError, gauss, jacobi

EPS_GEOM = 1e-8  # minimum allowed gap between consecutive points


@dataclass(frozen=True)
class PointConfig:
    """Strictly increasing marked points x_1 < ... < x_2N."""

    coords: tuple

    def __post_init__(self):
        xs = self.coords
        if len(xs) % 2 or not xs:
            raise ValueError("need an even, positive number of points")
        gaps = [b - a for a, b in zip(xs, xs[1:])]
        if any(g <= EPS_GEOM for g in gaps):
            raise ValueError("coordinates must increase with gap > 1e-8")

    @classmethod
    def of(cls, xs) -> "PointConfig":
        return xs if isinstance(xs, cls) else cls(tuple(float(v) for v in xs))

    @property
    def n_arcs(self) -> int:
        return len(self.coords) // 2

    def min_gap(self) -> float:
        xs = self.coords
        return min(b - a for a, b in zip(xs, xs[1:]))


class ContourKind(Enum):
    SIMPLE_UPPER_ARC = "simple_upper_arc"
    POCHHAMMER = "pochhammer"


@dataclass(frozen=True)
class ContourSpec:
    """One screening contour: endpoints are 1-based point indices."""

    kind: ContourKind
    endpoints: tuple
    nesting_level: int = 0

    def __post_init__(self):
        i, j = self.endpoints
        if i == j:
            raise ValueError("contour endpoints must be distinct")


@dataclass(frozen=True)
class CoulombGasSpec:
    """Everything fixed about one basis-function formula F_{c,theta}."""

    n_arcs: int
    diagram: ArcDiagram
    c: int                      # 1-based conjugate-charge point index
    kappa: float
    contours: tuple

    @property
    def c0(self) -> int:
        return self.c - 1


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_error_est: float
    imag_leak: float
    n_evals: int


def default_kind(kappa: float) -> ContourKind:
    return ContourKind.SIMPLE_UPPER_ARC if kappa > 4.0 else ContourKind.POCHHAMMER


def build_spec(n_arcs: int, theta: Union[ArcDiagram, ConnectivityIndex, int],
               c: int, kappa: float,
               kind: Optional[ContourKind] = None) -> CoulombGasSpec:
    """Contour assignment for the formula F_{c,theta}.

    ``theta`` may be a diagram, a ConnectivityIndex, or a 1-based index into
    the canonical enumeration.  Every arc of the diagram except the one with
    an endpoint at x_c receives a contour.
    """
    if isinstance(theta, int):
        theta = ConnectivityIndex(theta, n_arcs)
    if isinstance(theta, ConnectivityIndex):
        theta = theta.diagram()
    if theta.n_arcs != n_arcs:
        raise ValueError("diagram size disagrees with n_arcs")
    if not 1 <= c <= 2 * n_arcs:
        raise ValueError("conjugate-charge index out of range")
    if not 0.0 < kappa < 8.0:
        raise ValueError("kappa must lie in (0, 8)")
    kind = kind or default_kind(kappa)
    if kind is ContourKind.SIMPLE_UPPER_ARC and kappa <= 4.0:
        raise ValueError("simple arcs need endpoint exponents -4/kappa > -1; "
                         "use the Pochhammer kind for kappa <= 4")
    c0 = c - 1
    contours = []
    spans = [(i, j) for i, j in theta.arcs() if c0 not in (i, j)]
    for i, j in spans:
        depth = sum(1 for a, b in spans if a < i and j < b)
        contours.append(ContourSpec(kind, (i + 1, j + 1), depth))
    return CoulombGasSpec(n_arcs, theta, c, kappa, tuple(contours))


def reduced_prefactor(kappa: float, n_arcs: int) -> float:
    """n * [n Gamma(2-8/k) / Gamma(1-4/k)^2]^(N-1); poles excluded by callers."""
    n = fugacity(kappa)
    if n_arcs == 1:
        return n
    g = n * _gamma(2.0 - 8.0 / kappa) / _gamma(1.0 - 4.0 / kappa) ** 2
    return n * g ** (n_arcs - 1)


def coordinate_factor(xs: Sequence[float], c0: int, kappa: float) -> float:
    """Product of (x_k - x_j)^(2/k) over j<k != c and |x_c - x_k|^(1-6/k)."""
    log = 0.0
    for j in range(len(xs)):
        for k in range(j + 1, len(xs)):
            if j != c0 and k != c0:
                log += (2.0 / kappa) * math.log(xs[k] - xs[j])
    for k in range(len(xs)):
        if k != c0:
            log += (1.0 - 6.0 / kappa) * math.log(abs(xs[c0] - xs[k]))
    return math.exp(log)


class _Integrand:
    """log-magnitude + tracked-phase integrand over the contour arcs."""

    def __init__(self, xs, c0, arcs, kappa):
        self.xs = xs
        self.c0 = c0
        self.arcs = arcs
        self.beta = -4.0 / kappa
        self.gc = 12.0 / kappa - 2.0
        self.delta = 8.0 / kappa

    def point_logs(self, m: int, pos: Position, gaps=None):
        arc = self.arcs[m]
        out = np.zeros(np.shape(pos.u), dtype=complex)
        for l, xl in enumerate(self.xs):
            g = self.gc if l == self.c0 else self.beta
            w_stable = None
            if gaps is not None:
                if xl == arc.a:
                    w_stable = -gaps[0]
                elif xl == arc.b:
                    w_stable = gaps[1]
            out = out + g * point_log(xl, pos, w_stable)
        return out


def _loop_radius(arc: Arc, end: float, xs, frac: float) -> float:
    gap = min(abs(end - xl) for xl in xs if abs(end - xl) > 1e-14)
    return frac * min(gap, arc.b - arc.a)


def _entry_parameter(arc: Arc, end: float, r: float) -> float:
    lo, hi = (0.0, 0.5) if end == arc.a else (1.0, 0.5)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(complex(arc.point(mid)) - end) < r:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class _ContourPlan:
    """Quadrature legs for one contour at a chosen refinement level."""

    def __init__(self, arc: Arc, kind: ContourKind, kappa: float, xs, quad: QuadConfig):
        self.arc = arc
        self.kind = kind
        self.kappa = kappa
        self.beta = -4.0 / kappa
        if kind is ContourKind.POCHHAMMER:
            lam = cmath.exp(2j * math.pi * self.beta)
            if abs(lam - 1.0) < 1e-9:
                raise QuadratureError(
                    "endpoint-loop normalization degenerates at 8/kappa even; "
                    "evaluate at nearby kappa and extrapolate")
            self.lam = lam
            self.ra = _loop_radius(arc, arc.a, xs, quad.loop_radius_frac)
            self.rb = _loop_radius(arc, arc.b, xs, quad.loop_radius_frac)
            self.ta = _entry_parameter(arc, arc.a, self.ra)
            self.tb = _entry_parameter(arc, arc.b, self.rb)

    def legs(self, level: int, quad: QuadConfig):
        """Yield (Position, log_measure, phase_measure, gaps) per leg.

        The measure is split as exp(log_measure) * phase so magnitudes can
        be combined with the integrand in log space.  Simple arcs use a
        Gauss-Jacobi rule whose weight absorbs the t^b(1-t)^b endpoint
        behavior; the matching -b(ln t + ln(1-t)) is folded into the log
        measure, cancelling the endpoint factors of the integrand in log
        space.
        """
        arc = self.arc
        if self.kind is ContourKind.SIMPLE_UPPER_ARC:
            rule = jacobi(16 * 2 ** level, self.beta)
            u = arc.point(rule.t)
            pos = Position(arc, u, rule.t)
            du = arc.velocity(rule.t)
            gaps = (arc.gap_a(rule.t, rule.one_minus_t),
                    arc.gap_b(rule.t, rule.one_minus_t))
            log_meas = (np.log(rule.w) + np.log(np.abs(du))
                        - self.beta * (np.log(rule.t) + np.log(rule.one_minus_t)))
            yield pos, log_meas, du / np.abs(du), gaps
            return
        rule = gauss(quad.loop_points * 2 ** level)
        for t0, t1, coef in ((0.5, self.tb, 1.0), (0.5, self.ta, -1.0)):
            t = t0 + (t1 - t0) * rule.t
            u = arc.point(t)
            du = arc.velocity(t) * (t1 - t0)
            pos = Position(arc, u, t)
            yield pos, np.log(rule.w * np.abs(du) * abs(coef)), \
                np.sign(coef) * du / np.abs(du), None
        for end, entry_t, r, coef in ((arc.b, self.tb, self.rb, 1.0 / (1.0 - self.lam)),
                                      (arc.a, self.ta, self.ra, -1.0 / (1.0 - self.lam))):
            w0 = complex(arc.point(entry_t)) - end
            theta0 = math.atan2(w0.imag, w0.real)
            theta = theta0 + 2.0 * math.pi * rule.t
            u = end + r * np.exp(1j * theta)
            du = 1j * r * np.exp(1j * theta) * 2.0 * math.pi
            pos = Position(arc, u, None, loop_end=end, entry_t=entry_t,
                           theta=theta, theta0=theta0)
            phase = coef * du / np.abs(coef * du)
            yield pos, np.log(rule.w * np.abs(du) * abs(coef)), phase, None


def _axis_shape(arr, m: int, n_axes: int):
    shape = [1] * n_axes
    shape[m] = np.size(arr)
    return np.reshape(arr, shape)


def _broadcast_leg(leg, m: int, n_axes: int):
    pos, log_meas, phase, gaps = leg
    shaped = Position(pos.arc, _axis_shape(pos.u, m, n_axes),
                      None if pos.t is None else _axis_shape(pos.t, m, n_axes),
                      pos.loop_end, pos.entry_t,
                      None if pos.theta is None else _axis_shape(pos.theta, m, n_axes),
                      pos.theta0)
    shaped_gaps = None if gaps is None else tuple(_axis_shape(g, m, n_axes) for g in gaps)
    return shaped, _axis_shape(log_meas, m, n_axes), _axis_shape(phase, m, n_axes), shaped_gaps


def _slice_axis0(pos: Position, sl) -> Position:
    return Position(pos.arc, pos.u[sl],
                    None if pos.t is None else pos.t[sl],
                    pos.loop_end, pos.entry_t,
                    None if pos.theta is None else pos.theta[sl], pos.theta0)


def _combination_value(integrand: _Integrand, combo, n_axes: int,
                       chunk: int) -> complex:
    """Fully vectorized sum over one choice of leg per contour."""
    total = 0.0 + 0.0j
    n0 = combo[0][0].u.shape[0]
    for lo in range(0, n0, chunk):
        sl = slice(lo, min(n0, lo + chunk))
        pos_list = []
        logs = 0.0
        phase = 1.0
        for m, (pos, log_meas, ph, gaps) in enumerate(combo):
            if m == 0:
                pos = _slice_axis0(pos, sl)
                log_meas, ph = log_meas[sl], ph[sl]
                gaps = None if gaps is None else tuple(g[sl] for g in gaps)
            pos_list.append(pos)
            logs = logs + integrand.point_logs(m, pos, gaps) + log_meas
            phase = phase * ph
        for a in range(n_axes):
            for b in range(a + 1, n_axes):
                logs = logs + pair_log(integrand.delta, pos_list[a], pos_list[b])
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            vals = np.exp(logs) * phase
        vals = np.where(np.isfinite(vals), vals, 0.0)
        total += complex(np.sum(vals))
    return total


def _iterated(integrand: _Integrand, plans, level: int, quad: QuadConfig,
              counter: list) -> complex:
    n_axes = len(plans)
    leg_sets = [[_broadcast_leg(leg, m, n_axes) for leg in plans[m].legs(level, quad)]
                for m in range(n_axes)]
    sizes = [max(leg[0].u.shape[m] for leg in leg_sets[m]) for m in range(n_axes)]
    rest = 1
    for s in sizes[1:]:
        rest *= s
    chunk = max(1, 4_000_000 // max(rest, 1))
    total = 0.0 + 0.0j
    for combo in itertools.product(*leg_sets):
        counter[0] += int(np.prod([c[0].u.size for c in combo]))
        total += _combination_value(integrand, combo, n_axes, chunk)
    return total


def contour_integral(xs, c0: int, arc_pairs, kappa: float, kind: ContourKind,
                     quad: QuadConfig):
    """Normalized screening integral over the given contour arcs.

    ``arc_pairs`` are 0-based point-index pairs.  Returns (value, error
    estimate, evaluation count); the value carries the flat-phase
    re-anchoring, so it is real up to quadrature error.
    """
    arcs = [Arc(xs[i], xs[j]) for i, j in (sorted(p) for p in arc_pairs)]
    arcs.sort(key=lambda a: (a.a - a.b, a.a))
    if not arcs:
        return 1.0 + 0.0j, 0.0, 0
    integrand = _Integrand(xs, c0, arcs, kappa)
    plans = [_ContourPlan(arc, kind, kappa, xs, quad) for arc in arcs]
    counter = [0]
    prev = None
    value = None
    err = math.inf
    for level in range(quad.min_level, quad.max_level + 1):
        value = _iterated(integrand, plans, level, quad, counter)
        if prev is not None:
            err = abs(value - prev)
            if err <= quad.tol * max(1.0, abs(value)):
                break
        prev = value
    else:
        if err > 1e6 * quad.tol * max(1.0, abs(value)):
            raise QuadratureError(
                f"contour integral did not converge: error {err:.2e} at the "
                f"deepest refinement")
    return value, err, counter[0]


def _pairing_partner(n2: int, arc_pairs, c0: int) -> int:
    used = {q for p in arc_pairs for q in p} | {c0}
    free = [q for q in range(n2) if q not in used]
    if len(free) != 1:
        raise ValueError("contours plus the charge point must leave one free point")
    return free[0]


def evaluate_basis(spec: CoulombGasSpec, x, quad: Optional[QuadConfig] = None) -> EvalResult:
    """F_{c,theta}(kappa | x) with diagnostics.

    Exactly at the fugacity zeros n(kappa) = 0 (8/kappa an odd integer)
    every basis function vanishes identically and 0 is returned directly.
    """
    quad = quad or QuadConfig()
    pts = PointConfig.of(x)
    xs = pts.coords
    if len(xs) != 2 * spec.n_arcs:
        raise ValueError("point count disagrees with the spec")
    kappa = spec.kappa
    if abs(fugacity(kappa)) < 1e-13:
        return EvalResult(0.0, 0.0, 0.0, 0)
    r = 8.0 / kappa
    if abs(r - 2 * round(r / 2)) < 1e-9 and kappa <= 4.0:
        raise QuadratureError(
            "8/kappa is an even integer: evaluate at nearby kappa and extrapolate")
    c0 = spec.c0
    arc_pairs = [(i - 1, j - 1) for i, j in (cs.endpoints for cs in spec.contours)]
    kind = spec.contours[0].kind if spec.contours else default_kind(kappa)
    J, err_j, n_evals = contour_integral(xs, c0, arc_pairs, kappa, kind, quad)
    pairing = _full_pairing(len(xs), arc_pairs, c0)
    J *= flat_phase(xs, pairing, c0, kappa)
    scale = reduced_prefactor(kappa, spec.n_arcs) * coordinate_factor(xs, c0, kappa)
    F = scale * J
    value = F.real
    imag_leak = abs(F.imag)
    err = abs(scale) * err_j
    if imag_leak > quad.reality_rel * abs(value) + quad.reality_abs and \
            imag_leak > 10.0 * max(err, 1e-300):
        raise QuadratureError(
            f"imaginary leak {imag_leak:.3e} exceeds the reality tolerance")
    return EvalResult(value, err, imag_leak, n_evals)


def _full_pairing(n2: int, arc_pairs, c0: int):
    partner = _pairing_partner(n2, arc_pairs, c0)
    p = [0] * n2
    for i, j in arc_pairs:
        p[i], p[j] = j, i
    p[c0], p[partner] = partner, c0
    return p


def evaluate_dotsenko_fateev_kernel(x, c: int, contour_pairs, kappa: float,
                                    quad: Optional[QuadConfig] = None) -> EvalResult:
    """The bare multiple contour integral (no prefactor, no coordinate products).

    ``contour_pairs`` are 1-based point-index pairs forming noncrossing arcs
    with distinct endpoints avoiding x_c.  At kappa = 6 the value has the
    Gamma(1/3)-product closed form tested in the acceptance suite.
    """
    quad = quad or QuadConfig()
    pts = PointConfig.of(x)
    xs = pts.coords
    c0 = c - 1
    arc_pairs = [tuple(sorted((i - 1, j - 1))) for i, j in contour_pairs]
    for i, j in arc_pairs:
        for k, l in arc_pairs:
            if i < k < j < l:
                raise ValueError("contours must be noncrossing")
        if c0 in (i, j):
            raise ValueError("contours may not end on the charge point")
    kind = default_kind(kappa)
    J, err, n_evals = contour_integral(xs, c0, arc_pairs, kappa, kind, quad)
    pairing = _full_pairing(len(xs), arc_pairs, c0)
    J *= flat_phase(xs, pairing, c0, kappa)
    return EvalResult(J.real, err, abs(J.imag), n_evals)


def dotsenko_fateev_rhs(x, c: int, kappa: float = 6.0) -> float:
    """Closed form the kernel must equal at kappa = 6."""
    if abs(kappa - 6.0) > 1e-12:
        raise ValueError("the closed form is specific to kappa = 6")
    pts = PointConfig.of(x)
    xs = pts.coords
    n_arcs = len(xs) // 2
    c0 = c - 1
    val = _gamma(1.0 / 3.0) ** (2 * n_arcs - 2) / _gamma(2.0 / 3.0) ** (n_arcs - 1)
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if i != c0 and j != c0:
                val *= abs(xs[i] - xs[j]) ** (-1.0 / 3.0)
    return val
