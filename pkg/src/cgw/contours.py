"""Contour geometry and branch-phase bookkeeping for the screening integrals.

Each integration contour is an elliptical arc from one real endpoint to
another, bent into the upper half-plane with height = width/4.  With that
height law an arc whose span contains another's is strictly above it, so
arcs from a noncrossing diagram never intersect.

Branch conventions (validated against the kappa=6 identity, the closed-form
Dotsenko-Fateev evaluation and charge-independence; see tests):

* point factors (x_l - u)^g use the continuous branch with arg in [-pi, 0]
  for u in the closed upper half-plane;
* pair factors are oriented geometrically, (u_right - u_left) for disjoint
  spans (principal branch) and (u_inner - u_outer) for nested spans, the
  latter with a -2pi winding once the outer variable has passed over the
  inner one;
* positions on the endpoint loops of the Pochhammer representation anchor
  their phases at the loop's entry point on the arc and track increments as
  principal-branch ratios, which is exact because a loop never winds around
  any other singularity.

The remaining freedom is a constant re-anchoring per geometry, fixed in
``flat_phase`` so that the full integral is real with the sign that makes
every basis function equal +1 at kappa=6.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Arc:
    """Elliptical arc from a to b (a < b) in the upper half-plane."""

    a: float
    b: float

    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def radius(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def height(self) -> float:
        return 0.25 * (self.b - self.a)

    def point(self, t):
        th = math.pi * np.asarray(t)
        return self.center - self.radius * np.cos(th) + 1j * self.height * np.sin(th)

    def velocity(self, t):
        th = math.pi * np.asarray(t)
        return math.pi * (self.radius * np.sin(th) + 1j * self.height * np.cos(th))

    def gap_a(self, t, one_minus_t):
        """u(t) - a without cancellation near t = 0."""
        th_half = 0.5 * math.pi * np.asarray(t)
        th = math.pi * np.asarray(t)
        return 2.0 * self.radius * np.sin(th_half) ** 2 + 1j * self.height * np.sin(th)

    def gap_b(self, t, one_minus_t):
        """b - u(t) without cancellation near t = 1."""
        s = np.asarray(one_minus_t)
        return 2.0 * self.radius * np.sin(0.5 * math.pi * s) ** 2 - 1j * self.height * np.sin(math.pi * s)

    def contains(self, other: "Arc") -> bool:
        return self.a < other.a and other.b < self.b

    def left_of(self, other: "Arc") -> bool:
        return self.b <= other.a


@dataclass(frozen=True)
class Position:
    """A quadrature position of one integration variable.

    ``t`` is the arc parameter; for loop positions ``theta`` is the running
    loop angle, ``entry_t`` the arc parameter of the loop's entry point and
    ``loop_end`` the circled endpoint.
    """

    arc: Arc
    u: np.ndarray
    t: np.ndarray
    loop_end: Optional[float] = None
    entry_t: Optional[float] = None
    theta: Optional[np.ndarray] = None
    theta0: Optional[float] = None

    @property
    def on_loop(self) -> bool:
        return self.loop_end is not None


def arg_lower(w):
    """arg in [-pi, 0], the continuous branch on the closed lower half-plane."""
    ph = np.angle(w)
    return np.where(ph > 0.0, -math.pi, ph) if np.ndim(ph) else (
        -math.pi if ph > 0.0 else ph)


def point_log(xl: float, pos: Position, w_stable: Optional[np.ndarray] = None):
    """log of (xl - u) on the tracked branch.

    ``w_stable`` is xl - u formed without cancellation, supplied by the
    caller when xl is one of the arc's own endpoints.
    """
    if not pos.on_loop:
        w = w_stable if w_stable is not None else xl - pos.u
        return np.log(np.abs(w)) + 1j * arg_lower(w)
    # loop position: anchor at the entry point, then track the increment
    u_entry = complex(pos.arc.point(pos.entry_t))
    w_entry = xl - u_entry
    ph0 = arg_lower(w_entry)
    w = xl - pos.u
    if abs(xl - pos.loop_end) < 1e-300:
        ph = ph0 + (pos.theta - pos.theta0)  # w = -r e^{i theta}
    else:
        ph = ph0 + np.angle(w / w_entry)
    return np.log(np.abs(w)) + 1j * ph


def _nested_winding(u_in, arc_out: Arc, t_out):
    """-2pi once the outer variable has passed over the inner point."""
    y = np.clip(np.imag(u_in) / arc_out.height, 0.0, 1.0)
    s2 = 1.0 - np.arcsin(y) / math.pi
    return np.where(np.asarray(t_out) > s2, -TWO_PI, 0.0)


def _pair_phase_on_arcs(u_m, arc_m: Arc, t_m, u_q, arc_q: Arc, t_q):
    """(canonical w, tracked phase) for two on-arc positions."""
    if arc_m.left_of(arc_q):
        w = u_q - u_m
        return w, np.angle(w)
    if arc_q.left_of(arc_m):
        w = u_m - u_q
        return w, np.angle(w)
    if arc_q.contains(arc_m):
        w = u_m - u_q
        return w, np.angle(w) + _nested_winding(u_m, arc_q, t_q)
    if arc_m.contains(arc_q):
        w = u_q - u_m
        return w, np.angle(w) + _nested_winding(u_q, arc_m, t_m)
    raise ValueError("contour arcs must be nested or span-disjoint")


def pair_log(g: float, pos_m: Position, pos_q: Position):
    """g * log of the canonical pair factor between two variables."""
    anchor_m = pos_m if not pos_m.on_loop else _entry_of(pos_m)
    anchor_q = pos_q if not pos_q.on_loop else _entry_of(pos_q)
    w_anchor, ph_anchor = _pair_phase_on_arcs(
        anchor_m.u, pos_m.arc, anchor_m.t, anchor_q.u, pos_q.arc, anchor_q.t)
    if pos_m.on_loop or pos_q.on_loop:
        sign = 1.0 if (pos_q.arc.left_of(pos_m.arc) or pos_q.arc.contains(pos_m.arc)) else -1.0
        w_now = sign * (pos_m.u - pos_q.u)
        ph = ph_anchor + np.angle(w_now / w_anchor)
        return g * (np.log(np.abs(w_now)) + 1j * ph)
    return g * (np.log(np.abs(w_anchor)) + 1j * ph_anchor)


def _entry_of(pos: Position) -> Position:
    u = complex(pos.arc.point(pos.entry_t))
    return Position(pos.arc, np.asarray(u), np.asarray(pos.entry_t))


def build_arcs(xs: Sequence[float], pairing: Sequence[int], c: int):
    """Arcs for every diagram arc except the one carrying the charge at c."""
    arcs = []
    for i, j in sorted((i, pairing[i]) for i in range(len(xs)) if i < pairing[i]):
        if i == c or j == c:
            continue
        arcs.append(Arc(xs[i], xs[j]))
    # outermost (widest span) first: inner integrals then see fixed outer values
    arcs.sort(key=lambda a: (a.a - a.b, a.a))
    return arcs


def charge_arc_depth(xs: Sequence[float], pairing: Sequence[int], c: int) -> int:
    lo = min(xs[c], xs[pairing[c]])
    hi = max(xs[c], xs[pairing[c]])
    return sum(1 for arc in build_arcs(xs, pairing, c) if arc.a < lo and hi < arc.b)


def flat_phase(xs: Sequence[float], pairing: Sequence[int], c: int, kappa: float) -> complex:
    """exp(i Delta): constant re-anchoring making the full integral real.

    Per contour: pi*beta for every non-charge point at or left of the left
    endpoint, pi*(12/kappa - 2) when the charge point is strictly left; plus
    one unit of -pi*(1 - 4/kappa) per contour whose span contains the arc
    carrying the conjugate charge.
    """
    beta = -4.0 / kappa
    gc = 12.0 / kappa - 2.0
    xc = xs[c]
    delta = 0.0
    for arc in build_arcs(xs, pairing, c):
        for l, xl in enumerate(xs):
            if l != c and xl <= arc.a:
                delta += math.pi * beta
        if xc < arc.a:
            delta += math.pi * gc
    delta -= charge_arc_depth(xs, pairing, c) * math.pi * (1.0 + beta)
    return complex(math.cos(delta), math.sin(delta))
