"""Function-valued objects built from the contour-integral basis.

Everything the toolkit evaluates numerically is a linear combination of
basis functions, each tagged by its diagram.  Keeping the combination
structured (diagram -> coefficient) lets a collapse step produce the exact
reduced combination: collapsing an interval on an arc of the diagram keeps
the reduced diagram with one factor of the fugacity, while collapsing off
the arcs reroutes through the cutting map with no factor.  The collapse
itself is still measured numerically; the reduction only supplies the next
function to measure against.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

from .config import QuadConfig
from .coulomb import EvalResult, build_spec, evaluate_basis
from .diagrams import ArcDiagram, cut_map_chi
from .meander import fugacity


@lru_cache(maxsize=200_000)
def _cached_value(pairing: tuple, c: int, kappa: float, xs: tuple,
                  quad: QuadConfig) -> EvalResult:
    diagram = ArcDiagram(len(pairing) // 2, pairing)
    spec = build_spec(diagram.n_arcs, diagram, c, kappa)
    return evaluate_basis(spec, xs, quad)


def pick_charge(diagram: ArcDiagram, avoid: Tuple[int, ...] = ()) -> int:
    """A default 1-based conjugate-charge index, skipping ``avoid`` (0-based)."""
    for c0 in reversed(range(2 * diagram.n_arcs)):
        if c0 not in avoid:
            return c0 + 1
    raise ValueError("no admissible charge point")


def basis_value(diagram: ArcDiagram, kappa: float, xs, c: Optional[int] = None,
                quad: Optional[QuadConfig] = None) -> float:
    quad = quad or QuadConfig()
    c = c or pick_charge(diagram)
    return _cached_value(diagram.pairing, c, kappa, tuple(float(v) for v in xs),
                         quad).value


class ScalarFunction:
    """A number viewed as the empty-product solution (N = 0)."""

    def __init__(self, value: float, kappa: float):
        self.value = value
        self.kappa = kappa
        self.n_arcs = 0

    def __call__(self, xs=()):
        return self.value


@dataclass(frozen=True)
class BasisCombination:
    """sum_D coeff[D] * F_D at fixed kappa; the workhorse evaluator."""

    kappa: float
    n_arcs: int
    coefficients: Tuple[Tuple[ArcDiagram, float], ...]
    quad: QuadConfig = QuadConfig()

    @classmethod
    def of(cls, kappa: float, terms: Dict[ArcDiagram, float],
           quad: Optional[QuadConfig] = None) -> "BasisCombination":
        terms = {d: c for d, c in terms.items() if c != 0.0}
        if not terms:
            raise ValueError("empty combination")
        n_arcs = next(iter(terms)).n_arcs
        if any(d.n_arcs != n_arcs for d in terms):
            raise ValueError("mixed diagram sizes")
        ordered = tuple(sorted(terms.items(), key=lambda kv: kv[0].pairing))
        return cls(kappa, n_arcs, ordered, quad or QuadConfig())

    @classmethod
    def single(cls, kappa: float, diagram: ArcDiagram,
               quad: Optional[QuadConfig] = None) -> "BasisCombination":
        return cls.of(kappa, {diagram: 1.0}, quad)

    def __call__(self, xs) -> float:
        return sum(c * basis_value(d, self.kappa, xs, quad=self.quad)
                   for d, c in self.coefficients)

    def scaled(self, factor: float) -> "BasisCombination":
        return BasisCombination(self.kappa, self.n_arcs,
                                tuple((d, factor * c) for d, c in self.coefficients),
                                self.quad)

    def plus(self, other: "BasisCombination") -> "BasisCombination":
        terms: Dict[ArcDiagram, float] = {d: c for d, c in self.coefficients}
        for d, c in other.coefficients:
            terms[d] = terms.get(d, 0.0) + c
        return BasisCombination.of(self.kappa, terms, self.quad)

    def reduce_at_interval(self, i: int):
        """Exact reduced combination after collapsing the interval (i, i+1).

        ``i`` is 1-based with 2N wrapping to 1.  On-arc terms keep their
        reduced diagram times the fugacity; off-arc terms are rerouted by
        the cutting map with unit factor.  Valid away from the degenerate
        speeds where the basis collapses (8/kappa odd).
        """
        n2 = 2 * self.n_arcs
        a, b = i - 1, i % n2
        n = fugacity(self.kappa)
        reduced: Dict[ArcDiagram, float] = {}
        for d, c in self.coefficients:
            if d.contains_arc(a, b):
                rd = d.remove_arc(*sorted((a, b)))
                factor = n * c
            else:
                rd = cut_map_chi(d, i).remove_arc(*sorted((a, b)))
                factor = c
            key = rd
            reduced[key] = reduced.get(key, 0.0) + factor
        if self.n_arcs == 1:
            total = sum(reduced.values())
            return ScalarFunction(total, self.kappa)
        if all(abs(v) < 1e-300 for v in reduced.values()):
            return ScalarFunction(0.0, self.kappa)
        return BasisCombination.of(self.kappa, reduced, self.quad)
