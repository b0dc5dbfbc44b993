"""Central charge, Kac weights, and the minimal-model correspondence.

All correspondence facts are checked in exact rational arithmetic: a
rational speed 4q/q' with coprime q, q' > 1 lands on the minimal model
M(max, min), and each model is hit by exactly two speeds.  Kac weights use
the dense-phase formula for kappa > 4 and the dilute one otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Tuple, Union

from .meander import ExceptionalSpeed, is_exceptional

KappaLike = Union[float, Fraction]


@dataclass(frozen=True)
class MinimalModelLabel:
    p: int
    p_prime: int

    def __post_init__(self):
        if not 1 < self.p_prime < self.p or math.gcd(self.p, self.p_prime) != 1:
            raise ValueError("need coprime 1 < p' < p")

    @property
    def central_charge(self) -> Fraction:
        return central_charge_exact_mm(self.p, self.p_prime)


def central_charge_exact_mm(p: int, pp: int) -> Fraction:
    """c_{p,p'} = 1 - 6 (p - p')^2 / (p p')."""
    return 1 - Fraction(6 * (p - pp) ** 2, p * pp)


def central_charge_exact(kappa: Fraction) -> Fraction:
    """(6 - kappa)(3 kappa - 8)/(2 kappa) in exact arithmetic."""
    kappa = Fraction(kappa)
    return (6 - kappa) * (3 * kappa - 8) / (2 * kappa)


class Phase(Enum):
    DENSE = "dense"     # kappa > 4
    DILUTE = "dilute"   # kappa <= 4


@dataclass(frozen=True)
class KacWeight:
    r: int
    s: int
    value: float
    phase: Phase


def kac_weight(r: int, s: int, kappa: float) -> KacWeight:
    """h_{r,s}(kappa), phase-appropriate branch."""
    if r < 1 or s < 1:
        raise ValueError("Kac labels must be positive")
    k = float(kappa)
    if k > 4.0:
        val = ((k * r - 4 * s) ** 2 - (k - 4) ** 2) / (16 * k)
        return KacWeight(r, s, val, Phase.DENSE)
    val = ((k * s - 4 * r) ** 2 - (k - 4) ** 2) / (16 * k)
    return KacWeight(r, s, val, Phase.DILUTE)


def s_leg_weight(s: int, kappa: float) -> float:
    """theta_s = s(2s + 4 - kappa) / (2 kappa); theta_1 is the one-leg weight."""
    if s < 0:
        raise ValueError("s must be >= 0")
    return s * (2 * s + 4 - kappa) / (2 * kappa)


def one_leg_operator_label(kappa: float) -> Tuple[int, int]:
    """Kac slot of the one-leg boundary operator: (1,2) dense, (2,1) dilute."""
    return (1, 2) if kappa > 4.0 else (2, 1)


class CorrespondenceClass(Enum):
    TWO_TO_ONE = "two_to_one"    # exceptional speeds in (2, 8)
    ONE_TO_ONE = "one_to_one"    # exceptional speeds in (0, 2]


@dataclass(frozen=True)
class MinimalModelMap:
    speed: ExceptionalSpeed
    model: MinimalModelLabel
    correspondence: CorrespondenceClass


def minimal_model_map(kappa: KappaLike) -> MinimalModelMap:
    """Minimal model reached by an exceptional speed, with its range class."""
    exc = is_exceptional(kappa)
    if exc is None:
        raise ValueError(f"kappa={kappa} is not an exceptional speed")
    if exc.q_prime == 1:
        raise ValueError("speeds 4q/1 >= 8 do not reach a minimal model here")
    p, pp = max(exc.q, exc.q_prime), min(exc.q, exc.q_prime)
    cls = CorrespondenceClass.TWO_TO_ONE if exc.kappa > 2 else CorrespondenceClass.ONE_TO_ONE
    return MinimalModelMap(exc, MinimalModelLabel(p, pp), cls)


def null_vector_levels(r: int, s: int, p: int, pp: int, count: int) -> List[int]:
    """Head of the null-vector level tower for V_{r,s} in M(p, p').

    The four displayed terms are exact; further entries extend the first
    two by multiples of p*p' and are flagged as extrapolated by position
    (indices >= 4).
    """
    if count < 1:
        raise ValueError("count must be positive")
    head = [r * s,
            (pp - r) * (p - s),
            r * s + (pp - r) * (p + s),
            r * s + (pp + r) * (p - s)]
    levels = list(head)
    k = 1
    while len(levels) < count:
        levels.append(head[0] + k * p * pp)
        if len(levels) < count:
            levels.append(head[1] + k * p * pp)
        k += 1
    return levels[:count]


def rational_speeds(max_index: int) -> List[Tuple[int, int]]:
    """All coprime (q, q') with 1 < q, q' <= max_index."""
    out = []
    for q in range(2, max_index + 1):
        for qp in range(2, max_index + 1):
            if math.gcd(q, qp) == 1:
                out.append((q, qp))
    return out
