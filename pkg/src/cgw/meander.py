"""Fugacity, meander matrices, determinant zeros and exceptional speeds.

The meander matrix M_N has entries n^{l} with l the loop count of a pair of
glued arc diagrams.  Its determinant vanishes exactly at the fugacities
n_{q,q''} = -2 cos(pi q''/q) with coprime q'' < q <= N+1, and the rank at
such a zero is given by a closed trigonometric sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .diagrams import enumerate_connectivities, loop_count

MAX_N_ARCS = 7  # C_7 = 429; dense storage stays desk-scale

KappaLike = Union[float, Fraction]


def fugacity(kappa: float) -> float:
    """Loop fugacity n(kappa) = -2 cos(4 pi / kappa), kappa in (0, 8)."""
    if not 0.0 < float(kappa) < 8.0:
        raise ValueError(f"kappa must lie in (0, 8), got {kappa}")
    return -2.0 * math.cos(4.0 * math.pi / float(kappa))


def central_charge(kappa: float) -> float:
    """c(kappa) = (6 - kappa)(3 kappa - 8) / (2 kappa)."""
    k = float(kappa)
    if k <= 0:
        raise ValueError("kappa must be positive")
    return (6.0 - k) * (3.0 * k - 8.0) / (2.0 * k)


def as_fraction(kappa: KappaLike, tol: float = 1e-12, max_den: int = 1000) -> Optional[Fraction]:
    """Exact rational form of kappa, or None if no close rational exists.

    Fractions pass through unchanged; floats are recognised by continued
    fractions with denominator <= max_den and absolute tolerance tol.
    """
    if isinstance(kappa, Fraction):
        return kappa
    if isinstance(kappa, int):
        return Fraction(kappa)
    frac = Fraction(kappa).limit_denominator(max_den)
    if abs(float(frac) - kappa) < tol:
        return frac
    return None


class EightOverKappaClass(Enum):
    EVEN_INTEGER = "even_integer"
    ODD_INTEGER = "odd_integer"
    RATIONAL_NON_INTEGER = "rational_non_integer"
    IRRATIONAL = "irrational"


def classify_eight_over_kappa(kappa: KappaLike) -> EightOverKappaClass:
    frac = as_fraction(kappa)
    if frac is None:
        return EightOverKappaClass.IRRATIONAL
    r = 8 / frac
    if r.denominator == 1:
        return (EightOverKappaClass.EVEN_INTEGER if r.numerator % 2 == 0
                else EightOverKappaClass.ODD_INTEGER)
    return EightOverKappaClass.RATIONAL_NON_INTEGER


@dataclass(frozen=True)
class SpeedContext:
    """kappa with its derived quantities."""

    kappa: float
    n: float = field(init=False)
    central_charge: float = field(init=False)
    eight_over_kappa_class: EightOverKappaClass = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", fugacity(self.kappa))
        object.__setattr__(self, "central_charge", central_charge(self.kappa))
        object.__setattr__(self, "eight_over_kappa_class",
                           classify_eight_over_kappa(self.kappa))


@dataclass(frozen=True)
class ExceptionalSpeed:
    """kappa = 4q/q' with coprime q > 1, q' >= 1."""

    q: int
    q_prime: int

    def __post_init__(self):
        if self.q <= 1 or self.q_prime < 1 or math.gcd(self.q, self.q_prime) != 1:
            raise ValueError("need coprime q > 1, q' >= 1")

    @property
    def kappa(self) -> Fraction:
        return Fraction(4 * self.q, self.q_prime)


def is_exceptional(kappa: KappaLike, n_arcs: Optional[int] = None) -> Optional[ExceptionalSpeed]:
    """Decompose kappa = 4q/q' with coprime q > 1; optionally gate on q <= N+1.

    With ``n_arcs`` given, returns the decomposition only when the meander
    matrix M_N actually degenerates there (q <= N+1); otherwise None.
    """
    frac = as_fraction(kappa)
    if frac is None:
        return None
    ratio = frac / 4  # q/q' in lowest terms
    q, qp = ratio.numerator, ratio.denominator
    if q <= 1:
        return None
    if n_arcs is not None and q > n_arcs + 1:
        return None
    return ExceptionalSpeed(q, qp)


def meander_zero(q: int, q2: int) -> float:
    """Determinant zero n_{q,q''} = -2 cos(pi q''/q), coprime 0 < q'' < q."""
    if not (0 < q2 < q) or math.gcd(q, q2) != 1:
        raise ValueError("need coprime 0 < q'' < q")
    val = -2.0 * math.cos(math.pi * q2 / q)
    for exact in (0.0, 1.0, -1.0, 2.0, -2.0):
        if abs(val - exact) < 1e-14:  # snap the exactly representable values
            return exact
    return val


def determinant_zeros(n_arcs: int):
    """All (q, q'', n_{q,q''}) with q <= N+1, sorted by fugacity value."""
    out = []
    for q in range(2, n_arcs + 2):
        for q2 in range(1, q):
            if math.gcd(q, q2) == 1:
                out.append((q, q2, meander_zero(q, q2)))
    return sorted(out, key=lambda t: t[2])


@lru_cache(maxsize=None)
def loop_exponents(n_arcs: int, anchor: Optional[int] = None):
    """C_N x C_N integer matrix of loop counts over the chosen enumeration."""
    diags = enumerate_connectivities(n_arcs, anchor)
    c = len(diags)
    exp = np.zeros((c, c), dtype=np.int64)
    for i in range(c):
        for j in range(i, c):
            exp[i, j] = exp[j, i] = loop_count(diags[i], diags[j])
    exp.setflags(write=False)
    return exp


@dataclass(frozen=True)
class MeanderMatrix:
    size: int
    exponents: np.ndarray
    fugacity: float
    entries: np.ndarray

    def determinant(self) -> float:
        return float(np.linalg.det(self.entries))

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.entries))


def build_meander_matrix(n_arcs: int, kappa: Optional[float] = None,
                         n: Optional[float] = None,
                         anchor: Optional[int] = None) -> MeanderMatrix:
    """Meander matrix with entries n^{l} over the canonical enumeration."""
    if n_arcs > MAX_N_ARCS:
        raise ValueError(f"n_arcs > {MAX_N_ARCS} exceeds the configured size limit")
    if (kappa is None) == (n is None):
        raise ValueError("give exactly one of kappa or n")
    fug = fugacity(kappa) if kappa is not None else float(n)
    exp = loop_exponents(n_arcs, anchor)
    entries = np.power(fug, exp)  # integer exponents >= 1, so fug = 0 is fine
    return MeanderMatrix(exp.shape[0], exp, fug, entries)


def rank_at_zero(n_arcs: int, q: int, q2: int, tol: float = 1e-9) -> int:
    """Rank of M_N at the zero n_{q,q''}: (1/2q) sum_p (2 sin)^2 (2 cos)^{2N}.

    The sum is an integer analytically; a residual above ``tol`` signals an
    implementation bug rather than a numerical tolerance issue.
    """
    if not (0 < q2 < q <= n_arcs + 1) or math.gcd(q, q2) != 1:
        raise ValueError("need coprime q'' < q <= N+1")
    total = 0.0
    for p in range(1, q):
        total += (2 * math.sin(math.pi * p / q)) ** 2 * \
                 (2 * math.cos(math.pi * p / q)) ** (2 * n_arcs)
    total /= 2 * q
    nearest = round(total)
    if abs(total - nearest) > tol:
        raise ArithmeticError(f"rank formula gave non-integer {total}")
    return nearest


def numeric_rank(matrix: Union[MeanderMatrix, np.ndarray], tol: float = 1e-9) -> int:
    """Number of singular values above tol * sigma_max."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = matrix.entries if isinstance(matrix, MeanderMatrix) else np.asarray(matrix)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def sign_relation_check(n_arcs: int, anchor: Optional[int] = None) -> bool:
    """Parity relation behind F_theta = (-1)^p F_rho at n = -1.

    Checks that l[s,t] - l[s,r] mod 2 does not depend on s, for every pair
    (t, r) of columns of the loop-count matrix.
    """
    exp = loop_exponents(n_arcs, anchor)
    par = exp % 2
    diff = (par[:, :, None] - par[:, None, :]) % 2
    return bool(np.all(diff == diff[0]))
