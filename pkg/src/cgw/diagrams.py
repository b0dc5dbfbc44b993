"""Arc diagrams: noncrossing pairings of 2N boundary points.

A diagram is stored as an involution ``pairing`` with ``pairing[i]`` the
partner of point ``i`` (0-based).  Diagrams are enumerated in a canonical
order (lexicographic on the pairing array) or in an interval-anchored order
where the first C_{N-1} diagrams are exactly those containing the arc
{i, i+1}.  Loop counting glues one diagram in the upper half-plane to
another in the lower half-plane and counts the closed loops through the 2N
shared points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence


def catalan(n: int) -> int:
    """n-th Catalan number (2n)!/(n!(n+1)!), exact."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.comb(2 * n, n) // (n + 1)


@dataclass(frozen=True)
class ArcDiagram:
    """A noncrossing perfect pairing of 2N points."""

    n_arcs: int
    pairing: tuple

    def __post_init__(self):
        p = self.pairing
        if len(p) != 2 * self.n_arcs:
            raise ValueError("pairing length must be 2*n_arcs")
        for i, j in enumerate(p):
            if not 0 <= j < len(p) or p[j] != i or j == i:
                raise ValueError("pairing is not a fixed-point-free involution")
        for i, j in self.arcs():
            for k, l in self.arcs():
                if i < k < j < l:
                    raise ValueError(f"arcs ({i},{j}) and ({k},{l}) cross")

    @classmethod
    def from_arcs(cls, arcs: Sequence) -> "ArcDiagram":
        pts = sorted(q for arc in arcs for q in arc)
        if pts != list(range(len(pts))):
            raise ValueError("arcs must cover 0..2N-1 exactly once")
        p = [0] * len(pts)
        for i, j in arcs:
            p[i], p[j] = j, i
        return cls(len(arcs), tuple(p))

    def arcs(self):
        """Arcs as sorted (i, j) pairs with i < j."""
        return [(i, j) for i, j in enumerate(self.pairing) if i < j]

    def partner(self, i: int) -> int:
        return self.pairing[i]

    def contains_arc(self, i: int, j: int) -> bool:
        return self.pairing[i] == j

    def remove_arc(self, i: int, j: int) -> "ArcDiagram":
        """Diagram on 2N-2 points obtained by deleting arc (i, j)."""
        if not self.contains_arc(i, j):
            raise ValueError(f"diagram has no arc ({i},{j})")
        keep = [q for q in range(2 * self.n_arcs) if q not in (i, j)]
        relabel = {old: new for new, old in enumerate(keep)}
        p = tuple(relabel[self.pairing[old]] for old in keep)
        return ArcDiagram(self.n_arcs - 1, p)

    def insert_arc(self, i: int) -> "ArcDiagram":
        """Diagram on 2N+2 points with a new arc at positions (i, i+1)."""
        if not 0 <= i <= 2 * self.n_arcs:
            raise ValueError("insertion slot out of range")
        shift = lambda q: q if q < i else q + 2
        p = [0] * (2 * self.n_arcs + 2)
        for a, b in self.arcs():
            p[shift(a)], p[shift(b)] = shift(b), shift(a)
        p[i], p[i + 1] = i + 1, i
        return ArcDiagram(self.n_arcs + 1, tuple(p))

    def to_parens(self) -> str:
        return "".join("(" if self.pairing[i] > i else ")" for i in range(2 * self.n_arcs))

    def to_json(self) -> dict:
        return {"n_arcs": self.n_arcs, "pairing": list(self.pairing)}

    @classmethod
    def from_json(cls, obj: dict) -> "ArcDiagram":
        return cls(obj["n_arcs"], tuple(obj["pairing"]))


@dataclass(frozen=True)
class ConnectivityIndex:
    """1-based index into an enumeration of the C_N connectivities."""

    value: int
    n_arcs: int
    anchor_interval: Optional[int] = None  # 1-based interval (i, i+1); 2N wraps to 1

    def __post_init__(self):
        if not 1 <= self.value <= catalan(self.n_arcs):
            raise ValueError(f"index {self.value} out of range for N={self.n_arcs}")

    def diagram(self) -> ArcDiagram:
        return enumerate_connectivities(self.n_arcs, self.anchor_interval)[self.value - 1]


def _pairings(points: tuple) -> Iterator[list]:
    if not points:
        yield []
        return
    first = points[0]
    for k in range(1, len(points), 2):
        inner, outer = points[1:k], points[k + 1:]
        for pi in _pairings(inner):
            for po in _pairings(outer):
                yield [(first, points[k])] + pi + po


@lru_cache(maxsize=None)
def _canonical(n: int):
    diags = [ArcDiagram.from_arcs(arcs) for arcs in _pairings(tuple(range(2 * n)))]
    diags.sort(key=lambda d: d.pairing)
    return tuple(diags)


@lru_cache(maxsize=None)
def _anchored(n: int, anchor: int):
    i = anchor - 1                      # 0-based left endpoint
    j = (i + 1) % (2 * n)               # interval (2N, 1) wraps
    with_arc = [d for d in _canonical(n) if d.contains_arc(i, j)]
    without = [d for d in _canonical(n) if not d.contains_arc(i, j)]
    return tuple(with_arc + without)


def enumerate_connectivities(n: int, anchor: Optional[int] = None):
    """All C_N noncrossing diagrams on 2n points, in a deterministic order.

    Without an anchor the order is lexicographic on the pairing array.  With
    ``anchor = i`` (1-based) the first C_{n-1} diagrams are those containing
    the arc {i, i+1}, each block kept in lexicographic order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if anchor is None:
        return list(_canonical(n))
    if not 1 <= anchor <= 2 * n:
        raise ValueError("anchor interval out of range")
    return list(_anchored(n, anchor))


def diagram_index(diagram: ArcDiagram, anchor: Optional[int] = None) -> int:
    """1-based index of ``diagram`` in the chosen enumeration."""
    for k, d in enumerate(enumerate_connectivities(diagram.n_arcs, anchor)):
        if d.pairing == diagram.pairing:
            return k + 1
    raise ValueError("diagram not found")  # unreachable for valid diagrams


def loop_count(top: ArcDiagram, bottom: ArcDiagram) -> int:
    """Loops formed by gluing ``top`` (upper half-plane) to ``bottom`` (lower)."""
    if top.n_arcs != bottom.n_arcs:
        raise ValueError("diagrams must have the same number of arcs")
    seen = [False] * (2 * top.n_arcs)
    loops = 0
    for start in range(2 * top.n_arcs):
        if seen[start]:
            continue
        loops += 1
        q = start
        while not seen[q]:
            seen[q] = True
            q2 = top.pairing[q]
            seen[q2] = True
            q = bottom.pairing[q2]
    return loops


def cut_map_chi(diagram: ArcDiagram, i: int) -> ArcDiagram:
    """Pinch-and-cut at the interval (i, i+1), 1-based, wrapping at 2N.

    Requires that the diagram does not already contain the arc {i, i+1}.
    The two arcs ending there are cut and rejoined into the arc {i, i+1}
    plus one arc between their far endpoints.
    """
    n2 = 2 * diagram.n_arcs
    a = i - 1
    b = i % n2
    if diagram.contains_arc(a, b):
        raise ValueError(f"diagram already contains arc ({i},{i % n2 + 1})")
    pa, pb = diagram.pairing[a], diagram.pairing[b]
    p = list(diagram.pairing)
    p[a], p[b] = b, a
    p[pa], p[pb] = pb, pa
    return ArcDiagram(diagram.n_arcs, tuple(p))


def chi_index(sigma: int, n: int, anchor: int) -> int:
    """Index form of the cutting map under the anchored ordering.

    Maps sigma in (C_{N-1}, C_N] to chi(sigma) in [1, C_{N-1}].
    """
    diags = enumerate_connectivities(n, anchor)
    c_prev = 1 if n == 1 else catalan(n - 1)
    if sigma <= c_prev:
        raise ValueError("chi is defined only for diagrams without the anchor arc")
    image = cut_map_chi(diags[sigma - 1], anchor)
    for k, d in enumerate(diags):
        if d.pairing == image.pairing:
            return k + 1
    raise AssertionError("cut map left the enumeration")
