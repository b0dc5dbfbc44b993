"""Arc-diagram combinatorics against brute-force oracles."""
import itertools

import pytest

from cgw.diagrams import (ArcDiagram, ConnectivityIndex, catalan, chi_index,
                          cut_map_chi, diagram_index,
                          enumerate_connectivities, loop_count)


def brute_noncrossing(n):
    """All noncrossing pairings by filtering every perfect matching."""
    def matchings(points):
        if not points:
            yield []
            return
        first, rest = points[0], points[1:]
        for k, other in enumerate(rest):
            for sub in matchings(rest[:k] + rest[k + 1:]):
                yield [(first, other)] + sub

    out = []
    for m in matchings(tuple(range(2 * n))):
        crossing = any(a < c < b < d
                       for (a, b), (c, d) in itertools.permutations(m, 2))
        if not crossing:
            out.append(sorted(m))
    return out


@pytest.mark.parametrize("n,value", [(1, 1), (3, 5), (4, 14), (6, 132), (7, 429)])
def test_catalan_values(n, value):
    assert catalan(n) == value


def test_catalan_rejects_zero():
    with pytest.raises(ValueError):
        catalan(0)


@pytest.mark.parametrize("n", range(1, 7))
def test_enumeration_matches_brute_force(n):
    mine = sorted(d.arcs() for d in enumerate_connectivities(n))
    assert mine == sorted(brute_noncrossing(n))
    assert len(mine) == catalan(n)


def test_enumeration_is_lexicographic():
    diags = enumerate_connectivities(3)
    pairings = [d.pairing for d in diags]
    assert pairings == sorted(pairings)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("anchor_kind", ["interior", "wrap"])
def test_anchored_order_splits_blocks(n, anchor_kind):
    anchor = 1 if anchor_kind == "interior" else 2 * n
    diags = enumerate_connectivities(n, anchor)
    a = anchor - 1
    b = anchor % (2 * n)
    c_prev = catalan(n - 1)
    assert all(d.contains_arc(a, b) for d in diags[:c_prev])
    assert not any(d.contains_arc(a, b) for d in diags[c_prev:])


def test_anchored_count_of_arc_containing_diagrams():
    # exactly C_{N-1} of C_N diagrams contain any fixed nearest-neighbor arc
    for n in range(2, 7):
        for anchor in range(1, 2 * n + 1):
            a, b = anchor - 1, anchor % (2 * n)
            count = sum(d.contains_arc(a, b) for d in enumerate_connectivities(n))
            assert count == catalan(n - 1)


def test_n2_anchor_example():
    first, second = enumerate_connectivities(2, anchor=1)
    assert first.arcs() == [(0, 1), (2, 3)]
    assert second.arcs() == [(0, 3), (1, 2)]


def test_diagram_validation():
    with pytest.raises(ValueError):
        ArcDiagram(2, (1, 0, 3, 3))          # not an involution
    with pytest.raises(ValueError):
        ArcDiagram(2, (2, 3, 0, 1))          # crossing arcs
    with pytest.raises(ValueError):
        ArcDiagram(1, (0, 1))                # fixed point


def test_loop_count_self_is_n():
    for n in range(1, 6):
        for d in enumerate_connectivities(n):
            assert loop_count(d, d) == n


def test_loop_count_n2_example():
    top = ArcDiagram.from_arcs([(0, 1), (2, 3)])
    bottom = ArcDiagram.from_arcs([(0, 3), (1, 2)])
    assert loop_count(top, bottom) == 1


def test_loop_count_symmetric():
    diags = enumerate_connectivities(4)
    for a in diags[::3]:
        for b in diags[::4]:
            assert loop_count(a, b) == loop_count(b, a)


def test_loop_count_rejects_size_mismatch():
    with pytest.raises(ValueError):
        loop_count(enumerate_connectivities(2)[0], enumerate_connectivities(3)[0])


def test_cut_map_n2_example():
    d = ArcDiagram.from_arcs([(0, 3), (1, 2)])
    assert cut_map_chi(d, 1).arcs() == [(0, 1), (2, 3)]


def test_cut_map_rejects_existing_arc():
    d = ArcDiagram.from_arcs([(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        cut_map_chi(d, 1)


def test_cut_map_output_contains_interval_arc():
    for n in range(2, 6):
        for anchor in range(1, 2 * n + 1):
            a, b = anchor - 1, anchor % (2 * n)
            for d in enumerate_connectivities(n):
                if d.contains_arc(a, b):
                    continue
                image = cut_map_chi(d, anchor)
                assert image.contains_arc(a, b)


def test_chi_loop_increment():
    # gluing against any arc-containing diagram gains exactly one loop
    for n in range(2, 6):
        for anchor in (1, n, 2 * n):
            diags = enumerate_connectivities(n, anchor)
            c_prev = catalan(n - 1)
            for rho in diags[c_prev:]:
                image = cut_map_chi(rho, anchor)
                for theta in diags[:c_prev]:
                    assert loop_count(image, theta) == loop_count(rho, theta) + 1


def test_chi_index_wrapper():
    assert chi_index(2, 2, 1) == 1
    with pytest.raises(ValueError):
        chi_index(1, 2, 1)


def test_serialization_roundtrip():
    for d in enumerate_connectivities(4):
        assert ArcDiagram.from_json(d.to_json()) == d
    assert enumerate_connectivities(2)[0].to_parens() == "()()"
    assert enumerate_connectivities(2)[1].to_parens() == "(())"


def test_insert_remove_inverse():
    for d in enumerate_connectivities(3):
        for slot in range(7):
            bigger = d.insert_arc(slot)
            assert bigger.n_arcs == 4
            assert bigger.remove_arc(slot, slot + 1) == d


def test_connectivity_index_bounds():
    with pytest.raises(ValueError):
        ConnectivityIndex(6, 3)
    idx = ConnectivityIndex(5, 3)
    assert diagram_index(idx.diagram()) == 5


def test_rotation_classes_n4():
    # the 14 four-arc connectivities fall into exactly three rotation orbits
    def rotated(pairing):
        n2 = len(pairing)
        q = [0] * n2
        for i in range(n2):
            q[(i + 1) % n2] = (pairing[i] + 1) % n2
        return tuple(q)

    seen, orbits = set(), 0
    for d in enumerate_connectivities(4):
        if d.pairing in seen:
            continue
        orbits += 1
        cur = d.pairing
        for _ in range(8):
            seen.add(cur)
            cur = rotated(cur)
    assert orbits == 3
