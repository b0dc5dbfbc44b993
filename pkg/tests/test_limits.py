"""Collapse limits and composed limit functionals."""
import math

import pytest

from cgw.diagrams import enumerate_connectivities
from cgw.evaluators import BasisCombination
from cgw.limits import (apply_L, collapse_at_infinity, collapse_limit,
                        collapse_sequence)
from cgw.meander import build_meander_matrix, fugacity
from cgw.weights import weight_evaluator

XS4 = (0.0, 1.0, 2.0, 3.0)
KAPPA = 5.0


def test_collapse_limit_power_cancellation():
    # bare closed form without the fugacity prefactor: limit is exactly one
    f = lambda xs: (xs[1] - xs[0]) ** (1.0 - 6.0 / KAPPA)
    assert collapse_limit(f, (0.0, 1.0), 1, KAPPA) == pytest.approx(1.0, abs=1e-9)


def test_collapse_limit_basis_n1():
    f = BasisCombination.single(KAPPA, enumerate_connectivities(1)[0])
    got = collapse_limit(f, (0.0, 1.0), 1, KAPPA)
    assert got == pytest.approx(fugacity(KAPPA), rel=1e-9)


def test_collapse_limit_independent_of_xi():
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    got = collapse_limit(f, XS4, 2, KAPPA, check_independence=True)
    assert math.isfinite(got)


def test_collapse_on_arc_reduces_to_smaller_system():
    # collapsing an arc interval of F_1 leaves fugacity times the N=1 function
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    got = collapse_limit(f, XS4, 1, KAPPA)
    want = fugacity(KAPPA) * fugacity(KAPPA) * (3.0 - 2.0) ** (1.0 - 6.0 / KAPPA)
    assert got == pytest.approx(want, rel=1e-6)


def test_collapse_off_arc_of_weight_vanishes():
    pi2 = weight_evaluator(2, KAPPA, n_arcs=2)
    got = collapse_limit(pi2, XS4, 1, KAPPA)
    assert abs(got) < 1e-6


def test_collapse_sequences_are_adjacent():
    from cgw.limits import limit_sequence
    for n in range(1, 6):
        for d in enumerate_connectivities(n):
            steps = collapse_sequence(d)
            assert len(steps) == n
            seq = limit_sequence(d)
            assert seq.steps == tuple(steps)
            assert all(s.kind == "adjacent" for s in seq.steps)


def test_apply_L_meander_pairing():
    n = fugacity(KAPPA)
    exp = build_meander_matrix(2, kappa=KAPPA).exponents
    diags = enumerate_connectivities(2)
    for si, s in enumerate(diags):
        for ti, t in enumerate(diags):
            f = BasisCombination.single(KAPPA, t)
            got = apply_L(s, f, XS4, KAPPA)
            assert got == pytest.approx(n ** exp[si, ti], rel=1e-3)


def test_apply_L_constant_at_kappa6():
    class One:
        pass

    f = BasisCombination.single(6.0, enumerate_connectivities(2)[0])
    # at kappa=6 every basis element is the constant one, so any [L] gives 1
    for s in enumerate_connectivities(2):
        assert apply_L(s, f, XS4, 6.0) == pytest.approx(1.0, abs=1e-6)


def test_apply_L_linear():
    diags = enumerate_connectivities(2)
    f = BasisCombination.of(KAPPA, {diags[0]: 2.0, diags[1]: -0.6})
    for s in diags:
        direct = apply_L(s, f, XS4, KAPPA)
        parts = 2.0 * apply_L(s, BasisCombination.single(KAPPA, diags[0]), XS4, KAPPA) \
            - 0.6 * apply_L(s, BasisCombination.single(KAPPA, diags[1]), XS4, KAPPA)
        assert direct == pytest.approx(parts, rel=1e-6)


def test_apply_L_numeric_nesting_agrees():
    # the slow fully-nested fallback agrees with the structured path
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[1])
    s = enumerate_connectivities(2)[0]
    fast = apply_L(s, f, XS4, KAPPA)
    slow = apply_L(s, f, XS4, KAPPA, numeric_nesting=True)
    assert slow == pytest.approx(fast, rel=5e-3)


def test_order_invariance_within_class():
    # two admissible collapse orders for the same target agree
    f = BasisCombination.single(KAPPA, enumerate_connectivities(3)[0])
    target = enumerate_connectivities(3)[0]  # {01}{23}{45}: three adjacent arcs
    direct = apply_L(target, f, (0., 1., 2., 3., 4., 5.), KAPPA)

    # collapse in reversed order by relabeling through the numeric path on
    # the reduced structured combinations
    value = 1.0
    xs = [0., 1., 2., 3., 4., 5.]
    g = f
    for interval in (5, 3, 1):
        measured = collapse_limit(g, xs, interval, KAPPA)
        reduced = g.reduce_at_interval(interval)
        xs = xs[:interval - 1] + xs[interval + 1:]
        if hasattr(reduced, "coefficients"):
            value *= measured / reduced(xs)
            g = reduced
        else:
            value *= measured
    assert value == pytest.approx(direct, rel=1e-4)


def test_collapse_at_infinity_trivial():
    f = lambda xs: (xs[-1] - xs[0]) ** (1.0 - 6.0 / KAPPA)
    got = collapse_at_infinity(f, (0.0, 1.0), KAPPA)
    assert got == pytest.approx(1.0, rel=1e-6)


def test_collapse_at_infinity_weight_cases():
    # wrap arc present: reduces to the smaller-system weight at the inner points
    pi2 = weight_evaluator(2, KAPPA, n_arcs=2)   # diagram {03}{12}
    got = collapse_at_infinity(pi2, (1.0, 2.5), KAPPA)
    want = (2.5 - 1.0) ** (1.0 - 6.0 / KAPPA)    # Pi_1 of the N=1 system
    assert got == pytest.approx(want, rel=1e-4)
    # wrap arc absent: the scaled limit vanishes
    pi1 = weight_evaluator(1, KAPPA, n_arcs=2)   # diagram {01}{23}
    got = collapse_at_infinity(pi1, (1.0, 2.5), KAPPA)
    assert abs(got) < 1e-4


def test_apply_L_constant_function_numeric():
    # at kappa=6 the scaling power vanishes and every composed limit of the
    # constant function is one, via the fully numeric path
    f = lambda xs: 1.0
    for s in enumerate_connectivities(2):
        got = apply_L(s, f, XS4, 6.0)
        assert got == pytest.approx(1.0, abs=1e-9)


def test_collapse_at_infinity_n3_reduces_to_weight():
    # wrap arc present at N=3: the scaled limit is the reduced 4-point weight
    from cgw.weights import solve_weights
    pi5 = weight_evaluator(5, KAPPA, n_arcs=3)   # rainbow {05}{14}{23}
    inner = (1.0, 2.0, 3.0, 4.0)
    got = collapse_at_infinity(pi5, inner, KAPPA)
    reduced = solve_weights(inner, KAPPA)        # {03}{12} is index 2
    assert got == pytest.approx(reduced.values[1], rel=2e-3)
