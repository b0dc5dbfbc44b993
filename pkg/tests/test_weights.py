"""Connectivity weights, crossing probabilities, Theta, regularized paths."""
import math
import warnings

import numpy as np
import pytest

from cgw.diagrams import enumerate_connectivities
from cgw.evaluators import BasisCombination
from cgw.limits import apply_L, collapse_limit
from cgw.meander import fugacity
from cgw.weights import (SingularSpeedError, build_theta,
                         crossing_probabilities, decompose, fusion_power,
                         multi_collapse_limit, regularized_basis_element,
                         regularized_weights, rainbow_extended_basis_check,
                         solve_weights, theta_expected_pattern,
                         theta_identity_report, weight_evaluator)

XS4 = (0.0, 1.0, 2.0, 3.0)
KAPPA = 5.0


def test_n1_weight_closed_form():
    w = solve_weights((0.0, 2.0), KAPPA)
    assert w.values[0] == pytest.approx(2.0 ** (1.0 - 6.0 / KAPPA), rel=1e-10)
    assert w.provenance == "solved_from_meander"


def test_solve_refuses_singular_speed():
    with pytest.raises(SingularSpeedError):
        solve_weights(XS4, 6.0)


@pytest.mark.parametrize("kappa", [5.0, 16 / 3, 20 / 3])
def test_duality_matrix(kappa):
    diags = enumerate_connectivities(2)
    for ti in (1, 2):
        pi = weight_evaluator(ti, kappa, n_arcs=2)
        for si, s in enumerate(diags):
            got = apply_L(s, pi, XS4, kappa)
            assert got == pytest.approx(1.0 if si == ti - 1 else 0.0, abs=1e-3)


def test_decompose_examples():
    n = fugacity(KAPPA)
    diags = enumerate_connectivities(2)
    # weights are dual: coefficients are a Kronecker delta
    a = decompose(weight_evaluator(2, KAPPA, n_arcs=2), XS4, KAPPA)
    assert np.allclose(a, [0.0, 1.0], atol=1e-3)
    # basis functions decompose with the meander column
    a = decompose(BasisCombination.single(KAPPA, diags[0]), XS4, KAPPA)
    assert np.allclose(a, [n ** 2, n], rtol=1e-3)
    # synthetic combination recovers its coefficients
    f = weight_evaluator(1, KAPPA, n_arcs=2).scaled(2.0).plus(
        weight_evaluator(2, KAPPA, n_arcs=2).scaled(3.0))
    a = decompose(f, XS4, KAPPA)
    assert np.allclose(a, [2.0, 3.0], atol=3e-3)


def test_reconstruction_identity():
    # sum a_sigma Pi_sigma(x) equals F(x)
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[1])
    a = decompose(f, XS4, KAPPA)
    w = solve_weights(XS4, KAPPA)
    assert float(a @ w.values) == pytest.approx(f(XS4), rel=1e-4)


def test_crossing_on_weights_is_delta():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dist = crossing_probabilities(weight_evaluator(1, KAPPA, n_arcs=2),
                                      XS4, KAPPA)
    assert np.allclose(dist.probs, [1.0, 0.0], atol=1e-3)


def test_crossing_n1_trivial():
    dist = crossing_probabilities(weight_evaluator(1, KAPPA, n_arcs=1),
                                  (0.0, 1.0), KAPPA)
    assert dist.probs.tolist() == [1.0]


def test_crossing_sums_to_one_and_matches_partition():
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    dist = crossing_probabilities(f, XS4, KAPPA)
    assert float(np.sum(dist.probs)) == pytest.approx(1.0, abs=1e-15)
    assert dist.partition_value == pytest.approx(f(XS4), rel=1e-4)
    assert not dist.negative_entries


def test_theta_pattern_and_identity_n2():
    pattern = theta_expected_pattern(1, 1, 2)
    assert math.isnan(pattern[0]) and pattern[1] == 1.0
    rep = theta_identity_report(1, 1, 2, KAPPA, XS4)
    assert rep.expected[0] == pytest.approx(fugacity(KAPPA))
    assert rep.max_error < 1e-3


def test_theta_collapse_gives_fugacity_times_reduced():
    # collapsing the inserted interval leaves n times the original weight
    theta = build_theta(1, 2, 2, KAPPA)
    got = collapse_limit(theta, XS4, 2, KAPPA)
    want = fugacity(KAPPA) * (3.0 - 0.0) ** (1.0 - 6.0 / KAPPA)
    assert got == pytest.approx(want, rel=1e-5)


def test_build_theta_rejects_singular_reduced_matrix():
    with pytest.raises(SingularSpeedError):
        build_theta(1, 1, 3, 6.0)  # reduced system is 2x2 and singular at 6


def test_regularized_basis_n1():
    # the dropped fugacity is the only n factor at N=1
    kappa = 8.0 / 3.0
    got = regularized_basis_element(1, (0.0, 2.0), kappa)
    assert got == pytest.approx(2.0 ** (1.0 - 6.0 / kappa), rel=1e-8)


def test_regularized_basis_n2_finite_nonzero():
    kappa = 8.0 / 3.0
    for theta in (1, 2):
        got = regularized_basis_element(theta, XS4, kappa)
        assert math.isfinite(got) and abs(got) > 1e-3


def test_regularized_images_full_rank_at_eight_fifths():
    # at kappa = 8/5 the normalized elements span the full space
    kappa = 8.0 / 5.0
    rows = []
    for theta in (1, 2):
        f = lambda ys, t=theta: regularized_basis_element(t, ys, kappa)
        rows.append([apply_L(s, f, XS4, kappa)
                     for s in enumerate_connectivities(2)])
    assert np.linalg.matrix_rank(np.array(rows), tol=1e-3) == 2


def test_regularized_weights_at_kappa6():
    w = regularized_weights(XS4, 6.0)
    assert w.provenance == "limit_regularized"
    assert np.all(np.isfinite(w.values))
    # the weights must still sum against the all-ones matrix to F = 1
    assert float(np.sum(w.values)) == pytest.approx(1.0, rel=1e-4)


def test_rainbow_extension_restores_rank():
    out = rainbow_extended_basis_check(2, 6.0, XS4)
    assert out["rank_basis_images"] == 1
    assert out["rank_extended"] == 2


def test_fusion_power_values():
    assert fusion_power(2, KAPPA) == pytest.approx(4.0 / KAPPA)
    assert fusion_power(1, 6.0) == pytest.approx(1.0 / 3.0)


def test_multi_collapse_limit_selects_rainbow():
    pi2 = weight_evaluator(2, KAPPA, n_arcs=2)   # rainbow weight for N=2
    value, exists = multi_collapse_limit(pi2, XS4, KAPPA)
    assert exists and math.isfinite(value)
    f1 = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    _, exists = multi_collapse_limit(f1, XS4, KAPPA)
    assert not exists


def test_decompose_recovers_random_coefficients():
    rng = np.random.default_rng(11)
    for _ in range(3):
        a = rng.uniform(-2, 2, size=2)
        f = weight_evaluator(1, KAPPA, n_arcs=2).scaled(float(a[0])).plus(
            weight_evaluator(2, KAPPA, n_arcs=2).scaled(float(a[1])))
        got = decompose(f, XS4, KAPPA)
        assert np.allclose(got, a, atol=1e-3 * max(1, np.max(np.abs(a))))


def test_weight_collapse_reproduces_reduced_weight():
    # collapsing an on-arc interval of a weight gives the solved weight of
    # the smaller system at the surviving points
    xs6 = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    pi1 = weight_evaluator(1, KAPPA, n_arcs=3)     # {01}{23}{45}
    got = collapse_limit(pi1, xs6, 1, KAPPA)
    reduced = solve_weights((2.0, 3.0, 4.0, 5.0), KAPPA)
    assert got == pytest.approx(reduced.values[0], rel=1e-3)


def test_duality_n3_spot_check():
    xs6 = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    diags = enumerate_connectivities(3)
    pi = weight_evaluator(4, KAPPA, n_arcs=3)
    got = [apply_L(s, pi, xs6, KAPPA) for s in diags]
    want = [0.0, 0.0, 0.0, 1.0, 0.0]
    assert np.allclose(got, want, atol=2e-3)
