"""Frobenius fits, interval classification, conditioned limits."""
import warnings

import numpy as np
import pytest

from cgw.diagrams import enumerate_connectivities
from cgw.evaluators import BasisCombination
from cgw.frobenius import (CftIntervalType, SleIntervalType, classify_interval,
                           conditioned_probability_limits, detect_log_term,
                           fit_expansion, leading_exponent)
from cgw.pde import null_state_residual, ward_residuals
from cgw.weights import regularized_weights, weight_evaluator

XS4 = (0.0, 1.0, 2.0, 3.0)
KAPPA = 5.0


def test_fit_n1_closed_form():
    f = lambda xs: (xs[1] - xs[0]) ** (1.0 - 6.0 / KAPPA)
    fit = fit_expansion(f, (0.0, 1.5), 1, KAPPA)
    assert fit.a0 == pytest.approx(1.0, abs=1e-8)
    assert abs(fit.b0) < 1e-8 and abs(fit.a1) < 1e-8
    assert fit.indicial_powers == (1.0 - 6.0 / KAPPA, 2.0 / KAPPA)


def test_fit_exponents_match_indicial_powers():
    f_on = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    assert leading_exponent(f_on, XS4, 1) == pytest.approx(1 - 6 / KAPPA, abs=1e-3)
    pi2 = weight_evaluator(2, KAPPA, n_arcs=2)
    assert leading_exponent(pi2, XS4, 1) == pytest.approx(2 / KAPPA, abs=1e-3)


def test_fit_a1_vanishes_off_four():
    for kappa in (5.0, 16 / 3):
        f = BasisCombination.single(kappa, enumerate_connectivities(2)[0])
        fit = fit_expansion(f, XS4, 1, kappa)
        assert abs(fit.a1) < 1e-4 * fit.scale


def test_a0_is_reduced_system_solution():
    # the collapse limit, as a function of the surviving points, solves the
    # smaller system
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    reduced = f.reduce_at_interval(1)
    xs2 = (2.0, 3.0)
    for j in (1, 2):
        assert null_state_residual(reduced, xs2, j, KAPPA) < 1e-3
    assert max(ward_residuals(reduced, xs2, KAPPA)) < 1e-3


def test_classify_weight_intervals():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pi1 = weight_evaluator(1, KAPPA, n_arcs=2)  # diagram {01}{23}
        on = classify_interval(pi1, XS4, 1, KAPPA)
        assert on.sle_type is SleIntervalType.CONTRACTIBLE
        off = classify_interval(pi1, XS4, 2, KAPPA)
        assert off.sle_type is SleIntervalType.PROPAGATING
        assert off.cft_type is CftIntervalType.TWO_LEG


def test_classify_basis_identity_interval():
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    cls = classify_interval(f, XS4, 1, KAPPA)
    assert cls.cft_type is CftIntervalType.IDENTITY
    assert cls.sle_type is SleIntervalType.MIXED


def test_propagating_iff_two_leg_on_mixtures():
    rng = np.random.default_rng(7)
    diags = enumerate_connectivities(2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(4):
            coeffs = rng.normal(size=2)
            pi1 = weight_evaluator(1, KAPPA, n_arcs=2).scaled(float(coeffs[0]))
            pi2 = weight_evaluator(2, KAPPA, n_arcs=2).scaled(float(coeffs[1]))
            f = pi1.plus(pi2)
            cls = classify_interval(f, XS4, 1, KAPPA)
            assert (cls.sle_type is SleIntervalType.PROPAGATING) == \
                (cls.cft_type is CftIntervalType.TWO_LEG)


def test_classify_two_leg_at_fugacity_zero():
    # at n = 0 the would-be identity insertion is a two-leg interval instead
    kappa = 8.0 / 3.0

    def theta_reg(xs):  # Theta = 0*Pi_1 + Pi_2 by the cut-map identity
        return regularized_weights(xs, kappa).values[1]

    cls = classify_interval(theta_reg, XS4, 1, kappa,
                            coefficients=[0.0, 1.0], coef_floor=1e-3)
    assert cls.cft_type is CftIntervalType.TWO_LEG
    assert cls.sle_type is SleIntervalType.PROPAGATING


def test_undefined_identity_label_for_odd_case():
    kappa = 8.0 / 3.0
    from cgw.weights import regularized_combination
    f = regularized_combination([1.0, 0.4], kappa)
    cls = classify_interval(f, XS4, 1, kappa, coefficients=[1.0, 0.4],
                            coef_floor=1e-3)
    assert cls.cft_type in (CftIntervalType.UNDEFINED_IDENTITY,
                            CftIntervalType.INDETERMINATE)


def test_no_log_detected_off_odd_integers():
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    assert abs(detect_log_term(f, XS4, 1, KAPPA)) < 1e-4


def test_conditioned_limits_n2_trivial():
    # one contractible class: its conditional limit is forced to one
    f = BasisCombination.single(KAPPA, enumerate_connectivities(2)[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lim = conditioned_probability_limits(f, XS4, 1, KAPPA)
    assert lim.contractible_limits[0] == pytest.approx(1.0, abs=1e-3)
    assert lim.reduced_probs[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(lim.propagating_limits) < 1e-3)


def test_conditioned_limits_n3_match_reduced_oracle():
    xs6 = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    f = BasisCombination.single(KAPPA, enumerate_connectivities(3)[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lim = conditioned_probability_limits(f, xs6, 3, KAPPA)
    assert np.max(np.abs(lim.contractible_limits - lim.reduced_probs)) < 1e-3
    assert np.max(np.abs(lim.propagating_limits)) < 1e-3


def test_classify_wrap_interval():
    # the interval through infinity: SLE side works, CFT side reduces to the
    # propagating/two-leg equivalence
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pi1 = weight_evaluator(1, KAPPA, n_arcs=2)   # {01}{23}: no wrap arc
        cls = classify_interval(pi1, XS4, 4, KAPPA)
        assert cls.sle_type is SleIntervalType.PROPAGATING
        assert cls.cft_type is CftIntervalType.TWO_LEG
        assert cls.fit is None
        pi2 = weight_evaluator(2, KAPPA, n_arcs=2)   # {03}{12}: wrap arc
        cls = classify_interval(pi2, XS4, 4, KAPPA)
        assert cls.sle_type is SleIntervalType.CONTRACTIBLE
