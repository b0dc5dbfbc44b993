"""Fugacity, meander matrices, zeros, ranks, exceptional speeds."""
import math
from fractions import Fraction

import numpy as np
import pytest

from cgw.meander import (EightOverKappaClass, SpeedContext,
                         build_meander_matrix, central_charge,
                         classify_eight_over_kappa, determinant_zeros,
                         fugacity, is_exceptional, meander_zero, numeric_rank,
                         rank_at_zero, sign_relation_check)


@pytest.mark.parametrize("kappa,n", [(6.0, 1.0), (8 / 3, 0.0), (4.0, 2.0)])
def test_fugacity_values(kappa, n):
    assert fugacity(kappa) == pytest.approx(n, abs=1e-12)


def test_fugacity_domain():
    with pytest.raises(ValueError):
        fugacity(8.0)
    with pytest.raises(ValueError):
        fugacity(0.0)


def test_fugacity_not_injective():
    # the same fugacity arises at distinct speeds; nothing may assume inversion
    assert fugacity(6.0) == pytest.approx(fugacity(3.0), abs=1e-12)


def test_meander_matrix_n1_and_n2():
    m1 = build_meander_matrix(1, n=0.7)
    assert m1.entries.tolist() == [[0.7]]
    m2 = build_meander_matrix(2, n=0.5)
    assert m2.exponents.tolist() == [[2, 1], [1, 2]]
    assert m2.determinant() == pytest.approx(0.5 ** 4 - 0.5 ** 2)  # -0.1875


def test_meander_matrix_kappa6_all_ones():
    m = build_meander_matrix(2, kappa=6.0)
    assert np.allclose(m.entries, 1.0)
    assert numeric_rank(m, tol=1e-9) == 1


def test_meander_matrix_exponent_structure():
    for n in (2, 3, 4):
        m = build_meander_matrix(n, n=1.5)
        assert np.array_equal(m.exponents, m.exponents.T)
        assert np.all(np.diag(m.exponents) == n)
        assert np.all(m.exponents >= 1)


def test_size_limit():
    with pytest.raises(ValueError):
        build_meander_matrix(8, n=1.0)


@pytest.mark.parametrize("q,q2,val", [(2, 1, 0.0), (3, 2, 1.0), (3, 1, -1.0)])
def test_meander_zero_values(q, q2, val):
    assert meander_zero(q, q2) == val


def test_meander_zero_rejects_non_coprime():
    with pytest.raises(ValueError):
        meander_zero(4, 2)


def test_rank_at_zero_examples():
    from cgw.diagrams import catalan
    for n in range(1, 6):
        assert rank_at_zero(n, 2, 1) == 0              # zero matrix at n = 0
        if n >= 2:
            assert rank_at_zero(n, 3, 2) == 1          # all dependencies but one
        assert rank_at_zero(n, n + 1, 1) == catalan(n) - 1  # multiplicity one


def test_numeric_rank_examples():
    assert numeric_rank(build_meander_matrix(2, n=1.0), 1e-9) == 1
    assert numeric_rank(build_meander_matrix(2, n=0.5), 1e-9) == 2
    assert numeric_rank(build_meander_matrix(3, n=-1.0), 1e-9) == 1


def test_rank_matches_formula_at_all_zeros():
    for n in range(1, 6):
        for q, q2, nval in determinant_zeros(n):
            M = build_meander_matrix(n, n=nval)
            assert numeric_rank(M, 1e-9) == rank_at_zero(n, q, q2), (n, q, q2)


@pytest.mark.parametrize("n", range(1, 5))
def test_sign_relation(n):
    assert sign_relation_check(n)


def test_is_exceptional_examples():
    exc = is_exceptional(6.0, 2)
    assert (exc.q, exc.q_prime) == (3, 2)
    assert is_exceptional(6.0, 1) is None          # q = 3 > N + 1 = 2
    assert is_exceptional(math.pi, 3) is None
    assert is_exceptional(4.0, 5) is None          # q = 1 is not exceptional
    exc = is_exceptional(Fraction(8, 3))
    assert (exc.q, exc.q_prime) == (2, 3)


def test_speed_context_invariants():
    for kappa in (3.0, 4.0, 16 / 3, 6.0, 7.5):
        ctx = SpeedContext(kappa)
        assert abs(ctx.n) <= 2.0 + 1e-12
        assert ctx.central_charge <= 1.0 + 1e-12
        assert ctx.n == pytest.approx(-2 * math.cos(4 * math.pi / kappa))


def test_eight_over_kappa_classes():
    assert classify_eight_over_kappa(4.0) is EightOverKappaClass.EVEN_INTEGER
    assert classify_eight_over_kappa(8 / 3) is EightOverKappaClass.ODD_INTEGER
    assert classify_eight_over_kappa(6.0) is EightOverKappaClass.RATIONAL_NON_INTEGER
    assert classify_eight_over_kappa(math.pi) is EightOverKappaClass.IRRATIONAL


@pytest.mark.parametrize("kappa,c", [(6.0, 0.0), (4.0, 1.0), (3.0, 0.5)])
def test_central_charge_values(kappa, c):
    assert central_charge(kappa) == pytest.approx(c, abs=1e-12)


def test_determinant_nonzero_away_from_zeros():
    for n in range(1, 5):
        zeros = [z[2] for z in determinant_zeros(n)]
        for nval in np.linspace(-2, 2, 57):
            if min(abs(nval - z) for z in zeros) < 0.05:
                continue
            M = build_meander_matrix(n, n=float(nval))
            assert numeric_rank(M, 1e-9) == M.size


def test_dense_limit_n7():
    M = build_meander_matrix(7, kappa=5.0)
    assert M.size == 429
    assert np.array_equal(M.exponents, M.exponents.T)
