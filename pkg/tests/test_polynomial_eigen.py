from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from farey_spectra.exceptions import DomainError, SpectralError
from farey_spectra.polynomial_eigen import (PALINDROME, SKEW, MkMatrix, PolyEigenpair, bernoulli_eigenfunction,
                                            bernoulli_laurent, build_mk, classify, eigenpair_to_eigenfunction,
                                            exact_eigenpairs, leading_bounds, leading_pair, mk_spectra, mk_spectrum,
                                            period_function_odd_part, period_search, period_search_table,
                                            printed_min_row_sum, pseudo_scalar, pseudo_scalar_checks, row_sums,
                                            skew_fixed_vector_check, transfer_plus, warmup_table)

M4 = ((2, 4, 6, 4, 1), (1, 2, 3, 3, 1), (1, 2, 2, 2, 1), (1, 3, 3, 2, 1), (1, 4, 6, 4, 2))
ROOT113 = math.sqrt(113.0)


def test_m4_entries() -> None:
    assert build_mk(4).entries == M4
    assert row_sums(build_mk(4)) == [17, 10, 8, 10, 17]
    assert build_mk(0).entries == ((2,),)


def test_structure_is_checked_on_construction() -> None:
    broken = tuple(tuple(v + (1 if (i, j) == (0, 0) else 0) for j, v in enumerate(row)) for i, row in enumerate(M4))
    with pytest.raises(SpectralError):
        MkMatrix(4, broken)
    with pytest.raises(DomainError):
        build_mk(-1)


@pytest.mark.parametrize("k", range(1, 12))
def test_row_and_column_sums(k) -> None:
    matrix = build_mk(k)
    assert row_sums(matrix) == [2 ** i + 2 ** (k - i) for i in range(k + 1)]
    assert matrix.apply_transposed([1] * (k + 1)) == [math.comb(k + 2, j + 1) for j in range(k + 1)]
    assert skew_fixed_vector_check(k)


def test_m4_spectrum() -> None:
    pairs = mk_spectrum(4)
    expected = [(11 + ROOT113) / 2, 1.0, (11 - ROOT113) / 2, -1.0, -1.0]
    assert [p.lam for p in pairs] == pytest.approx(expected, abs=1e-12)
    assert pairs[0].palindrome_class == PALINDROME
    assert pairs[0].b[0] == pytest.approx(1.0)
    assert all(p.residual < 1e-10 for p in pairs)
    assert all(p.palindrome_class in (PALINDROME, SKEW) for p in pairs)


@pytest.mark.parametrize("k", range(1, 14))
def test_spectrum_splits_by_reflection(k) -> None:
    pairs = mk_spectrum(k)
    assert len(pairs) == k + 1
    assert sum(p.palindrome_class == PALINDROME for p in pairs) == k // 2 + 1
    for pair in pairs:
        assert classify(pair.b) == pair.palindrome_class
    eigenvalues = np.sort(np.linalg.eigvals(build_mk(k).array()).real)[::-1]
    assert [p.lam for p in pairs] == pytest.approx(list(eigenvalues), abs=1e-6)


def test_mk_spectra_matches_serial() -> None:
    batch = mk_spectra([2, 3, 5], workers=2)
    assert set(batch) == {2, 3, 5}
    assert [p.lam for p in batch[5]] == [p.lam for p in mk_spectrum(5)]


def test_warmup_table() -> None:
    table = warmup_table()
    assert list(table.columns) == ['q', 'k', 'lambda', 'coefficients', 'polynomial']
    assert list(table['q']) == ['0', '-1/2', '-1', '-3/2', '-2']
    expected = [2.0, 3.0, (5 + math.sqrt(17.0)) / 2, 7.0, (11 + ROOT113) / 2]
    assert table['lambda'].tolist() == pytest.approx(expected, abs=1e-12)
    beta17 = (math.sqrt(17.0) - 1) / 2
    beta113 = (ROOT113 - 1) / 4
    polynomials = [(1,), (1, 1), (1, beta17, 1), (1, 2, 2, 1), (1, beta113, 3, beta113, 1)]
    for row, coefficients in zip(table['coefficients'], polynomials):
        assert list(row) == pytest.approx(coefficients, abs=1e-12)
    assert table['polynomial'][3] == 'x^3 + 2*x^2 + 2*x + 1'


def test_classify() -> None:
    assert classify([1, 2, 1]) == PALINDROME
    assert classify([1, 0, -1]) == SKEW
    assert classify([1, 2, 3]) == 'mixed'


def test_exact_eigenpairs_for_m4() -> None:
    pairs = exact_eigenpairs(4)
    assert len(pairs) == 5
    assert [p.lam for p in pairs] == pytest.approx([p.lam for p in mk_spectrum(4)], abs=1e-12)
    top = pairs[0]
    assert top.exact
    assert sympy.simplify(top.exact_lam - (11 + sympy.sqrt(113)) / 2) == 0
    assert top.exact_b[0] == 1
    assert top.palindrome_class == PALINDROME


@pytest.mark.parametrize("k", [2, 3, 4])
def test_exact_eigenfunctions_satisfy_three_term_equation(k) -> None:
    for pair in exact_eigenpairs(k):
        function = eigenpair_to_eigenfunction(k, pair)
        assert function.report['success'], function.report['checks']
        assert function.report['metadata']['method'] == 'exact'


@pytest.mark.parametrize("k", [5, 8, 11])
def test_numeric_eigenfunctions_satisfy_three_term_equation(k) -> None:
    for pair in mk_spectrum(k):
        if abs(pair.lam) < 1e-8:
            continue
        function = eigenpair_to_eigenfunction(k, pair)
        assert function.report['success'], [c for c in function.report['checks'] if not c['passed']]


def test_leading_eigenfunction_ratios() -> None:
    pair = leading_pair(2)
    function = eigenpair_to_eigenfunction(2, pair)
    assert pair.lam == pytest.approx(1 + function(1.0) / function(0.0))
    assert 'x' in function.render()


def test_zero_eigenvalue_is_rejected() -> None:
    pair = PolyEigenpair(4, 0.0, (1.0, 0.0, 0.0, 0.0, 1.0), PALINDROME)
    with pytest.raises(DomainError):
        eigenpair_to_eigenfunction(4, pair)


def test_leading_bounds_k4() -> None:
    bounds = leading_bounds(4)
    assert (bounds.S, bounds.s, bounds.s_printed) == (17, 8, 10)
    assert bounds.lower == pytest.approx(9.0)
    assert bounds.upper == pytest.approx(16 + 14 / (15 + math.sqrt(253.0)))
    assert bounds.lam == pytest.approx((11 + ROOT113) / 2)
    assert bounds.contains()
    assert set(bounds.as_dict()) >= {'lower', 'upper', 'lower_printed', 'upper_printed'}


def test_printed_row_sum_excludes_k2_eigenvalue() -> None:
    bounds = leading_bounds(2)
    assert bounds.s == 4 and printed_min_row_sum(2) == 5
    assert bounds.contains()
    assert bounds.lower_printed > bounds.lam


def test_leading_bounds_collapse_for_k1() -> None:
    bounds = leading_bounds(1)
    assert (bounds.lower, bounds.upper, bounds.lam) == pytest.approx((3.0, 3.0, 3.0))
    with pytest.raises(DomainError):
        leading_bounds(0)


@pytest.mark.parametrize("k", range(1, 16))
def test_leading_bounds_hold(k) -> None:
    assert leading_bounds(k).contains()


def test_bernoulli_laurent_low_orders() -> None:
    f0 = bernoulli_laurent(0)
    assert f0.support() == [-1, 0, 1]
    assert f0.coefficients[-1] == Fraction(1, 12)
    assert f0.coefficients[0] == Fraction(-1, 4)
    assert f0.coefficients[1] == Fraction(1, 12)
    f2 = bernoulli_laurent(2)
    assert f2.coefficients[-1] == Fraction(-1, 360)
    assert f2.coefficients[1] == Fraction(5, 360)
    assert f2.coefficients[3] == Fraction(-1, 360)
    assert f2.support() == [-1, 1, 3]


@pytest.mark.parametrize("k", range(0, 9))
def test_bernoulli_eigenfunctions(k) -> None:
    f, report = bernoulli_eigenfunction(k)
    assert report['success']
    if k % 2:
        assert f.is_zero()
    else:
        assert transfer_plus(f, k, Fraction(5, 7)) == f(Fraction(5, 7))


def test_period_function_odd_part() -> None:
    odd = period_function_odd_part(2)
    assert odd.coefficients[0] == 0 and odd.coefficients[2] == 0
    assert odd.coefficients[-1] == Fraction(-1, 720)
    with pytest.raises(DomainError):
        period_function_odd_part(0)


def test_pseudo_scalar() -> None:
    assert pseudo_scalar([1, 2, 3], [4, 5, 6]) == 1 * 6 + 2 * 5 + 3 * 4
    for k in (2, 5, 9):
        report = pseudo_scalar_checks(k, trials=4, seed=3)
        assert report['success']
        assert sum(c['id'].startswith(f"rem4.2-adjoint-k{k}") for c in report['checks']) == 4


def test_period_search() -> None:
    row = period_search(4)
    assert (row['dimension'], row['palindromic'], row['skew']) == (1, 0, 1)
    assert row['unit_skew_fixed']
    assert (period_search(1)['dimension'], period_search(1)['skew']) == (1, 1)
    table = period_search_table(5, workers=2)
    assert list(table['k']) == [1, 2, 3, 4, 5]
    assert (table['skew'] >= 1).all()
    with pytest.raises(DomainError):
        period_search(0)
