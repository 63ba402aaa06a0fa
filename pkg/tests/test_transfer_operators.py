from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from farey_spectra.exceptions import DomainError
from farey_spectra.laguerre_space import SpaceParams, norm_e
from farey_spectra.transfer_operators import (GOLDEN, assemble_derived, assemble_M, assemble_N, build_operator,
                                              drift_diagnostic, exact_gram_table, golden_eigenvalue, m_diagonal,
                                              n_diagonal, n_eigensystem_check, nuclearity_series, operator_norm,
                                              pair_family, positivity_form, q_kernel_checks, spectral_radius,
                                              spectrum, spectrum_report, verify_structure)


@pytest.fixture(scope="module")
def params() -> SpaceParams:
    return SpaceParams(1, 40)


def test_golden_eigenvalues() -> None:
    assert golden_eigenvalue(1, 0) == pytest.approx(GOLDEN ** 2)
    assert golden_eigenvalue(1, 1) == pytest.approx(-GOLDEN ** 4)
    assert golden_eigenvalue(Fraction(1, 2), 2) == pytest.approx(GOLDEN ** 5)


def test_gram_table_corner() -> None:
    table = exact_gram_table(SpaceParams(1, 10))
    assert table.value(0, 0) == Fraction(1, 4)
    assert table.m_gram(0, 0) == Fraction(1, 4)
    with pytest.raises(DomainError):
        exact_gram_table(SpaceParams(0.8, 10))


def test_gram_table_matches_assembled_m() -> None:
    params = SpaceParams(Fraction(3, 2), 12)
    table = exact_gram_table(params)
    M = assemble_M(params).entries
    for n in range(6):
        for m in range(6):
            expected = float(table.m_gram(n, m)) / (norm_e(params, n) * norm_e(params, m))
            assert M[n, m] == pytest.approx(expected, rel=1e-10, abs=1e-13)


def test_m_is_a_contraction(params) -> None:
    M = assemble_M(params)
    assert M.symmetric and M.symmetry_defect() == 0.0
    values = spectrum(M).eigenvalues
    assert values.max() <= 1.0 and values.min() >= -1e-12


def test_n_trace_and_norm(params) -> None:
    N = assemble_N(params)
    assert N.trace() == pytest.approx(GOLDEN ** 2 / (1 + GOLDEN ** 2), rel=1e-8)
    assert operator_norm(N) == pytest.approx(GOLDEN ** 2, rel=1e-8)
    assert spectral_radius(N) == pytest.approx(GOLDEN ** 2, rel=1e-8)


@pytest.mark.parametrize("q", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_n_eigenvalues_are_golden_powers(q) -> None:
    values = spectrum(assemble_N(SpaceParams(q, 40))).eigenvalues
    by_magnitude = sorted(values, key=lambda v: -abs(v))
    for k in range(5):
        assert by_magnitude[k] == pytest.approx(golden_eigenvalue(q, k), abs=1e-8)


def test_kernel_route_matches_exact_route() -> None:
    small = SpaceParams(1, 12)
    exact = assemble_N(small, 'exact').entries
    kernel = assemble_N(small, 'kernel').entries
    assert np.max(np.abs(exact - kernel)) <= 1e-8
    with pytest.raises(DomainError):
        assemble_N(small, 'bessel')


def test_real_q_uses_kernel_route() -> None:
    N = assemble_N(SpaceParams(0.8, 16))
    assert spectral_radius(N) == pytest.approx(GOLDEN ** 1.6, rel=1e-4)


def test_p_operators_are_confined(params) -> None:
    for kind in ('P+', 'P-'):
        values = spectrum(build_operator(params, kind)).eigenvalues
        assert values.min() >= -1e-10
        assert values.max() <= 1 + 1e-10


def test_q_operators_are_exact(params) -> None:
    for kind in ('Q+', 'Q-'):
        Q = assemble_derived(params, kind)
        assert Q.exact_entries is not None
        assert spectral_radius(Q) == 2.0
        with pytest.raises(DomainError):
            spectrum(Q)
    with pytest.raises(DomainError):
        assemble_M(params).apply_exact([1])
    with pytest.raises(DomainError):
        assemble_derived(params, 'R')


def test_j_operator_spectral_radius() -> None:
    small = SpaceParams(1, 10)
    J = build_operator(small, 'J')
    assert J.kind == 'J' and not J.symmetric
    assert spectral_radius(J) > 0


def test_perturbed_copy(params) -> None:
    N = assemble_N(params)
    shifted = N.perturbed(0, 0, 1e-3)
    assert shifted.trace() - N.trace() == pytest.approx(1e-3)
    assert shifted.symmetry_defect() == 0.0
    assert N.perturbed(0, 1, 1e-3).symmetry_defect() == pytest.approx(1e-3)
    assert len(N.to_frame()) == 40 * 40


def test_positivity_forms_split_into_diagonals() -> None:
    params = SpaceParams(1, 10)
    for n in range(6):
        for sign in (1, -1):
            assert positivity_form(params, n, sign) == m_diagonal(params, n) + sign * n_diagonal(params, n)
        assert positivity_form(params, n, 1) > 0


def test_pair_family_degrees() -> None:
    params = SpaceParams(1, 12)
    assert pair_family(params, 2).degree(1) == 2
    assert pair_family(params, 2).degree(-1) == 1
    assert pair_family(params, 3).degree(1) == 2
    assert pair_family(params, 3).degree(-1) == 3
    with pytest.raises(DomainError):
        pair_family(params, 12)


@pytest.mark.parametrize("q", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_verify_structure_passes(q) -> None:
    report = verify_structure(SpaceParams(q, 20), 6)
    failed = [c['id'] for c in report['checks'] if not c['passed']]
    assert report['success'], failed
    with pytest.raises(DomainError):
        verify_structure(SpaceParams(q, 6), 6)


def test_q_kernel_checks_are_exact() -> None:
    checks = q_kernel_checks(SpaceParams(2, 20), 10)
    assert len(checks) == 40
    assert all(c['passed'] for c in checks)
    assert all(c['tolerance'] == 0 for c in checks)


def test_n_eigensystem(params) -> None:
    report = n_eigensystem_check(params, 4)
    assert report['success']
    assert report['data']['norm'] == pytest.approx(GOLDEN ** 2, rel=1e-8)
    with pytest.raises(DomainError):
        n_eigensystem_check(params, 9)


def test_nuclearity_series_converges() -> None:
    frame = nuclearity_series(SpaceParams(1, 10), 60)
    assert list(frame.columns) == ['n', 'term', 'partial_sum', 'ratio']
    assert frame['partial_sum'].is_monotonic_increasing
    assert frame['ratio'].iloc[-1] == pytest.approx(2.0 / 3.0, rel=0.05)


def test_drift_diagnostic_sizes() -> None:
    result = drift_diagnostic(SpaceParams(1, 12))
    assert result.K == 12
    assert 0.0 <= result.eigenvalue_K <= 1.0
    assert 0.0 <= result.eigenvalue_2K <= 1.0
    assert result.drift == abs(result.eigenvalue_2K - result.eigenvalue_K)


@pytest.mark.parametrize("kind", ['M', 'N', 'P+', 'P-'])
def test_spectrum_report(params, kind) -> None:
    report = spectrum_report(params, kind, top=5)
    assert report['success']
    assert report['metadata']['params']['kind'] == kind
    assert len(report['data']['eigenvalues']) == 40
    assert max(report['data']['residuals']) < 1e-10


@pytest.mark.slow
def test_large_truncation_keeps_golden_spectrum() -> None:
    params = SpaceParams(Fraction(1, 2), 80)
    values = sorted(spectrum(assemble_N(params)).eigenvalues, key=lambda v: -abs(v))
    for k in range(8):
        assert values[k] == pytest.approx(golden_eigenvalue(Fraction(1, 2), k), abs=1e-10)
    assert math.isclose(assemble_N(params).trace(), GOLDEN / (1 + GOLDEN ** 2), rel_tol=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("q", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_n_eigensystem_at_default_truncation(q) -> None:
    params = SpaceParams(q, 80)
    report = n_eigensystem_check(params, 5)
    assert report['success']
    assert len(report['checks']) == 2 * 6 + 1
    values = sorted(spectrum(assemble_N(params)).eigenvalues, key=lambda v: -abs(v))
    for k in range(5):
        assert values[k] == pytest.approx(golden_eigenvalue(q, k), abs=1e-8)
