from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from farey_spectra.exceptions import AccuracyWarning, DomainError
from farey_spectra.hankel import (HankelKind, ReciprocalFamily, biorthogonality_matrix, change_of_variables_residual,
                                  expansion_through_pairs, family_eval, hankel_apply, laplace_pair_residual,
                                  mellin_numeric, mellin_symmetry_check, mellin_weighted, mellin_weighted_sum,
                                  ode_residual, reciprocity_residual, sample_table, smallphi_gram)
from farey_spectra.special_functions import hyp2f1_terminating, rising_factorial


def test_kind_and_family_validation() -> None:
    with pytest.raises(DomainError):
        HankelKind('H', 1.0)
    with pytest.raises(DomainError):
        HankelKind('J', -1.0)
    with pytest.raises(DomainError):
        ReciprocalFamily('chi', 1.0, 0)
    with pytest.raises(DomainError):
        ReciprocalFamily('phi', 1.0, -1)
    with pytest.raises(DomainError):
        family_eval(ReciprocalFamily('phi', 1.0, 0), -0.5)


def test_family_signs_and_transforms() -> None:
    assert ReciprocalFamily('phi', 1.0, 3).sign == -1
    assert ReciprocalFamily('psi', 1.0, 2).sign == 1
    assert ReciprocalFamily('h+', 1.0, 3).sign == 1
    assert ReciprocalFamily('h-', 1.0, 2).sign == -1
    assert ReciprocalFamily('psi', 1.0, 0).transform.tag == 'Jtilde'
    assert ReciprocalFamily('smallphi', 1.0, 0).transform.tag == 'K'
    assert ReciprocalFamily('h-', 1.0, 0).transform.tag == 'J'


def test_exponential_is_fixed_by_j() -> None:
    kind = HankelKind('J', 0.0)
    t = np.array([0.25, 1.0, 2.5])
    assert hankel_apply(kind, lambda s: np.exp(-s), t) == pytest.approx(np.exp(-t), abs=1e-8)
    assert isinstance(hankel_apply(kind, lambda s: np.exp(-s), 1.0), float)


def test_hankel_apply_rejects_bad_input() -> None:
    kind = HankelKind('J', 1.0)
    with pytest.raises(DomainError):
        hankel_apply(kind, lambda s: np.exp(-s), 0.0)
    with pytest.warns(AccuracyWarning):
        hankel_apply(kind, lambda s: 1.0 / (1.0 + s) ** 2, 1.0)


@pytest.mark.parametrize("p", [0.0, 1.0, 2.0])
@pytest.mark.parametrize("kind", ['phi', 'psi', 'smallphi'])
def test_families_are_self_reciprocal(kind, p) -> None:
    report = reciprocity_residual(kind, p, 4)
    assert report['success'], report['data']['residuals']
    assert report['metadata']['method'] == 'quadrature'


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.0, 1.0, 2.0])
@pytest.mark.parametrize("kind", ['phi', 'psi', 'smallphi'])
def test_families_are_self_reciprocal_up_to_degree_eight(kind, p) -> None:
    report = reciprocity_residual(kind, p, 8)
    assert report['success'], report['data']['residuals']
    assert len(report['checks']) == 9


@pytest.mark.parametrize("kind", ['h+', 'h-'])
def test_pairs_are_self_reciprocal(kind) -> None:
    for p in (0.0, 1.0):
        assert reciprocity_residual(kind, p, 4)['success']


def test_reciprocity_cap() -> None:
    with pytest.raises(DomainError):
        reciprocity_residual('phi', 1.0, 9)


@pytest.mark.parametrize("p", [0.0, 1.5])
def test_biorthogonality_and_gram(p) -> None:
    assert np.allclose(biorthogonality_matrix(p, 6), np.eye(7), atol=1e-10)
    assert np.allclose(smallphi_gram(p, 6), np.eye(7), atol=1e-10)


@pytest.mark.parametrize("p", [0.0, 1.0, 2.0])
def test_biorthogonality_up_to_degree_eight(p) -> None:
    np.testing.assert_allclose(biorthogonality_matrix(p, 8), np.eye(9), rtol=0, atol=1e-8)
    np.testing.assert_allclose(smallphi_gram(p, 8), np.eye(9), rtol=0, atol=1e-8)


def test_mellin_forms_agree() -> None:
    for n in range(6):
        for s in (Fraction(1, 3), Fraction(3, 2), Fraction(4)):
            assert mellin_weighted(1, n, s) == mellin_weighted_sum(1, n, s)
            assert mellin_numeric(1.0, n, float(s)) == pytest.approx(float(mellin_weighted(1, n, s)),
                                                                     rel=1e-10, abs=1e-12)
    assert mellin_weighted(Fraction(1, 2), 0, Fraction(7, 5)) == 1
    with pytest.raises(DomainError):
        mellin_numeric(1.0, 2, 0.0)


@pytest.mark.parametrize("p", [0, 1, Fraction(3, 2), 2])
def test_mellin_symmetry(p) -> None:
    report = mellin_symmetry_check(p, 6)
    assert report['success']
    assert report['metadata']['params']['s_samples'][2] == '1/2'


@pytest.mark.parametrize("p", [0, 1, 2])
def test_mellin_mirror_is_pfaff_at_two(p) -> None:
    c = Fraction(p + 1)
    for n in range(21):
        prefactor = rising_factorial(c, n) / math.factorial(n)
        for s in (Fraction(1, 3), Fraction(7, 5), Fraction(-2)):
            assert mellin_weighted(p, n, s) == prefactor * hyp2f1_terminating(n, s, c, 2)
            mirrored = (-1) ** n * mellin_weighted(p, n, c - s)
            assert mirrored == (-1) ** n * prefactor * hyp2f1_terminating(n, c - s, c, 2)
            assert mirrored == mellin_weighted(p, n, s)


def test_mellin_symmetry_rejects_negative_p() -> None:
    with pytest.raises(DomainError):
        mellin_symmetry_check(Fraction(-1, 2), 2)


def test_laplace_pairs() -> None:
    for n in range(5):
        assert max(laplace_pair_residual(1.0, n)) < 1e-10


def test_change_of_variables() -> None:
    for n in range(5):
        assert change_of_variables_residual(1.5, n, (0.3, 1.0, 2.0)) < 1e-12


def test_expansion_through_pairs() -> None:
    t = np.array([0.2, 1.0, 3.0])
    for n in range(4):
        result = expansion_through_pairs(1.0, n, t)
        assert result['residual'] < 1e-10
        transformed = hankel_apply(HankelKind('J', 1.0), ReciprocalFamily('phi', 1.0, n), t)
        assert result['J_phi'] == pytest.approx(transformed, abs=1e-7)


def test_ode_residual() -> None:
    report = ode_residual(1.5, 2, (1.0, 2.0, 3.0))
    assert report['success']
    assert report['metadata']['method'] == 'finite-difference'
    with pytest.raises(DomainError):
        ode_residual(0.5, 2, (1.0,))
    with pytest.raises(DomainError):
        ode_residual(1.5, 2, (0.2,))


def test_sample_table() -> None:
    frame = sample_table(ReciprocalFamily('phi', 1.0, 1), (0.5, 1.0, 2.0))
    assert list(frame.columns) == ['t', 'value', 'transformed']
    assert np.allclose(frame['transformed'], -frame['value'], atol=1e-7)
