from __future__ import annotations

from fractions import Fraction

import pytest

from farey_spectra.exact_farey import (ContinuedFraction, count_digit_sum, digit_sum, eigen_ratio_deviation,
                                       farey_map, farey_sequence, from_continued_fraction, growth_rate_estimate,
                                       inverse_branch_orbit, iterate_agreement, knauf_partition, level_power_sums,
                                       level_table, parse_sign, shift_digits, stern_brocot_level,
                                       to_continued_fraction, transfer_iterate)
from farey_spectra.exceptions import DomainError, EnumerationLimitError

F3 = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)]
F4 = [Fraction(x) for x in ('0', '1/4', '1/3', '2/5', '1/2', '3/5', '2/3', '3/4', '1')]


@pytest.mark.parametrize("x,expected", [('0', 0), ('1/3', Fraction(1, 2)), ('2/3', Fraction(1, 2)),
                                        ('1/2', 1), ('1', 0), ('2/5', Fraction(2, 3))])
def test_farey_map(x, expected) -> None:
    assert farey_map(x) == expected


def test_farey_map_domain() -> None:
    with pytest.raises(DomainError):
        farey_map(Fraction(3, 2))
    with pytest.raises(DomainError):
        farey_map('-1/4')


def test_continued_fractions() -> None:
    assert to_continued_fraction('2/5').digits == (2, 2)
    assert to_continued_fraction(Fraction(2, 3)).digits == (1, 2)
    assert str(to_continued_fraction('3/7')) == '[2,3]'
    assert from_continued_fraction([2, 2]) == Fraction(2, 5)
    assert ContinuedFraction(()).value() == 0
    assert digit_sum(0) == 0 and digit_sum(1) == 1
    with pytest.raises(DomainError):
        ContinuedFraction((2, 1))
    with pytest.raises(DomainError):
        ContinuedFraction((0, 3))
    with pytest.raises(DomainError):
        to_continued_fraction(1)


def test_digit_shift_is_the_farey_map() -> None:
    assert shift_digits((2, 2)) == (1, 2)
    assert shift_digits((1, 3)) == (3,)
    assert shift_digits(()) == ()
    for x in farey_sequence(7).fractions[1:-1]:
        shifted = to_continued_fraction(x).shift()
        assert shifted.value() == farey_map(x)


def test_farey_sequences_match_printed_lists() -> None:
    assert list(farey_sequence(3).fractions) == F3
    assert list(farey_sequence(4).fractions) == F4
    assert farey_sequence(1).new_fractions() == (Fraction(1),)
    assert farey_sequence(3).new_fractions() == (Fraction(1, 3), Fraction(2, 3))


@pytest.mark.parametrize("n", range(1, 13))
def test_farey_level_is_the_inverse_orbit_of_zero(n) -> None:
    level = farey_sequence(n)
    assert level.fractions == inverse_branch_orbit(n)
    assert len(level.fractions) == 2 ** (n - 1) + 1
    assert set(level.neighbor_determinants()) == {1}


def test_new_fractions_have_digit_sum_n() -> None:
    for n in range(1, 10):
        new = farey_sequence(n).new_fractions()
        assert len(new) == count_digit_sum(n)
        assert all(digit_sum(x) == n for x in new)


def test_enumeration_cap() -> None:
    with pytest.raises(EnumerationLimitError):
        farey_sequence(5, cap=4)
    with pytest.raises(EnumerationLimitError):
        farey_sequence(27)
    with pytest.raises(DomainError):
        farey_sequence(0)


def test_stern_brocot_levels() -> None:
    for n in range(1, 9):
        level = stern_brocot_level(n)
        assert len(level.nodes) == 2 ** (n - 1)
        for node in level.nodes:
            assert 0 <= node.mu <= node.a and 0 <= node.nu <= node.b
            assert node.n0(0.7) + node.n1(0.7) == pytest.approx(node.a * 0.7 + node.b)
    table = level_table(3)
    assert list(table.columns) == ['fraction', 'a', 'b', 'mu', 'nu']
    assert len(table) == 4


def test_parse_sign() -> None:
    assert parse_sign('+') == 1 and parse_sign(-1) == -1
    with pytest.raises(DomainError):
        parse_sign('x')


def test_partition_exact_values() -> None:
    assert knauf_partition(3, 1) == Fraction(53, 18)
    assert knauf_partition(3, Fraction(1, 2)) == Fraction(13, 3)
    assert knauf_partition(1, 2) == 2


@pytest.mark.parametrize("q", [Fraction(1, 2), Fraction(1), Fraction(2)])
@pytest.mark.parametrize("n", range(1, 11))
def test_partition_equals_transfer_iterate_at_zero(q, n) -> None:
    iterate = transfer_iterate(lambda y: 1.0, 0.0, n, q, '+')
    assert iterate == pytest.approx(float(knauf_partition(n, q)), rel=1e-12)


def test_float_partition_matches_direct_sum() -> None:
    q = 0.75
    direct = 2 * sum(x.denominator ** (-2 * q) for x in farey_sequence(9).fractions[1:])
    assert knauf_partition(9, q) == pytest.approx(direct, rel=1e-12)
    with pytest.raises(DomainError):
        knauf_partition(4, 0.3, exact=True)


@pytest.mark.parametrize("f", [lambda y: 1.0, lambda y: y, lambda y: y * y], ids=['one', 'x', 'x2'])
@pytest.mark.parametrize("sign", ['+', '-'])
@pytest.mark.parametrize("q", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.7])
def test_direct_and_tree_iterates_agree(f, sign, q, x) -> None:
    for n in range(1, 9):
        assert iterate_agreement(f, x, n, q, sign) < 1e-12


def test_minus_sign_cancellation_is_measured_against_plus_iterate() -> None:
    # P^- x vanishes at x = 1 for every n
    assert transfer_iterate(lambda y: y, 1.0, 3, 1.0, '-', 'direct') == 0.0
    assert iterate_agreement(lambda y: y, 1.0, 3, 1.0, '-') < 1e-12


def test_transfer_iterate_errors() -> None:
    with pytest.raises(DomainError):
        transfer_iterate(lambda y: 1.0, -0.5, 2, 1.0)
    with pytest.raises(DomainError):
        transfer_iterate(lambda y: 1.0, 0.5, 2, 1.0, mode='matrix')
    with pytest.raises(DomainError):
        transfer_iterate(lambda y: 1.0, 0.5, 0, 1.0)


def test_growth_rate_at_minus_half_is_three() -> None:
    estimate = growth_rate_estimate(-0.5, 12)
    assert estimate.ratio == pytest.approx(3.0, rel=1e-12)
    assert len(estimate.to_frame()) == 12
    with pytest.raises(DomainError):
        growth_rate_estimate(1.0, 10)
    with pytest.raises(DomainError):
        growth_rate_estimate(0.0, 2)


def test_negative_control() -> None:
    assert eigen_ratio_deviation(1.0)['deviation'] < 1e-12
    assert eigen_ratio_deviation(0.5)['deviation'] > 1e-3
    assert eigen_ratio_deviation(2.0)['deviation'] > 1e-3


@pytest.mark.slow
def test_chunked_partition_sums_do_not_depend_on_workers() -> None:
    serial = level_power_sums(21, 1.0, workers=1)
    parallel = level_power_sums(21, 1.0, workers=4)
    assert parallel.sum() == pytest.approx(serial.sum(), rel=1e-12)
    assert float(knauf_partition(16, 1)) == pytest.approx(knauf_partition(16, 1, exact=False), rel=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("q,n_max,expected", [
    (0.0, 20, 2.0),
    (-0.5, 20, 3.0),
    (-1.0, 25, (5 + 17 ** 0.5) / 2),
])
def test_growth_rate_reaches_warmup_eigenvalues(q, n_max, expected) -> None:
    estimate = growth_rate_estimate(q, n_max)
    assert estimate.ratio == pytest.approx(expected, rel=0.01)
