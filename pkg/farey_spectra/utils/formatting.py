from fractions import Fraction
from numbers import Integral, Real
from typing import Mapping


def format_rational(value):
    """Render an exact rational as 'a/b' ('a' when the denominator is 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_real(value):
    """Render a real with 15 significant digits."""
    return format(float(value), '.15g')


def format_number(value):
    """Exact types keep their exact rendering, everything else goes through format_real."""
    if isinstance(value, (Fraction, Integral)):
        return format_rational(value)
    if isinstance(value, Real):
        return format_real(value)
    return str(value)


def json_number(value):
    """JSON field for a number: float value plus an 'exact' string when one exists."""
    if isinstance(value, (Fraction, Integral)):
        return {'value': float(value), 'exact': format_rational(value)}
    return {'value': float(value)}


def format_polynomial(coefficients: Mapping[int, object], variable='x'):
    """Human-readable polynomial / Laurent polynomial, highest power first."""
    terms = []
    for power in sorted(coefficients, reverse=True):
        coef = coefficients[power]
        if coef == 0:
            continue
        text = format_number(coef)
        sign = '-' if text.startswith('-') else '+'
        magnitude = text.lstrip('-')
        if power == 0:
            body = magnitude
        else:
            base = variable if power == 1 else f"{variable}^{power}"
            body = base if magnitude == '1' else f"{magnitude}*{base}"
        terms.append((sign, body))

    if not terms:
        return '0'
    first_sign, first_body = terms[0]
    out = ('-' if first_sign == '-' else '') + first_body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out
