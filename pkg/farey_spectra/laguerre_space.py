"""
The Hilbert space L^2(m_q), m_q(dt) = t^p e^{-t} dt with p = 2q - 1.

Coefficient vectors in the Laguerre basis e_n = L_n^p, its orthonormal
version, and the monomial family f_n = t^n/n!; the triangular change of
basis between e and f, the generalized Borel transform B_q and the
involution J_q.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import special

from .config import get_config
from .exceptions import AccuracyWarning, DomainError
from .special_functions import (gauss_laguerre, generalized_binomial, laguerre, laguerre_table,
                                pochhammer, rising_factorial)

BASES = ('e', 'ehat', 'f')
FAMILIES = ('e', 'f', 'h+', 'h-', 'phi')

_BOREL_NODES = 160

Number = Union[int, float, Fraction]


def parse_q(q) -> Number:
    """'1/2', Fraction or int stay exact; floats stay floats."""
    if isinstance(q, str):
        try:
            return Fraction(q)
        except ValueError:
            raise DomainError(f"cannot parse q={q!r}")
    if isinstance(q, Rational):
        return Fraction(q)
    return float(q)


@dataclass(frozen=True)
class SpaceParams:
    """q > 0 and the truncation K (FAREY_DEFAULT_K when omitted)."""

    q: Number
    K: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'q', parse_q(self.q))
        if self.q <= 0:
            raise DomainError(f"q must be > 0, got {self.q}")
        if self.K is None:
            object.__setattr__(self, 'K', get_config().default_k)
        if self.K < 1:
            raise DomainError(f"K must be >= 1, got {self.K}")

    @property
    def p(self) -> Number:
        p = 2 * self.q - 1
        if isinstance(p, Fraction) and p.denominator == 1:
            return int(p)
        return p

    @property
    def exact(self) -> bool:
        """Exact arithmetic applies when p is a nonnegative integer."""
        return isinstance(self.p, Integral)

    @property
    def rational(self) -> bool:
        return isinstance(self.q, Fraction)

    def with_K(self, K: int) -> 'SpaceParams':
        return SpaceParams(self.q, K)

    def describe(self) -> dict:
        return {'q': str(self.q), 'p': str(self.p), 'K': self.K}


def norm_sq_e(params: SpaceParams, n: int) -> Number:
    """||e_n||^2 = Gamma(n + 2q)/n!."""
    if params.exact:
        return Fraction(math.factorial(n + params.p), math.factorial(n))
    return math.exp(special.gammaln(n + 2.0 * float(params.q)) - special.gammaln(n + 1.0))


def norm_e(params: SpaceParams, n: int) -> float:
    return math.sqrt(norm_sq_e(params, n))


def change_coefficient(params: SpaceParams, n: int, m: int) -> Number:
    """a_{n,m} = (-1)^m C(n+p, n-m) for m <= n, else 0."""
    if m > n or m < 0:
        return 0
    return (-1) ** m * generalized_binomial(n + params.p, n - m)


# ---------------------------------------------------------------------------
# Inner products
# ---------------------------------------------------------------------------

def inner_products(params: SpaceParams, kind: str, n: int, m: int) -> Number:
    """
    Closed-form inner products in L^2(m_q).

    ff: Gamma(n+m+2q)/(n! m!); ee: delta_{nm} ||e_n||^2;
    fe: (f_n, e_m) = a_{n,m} ||e_m||^2 (zero for m > n).
    """
    if n < 0 or m < 0:
        raise DomainError("indices must be >= 0")
    if kind == 'ff':
        if params.exact:
            return Fraction(math.factorial(n + m + params.p), math.factorial(n) * math.factorial(m))
        q = float(params.q)
        return math.exp(special.gammaln(n + m + 2 * q) - special.gammaln(n + 1.0) - special.gammaln(m + 1.0))
    if kind == 'ee':
        return norm_sq_e(params, n) if n == m else 0
    if kind == 'fe':
        return change_coefficient(params, n, m) * norm_sq_e(params, m)
    raise DomainError(f"kind must be ff, ee or fe, got {kind!r}")


def inner_products_quadrature(params: SpaceParams, kind: str, n: int, m: int) -> float:
    """The same inner products by Gauss-Laguerre quadrature (exact for polynomial integrands)."""
    p = float(params.p)
    rule = gauss_laguerre(p, (n + m) // 2 + 8)
    t = rule.nodes
    funcs = {
        'f': lambda k: t ** k / math.factorial(k),
        'e': lambda k: laguerre(k, p, t),
    }
    if kind not in ('ff', 'ee', 'fe'):
        raise DomainError(f"kind must be ff, ee or fe, got {kind!r}")
    return rule.integrate(funcs[kind[0]](n) * funcs[kind[1]](m))


def total_mass(params: SpaceParams) -> Tuple[float, float]:
    """(quadrature, closed form) for the total mass Gamma(2q) of m_q."""
    rule = gauss_laguerre(float(params.p), 8)
    return float(rule.weights.sum()), float(special.gamma(2 * float(params.q)))


# ---------------------------------------------------------------------------
# Change of basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TriangularChangeOfBasis:
    """
    Lower triangular A_n = (a_{i,j}) with f_i = sum_j a_{i,j} e_j and
    e_i = sum_j a_{i,j} f_j. Coefficients convert through the transpose in
    both directions: e-coefficients c give f-coefficients A^T c and back.
    """

    n: int
    entries: Tuple[Tuple[Number, ...], ...] = field(repr=False)
    exact: bool = False

    def matrix(self) -> np.ndarray:
        if self.exact:
            return np.array(self.entries, dtype=object)
        return np.array(self.entries, dtype=float)

    def apply(self, coeffs: Sequence[Number]) -> list:
        """A c on the leading n+1 coefficients."""
        c = _pad(coeffs, self.n + 1)
        return [sum(self.entries[i][j] * c[j] for j in range(i + 1)) for i in range(self.n + 1)]

    def apply_transposed(self, coeffs: Sequence[Number]) -> list:
        """A^T c on the leading n+1 coefficients."""
        c = _pad(coeffs, self.n + 1)
        return [sum(self.entries[i][j] * c[i] for i in range(j, self.n + 1)) for j in range(self.n + 1)]

    def squared(self) -> list:
        size = self.n + 1
        return [[sum(self.entries[i][k] * self.entries[k][j] for k in range(j, i + 1)) if j <= i else 0
                 for j in range(size)] for i in range(size)]

    def is_involution(self, tol: float = 0.0) -> bool:
        """A^2 = I (exactly in Rational mode)."""
        square = self.squared()
        for i, row in enumerate(square):
            for j, value in enumerate(row):
                target = 1 if i == j else 0
                if self.exact and value != target:
                    return False
                if not self.exact and abs(value - target) > tol:
                    return False
        return True


def _pad(coeffs, size):
    values = list(coeffs)[:size]
    return values + [0] * (size - len(values))


def basis_change(params: SpaceParams, n: int) -> TriangularChangeOfBasis:
    if n < 0:
        raise DomainError("n must be >= 0")
    entries = tuple(tuple(change_coefficient(params, i, j) if j <= i else 0 for j in range(n + 1))
                    for i in range(n + 1))
    return TriangularChangeOfBasis(n, entries, params.exact)


# ---------------------------------------------------------------------------
# Coefficient vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientVector:
    params: SpaceParams
    basis: str
    coeffs: Tuple[Number, ...]

    def __post_init__(self):
        if self.basis not in BASES:
            raise DomainError(f"basis must be one of {BASES}, got {self.basis!r}")
        object.__setattr__(self, 'coeffs', tuple(self.coeffs))
        if len(self.coeffs) > self.params.K:
            raise DomainError(f"{len(self.coeffs)} coefficients exceed the truncation K={self.params.K}")

    @classmethod
    def unit(cls, params: SpaceParams, basis: str, n: int) -> 'CoefficientVector':
        return cls(params, basis, tuple([0] * n + [1]))

    def __len__(self) -> int:
        return len(self.coeffs)

    def to_basis(self, target: str) -> 'CoefficientVector':
        if target == self.basis:
            return self
        if target not in BASES:
            raise DomainError(f"basis must be one of {BASES}, got {target!r}")
        e = self._e_coefficients()
        if target == 'e':
            out = e
        elif target == 'ehat':
            out = [float(c) * norm_e(self.params, n) for n, c in enumerate(e)]
        else:
            out = basis_change(self.params, len(e) - 1).apply_transposed(e) if e else []
        return CoefficientVector(self.params, target, tuple(out))

    def _e_coefficients(self) -> list:
        if self.basis == 'e':
            return list(self.coeffs)
        if self.basis == 'ehat':
            return [float(c) / norm_e(self.params, n) for n, c in enumerate(self.coeffs)]
        if not self.coeffs:
            return []
        return basis_change(self.params, len(self.coeffs) - 1).apply_transposed(self.coeffs)

    def evaluate(self, t):
        """Value of the represented function at t (scalar or array)."""
        x = np.atleast_1d(np.asarray(t, dtype=float))
        if self.basis == 'f':
            total = np.zeros_like(x)
            for n, d in enumerate(self.coeffs):
                total += float(d) * x ** n / math.factorial(n)
        else:
            e = np.array([float(c) for c in self._e_coefficients()])
            if e.size == 0:
                total = np.zeros_like(x)
            else:
                total = e @ laguerre_table(e.size - 1, float(self.params.p), x)
        return float(total[0]) if np.ndim(t) == 0 else total

    def norm(self) -> float:
        e = self._e_coefficients()
        return math.sqrt(sum(float(c) ** 2 * float(norm_sq_e(self.params, n)) for n, c in enumerate(e)))

    def to_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'index': range(len(self.coeffs)), 'coefficient': list(self.coeffs)})


def projection(params: SpaceParams, coeffs: CoefficientVector, n: int) -> CoefficientVector:
    """
    Orthogonal projection Pi_n onto span{f_0, ..., f_n}, returned as
    f-coefficients d = A_n^T c^{(n)} from the leading e-coefficients c.
    """
    if n < 0 or n >= params.K:
        raise DomainError(f"projection index must lie in [0, K), got {n}")
    c = coeffs.to_basis('e').coeffs
    d = basis_change(params, n).apply_transposed(c)
    return CoefficientVector(params, 'f', tuple(d))


# ---------------------------------------------------------------------------
# Generalized Borel transform and J_q
# ---------------------------------------------------------------------------

def phi_normalization(p, n: int) -> float:
    """sqrt(2^{p+1} n! / Gamma(n+p+1))."""
    p = float(p)
    return math.exp(0.5 * ((p + 1) * math.log(2.0) + special.gammaln(n + 1.0) - special.gammaln(n + p + 1.0)))


def _shifted_factorial(params: SpaceParams, n: int) -> Number:
    if params.exact:
        return rising_factorial(n + 1, params.p)
    return pochhammer(n + 1, float(params.p))


def _check_borel_point(x):
    if isinstance(x, complex) and x.imag != 0:
        if abs(x - 1) >= 1:
            raise DomainError(f"x={x} lies outside the disk |x - 1| < 1")
        return complex(x)
    x = float(x.real if isinstance(x, complex) else x)
    if x <= 0:
        raise DomainError(f"B_q is evaluated at real x > 0 or inside |x - 1| < 1, got {x}")
    return x


def borel_closed_form(params: SpaceParams, family: str, n: int, x):
    """
    Closed-form B_q of e_n, f_n, h_n^+-, or the normalized phi_n.

    Real x > 0 uses the substitution form, complex x must lie in the disk
    |x - 1| < 1.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    x = _check_borel_point(x)
    power = cmath.exp if isinstance(x, complex) else math.exp
    log = cmath.log if isinstance(x, complex) else math.log
    two_q = 2 * float(params.q)
    shifted = float(_shifted_factorial(params, n))

    if family == 'e':
        return shifted * (1 - x) ** n
    if family == 'f':
        return shifted * x ** n
    if family in ('h+', 'h-'):
        sign = 1 if family == 'h+' else -1
        return shifted * (1 + sign * x ** n) * power(-(n + two_q) * log(1 + x))
    if family == 'phi':
        return (phi_normalization(params.p, n) * shifted * (1 - x) ** n
                * power(-(n + two_q) * log(1 + x)))
    raise DomainError(f"family must be one of {FAMILIES}, got {family!r}")


def family_function(params: SpaceParams, family: str, n: int) -> Callable:
    """The function e_n, f_n, h_n^+-, or phi_n of t, vectorized."""
    p = float(params.p)
    if family == 'e':
        return lambda t: laguerre(n, p, t)
    if family == 'f':
        return lambda t: np.asarray(t, dtype=float) ** n / math.factorial(n)
    if family in ('h+', 'h-'):
        sign = 1.0 if family == 'h+' else -1.0
        return lambda t: np.exp(-np.asarray(t, dtype=float)) * (
            laguerre(n, p, t) + sign * np.asarray(t, dtype=float) ** n / math.factorial(n))
    if family == 'phi':
        c = phi_normalization(p, n)
        return lambda t: c * np.exp(-np.asarray(t, dtype=float)) * laguerre(n, p, 2.0 * np.asarray(t, dtype=float))
    raise DomainError(f"family must be one of {FAMILIES}, got {family!r}")


def borel_numeric(phi, x: float, params: Optional[SpaceParams] = None,
                  form: str = 'substitution', count: Optional[int] = None) -> float:
    """
    B_q[phi](x) by Gauss-Laguerre quadrature for real x > 0.

    form='substitution' integrates phi(s x) s^p e^{-s} ds, valid for every
    x > 0. form='direct' integrates x^{-2q} phi(t) e^{t(1 - 1/x)} against
    m_q and degrades as x approaches 2.
    """
    if isinstance(phi, CoefficientVector):
        params = phi.params
        func = phi.evaluate
    else:
        if params is None:
            raise DomainError("params are required when phi is a plain function")
        func = phi
    x = float(x)
    if x <= 0:
        raise DomainError(f"borel_numeric needs real x > 0, got {x}")

    rule = gauss_laguerre(float(params.p), count or _BOREL_NODES)
    if form == 'substitution':
        return rule.integrate(func(rule.nodes * x))
    if form == 'direct':
        if x >= 2:
            warnings.warn(f"direct Borel quadrature at x={x} is outside its convergent region",
                          AccuracyWarning, stacklevel=2)
        t = rule.nodes
        return x ** (-2 * float(params.q)) * rule.integrate(func(t) * np.exp(t * (1 - 1 / x)))
    raise DomainError(f"form must be 'substitution' or 'direct', got {form!r}")


def jq_apply(f: Callable[[float], float], q, x: float) -> float:
    """(J_q f)(x) = x^{-2q} f(1/x)."""
    x = float(x)
    if x <= 0:
        raise DomainError(f"jq_apply needs x > 0, got {x}")
    return x ** (-2 * float(q)) * f(1 / x)
