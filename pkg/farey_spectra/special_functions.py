"""
Special-function kernels shared by the numerical modules.

Pochhammer ratios, generalized Laguerre polynomials (float and exact),
Bessel J, generalized Gauss-Laguerre rules, terminating 2F1, Jacobi values
at zero, Bernoulli numbers and zeta at the negative integers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational
from typing import List, Tuple

import numpy as np
import pandas as pd
from scipy import linalg, special

from .exceptions import AccuracyWarning, DomainError, PoleError, SpectralError

__all__ = [
    "BESSEL_VALIDATED_MAX",
    "BernoulliTable",
    "QuadratureRule",
    "bernoulli_and_zeta",
    "bernoulli_numbers",
    "bessel_j",
    "bessel_ratio",
    "gauss_laguerre",
    "generalized_binomial",
    "hyp2f1_terminating",
    "jacobi_p0_at_zero",
    "jacobi_p0_via_hypergeometric",
    "laguerre",
    "laguerre_exact",
    "laguerre_sum",
    "laguerre_table",
    "pochhammer",
    "rising_factorial",
    "zeta_at_negative",
]

BESSEL_VALIDATED_MAX = 200.0
_RESCALE_THRESHOLD = 1e150


def _is_exact(value) -> bool:
    return isinstance(value, Rational)


def _is_nonpositive_integer(value) -> bool:
    as_float = float(value)
    return as_float <= 0 and as_float == math.floor(as_float)


def _as_output(result, like):
    """Return a Python float for scalar input, the array otherwise."""
    if np.ndim(like) == 0:
        return float(result)
    return result


# ---------------------------------------------------------------------------
# Gamma ratios and binomials
# ---------------------------------------------------------------------------

def pochhammer(a, p) -> float:
    """Shifted factorial (a)_p = Gamma(a+p)/Gamma(a) through log-Gamma differences."""
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(a + p):
        raise PoleError(f"(a)_p has a Gamma pole at a={a}, p={p}")
    a, p = float(a), float(p)
    sign = special.gammasgn(a + p) * special.gammasgn(a)
    return float(sign * math.exp(special.gammaln(a + p) - special.gammaln(a)))


def rising_factorial(a, n: int):
    """Exact rising factorial a(a+1)...(a+n-1) for integer n >= 0."""
    if n < 0:
        raise DomainError("n must be >= 0")
    value = Fraction(1) if _is_exact(a) else 1.0
    for i in range(n):
        value *= a + i
    return value


def generalized_binomial(x, m: int):
    """C(x, m) for integer m and integer, rational or real x."""
    if m < 0:
        return 0
    if isinstance(x, Integral) and x >= 0:
        return math.comb(int(x), m)
    if _is_exact(x):
        value = Fraction(1)
        for i in range(m):
            value *= Fraction(x) - i
        return value / math.factorial(m)
    value = 1.0
    for i in range(m):
        value *= (x - i) / (i + 1)
    return value


# ---------------------------------------------------------------------------
# Generalized Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre(n: int, p, t):
    """L_n^p(t) by the three-term recurrence (scalar or array t)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if p <= -1:
        raise DomainError("Laguerre order p must be > -1")
    x = np.asarray(t, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return _as_output(previous, t)
    current = 1.0 + p - x
    for k in range(1, n):
        previous, current = current, ((2 * k + 1 + p - x) * current - (k + p) * previous) / (k + 1)
    return _as_output(current, t)


def laguerre_table(n_max: int, p, t) -> np.ndarray:
    """Rows L_0^p(t) ... L_{n_max}^p(t); shape (n_max + 1, len(t))."""
    x = np.atleast_1d(np.asarray(t, dtype=float))
    table = np.empty((n_max + 1, x.size))
    table[0] = 1.0
    if n_max >= 1:
        table[1] = 1.0 + p - x
    for k in range(1, n_max):
        table[k + 1] = ((2 * k + 1 + p - x) * table[k] - (k + p) * table[k - 1]) / (k + 1)
    return table


def laguerre_sum(n: int, p, t) -> float:
    """Explicit sum of C(n+p, n-m) (-t)^m / m!, used to cross-check the recurrence."""
    total = 0.0
    for m in range(n + 1):
        total += float(generalized_binomial(n + p, n - m)) * (-t) ** m / math.factorial(m)
    return total


def laguerre_exact(n: int, p, t) -> Fraction:
    """Exact L_n^p(t) for rational p and t."""
    p, t = Fraction(p), Fraction(t)
    total = Fraction(0)
    for m in range(n + 1):
        total += generalized_binomial(n + p, n - m) * (-t) ** m / math.factorial(m)
    return total


def _scaled_laguerre_pair(n: int, alpha: float, x: np.ndarray):
    """(L_n, L_{n-1}, log_scale) with both values divided by exp(log_scale) to avoid overflow."""
    previous = np.zeros_like(x)
    current = np.ones_like(x)
    log_scale = np.zeros_like(x)
    for k in range(n):
        previous, current = current, ((2 * k + 1 + alpha - x) * current - (k + alpha) * previous) / (k + 1)
        big = np.abs(current) > _RESCALE_THRESHOLD
        if np.any(big):
            factor = np.where(big, np.abs(current), 1.0)
            current = current / factor
            previous = previous / factor
            log_scale = log_scale + np.log(factor)
    return current, previous, log_scale


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

def bessel_j(p, x):
    """J_p(x) for p > -1 and x >= 0; warns outside the validated range [0, 200]."""
    if p <= -1:
        raise DomainError("Bessel order p must be > -1")
    values = np.asarray(x, dtype=float)
    if np.any(values < 0):
        raise DomainError("bessel_j is defined here for x >= 0 only")
    if np.any(values > BESSEL_VALIDATED_MAX):
        warnings.warn(f"J_{p} evaluated beyond x={BESSEL_VALIDATED_MAX}; accuracy not validated there",
                      AccuracyWarning, stacklevel=2)
    return _as_output(special.jv(p, values), x)


def bessel_ratio(p, z):
    """J_p(z) / (z/2)^p, the entire part of the Bessel kernel (1/Gamma(p+1) at z=0)."""
    values = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(values)
    small = values < 1e-8
    out[small] = 1.0 / special.gamma(p + 1.0)
    big = ~small
    out[big] = special.jv(p, values[big]) / (values[big] / 2.0) ** p
    if np.ndim(z) == 0:
        return float(out[0])
    return out.reshape(np.shape(z))


# ---------------------------------------------------------------------------
# Gauss-Laguerre quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights for integrals against t^alpha e^{-t} dt on (0, inf)."""

    alpha: float
    nodes: np.ndarray
    log_weights: np.ndarray

    @property
    def count(self) -> int:
        return int(self.nodes.size)

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def plain_weights(self) -> np.ndarray:
        """Weights W_i with sum W_i F(x_i) ~ integral of F(t) dt (weight function divided out)."""
        return np.exp(self.log_weights + self.nodes - self.alpha * np.log(self.nodes))

    def integrate(self, values) -> float:
        """Weighted sum of function values sampled at the nodes."""
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"node": self.nodes, "weight": self.weights})


@lru_cache(maxsize=64)
def gauss_laguerre(alpha: float, count: int) -> QuadratureRule:
    """
    Generalized Gauss-Laguerre rule with `count` nodes for the weight t^alpha e^{-t}.

    Nodes are the eigenvalues of the symmetric Jacobi matrix of the Laguerre
    recurrence (diagonal 2k+1+alpha, off-diagonal sqrt(k(k+alpha))), polished
    by one Newton step. Weights come from the closed form
    Gamma(n+alpha+1) x_i / (n! (n+1)^2 L_{n+1}(x_i)^2) evaluated in logs,
    which keeps the tiny weights of the far nodes relatively accurate.
    """
    alpha = float(alpha)
    if alpha <= -1:
        raise DomainError("alpha must be > -1")
    if count < 1:
        raise DomainError("count must be >= 1")

    if count == 1:
        return QuadratureRule(alpha, np.array([1.0 + alpha]), np.array([special.gammaln(alpha + 1.0)]))

    k = np.arange(count, dtype=float)
    diagonal = 2.0 * k + 1.0 + alpha
    off_diagonal = np.sqrt(k[1:] * (k[1:] + alpha))
    try:
        nodes = linalg.eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True)
    except (linalg.LinAlgError, ValueError) as e:
        raise SpectralError(f"Jacobi matrix eigen-solve failed for alpha={alpha}, count={count}: {e}")
    nodes = np.sort(nodes)

    value, previous, _ = _scaled_laguerre_pair(count, alpha, nodes)
    derivative = (count * value - (count + alpha) * previous) / nodes
    nodes = nodes - value / derivative

    value, previous, log_scale = _scaled_laguerre_pair(count, alpha, nodes)
    following = ((2 * count + 1 + alpha - nodes) * value - (count + alpha) * previous) / (count + 1)
    log_weights = (special.gammaln(count + alpha + 1.0) - special.gammaln(count + 1.0)
                   + np.log(nodes) - 2.0 * np.log(count + 1.0)
                   - 2.0 * (np.log(np.abs(following)) + log_scale))
    return QuadratureRule(alpha, nodes, log_weights)


# ---------------------------------------------------------------------------
# Terminating hypergeometric series and Jacobi values
# ---------------------------------------------------------------------------

def hyp2f1_terminating(n: int, b, c, z) -> Fraction:
    """Exact 2F1(-n, b; c; z) as the finite sum over j <= n."""
    if n < 0:
        raise DomainError("n must be >= 0")
    b, c, z = Fraction(b), Fraction(c), Fraction(z)
    for j in range(n):
        if c + j == 0:
            raise PoleError(f"2F1(-{n}, b; c; z) has a pole at c={c}")

    total = Fraction(1)
    term = Fraction(1)
    for j in range(n):
        term = term * (j - n) * (b + j) / ((c + j) * (j + 1)) * z
        total += term
    return total


def jacobi_p0_at_zero(n: int, p):
    """P_n^{(p,0)}(0) = (-2)^{-n} sum_k (-1)^k C(n+p,k) C(n,k); exact for rational p."""
    if n < 0:
        raise DomainError("n must be >= 0")
    total = 0
    for k in range(n + 1):
        total += (-1) ** k * generalized_binomial(n + p, k) * math.comb(n, k)
    if _is_exact(p):
        return Fraction(total) / Fraction(-2) ** n
    return float(total) / (-2.0) ** n


def jacobi_p0_via_hypergeometric(n: int, p) -> Fraction:
    """The same value through C(n+p, n) 2F1(-n, n+p+1; p+1; 1/2)."""
    p = Fraction(p)
    return generalized_binomial(n + p, n) * hyp2f1_terminating(n, n + p + 1, p + 1, Fraction(1, 2))


# ---------------------------------------------------------------------------
# Bernoulli numbers and zeta(-k)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BernoulliTable:
    """Exact Bernoulli numbers B_0..B_N with the B_1 = -1/2 convention."""

    values: Tuple[Fraction, ...]

    def __getitem__(self, index: int) -> Fraction:
        return self.values[index]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def N(self) -> int:
        return len(self.values) - 1


@lru_cache(maxsize=None)
def _bernoulli_values(N: int) -> Tuple[Fraction, ...]:
    values: List[Fraction] = [Fraction(1)]
    for m in range(1, N + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * values[j]
        values.append(-acc / (m + 1))
    return tuple(values)


def bernoulli_numbers(N: int) -> BernoulliTable:
    """B_0..B_N from sum_{j<=m} C(m+1, j) B_j = 0."""
    if N < 0:
        raise DomainError("N must be >= 0")
    return BernoulliTable(_bernoulli_values(N))


def zeta_at_negative(k: int, table: BernoulliTable = None) -> Fraction:
    """
    zeta(-k) for k >= 0.

    Written as (-1)^k B_{k+1}/(k+1) so that one formula covers zeta(0) = -1/2
    under the B_1 = -1/2 convention; for k >= 1 it is -B_{k+1}/(k+1).
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    if table is None or table.N < k + 1:
        table = bernoulli_numbers(k + 1)
    return Fraction((-1) ** k) * table[k + 1] / (k + 1)


def bernoulli_and_zeta(N: int):
    """BernoulliTable B_0..B_N plus the list zeta(0), zeta(-1), ..., zeta(-(N-1))."""
    if N < 1:
        raise DomainError("N must be >= 1")
    table = bernoulli_numbers(N)
    return table, [zeta_at_negative(k, table) for k in range(N)]
