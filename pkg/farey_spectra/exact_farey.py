"""
Exact Farey map dynamics - continued fractions, Farey and Stern-Brocot levels,
iterates of the signed transfer operators and the Knauf partition function
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .config import get_config
from .exceptions import DomainError, EnumerationLimitError
from .utils import status

RationalLike = Union[int, Fraction, str]

_HALF = Fraction(1, 2)
_CHUNK_PAIRS = 1 << 18


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and 'a/b' strings to an exact Fraction."""
    try:
        return Fraction(x)
    except (TypeError, ValueError) as e:
        raise DomainError(f"not a rational number: {x!r} ({e})")


def parse_sign(sign) -> int:
    """Accept '+', '-', +1 or -1."""
    if sign in ('+', 1, '+1', 'plus'):
        return 1
    if sign in ('-', -1, '-1', 'minus'):
        return -1
    raise DomainError(f"sign must be '+' or '-', got {sign!r}")


def _check_level(n: int, cap: Optional[int]) -> None:
    if n < 1:
        raise DomainError("level n must be >= 1")
    cap = get_config().max_level if cap is None else cap
    if n > cap:
        raise EnumerationLimitError(n, cap)


# ---------------------------------------------------------------------------
# Farey map and continued fractions
# ---------------------------------------------------------------------------

def farey_map(x: RationalLike) -> Fraction:
    """F(x) = x/(1-x) on [0, 1/2] and (1-x)/x on (1/2, 1], exactly."""
    x = as_rational(x)
    if x < 0 or x > 1:
        raise DomainError(f"farey_map is defined on [0, 1], got {x}")
    if x <= _HALF:
        return x / (1 - x)
    return (1 - x) / x


def shift_digits(digits: Tuple[int, ...]) -> Tuple[int, ...]:
    """Digit shift [a1, a2, ...] -> [a1 - 1, a2, ...], a leading zero digit being dropped."""
    if not digits:
        return ()
    if digits[0] > 1:
        return (digits[0] - 1,) + tuple(digits[1:])
    return tuple(digits[1:])


@dataclass(frozen=True)
class ContinuedFraction:
    """Digits [a1, ..., ak] of 1/(a1 + 1/(a2 + ...)); the empty sequence encodes 0."""

    digits: Tuple[int, ...]

    def __post_init__(self):
        if any(int(a) < 1 for a in self.digits):
            raise DomainError(f"continued fraction digits must be >= 1, got {self.digits}")
        if len(self.digits) > 1 and self.digits[-1] == 1:
            raise DomainError(f"non-canonical digits (last digit 1): {self.digits}")

    @property
    def digit_sum(self) -> int:
        return sum(self.digits)

    def value(self) -> Fraction:
        x = Fraction(0)
        for a in reversed(self.digits):
            x = 1 / (a + x)
        return x

    def shift(self) -> 'ContinuedFraction':
        return ContinuedFraction(shift_digits(self.digits))

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.digits) + "]"


def _digits(x: Fraction) -> Tuple[int, ...]:
    numerator, denominator = x.numerator, x.denominator
    digits = []
    while numerator:
        a, remainder = divmod(denominator, numerator)
        digits.append(a)
        denominator, numerator = numerator, remainder
    return tuple(digits)


def to_continued_fraction(x: RationalLike) -> ContinuedFraction:
    """Canonical digits of x in (0, 1) by the Euclidean algorithm."""
    x = as_rational(x)
    if not 0 < x < 1:
        raise DomainError(f"continued fractions are taken for x in (0, 1), got {x}")
    return ContinuedFraction(_digits(x))


def from_continued_fraction(digits) -> Fraction:
    """Inverse of to_continued_fraction."""
    if isinstance(digits, ContinuedFraction):
        return digits.value()
    return ContinuedFraction(tuple(int(a) for a in digits)).value()


def digit_sum(x: RationalLike) -> int:
    """Sum of the canonical digits; 0 has sum 0 and 1 = [1] has sum 1."""
    return sum(_digits(as_rational(x)))


def count_digit_sum(n: int) -> int:
    """Number of canonical digit sequences with sum n (last digit > 1 unless the sequence is [1])."""
    if n == 1:
        return 1
    # compositions[m]: ordered sequences of positive digits summing to m
    compositions = [1] + [0] * n
    for m in range(1, n + 1):
        compositions[m] = sum(compositions[m - a] for a in range(1, m + 1))
    return sum(compositions[n - last] for last in range(2, n + 1))


# ---------------------------------------------------------------------------
# Farey levels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FareyLevel:
    """F_n: the fractions of [0, 1] reached after n - 1 rounds of mediant insertion."""

    n: int
    fractions: Tuple[Fraction, ...]

    def new_fractions(self) -> Tuple[Fraction, ...]:
        """F_n minus F_{n-1}: every mediant inserted by the last round (F_0 = {0})."""
        if self.n == 1:
            return self.fractions[1:]
        return self.fractions[1::2]

    def neighbor_determinants(self) -> List[int]:
        return [b.numerator * a.denominator - a.numerator * b.denominator
                for a, b in zip(self.fractions, self.fractions[1:])]


def farey_sequence(n: int, cap: Optional[int] = None) -> FareyLevel:
    """F_n by repeated mediant insertion starting from F_1 = (0/1, 1/1)."""
    _check_level(n, cap)
    pairs = [(0, 1), (1, 1)]
    for _ in range(n - 1):
        inserted = [pairs[0]]
        for (a1, b1), (a2, b2) in zip(pairs, pairs[1:]):
            inserted.append((a1 + a2, b1 + b2))
            inserted.append((a2, b2))
        pairs = inserted
    return FareyLevel(n, tuple(Fraction(a, b) for a, b in pairs))


def inverse_branch_orbit(n: int, cap: Optional[int] = None) -> Tuple[Fraction, ...]:
    """Sorted union over k <= n of F^{-k}{0}, by exact iteration of x -> x/(1+x) and x -> 1/(1+x)."""
    _check_level(n, cap)
    seen = {Fraction(0)}
    frontier = {Fraction(0)}
    for _ in range(n):
        frontier = {y / (1 + y) for y in frontier} | {1 / (1 + y) for y in frontier}
        seen |= frontier
    return tuple(sorted(seen))


# ---------------------------------------------------------------------------
# Stern-Brocot levels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeNode:
    """
    One vertex a/b of the Stern-Brocot tree with the linear forms
    n0(x) = mu*x + nu and n1(x) = (a - mu)*x + (b - nu), so n0 + n1 = a*x + b.
    """

    fraction: Fraction
    mu: int
    nu: int

    def __post_init__(self):
        if not (0 <= self.mu <= self.a and 0 <= self.nu <= self.b):
            raise DomainError(f"node {self.fraction}: mu={self.mu}, nu={self.nu} out of range")

    @property
    def a(self) -> int:
        return self.fraction.numerator

    @property
    def b(self) -> int:
        return self.fraction.denominator

    def n0(self, x):
        return self.mu * x + self.nu

    def n1(self, x):
        return (self.a - self.mu) * x + (self.b - self.nu)


@dataclass(frozen=True)
class SternBrocotLevel:
    n: int
    nodes: Tuple[TreeNode, ...]

    @property
    def fractions(self) -> Tuple[Fraction, ...]:
        return tuple(node.fraction for node in self.nodes)


def stern_brocot_level(n: int, cap: Optional[int] = None) -> SternBrocotLevel:
    """
    Level L_n of the tree, ordered by value, with mu and nu for every node.

    The inner compositions h = g_{w_{n-1}} o ... o g_{w_1} of the inverse
    branches g0(x) = x/(1+x), g1(x) = 1/(1+x) are tracked as integer matrices
    [[alpha, beta], [gamma, delta]]. Appending g0 or g1 to h gives the two
    terms of one node: a = alpha + gamma, b = beta + delta, with numerators
    alpha*x + beta and gamma*x + delta. When h carries an odd number of g1
    factors the two numerators swap roles, so that the minus operator also
    reads f(n0/(ax+b)) - f(n1/(ax+b)).
    """
    _check_level(n, cap)
    states = [((1, 0, 0, 1), 1)]
    for _ in range(n - 1):
        grown = []
        for (alpha, beta, gamma, delta), sign in states:
            grown.append(((alpha, beta, alpha + gamma, beta + delta), sign))
            grown.append(((gamma, delta, alpha + gamma, beta + delta), -sign))
        states = grown

    nodes = []
    for (alpha, beta, gamma, delta), sign in states:
        a, b = alpha + gamma, beta + delta
        mu, nu = (alpha, beta) if sign > 0 else (gamma, delta)
        nodes.append(TreeNode(Fraction(a, b), mu, nu))
    nodes.sort(key=lambda node: node.fraction)
    return SternBrocotLevel(n, tuple(nodes))


def level_table(n: int, cap: Optional[int] = None) -> pd.DataFrame:
    """Stern-Brocot level as a table: fraction, a, b, mu, nu."""
    level = stern_brocot_level(n, cap)
    return pd.DataFrame({
        'fraction': [f"{node.a}/{node.b}" for node in level.nodes],
        'a': [node.a for node in level.nodes],
        'b': [node.b for node in level.nodes],
        'mu': [node.mu for node in level.nodes],
        'nu': [node.nu for node in level.nodes],
    })


# ---------------------------------------------------------------------------
# Transfer operator iterates
# ---------------------------------------------------------------------------

def transfer_iterate(f: Callable[[float], float], x: float, n: int, q: float,
                     sign='+', mode: str = 'direct') -> float:
    """
    (P_q^{+-})^n f at x.

    mode='direct' applies (P f)(x) = (x+1)^{-2q} [f(x/(x+1)) +- f(1/(x+1))]
    recursively; mode='tree' sums over the Stern-Brocot level L_n.
    """
    s = parse_sign(sign)
    if n < 1:
        raise DomainError("n must be >= 1")
    x = float(x)
    if x < 0:
        raise DomainError(f"transfer_iterate needs x >= 0, got {x}")
    q = float(q)

    if mode == 'direct':
        return _direct_iterate(f, x, n, q, s)
    if mode == 'tree':
        level = stern_brocot_level(n)
        total = 0.0
        for node in level.nodes:
            denominator = node.a * x + node.b
            total += denominator ** (-2.0 * q) * (f(node.n0(x) / denominator) + s * f(node.n1(x) / denominator))
        return total
    raise DomainError(f"mode must be 'direct' or 'tree', got {mode!r}")


def _direct_iterate(f, x, n, q, s):
    if n == 0:
        return f(x)
    weight = (1.0 + x) ** (-2.0 * q)
    return weight * (_direct_iterate(f, x / (1.0 + x), n - 1, q, s)
                     + s * _direct_iterate(f, 1.0 / (1.0 + x), n - 1, q, s))


def iterate_agreement(f: Callable[[float], float], x: float, n: int, q: float, sign='+') -> float:
    """
    |direct - tree| for (P_q^{+-})^n f at x, relative to (P_q^+)^n |f| at x.

    The positive-sign iterate of |f| bounds the sum of absolute tree terms,
    so the ratio stays meaningful where the minus sign cancels to zero.
    """
    direct = transfer_iterate(f, x, n, q, sign, 'direct')
    tree = transfer_iterate(f, x, n, q, sign, 'tree')
    scale = transfer_iterate(lambda y: abs(f(y)), x, n, q, '+', 'direct')
    return abs(direct - tree) / scale if scale > 0 else abs(direct - tree)


# ---------------------------------------------------------------------------
# Knauf partition function and growth rate
# ---------------------------------------------------------------------------

def _power_total(denominators: np.ndarray, two_q: float) -> float:
    if two_q == 0:
        return float(denominators.size)
    return float(np.exp(-two_q * np.log(denominators.astype(float))).sum())


def _depth_first(left: np.ndarray, right: np.ndarray, level: int, n: int, two_q: float) -> np.ndarray:
    out = np.zeros(n)
    stack = [(left, right, level)]
    while stack:
        lo, hi, lev = stack.pop()
        while lev < n:
            mediants = lo + hi
            out[lev] += _power_total(mediants, two_q)
            lev += 1
            if lev == n:
                break
            lo, hi = np.concatenate((lo, mediants)), np.concatenate((mediants, hi))
            if lo.size > _CHUNK_PAIRS:
                half = lo.size // 2
                stack.append((lo[half:], hi[half:], lev))
                lo, hi = lo[:half], hi[:half]
    return out


def level_power_sums(n: int, q, workers: Optional[int] = None) -> np.ndarray:
    """
    Entry k-1 is the sum of b^{-2q} over the fractions new at level k (k = 1..n),
    0/1 excluded. Only denominators are tracked: neighbouring pairs (b', b'')
    spawn the mediant denominator b' + b''.
    """
    _check_level(n, None)
    two_q = 2.0 * float(q)
    out = np.zeros(n)
    out[0] = 1.0
    left = np.array([1], dtype=np.int64)
    right = np.array([1], dtype=np.int64)
    level = 1
    while level < n and left.size < _CHUNK_PAIRS:
        mediants = left + right
        out[level] += _power_total(mediants, two_q)
        level += 1
        left, right = np.concatenate((left, mediants)), np.concatenate((mediants, right))
    if level >= n:
        return out

    workers = workers or get_config().workers
    chunks = [idx for idx in np.array_split(np.arange(left.size), workers) if idx.size]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='farey-partition') as pool:
        futures = [pool.submit(_depth_first, left[idx], right[idx], level, n, two_q) for idx in chunks]
        for future in futures:
            out += future.result()
    return out


def _exact_partition(n: int, two_q: int) -> Fraction:
    counts = Counter({1: 1})
    pairs = [(1, 1)]
    for _ in range(n - 1):
        grown = []
        for left, right in pairs:
            mediant = left + right
            counts[mediant] += 1
            grown.append((left, mediant))
            grown.append((mediant, right))
        pairs = grown
    total = Fraction(0)
    for b, multiplicity in sorted(counts.items()):
        total += Fraction(multiplicity) / Fraction(b) ** two_q
    return 2 * total


def knauf_partition(n: int, q, exact: Optional[bool] = None) -> Union[Fraction, float]:
    """
    2 * sum of b^{-2q} over a/b in F_n minus {0/1}, which equals (P_q^{+n} 1)(0).

    The exact Rational path is taken when 2q is an integer and n is within
    FAREY_EXACT_LEVEL_CAP (or when exact=True is forced); otherwise the sum is
    accumulated in double precision.
    """
    _check_level(n, None)
    q_exact = None
    try:
        q_exact = Fraction(q)
    except (TypeError, ValueError):
        pass
    integral_two_q = q_exact is not None and (2 * q_exact).denominator == 1

    if exact is None:
        exact = integral_two_q and n <= get_config().exact_level_cap
    if exact:
        if not integral_two_q:
            raise DomainError(f"the exact partition path needs 2q integral, got q={q}")
        return _exact_partition(n, int(2 * q_exact))
    return 2.0 * float(level_power_sums(n, float(q)).sum())


@dataclass(frozen=True)
class GrowthRateEstimate:
    """Ratio estimator Z_n / Z_{n-1} of lambda(q) plus its diagnostics."""

    q: float
    n_max: int
    ratio: float
    ratios: Tuple[float, ...] = field(repr=False)
    log_rates: Tuple[float, ...] = field(repr=False)

    def to_frame(self) -> pd.DataFrame:
        n = list(range(1, self.n_max + 1))
        return pd.DataFrame({
            'n': n,
            'ratio': [float('nan')] + list(self.ratios),
            'log_rate': list(self.log_rates),
        })


def growth_rate_estimate(q, n_max: int) -> GrowthRateEstimate:
    """
    Estimate lambda(q) for q < 1 from Z_n = knauf_partition(n, q) / 2.

    The returned ratio is Z_{n_max} / Z_{n_max - 1}; log_rates holds
    (1/n) log Z_n, whose exponential tends to the same limit but only at
    rate O(1/n).
    """
    q = float(q)
    if q >= 1:
        raise DomainError("growth_rate_estimate needs q < 1")
    if n_max < 3:
        raise DomainError("n_max must be >= 3")

    status.info(f"Summing Farey denominators up to level {n_max} (q={q})")
    partial = np.cumsum(level_power_sums(n_max, q))
    ratios = tuple(float(partial[k] / partial[k - 1]) for k in range(1, n_max))
    log_rates = tuple(float(math.log(partial[k]) / (k + 1)) for k in range(n_max))
    return GrowthRateEstimate(q, n_max, ratios[-1], ratios, log_rates)


def partition_table(n_max: int, q) -> pd.DataFrame:
    """Z(n) = knauf_partition(n, q) for n = 1..n_max in one pass over the levels."""
    totals = 2.0 * np.cumsum(level_power_sums(n_max, float(q)))
    return pd.DataFrame({'n': np.arange(1, n_max + 1), 'partition': totals})


def eigen_ratio_deviation(q: float, x_values=(0.5, 3.0)) -> Dict[str, float]:
    """
    (P_q^+ f)(x) / f(x) for f(x) = x^{-q} at the given points and the spread
    of those ratios; the spread vanishes only for q = 1.
    """
    q = float(q)

    def f(y):
        return y ** (-q)

    ratios = [transfer_iterate(f, x, 1, q, '+') / f(x) for x in x_values]
    return {'ratios': ratios, 'deviation': max(ratios) - min(ratios)}
