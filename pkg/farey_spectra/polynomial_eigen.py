"""
Polynomial eigenfunctions of the transfer operators at q = -k/2.

For q = -k/2 the operators P^+- preserve polynomials of degree <= k and
f(x) = sum_i C(k,i) b_i x^i is an eigenfunction exactly when b is an
eigenvector of the integer matrix M_k (palindromic b for P^+, skew for P^-).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
import sympy
from scipy import linalg

from .config import get_config
from .exceptions import DomainError, SpectralError
from .special_functions import bernoulli_numbers, zeta_at_negative
from .utils import status
from .utils.formatting import format_polynomial
from .utils.reporting import exact_check, make_check, make_report, tolerance_check

PALINDROME = 'palindrome'
SKEW = 'skew'
MIXED = 'mixed'

REALITY_TOL = 1e-10
FUNCTIONAL_SAMPLES = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3))


# ---------------------------------------------------------------------------
# The matrices M_k
# ---------------------------------------------------------------------------

def _mk_entry(k: int, i: int, j: int) -> int:
    if i < j:
        return math.comb(k - i, j - i)
    if i == j:
        return 2
    return math.comb(i, j)


@dataclass(frozen=True)
class MkMatrix:
    """(k+1) x (k+1) integer matrix; structure is checked on construction."""

    k: int
    entries: Tuple[Tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        size = self.k + 1
        for i in range(size):
            if sum(self.entries[i]) != 2 ** i + 2 ** (self.k - i):
                raise SpectralError(f"M_{self.k}: row {i} sum breaks 2^i + 2^(k-i)")
            for j in range(size):
                if self.entries[i][j] != self.entries[self.k - i][self.k - j]:
                    raise SpectralError(f"M_{self.k}: entry ({i},{j}) breaks the central symmetry")
        for j in range(size):
            if sum(self.entries[i][j] for i in range(size)) != math.comb(self.k + 2, j + 1):
                raise SpectralError(f"M_{self.k}: column {j} sum breaks C(k+2, j+1)")

    @property
    def size(self) -> int:
        return self.k + 1

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def sympy_matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.entries)

    def apply(self, vector) -> list:
        return [sum(row[j] * vector[j] for j in range(self.size)) for row in self.entries]

    def apply_transposed(self, vector) -> list:
        return [sum(self.entries[i][j] * vector[i] for i in range(self.size)) for j in range(self.size)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.entries), columns=[f"c{j}" for j in range(self.size)])


def build_mk(k: int) -> MkMatrix:
    if k < 0:
        raise DomainError("k must be >= 0")
    entries = tuple(tuple(_mk_entry(k, i, j) for j in range(k + 1)) for i in range(k + 1))
    return MkMatrix(k, entries)


def row_sums(matrix: MkMatrix) -> List[int]:
    return [sum(row) for row in matrix.entries]


def skew_fixed_vector_check(k: int) -> bool:
    """(1, 0, ..., 0, -1) is fixed by M_k, exactly."""
    if k < 1:
        raise DomainError("k must be >= 1")
    vector = [1] + [0] * (k - 1) + [-1]
    return build_mk(k).apply(vector) == vector


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyEigenpair:
    """
    One eigenpair of M_k. lam and b are floats; exact_lam and exact_b hold
    sympy values over Q(sqrt d) when the pair came from exact_eigenpairs.
    """

    k: int
    lam: float
    b: Tuple[float, ...]
    palindrome_class: str
    residual: float = 0.0
    exact_lam: Optional[sympy.Expr] = field(default=None, compare=False, repr=False)
    exact_b: Optional[Tuple[sympy.Expr, ...]] = field(default=None, compare=False, repr=False)

    @property
    def sign(self) -> int:
        """+1 for eigenfunctions of P^+, -1 for P^-."""
        return -1 if self.palindrome_class == SKEW else 1

    @property
    def a(self) -> Tuple[float, ...]:
        return tuple(math.comb(self.k, i) * b for i, b in enumerate(self.b))

    @property
    def exact(self) -> bool:
        return self.exact_b is not None


def _reflection_basis(k: int, sign: int) -> np.ndarray:
    """Orthonormal basis of {b : b_i = sign * b_{k-i}} as columns."""
    size = k + 1
    columns = []
    for i in range((size + 1) // 2):
        j = k - i
        v = np.zeros(size)
        if i == j:
            if sign < 0:
                continue
            v[i] = 1.0
        else:
            v[i] = 1.0
            v[j] = float(sign)
            v /= math.sqrt(2.0)
        columns.append(v)
    if not columns:
        return np.zeros((size, 0))
    return np.column_stack(columns)


def _normalize(b: np.ndarray) -> np.ndarray:
    """Scale so the first nonzero component equals 1 (b_0 = 1 whenever b_0 != 0)."""
    scale = np.max(np.abs(b))
    for value in b:
        if abs(value) > 1e-10 * scale:
            return b / value
    return b


def classify(b, tol: float = 1e-10) -> str:
    b = np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(b)), 1e-300)
    if np.max(np.abs(b - b[::-1])) <= tol * scale:
        return PALINDROME
    if np.max(np.abs(b + b[::-1])) <= tol * scale:
        return SKEW
    return MIXED


def mk_spectrum(k: int) -> List[PolyEigenpair]:
    """
    Eigenpairs of M_k, eigenvalues descending.

    M_k commutes with the index reversal b_i -> b_{k-i}, so the palindromic
    and skew subspaces are solved separately; this is the symmetrization
    Phi +- Phi' applied to every eigenspace at once. Each block goes through
    a general real eigen-solver followed by a reality assertion.
    """
    matrix = build_mk(k)
    full = matrix.array()
    pairs = []
    for sign, label in ((1, PALINDROME), (-1, SKEW)):
        basis = _reflection_basis(k, sign)
        if basis.shape[1] == 0:
            continue
        block = basis.T @ full @ basis
        try:
            values, vectors = linalg.eig(block)
        except linalg.LinAlgError as e:
            raise SpectralError(f"eigen-solve for M_{k} failed: {e}")
        for value, vector in zip(values, vectors.T):
            if abs(value.imag) > REALITY_TOL * max(1.0, abs(value.real)):
                raise SpectralError(f"M_{k} has a non-real eigenvalue {value}")
            b = _normalize(basis @ np.real(vector))
            lam = float(value.real)
            residual = float(np.linalg.norm(full @ b - lam * b) / np.linalg.norm(b))
            pairs.append(PolyEigenpair(k, lam, tuple(float(x) for x in b), label, residual))
    pairs.sort(key=lambda pair: -pair.lam)
    return pairs


def mk_spectra(ks: Iterable[int], workers: Optional[int] = None) -> Dict[int, List[PolyEigenpair]]:
    """mk_spectrum for several k at once."""
    ks = list(ks)
    workers = workers or get_config().workers
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='mk-spectrum') as pool:
        results = list(pool.map(mk_spectrum, ks))
    return dict(zip(ks, results))


def leading_pair(k: int) -> PolyEigenpair:
    return mk_spectrum(k)[0]


# ---------------------------------------------------------------------------
# Exact eigenpairs over Q(sqrt d)
# ---------------------------------------------------------------------------

def _symmetrized(vector: sympy.Matrix, sign: int) -> sympy.Matrix:
    size = vector.shape[0]
    return sympy.Matrix([sympy.radsimp(vector[i] + sign * vector[size - 1 - i]) for i in range(size)])


def _exact_normalize(vector: sympy.Matrix) -> Tuple[sympy.Expr, ...]:
    for value in vector:
        if sympy.simplify(value) != 0:
            return tuple(sympy.radsimp(sympy.simplify(v / value)) for v in vector)
    return tuple(vector)


def exact_eigenpairs(k: int) -> List[PolyEigenpair]:
    """
    Eigenpairs of M_k whose eigenvalue is rational or quadratic over Q,
    in exact arithmetic. Factors of the characteristic polynomial of degree
    three or more are left to mk_spectrum.
    """
    matrix = build_mk(k)
    M = matrix.sympy_matrix()
    x = sympy.Symbol('x')
    _, factors = sympy.factor_list(M.charpoly(x).as_expr(), x)
    pairs = []
    for factor, _ in factors:
        if sympy.degree(factor, x) > 2:
            continue
        for lam in sympy.roots(sympy.Poly(factor, x)):
            lam = sympy.radsimp(lam)
            null = (M - lam * sympy.eye(k + 1)).nullspace(simplify=True)
            for sign, label in ((1, PALINDROME), (-1, SKEW)):
                chosen = []
                for vector in null:
                    candidate = _symmetrized(vector, sign)
                    if all(sympy.simplify(v) == 0 for v in candidate):
                        continue
                    stacked = sympy.Matrix.hstack(*(chosen + [candidate]))
                    if stacked.rank(simplify=True) > len(chosen):
                        chosen.append(candidate)
                for vector in chosen:
                    b = _exact_normalize(vector)
                    numeric = tuple(float(sympy.N(v, 30)) for v in b)
                    pairs.append(PolyEigenpair(k, float(sympy.N(lam, 30)), numeric, label, 0.0, lam, b))
    pairs.sort(key=lambda pair: -pair.lam)
    return pairs


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyEigenfunction:
    pair: PolyEigenpair
    coefficients: Tuple = field(repr=False)
    report: dict = field(repr=False)

    def __call__(self, x):
        return sum(c * x ** i for i, c in enumerate(self.coefficients))

    def render(self, variable: str = 'x') -> str:
        if self.pair.exact:
            return str(sympy.expand(sum(c * sympy.Symbol(variable) ** i for i, c in enumerate(self.coefficients))))
        return format_polynomial(dict(enumerate(self.coefficients)), variable)


def eigenpair_to_eigenfunction(k: int, pair: PolyEigenpair) -> PolyEigenfunction:
    """
    f(x) = sum C(k,i) b_i x^i with the three-term equation
    lam f(x) - f(x+1) = +- x^k f(1 + 1/x) checked at x in {1/2, 1, 2, 3}
    (exactly for exact pairs) and the ratios lam = 1 + f(1)/f(0),
    lam(lam - 1)/2 = f(2)/f(0) (the latter for palindromes only).
    """
    if abs(pair.lam) < 1e-8:
        raise DomainError("eigenfunctions are built for nonzero eigenvalues only")
    sign = pair.sign
    checks = []
    if pair.exact:
        lam = pair.exact_lam
        coefficients = tuple(sympy.radsimp(math.comb(k, i) * b) for i, b in enumerate(pair.exact_b))

        def f(x):
            return sum(c * x ** i for i, c in enumerate(coefficients))

        def is_zero(value):
            return sympy.simplify(sympy.expand(value)) == 0

        for x in FUNCTIONAL_SAMPLES:
            x = sympy.Rational(x.numerator, x.denominator)
            residual = lam * f(x) - f(x + 1) - sign * x ** k * f(1 + 1 / x)
            checks.append(make_check(f"eq2.24-k{k}-x{x}", is_zero(residual), 0.0, 0, "Theorem 4.3 / Eq (2.24)"))
        f0 = f(sympy.Integer(0))
        if not is_zero(f0):
            checks.append(make_check(f"rem3.2-ratio1-k{k}", is_zero(lam - 1 - f(sympy.Integer(1)) / f0), 0.0, 0,
                                     "Remark 3.2"))
            if sign > 0:
                checks.append(make_check(f"rem3.2-ratio2-k{k}",
                                         is_zero(lam * (lam - 1) / 2 - f(sympy.Integer(2)) / f0), 0.0, 0,
                                         "Remark 3.2"))
    else:
        lam = pair.lam
        coefficients = pair.a

        def f(x):
            return sum(c * x ** i for i, c in enumerate(coefficients))

        for x in FUNCTIONAL_SAMPLES:
            x = float(x)
            scale = max(abs(lam * f(x)), abs(f(x + 1)), abs(x ** k * f(1 + 1 / x)), 1.0)
            residual = abs(lam * f(x) - f(x + 1) - sign * x ** k * f(1 + 1 / x)) / scale
            checks.append(tolerance_check(f"eq2.24-k{k}-x{x:g}", residual, 1e-10, "Theorem 4.3 / Eq (2.24)"))
        f0 = f(0.0)
        if abs(f0) > 1e-12:
            checks.append(tolerance_check(f"rem3.2-ratio1-k{k}", abs(lam - 1 - f(1.0) / f0) / max(1.0, abs(lam)),
                                          1e-10, "Remark 3.2"))
            if sign > 0:
                checks.append(tolerance_check(f"rem3.2-ratio2-k{k}",
                                              abs(lam * (lam - 1) / 2 - f(2.0) / f0) / max(1.0, lam * lam),
                                              1e-10, "Remark 3.2"))

    report = make_report('eigenpair_to_eigenfunction', {'k': k, 'lambda': pair.lam, 'class': pair.palindrome_class},
                         checks, method='exact' if pair.exact else 'numeric')
    return PolyEigenfunction(pair, coefficients, report)


# ---------------------------------------------------------------------------
# Bounds on the leading eigenvalue
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeadingBounds:
    k: int
    lower: float
    upper: float
    lam: float
    S: int
    s: int
    s_printed: int
    lower_printed: float
    upper_printed: float

    def contains(self, tol: float = 1e-9) -> bool:
        return self.lower - tol <= self.lam <= self.upper + tol

    def as_dict(self) -> dict:
        return {'k': self.k, 'lower': self.lower, 'upper': self.upper, 'lambda': self.lam, 'S': self.S,
                's': self.s, 's_printed': self.s_printed, 'lower_printed': self.lower_printed,
                'upper_printed': self.upper_printed}


def printed_min_row_sum(k: int) -> int:
    """The closed form quoted alongside the bounds; it exceeds min_i S_i for even k >= 2."""
    if k % 2 == 0:
        return 2 ** (k // 2 + 1) + 2 ** (k // 2 - 1)
    return 2 ** ((k + 1) // 2) + 2 ** ((k - 1) // 2)


def _row_sum_bounds(S: int, s: int) -> Tuple[float, float]:
    if S == s:
        return float(S), float(S)
    h = (-s + 2 + math.sqrt(s * s + 4 * (S - s))) / 2
    g = (S - 2 + math.sqrt(S * S - 4 * (S - s))) / (2 * (s - 1))
    return s - 1 + h, S - 1 + 1 / g


def leading_bounds(k: int) -> LeadingBounds:
    """
    s - 1 + h <= lambda(-k/2) <= S - 1 + 1/g with S = max_i S_i = 2^k + 1,
    s = min_i S_i over the row sums S_i = 2^i + 2^(k-i) and
    h = (-s + 2 + sqrt(s^2 + 4(S - s)))/2, g = (S - 2 + sqrt(S^2 - 4(S - s)))/(2(s - 1)).

    The asserted interval uses s = min_i S_i. The interval obtained from the
    quoted even-k closed form for s is reported as lower_printed/upper_printed;
    at k = 2 it excludes lambda(-1).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    sums = row_sums(build_mk(k))
    S, s = max(sums), min(sums)
    lower, upper = _row_sum_bounds(S, s)
    s_printed = printed_min_row_sum(k)
    lower_printed, upper_printed = _row_sum_bounds(S, s_printed)
    pair = leading_pair(k)
    bounds = LeadingBounds(k, lower, upper, pair.lam, S, s, s_printed, lower_printed, upper_printed)
    if pair.palindrome_class != PALINDROME:
        raise SpectralError(f"leading eigenvector of M_{k} is not palindromic")
    if not bounds.contains():
        raise SpectralError(f"lambda(-{k}/2) = {pair.lam} violates [{bounds.lower}, {bounds.upper}]")
    return bounds


# ---------------------------------------------------------------------------
# Bernoulli eigenfunctions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentPolynomial:
    """Finite sum of c_n x^n with exact rational c_n (n may be negative)."""

    coefficients: Dict[int, Fraction]

    def __call__(self, x):
        x = Fraction(x)
        return sum((c * x ** n for n, c in self.coefficients.items()), Fraction(0))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients.values())

    def support(self) -> List[int]:
        return sorted(n for n, c in self.coefficients.items() if c != 0)

    def __sub__(self, other: 'LaurentPolynomial') -> 'LaurentPolynomial':
        keys = set(self.coefficients) | set(other.coefficients)
        return LaurentPolynomial({n: self.coefficients.get(n, Fraction(0)) - other.coefficients.get(n, Fraction(0))
                                  for n in keys})

    def scaled(self, factor) -> 'LaurentPolynomial':
        return LaurentPolynomial({n: Fraction(factor) * c for n, c in self.coefficients.items()})

    def render(self, variable: str = 'x') -> str:
        return format_polynomial({n: c for n, c in self.coefficients.items() if c != 0}, variable)


def bernoulli_laurent(k: int) -> LaurentPolynomial:
    """f_k(x) = zeta(-k)/2 (1 + x^k) + (-1)^k k! sum_{n=-1}^{k+1} B_{n+1} B_{k+1-n} x^n / ((n+1)! (k+1-n)!)."""
    if k < 0:
        raise DomainError("k must be >= 0")
    table = bernoulli_numbers(k + 2)
    half_zeta = zeta_at_negative(k, table) / 2
    scale = (-1) ** k * math.factorial(k)
    coefficients = {}
    for n in range(-1, k + 2):
        coefficients[n] = Fraction(scale) * table[n + 1] * table[k + 1 - n] / (
            math.factorial(n + 1) * math.factorial(k + 1 - n))
    coefficients[0] += half_zeta
    coefficients[k] = coefficients.get(k, Fraction(0)) + half_zeta
    return LaurentPolynomial(coefficients)


def transfer_plus(f, k: int, x) -> Fraction:
    """P^+_{-k/2} f at x: (x+1)^k [f(x/(x+1)) + f(1/(x+1))], exactly."""
    x = Fraction(x)
    return (x + 1) ** k * (f(x / (x + 1)) + f(1 / (x + 1)))


def bernoulli_eigenfunction(k: int) -> Tuple[LaurentPolynomial, dict]:
    """f_k with its exact verification: P^+ f_k = f_k for even k, f_k = 0 for odd k."""
    f = bernoulli_laurent(k)
    checks = []
    if k % 2 == 1:
        checks.append(make_check(f"prop4.7-odd-zero-k{k}", f.is_zero(), 0.0, 0, "Prop 4.7"))
    else:
        for x in (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2)):
            checks.append(exact_check(f"prop4.7-fixed-k{k}-x{x}", transfer_plus(f, k, x), f(x), "Prop 4.7"))
    coefficients = {str(n): str(c) for n, c in sorted(f.coefficients.items())}
    report = make_report('bernoulli_eigenfunction', {'k': k}, checks,
                         data={'f': f.render(), 'coefficients': coefficients},
                         method='exact')
    return f, report


def period_function_odd_part(k: int) -> LaurentPolynomial:
    """(-1)^k / k! (f_k(x) - zeta(-k)/2 (1 + x^k)), k >= 1."""
    if k < 1:
        raise DomainError("k must be >= 1")
    half_zeta = zeta_at_negative(k) / 2
    shift = {0: half_zeta}
    shift[k] = shift.get(k, Fraction(0)) + half_zeta
    return (bernoulli_laurent(k) - LaurentPolynomial(shift)).scaled(Fraction((-1) ** k, math.factorial(k)))


# ---------------------------------------------------------------------------
# Pseudo-scalar product and the lambda = 1 eigenspace
# ---------------------------------------------------------------------------

def pseudo_scalar(b, c) -> float:
    """<Phi, Psi> = sum_i b_i c_{k-i} (real vectors)."""
    return sum(x * y for x, y in zip(b, reversed(list(c))))


def pseudo_scalar_checks(k: int, trials: int = 5, seed: int = 0) -> dict:
    """<M Phi, Psi> = <Phi, M^T Psi> on random integer vectors and <Phi, Phi> = +-||Phi||^2 on eigenvectors."""
    if k < 1:
        raise DomainError("k must be >= 1")
    matrix = build_mk(k)
    rng = np.random.default_rng(seed)
    checks = []
    for trial in range(trials):
        phi = [int(v) for v in rng.integers(-9, 10, size=k + 1)]
        psi = [int(v) for v in rng.integers(-9, 10, size=k + 1)]
        checks.append(exact_check(f"rem4.2-adjoint-k{k}-{trial}", pseudo_scalar(matrix.apply(phi), psi),
                                  pseudo_scalar(phi, matrix.apply_transposed(psi)), "Remark 4.2"))
    for index, pair in enumerate(mk_spectrum(k)):
        if abs(pair.lam) < 1e-8:
            continue
        norm2 = sum(v * v for v in pair.b)
        value = pseudo_scalar(pair.b, pair.b)
        checks.append(tolerance_check(f"rem4.2-sign-k{k}-{index}", abs(value - pair.sign * norm2) / norm2, 1e-10,
                                      "Remark 4.2"))
    return make_report('pseudo_scalar_checks', {'k': k, 'trials': trials, 'seed': seed}, checks)


def _reflection_rank(null: List[sympy.Matrix], sign: int) -> int:
    if not null:
        return 0
    return sympy.Matrix.hstack(*[_symmetrized(v, sign) for v in null]).rank()


def period_search(k: int) -> dict:
    """Dimension of the lambda = 1 eigenspace of M_k with its palindromic and skew parts (exact)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    M = build_mk(k).sympy_matrix()
    null = (M - sympy.eye(k + 1)).nullspace()
    palindromic = _reflection_rank(null, 1)
    skew = _reflection_rank(null, -1)
    return {'k': k, 'dimension': len(null), 'palindromic': palindromic, 'skew': skew,
            'unit_skew_fixed': skew_fixed_vector_check(k)}


def period_search_table(k_max: int, workers: Optional[int] = None) -> pd.DataFrame:
    """period_search for k = 1..k_max; reported, never asserted."""
    workers = workers or get_config().workers
    status.info(f"Scanning the lambda = 1 eigenspaces of M_1..M_{k_max}")
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='period-search') as pool:
        rows = list(pool.map(period_search, range(1, k_max + 1)))
    return pd.DataFrame(rows)


def warmup_table() -> pd.DataFrame:
    """
    lambda(q) and the leading eigen-polynomial for q = 0, -1/2, -1, -3/2, -2.

    'coefficients' lists a_0..a_k (constant term first, a_0 = 1).
    """
    rows = []
    for k in range(5):
        pair = leading_pair(k)
        rows.append({'q': str(Fraction(-k, 2)), 'k': k, 'lambda': pair.lam, 'coefficients': pair.a,
                     'polynomial': format_polynomial(dict(enumerate(pair.a)))})
    return pd.DataFrame(rows)
