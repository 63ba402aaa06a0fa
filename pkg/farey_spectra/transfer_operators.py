"""
Finite truncations of the operators M, N, P+- = M +- N, Q+- = I +- M^{-1}N
and J = N M^{-1} on L^2(m_q), their spectra and structural checks.

M is multiplication by e^{-t}; N is the integral operator with kernel
J_p(2 sqrt(st)) / (st)^{p/2} against m_q. Symmetric operators are stored
in the orthonormal basis e_n/||e_n||; Q+- is stored exactly in the
e-basis where it is triangular.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import linalg, special

from .config import get_config
from .exceptions import AccuracyWarning, DomainError, SpectralError
from .laguerre_space import (CoefficientVector, SpaceParams, change_coefficient, norm_e, norm_sq_e)
from .special_functions import (bessel_ratio, gauss_laguerre, generalized_binomial, jacobi_p0_at_zero,
                                laguerre, laguerre_table)
from .utils import status
from .utils.reporting import exact_check, make_check, make_report, relative_error, tolerance_check

KINDS = ('M', 'N', 'P+', 'P-', 'Q+', 'Q-', 'J')

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """K x K truncation of one operator; exact_entries is set for the Q matrices."""

    kind: str
    params: SpaceParams
    basis: str
    entries: np.ndarray = field(repr=False)
    exact_entries: Optional[Tuple[Tuple[Fraction, ...], ...]] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])

    @property
    def symmetric(self) -> bool:
        return self.kind in ('M', 'N', 'P+', 'P-')

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T)))

    def perturbed(self, i: int, j: int, delta: float) -> 'OperatorMatrix':
        """Copy with entry (i, j) shifted by delta."""
        entries = self.entries.copy()
        entries[i, j] += delta
        return OperatorMatrix(self.kind, self.params, self.basis, entries)

    def apply_exact(self, coeffs) -> list:
        """Exact matrix-vector product (Q matrices only)."""
        if self.exact_entries is None:
            raise DomainError(f"{self.kind} has no exact representation")
        c = list(coeffs) + [0] * (self.size - len(coeffs))
        return [sum(row[j] * c[j] for j in range(self.size) if row[j]) for row in self.exact_entries]

    def to_frame(self) -> pd.DataFrame:
        rows, cols = np.indices(self.entries.shape)
        return pd.DataFrame({'row': rows.ravel(), 'col': cols.ravel(), 'value': self.entries.ravel()})


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    kind: str
    params: SpaceParams
    eigenvalues: np.ndarray
    eigenvectors: List[CoefficientVector] = field(repr=False)
    residuals: np.ndarray = field(repr=False)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'index': np.arange(self.eigenvalues.size),
                             'eigenvalue': self.eigenvalues, 'residual': self.residuals})


def golden_eigenvalue(q, k: int) -> float:
    """(-1)^k alpha^{2(q+k)}, the k-th eigenvalue of N."""
    return (-1) ** k * GOLDEN ** (2 * (float(q) + k))


# ---------------------------------------------------------------------------
# Exact Gram table (M f_n, e_m) = (N e_n, e_m)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GramTable:
    """
    I(n, m) = (M f_n, e_m) = factor * ratios[n][m].

    factor is Gamma(p+1) 2^{-p-1}: a Fraction for integer p, a float
    otherwise. The ratios are exact rationals for every rational q.
    """

    params: SpaceParams
    size: int
    factor: object
    ratios: Tuple[Tuple[Fraction, ...], ...] = field(repr=False)

    def value(self, n: int, m: int):
        return self.factor * self.ratios[n][m]

    def m_gram(self, n: int, m: int):
        """(M e_n, e_m) = sum_j a_{n,j} I(j, m)."""
        total = sum(change_coefficient(self.params, n, j) * self.ratios[j][m] for j in range(n + 1))
        return self.factor * total


@lru_cache(maxsize=16)
def _gram_ratios(q: Fraction, size: int) -> Tuple[Tuple[Fraction, ...], ...]:
    p = 2 * q - 1
    top = 2 * size
    # column m holds I(n, m)/factor for n = 0..top-m
    column = [Fraction(1)]
    for n in range(top):
        column.append(column[-1] * (p + 1 + n) / (2 * (n + 1)))
    columns = [column]
    previous = None
    for m in range(size - 1):
        current = columns[-1]
        nxt = []
        for n in range(top - m):
            value = (2 * m + 1 + p) * current[n] - (n + 1) * current[n + 1]
            if previous is not None:
                value -= (m + p) * previous[n]
            nxt.append(value / (m + 1))
        previous = current
        columns.append(nxt)
    return tuple(tuple(columns[m][n] for m in range(size)) for n in range(size))


def exact_gram_table(params: SpaceParams, K: Optional[int] = None) -> GramTable:
    """
    (M f_n, e_m) for n, m < K from the Laguerre three-term recurrence:
    (m+1) I(n,m+1) = (2m+1+p) I(n,m) - (n+1) I(n+1,m) - (m+p) I(n,m-1),
    starting from I(n,0) = Gamma(n+p+1)/(n! 2^{n+p+1}).
    """
    if not params.rational:
        raise DomainError(f"the exact Gram table needs a rational q, got {params.q}")
    size = K or params.K
    p = params.p
    if isinstance(p, int):
        factor = Fraction(math.factorial(p), 2 ** (p + 1))
    else:
        factor = math.exp(special.gammaln(float(p) + 1.0) - (float(p) + 1.0) * math.log(2.0))
    return GramTable(params, size, factor, _gram_ratios(params.q, size))


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _norms(params: SpaceParams, size: int) -> np.ndarray:
    return np.array([norm_e(params, n) for n in range(size)])


@lru_cache(maxsize=16)
def _assemble_M_entries(params: SpaceParams) -> np.ndarray:
    K = params.K
    p = float(params.p)
    rule = gauss_laguerre(p, 2 * K + 32)
    values = laguerre_table(K - 1, p, rule.nodes / 2.0) / _norms(params, K)[:, None]
    v = values * np.exp(0.5 * rule.log_weights)[None, :]
    entries = 2.0 ** (-p - 1.0) * (v @ v.T)
    return 0.5 * (entries + entries.T)


def assemble_M(params: SpaceParams) -> OperatorMatrix:
    """
    (M e^_n, e^_m) = 2^{-p-1} int e^_n(u/2) e^_m(u/2) u^p e^{-u} du, by a
    Gauss-Laguerre rule that is exact for the polynomial integrand.
    """
    status.info(f"Assembling M (q={params.q}, K={params.K})")
    return OperatorMatrix('M', params, 'ehat', _assemble_M_entries(params).copy())


@lru_cache(maxsize=16)
def _assemble_N_exact(params: SpaceParams) -> np.ndarray:
    table = exact_gram_table(params)
    norms = _norms(params, params.K)
    factor = float(table.factor)
    entries = np.array([[float(table.ratios[n][m]) for n in range(params.K)] for m in range(params.K)])
    entries = factor * entries / np.outer(norms, norms)
    return 0.5 * (entries + entries.T)


def _kernel_rows(p: float, nodes: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return bessel_ratio(p, 2.0 * np.sqrt(np.outer(nodes[rows], nodes)))


@lru_cache(maxsize=8)
def _assemble_N_kernel(params: SpaceParams, count: int, workers: int) -> np.ndarray:
    K = params.K
    p = float(params.p)
    rule = gauss_laguerre(p, count)
    norms = _norms(params, K)
    values = laguerre_table(K - 1, p, rule.nodes) / norms[:, None]
    v = values * rule.weights[None, :]

    chunks = [c for c in np.array_split(np.arange(rule.count), workers) if c.size]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='kernel-rows') as pool:
        futures = [pool.submit(_kernel_rows, p, rule.nodes, chunk) for chunk in chunks]
        kernel = np.vstack([future.result() for future in futures])

    entries = v @ kernel @ v.T
    return 0.5 * (entries + entries.T)


def assemble_N(params: SpaceParams, method: Optional[str] = None) -> OperatorMatrix:
    """
    N in the orthonormal basis.

    method='exact' uses N e_n = M f_n and the exact Gram table (rational q
    only); method='kernel' double-integrates the Bessel kernel on a
    Gauss-Laguerre grid. The default is exact whenever q is rational.
    """
    if method is None:
        method = 'exact' if params.rational else 'kernel'
    status.info(f"Assembling N by the {method} route (q={params.q}, K={params.K})")
    if method == 'exact':
        entries = _assemble_N_exact(params)
    elif method == 'kernel':
        config = get_config()
        count = max(config.hankel_nodes, 2 * params.K + 32)
        entries = _assemble_N_kernel(params, count, config.workers)
    else:
        raise DomainError(f"method must be 'exact' or 'kernel', got {method!r}")
    return OperatorMatrix('N', params, 'ehat', entries.copy())


def q_operator_entries(params: SpaceParams, sign: int, size: Optional[int] = None):
    """Exact e-basis matrix of I +- A^T, i.e. Q+- acting on e-coefficient columns."""
    size = size or params.K
    return tuple(tuple((1 if i == j else 0) + sign * change_coefficient(params, j, i) for j in range(size))
                 for i in range(size))


def assemble_derived(params: SpaceParams, kind: str, M: Optional[OperatorMatrix] = None,
                     N: Optional[OperatorMatrix] = None) -> OperatorMatrix:
    """P+-, Q+- or J. Q+- is exact and needs no inversion; J is a diagnostic."""
    if kind in ('Q+', 'Q-'):
        sign = 1 if kind == 'Q+' else -1
        exact = q_operator_entries(params, sign)
        return OperatorMatrix(kind, params, 'e', np.array(exact, dtype=float), exact)

    M = M or assemble_M(params)
    N = N or assemble_N(params)
    if kind == 'P+':
        return OperatorMatrix(kind, params, 'ehat', M.entries + N.entries)
    if kind == 'P-':
        return OperatorMatrix(kind, params, 'ehat', M.entries - N.entries)
    if kind == 'J':
        condition = np.linalg.cond(M.entries)
        if condition > 1e12:
            warnings.warn(f"M is ill-conditioned (cond={condition:.3g}); the truncated J is unreliable",
                          AccuracyWarning, stacklevel=2)
        # N M^{-1} = (M^{-1} N)^T for symmetric M and N
        solved = linalg.solve(M.entries, N.entries, assume_a='sym')
        return OperatorMatrix('J', params, 'ehat', solved.T)
    raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")


def build_operator(params: SpaceParams, kind: str, method: Optional[str] = None) -> OperatorMatrix:
    if kind == 'M':
        return assemble_M(params)
    if kind == 'N':
        return assemble_N(params, method)
    if kind in ('P+', 'P-', 'J'):
        return assemble_derived(params, kind, N=assemble_N(params, method))
    return assemble_derived(params, kind)


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def _normalize_sign(vector: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(vector))
    for value in vector:
        if abs(value) > 1e-12 * scale:
            return vector if value > 0 else -vector
    return vector


def spectrum(matrix: OperatorMatrix) -> SpectrumResult:
    """Symmetric eigen-decomposition, eigenvalues descending, first nonzero component positive."""
    if not matrix.symmetric:
        raise DomainError(f"spectrum needs a symmetric operator, {matrix.kind} is not; use spectral_radius")
    try:
        values, vectors = linalg.eigh(matrix.entries)
    except linalg.LinAlgError as e:
        raise SpectralError(f"eigen-solve for {matrix.kind} failed: {e}")

    order = np.argsort(values)[::-1]
    values = values[order]
    vectors = vectors[:, order]
    eigenvectors = []
    residuals = np.empty(values.size)
    for k in range(values.size):
        v = _normalize_sign(vectors[:, k])
        residuals[k] = np.linalg.norm(matrix.entries @ v - values[k] * v) / np.linalg.norm(v)
        eigenvectors.append(CoefficientVector(matrix.params, 'ehat', tuple(v)))
    return SpectrumResult(matrix.kind, matrix.params, values, eigenvectors, residuals)


def spectral_radius(matrix: OperatorMatrix) -> float:
    """Largest |eigenvalue|; read off the exact diagonal for the triangular Q matrices."""
    if matrix.exact_entries is not None:
        return float(max(abs(row[i]) for i, row in enumerate(matrix.exact_entries)))
    if matrix.symmetric:
        return float(np.max(np.abs(linalg.eigvalsh(matrix.entries))))
    return float(np.max(np.abs(linalg.eigvals(matrix.entries))))


def operator_norm(matrix: OperatorMatrix) -> float:
    return float(linalg.norm(matrix.entries, 2))


# ---------------------------------------------------------------------------
# Self-reciprocal pairs and structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelfReciprocalPairFamily:
    """
    l_n^+- = e_n +- f_n as exact e-coefficients and h_n^+- = e^{-t} l_n^+-
    as truncated e-coefficients (h_plus/h_minus, length K).
    """

    params: SpaceParams
    n: int
    l_plus: Tuple
    l_minus: Tuple
    h_plus: Tuple = field(repr=False)
    h_minus: Tuple = field(repr=False)

    def degree(self, sign: int) -> int:
        """Polynomial degree of l_n^+- read from its f-coefficients a_{n,.} +- delta_n."""
        coeffs = [sign * change_coefficient(self.params, self.n, m) + (1 if m == self.n else 0)
                  for m in range(self.n + 1)]
        for m in range(self.n, -1, -1):
            if coeffs[m] != 0:
                return m
        return -1


def pair_family(params: SpaceParams, n: int) -> SelfReciprocalPairFamily:
    if n < 0 or n >= params.K:
        raise DomainError(f"n must lie in [0, K), got {n}")
    row = [change_coefficient(params, n, m) for m in range(params.K)]
    delta = [1 if m == n else 0 for m in range(params.K)]
    l_plus = tuple(d + a for d, a in zip(delta, row))
    l_minus = tuple(d - a for d, a in zip(delta, row))

    if params.rational:
        table = exact_gram_table(params)
        gram_m = [table.m_gram(n, m) for m in range(params.K)]
        gram_n = [table.value(n, m) for m in range(params.K)]
    else:
        M = assemble_M(params).entries
        N = assemble_N(params).entries
        norms = _norms(params, params.K)
        gram_m = list(M[n] * norms[n] * norms)
        gram_n = list(N[n] * norms[n] * norms)
    h_plus = tuple((gm + gn) / norm_sq_e(params, m) for m, (gm, gn) in enumerate(zip(gram_m, gram_n)))
    h_minus = tuple((gm - gn) / norm_sq_e(params, m) for m, (gm, gn) in enumerate(zip(gram_m, gram_n)))
    return SelfReciprocalPairFamily(params, n, l_plus, l_minus, h_plus, h_minus)


def positivity_form(params: SpaceParams, n: int, sign: int):
    """((M +- N) e_n, e_n)/||e_n||^2 = 2^{-2n-2q} sum_k (1 +- (-1)^{n-k}) C(n+p,k) C(n,k)."""
    total = sum((1 + sign * (-1) ** (n - k)) * generalized_binomial(n + params.p, k) * math.comb(n, k)
                for k in range(n + 1))
    if params.exact:
        return Fraction(total) / Fraction(2) ** (2 * n + params.p + 1)
    return float(total) * 2.0 ** (-2 * n - 2 * float(params.q))


def m_diagonal(params: SpaceParams, n: int):
    """(M e_n, e_n)/||e_n||^2 = 2^{-2n-2q} C(2n+p, n)."""
    value = generalized_binomial(2 * n + params.p, n)
    if params.exact:
        return Fraction(value) / Fraction(2) ** (2 * n + params.p + 1)
    return float(value) * 2.0 ** (-2 * n - 2 * float(params.q))


def n_diagonal(params: SpaceParams, n: int):
    """(N e_n, e_n)/||e_n||^2 = 2^{-n-2q} P_n^{(p,0)}(0)."""
    value = jacobi_p0_at_zero(n, params.p)
    if params.exact:
        return Fraction(value) / Fraction(2) ** (n + params.p + 1)
    return float(value) * 2.0 ** (-n - 2 * float(params.q))


def verify_structure(params: SpaceParams, n_max: int) -> dict:
    """Swap relations, positivity forms, density signs and degree bookkeeping for n <= n_max."""
    if n_max >= params.K:
        raise DomainError(f"n_max={n_max} must be < K={params.K}")
    status.info(f"Checking operator structure for n <= {n_max} (q={params.q}, K={params.K})")
    M = assemble_M(params)
    N = assemble_N(params)
    A_size = n_max + 1
    table = exact_gram_table(params) if params.rational else None
    norms = _norms(params, A_size)
    checks = []

    for n in range(n_max + 1):
        a_row = [change_coefficient(params, n, m) for m in range(A_size)]
        delta = [1 if m == n else 0 for m in range(A_size)]
        swap_f = [sum(change_coefficient(params, i, j) * a_row[i] for i in range(A_size)) for j in range(A_size)]
        swap_e = [sum(change_coefficient(params, i, j) * delta[i] for i in range(A_size)) for j in range(A_size)]
        checks.append(exact_check(f"eq2.17-swap-f-{n}", tuple(swap_f), tuple(delta), "Eq (2.17)"))
        checks.append(exact_check(f"eq2.17-swap-e-{n}", tuple(swap_e), tuple(a_row), "Eq (2.17)"))

        norm2 = float(norm_sq_e(params, n))
        for sign, label in ((1, 'plus'), (-1, 'minus')):
            form = positivity_form(params, n, sign)
            assembled = M.entries[n, n] + sign * N.entries[n, n]
            checks.append(tolerance_check(f"prop2.6-form-{label}-{n}", relative_error(assembled, form)
                                          if form else abs(assembled), 1e-10, "proof of Prop 2.6"))
            if params.exact:
                exact_form = m_diagonal(params, n) + sign * n_diagonal(params, n)
                checks.append(exact_check(f"prop2.6-sum-{label}-{n}", exact_form, form, "proof of Prop 2.6"))

        family = pair_family(params, n)
        h_plus_inner = float(family.h_plus[n]) * norm2
        h_minus_inner = float(family.h_minus[n]) * norm2
        checks.append(make_check(f"prop2.11-h-plus-{n}", h_plus_inner > 0, reference="Prop 2.11",
                                 detail={'inner': h_plus_inner}))
        if n >= 1:
            checks.append(make_check(f"prop2.11-h-minus-{n}", h_minus_inner > 0, reference="Prop 2.11",
                                     detail={'inner': h_minus_inner}))

        expected_plus = n if n % 2 == 0 else n - 1
        expected_minus = n if n % 2 == 1 else n - 1
        checks.append(exact_check(f"l-degree-plus-{n}", family.degree(1), expected_plus, "degrees before Prop 2.12"))
        checks.append(exact_check(f"l-degree-minus-{n}", family.degree(-1), expected_minus,
                                  "degrees before Prop 2.12"))

        inner_plus = family.l_plus[n] * norm_sq_e(params, n)
        checks.append(exact_check(f"eq2.29-l-plus-{n}", inner_plus,
                                  2 * norm_sq_e(params, n) if n % 2 == 0 else 0, "Eq (2.29)"))

        # A has entries of size C(n+p, n/2); beyond n = 10 the float sum loses too much
        if table is not None and n <= 10:
            via_M = sum(float(change_coefficient(params, n, j)) * M.entries[j, n] * norms[j] * norms[n]
                        for j in range(n + 1))
            checks.append(tolerance_check(f"eq2.17-Ne-equals-Mf-{n}", abs(via_M - float(table.value(n, n))) / norm2,
                                          1e-8, "proof of Prop 2.15", detail={'quadrature': via_M}))

    return make_report('verify_structure', {**params.describe(), 'n_max': n_max}, checks)


def q_kernel_checks(params: SpaceParams, n_limit: int) -> List[dict]:
    """Q+- l_n^+- = 2 l_n^+- and Q+- l_n^-+ = 0 exactly for n < n_limit."""
    size = min(n_limit, params.K)
    q_plus = q_operator_entries(params, 1, size)
    q_minus = q_operator_entries(params, -1, size)
    checks = []
    for n in range(size):
        row = [change_coefficient(params, n, m) for m in range(size)]
        delta = [1 if m == n else 0 for m in range(size)]
        l_plus = [d + a for d, a in zip(delta, row)]
        l_minus = [d - a for d, a in zip(delta, row)]
        apply = _exact_product
        checks.append(exact_check(f"prop2.12-Qplus-lplus-{n}", tuple(apply(q_plus, l_plus)),
                                  tuple(2 * v for v in l_plus), "proof of Prop 2.12"))
        checks.append(exact_check(f"prop2.12-Qminus-lminus-{n}", tuple(apply(q_minus, l_minus)),
                                  tuple(2 * v for v in l_minus), "proof of Prop 2.12"))
        checks.append(exact_check(f"cor2.14-Qminus-lplus-{n}", tuple(apply(q_minus, l_plus)),
                                  tuple([0] * size), "Cor 2.14"))
        checks.append(exact_check(f"cor2.14-Qplus-lminus-{n}", tuple(apply(q_plus, l_minus)),
                                  tuple([0] * size), "Cor 2.14"))
    return checks


def _exact_product(matrix, vector):
    return [sum(row[j] * vector[j] for j in range(len(vector)) if row[j] and vector[j]) for row in matrix]


def eigenfunction_psi(params: SpaceParams, k: int):
    """psi_k(t) = sqrt(5^q k!/Gamma(k+2q)) L_k^p(sqrt5 t) e^{-alpha t}, normalized in L^2(m_q)."""
    q = float(params.q)
    p = float(params.p)
    c = math.exp(0.5 * (q * math.log(5.0) + special.gammaln(k + 1.0) - special.gammaln(k + 2 * q)))
    root5 = math.sqrt(5.0)

    def psi(t):
        t = np.asarray(t, dtype=float)
        return c * laguerre(k, p, root5 * t) * np.exp(-GOLDEN * t)

    return psi


def n_eigensystem_check(params: SpaceParams, k_max: int) -> dict:
    """N psi_k = (-1)^k alpha^{2(q+k)} psi_k, ||psi_k|| = 1 and ||N|| = alpha^{2q}."""
    if k_max > 8:
        raise DomainError("k_max must be <= 8")
    N = assemble_N(params)
    K = params.K
    p = float(params.p)
    rule = gauss_laguerre(p, 2 * K + 32)
    basis = laguerre_table(K - 1, p, rule.nodes) / _norms(params, K)[:, None]
    checks = []
    eigenvalues = []
    for k in range(k_max + 1):
        psi = eigenfunction_psi(params, k)(rule.nodes)
        coeffs = basis @ (rule.weights * psi)
        lam = golden_eigenvalue(params.q, k)
        eigenvalues.append(lam)
        residual = np.linalg.norm(N.entries @ coeffs - lam * coeffs) / np.linalg.norm(coeffs)
        norm = math.sqrt(rule.integrate(psi * psi))
        checks.append(tolerance_check(f"eq2.31-residual-{k}", residual, 1e-8, "Eq (2.31)"))
        checks.append(tolerance_check(f"eq2.31-norm-{k}", abs(norm - 1.0), 1e-8, "Prop 2.15"))

    norm_N = spectral_radius(N)
    checks.append(tolerance_check("cor2.16-norm", abs(norm_N - GOLDEN ** (2 * float(params.q))), 1e-8, "Cor 2.16",
                                  detail={'norm': norm_N}))
    return make_report('n_eigensystem_check', {**params.describe(), 'k_max': k_max}, checks,
                       data={'eigenvalues': eigenvalues, 'norm': norm_N})


def nuclearity_series(params: SpaceParams, n_max: int) -> pd.DataFrame:
    """Partial sums of ||e_n|| ||g_n||, ||g_n|| = sqrt(Gamma(2n+2q))/(n! 3^{n+q}), with term ratios."""
    q = float(params.q)
    n = np.arange(n_max + 1, dtype=float)
    log_e = 0.5 * (special.gammaln(n + 2 * q) - special.gammaln(n + 1))
    log_g = 0.5 * special.gammaln(2 * n + 2 * q) - special.gammaln(n + 1) - (n + q) * math.log(3.0)
    terms = np.exp(log_e + log_g)
    ratios = np.concatenate(([np.nan], terms[1:] / terms[:-1]))
    return pd.DataFrame({'n': n.astype(int), 'term': terms, 'partial_sum': np.cumsum(terms), 'ratio': ratios})


@dataclass(frozen=True)
class DriftDiagnostic:
    K: int
    eigenvalue_K: float
    eigenvalue_2K: float
    residual_scale: float

    @property
    def drift(self) -> float:
        return abs(self.eigenvalue_2K - self.eigenvalue_K)


def drift_diagnostic(params: SpaceParams, target: float = 0.5) -> DriftDiagnostic:
    """Eigenvalue of the truncated P^+ nearest target at K and at 2K."""
    nearest = []
    residual = 0.0
    for size in (params.K, 2 * params.K):
        result = spectrum(assemble_derived(params.with_K(size), 'P+'))
        index = int(np.argmin(np.abs(result.eigenvalues - target)))
        nearest.append(float(result.eigenvalues[index]))
        residual = max(residual, float(result.residuals[index]))
    return DriftDiagnostic(params.K, nearest[0], nearest[1], residual)


def spectrum_report(params: SpaceParams, kind: str, top: int = 5) -> dict:
    """Envelope {kind, q, K, eigenvalues, checks} used by the spectrum command."""
    matrix = build_operator(params, kind)
    result = spectrum(matrix)
    checks = []
    values = result.eigenvalues
    if kind == 'N':
        by_magnitude = sorted(values, key=lambda v: -abs(v))[:top]
        for k, value in enumerate(by_magnitude):
            checks.append(tolerance_check(f"eq2.30-eig-{k}", abs(value - golden_eigenvalue(params.q, k)), 1e-8,
                                          "Eq (2.30)"))
    if kind in ('P+', 'P-'):
        low, high = float(values.min()), float(values.max())
        checks.append(tolerance_check(f"thm1.1-confinement-{kind}", max(0.0, -1e-10 - low, high - 1 - 1e-10), 0.0,
                                      "Theorem 1.1"))
    if kind == 'M':
        low, high = float(values.min()), float(values.max())
        checks.append(tolerance_check("prop2.6-M-range", max(0.0, -1e-12 - low, high - 1.0), 0.0, "Prop 2.6"))
    return make_report('spectrum', {**params.describe(), 'kind': kind}, checks,
                       data={'kind': kind, 'eigenvalues': [float(v) for v in values],
                             'residuals': [float(r) for r in result.residuals]})
