"""
Hankel transforms J, J~ and K and their self-reciprocal families.

    J phi(t)  = int J_p(2 sqrt(st)) (s/t)^{p/2} phi(s) ds
    J~ psi(t) = int J_p(2 sqrt(st)) (t/s)^{p/2} psi(s) ds
    K f(t)    = int J_p(st) sqrt(st) f(s) ds

All three are evaluated with a generalized Gauss-Laguerre rule of order p,
the e^{-s} decay of the test families being absorbed in the weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import special

from .config import get_config
from .exceptions import AccuracyWarning, DomainError
from .laguerre_space import phi_normalization
from .special_functions import (bessel_ratio, gauss_laguerre, generalized_binomial, hyp2f1_terminating, laguerre,
                                rising_factorial)
from .utils.reporting import exact_check, make_report, tolerance_check

TAGS = ('J', 'Jtilde', 'K')
FAMILY_KINDS = ('phi', 'psi', 'smallphi', 'h+', 'h-')

_MATCHING_TRANSFORM = {'phi': 'J', 'psi': 'Jtilde', 'smallphi': 'K', 'h+': 'J', 'h-': 'J'}
_RESIDUAL_NODES = 40
_TAIL_FRACTION = 1e-8


@dataclass(frozen=True)
class HankelKind:
    tag: str
    p: float

    def __post_init__(self):
        if self.tag not in TAGS:
            raise DomainError(f"Hankel transform must be one of {TAGS}, got {self.tag!r}")
        if self.p <= -1:
            raise DomainError(f"p must be > -1, got {self.p}")


@dataclass(frozen=True)
class ReciprocalFamily:
    """phi_n, psi_n = t^p phi_n, the K-family smallphi_n, or h_n^+- = e^{-t}(e_n +- f_n)."""

    kind: str
    p: float
    n: int

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise DomainError(f"family must be one of {FAMILY_KINDS}, got {self.kind!r}")
        if self.p <= -1:
            raise DomainError(f"p must be > -1, got {self.p}")
        if self.n < 0:
            raise DomainError("n must be >= 0")

    @property
    def sign(self) -> int:
        """Eigenvalue of the matching transform."""
        if self.kind == 'h+':
            return 1
        if self.kind == 'h-':
            return -1
        return (-1) ** self.n

    @property
    def transform(self) -> HankelKind:
        return HankelKind(_MATCHING_TRANSFORM[self.kind], self.p)

    def __call__(self, t):
        return family_eval(self, t)


def family_eval(fam: ReciprocalFamily, t):
    """Pointwise value of a family member (scalar or array t > 0)."""
    x = np.asarray(t, dtype=float)
    if np.any(x < 0):
        raise DomainError("families are evaluated at t >= 0")
    p, n = float(fam.p), fam.n
    if fam.kind in ('phi', 'psi'):
        value = phi_normalization(p, n) * np.exp(-x) * laguerre(n, p, 2.0 * x)
        if fam.kind == 'psi':
            value = value * x ** p
    elif fam.kind == 'smallphi':
        c = math.exp(0.5 * (math.log(2.0) + special.gammaln(n + 1.0) - special.gammaln(n + p + 1.0)))
        value = c * np.exp(-x * x / 2.0) * x ** (p + 0.5) * laguerre(n, p, x * x)
    else:
        sign = 1.0 if fam.kind == 'h+' else -1.0
        value = np.exp(-x) * (laguerre(n, p, x) + sign * x ** n / math.factorial(n))
    return float(value) if np.ndim(t) == 0 else value


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def hankel_apply(kind: HankelKind, phi: Callable, t, count: Optional[int] = None):
    """
    Value of the transform of phi at t > 0 (scalar or array).

    Accurate to about 1e-7 for inputs decaying like e^{-s} (J, J~) or
    e^{-s^2/2} (K); an AccuracyWarning flags integrands whose tail on the
    last quadrature nodes is not negligible.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times <= 0):
        raise DomainError("Hankel transforms are evaluated at t > 0")
    p = float(kind.p)
    rule = gauss_laguerre(p, count or get_config().hankel_nodes)
    u = rule.nodes
    plain = rule.plain_weights()

    if kind.tag == 'K':
        s = np.sqrt(2.0 * u)
        weights = plain / s
    else:
        s = u
        weights = plain
    values = np.asarray(phi(s), dtype=float)
    _warn_on_tail(weights * values)

    out = np.empty(times.size)
    for i, time in enumerate(times):
        if kind.tag == 'J':
            kernel = bessel_ratio(p, 2.0 * np.sqrt(s * time)) * s ** p
        elif kind.tag == 'Jtilde':
            kernel = bessel_ratio(p, 2.0 * np.sqrt(s * time)) * time ** p
        else:
            z = s * time
            kernel = bessel_ratio(p, z) * (z / 2.0) ** p * np.sqrt(z)
        out[i] = float(np.dot(weights, kernel * values))
    return float(out[0]) if np.ndim(t) == 0 else out


def _warn_on_tail(contributions: np.ndarray) -> None:
    magnitude = np.abs(contributions)
    total = magnitude.sum()
    if total == 0 or not np.isfinite(total):
        if not np.isfinite(total):
            warnings.warn("Hankel integrand is not finite on the quadrature grid", AccuracyWarning, stacklevel=3)
        return
    if magnitude[-5:].sum() > _TAIL_FRACTION * total:
        warnings.warn("Hankel integrand decays too slowly for the quadrature grid", AccuracyWarning, stacklevel=3)


def _l2_grid(kind: str):
    """Nodes and weights W with sum W g(t) ~ int_0^inf g(t) dt for the residual norms."""
    rule = gauss_laguerre(0.0, _RESIDUAL_NODES)
    plain = rule.plain_weights()
    if kind == 'smallphi':
        t = np.sqrt(rule.nodes)
        return t, plain / (2.0 * t)
    return rule.nodes / 2.0, plain / 2.0


def reciprocity_residual(kind: str, p: float, n_max: int) -> dict:
    """L^2 residuals ||T f_n - sign f_n|| / ||f_n|| for n <= n_max with the matching transform T."""
    if n_max > 8:
        raise DomainError("n_max must be <= 8")
    t, w = _l2_grid(kind)
    checks = []
    residuals = []
    for n in range(n_max + 1):
        fam = ReciprocalFamily(kind, p, n)
        values = family_eval(fam, t)
        transformed = hankel_apply(fam.transform, fam, t)
        difference = transformed - fam.sign * values
        # h_0^- vanishes identically; fall back to the absolute residual
        scale = float(np.dot(w, values ** 2)) or 1.0
        residual = math.sqrt(float(np.dot(w, difference ** 2)) / scale)
        residuals.append(residual)
        checks.append(tolerance_check(f"eq3.10-{kind}-{n}", residual, 1e-6,
                                      "Eq (3.14)" if kind == 'smallphi' else "Eq (3.10)"))
    return make_report('reciprocity_residual', {'family': kind, 'p': p, 'n_max': n_max}, checks,
                       data={'residuals': residuals}, method='quadrature')


def biorthogonality_matrix(p: float, n_max: int) -> np.ndarray:
    """<phi_n, psi_m> for n, m <= n_max (the identity matrix)."""
    rule = gauss_laguerre(float(p), n_max + 4)
    t = rule.nodes / 2.0
    values = np.array([family_eval(ReciprocalFamily('phi', p, n), t) * np.exp(t) for n in range(n_max + 1)])
    # <phi_n, psi_m> = 2^{-p-1} int phi_n(x/2) phi_m(x/2) e^{x} x^p e^{-x} dx
    return 2.0 ** (-float(p) - 1.0) * (values * rule.weights) @ values.T


def smallphi_gram(p: float, n_max: int) -> np.ndarray:
    """Gram matrix of smallphi_0..smallphi_{n_max} in L^2(R_+)."""
    rule = gauss_laguerre(float(p), n_max + 4)
    t = np.sqrt(rule.nodes)
    scale = np.exp(rule.nodes / 2.0) * rule.nodes ** (-float(p) / 2.0 - 0.25)
    values = np.array([family_eval(ReciprocalFamily('smallphi', p, n), t) * scale for n in range(n_max + 1)])
    return 0.5 * (values * rule.weights) @ values.T


# ---------------------------------------------------------------------------
# Mellin side
# ---------------------------------------------------------------------------

def mellin_weighted(p, n: int, s) -> Fraction:
    """((p+1)_n/n!) 2F1(-n, s; p+1; 2), the weighted Mellin transform of e^{-t} L_n^p(2t)."""
    p, s = Fraction(p), Fraction(s)
    return rising_factorial(p + 1, n) / math.factorial(n) * hyp2f1_terminating(n, s, p + 1, 2)


def mellin_weighted_sum(p, n: int, s) -> Fraction:
    """The same value as sum_k C(n+p, n-k) (s)_k (-2)^k / k!."""
    p, s = Fraction(p), Fraction(s)
    return sum(generalized_binomial(n + p, n - k) * rising_factorial(s, k) * Fraction(-2) ** k / math.factorial(k)
               for k in range(n + 1))


def mellin_numeric(p: float, n: int, s: float, count: Optional[int] = None) -> float:
    """int e^{-t} L_n^p(2t) t^{s-1} dt / Gamma(s) by quadrature, real s > 0."""
    if s <= 0:
        raise DomainError("mellin_numeric needs s > 0")
    rule = gauss_laguerre(float(s) - 1.0, count or n + 4)
    return rule.integrate(laguerre(n, float(p), 2.0 * rule.nodes)) / special.gamma(float(s))


def laplace_pair_residual(p: float, n: int, a_values: Iterable[float] = (0.5, 1.0, 3.0)) -> list:
    """
    |int a^{-q} e^{-t/a} psi_n dt - (-1)^n int a^q e^{-at} psi_n dt| for each a,
    with q = (p+1)/2.
    """
    p = float(p)
    q = (p + 1.0) / 2.0
    c = phi_normalization(p, n)
    rule = gauss_laguerre(p, n + 4)

    def laplace(rate):
        # int t^p e^{-(1+rate) t} L_n(2t) dt
        scale = 1.0 + rate
        return scale ** (-p - 1.0) * rule.integrate(laguerre(n, p, 2.0 * rule.nodes / scale))

    residuals = []
    for a in a_values:
        left = a ** (-q) * c * laplace(1.0 / a)
        right = (-1) ** n * a ** q * c * laplace(a)
        residuals.append(abs(left - right))
    return residuals


def mellin_symmetry_check(p, n_max: int, s_samples: Sequence = (Fraction(0), Fraction(1, 3), Fraction(1, 2),
                                                                  Fraction(2), Fraction(7, 5))) -> dict:
    """
    Exact symmetry phi*_n(s) = (-1)^n phi*_n(1+p-s), both sides evaluated with
    mellin_weighted. With c = p+1 the mirror point is c-s, so each check is
    Pfaff's identity 2F1(-n, s; c; 2) = (-1)^n 2F1(-n, c-s; c; 2). Also checks
    the agreement of the 2F1 and binomial-sum forms and the Laplace-pair
    identity at a in {1/2, 1, 3}.
    """
    p = Fraction(p)
    if p < 0:
        raise DomainError("mellin_symmetry_check needs rational p >= 0")
    checks = []
    for n in range(n_max + 1):
        for s in s_samples:
            s = Fraction(s)
            value = mellin_weighted(p, n, s)
            mirrored = (-1) ** n * mellin_weighted(p, n, 1 + p - s)
            checks.append(exact_check(f"eq3.12-symmetry-{n}-{s}", value, mirrored, "Prop 3.3 / Eq (3.12)"))
            checks.append(exact_check(f"eq3.12-sum-{n}-{s}", value, mellin_weighted_sum(p, n, s), "Eq (3.12)"))

    for n in range(min(n_max, 8) + 1):
        for a, residual in zip((0.5, 1.0, 3.0), laplace_pair_residual(float(p), n)):
            checks.append(tolerance_check(f"eq3.7-laplace-{n}-{a}", residual, 1e-6, "Eq (3.7)"))
    return make_report('mellin_symmetry_check', {'p': str(p), 'n_max': n_max,
                                                  's_samples': [str(Fraction(s)) for s in s_samples]}, checks)


# ---------------------------------------------------------------------------
# Pointwise identities
# ---------------------------------------------------------------------------

def change_of_variables_residual(p: float, n: int, t_samples: Iterable[float]) -> float:
    """
    Largest deviation among smallphi_n(t), 2^{-q+1/2} t^{p+1/2} phi_n(t^2/2)
    and 2^{q-1/2} t^{-p+1/2} psi_n(t^2/2) over the samples.
    """
    p = float(p)
    q = (p + 1.0) / 2.0
    t = np.asarray(list(t_samples), dtype=float)
    small = family_eval(ReciprocalFamily('smallphi', p, n), t)
    via_phi = 2.0 ** (-q + 0.5) * t ** (p + 0.5) * family_eval(ReciprocalFamily('phi', p, n), t * t / 2.0)
    via_psi = 2.0 ** (q - 0.5) * t ** (-p + 0.5) * family_eval(ReciprocalFamily('psi', p, n), t * t / 2.0)
    return float(max(np.max(np.abs(small - via_phi)), np.max(np.abs(small - via_psi))))


def expansion_through_pairs(p: float, n: int, t) -> dict:
    """
    phi_n and J phi_n rebuilt from the pairs h_m^+-:
    phi_n = (-1)^n c_n sum_m C(n+p, n-m) (-2)^m (h_m^+ + h_m^-)/2, with
    (h_m^+ - h_m^-)/2 in place of the sum for J phi_n.
    """
    p = float(p)
    x = np.asarray(t, dtype=float)
    c = phi_normalization(p, n)
    even = np.zeros_like(x)
    odd = np.zeros_like(x)
    for m in range(n + 1):
        weight = float(generalized_binomial(n + p, n - m)) * (-2.0) ** m
        h_plus = family_eval(ReciprocalFamily('h+', p, m), x)
        h_minus = family_eval(ReciprocalFamily('h-', p, m), x)
        even = even + weight * (h_plus + h_minus) / 2.0
        odd = odd + weight * (h_plus - h_minus) / 2.0
    sign = (-1) ** n
    direct = family_eval(ReciprocalFamily('phi', p, n), x)
    return {'phi': sign * c * even, 'J_phi': sign * c * odd, 'direct': direct,
            'residual': float(np.max(np.abs(sign * c * even - direct)))}


def ode_residual(p: float, n: int, t_samples: Iterable[float], step: float = 1e-4) -> dict:
    """
    Central-difference check of smallphi_n'' = ((p^2 - 1/4)/t^2 + t^2 - 4n - 2p - 2) smallphi_n
    and of the eigenvalue (H smallphi_n)/smallphi_n = 2n + p + 1.
    """
    if p < 1:
        raise DomainError("the ODE check is stated for p >= 1")
    fam = ReciprocalFamily('smallphi', p, n)
    checks = []
    readings = []
    for t in t_samples:
        t = float(t)
        if not 0.5 < t < 5.0:
            raise DomainError(f"ODE samples must lie in (0.5, 5), got {t}")
        value = family_eval(fam, t)
        second = (family_eval(fam, t + step) - 2.0 * value + family_eval(fam, t - step)) / step ** 2
        potential = (p * p - 0.25) / t ** 2 + t ** 2
        residual = abs(second - (potential - 4 * n - 2 * p - 2) * value)
        scale = max(1.0, abs(value), abs(second))
        checks.append(tolerance_check(f"eq3.15-ode-{n}-{t:g}", residual / scale, 1e-4, "Eq (3.15)"))
        if abs(value) > 1e-3:
            eigenvalue = 0.5 * (-second / value + potential)
            readings.append({'t': t, 'eigenvalue': eigenvalue})
            checks.append(tolerance_check(f"eq3.17-eigenvalue-{n}-{t:g}", abs(eigenvalue - (2 * n + p + 1)), 1e-4,
                                          "Eq (3.17)"))
    return make_report('ode_residual', {'p': p, 'n': n, 'step': step}, checks, data={'eigenvalues': readings},
                       method='finite-difference')


def sample_table(fam: ReciprocalFamily, t_values: Iterable[float]) -> pd.DataFrame:
    """Plot-ready (t, value, transformed) columns for one family member."""
    t = np.asarray(list(t_values), dtype=float)
    return pd.DataFrame({'t': t, 'value': family_eval(fam, t), 'transformed': hankel_apply(fam.transform, fam, t)})
