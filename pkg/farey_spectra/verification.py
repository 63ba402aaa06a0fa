"""
verify_all: every identity check of the toolkit in one JSON-ready report.

Profiles:
    quick  reduced level / K / n caps (well under a minute)
    full   the caps stated per module (K=80, n=25 growth, k<=20 M_k grids)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from . import exact_farey, hankel, laguerre_space, polynomial_eigen, transfer_operators
from .exceptions import ConfigurationError, FareyToolkitError, VerificationError
from .laguerre_space import SpaceParams
from .transfer_operators import GOLDEN
from .utils import status
from .utils.reporting import exact_check, make_check, make_report, relative_error, tolerance_check

PROFILES = ('quick', 'full')

F3 = tuple(Fraction(x) for x in ('0', '1/3', '1/2', '2/3', '1'))
F4 = tuple(Fraction(x) for x in ('0', '1/4', '1/3', '2/5', '1/2', '3/5', '2/3', '3/4', '1'))
M4 = ((2, 4, 6, 4, 1),
      (1, 2, 3, 3, 1),
      (1, 2, 2, 2, 1),
      (1, 3, 3, 2, 1),
      (1, 4, 6, 4, 2))

# direct vs tree agreement grid for transfer_iterate
ITERATE_TEST_FUNCTIONS = {
    "one": lambda y: 1.0,
    "x": lambda y: y,
    "x2": lambda y: y * y,
}
ITERATE_TEST_POINTS = (0.0, 0.3, 1.0, 2.7)


@dataclass(frozen=True)
class ProfileCaps:
    farey_level: int
    knauf_level: int
    q_values: tuple
    K: int
    involution_n: int
    q_kernel_n: int
    kernel_K: int
    hankel_p: tuple
    hankel_n: int
    mellin_n: int
    mk_k: int
    bernoulli_k: int
    growth_level: Optional[int]


CAPS = {
    'quick': ProfileCaps(8, 8, (Fraction(1),), 60, 12, 20, 12, (1,), 4, 8, 10, 6, None),
    'full': ProfileCaps(12, 10, (Fraction(1, 2), Fraction(1), Fraction(2)), 80, 30, 40, 40, (0, 1, 2), 8, 20, 20,
                        13, 25),
}


def _tagged(checks: List[dict], suffix) -> List[dict]:
    """Copies of the checks with '-<suffix>' appended to each id."""
    return [{**check, 'id': f"{check['id']}-{suffix}"} for check in checks]


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

def _farey_checks(caps: ProfileCaps, **_) -> List[dict]:
    checks = [
        exact_check("sec1-F3", exact_farey.farey_sequence(3).fractions, F3, "Section 1, F_3"),
        exact_check("sec1-F4", exact_farey.farey_sequence(4).fractions, F4, "Section 1, F_4"),
    ]
    for n in range(1, caps.farey_level + 1):
        checks.append(exact_check(f"eq1.1-orbit-{n}", exact_farey.farey_sequence(n).fractions,
                                  exact_farey.inverse_branch_orbit(n), "F_n = union of F^{-k}{0}"))
    return checks


def _knauf_checks(caps: ProfileCaps, **_) -> List[dict]:
    checks = [exact_check("rem1.2-partition-3-1", exact_farey.knauf_partition(3, 1), Fraction(53, 18),
                          "Remark 1.2")]
    for q in (Fraction(1, 2), Fraction(1), Fraction(2)):
        for n in range(1, caps.knauf_level + 1):
            iterate = exact_farey.transfer_iterate(lambda y: 1.0, 0.0, n, q, '+')
            partition = exact_farey.knauf_partition(n, q)
            checks.append(tolerance_check(f"rem1.2-knauf-{n}-{q}", relative_error(iterate, partition), 1e-12,
                                          "Remark 1.2"))

    for name, f in ITERATE_TEST_FUNCTIONS.items():
        for q in (0.5, 1.0, 2.0):
            for sign in ('+', '-'):
                for x in ITERATE_TEST_POINTS:
                    for n in range(1, 9):
                        residual = exact_farey.iterate_agreement(f, x, n, q, sign)
                        checks.append(tolerance_check(f"eq1.4-tree-{name}-{sign}-{n}-{x:g}-{q:g}", residual,
                                                      1e-12, "Eqs (1.3)/(1.4)"))

    exact_ratio = exact_farey.eigen_ratio_deviation(1.0)['deviation']
    checks.append(tolerance_check("rem2.8-ratio-q1", exact_ratio, 1e-12, "Remark 2.8"))
    for q in (0.5, 2.0):
        deviation = exact_farey.eigen_ratio_deviation(q)['deviation']
        checks.append(make_check(f"rem2.8-control-{q:g}", deviation > 1e-3, deviation, 1e-3, "Remark 2.8"))
    return checks


def _growth_checks(caps: ProfileCaps, **_) -> List[dict]:
    if caps.growth_level is None:
        return []
    estimate = exact_farey.growth_rate_estimate(0, min(caps.growth_level, 20))
    checks = [tolerance_check("rem1.2-growth-q0", relative_error(estimate.ratio, 2.0), 0.01, "Section 4 table",
                              detail={'ratio': estimate.ratio, 'lambda': 2.0})]
    for k in (1, 2, 3):
        estimate = exact_farey.growth_rate_estimate(Fraction(-k, 2), caps.growth_level)
        lam = polynomial_eigen.leading_pair(k).lam
        checks.append(tolerance_check(f"rem1.2-growth-k{k}", relative_error(estimate.ratio, lam), 0.01,
                                      "Remark 1.2 / Section 4 table", detail={'ratio': estimate.ratio, 'lambda': lam}))
    return checks


def _laguerre_checks(caps: ProfileCaps, **_) -> List[dict]:
    checks = []
    for q in caps.q_values:
        params = SpaceParams(q, caps.K)
        change = laguerre_space.basis_change(params, caps.involution_n)
        checks.append(make_check(f"lem2.4-involution-{q}", change.is_involution(1e-10), reference="Lemma 2.4"))
        mass, closed = laguerre_space.total_mass(params)
        checks.append(tolerance_check(f"eq2.8-mass-{q}", relative_error(mass, closed), 1e-10, "Eq (2.8)"))
        for kind, reference in (('ff', "Eq (2.9)"), ('ee', "Eq (2.11)"), ('fe', "Eq (2.12)")):
            worst = 0.0
            for n in range(7):
                for m in range(7):
                    exact = float(laguerre_space.inner_products(params, kind, n, m))
                    quad = laguerre_space.inner_products_quadrature(params, kind, n, m)
                    scale = math.sqrt(float(laguerre_space.norm_sq_e(params, n)) *
                                      float(laguerre_space.norm_sq_e(params, m)))
                    worst = max(worst, abs(exact - quad) / max(abs(exact), scale))
            checks.append(tolerance_check(f"eq2.9-{kind}-{q}", worst, 1e-10, reference))
        for family, reference in (('e', "Eq (2.13)"), ('f', "Eq (2.14)"), ('h+', "Eq (2.28)"),
                                  ('h-', "Eq (2.28)"), ('phi', "Eq (3.11)")):
            worst = 0.0
            for n in range(5):
                func = laguerre_space.family_function(params, family, n)
                for x in (0.5, 1.0, 1.5):
                    closed = laguerre_space.borel_closed_form(params, family, n, x)
                    numeric = laguerre_space.borel_numeric(func, x, params)
                    worst = max(worst, abs(closed - numeric) / max(abs(closed), 1.0))
            checks.append(tolerance_check(f"borel-{family}-{q}", worst, 1e-8, reference))
    return checks


def _operator_checks(caps: ProfileCaps, corrupt_n00: Optional[float] = None, **_) -> List[dict]:
    checks = []
    for q in caps.q_values:
        params = SpaceParams(q, caps.K)
        N = transfer_operators.assemble_N(params)
        if corrupt_n00:
            status.warn(f"Perturbing N(0,0) by {corrupt_n00}")
            N = N.perturbed(0, 0, corrupt_n00)
        result = transfer_operators.spectrum(N)
        by_magnitude = sorted(result.eigenvalues, key=lambda v: -abs(v))
        top = [transfer_operators.golden_eigenvalue(q, k) for k in range(5)]
        checks.append(tolerance_check(f"eq2.30-top-eig-{q}", abs(by_magnitude[0] - top[0]), 1e-8, "Eq (2.30)"))
        for k in range(1, 5):
            checks.append(tolerance_check(f"eq2.30-eig-{k}-{q}", abs(by_magnitude[k] - top[k]), 1e-8, "Eq (2.30)"))
        trace = N.trace()
        expected = GOLDEN ** float(params.p) / math.sqrt(5.0)
        checks.append(tolerance_check(f"cor2.16-trace-{q}", abs(trace - expected), 1e-6, "Cor 2.16",
                                      detail={'trace': trace, 'expected': expected}))

        checks.extend(_tagged(transfer_operators.n_eigensystem_check(params, 5)['checks'], q))
        checks.extend(_tagged(transfer_operators.q_kernel_checks(params, caps.q_kernel_n), q))
        for kind in ('Q+', 'Q-'):
            radius = transfer_operators.spectral_radius(transfer_operators.assemble_derived(params, kind))
            checks.append(tolerance_check(f"prop2.12-radius-{kind}-{q}", abs(radius - 2.0), 1e-8, "Prop 2.12"))
        for kind in ('M', 'P+', 'P-'):
            checks.extend(_tagged(transfer_operators.spectrum_report(params, kind)['checks'], q))

        small = params.with_K(caps.kernel_K)
        exact_N = transfer_operators.assemble_N(small, 'exact').entries
        kernel_N = transfer_operators.assemble_N(small, 'kernel').entries
        checks.append(tolerance_check(f"eq2.16-kernel-vs-exact-{q}", float(np.max(np.abs(exact_N - kernel_N))), 1e-8,
                                      "Eq (2.16)"))
        checks.extend(_tagged(transfer_operators.verify_structure(params.with_K(20), 6)['checks'], q))
    return checks


def _hankel_checks(caps: ProfileCaps, **_) -> List[dict]:
    checks = []
    for p in caps.hankel_p:
        for kind in ('phi', 'psi', 'smallphi'):
            checks.extend(_tagged(hankel.reciprocity_residual(kind, float(p), caps.hankel_n)['checks'], f'p{p}'))
        gram = hankel.biorthogonality_matrix(float(p), caps.hankel_n)
        checks.append(tolerance_check(f"sec3-biorthogonal-{p}", float(np.max(np.abs(gram - np.eye(gram.shape[0])))),
                                      1e-8, "Section 3, <phi_n, psi_m>"))
        checks.extend(_tagged(hankel.mellin_symmetry_check(p, caps.mellin_n)['checks'], f'p{p}'))
    return checks


def _polynomial_checks(caps: ProfileCaps, **_) -> List[dict]:
    checks = [exact_check("lem4.1-M4", polynomial_eigen.build_mk(4).entries, M4, "Lemma 4.1")]
    root = math.sqrt(113.0)
    expected = sorted([(11 + root) / 2, 1.0, (11 - root) / 2, -1.0, -1.0], reverse=True)
    values = [pair.lam for pair in polynomial_eigen.mk_spectrum(4)]
    checks.append(tolerance_check("ex4.5-spectrum", max(abs(a - b) for a, b in zip(values, expected)), 1e-12,
                                  "Example 4.5"))
    warmup = [2.0, 3.0, (5 + math.sqrt(17.0)) / 2, 7.0, (11 + root) / 2]
    table = polynomial_eigen.warmup_table()
    checks.append(tolerance_check("sec4-warmup", float(np.max(np.abs(table['lambda'].to_numpy() - warmup))), 1e-12,
                                  "Section 4 table"))
    beta17, beta113 = (math.sqrt(17.0) - 1) / 2, (root - 1) / 4
    polynomials = [(1,), (1, 1), (1, beta17, 1), (1, 2, 2, 1), (1, beta113, 3, beta113, 1)]
    for q, row, expected_row in zip(table['q'], table['coefficients'], polynomials):
        deviation = float(np.max(np.abs(np.asarray(row, dtype=float) - expected_row)))
        checks.append(tolerance_check(f"sec4-warmup-poly-{q}", deviation, 1e-12, "Section 4 table"))

    for k in range(1, caps.mk_k + 1):
        try:
            polynomial_eigen.leading_bounds(k)
            checks.append(make_check(f"cor4.4-bounds-{k}", True, reference="Cor 4.4"))
        except FareyToolkitError as e:
            checks.append(make_check(f"cor4.4-bounds-{k}", False, reference="Cor 4.4", detail={'error': str(e)}))
        misclassified = [pair.lam for pair in polynomial_eigen.mk_spectrum(k)
                         if abs(pair.lam) > 1e-8 and polynomial_eigen.classify(pair.b) != pair.palindrome_class]
        checks.append(make_check(f"lem4.1-classes-{k}", not misclassified, reference="Lemma 4.1(4)",
                                 detail={'misclassified': misclassified} if misclassified else None))
        if k <= 12:
            checks.append(make_check(f"lem4.1-fixed-{k}", polynomial_eigen.skew_fixed_vector_check(k),
                                     reference="Lemma 4.1(6)"))

    for index, pair in enumerate(polynomial_eigen.exact_eigenpairs(4)):
        checks.extend(_tagged(polynomial_eigen.eigenpair_to_eigenfunction(4, pair).report['checks'], f'pair{index}'))
    checks.extend(polynomial_eigen.pseudo_scalar_checks(4)['checks'])

    for k in range(caps.bernoulli_k + 1):
        checks.extend(polynomial_eigen.bernoulli_eigenfunction(k)[1]['checks'])
    f0 = polynomial_eigen.bernoulli_laurent(0)
    f2 = polynomial_eigen.bernoulli_laurent(2)
    checks.append(exact_check("prop4.7-f0", {n: c for n, c in f0.coefficients.items() if c},
                              {-1: Fraction(1, 12), 0: Fraction(-1, 4), 1: Fraction(1, 12)}, "Prop 4.7"))
    checks.append(exact_check("prop4.7-f2", {n: c for n, c in f2.coefficients.items() if c},
                              {-1: Fraction(-1, 360), 1: Fraction(5, 360), 3: Fraction(-1, 360)}, "Prop 4.7"))
    return checks


SECTIONS: Dict[str, Callable[..., List[dict]]] = {
    'exact_farey': _farey_checks,
    'partition': _knauf_checks,
    'growth': _growth_checks,
    'laguerre_space': _laguerre_checks,
    'transfer_operators': _operator_checks,
    'hankel': _hankel_checks,
    'polynomial_eigen': _polynomial_checks,
}


def verify_all(profile: str = 'quick', strict: bool = False, corrupt_n00: Optional[float] = None,
               sections: Optional[List[str]] = None) -> dict:
    """
    Run every section and aggregate the checks.

    A section that raises contributes one failed '<section>-error' check.
    With strict=True a failing run raises VerificationError instead of
    returning the report.
    """
    if profile not in PROFILES:
        raise ConfigurationError(f"profile must be one of {PROFILES}, got {profile!r}")
    caps = CAPS[profile]
    chosen = sections or list(SECTIONS)
    unknown = [name for name in chosen if name not in SECTIONS]
    if unknown:
        raise ConfigurationError(f"unknown verification section(s): {', '.join(unknown)}")
    checks = []
    summary = {}
    for name in chosen:
        status.info(f"Verifying {name} ({profile})")
        try:
            section_checks = SECTIONS[name](caps, corrupt_n00=corrupt_n00)
        except FareyToolkitError as e:
            status.fail(f"{name} raised: {e}")
            section_checks = [make_check(f"{name}-error", False, reference=name, detail={'error': str(e)})]
        passed = sum(1 for c in section_checks if c['passed'])
        summary[name] = {'passed': passed, 'total': len(section_checks)}
        if passed == len(section_checks):
            status.success(f"{name}: {passed}/{len(section_checks)} checks passed")
        else:
            status.fail(f"{name}: {len(section_checks) - passed} of {len(section_checks)} checks failed")
        checks.extend(section_checks)

    failed = [c['id'] for c in checks if not c['passed']]
    status.banner("VERIFICATION SUMMARY", [
        ("Profile", profile),
        ("Checks", len(checks)),
        ("Passed", len(checks) - len(failed)),
        ("Failed", len(failed)),
    ])
    if strict and failed:
        raise VerificationError(failed)
    params = {'profile': profile, 'sections': chosen}
    if corrupt_n00:
        params['corrupt_n00'] = corrupt_n00
    return make_report('verify_all', params, checks, data={'sections': summary, 'failed': failed})
