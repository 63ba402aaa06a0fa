"""
Command-line front end: every module as a reproducible, file-emitting command.

    farey         F_n or the Stern-Brocot level L_n
    partition     Knauf partition function Z_n(2q)
    growth        ratio estimator of lambda(q), q < 1
    operator      truncated operator matrix
    spectrum      eigenvalues of M, N or P+- with the identity checks
    hankel-check  self-reciprocity, biorthogonality and Mellin checks
    mk            M_k, its spectrum and the polynomial eigenfunctions
    bernoulli     the Bernoulli eigenfunction f_k
    verify-all    aggregated verification report

Exit codes: 0 success, 1 failed check, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import pandas as pd

from . import exact_farey, hankel, polynomial_eigen, transfer_operators
from .config import get_config, set_config
from .exceptions import ConfigurationError, DomainError, FareyToolkitError
from .laguerre_space import SpaceParams, parse_q
from .utils import status
from .utils.export import emit, render_json, render_table, resolve_output_path
from .utils.formatting import format_number, json_number
from .utils.reporting import error_report
from .verification import PROFILES, verify_all

FORMATS = ('csv', 'json', 'text')


@dataclass
class Artifact:
    """What a subcommand produces before it is rendered in the requested format."""

    reproduces: str
    params: dict
    payload: dict
    frame: Optional[pd.DataFrame] = None
    text: Optional[str] = None
    extra_header: List[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return bool(self.payload.get('success', True))

    def header_lines(self) -> List[str]:
        lines = [f"reproduces: {self.reproduces}"]
        lines.extend(f"{key}: {self.params[key]}" for key in sorted(self.params))
        return lines + self.extra_header

    def render(self, fmt: str) -> str:
        if fmt == 'json':
            return render_json({**self.payload, 'header': self.header_lines()})
        if fmt == 'csv':
            frame = self.frame if self.frame is not None else _checks_frame(self.payload)
            return render_table(frame, self.header_lines())
        if self.text is not None:
            return "\n".join(f"# {line}" for line in self.header_lines()) + "\n" + self.text + "\n"
        frame = self.frame if self.frame is not None else _checks_frame(self.payload)
        return render_table(frame, self.header_lines())


def _checks_frame(payload: dict) -> pd.DataFrame:
    rows = [{'id': c['id'], 'passed': str(c['passed']), 'residual': c['residual'], 'tolerance': c['tolerance'],
             'reference': c['reference']} for c in payload.get('checks', [])]
    return pd.DataFrame(rows, columns=['id', 'passed', 'residual', 'tolerance', 'reference'])


def _q_value(text: str):
    try:
        return parse_q(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e))


def _envelope(operation: str, params: dict, data: dict, checks: Optional[list] = None) -> dict:
    checks = checks or []
    return {'success': all(c['passed'] for c in checks), 'data': data, 'checks': checks,
            'metadata': {'operation': operation, 'params': params}}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_farey(args) -> Artifact:
    params = {'level': args.level, 'table': args.table}
    if args.table == 'stern-brocot':
        frame = exact_farey.level_table(args.level)
        reproduces = "Stern-Brocot level L_n with the linear forms of Eq (1.4)"
    else:
        level = exact_farey.farey_sequence(args.level)
        frame = pd.DataFrame({'index': range(len(level.fractions)),
                              'fraction': [format_number(x) for x in level.fractions]})
        reproduces = "Farey sequence F_n (Section 1)"
    payload = _envelope('farey', params, {'rows': frame.to_dict(orient='records')})
    return Artifact(reproduces, params, payload, frame, ", ".join(str(v) for v in frame['fraction']))


def cmd_partition(args) -> Artifact:
    params = {'n': args.n, 'q': str(args.q)}
    if args.table:
        frame = exact_farey.partition_table(args.n, args.q)
        payload = _envelope('partition', params, {'partition': frame['partition'].tolist()})
        return Artifact("Knauf partition function Z_n(2q), Remark 1.2", params, payload, frame)
    value = exact_farey.knauf_partition(args.n, args.q, exact=True if args.exact else None)
    payload = _envelope('partition', params, {'partition': json_number(value)})
    frame = pd.DataFrame({'n': [args.n], 'q': [str(args.q)], 'partition': [value]})
    return Artifact("Knauf partition function Z_n(2q), Remark 1.2", params, payload, frame, format_number(value))


def cmd_growth(args) -> Artifact:
    params = {'q': str(args.q), 'n_max': args.n_max}
    estimate = exact_farey.growth_rate_estimate(args.q, args.n_max)
    payload = _envelope('growth', params, {'ratio': estimate.ratio, 'ratios': list(estimate.ratios)})
    return Artifact("growth rate lambda(q) = lim Z_n/Z_{n-1}, Remark 1.2", params, payload, estimate.to_frame(),
                    format_number(estimate.ratio))


def cmd_operator(args) -> Artifact:
    space = SpaceParams(args.q, args.K)
    params = {**space.describe(), 'kind': args.kind, 'method': args.method or 'default'}
    matrix = transfer_operators.build_operator(space, args.kind, args.method)
    payload = _envelope('operator', params, {'kind': args.kind, 'basis': matrix.basis,
                                             'entries': matrix.entries.tolist()})
    return Artifact(f"truncated {args.kind} in the {matrix.basis} basis, Eqs (2.15)-(2.17)", params, payload,
                    matrix.to_frame())


def cmd_spectrum(args) -> Artifact:
    space = SpaceParams(args.q, args.K)
    report = transfer_operators.spectrum_report(space, args.kind, args.top)
    params = report['metadata']['params']
    frame = pd.DataFrame({'index': range(len(report['data']['eigenvalues'])),
                          'eigenvalue': report['data']['eigenvalues'],
                          'residual': report['data']['residuals']})
    return Artifact(f"spectrum of {args.kind}, Eq (2.30) / Theorem 1.1", params, report, frame)


def cmd_hankel(args) -> Artifact:
    params = {'family': args.family, 'p': args.p, 'n_max': args.n_max}
    report = hankel.reciprocity_residual(args.family, args.p, args.n_max)
    checks = list(report['checks'])
    if args.mellin and float(args.p).is_integer():
        checks.extend(hankel.mellin_symmetry_check(int(args.p), args.n_max)['checks'])
    payload = {**report, 'checks': checks, 'success': all(c['passed'] for c in checks)}
    return Artifact("Hankel self-reciprocity, Eqs (3.10)/(3.14) and (3.12)", params, payload)


def cmd_mk(args) -> Artifact:
    params = {'k': args.k}
    if args.period_search:
        frame = polynomial_eigen.period_search_table(args.k)
        payload = _envelope('mk-period-search', params, {'rows': frame.to_dict(orient='records')})
        return Artifact("lambda = 1 eigenspaces of M_k, Remark 4.6 (exploratory)", params, payload, frame)
    if args.matrix:
        matrix = polynomial_eigen.build_mk(args.k)
        payload = _envelope('mk-matrix', params, {'entries': [list(row) for row in matrix.entries]})
        return Artifact("matrix M_k, Lemma 4.1", params, payload, matrix.to_frame())

    pairs = polynomial_eigen.mk_spectrum(args.k)
    rows = []
    checks = []
    for index, pair in enumerate(pairs):
        row = {'index': index, 'lambda': pair.lam, 'class': pair.palindrome_class, 'residual': pair.residual}
        if abs(pair.lam) > 1e-8:
            function = polynomial_eigen.eigenpair_to_eigenfunction(args.k, pair)
            row['polynomial'] = function.render()
            checks.extend({**c, 'id': f"{c['id']}-{index}"} for c in function.report['checks'])
        rows.append(row)
    data = {'eigenvalues': [pair.lam for pair in pairs], 'pairs': rows,
            'eigenvectors': [list(pair.b) for pair in pairs]}
    if args.k >= 1:
        bounds = polynomial_eigen.leading_bounds(args.k)
        data['bounds'] = bounds.as_dict()
    payload = _envelope('mk', params, data, checks)
    frame = pd.DataFrame(rows)
    text = "\n".join(f"lambda = {format_number(row['lambda'])} ({row['class']}): {row.get('polynomial', '-')}"
                     for row in rows)
    return Artifact("spectrum of M_k and eigen-polynomials, Theorem 4.3 / Example 4.5", params, payload, frame, text)


def cmd_bernoulli(args) -> Artifact:
    params = {'k': args.k}
    laurent, report = polynomial_eigen.bernoulli_eigenfunction(args.k)
    frame = pd.DataFrame({'power': list(sorted(laurent.coefficients)),
                          'coefficient': [laurent.coefficients[n] for n in sorted(laurent.coefficients)]})
    text = laurent.render()
    if args.odd_part and args.k >= 1:
        odd = polynomial_eigen.period_function_odd_part(args.k)
        report['data']['odd_part'] = odd.render()
        text += f"\nodd part: {odd.render()}"
    return Artifact("Bernoulli eigenfunction f_k, Prop 4.7", params, report, frame, text)


def cmd_verify_all(args) -> Artifact:
    params = {'profile': args.profile}
    if args.corrupt_n00:
        params['corrupt_n00'] = args.corrupt_n00
    report = verify_all(args.profile, strict=False, corrupt_n00=args.corrupt_n00)
    return Artifact("all identity checks (verify_all)", params, report)


COMMANDS: Dict[str, Callable[[argparse.Namespace], Artifact]] = {
    'farey': cmd_farey,
    'partition': cmd_partition,
    'growth': cmd_growth,
    'operator': cmd_operator,
    'spectrum': cmd_spectrum,
    'hankel-check': cmd_hankel,
    'mk': cmd_mk,
    'bernoulli': cmd_bernoulli,
    'verify-all': cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default='text', help='output format (default: text)')
    common.add_argument('--output', default=None, help="output file; bare names go to FAREY_OUTPUT_DIR, '-' is stdout")
    common.add_argument('--quiet', action='store_true', help='suppress status lines on stderr')

    parser = argparse.ArgumentParser(prog='farey-spectra', description="Farey map transfer-operator toolkit")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('farey', parents=[common], help='Farey sequence F_n or Stern-Brocot level')
    p.add_argument('--level', type=int, required=True)
    p.add_argument('--table', choices=('farey', 'stern-brocot'), default='farey')

    p = sub.add_parser('partition', parents=[common], help='Knauf partition function')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--q', type=_q_value, required=True)
    p.add_argument('--exact', action='store_true', help='force the exact Rational path')
    p.add_argument('--table', action='store_true', help='Z_1..Z_n instead of Z_n')

    p = sub.add_parser('growth', parents=[common], help='growth-rate estimate of lambda(q)')
    p.add_argument('--q', type=_q_value, required=True)
    p.add_argument('--n-max', type=int, default=20)

    for name, kinds, text in (('operator', transfer_operators.KINDS, 'truncated operator matrix'),
                              ('spectrum', ('M', 'N', 'P+', 'P-'), 'spectrum with identity checks')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('--kind', choices=kinds, required=True)
        p.add_argument('--q', type=_q_value, required=True)
        p.add_argument('--K', type=int, default=None)
        if name == 'operator':
            p.add_argument('--method', choices=('exact', 'kernel'), default=None)
        else:
            p.add_argument('--top', type=int, default=5)

    p = sub.add_parser('hankel-check', parents=[common], help='Hankel self-reciprocity checks')
    p.add_argument('--family', choices=hankel.FAMILY_KINDS, default='phi')
    p.add_argument('--p', type=float, default=1.0)
    p.add_argument('--n-max', type=int, default=8)
    p.add_argument('--mellin', action='store_true', help='add the exact Mellin symmetry checks (integer p)')

    p = sub.add_parser('mk', parents=[common], help='M_k spectrum and polynomial eigenfunctions')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--matrix', action='store_true', help='emit M_k itself')
    p.add_argument('--period-search', action='store_true', help='lambda = 1 eigenspaces of M_1..M_k')

    p = sub.add_parser('bernoulli', parents=[common], help='Bernoulli eigenfunction f_k')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--odd-part', action='store_true')

    p = sub.add_parser('verify-all', parents=[common], help='run every identity check')
    p.add_argument('--profile', choices=PROFILES, default='quick')
    p.add_argument('--corrupt-n00', type=float, default=None, help='perturb N(0,0) by DELTA (sensitivity hook)')
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = get_config()
    except ConfigurationError as e:
        status.fail(str(e))
        return 2
    if args.quiet:
        set_config(config.with_overrides(quiet=True))

    try:
        artifact = COMMANDS[args.command](args)
    except (DomainError, ConfigurationError) as e:
        status.fail(f"{args.command}: {e}")
        return 2
    except FareyToolkitError as e:
        status.fail(f"{args.command}: {e}")
        artifact = Artifact(args.command, {}, error_report(args.command, {}, e))
    finally:
        if args.quiet:
            set_config(config)

    text = artifact.render(args.format)
    path = resolve_output_path(args.output, config.output_dir)
    emit(text, path)
    if path is None:
        sys.stdout.write(text)
    else:
        status.success(f"Wrote {path}")
    return 0 if artifact.success else 1


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()
