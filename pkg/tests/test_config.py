from __future__ import annotations

import json
from fractions import Fraction

import pandas as pd
import pytest

from farey_spectra.config import ToolkitConfig, get_config, load_config, set_config
from farey_spectra.exceptions import ConfigurationError, EnumerationLimitError, VerificationError
from farey_spectra.utils import status
from farey_spectra.utils.export import emit, render_json, render_table, resolve_output_path
from farey_spectra.utils.formatting import format_number, format_polynomial, format_rational, json_number
from farey_spectra.utils.reporting import error_report, exact_check, make_report, relative_error, tolerance_check


def test_defaults_without_environment(monkeypatch) -> None:
    for name in ('FAREY_OUTPUT_DIR', 'FAREY_DEFAULT_K', 'FAREY_MAX_LEVEL', 'FAREY_EXACT_LEVEL_CAP',
                 'FAREY_HANKEL_NODES', 'FAREY_WORKERS', 'FAREY_QUIET'):
        monkeypatch.delenv(name, raising=False)
    config = load_config(dotenv=False)
    assert config == ToolkitConfig()
    assert config.default_k == 80
    assert config.max_level == 26
    assert config.exact_level_cap == 16


def test_environment_overrides(monkeypatch) -> None:
    monkeypatch.setenv('FAREY_DEFAULT_K', '24')
    monkeypatch.setenv('FAREY_WORKERS', '2')
    monkeypatch.setenv('FAREY_QUIET', 'true')
    monkeypatch.setenv('FAREY_OUTPUT_DIR', '/tmp/farey-out')
    config = load_config(dotenv=False)
    assert config.default_k == 24
    assert config.workers == 2
    assert config.quiet is True
    assert config.output_dir == '/tmp/farey-out'


@pytest.mark.parametrize("name,value", [('FAREY_DEFAULT_K', 'eighty'), ('FAREY_WORKERS', '0'),
                                        ('FAREY_HANKEL_NODES', '4')])
def test_malformed_environment_names_the_variable(monkeypatch, name, value) -> None:
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigurationError, match=name):
        load_config(dotenv=False)


def test_set_config_round_trip() -> None:
    custom = ToolkitConfig(default_k=12, quiet=True)
    set_config(custom)
    assert get_config() is custom
    assert custom.with_overrides(workers=None, max_level=5).max_level == 5
    assert custom.with_overrides(workers=None).workers == custom.workers


def test_exception_messages() -> None:
    error = EnumerationLimitError(30, 26)
    assert error.level == 30 and error.cap == 26
    assert 'FAREY_MAX_LEVEL' in str(error)
    failed = VerificationError(['a', 'b'])
    assert failed.failed_ids == ['a', 'b']
    assert '2 check(s) failed' in str(failed)


def test_status_lines_go_to_stderr(capsys) -> None:
    set_config(ToolkitConfig(quiet=False))
    status.success("M_4 spectrum verified")
    status.banner("SUMMARY", [("Checks", 3)])
    captured = capsys.readouterr()
    assert captured.out == ''
    assert "✅ M_4 spectrum verified" in captured.err
    assert "=" * 60 in captured.err
    assert "Checks: 3" in captured.err


def test_quiet_suppresses_status(capsys) -> None:
    status.info("hidden")
    status.fail("hidden")
    assert capsys.readouterr().err == ''


def test_number_formatting() -> None:
    assert format_rational(Fraction(53, 18)) == '53/18'
    assert format_rational(Fraction(4, 2)) == '2'
    assert format_number(Fraction(-1, 3)) == '-1/3'
    assert format_number(0.1 + 0.2) == '0.3'
    assert format_number(7) == '7'
    assert json_number(Fraction(1, 2)) == {'value': 0.5, 'exact': '1/2'}
    assert json_number(0.25) == {'value': 0.25}


def test_polynomial_formatting() -> None:
    assert format_polynomial({3: 1, 2: 2, 1: 2, 0: 1}) == 'x^3 + 2*x^2 + 2*x + 1'
    assert format_polynomial({4: 1, 0: -1}) == 'x^4 - 1'
    assert format_polynomial({1: Fraction(1, 12), 0: Fraction(-1, 4), -1: Fraction(1, 12)}) == \
        '1/12*x - 1/4 + 1/12*x^-1'
    assert format_polynomial({}) == '0'


def test_render_table_header_and_exact_cells() -> None:
    frame = pd.DataFrame({'n': [3], 'partition': [Fraction(53, 18)]})
    text = render_table(frame, ['reproduces: Remark 1.2', 'q: 1'])
    assert text.splitlines() == ['# reproduces: Remark 1.2', '# q: 1', 'n,partition', '3,53/18']


def test_render_json_is_deterministic() -> None:
    payload = {'b': 1, 'a': [Fraction(1, 3)], 'label': 'λ'}
    text = render_json(payload)
    assert text == render_json(dict(reversed(list(payload.items()))))
    assert json.loads(text)['a'] == ['1/3']
    assert 'λ' in text


def test_output_paths(tmp_path) -> None:
    assert resolve_output_path(None, str(tmp_path)) is None
    assert resolve_output_path('-', str(tmp_path)) is None
    assert resolve_output_path('table.csv', str(tmp_path)) == str(tmp_path / 'table.csv')
    assert resolve_output_path('sub/table.csv', str(tmp_path)) == 'sub/table.csv'
    target = tmp_path / 'nested' / 'out.txt'
    emit("hello\n", str(target))
    assert target.read_text() == "hello\n"


def test_report_envelope() -> None:
    checks = [exact_check('exact', Fraction(1, 2), Fraction(2, 4)), tolerance_check('close', 1e-12, 1e-10),
              tolerance_check('nan', float('nan'), 1.0)]
    report = make_report('demo', {'q': '1'}, checks)
    assert report['success'] is False
    assert [c['passed'] for c in report['checks']] == [True, True, False]
    assert report['checks'][2]['residual'] is None
    assert report['metadata'] == {'operation': 'demo', 'params': {'q': '1'}, 'method': 'exact+numeric'}
    failed = error_report('demo', {}, ValueError('boom'))
    assert failed['success'] is False and failed['error'] == 'boom' and failed['data'] == {}
    assert relative_error(1.01, 1.0) == pytest.approx(0.01)
