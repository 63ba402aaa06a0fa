import math


def make_check(check_id, passed, residual=None, tolerance=None, reference='', detail=None):
    """One verification record as it appears in JSON reports."""
    record = {
        'id': check_id,
        'passed': bool(passed),
        'residual': _finite_or_none(residual),
        'tolerance': tolerance,
        'reference': reference,
    }
    if detail is not None:
        record['detail'] = detail
    return record


def tolerance_check(check_id, residual, tolerance, reference='', detail=None):
    """Pass when residual <= tolerance (NaN always fails)."""
    residual = float(residual)
    return make_check(check_id, math.isfinite(residual) and residual <= tolerance,
                      residual, tolerance, reference, detail)


def exact_check(check_id, left, right, reference='', detail=None):
    """Pass on exact equality; the residual records |left - right| as a float."""
    try:
        residual = abs(float(left - right))
    except (TypeError, ValueError, OverflowError):
        residual = None
    return make_check(check_id, left == right, residual, 0, reference, detail)


def make_report(operation, params, checks, data=None, method='exact+numeric'):
    """Result envelope: success flag, payload, check list and metadata."""
    return {
        'success': all(c['passed'] for c in checks),
        'data': data or {},
        'checks': list(checks),
        'metadata': {
            'operation': operation,
            'params': params,
            'method': method,
        },
    }


def error_report(operation, params, error):
    """Envelope for an operation that raised instead of completing."""
    return {
        'success': False,
        'error': str(error),
        'data': {},
        'checks': [],
        'metadata': {'operation': operation, 'params': params, 'method': 'failed'},
    }


def relative_error(value, reference):
    """|value - reference| / max(|reference|, tiny)."""
    scale = max(abs(float(reference)), 1e-300)
    return abs(float(value) - float(reference)) / scale


def _finite_or_none(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None
