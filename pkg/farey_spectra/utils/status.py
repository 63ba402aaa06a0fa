import sys

from ..config import get_config

_WIDTH = 60


def _emit(prefix, message):
    """Write one status line to stderr unless FAREY_QUIET is set."""
    if get_config().quiet:
        return
    print(f"{prefix} {message}", file=sys.stderr)


def info(message):
    """Progress line."""
    _emit("🔄", message)


def success(message):
    """Completed step."""
    _emit("✅", message)


def warn(message):
    """Recoverable problem."""
    _emit("⚠️", message)


def fail(message):
    """Failed step."""
    _emit("❌", message)


def banner(title, rows):
    """Statistics block framed by '=' rules, one 'key: value' line per row."""
    if get_config().quiet:
        return
    print("=" * _WIDTH, file=sys.stderr)
    print(f"📊 {title}", file=sys.stderr)
    print("=" * _WIDTH, file=sys.stderr)
    for key, value in rows:
        print(f"{key}: {value}", file=sys.stderr)
    print("=" * _WIDTH, file=sys.stderr)
