import io
import json
import os
from typing import Iterable, Optional

import pandas as pd

from .formatting import format_number


def render_table(df: pd.DataFrame, header_lines: Iterable[str] = ()):
    """CSV text with '# ' header comments; numbers rendered exactly or to 15 digits."""
    rendered = df.copy()
    for column in rendered.columns:
        rendered[column] = [format_number(v) if not isinstance(v, str) else v for v in rendered[column]]

    buffer = io.StringIO()
    for line in header_lines:
        buffer.write(f"# {line}\n")
    rendered.to_csv(buffer, index=False, lineterminator='\n')
    return buffer.getvalue()


def render_json(payload):
    """Deterministic JSON text (sorted keys, two-space indent, UTF-8 characters kept)."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, default=_json_default) + "\n"


def _json_default(value):
    # numpy scalars and Fractions that slipped through unconverted
    if hasattr(value, 'item'):
        return value.item()
    return format_number(value)


def resolve_output_path(path: Optional[str], output_dir: Optional[str]):
    """Bare file names land in FAREY_OUTPUT_DIR when it is configured."""
    if path is None or path == '-':
        return None
    if output_dir and os.path.dirname(path) == '':
        return os.path.join(output_dir, path)
    return path


def emit(text: str, path: Optional[str] = None):
    """Write an artifact to a file (creating parent dirs) or return it for stdout."""
    if path is None:
        return text
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(text)
    return text
