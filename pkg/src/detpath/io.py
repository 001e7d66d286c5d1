"""Plain-text matrix files and JSON reports.

Matrix files hold the size ``n`` on the first line followed by ``n`` rows of
``n`` whitespace-separated decimals. Inline matrices use ``;`` between rows
and commas or spaces between entries, e.g. ``"1,0;0,1"``.
"""

import json
import os

import numpy as np

from ._validation import check_square


def parse_matrix_text(text, n=None):
    """Parse the matrix file format from a string."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    try:
        size = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the matrix size, got {lines[0]!r}") from None
    if n is not None and size != n:
        raise ValueError(f"matrix file declares n={size}, expected n={n}")
    rows = [ln.split() for ln in lines[1:]]
    if len(rows) != size or any(len(r) != size for r in rows):
        raise ValueError(f"expected {size} rows of {size} entries")
    return check_square(np.array([[float(x) for x in r] for r in rows]))


def parse_inline(text, n=None):
    rows = [r.replace(",", " ").split() for r in text.split(";") if r.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError(f"inline matrix {text!r} is not square")
    A = check_square(np.array([[float(x) for x in r] for r in rows]))
    if n is not None and A.shape[0] != n:
        raise ValueError(f"inline matrix has n={A.shape[0]}, expected n={n}")
    return A


def read_matrix(source, n=None):
    """Load a matrix from a file path, or parse ``source`` inline if no such file exists."""
    if os.path.isfile(source):
        with open(source) as fh:
            return parse_matrix_text(fh.read(), n)
    if ";" in source or "," in source or n == 1:
        return parse_inline(source, n)
    raise ValueError(f"no matrix file {source!r} (inline matrices use ';' between rows)")


def format_matrix(A):
    A = check_square(A)
    rows = [" ".join(repr(float(x)) for x in row) for row in A]
    return "\n".join([str(A.shape[0])] + rows) + "\n"


def write_matrix(A, path):
    with open(path, "w") as fh:
        fh.write(format_matrix(A))


def dumps(obj):
    """Deterministic JSON text: fixed key order from the caller, no NaN."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(obj, path):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def _finite(x):
    # JSON has no NaN; an unset eps is written as null
    return None if isinstance(x, float) and not np.isfinite(x) else x


def certificate_record(cert):
    rec = cert.to_dict()
    return {k: _finite(v) for k, v in rec.items()}
