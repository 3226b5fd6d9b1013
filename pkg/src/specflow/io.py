"""Matrix literals, float formatting and the spectrum CSV.

Matrix literal: ``{"dim": n, "entries": [[re, im], ...]}`` in row-major
order.  Floats are written with 17 significant digits so every double
round-trips exactly.
"""

import csv
import io
import json
import math

import numpy as np

from .errors import DescriptorError
from .hermitian import HermitianOperator


def format_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent=2):
    """JSON text with 17-significant-digit floats and sorted keys."""
    return _encode(obj, indent, 0)


def _encode(obj, indent, level):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{" + pad + (sep + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(_encode(v, 0, 0) for v in seq) + "]"
        items = [_encode(v, indent, level + 1) for v in seq]
        return "[" + pad + (sep + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_to_json(m):
    m = m.matrix if hasattr(m, "matrix") else np.asarray(m)
    m = np.asarray(m, dtype=complex)
    return {"dim": int(m.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def matrix_from_json(obj):
    """Parse a matrix literal into a complex ndarray."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise DescriptorError(f"invalid matrix JSON: {exc}") from None
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise DescriptorError('matrix literal must be {"dim": n, "entries": [[re, im], ...]}')
    n = obj["dim"]
    entries = obj["entries"]
    if not isinstance(n, int) or n < 1:
        raise DescriptorError(f"invalid dim {n!r}")
    if len(entries) != n * n:
        raise DescriptorError(f"expected {n * n} entries for dim {n}, got {len(entries)}")
    try:
        vals = [complex(float(re), float(im)) for re, im in entries]
    except (TypeError, ValueError):
        raise DescriptorError("entries must be [re, im] pairs of numbers") from None
    m = np.array(vals, dtype=complex).reshape(n, n)
    if not np.all(np.isfinite(m)):
        raise DescriptorError("matrix entries must be finite")
    return m


def hermitian_from_json(obj):
    return HermitianOperator(matrix_from_json(obj))


def spectrum_csv(ts, eigenvalues):
    """CSV text with header ``t,mu_1,...,mu_n``; one ascending row per sample."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    n = eigenvalues.shape[1] if eigenvalues.ndim == 2 else 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"mu_{j + 1}" for j in range(n)])
    for t, row in zip(ts, eigenvalues):
        writer.writerow([format_float(t)] + [format_float(x) for x in row])
    return buf.getvalue()


def read_spectrum_csv(text):
    """Inverse of :func:`spectrum_csv`: returns (ts, eigenvalue rows)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not rows[0] or rows[0][0].strip() != "t":
        raise DescriptorError("spectrum CSV must start with a 't,mu_1,...' header")
    data = [[float(x) for x in row] for row in rows[1:] if row]
    if not data:
        raise DescriptorError("spectrum CSV has no rows")
    arr = np.array(data)
    return arr[:, 0], arr[:, 1:]


def spectrum_csv_to_descriptor(text):
    """Sampled path descriptor of diagonal operators built from a spectrum CSV."""
    ts, mus = read_spectrum_csv(text)
    return {
        "interpolation": "linear",
        "samples": [
            {"t": float(t), "matrix": matrix_to_json(np.diag(row))} for t, row in zip(ts, mus)
        ],
    }
