"""Shared plumbing: error types, quadrature nodes, grids, deterministic JSON.

Everything here is deliberately boring.  The numerical content of the package
lives in the geometry/normal-form/transform modules; this module only holds
the pieces they all need and that should behave identically everywhere
(panel layouts, node caching, report serialization).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

# ---------------------------------------------------------------------------
# errors


class ParahornError(Exception):
    """Base class for every error raised deliberately by this package."""


class ValidationError(ParahornError, ValueError):
    """Malformed input: bad files, out-of-range parameters, misuse of an API."""


class ConvergenceError(ParahornError, RuntimeError):
    """An iterative procedure stopped before reaching its tolerance."""


class DivergenceError(ConvergenceError):
    """The iteration's contraction estimate stayed >= 1; the domain is likely
    too large for the given data."""


class DomainTooLargeError(ConvergenceError):
    """A transform argument left the disc on which the input series is valid."""


class InversionError(ConvergenceError):
    """Newton inversion failed to converge.  ``last`` holds the final iterate."""

    def __init__(self, message: str, last: complex | None = None):
        super().__init__(message)
        self.last = last


class EscapeError(ConvergenceError):
    """An orbit left its petal.  ``steps`` holds the completed step count."""

    def __init__(self, message: str, steps: int = 0):
        super().__init__(message)
        self.steps = steps


class TooCloseToLineError(ValidationError):
    """Evaluation point is too close to an integration line for the direct
    quadrature; use the deformed-path evaluator instead."""


class SingularPointError(ValidationError):
    """Evaluation point is inside the exclusion zone around a line's start
    point on the domain boundary, where the petal corrections have a
    logarithmic singularity and no quadrature route is reliable."""


class BoundaryIndeterminateError(ConvergenceError):
    """Membership Newton solve did not settle; the point is numerically on
    the domain boundary."""


# ---------------------------------------------------------------------------
# quadrature helpers


@lru_cache(maxsize=128)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(int(n))
    return x, w


def segment_nodes(p0: complex, p1: complex, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and complex weights on the straight segment
    from ``p0`` to ``p1``.

    The weights include the complex path element, so ``sum(cw * f(w))``
    approximates the contour integral of ``f`` along the segment.
    """
    x, w = _leggauss(n)
    mid = 0.5 * (p0 + p1)
    half = 0.5 * (p1 - p0)
    return mid + half * x, (half * w).astype(complex)


def graded_edges(length: float) -> np.ndarray:
    """Panel edges on [0, length], graded toward 0.

    Panel widths run 1/8 (x4), 1/4 (x2), 1/2 (x2) and then 1 until the
    requested length is covered; the last panel is clipped.  The grading
    resolves the fast variation of the integrands near the line start
    without wasting nodes on the flat tail.
    """
    if length <= 0:
        raise ValidationError(f"panel layout needs positive length, got {length}")
    widths = [0.125] * 4 + [0.25] * 2 + [0.5] * 2
    edges = [0.0]
    for w in widths:
        if edges[-1] + w >= length - 1e-12:
            break
        edges.append(edges[-1] + w)
    while edges[-1] + 1.0 < length - 1e-12:
        edges.append(edges[-1] + 1.0)
    edges.append(float(length))
    return np.asarray(edges)


def panel_node_count(width: float, n_per_unit: int, floor: int = 12, cap: int = 80) -> int:
    return int(min(cap, max(floor, math.ceil(n_per_unit * width))))


def cheb_grid(a: float, b: float, n: int) -> np.ndarray:
    """Chebyshev points of the first kind on [a, b], ascending."""
    k = np.arange(n)
    x = np.cos(np.pi * (2 * k + 1) / (2 * n))
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * x)


# ---------------------------------------------------------------------------
# deterministic JSON / CSV

_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\b": "\\b",
    "\f": "\\f",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def _json_str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def json_dumps_det(obj, indent: int = 0) -> str:
    """Serialize to JSON with sorted keys and floats at 17 significant digits.

    The stdlib serializer does not let us control the float format, and the
    run reports are required to be byte-identical across repeated runs, so
    this walks the structure itself.  NaN/inf are rejected: reports must be
    finite by construction.
    """
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValidationError("non-finite float in a report")
        return format(x, ".17g")
    if isinstance(obj, str):
        return _json_str(obj)
    if isinstance(obj, complex):
        raise ValidationError("complex values must be split into re/im before export")
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise ValidationError(f"report keys must be strings, got {key!r}")
            items.append(f"{pad}  {_json_str(key)}: {json_dumps_det(obj[key], indent + 2)}")
        if not items:
            return "{}"
        inner = ",\n".join(items)
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        items = [f"{pad}  {json_dumps_det(v, indent + 2)}" for v in seq]
        if not items:
            return "[]"
        inner = ",\n".join(items)
        return "[\n" + inner + "\n" + pad + "]"
    raise ValidationError(f"cannot serialize {type(obj).__name__} deterministically")


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json_dumps_det(obj))
        fh.write("\n")


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])


# ---------------------------------------------------------------------------
# misc


def parallel_map(fn, items, threads: int | None = None) -> list:
    """Ordered map over ``items``, threaded when it plausibly helps."""
    items = list(items)
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def as_complex_array(p) -> tuple[np.ndarray, bool]:
    """Coerce scalars / array-likes / LogPoint-likes to a complex ndarray.

    Returns the array and a flag telling whether the input was scalar, so
    evaluators can hand back a bare complex for scalar input.
    """
    if hasattr(p, "zeta"):
        p = p.zeta
    arr = np.asarray(p, dtype=complex)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr), scalar
