"""Log-chart geometry: domains, petal strips, and integration half-lines.

Everything downstream works in the chart ``zeta = -log z`` near a parabolic
point, where the dynamics is a perturbation of the unit translation.  This
module fixes the shared geometric conventions:

* ``z = exp(-zeta)``, ``ell = 1/zeta``; large ``Re zeta`` means small ``|z|``.
* Attracting strips ``V_plus^j`` are centered at ``Im zeta = 2*pi*j`` with
  half-width ``pi``; repelling strips ``V_minus^j`` at ``(2j-1)*pi``.
* Their intersections are the half-width ``pi/2`` strips where the gluing
  data lives: the "zero" strip of index j (center ``(4j-3)*pi/2``) is
  ``V_plus^{j-1} & V_minus^j``, the "infty" strip (center ``(4j-1)*pi/2``)
  is ``V_minus^j & V_plus^j``.
* Integration half-lines run rightward from the domain boundary along the
  central height of a zero/infty strip.

Two domain shapes are supported: the sector-like ``linear`` domain
``{a*Re - b > |Im|}`` and the ``quadratic`` domain, the image of the right
half-plane minus a disc of radius R under ``phi(xi) = xi + C*sqrt(xi+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .util import (
    BoundaryIndeterminateError,
    ValidationError,
    as_complex_array,
)

PETAL_KINDS = ("plus", "minus", "zero", "infty")


@dataclass(frozen=True)
class LogPoint:
    """A point in the log chart."""

    zeta: complex

    def __complex__(self) -> complex:
        return complex(self.zeta)


def to_z(p) -> complex:
    """Chart map back to the original coordinate, ``z = exp(-zeta)``."""
    arr, scalar = as_complex_array(p)
    out = np.exp(-arr)
    return complex(out[0]) if scalar else out


def from_z(z) -> LogPoint:
    """Inverse chart map on the principal branch, ``zeta = -Log z``.

    Round trip ``to_z(from_z(z)) == z`` holds for every ``z != 0``; the other
    direction holds on the principal strip ``Im zeta in (-pi, pi]``.
    """
    zc = complex(z)
    if zc == 0:
        raise ValidationError("z = 0 has no log-chart image")
    return LogPoint(-np.log(zc))


def ell(p) -> complex:
    """The auxiliary small parameter ``ell = 1/zeta``."""
    arr, scalar = as_complex_array(p)
    if np.any(arr == 0):
        raise ValidationError("ell is undefined at zeta = 0")
    out = 1.0 / arr
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# petals


@dataclass(frozen=True)
class PetalId:
    """Which strip: ``kind`` in {plus, minus, zero, infty}, index ``j``."""

    j: int
    kind: str

    def __post_init__(self):
        if self.kind not in PETAL_KINDS:
            raise ValidationError(f"unknown petal kind {self.kind!r}")

    @property
    def center(self) -> float:
        """Imaginary part of the strip's center line."""
        if self.kind == "plus":
            return 2.0 * math.pi * self.j
        if self.kind == "minus":
            return (2.0 * self.j - 1.0) * math.pi
        if self.kind == "zero":
            return (4.0 * self.j - 3.0) * math.pi / 2.0
        return (4.0 * self.j - 1.0) * math.pi / 2.0

    @property
    def halfwidth(self) -> float:
        return math.pi if self.kind in ("plus", "minus") else math.pi / 2.0

    def strip_contains(self, p, margin: float = 0.0) -> bool:
        arr, _ = as_complex_array(p)
        y = arr.imag - self.center
        return bool(np.all(np.abs(y) < self.halfwidth - margin))


def line_height(kind: str, j: int) -> float:
    """Central height of the zero/infty strip of index j."""
    if kind == "zero":
        return (4.0 * j - 3.0) * math.pi / 2.0
    if kind == "infty":
        return (4.0 * j - 1.0) * math.pi / 2.0
    raise ValidationError(f"lines exist only for zero/infty strips, not {kind!r}")


@dataclass(frozen=True)
class HalfLine:
    """A rightward integration half-line at a fixed height.

    ``endpoint`` is the left end (on the domain boundary); the line extends
    to ``Re zeta = +inf`` inside the domain.
    """

    height: float
    x_start: float
    endpoint: LogPoint
    kind: str = ""
    j: int = 0

    def point(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) + 1j * self.height

    def distance(self, p) -> np.ndarray:
        """Euclidean distance from p to the half-line (ray, not full line)."""
        arr, scalar = as_complex_array(p)
        dx = np.maximum(self.x_start - arr.real, 0.0)
        dy = arr.imag - self.height
        out = np.hypot(dx, dy)
        return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class DomainSpec:
    """A log-chart domain, either ``linear`` (sector) or ``quadratic``.

    linear:    a * Re(zeta) - b > |Im(zeta)| with slope a > 0, offset b >= 0.
    quadratic: image of {Re xi > 0, |xi| > R} under phi(xi) = xi + C*sqrt(xi+1).

    ``re_floor`` cuts the domain to ``Re zeta > re_floor``; the realization
    pipeline raises it when the input data demands a smaller domain.
    """

    kind: str
    C: float = 0.0
    R: float = 0.0
    a: float = 0.0
    b: float = 0.0
    re_floor: float = 0.0

    def __post_init__(self):
        if self.kind == "quadratic":
            if not (self.C > 0 and self.R >= 0):
                raise ValidationError(
                    f"quadratic domain needs C > 0 and R >= 0, got C={self.C}, R={self.R}"
                )
        elif self.kind == "linear":
            if not (self.a > 0 and self.b >= 0):
                raise ValidationError(
                    f"linear domain needs a > 0 and b >= 0, got a={self.a}, b={self.b}"
                )
        else:
            raise ValidationError(f"unknown domain kind {self.kind!r}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def linear(a: float, b: float, re_floor: float = 0.0) -> "DomainSpec":
        return DomainSpec(kind="linear", a=float(a), b=float(b), re_floor=float(re_floor))

    @staticmethod
    def quadratic(C: float, R: float, re_floor: float = 0.0) -> "DomainSpec":
        return DomainSpec(kind="quadratic", C=float(C), R=float(R), re_floor=float(re_floor))

    def with_floor(self, re_floor: float) -> "DomainSpec":
        return replace(self, re_floor=float(re_floor))

    # -- quadratic helpers ---------------------------------------------------

    def _phi(self, xi: complex) -> complex:
        return xi + self.C * np.sqrt(xi + 1.0)

    def _phi_inverse(self, zeta: complex) -> complex:
        """Newton inversion of phi, seeded by zeta - C*sqrt(zeta)."""
        xi = zeta - self.C * np.sqrt(zeta) if abs(zeta) > 1e-12 else complex(0.0)
        tol = 1e-12 * max(1.0, abs(zeta))
        for _ in range(50):
            root = np.sqrt(xi + 1.0)
            val = xi + self.C * root - zeta
            if abs(val) < tol:
                return xi
            deriv = 1.0 + self.C / (2.0 * root) if root != 0 else 1.0
            xi = xi - val / deriv
        raise BoundaryIndeterminateError(
            f"phi-inversion did not settle at zeta={zeta}; last xi={xi}"
        )

    # -- membership ----------------------------------------------------------

    def contains(self, p) -> bool:
        """Strict interior membership test."""
        arr, _ = as_complex_array(p)
        if np.any(arr.real <= self.re_floor):
            return False
        if self.kind == "linear":
            return bool(np.all(self.a * arr.real - self.b > np.abs(arr.imag)))
        for zeta in arr:
            xi = self._phi_inverse(complex(zeta))
            if not (xi.real > 0 and abs(xi) > self.R):
                return False
        return True

    # -- boundary ------------------------------------------------------------

    def boundary_x(self, height: float) -> float:
        """Smallest Re zeta on the horizontal line Im = height inside the
        domain (left crossing of the boundary), honoring re_floor."""
        h = float(height)
        if self.kind == "linear":
            x = (abs(h) + self.b) / self.a
            return max(x, self.re_floor)
        # quadratic: walk the two boundary pieces.  The boundary of
        # {Re xi > 0, |xi| > R} is the imaginary axis |u| >= R plus the
        # right half-circle |xi| = R; both map to monotone-height curves.
        sgn = 1.0 if h >= 0 else -1.0
        ah = abs(h)

        def im_axis(u: float) -> float:
            return (self._phi(1j * sgn * u)).imag * sgn

        junction = im_axis(self.R)
        if ah >= junction:
            lo, hi = self.R, max(self.R + 1.0, 2.0 * ah + self.R + 2.0)
            while im_axis(hi) < ah:
                hi *= 2.0
                if hi > 1e12:
                    raise BoundaryIndeterminateError(
                        f"no boundary crossing found at height {h}"
                    )
            u = brentq(lambda t: im_axis(t) - ah, lo, hi, xtol=1e-13)
            x = (self._phi(1j * sgn * u)).real
        else:

            def circ(theta: float) -> float:
                return (self._phi(self.R * np.exp(1j * theta))).imag

            if self.R == 0.0:
                x = self._phi(0.0).real
            else:
                th = brentq(lambda t: circ(t) - h, -math.pi / 2, math.pi / 2, xtol=1e-13)
                x = (self._phi(self.R * np.exp(1j * th))).real
        return max(x, self.re_floor)

    def boundary_path(self, h0: float, h1: float, n: int = 160) -> np.ndarray:
        """Points tracing the left boundary from height h0 to height h1."""
        hs = np.linspace(h0, h1, n)
        return np.array([self.boundary_x(h) + 1j * h for h in hs])

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == "linear":
            out = {"kind": "linear", "a": self.a, "b": self.b}
        else:
            out = {"kind": "quadratic", "C": self.C, "R": self.R}
        if self.re_floor != 0.0:
            out["re_floor"] = self.re_floor
        return out

    @staticmethod
    def from_dict(d: dict) -> "DomainSpec":
        kind = d.get("kind")
        floor = float(d.get("re_floor", 0.0))
        if kind == "linear":
            return DomainSpec.linear(d["a"], d["b"], floor)
        if kind == "quadratic":
            return DomainSpec.quadratic(d["C"], d["R"], floor)
        raise ValidationError(f"unknown domain kind in file: {kind!r}")


def parse_domain(text: str) -> DomainSpec:
    """Parse the CLI syntax ``linear:a,b`` / ``quadratic:C,R``."""
    try:
        kind, params = text.split(":", 1)
        p1, p2 = (float(v) for v in params.split(","))
    except ValueError as exc:
        raise ValidationError(f"cannot parse domain {text!r}, expected kind:p1,p2") from exc
    if kind == "linear":
        return DomainSpec.linear(p1, p2)
    if kind == "quadratic":
        return DomainSpec.quadratic(p1, p2)
    raise ValidationError(f"unknown domain kind {kind!r}")


# ---------------------------------------------------------------------------
# petal/domain queries


def petal_contains(domain: DomainSpec, petal: PetalId, p, margin: float = 0.0) -> bool:
    """Whether p lies in the petal: inside the strip (shrunk by margin) and
    inside the domain."""
    return petal.strip_contains(p, margin) and domain.contains(p)


def central_line(domain: DomainSpec, petal: PetalId) -> HalfLine:
    """The integration half-line along the central height of a zero/infty
    strip, starting on the domain boundary."""
    h = line_height(petal.kind, petal.j)
    x0 = domain.boundary_x(h)
    probe = (x0 + 1.0) + 1j * h
    if not domain.contains(probe):
        raise ValidationError(
            f"strip {petal.kind}^{petal.j} does not meet the domain; no line"
        )
    return HalfLine(height=h, x_start=x0, endpoint=LogPoint(x0 + 1j * h),
                    kind=petal.kind, j=petal.j)
