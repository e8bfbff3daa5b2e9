"""The formal model: its Fatou coordinate, time-1 map, and prenormalization.

A germ tangent to the identity with a double fixed point at 0 carries the
formal invariants ``(m, rho)`` (the multiplicity exponent of the resonant
log-monomial and the residual coefficient).  The associated model vector
field integrates in closed form in the log chart: with ``zeta = -log z`` the
model Fatou coordinate is

    Psi_nf(zeta) = A_m(zeta) - zeta - (m/2 + rho) * Log(zeta),

where ``A_m`` is the constant-free antiderivative of ``exp(w) * w**m`` (see
:func:`a_m`).  The model time-1 map ``f0`` is defined implicitly by the Abel
equation ``Psi_nf(f0(zeta)) = Psi_nf(zeta) + 1`` and is computed here by a
segment-integral Newton iteration that stays accurate even where ``Psi_nf``
itself is astronomically large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .surface import LogPoint
from .util import InversionError, ValidationError, as_complex_array, _leggauss


@dataclass(frozen=True)
class FormalClass:
    """Formal invariants of the parabolic class (double fixed point).

    ``m`` is an integer, ``rho`` a real number.  The quadratic exponent is
    fixed at 2 throughout the package.  ``base_convention`` records the
    antiderivative normalization: principal log, no additive constant.
    """

    m: int
    rho: float
    base_convention: str = "principal-log-no-constant"

    def __post_init__(self):
        if not math.isfinite(self.rho):
            raise ValidationError(f"rho must be finite, got {self.rho}")
        if self.m != int(self.m):
            raise ValidationError(f"m must be an integer, got {self.m}")

    @property
    def mu(self) -> float:
        """The log-derivative coefficient m/2 + rho."""
        return 0.5 * self.m + self.rho

    def to_dict(self) -> dict:
        return {"m": int(self.m), "rho": float(self.rho)}

    @staticmethod
    def from_dict(d: dict) -> "FormalClass":
        return FormalClass(m=int(d["m"]), rho=float(d["rho"]))


# ---------------------------------------------------------------------------
# the antiderivative A_m


def a_m(zeta, m: int):
    """Constant-free antiderivative of ``exp(w) * w**m``.

    m >= 0:  closed integration-by-parts sum  exp(z) * sum_i (-1)^i m!/(m-i)! z^(m-i).
    m == -1: Log(z) + sum_{k>=1} z^k / (k * k!)   (entire series plus log).
    m <  -1: upward recursion A_m = (exp(z) z^(m+1) - A_{m+1}) / (m+1).

    The recursion loses roughly ``log10|zeta|`` digits per level below -1;
    m >= -2 is the supported range for production use.
    """
    arr, scalar = as_complex_array(zeta)
    m = int(m)
    if m >= 0:
        coef = 1.0
        poly = np.zeros_like(arr)
        for i in range(m + 1):
            # coef = (-1)^i * m! / (m-i)!
            poly += coef * arr ** (m - i)
            coef *= -(m - i)
        out = np.exp(arr) * poly
    else:
        out = _a_minus_one(arr)
        for mm in range(-2, m - 1, -1):
            out = (np.exp(arr) * arr ** (mm + 1) - out) / (mm + 1)
    return complex(out[0]) if scalar else out


def _a_minus_one(arr: np.ndarray) -> np.ndarray:
    if np.any(arr == 0):
        raise ValidationError("A_{-1} is singular at zeta = 0")
    total = np.zeros_like(arr)
    term = np.array(arr, copy=True)  # k = 1 term: zeta / (1 * 1!)
    total += term
    k = 1
    active = np.ones(arr.shape, dtype=bool)
    while k < 600 and np.any(active):
        k += 1
        # t_k = t_{k-1} * zeta * (k-1) / k^2
        term = term * arr * ((k - 1) / (k * k))
        total = np.where(active, total + term, total)
        active = np.abs(term) > 1e-20 * (1.0 + np.abs(total))
    if np.any(active):
        raise ValidationError("A_{-1} series did not converge; |zeta| too large")
    return np.log(arr) + total


# ---------------------------------------------------------------------------
# model Fatou coordinate


def psi_nf(cls: FormalClass, p):
    """Model Fatou coordinate in the log chart (Re zeta > 0)."""
    arr, scalar = as_complex_array(p)
    out = a_m(arr, cls.m) - arr - cls.mu * np.log(arr)
    return complex(out[0]) if scalar else out


def psi_nf_prime(cls: FormalClass, p):
    """d/dzeta of the model Fatou coordinate: exp(z) z^m - 1 - mu/z."""
    arr, scalar = as_complex_array(p)
    out = np.exp(arr) * arr ** cls.m - 1.0 - cls.mu / arr
    return complex(out[0]) if scalar else out


def psi_nf_inverse(cls: FormalClass, w: complex, seed=None,
                   tol: float | None = None, max_iter: int = 60) -> LogPoint:
    """Invert the model Fatou coordinate by damped Newton.

    ``seed`` selects the branch: the iteration stays in the basin of the
    supplied starting point (callers pass the previous grid point or a model
    inverse).  Without a seed a crude asymptotic fixed-point seed targeting
    the principal strip is used.

    Raises :class:`InversionError` (carrying the last iterate) on failure.
    """
    w = complex(w)
    if seed is None:
        zeta = _asymptotic_seed(cls, w, 0.0)
    else:
        zeta, _ = as_complex_array(seed)
        zeta = complex(zeta[0])
    if tol is None:
        tol = 1e-12 * max(1.0, abs(w))
    for _ in range(max_iter):
        val = psi_nf(cls, zeta) - w
        if abs(val) < tol:
            return LogPoint(zeta)
        step = -val / psi_nf_prime(cls, zeta)
        # keep the iterate in the right half-plane; halve oversized steps
        scale = 1.0
        while abs(step) * scale > 0.5 * max(1.0, abs(zeta)):
            scale *= 0.5
        nxt = zeta + scale * step
        tries = 0
        while nxt.real <= 1e-3 and tries < 40:
            scale *= 0.5
            nxt = zeta + scale * step
            tries += 1
        zeta = nxt
    raise InversionError(
        f"model Fatou inversion stalled for w={w}: residual {abs(val):.3g}", last=zeta
    )


def _asymptotic_seed(cls: FormalClass, w: complex, strip_center: float) -> complex:
    """Fixed-point seed for the inverse: solve exp(s) s^m ~ w + s + mu*Log(s)."""
    s = np.log(max(abs(w), 2.0) + 2.0) + 1j * 0.0
    for _ in range(12):
        target = w + s + cls.mu * np.log(s)
        nxt = np.log(target) - cls.m * np.log(s)
        nxt = nxt + 2j * math.pi * round((strip_center - nxt.imag) / (2 * math.pi))
        if nxt.real <= 0.2:
            nxt = 0.2 + 1j * nxt.imag
        if abs(nxt - s) < 1e-13 * max(1.0, abs(s)):
            s = nxt
            break
        s = nxt
    return complex(s)


# ---------------------------------------------------------------------------
# segment integrals of psi_nf' (the numerically safe route to the Abel flow)


def segment_psi_increment(cls: FormalClass, start, u, n: int = 16):
    """Integral of psi_nf' along the straight segment [start, start+u].

    Equals ``psi_nf(start+u) - psi_nf(start)`` exactly, but is computed from
    the derivative so that the result keeps full relative accuracy in the
    increment even where ``|psi_nf|`` dwarfs the difference.
    """
    s_arr, s_scalar = as_complex_array(start)
    u_arr, u_scalar = as_complex_array(u)
    s_arr, u_arr = np.broadcast_arrays(s_arr, u_arr)
    x, wts = _leggauss(n)
    # nodes along each segment: start + u * (x+1)/2, weights u/2 * w
    tpos = 0.5 * (x + 1.0)
    vals = np.zeros(s_arr.shape, dtype=complex)
    for t, wt in zip(tpos, wts):
        vals += wt * psi_nf_prime(cls, s_arr + u_arr * t)
    vals *= 0.5 * u_arr
    return complex(vals[0]) if (s_scalar and u_scalar) else vals


def f0_increment(cls: FormalClass, p, shift: float = 1.0,
                 tol: float = 1e-14, max_iter: int = 40):
    """Increment ``u`` with ``psi_nf(zeta + u) = psi_nf(zeta) + shift``.

    Newton on the segment integral; the derivative of the residual in ``u``
    is exactly ``psi_nf'(zeta + u)``.  ``shift=-1`` gives the inverse map.
    """
    arr, scalar = as_complex_array(p)
    u = shift / psi_nf_prime(cls, arr)
    ok = np.zeros(arr.shape, dtype=bool)
    for _ in range(max_iter):
        res = segment_psi_increment(cls, arr, u) - shift
        dpsi = psi_nf_prime(cls, arr + u)
        step = -res / dpsi
        u = u + np.where(ok, 0.0, step)
        ok = ok | (np.abs(step) < tol * (1.0 + np.abs(u)))
        if np.all(ok):
            break
    else:
        bad = arr[~ok]
        raise InversionError(
            f"model time-1 Newton stalled at {bad[:3]} (and {bad.size} points total)",
            last=complex(bad[0]),
        )
    return complex(u[0]) if scalar else u


def f0(cls: FormalClass, p):
    """Model time-1 map in the log chart: ``zeta + f0_increment``."""
    arr, scalar = as_complex_array(p)
    out = arr + f0_increment(cls, arr)
    return complex(out[0]) if scalar else out


def f0_inverse(cls: FormalClass, p):
    """Model time-(-1) map (exact inverse branch of f0 on a petal)."""
    arr, scalar = as_complex_array(p)
    out = arr + f0_increment(cls, arr, shift=-1.0)
    return complex(out[0]) if scalar else out


def x0_velocity(cls: FormalClass, p):
    """Velocity of the model field in the log chart, ``1 / psi_nf'``.

    Written via ``w = exp(-zeta) * zeta^(-m)`` so it stays finite far right:
    zdot = w / (1 - w - mu * w / zeta).
    """
    arr, scalar = as_complex_array(p)
    w = np.exp(-arr) * arr ** (-cls.m)
    out = w / (1.0 - w - cls.mu * w / arr)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# prenormalization utilities


def normalize_alpha(alpha: float, m: int, z):
    """Chart change collapsing a higher-order parabolic point to exponent 2:
    ``(alpha-1)^(-m/(alpha-1)) * z^(1/(alpha-1))`` on principal branches."""
    if alpha <= 1:
        raise ValidationError(f"alpha must exceed 1, got {alpha}")
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    e = 1.0 / (alpha - 1.0)
    out = (alpha - 1.0) ** (-m * e) * np.exp(e * np.log(arr))
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class PrenormalizedReport:
    """Outcome of the prenormalization residual check."""

    fitted_c: float
    growth_exponent: float
    passed: bool
    n_points: int


def prenormalized_check(f, cls: FormalClass, zeta_grid,
                        fail_exponent: float = 1.5) -> PrenormalizedReport:
    """Measure how closely ``f`` matches the prenormalized shape.

    In the z-chart the residual is ``f(z) - z + z^2 ell^m - rho z^3 ell^(2m+1)``
    measured against the weight ``z^3 ell^(2m+2)``.  The ratio is bounded on
    prenormalized germs; for a germ that misses the shape it grows like a
    power of ``1/ell``, and the check fails when the fitted growth exponent
    reaches ``fail_exponent``.

    ``f`` may be a plain map of the log chart (``zeta -> f(zeta)``) or any
    object with an ``increment(zeta)`` method returning ``f(zeta) - zeta``.
    Points whose residual sits below the rounding floor of the subtraction
    ``f(zeta) - zeta`` are discarded before fitting.
    """
    arr, _ = as_complex_array(zeta_grid)
    if hasattr(f, "increment"):
        u = np.asarray(f.increment(arr), dtype=complex)
    else:
        fz = np.asarray(f(arr), dtype=complex)
        u = fz - arr
    z = np.exp(-arr)
    lam = 1.0 / arr
    # f(z)-chart difference via expm1 keeps the quadratic-order cancellation exact
    num = z * np.expm1(-u) + z * z * lam ** cls.m \
        - cls.rho * z ** 3 * lam ** (2 * cls.m + 1)
    den = np.abs(z ** 3 * lam ** (2 * cls.m + 2))
    ratio = np.abs(num) / den
    # rounding dust: u carries an absolute error ~ eps * |zeta| from the
    # subtraction f(zeta) - zeta, which shows up in num as ~ |z| * eps * |zeta|
    dust = np.abs(z) * (np.abs(arr) + 2.0) * 5e-15
    live = (np.abs(num) > 10.0 * dust) & (ratio > 1e-13)
    if not np.any(live):
        return PrenormalizedReport(0.0, 0.0, True, int(arr.size))
    scale = float(np.max(ratio[live]))
    logr = np.log(ratio[live])
    logl = np.log(np.abs(lam[live]))
    if np.ptp(logl) < 1e-9:
        exponent = 0.0
    else:
        slope = np.polyfit(logl, logr, 1)[0]
        exponent = float(-slope)
    return PrenormalizedReport(
        fitted_c=scale,
        growth_exponent=exponent,
        passed=bool(exponent < fail_exponent),
        n_points=int(arr.size),
    )
