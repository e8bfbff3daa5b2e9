"""Asymptotic regularity: log-Gevrey bounds, their verifier, and flatness fits.

The corrections produced by the transform machinery admit asymptotic
expansions in ``ell = 1/zeta`` whose remainders obey, on linear (sector)
domains, the log-Gevrey estimate

    |F(ell) - sum_{k<n} a_k ell^k|  <=  C * bound(n, m) * |ell|^n,

with ``bound(n, m) = m^-n (log n)^n exp(-n / log n)``; on quadratic domains
only the weaker ``quadratic_weak_bound`` survives.  The verifier below turns
the "one constant for every n" quantifier into a finite check: measure the
sup-constants C_n on nested sub-cusps and require them to stay within a
fixed dynamic range.

Note the bounds themselves are *increasing* in n at fixed m (the log^n n
factor wins); decreasing behavior holds in m.  Downstream nothing depends on
monotonicity in n — the verifier compares measured constants only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .util import ValidationError


def log_gevrey_bound(n: int, m: float) -> float:
    """m^-n (log n)^n exp(-n/log n) for n >= 2, m > 0 (natural logs)."""
    if n < 2:
        raise ValidationError(f"log-Gevrey bounds start at n = 2, got {n}")
    if m <= 0:
        raise ValidationError(f"order m must be positive, got {m}")
    ln = math.log(n)
    return m ** (-n) * ln**n * math.exp(-n / ln)


def quadratic_weak_bound(n: int, m: float) -> float:
    """m^-2n exp(-2n/log 2n) (log 2n)^(2n): the quadratic-domain analogue."""
    if n < 1:
        raise ValidationError(f"weak bounds start at n = 1, got {n}")
    if m <= 0:
        raise ValidationError(f"order m must be positive, got {m}")
    l2n = math.log(2 * n)
    return m ** (-2 * n) * l2n ** (2 * n) * math.exp(-2 * n / l2n)


_BOUNDS = {"log_gevrey": log_gevrey_bound, "quadratic_weak": quadratic_weak_bound}


@dataclass(frozen=True)
class GevreyReport:
    """Verdict of a remainder-bound measurement.

    ``constants[n]`` is the measured sup-constant over all sub-cusps for the
    order-n remainder; ``per_cusp[n]`` the list across sub-cusps.  The check
    passes when max/min of the constants stays below ``ratio_cap`` (a finite
    stand-in for "a single C works for every n").
    """

    order: float
    bound_kind: str
    constants: dict
    per_cusp: dict
    ratio: float
    ratio_cap: float
    passed: bool
    n_range: tuple

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "bound_kind": self.bound_kind,
            "constants": {str(n): c for n, c in sorted(self.constants.items())},
            "ratio": self.ratio,
            "ratio_cap": self.ratio_cap,
            "passed": self.passed,
            "n_min": self.n_range[0],
            "n_max": self.n_range[1],
        }


def verify_log_gevrey(values_fn, coeffs, m: float, ell_samples,
                      n_max: int = 6, ratio_cap: float = 1e3,
                      bound_kind: str = "log_gevrey",
                      n_cusps: int = 3) -> GevreyReport:
    """Measure remainder constants of an asymptotic expansion.

    Args:
        values_fn: callable mapping an array of ell values to F(ell).
        coeffs: asymptotic coefficients a_0, a_1, ... (at least n_max of them).
        m: claimed order.
        ell_samples: array of ell values in the cusp (complex), sorted however;
            nested sub-cusps are carved out by |ell| quantiles.
        n_max: top remainder order to test (n runs 2..n_max).
        ratio_cap: allowed dynamic range of the constants across n.
        bound_kind: 'log_gevrey' or 'quadratic_weak'.
        n_cusps: how many nested sub-cusps to measure on.

    Returns a :class:`GevreyReport`; ``passed`` means every sub-cusp's
    constants stay within ratio_cap across n (all-zero remainders pass).
    """
    if bound_kind not in _BOUNDS:
        raise ValidationError(f"unknown bound kind {bound_kind!r}")
    bound_fn = _BOUNDS[bound_kind]
    coeffs = np.asarray(coeffs, dtype=complex)
    n_lo = 2
    if coeffs.size < n_max:
        raise ValidationError(
            f"need at least {n_max} coefficients for n_max={n_max}, got {coeffs.size}"
        )
    ell = np.asarray(ell_samples, dtype=complex).ravel()
    if ell.size < 8:
        raise ValidationError("too few samples to measure remainder constants")
    vals = np.asarray(values_fn(ell), dtype=complex)

    # nested sub-cusps: progressively smaller |ell| (deeper into the cusp)
    radii = np.abs(ell)
    cuts = np.quantile(radii, np.linspace(1.0, 0.35, n_cusps))
    constants: dict = {}
    per_cusp: dict = {}
    for n in range(n_lo, n_max + 1):
        partial = np.zeros_like(ell)
        for k in range(n - 1, -1, -1):
            partial = partial * ell + coeffs[k]
        rem = np.abs(vals - partial)
        weight = bound_fn(n, m) * np.abs(ell) ** n
        cs = []
        for cut in cuts:
            mask = radii <= cut * (1 + 1e-12)
            if not np.any(mask):
                cs.append(0.0)
                continue
            cs.append(float(np.max(rem[mask] / weight[mask])))
        per_cusp[n] = cs
        constants[n] = max(cs)
    finite = [c for c in constants.values() if c > 0]
    if not finite:
        ratio = 1.0
    else:
        ratio = max(finite) / min(finite)
    passed = ratio <= ratio_cap
    return GevreyReport(
        order=float(m),
        bound_kind=bound_kind,
        constants=constants,
        per_cusp=per_cusp,
        ratio=float(ratio),
        ratio_cap=float(ratio_cap),
        passed=bool(passed),
        n_range=(n_lo, n_max),
    )


@dataclass(frozen=True)
class FlatnessCertificate:
    """Fit of |G(w)| ~ C exp(-M exp(m Re w)) on line samples."""

    m_fit: float
    m_required: float
    M: float
    C: float
    passed: bool
    n_samples: int
    max_residual: float


def flatness_certificate(samples_w, samples_g, m_order: float,
                         slack: float = 0.05) -> FlatnessCertificate:
    """Certify super-exponential flatness of cocycle data along lines.

    Fits ``log(-log |G|)`` linearly against ``Re w`` on the decaying tail and
    requires slope >= m_order - slack.  All-zero samples certify vacuously
    (C = 0).  Returns the fitted (m, M, C); C is the smallest constant making
    ``|G| <= C exp(-M exp(m_fit Re w))`` hold on every sample.
    """
    w = np.asarray(samples_w, dtype=complex).ravel()
    g = np.abs(np.asarray(samples_g, dtype=complex).ravel())
    if w.size != g.size or w.size == 0:
        raise ValidationError("flatness fit needs matching, nonempty sample arrays")
    live = g > 0
    if not np.any(live):
        return FlatnessCertificate(
            m_fit=float("inf"), m_required=m_order, M=1.0, C=0.0,
            passed=True, n_samples=int(w.size), max_residual=0.0,
        )
    x_live = w.real[live]
    g_live = g[live]
    y_live = np.log(-np.log(np.minimum(g_live, 0.5)))
    order = np.argsort(x_live)
    x, y = x_live[order], y_live[order]
    # fit on the decaying tail: last 60% of the live range
    k0 = int(0.4 * x.size)
    xs, ys = x[k0:], y[k0:]
    if xs.size < 3 or np.ptp(xs) < 1e-9:
        raise ValidationError("not enough live samples for a slope fit")
    slope, intercept = np.polyfit(xs, ys, 1)
    m_fit = float(slope)
    M = float(np.exp(intercept))
    # the smallest C valid on ALL live samples for the fitted (m, M)
    log_c = np.max(np.log(g_live) + M * np.exp(m_fit * x_live))
    C = float(np.exp(min(log_c, 700.0)))
    resid = float(np.max(np.abs(ys - (slope * xs + intercept))))
    return FlatnessCertificate(
        m_fit=m_fit,
        m_required=float(m_order),
        M=M,
        C=C,
        passed=bool(m_fit >= m_order - slack),
        n_samples=int(w.size),
        max_residual=resid,
    )
