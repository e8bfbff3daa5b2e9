"""Truncated power-series arithmetic on plain numpy coefficient arrays.

Arrays are indexed by power of t: ``c[k]`` is the coefficient of ``t**k``,
and every operation truncates at a fixed top degree D.  Degrees stay tiny
(D <= 16 in practice), so the quadratic-cost algorithms below are the right
tool; no FFT cleverness.
"""

from __future__ import annotations

import numpy as np

from .util import ValidationError


def trim(c, degree: int) -> np.ndarray:
    """Copy of c padded/cut to coefficients 0..degree."""
    c = np.asarray(c, dtype=complex)
    out = np.zeros(degree + 1, dtype=complex)
    n = min(degree + 1, c.size)
    out[:n] = c[:n]
    return out


def mul(a, b, degree: int) -> np.ndarray:
    a = trim(a, degree)
    b = trim(b, degree)
    return np.convolve(a, b)[: degree + 1]


def compose(outer, inner, degree: int) -> np.ndarray:
    """outer(inner(t)) truncated; requires inner(0) = 0."""
    inner = trim(inner, degree)
    if inner[0] != 0:
        raise ValidationError("composition needs a series with zero constant term")
    outer = trim(outer, degree)
    # Horner from the top coefficient down
    out = np.zeros(degree + 1, dtype=complex)
    out[0] = outer[degree]
    for k in range(degree - 1, -1, -1):
        out = mul(out, inner, degree)
        out[0] += outer[k]
    return out


def revert(f, degree: int) -> np.ndarray:
    """Compositional inverse of f = c1*t + ..., c1 != 0, truncated.

    Coefficient-by-coefficient: with g correct to order n-1 the composition
    f(g(t)) equals t + e_n t^n + O(t^{n+1}), and the correction is
    g_n -= e_n / c1.
    """
    f = trim(f, degree)
    if f[0] != 0:
        raise ValidationError("reversion needs a series with zero constant term")
    if f[1] == 0:
        raise ValidationError("reversion needs a nonzero linear coefficient")
    g = np.zeros(degree + 1, dtype=complex)
    g[1] = 1.0 / f[1]
    for n in range(2, degree + 1):
        err = compose(f, g, n)[n]
        g[n] = -err / f[1]
    return g


def log1p_series(u, degree: int) -> np.ndarray:
    """log(1 + u(t)) for u with u(0) = 0."""
    u = trim(u, degree)
    if u[0] != 0:
        raise ValidationError("log1p needs a series with zero constant term")
    out = np.zeros(degree + 1, dtype=complex)
    power = u.copy()
    sign = 1.0
    for k in range(1, degree + 1):
        out += sign / k * power
        power = mul(power, u, degree)
        sign = -sign
    return out


def exp_series(u, degree: int) -> np.ndarray:
    """exp(u(t)) for u with u(0) = 0."""
    u = trim(u, degree)
    if u[0] != 0:
        raise ValidationError("exp needs a series with zero constant term")
    out = np.zeros(degree + 1, dtype=complex)
    out[0] = 1.0
    term = np.zeros(degree + 1, dtype=complex)
    term[0] = 1.0
    for k in range(1, degree + 1):
        term = mul(term, u, degree) / k
        out += term
    return out


def derivative(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.size <= 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, c.size)


def evaluate(c, t):
    """Horner evaluation at scalar or array t."""
    c = np.asarray(c, dtype=complex)
    t = np.asarray(t, dtype=complex)
    out = np.full(t.shape, c[-1], dtype=complex)
    for k in range(c.size - 2, -1, -1):
        out = out * t + c[k]
    return out


def rescale(c, lam: complex) -> np.ndarray:
    """Coefficients of c(lam * t)."""
    c = np.asarray(c, dtype=complex)
    return c * lam ** np.arange(c.size)
