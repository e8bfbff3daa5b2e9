import math

import mpmath
import numpy as np
import pytest

from parahorn import (
    ValidationError,
    flatness_certificate,
    log_gevrey_bound,
    quadratic_weak_bound,
    verify_log_gevrey,
)


# ---------------------------------------------------------------------------
# the bound sequences


def test_log_gevrey_bound_frozen_value():
    assert log_gevrey_bound(2, 1.0) == pytest.approx(
        0.026825135936678932, rel=1e-15
    )


def test_log_gevrey_bound_against_mpmath():
    mpmath.mp.dps = 30
    for n, m in [(2, 1.0), (3, 1.0), (5, 0.7), (9, 2.0)]:
        ln = mpmath.log(n)
        expect = mpmath.mpf(m) ** (-n) * ln**n * mpmath.exp(-n / ln)
        assert log_gevrey_bound(n, m) == pytest.approx(float(expect), rel=1e-13)


def test_quadratic_weak_bound_against_mpmath():
    mpmath.mp.dps = 30
    for n, m in [(1, 1.0), (2, 1.0), (4, 0.9)]:
        l2n = mpmath.log(2 * n)
        expect = mpmath.mpf(m) ** (-2 * n) * l2n ** (2 * n) * mpmath.exp(-2 * n / l2n)
        assert quadratic_weak_bound(n, m) == pytest.approx(float(expect), rel=1e-13)


def test_bound_monotonicity_facts():
    # decreasing in m at fixed n
    assert log_gevrey_bound(4, 2.0) < log_gevrey_bound(4, 1.0)
    # but INCREASING in n at fixed m = 1: the log^n factor wins
    for n in range(2, 9):
        assert log_gevrey_bound(n + 1, 1.0) > log_gevrey_bound(n, 1.0)
    # the weak bound dominates the strong one at the same (n, m)
    for n in range(2, 7):
        assert quadratic_weak_bound(n, 1.0) > log_gevrey_bound(n, 1.0)


def test_bound_validation():
    with pytest.raises(ValidationError):
        log_gevrey_bound(1, 1.0)
    with pytest.raises(ValidationError):
        log_gevrey_bound(3, 0.0)
    with pytest.raises(ValidationError):
        quadratic_weak_bound(0, 1.0)


# ---------------------------------------------------------------------------
# the remainder verifier


def _ell_grid(lo, hi, n=48):
    r = np.geomspace(lo, hi, n)
    ang = np.exp(1j * np.linspace(-0.3, 0.3, 5))
    return (r[:, None] * ang[None, :]).ravel()


def test_verifier_polynomial_passes():
    full = np.ones(8, dtype=complex)  # degree-7 polynomial, all coefficients 1

    def values(ell):
        return np.polyval(full[::-1], ell)

    rep = verify_log_gevrey(values, full[:6], 1.0, _ell_grid(0.05, 0.4))
    assert rep.passed
    assert rep.ratio < 1e3
    assert rep.n_range == (2, 6)
    assert all(rep.constants[n] > 0 for n in range(2, 7))


def test_verifier_flat_function_passes():
    coeffs = np.zeros(6, dtype=complex)

    def values(ell):
        return np.exp(-1.0 / ell)

    rep = verify_log_gevrey(values, coeffs, 1.0, np.linspace(0.05, 0.4, 40))
    assert rep.passed
    assert rep.ratio < 50


def _gevrey2_values(ell):
    # optimally truncated partial sums of sum_k (k!)^2 ell^k: a function whose
    # remainders genuinely grow like (n!)^2 ell^n on this sample range
    ell = np.asarray(ell, dtype=complex)
    out = np.zeros(ell.shape, dtype=complex)
    for idx in np.ndindex(ell.shape):
        l = ell[idx]
        k_star = max(7, int(1.0 / math.sqrt(abs(l))))
        total = 0.0 + 0.0j
        term = 1.0 + 0.0j
        for k in range(k_star + 1):
            total += term
            term *= l * (k + 1) ** 2
        out[idx] = total
    return out


_GEVREY2_COEFFS = np.array([math.factorial(k) ** 2 for k in range(6)], dtype=complex)


def test_verifier_rejects_gevrey2_growth():
    ells = np.geomspace(0.002, 0.012, 40)
    rep = verify_log_gevrey(_gevrey2_values, _GEVREY2_COEFFS, 1.0, ells)
    assert not rep.passed
    assert rep.ratio > 1e3


def test_verifier_gevrey2_fits_weak_bound():
    ells = np.geomspace(0.002, 0.012, 40)
    rep = verify_log_gevrey(
        _gevrey2_values, _GEVREY2_COEFFS, 1.0, ells, bound_kind="quadratic_weak"
    )
    assert rep.passed
    assert rep.ratio < 1e3


def test_verifier_validation():
    with pytest.raises(ValidationError):
        verify_log_gevrey(lambda e: e, np.zeros(3), 1.0, np.linspace(0.1, 0.2, 20))
    with pytest.raises(ValidationError):
        verify_log_gevrey(lambda e: e, np.zeros(6), 1.0, np.array([0.1, 0.2]))
    with pytest.raises(ValidationError):
        verify_log_gevrey(
            lambda e: e, np.zeros(6), 1.0, np.linspace(0.1, 0.2, 20),
            bound_kind="martian",
        )


def test_report_serializes():
    coeffs = np.zeros(6, dtype=complex)
    rep = verify_log_gevrey(
        lambda e: np.exp(-1.0 / e), coeffs, 1.0, np.linspace(0.05, 0.4, 40)
    )
    d = rep.to_dict()
    assert d["passed"] is True
    assert d["n_min"] == 2 and d["n_max"] == 6
    assert set(d["constants"]) == {"2", "3", "4", "5", "6"}


# ---------------------------------------------------------------------------
# flatness certificates


def test_flatness_certifies_double_exponential():
    w = np.linspace(0.0, 3.0, 60)
    g = np.exp(-np.exp(w))
    cert = flatness_certificate(w, g, 1.0)
    assert cert.passed
    assert cert.m_fit == pytest.approx(1.0, abs=1e-9)
    assert cert.M == pytest.approx(1.0, abs=1e-9)
    assert cert.C == pytest.approx(1.0, rel=1e-9)
    assert cert.max_residual < 1e-9


def test_flatness_envelope_constant_holds_on_samples():
    rng = np.random.default_rng(7)
    w = np.linspace(0.5, 3.0, 80)
    g = 0.3 * np.exp(-1.7 * np.exp(0.98 * w)) * np.exp(rng.uniform(-0.1, 0.1, 80))
    cert = flatness_certificate(w, g, 0.9)
    assert cert.passed
    bound = cert.C * np.exp(-cert.M * np.exp(cert.m_fit * w))
    assert np.all(g <= bound * (1 + 1e-9))
    # smallest such constant: attained somewhere
    assert np.min(bound / g) == pytest.approx(1.0, rel=1e-9)


def test_flatness_rejects_single_exponential():
    w = np.linspace(1.0, 3.0, 60)
    cert = flatness_certificate(w, np.exp(-w), 1.0)
    assert not cert.passed
    assert cert.m_fit < 0.6


def test_flatness_vacuous_and_errors():
    cert = flatness_certificate(np.linspace(0, 1, 10), np.zeros(10), 1.0)
    assert cert.passed and cert.C == 0.0
    with pytest.raises(ValidationError):
        flatness_certificate(np.zeros(3), np.zeros(4), 1.0)
    with pytest.raises(ValidationError):
        flatness_certificate(np.array([]), np.array([]), 1.0)
