import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parahorn import (
    GermSeries,
    HornMapSequence,
    ValidationError,
    check_radii,
    check_symmetry,
    check_uniform_bounds,
    equivalence_normalize,
    g_from_h,
    h_from_g,
)
from parahorn import series as ps

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# GermSeries mechanics


def test_germ_series_basics():
    g = GermSeries([1.0, 0.5j], 0.3)
    assert g.degree == 2
    assert g.c1 == 1.0
    assert g.coefficient(2) == 0.5j
    assert g.coefficient(7) == 0.0
    assert g.noise(2) == 0.0
    with pytest.raises(ValidationError):
        g.coefficient(0)
    assert np.allclose(g.as_poly(), [0, 1.0, 0.5j])
    assert np.allclose(g.as_poly(4), [0, 1.0, 0.5j, 0, 0])


def test_germ_series_validation():
    with pytest.raises(ValidationError):
        GermSeries([1.0], 0.0)
    with pytest.raises(ValidationError):
        GermSeries([1.0, 2.0], 1.0, coeff_noise=[0.1])


def test_germ_series_evaluate_disc():
    g = GermSeries([1.0, 1.0], 0.5)
    t = 0.25
    assert g.evaluate(t) == pytest.approx(t + t * t)
    assert g.derivative_evaluate(t) == pytest.approx(1 + 2 * t)
    with pytest.raises(ValidationError):
        g.evaluate(0.6)


def test_germ_series_identity_and_noise():
    assert GermSeries.identity(4, 1.0).is_identity()
    g = GermSeries([1.0, 1e-11], 1.0)
    assert not g.is_identity()
    assert g.is_identity(tol=1e-10)
    g = GermSeries([1.0, 0.1], 1.0, coeff_noise=[0.0, 0.02])
    assert g.noise(2) == pytest.approx(0.02)


# ---------------------------------------------------------------------------
# h <-> g


def test_h_from_g_known_coefficients():
    g = GermSeries([0.05], 1.0)
    h = h_from_g(g, "infty", degree=3)
    a = TWO_PI_I * 0.05
    assert h.c1 == pytest.approx(1.0)
    assert h.coefficient(2) == pytest.approx(a)
    assert h.coefficient(3) == pytest.approx(a * a / 2)


def test_g_from_h_infty_round():
    g = GermSeries([0.05], 1.0)
    h = h_from_g(g, "infty", degree=3)
    back = g_from_h(h, "infty")
    assert back.coefficient(1) == pytest.approx(0.05)
    assert abs(back.coefficient(2)) < 1e-14


def test_g_from_h_zero_kind_log_series():
    # zero kind reverts first: pick h with inverse exactly t + t^2,
    # so g = log(1 + t) / (2 pi i)
    inv = np.array([0, 1, 1], dtype=complex)
    h = GermSeries(ps.revert(inv, 4)[1:], 1.0)
    g = g_from_h(h, "zero")
    expect = np.array([1.0, -0.5, 1.0 / 3.0]) / TWO_PI_I
    assert np.allclose(g.coeffs, expect, atol=1e-13)


def test_g_from_h_rejects_non_tangent():
    with pytest.raises(ValidationError):
        g_from_h(GermSeries([2.0, 0.1], 1.0), "infty")
    with pytest.raises(ValidationError):
        g_from_h(GermSeries([1.0, 0.1], 1.0), "sideways")


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.complex_numbers(max_magnitude=0.5, allow_nan=False, allow_infinity=False),
        min_size=1,
        max_size=7,
    ),
    st.sampled_from(["zero", "infty"]),
)
def test_h_g_round_trip(tail, which):
    h = GermSeries(np.concatenate([[1.0], tail]), 1.0)
    g = g_from_h(h, which)
    back = h_from_g(g, which, degree=h.degree)
    assert np.allclose(back.coeffs, h.coeffs, atol=1e-8)


# ---------------------------------------------------------------------------
# windows


def _window_from_h0(h0_coeffs: dict, dmax: int = 5, sigma: float = 1.0):
    """Symmetric window: hinf_j := conj(revert(h0_{1-j})), identity outside."""
    J = max(abs(j) for j in h0_coeffs)
    entries = {}
    for j in range(-J, J + 1):
        c = h0_coeffs.get(j, None)
        h0 = GermSeries(ps.trim(np.concatenate([[0.0], c]), dmax)[1:], sigma) \
            if c is not None else GermSeries.identity(dmax, sigma)
        partner = h0_coeffs.get(1 - j, None)
        if partner is None:
            hinf = GermSeries.identity(dmax, sigma)
        else:
            poly = ps.trim(np.concatenate([[0.0], partner]), dmax)
            hinf = GermSeries(np.conj(ps.revert(poly, dmax))[1:], sigma)
        entries[j] = (h0, hinf)
    return HornMapSequence(J=J, entries=entries)


def test_sequence_validation_and_access():
    seq = HornMapSequence.identity(1)
    assert list(seq.indices()) == [-1, 0, 1]
    assert seq.is_identity()
    assert seq.sigma(0) == 1.0
    with pytest.raises(ValidationError):
        HornMapSequence(J=1, entries={0: seq.pair(0)})
    with pytest.raises(ValidationError):
        seq.horn("up", 0)


def test_symmetry_detects_symmetric_window():
    seq = _window_from_h0({0: [1.0, 0.2], 1: [1.0, 0.05]})
    rep = check_symmetry(seq)
    assert rep.symmetric
    assert rep.max_deviation < 1e-12
    # j = -1 has partner 2 outside the window
    assert len(rep.warnings) == 1


def test_symmetry_detects_asymmetric_window():
    seq = _window_from_h0({0: [1.0, 0.2], 1: [1.0, 0.05]})
    h0, hinf = seq.entries[0]
    bad = GermSeries(hinf.coeffs + np.array([0, 1e-3, 0, 0, 0]), hinf.sigma)
    seq.entries[0] = (h0, bad)
    rep = check_symmetry(seq)
    assert not rep.symmetric
    assert rep.max_deviation == pytest.approx(1e-3, rel=1e-6)


def test_symmetry_window_edge_uses_identity():
    h0 = GermSeries([1.0, 0.3], 1.0)
    seq = HornMapSequence(J=0, entries={0: (h0, GermSeries.identity(2, 1.0))})
    rep = check_symmetry(seq)
    assert rep.symmetric
    assert rep.warnings


def test_uniform_bounds_exact():
    h = GermSeries([1.0, 0.5], 1.0)
    seq = HornMapSequence(J=0, entries={0: (h, h)})
    d1, d2 = check_uniform_bounds(seq)
    assert d1 == pytest.approx(0.5, rel=1e-12)
    assert d2 == pytest.approx(1.0, rel=1e-12)

    h = GermSeries([1.0, 0.1], 1.0)
    seq = HornMapSequence(J=0, entries={0: (h, h)})
    d1, d2 = check_uniform_bounds(seq)
    assert d1 == pytest.approx(0.1, rel=1e-12)
    assert d2 == pytest.approx(0.2, rel=1e-12)


def test_check_radii():
    seq = HornMapSequence.identity(2, sigma=1.0)
    assert check_radii(seq)["ok"]
    tight = HornMapSequence.identity(2, sigma=1e-3)
    rep = check_radii(tight)
    assert not rep["ok"]
    assert rep["margins"][0] < 0  # e^-5 ~ 6.7e-3 exceeds 1e-3


# ---------------------------------------------------------------------------
# file format


def test_sequence_json_round_trip(tmp_path):
    seq = _window_from_h0({0: [1.0, 0.2, 0.01], 1: [1.0, 0.05]})
    path = tmp_path / "moduli.json"
    seq.save(str(path))
    back = HornMapSequence.load(str(path))
    assert back.J == seq.J
    for j in seq.indices():
        for kind in ("zero", "infty"):
            a, b = seq.horn(kind, j), back.horn(kind, j)
            assert np.allclose(a.as_poly(5), b.as_poly(5), atol=1e-15)
            assert b.sigma == pytest.approx(seq.sigma(j))


def test_sequence_save_requires_tangent():
    h = GermSeries([2.0, 0.1], 1.0)
    seq = HornMapSequence(J=0, entries={0: (h, GermSeries.identity(2, 1.0))})
    with pytest.raises(ValidationError):
        seq.to_dict()


def test_sequence_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        HornMapSequence.load(str(path))
    path.write_text("{\"no_entries\": 1}")
    with pytest.raises(ValidationError):
        HornMapSequence.load(str(path))


# ---------------------------------------------------------------------------
# equivalence


def _base_window():
    return _window_from_h0({0: [1.0, 0.2], 1: [1.0, 0.05]}, dmax=4)


def _rescaled(seq: HornMapSequence, beta: complex, gamma: complex):
    """a with a.h0(t) = beta * b.h0(gamma t), a.hinf(t) = gamma * b.hinf(beta t)."""
    entries = {}
    for j in seq.indices():
        h0, hinf = seq.pair(j)
        p = np.arange(1, h0.degree + 1)
        c0 = beta * h0.coeffs * gamma**p
        ci = gamma * hinf.coeffs * beta ** np.arange(1, hinf.degree + 1)
        entries[j] = (GermSeries(c0, h0.sigma), GermSeries(ci, hinf.sigma))
    return HornMapSequence(J=seq.J, entries=entries)


def test_equivalence_identical():
    b = _base_window()
    eq = equivalence_normalize(b, b)
    assert eq is not None and not eq.family
    assert eq.max_residual < 1e-10
    for j, v in eq.beta.items():
        assert v == pytest.approx(1.0, abs=1e-9)
    for j, v in eq.gamma.items():
        assert v == pytest.approx(1.0, abs=1e-9)


def test_equivalence_recovers_scalars():
    b = _base_window()
    a = _rescaled(b, beta=2.0, gamma=0.5)
    eq = equivalence_normalize(a, b)
    assert eq is not None and not eq.family
    assert eq.n_solutions == 1
    for j, v in eq.beta.items():
        assert v == pytest.approx(2.0, abs=1e-9)
    for j, v in eq.gamma.items():
        assert v == pytest.approx(0.5, abs=1e-9)
    assert eq.max_residual < 1e-9


def test_equivalence_rejects_different_windows():
    b = _base_window()
    a = _window_from_h0({0: [1.0, 0.2], 1: [1.0, 0.04]}, dmax=4)
    assert equivalence_normalize(a, b) is None


def test_equivalence_identity_vs_nontrivial():
    a = HornMapSequence.identity(1, degree=4)
    b = _base_window()
    assert equivalence_normalize(a, b) is None


def test_equivalence_linear_family():
    # pure linear windows never pin the free scalar
    a = HornMapSequence.identity(1, degree=3)
    b = HornMapSequence.identity(1, degree=3)
    eq = equivalence_normalize(a, b)
    assert eq is not None
    assert eq.family
    assert eq.n_solutions == 0


def test_equivalence_noise_masks_unknown_coefficients():
    a = HornMapSequence.identity(0, degree=3)
    c = np.array([1.0, 1e-3, 0.0], dtype=complex)
    noisy = GermSeries(c, 1.0, coeff_noise=[0.0, 1e-2, 1e-2])
    b = HornMapSequence(J=0, entries={0: (noisy, GermSeries.identity(3, 1.0))})
    eq = equivalence_normalize(a, b)
    assert eq is not None
    assert eq.family  # nothing reliable to pin with


def test_equivalence_root_of_unity_ambiguity():
    # only cubic content: s^2 = 1 leaves a two-fold ambiguity
    h = GermSeries([1.0, 0.0, 0.1], 1.0)
    seq = HornMapSequence(J=0, entries={0: (h, h)})
    eq = equivalence_normalize(seq, seq)
    assert eq is not None
    assert eq.n_solutions == 2
    assert "2" in eq.case


def test_equivalence_window_mismatch():
    with pytest.raises(ValidationError):
        equivalence_normalize(
            HornMapSequence.identity(1), HornMapSequence.identity(2)
        )
