"""Extraction: orbit-sum Fatou coordinates, circle sampling, roundtrip."""
from __future__ import annotations

import numpy as np
import pytest

from instances import (
    NARROW_DOMAIN,
    WIDE_CONFIG,
    WIDE_DOMAIN,
    single_mode_sequence,
    symmetric_pair_sequence,
)
from parahorn import realize as rz
from parahorn.extract import (
    FatouExtract,
    OrbitConfig,
    extract_gluing_series,
    orbit_correction,
    roundtrip,
)
from parahorn.moduli import HornMapSequence
from parahorn.normal_form import FormalClass
from parahorn.surface import PetalId
from parahorn.util import ConvergenceError, ValidationError

_CACHE: dict = {}


def _wide_germ():
    if "germ" not in _CACHE:
        cls = FormalClass(0, 0.0)
        atlas = rz.iterate_fatou(single_mode_sequence(), cls, WIDE_DOMAIN, WIDE_CONFIG)
        _CACHE["germ"] = rz.recover_germ(atlas), atlas
    return _CACHE["germ"]


def _identity_germ():
    if "identity" not in _CACHE:
        cls = FormalClass(0, 0.0)
        atlas = rz.iterate_fatou(HornMapSequence.identity(1), cls, NARROW_DOMAIN)
        _CACHE["identity"] = rz.recover_germ(atlas)
    return _CACHE["identity"]


def _wide_roundtrip():
    if "roundtrip" not in _CACHE:
        _CACHE["roundtrip"] = roundtrip(
            single_mode_sequence(), FormalClass(0, 0.0), WIDE_DOMAIN,
            iter_cfg=WIDE_CONFIG,
        )
    return _CACHE["roundtrip"]


def test_orbit_sums_match_the_realization_atlas():
    """Both directions land on the atlas normalization of the correction."""
    germ, atlas = _wide_germ()
    probes = {
        ("plus", 0): np.array([2.0 + 0.3j, 3.5 - 0.2j, 1.5 + 0.8j, 5.0 + 0.0j]),
        ("minus", 0): np.array([2.0 - 0.3j, 3.5 - 2.9j, 1.5 - 0.8j, 5.0 - 3.1j]),
    }
    for petal, pts in probes.items():
        orb = orbit_correction(germ, petal, pts)
        ref = np.array([atlas.r_value(petal, complex(p)) for p in pts])
        assert np.max(np.abs(orb - ref)) < 5e-6
        assert np.max(np.abs(ref)) > 1e-6  # the agreement is not about zero


def test_orbit_sum_collapses_on_identity_data():
    germ = _identity_germ()
    assert orbit_correction(germ, ("plus", 0), 3.0 + 0.2j) == 0.0
    assert orbit_correction(germ, ("minus", 0), 3.0 - 3.1j) == 0.0  # backward route


def test_petal_handles_are_interchangeable():
    germ, _ = _wide_germ()
    p = 2.0 + 0.3j
    assert orbit_correction(germ, ("plus", 0), p) == orbit_correction(
        germ, PetalId(0, "plus"), p
    )


def test_fatou_coordinate_satisfies_abel():
    """psi(f(z)) - psi(z) = 1 through the orbit route, on both petal kinds."""
    germ, _ = _wide_germ()
    fx = FatouExtract(germ)
    probes = {
        ("plus", 0): np.array([2.0 + 0.3j, 3.0 + 0.1j, 1.5 + 0.8j]),
        ("minus", 0): np.array([2.0 - 3.3j, 3.0 - 3.1j, 1.5 - 2.6j]),
    }
    for petal, pts in probes.items():
        fp = np.asarray(germ.evaluate(petal, pts))
        res = fx.psi(petal, fp) - fx.psi(petal, pts) - 1.0
        assert np.max(np.abs(res)) < 5e-8


def test_extracted_series_recovers_the_input_mode():
    germ, _ = _wide_germ()
    fx = FatouExtract(germ)
    g = extract_gluing_series(fx, "infty", 0)
    assert abs(g.c1 - 0.05) < 5e-5
    assert 0.0 < g.noise(1) < 5e-6
    assert abs(g.c1) > 10.0 * g.noise(1)  # the mode is signal, not floor
    assert g.meta["floor"] < 1e-8
    assert g.sigma == g.meta["rho"]
    assert abs(g.meta["rho"] - 1.0763e-4) < 3e-7
    assert g.meta["n_samples"] == 64


def test_identity_entry_reads_as_noise():
    germ, _ = _wide_germ()
    fx = FatouExtract(germ)
    g = extract_gluing_series(fx, "zero", 1)
    assert abs(g.c1) < 3e-5


def test_inaccessible_entries_are_flagged_not_faked():
    germ, _ = _wide_germ()
    fx = FatouExtract(germ)
    g = extract_gluing_series(fx, "zero", 0)
    assert g.meta["inaccessible"] is True
    assert np.all(g.coeffs == 0.0)
    assert np.all(np.isinf(g.coeff_noise))
    assert g.sigma == fx.cfg.rho_min


def test_roundtrip_recovers_the_linear_coefficient():
    rep = _wide_roundtrip()
    assert rep.max_linear_error < 2e-4
    assert set(rep.linear_errors) == {("infty", 0), ("zero", 1)}
    assert set(rep.inaccessible) == {
        ("zero", -1), ("infty", -1), ("zero", 0), ("infty", 1),
    }
    assert rep.n_steps <= 6
    assert rep.shrink == 0


def test_roundtrip_report_serializes():
    rep = _wide_roundtrip()
    d = rep.to_dict()
    assert d["max_linear_error"] == rep.max_linear_error
    assert len(d["entries"]) == 2
    assert d["inaccessible"] == ["zero(-1)", "infty(-1)", "zero(0)", "infty(1)"]
    assert all(np.isfinite(e["error"]) for e in d["entries"])


def test_extracted_window_is_normalized_and_annotated():
    rep = _wide_roundtrip()
    h = rep.extracted.horn("infty", 0)
    assert h.c1 == 1.0
    assert h.coeff_noise is not None and h.coeff_noise[0] == 0.0
    assert h.meta["kind"] == "infty" and h.meta["j"] == 0
    assert rep.extracted.horn("zero", 0).meta["inaccessible"] is True


def test_symmetric_roundtrip_carries_zero_kind_signal():
    """The partner instance puts the mode on a zero strip: orientation check."""
    rep = roundtrip(
        symmetric_pair_sequence(), FormalClass(0, 0.0), WIDE_DOMAIN,
        iter_cfg=WIDE_CONFIG,
    )
    assert rep.max_linear_error < 1e-5
    ref = rep.reference_coefficients[("zero", 1)]
    assert abs(ref - 0.05j / (2.0 * np.pi)) < 1e-12
    assert abs(rep.linear_coefficients[("zero", 1)] - ref) < 1e-5


def test_short_orbit_fails_loudly():
    germ, _ = _wide_germ()
    cfg = OrbitConfig(max_orbit=16, tail_x_min=10.0)
    with pytest.raises(ConvergenceError):
        orbit_correction(germ, ("plus", 0), 2.0 + 0.3j, cfg)


def test_invalid_petals_and_configs_are_rejected():
    germ = _identity_germ()
    with pytest.raises(ValidationError):
        orbit_correction(germ, ("zero", 0), 3.0 + 0.1j)
    with pytest.raises(ValidationError):
        orbit_correction(germ, "plus", 3.0 + 0.1j)
    with pytest.raises(ValidationError):
        FatouExtract(object())
    for bad in (
        dict(max_orbit=8),
        dict(rho_safety=1.2),
        dict(degree=0),
        dict(n_samples=4),
        dict(tail_window=0.0),
        dict(inverse_max=1),
    ):
        with pytest.raises(ValidationError):
            OrbitConfig(**bad)
