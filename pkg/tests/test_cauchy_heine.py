"""Half-line Cauchy transforms: quadrature, branch routing, petal atlases."""
from __future__ import annotations

import csv

import numpy as np
import pytest
from scipy.integrate import quad

from parahorn.cauchy_heine import (
    CHConfig,
    CocycleField,
    asymptotic_coeffs,
    ch_deformed,
    ch_line_integral,
    ch_on_line,
    export_atlas_csv,
    line_geometry,
    petal_lines,
    realize_cocycle,
    region_classify,
    tail_estimate,
    window_lines,
    window_petals,
)
from parahorn.surface import DomainSpec, PetalId, central_line
from parahorn.util import SingularPointError, TooCloseToLineError, ValidationError

DOM = DomainSpec.linear(2.5, 0.05)
CFG = CHConfig(J=1, eps=0.15)
LINE = central_line(DOM, PetalId(0, "infty"))  # height -pi/2
_C0 = 0.31 - 0.12j


def _model_g(w):
    """Analytic single-mode field on the infty(0) strip, decays like exp(-2 pi e^x)."""
    w = np.asarray(w, dtype=complex)
    return _C0 * np.exp(-2j * np.pi * (np.exp(w) - w))


def _gauss_field(c, a, x0):
    return lambda w: c * np.exp(-a * (np.asarray(w, complex) - x0 - 1j * LINE.height) ** 2)


def test_zero_field_gives_zero_transform():
    val = ch_line_integral(lambda w: np.zeros_like(w), LINE,
                           np.array([2.0 + 0.5j, 5.0 - 3.0j]), CFG)
    assert np.all(val == 0)


def test_direct_transform_against_adaptive_quadrature():
    # 20 random (field, target) instances vs scipy's adaptive rule on the
    # same truncated interval
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        c = rng.normal() + 1j * rng.normal()
        a = 0.5 + rng.random()
        x0 = LINE.x_start + 2.0 * rng.random()
        G = _gauss_field(c, a, x0)
        zeta = complex(LINE.x_start + 6 * rng.random(),
                       LINE.height + np.sign(rng.normal()) * (0.2 + 2.0 * rng.random()))
        val = ch_line_integral(G, LINE, zeta, CFG)

        def f(x):
            return G(x + 1j * LINE.height) / (x + 1j * LINE.height - zeta)

        re = quad(lambda x: f(x).real, LINE.x_start, LINE.x_start + CFG.length,
                  epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        im = quad(lambda x: f(x).imag, LINE.x_start, LINE.x_start + CFG.length,
                  epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        worst = max(worst, abs(val - (re + 1j * im) / (2j * np.pi)))
    assert worst < 1e-11


def test_branch_pinning_in_the_lens():
    # between the line and the down-shifted line the down-path continuation
    # picks up the residue, the up-path does not
    pts = np.array([1.2 + 1j * (LINE.height - 0.09), 2.0 + 1j * (LINE.height - 0.12)])
    down = ch_deformed(_model_g, DOM, LINE, pts, CFG, direction="down")
    up = ch_deformed(_model_g, DOM, LINE, pts, CFG, direction="up")
    direct = ch_line_integral(_model_g, LINE, pts, CFG)
    g = _model_g(pts)
    assert np.max(np.abs(down - direct - g)) < 1e-14
    assert np.max(np.abs(up - direct)) < 1e-14
    assert np.max(np.abs(down - up - g)) < 1e-14


def test_deformed_path_beyond_the_shift_sees_no_jump():
    deep = np.array([1.2 + 1j * (LINE.height - 0.8)])
    down = ch_deformed(_model_g, DOM, LINE, deep, CFG, direction="down")
    assert abs(down[0] - ch_line_integral(_model_g, LINE, deep, CFG)[0]) < 1e-14


def test_deformed_matches_direct_far_from_the_line():
    far = np.array([4.0 + 1j * (LINE.height + 2.5), 7.0 + 1j * (LINE.height - 3.0)])
    diff = ch_deformed(_model_g, DOM, LINE, far, CFG) - \
        ch_line_integral(_model_g, LINE, far, CFG)
    assert np.max(np.abs(diff)) < 1e-14


def test_on_line_values_match_one_sided_limit():
    geom = line_geometry(DOM, "infty", 0, CFG)
    onl = ch_on_line(geom, _model_g(geom.main.w), +1)
    mask = geom.main.w.real > geom.x_start + 2 * CFG.eps
    lim = ch_deformed(_model_g, DOM, LINE, geom.main.w[mask], CFG, direction="down")
    assert np.max(np.abs(onl[mask] - lim)) < 1e-6


def test_direct_transform_refuses_near_targets():
    with pytest.raises(TooCloseToLineError):
        ch_line_integral(_model_g, LINE, 2.0 + 1j * (LINE.height + 0.05), CFG)


def test_deformed_guards():
    start = LINE.x_start + 1j * LINE.height
    with pytest.raises(SingularPointError):
        ch_deformed(_model_g, DOM, LINE, start + 0.01 - 0.02j, CFG)
    with pytest.raises(TooCloseToLineError):
        ch_deformed(_model_g, DOM, LINE, 2.0 + 1j * (LINE.height - 2 * CFG.eps), CFG,
                    direction="down")


def test_config_validation():
    with pytest.raises(ValidationError):
        CHConfig(eps=0.9)
    with pytest.raises(ValidationError):
        CHConfig(length=2.0)
    with pytest.raises(ValidationError):
        CocycleField(J=1, evaluators={("weird", 0): _model_g})
    with pytest.raises(ValidationError):
        CocycleField(J=1, evaluators={("zero", 3): _model_g})
    with pytest.raises(ValidationError):
        CocycleField(J=1, evaluators={("zero", 0): 1.0})


def _atlas():
    coc = CocycleField(J=1, evaluators={("infty", 0): _model_g})
    return realize_cocycle(coc, DOM, CFG)


def test_atlas_reproduces_the_gluing_field():
    atlas = _atlas()
    xs = np.linspace(LINE.x_start + 0.7, LINE.x_start + 4.0, 9)
    res = atlas.gluing_residual("infty", 0, xs + 1j * LINE.height)
    assert np.max(np.abs(res)) < 1e-12


def test_atlas_inactive_strip_residual_vanishes():
    atlas = _atlas()
    xs = np.linspace(LINE.x_start + 0.7, LINE.x_start + 4.0, 9)
    res = atlas.gluing_residual("zero", 1, xs + 1j * np.pi / 2)
    assert np.max(np.abs(res)) == 0.0


def test_atlas_corrections_decay_like_one_over_zeta():
    atlas = _atlas()
    ray = np.linspace(6.0, 20.0, 8)
    scaled = np.abs(atlas.value(("plus", 0), ray)) * ray
    assert np.max(scaled) < 1e-3
    assert np.max(scaled) / np.min(scaled) < 1.1


def test_asymptotic_coeffs_match_the_far_field():
    atlas = _atlas()
    a = asymptotic_coeffs(atlas, order=3)
    ray = np.linspace(6.0, 20.0, 8)
    vals = atlas.value(("plus", 0), ray)
    rem = vals - a[0] / ray - a[1] / ray ** 2 - a[2] / ray ** 3
    assert np.max(np.abs(rem) * ray ** 4) < 0.05
    with pytest.raises(ValidationError):
        asymptotic_coeffs(atlas, order=CFG.max_moment_order + 1)


def test_atlas_rejects_unknown_petal():
    with pytest.raises(ValidationError):
        _atlas().value(("plus", 5), 3.0)


def test_node_doubling_is_consistent():
    zeta = 2.0 + 1j * (LINE.height + 1.0)
    v32 = ch_line_integral(_model_g, LINE, zeta, CFG)
    v64 = ch_line_integral(_model_g, LINE, zeta,
                           CHConfig(J=1, eps=0.15, nodes_per_unit=64))
    assert abs(v32 - v64) < 1e-13


def test_flatness_certificate_and_tail():
    coc = CocycleField(J=1, evaluators={("infty", 0): _model_g})
    cert = coc.verify_flatness(DOM)
    assert cert.m_fit > 0.9
    t1, t2, t3 = (tail_estimate(cert, x, CFG.eps) for x in (1.0, 2.0, 3.0))
    assert t1 > t2 > t3
    # at the working truncation the certified tail is far below tolerance
    atlas = realize_cocycle(coc, DOM, CFG, flatness=cert)
    assert atlas.tail_bound <= CFG.tail_tol


def test_short_truncation_fails_the_tail_gate():
    from parahorn.asymptotics import FlatnessCertificate

    cert = FlatnessCertificate(m_fit=0.05, m_required=1.0, M=1.0, C=1.0,
                               passed=True, n_samples=10, max_residual=0.0)
    coc = CocycleField(J=1, evaluators={("infty", 0): _model_g})
    with pytest.raises(ValidationError):
        realize_cocycle(coc, DOM, CHConfig(J=1, eps=0.15, length=3.0), flatness=cert)


def test_region_classification():
    p = PetalId(0, "plus")
    assert region_classify(3.0 + 0.1j, p) == (1, ("zero", 1))
    assert region_classify(3.0 - 1.5j, p) == (3, ("infty", 0))
    assert region_classify(3.0 + 3.0j, p) == (2, ("zero", 1))
    # equidistant point resolves to the upper line
    assert region_classify(3.0 + 0.0j, p) == (1, ("zero", 1))


def test_window_enumeration():
    assert len(window_petals(2)) == 11
    assert len(window_lines(2)) == 10
    assert petal_lines(PetalId(0, "plus")) == [("infty", 0), ("zero", 1)]
    assert petal_lines(PetalId(0, "minus")) == [("zero", 0), ("infty", 0)]


def test_export_atlas_csv(tmp_path):
    atlas = _atlas()
    path = tmp_path / "atlas.csv"
    n = export_atlas_csv(atlas, str(path), n_re=6, n_im=3)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["re_zeta", "im_zeta", "petal_j", "petal_sign",
                       "re_R", "im_R", "region"]
    assert len(rows) - 1 == n == len(window_petals(CFG.J)) * 3 * 6
    float(rows[1][0]), float(rows[1][4])  # parses
