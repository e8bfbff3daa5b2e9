import math

import numpy as np
import pytest

from parahorn import (
    DomainSpec,
    LogPoint,
    PetalId,
    ValidationError,
    central_line,
    ell,
    from_z,
    parse_domain,
    petal_contains,
    to_z,
)
from parahorn.surface import HalfLine, line_height

PI = math.pi


# ---------------------------------------------------------------------------
# chart maps


def test_to_z_examples():
    assert to_z(LogPoint(math.log(10))) == pytest.approx(0.1)
    assert to_z(1 + 1j * PI) == pytest.approx(-math.exp(-1))


def test_ell():
    assert ell(2.0 + 0j) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        ell(0j)


def test_chart_round_trips():
    for z in [0.1, -0.02 + 0.03j, 1e-8j, -5.0]:
        assert to_z(from_z(z)) == pytest.approx(z, rel=1e-14)
    # principal strip round trip the other way
    for zeta in [3.0, 2.0 + 3.0j, 10.0 - 3.1j]:
        assert complex(from_z(to_z(zeta))) == pytest.approx(zeta, rel=1e-14)


# ---------------------------------------------------------------------------
# linear domains


def test_linear_membership():
    d = DomainSpec.linear(1, 0)
    assert d.contains(LogPoint(10 + 0j))
    assert not d.contains(1 + 2j)


def test_linear_membership_offset():
    d = DomainSpec.linear(1, 1)
    assert d.contains(3 + 1.5j)
    assert not d.contains(3 + 2.5j)
    assert not d.contains(0.5 + 0j)  # left of the vertex


def test_re_floor_cuts():
    d = DomainSpec.linear(1, 0).with_floor(5.0)
    assert not d.contains(4 + 0j)
    assert d.contains(6 + 0j)


def test_domain_validation():
    with pytest.raises(ValidationError):
        DomainSpec.linear(-1, 0)
    with pytest.raises(ValidationError):
        DomainSpec.quadratic(0, 1)
    with pytest.raises(ValidationError):
        DomainSpec(kind="octagonal")


# ---------------------------------------------------------------------------
# quadratic domains


def _phi(C, xi):
    return xi + C * np.sqrt(xi + 1)


def test_quadratic_membership():
    d = DomainSpec.quadratic(1, 1)
    inside = _phi(1, 2.0) + 0.5
    assert d.contains(inside)
    # pre-image inside the excluded disc
    assert not d.contains(_phi(1, 0.5))
    # pre-image in the left half-plane
    assert not d.contains(_phi(1, -0.5 + 3j))


def test_quadratic_membership_off_axis():
    d = DomainSpec.quadratic(0.8, 2.0)
    for xi in [3 + 4j, 10 - 7j, 0.5 + 2.5j]:
        assert d.contains(_phi(0.8, xi))


def test_quadratic_boundary_x_matches_membership_bisection():
    d = DomainSpec.quadratic(1.2, 1.5)
    for h in [0.0, PI / 2, 3 * PI / 2, -5 * PI / 2, 9.0]:
        x0 = d.boundary_x(h)
        assert d.contains((x0 + 1e-6) + 1j * h)
        assert not d.contains((x0 - 1e-6) + 1j * h)


def test_linear_boundary_x():
    d = DomainSpec.linear(2, 1)
    assert d.boundary_x(PI / 2) == pytest.approx((PI / 2 + 1) / 2)
    assert d.boundary_x(-PI / 2) == pytest.approx((PI / 2 + 1) / 2)


# ---------------------------------------------------------------------------
# petals


def test_petal_strip_centers():
    assert PetalId(0, "plus").center == 0.0
    assert PetalId(1, "plus").center == pytest.approx(2 * PI)
    assert PetalId(0, "minus").center == pytest.approx(-PI)
    assert PetalId(1, "zero").center == pytest.approx(PI / 2)
    assert PetalId(1, "infty").center == pytest.approx(3 * PI / 2)
    assert PetalId(0, "zero").center == pytest.approx(-3 * PI / 2)


def test_petal_contains_examples():
    d = DomainSpec.linear(1, 0)
    assert petal_contains(d, PetalId(0, "plus"), 5 + 0j)
    assert not petal_contains(d, PetalId(0, "plus"), 5 + 1j * PI, margin=0.1)
    assert petal_contains(d, PetalId(1, "zero"), 5 + 1j * PI / 2)


def test_intersection_strips_are_pairwise_intersections():
    # zero strip j = plus strip (j-1) AND minus strip j, pointwise
    rng = np.random.default_rng(7)
    d = DomainSpec.linear(1, 0)
    pts = 30 + 0j + rng.uniform(-8, 8, 60) * 1j + rng.uniform(0, 5, 60)
    for j in (-1, 0, 1, 2):
        for p in pts:
            in_zero = petal_contains(d, PetalId(j, "zero"), p)
            both = petal_contains(d, PetalId(j - 1, "plus"), p) and petal_contains(
                d, PetalId(j, "minus"), p
            )
            assert in_zero == both
            in_inf = petal_contains(d, PetalId(j, "infty"), p)
            both_inf = petal_contains(d, PetalId(j, "plus"), p) and petal_contains(
                d, PetalId(j, "minus"), p
            )
            assert in_inf == both_inf


def test_strip_cover():
    # every point far enough right lies in a plus strip and a minus strip
    rng = np.random.default_rng(11)
    d = DomainSpec.linear(1, 0)
    for _ in range(50):
        p = rng.uniform(12, 25) + 1j * rng.uniform(-11, 11)
        if not d.contains(p):
            continue
        jp = round(p.imag / (2 * PI))
        jm = round((p.imag + PI) / (2 * PI))
        assert petal_contains(d, PetalId(jp, "plus"), p) or (
            abs(p.imag - (2 * jp * PI + PI)) < 1e-9
        )
        assert petal_contains(d, PetalId(jm, "minus"), p) or (
            abs(p.imag - (2 * jm * PI)) < 1e-9
        )


# ---------------------------------------------------------------------------
# central lines


def test_central_line_examples():
    d2 = DomainSpec.linear(2, 0)
    line = central_line(d2, PetalId(1, "zero"))
    assert line.height == pytest.approx(PI / 2)
    assert line.x_start == pytest.approx(PI / 4)
    assert complex(line.endpoint) == pytest.approx(PI / 4 + 1j * PI / 2)

    line = central_line(d2, PetalId(1, "infty"))
    assert line.height == pytest.approx(3 * PI / 2)
    assert line.x_start == pytest.approx(3 * PI / 4)

    line = central_line(d2, PetalId(0, "zero"))
    assert line.height == pytest.approx(-3 * PI / 2)


def test_central_line_only_for_intersection_strips():
    d = DomainSpec.linear(1, 0)
    with pytest.raises(ValidationError):
        central_line(d, PetalId(0, "plus"))
    with pytest.raises(ValidationError):
        line_height("minus", 0)


def test_x_start_monotone_in_index():
    lin = DomainSpec.linear(1.3, 0.7)
    quad = DomainSpec.quadratic(1.1, 1.0)
    for dom in (lin, quad):
        starts = [central_line(dom, PetalId(j, "zero")).x_start for j in range(-3, 5)]
        # height grows with |4j-3|; x_start must not decrease with |height|
        heights = [abs(line_height("zero", j)) for j in range(-3, 5)]
        order = np.argsort(heights)
        sorted_starts = np.asarray(starts)[order]
        assert np.all(np.diff(sorted_starts) >= -1e-12)


def test_half_line_distance():
    line = HalfLine(height=1.0, x_start=2.0, endpoint=LogPoint(2 + 1j))
    assert line.distance(5 + 1j) == pytest.approx(0.0)
    assert line.distance(5 + 2j) == pytest.approx(1.0)
    assert line.distance(1 + 1j) == pytest.approx(1.0)  # ray, not full line
    assert line.distance(2 - 0.5j) == pytest.approx(1.5)


# ---------------------------------------------------------------------------
# parsing / serialization


def test_parse_domain():
    d = parse_domain("linear:1,1")
    assert d.kind == "linear" and d.a == 1 and d.b == 1
    q = parse_domain("quadratic:0.8,2")
    assert q.kind == "quadratic" and q.C == 0.8 and q.R == 2
    with pytest.raises(ValidationError):
        parse_domain("circular:1,2")
    with pytest.raises(ValidationError):
        parse_domain("linear:1")


def test_domain_dict_round_trip():
    for d in (DomainSpec.linear(1.5, 0.25), DomainSpec.quadratic(0.9, 2.0),
              DomainSpec.linear(1, 1).with_floor(3.0)):
        assert DomainSpec.from_dict(d.to_dict()) == d
