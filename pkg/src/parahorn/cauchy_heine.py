"""Cauchy-type corrections on half-lines: quadrature, branches, petal sums.

The correction attached to a petal is a superposition of Cauchy transforms
of the gluing fields along the zero/infty half-lines,

    R(zeta) = - sum over lines of (1/2 pi i) INT G(w) / (w - zeta) dw,

where each term carries the branch selected by the petal: a term whose line
lies below the petal center is continued from above, one whose line lies
above is continued from below.  Crossing a line then switches the term by
+/- G, which is exactly the jump the gluing identities require, while R
itself stays analytic across the lines interior to its own petal.

Numerically every half-line is truncated at a configured length (the fields
decay double-exponentially; a flatness certificate converts the truncation
into a certified tail bound) and carries Gauss-Legendre panels graded toward
the start point on the domain boundary.  Evaluation close to a line routes
through a deformed path -- the line shifted by 2*eps plus an arc along the
actual domain boundary -- which realizes the one-sided limit; values exactly
on a line at its own quadrature nodes use the principal value plus half-jump
instead.  Near a line's start point no route is reliable (the correction has
a logarithmic singularity there), and evaluation raises SingularPointError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .surface import DomainSpec, HalfLine, LogPoint, PetalId, central_line, line_height
from .util import (
    SingularPointError,
    TooCloseToLineError,
    ValidationError,
    _leggauss,
    as_complex_array,
    cheb_grid,
    graded_edges,
    panel_node_count,
    segment_nodes,
    write_csv,
)

_2PII = 2j * math.pi


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class CHConfig:
    """Quadrature layout for the half-line transforms.

    Attributes:
        length: truncation length L of every half-line.
        nodes_per_unit: Gauss-Legendre nodes per unit of line away from the
            graded start region.
        eps: half-width of the near-line lens that is routed through the
            deformed path, and (halved) the exclusion radius around the
            paths themselves.  Must stay below pi/4 so the shifted lines
            keep clear of the neighboring strips.
        J: half-width of the default line window ``|j| <= J``.
        tail_tol: largest acceptable certified truncation tail.
        arc_nodes: Gauss-Legendre order on each boundary-arc panel.
        max_moment_order: largest power served by :func:`asymptotic_coeffs`.
    """

    length: float = 25.0
    nodes_per_unit: int = 32
    eps: float = 0.4
    J: int = 2
    tail_tol: float = 1e-9
    arc_nodes: int = 24
    max_moment_order: int = 6

    def __post_init__(self):
        if not 0.0 < self.eps < math.pi / 4:
            raise ValidationError(f"eps must lie in (0, pi/4), got {self.eps}")
        if self.length < 3.0:
            raise ValidationError(
                f"line length must be at least 3 to hold the graded panels, got {self.length}"
            )
        if self.nodes_per_unit < 8:
            raise ValidationError(f"need >= 8 nodes per unit, got {self.nodes_per_unit}")
        if self.J < 0:
            raise ValidationError(f"window half-width J must be >= 0, got {self.J}")
        if self.arc_nodes < 4:
            raise ValidationError(f"arc panels need >= 4 nodes, got {self.arc_nodes}")


# ---------------------------------------------------------------------------
# gluing fields


@dataclass
class CocycleField:
    """The gluing fields G on the window's half-lines.

    ``evaluators`` maps ``(kind, j)`` -- ``kind`` in ``{"zero", "infty"}``,
    ``|j| <= J`` -- to a vectorized callable returning G at points of the
    corresponding strip.  Missing entries are identically zero, so a single
    dict entry describes a single-mode field.
    """

    J: int
    evaluators: dict

    def __post_init__(self):
        if self.J < 0:
            raise ValidationError(f"window half-width J must be >= 0, got {self.J}")
        for key, ev in self.evaluators.items():
            try:
                kind, j = key
            except (TypeError, ValueError):
                raise ValidationError(f"evaluator keys must be (kind, j), got {key!r}")
            if kind not in ("zero", "infty"):
                raise ValidationError(f"line kind must be zero/infty, got {kind!r}")
            if abs(int(j)) > self.J:
                raise ValidationError(f"line index {j} outside the window |j| <= {self.J}")
            if not callable(ev):
                raise ValidationError(f"evaluator for {key} is not callable")

    def evaluator(self, kind: str, j: int):
        return self.evaluators.get((kind, int(j)))

    def active_lines(self) -> list:
        return sorted(self.evaluators.keys())

    def verify_flatness(self, domain: DomainSpec, m_order: float = 1.0,
                        span: float = 6.0, n: int = 120):
        """Sample |G| along every active line and fit the flatness envelope.

        Returns the :class:`~parahorn.asymptotics.FlatnessCertificate` for the
        pooled samples; its constants feed :func:`tail_estimate`.
        """
        from .asymptotics import flatness_certificate

        if not self.evaluators:
            raise ValidationError("flatness check needs at least one active line")
        ws, gs = [], []
        for kind, j in self.active_lines():
            line = central_line(domain, PetalId(j, kind))
            x = np.linspace(line.x_start + 0.05, line.x_start + span, n)
            w = line.point(x)
            g = np.abs(np.asarray(self.evaluators[(kind, j)](w), dtype=complex))
            ws.append(w)
            gs.append(g)
        return flatness_certificate(np.concatenate(ws), np.concatenate(gs), m_order)


def tail_estimate(cert, x_end: float, eps: float) -> float:
    """Certified bound on one neglected half-line tail.

    For ``|G(x)| <= C exp(-M exp(m x))`` beyond ``x_end`` and targets at
    least ``eps/2`` from the line, the kernel bound gives

        tail <= C exp(-M e^(m x_end)) / (pi eps m M e^(m x_end)).
    """
    if cert.C == 0.0:
        return 0.0
    m = min(cert.m_fit, cert.m_required)
    if not (m > 0 and cert.M > 0):
        return math.inf
    inner = cert.M * math.exp(m * x_end)
    if inner > 700.0:
        return 0.0
    return cert.C * math.exp(-inner) / (math.pi * eps * m * inner)


# ---------------------------------------------------------------------------
# node layout


@dataclass(frozen=True)
class _Block:
    """Quadrature nodes with oriented complex weights along one path piece."""

    w: np.ndarray
    cw: np.ndarray


_EMPTY = _Block(np.empty(0, dtype=complex), np.empty(0, dtype=complex))


def _segment_block(p0: complex, p1: complex, cfg: CHConfig,
                   refine_start: bool = False) -> _Block:
    """Composite Gauss-Legendre panels on [p0, p1], graded toward p0.

    ``refine_start`` prepends geometrically shrinking panels (down to
    ``eps * 2e-3``) so that Cauchy kernels with poles very near the start
    point stay resolved.
    """
    length = abs(p1 - p0)
    u = (p1 - p0) / length
    edges = [0.0]
    counts = []
    if refine_start:
        w = cfg.eps * 2e-3
        while w < 0.124 and edges[-1] + w < length:
            edges.append(edges[-1] + w)
            counts.append(8)
            w *= 2.0
    start = edges[-1]
    for width in np.diff(graded_edges(length - start)):
        edges.append(edges[-1] + width)
        counts.append(panel_node_count(width, cfg.nodes_per_unit))
    ws, cws = [], []
    for a, b, n in zip(edges[:-1], edges[1:], counts):
        wq, cw = segment_nodes(p0 + a * u, p0 + b * u, n)
        ws.append(wq)
        cws.append(cw)
    return _Block(np.concatenate(ws), np.concatenate(cws))


def _natural(domain: DomainSpec) -> DomainSpec:
    return replace(domain, re_floor=0.0) if domain.re_floor > 0.0 else domain


def _arc_kinks(domain: DomainSpec, lo: float, hi: float) -> list:
    """Heights strictly inside (lo, hi) where the left boundary has a corner."""
    out = []
    if lo < 0.0 < hi:
        out.append(0.0)
    if domain.kind == "linear":
        if domain.re_floor > 0.0:
            y = domain.a * domain.re_floor - domain.b
            if y > 0.0:
                for cand in (y, -y):
                    if lo < cand < hi:
                        out.append(cand)
    else:
        junction = (domain._phi(1j * domain.R)).imag
        for cand in (junction, -junction):
            if lo < cand < hi:
                out.append(cand)
        if domain.re_floor > 0.0:
            nat = _natural(domain)
            f = lambda y: nat.boundary_x(y) - domain.re_floor
            if f(lo) * f(hi) < 0:
                out.append(brentq(f, lo, hi, xtol=1e-12))
    return sorted(set(out))


def _boundary_slope(domain: DomainSpec, y: float) -> float:
    """dx/dy of the left boundary at height y (smooth pieces only)."""
    nat = _natural(domain)
    if domain.re_floor > 0.0 and nat.boundary_x(y) <= domain.re_floor + 1e-12:
        return 0.0
    if domain.kind == "linear":
        return math.copysign(1.0, y) / domain.a if y != 0.0 else 0.0
    d = 1e-5
    return (nat.boundary_x(y + d) - nat.boundary_x(y - d)) / (2.0 * d)


def _arc_block(domain: DomainSpec, h0: float, h1: float, cfg: CHConfig) -> _Block:
    """Oriented quadrature along the left boundary from height h0 to h1."""
    if h0 == h1:
        return _EMPTY
    lo, hi = min(h0, h1), max(h0, h1)
    stops = _arc_kinks(domain, lo, hi)
    pts = [h0] + (sorted(stops, reverse=h1 < h0)) + [h1]
    xg, wg = _leggauss(cfg.arc_nodes)
    ws, cws = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        for aa, bb in ((a, 0.5 * (a + b)), (0.5 * (a + b), b)):
            mid, half = 0.5 * (aa + bb), 0.5 * (bb - aa)
            ys = mid + half * xg
            xs = np.array([domain.boundary_x(v) for v in ys])
            slopes = np.array([_boundary_slope(domain, v) for v in ys])
            ws.append(xs + 1j * ys)
            cws.append((slopes + 1j) * (half * wg))
    return _Block(np.concatenate(ws), np.concatenate(cws))


def _vertical_block(p0: complex, p1: complex, cfg: CHConfig) -> _Block:
    """Two-panel connector used when a line starts off the domain boundary."""
    mid = 0.5 * (p0 + p1)
    w0, c0 = segment_nodes(p0, mid, cfg.arc_nodes)
    w1, c1 = segment_nodes(mid, p1, cfg.arc_nodes)
    return _Block(np.concatenate([w0, w1]), np.concatenate([c0, c1]))


@dataclass(frozen=True)
class LineGeometry:
    """Static node layout of one half-line and its deformation companions.

    ``main`` runs along the line itself; ``down``/``up`` along the lines
    shifted by -2*eps/+2*eps starting on the domain boundary; the arcs trace
    the boundary from the line's start point to the shifted start points, so
    that arc followed by shifted line is the deformed evaluation path.
    """

    kind: str
    j: int
    line: HalfLine
    x_end: float
    main: _Block
    down: _Block
    down_arc: _Block
    up: _Block
    up_arc: _Block

    @property
    def height(self) -> float:
        return self.line.height

    @property
    def x_start(self) -> float:
        return self.line.x_start

    def block(self, name: str) -> _Block:
        return getattr(self, name)

    def shift_blocks(self, sigma: int) -> tuple:
        """(arc, shifted-line) names for the branch of sign sigma."""
        return ("down_arc", "down") if sigma > 0 else ("up_arc", "up")


def geometry_for_line(domain: DomainSpec, line: HalfLine, cfg: CHConfig) -> LineGeometry:
    """Build the node layout for an arbitrary half-line inside the domain."""
    h, x0 = line.height, line.x_start
    x1 = x0 + cfg.length
    main = _segment_block(x0 + 1j * h, x1 + 1j * h, cfg, refine_start=True)
    on_boundary = abs(domain.boundary_x(h) - x0) <= 1e-9
    parts = {}
    for name, hs in (("down", h - 2.0 * cfg.eps), ("up", h + 2.0 * cfg.eps)):
        if on_boundary:
            xs = domain.boundary_x(hs)
            arc = _arc_block(domain, h, hs, cfg)
        else:
            xs = x0
            arc = _vertical_block(x0 + 1j * h, x0 + 1j * hs, cfg)
        parts[name] = _segment_block(xs + 1j * hs, x1 + 1j * hs, cfg)
        parts[name + "_arc"] = arc
    return LineGeometry(line.kind, line.j, line, x1, main,
                        parts["down"], parts["down_arc"],
                        parts["up"], parts["up_arc"])


def line_geometry(domain: DomainSpec, kind: str, j: int, cfg: CHConfig) -> LineGeometry:
    """Node layout for the central half-line of the (kind, j) strip."""
    return geometry_for_line(domain, central_line(domain, PetalId(j, kind)), cfg)


# ---------------------------------------------------------------------------
# elementary transforms


def _cauchy_sum(block: _Block, g: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """(1/2 pi i) sum of cw*g/(w - t), chunked to bound the outer product."""
    if block.w.size == 0 or targets.size == 0:
        return np.zeros(targets.shape, dtype=complex)
    coef = block.cw * g
    out = np.empty(targets.shape, dtype=complex)
    chunk = max(1, 4_000_000 // block.w.size)
    for s in range(0, targets.size, chunk):
        t = targets[s : s + chunk]
        out[s : s + chunk] = (coef[None, :] / (block.w[None, :] - t[:, None])).sum(axis=1)
    return out / _2PII


def ch_line_integral(G, line: HalfLine, p, cfg: CHConfig | None = None):
    """Direct Cauchy transform ``(1/2 pi i) INT G(w)/(w - zeta) dw``.

    The integral runs along the half-line truncated at ``cfg.length``.
    Points closer than ``eps/2`` to the line (as a ray) are refused with
    TooCloseToLineError; route those through :func:`ch_deformed`.
    """
    cfg = cfg or CHConfig()
    arr, scalar = as_complex_array(p)
    dist = line.distance(arr)
    if np.any(np.atleast_1d(dist) < cfg.eps / 2):
        raise TooCloseToLineError(
            f"target within {cfg.eps / 2:g} of the line at height {line.height:g}; "
            "use ch_deformed"
        )
    h = line.height
    block = _segment_block(line.x_start + 1j * h, line.x_start + cfg.length + 1j * h,
                           cfg, refine_start=True)
    g = np.asarray(G(block.w), dtype=complex)
    out = _cauchy_sum(block, g, arr)
    return complex(out[0]) if scalar else out


def _path_distance(pts: np.ndarray, blocks: list, extra: complex | None = None) -> np.ndarray:
    """Minimum distance from each point to the node sets (plus one anchor)."""
    dmin = np.full(pts.shape, np.inf)
    for block in blocks:
        if block.w.size:
            dmin = np.minimum(dmin, np.min(np.abs(pts[:, None] - block.w[None, :]), axis=1))
    if extra is not None:
        dmin = np.minimum(dmin, np.abs(pts - extra))
    return dmin


def ch_deformed(G, domain: DomainSpec, line: HalfLine, p,
                cfg: CHConfig | None = None, direction: str = "auto"):
    """Cauchy transform along the deformed path: boundary arc + shifted line.

    ``direction="down"`` shifts the line by ``-2*eps`` and returns the
    continuation of the transform from the upper side (so at points below
    the line it equals the direct value plus G); ``"up"`` is the mirror
    continuation from below.  ``"auto"`` shifts away from each evaluation
    point, which reproduces the direct value wherever the direct quadrature
    is healthy and the correct one-sided limit on the line itself.

    Points within ``eps/2`` of the deformed path are refused: near the
    shifted line with TooCloseToLineError, near the connecting arc (i.e.
    near the line's start point) with SingularPointError.
    """
    cfg = cfg or CHConfig()
    if direction not in ("auto", "down", "up"):
        raise ValidationError(f"direction must be auto/down/up, got {direction!r}")
    arr, scalar = as_complex_array(p)
    geom = geometry_for_line(domain, line, cfg)
    out = np.zeros(arr.shape, dtype=complex)
    d = arr.imag - line.height
    masks = {"down": d >= 0.0, "up": d < 0.0} if direction == "auto" else \
        {direction: np.ones(arr.shape, dtype=bool)}
    for name, mask in masks.items():
        if not np.any(mask):
            continue
        pts = arr[mask]
        arc_name, shift_name = ("down_arc", "down") if name == "down" else ("up_arc", "up")
        arc, shifted = geom.block(arc_name), geom.block(shift_name)
        darc = _path_distance(pts, [arc], extra=line.x_start + 1j * line.height)
        if np.any(darc < cfg.eps / 2):
            raise SingularPointError(
                f"target within {cfg.eps / 2:g} of the start of the line at "
                f"height {line.height:g}"
            )
        dshift = _path_distance(pts, [shifted])
        if np.any(dshift < cfg.eps / 2):
            raise TooCloseToLineError(
                f"target within {cfg.eps / 2:g} of the {name}-shifted line; "
                "use the opposite direction"
            )
        g_arc = np.asarray(G(arc.w), dtype=complex)
        g_shift = np.asarray(G(shifted.w), dtype=complex)
        out[mask] = _cauchy_sum(arc, g_arc, pts) + _cauchy_sum(shifted, g_shift, pts)
    return complex(out[0]) if scalar else out


def ch_on_line(geom: LineGeometry, g_main: np.ndarray, sigma: int) -> np.ndarray:
    """Branch boundary values at the line's own quadrature nodes.

    Returns the one-sided limit (from above for ``sigma=+1``, from below for
    ``sigma=-1``) of the direct transform at every main node: the principal
    value -- computed with the smooth-kernel subtraction plus the exact log
    term -- plus ``sigma * G/2``.
    """
    w, cw = geom.main.w, geom.main.cw
    g = np.asarray(g_main, dtype=complex)
    x = w.real
    diff = w[None, :] - w[:, None]
    np.fill_diagonal(diff, 1.0)
    kern = cw[None, :] / diff
    np.fill_diagonal(kern, 0.0)
    pv = (kern * (g[None, :] - g[:, None])).sum(axis=1)
    pv = pv + cw * np.gradient(g, x)
    pv = pv + g * np.log((geom.x_end - x) / (x - geom.x_start))
    return pv / _2PII + 0.5 * sigma * g


# ---------------------------------------------------------------------------
# petal sums


def petal_lines(petal: PetalId) -> list:
    """The critical lines interior to a petal (or the strip's own line)."""
    if petal.kind == "plus":
        return [("infty", petal.j), ("zero", petal.j + 1)]
    if petal.kind == "minus":
        return [("zero", petal.j), ("infty", petal.j)]
    return [(petal.kind, petal.j)]


def window_lines(J: int) -> list:
    return [(kind, j) for j in range(-J, J + 1) for kind in ("zero", "infty")]


def window_petals(J: int) -> list:
    """All petals on which a window of half-width J defines corrections."""
    out = [PetalId(j, "plus") for j in range(-J - 1, J + 1)]
    out += [PetalId(j, "minus") for j in range(-J, J + 1)]
    return out


def region_classify(p, petal: PetalId, eps: float = 0.4) -> tuple:
    """Classify a point against the nearest critical line of its petal.

    Returns ``(region, (kind, j))`` with region 3 within ``eps`` of the
    line, 1 strictly below it, 2 strictly above it.  Ties between the two
    interior lines resolve to the upper one.
    """
    z = complex(p.zeta) if isinstance(p, LogPoint) else complex(p)
    cands = []
    for kind, j in petal_lines(petal):
        h = line_height(kind, j)
        cands.append((abs(z.imag - h), -h, (kind, j)))
    dist, neg_h, ident = min(cands)
    if dist <= eps:
        return 3, ident
    return (1 if z.imag < -neg_h else 2), ident


def petal_sum(terms, targets: np.ndarray, block_g, point_g, cfg: CHConfig) -> np.ndarray:
    """Branch-routed correction at ``targets`` for one petal.

    ``terms`` is a list of ``(LineGeometry, sigma)`` pairs; ``block_g(geom,
    name)`` returns the gluing field at a node block, ``point_g(geom, pts)``
    at arbitrary points (used for the branch corrections on the far side of
    a line).  Routing per line: direct quadrature away from the line, direct
    plus ``sigma*G`` beyond it, the deformed path inside the ``|d| <= eps``
    lens.  The global minus sign of the correction is applied here.
    """
    arr = np.asarray(targets, dtype=complex)
    out = np.zeros(arr.shape, dtype=complex)
    for geom, sigma in terms:
        d = arr.imag - geom.height
        sd = sigma * d
        lens = np.abs(d) <= cfg.eps
        far = ~lens
        if np.any(far):
            pts = arr[far]
            vals = _cauchy_sum(geom.main, block_g(geom, "main"), pts)
            out[far] += vals
        beyond = sd < -cfg.eps
        if np.any(beyond):
            out[beyond] += sigma * np.asarray(point_g(geom, arr[beyond]), dtype=complex)
        if np.any(lens):
            pts = arr[lens]
            arc_name, shift_name = geom.shift_blocks(sigma)
            arc, shifted = geom.block(arc_name), geom.block(shift_name)
            start = geom.x_start + 1j * geom.height
            dmin = _path_distance(pts, [arc], extra=start)
            if np.any(dmin < cfg.eps / 2):
                raise SingularPointError(
                    f"evaluation within {cfg.eps / 2:g} of the start of the "
                    f"{geom.kind}({geom.j}) line at height {geom.height:g}"
                )
            out[lens] += _cauchy_sum(arc, block_g(geom, arc_name), pts)
            out[lens] += _cauchy_sum(shifted, block_g(geom, shift_name), pts)
    return -out


class PetalFunctionAtlas:
    """Corrections R on every petal of a window, realized from a cocycle.

    Built by :func:`realize_cocycle`.  The atlas owns the static line
    geometry, caches the gluing-field values on the node blocks, and routes
    every evaluation through the branch logic of :func:`petal_sum`.
    """

    def __init__(self, domain: DomainSpec, cfg: CHConfig, cocycle: CocycleField,
                 flatness=None):
        if cocycle.J > cfg.J:
            raise ValidationError(
                f"cocycle window J={cocycle.J} exceeds the geometric window J={cfg.J}"
            )
        self.domain = domain
        self.cfg = cfg
        self.cocycle = cocycle
        self.flatness = flatness
        self.geoms = {}
        for kind, j in cocycle.active_lines():
            self.geoms[(kind, j)] = line_geometry(domain, kind, j, cfg)
        self._terms = {}
        for petal in window_petals(cfg.J):
            terms = []
            for key, geom in sorted(self.geoms.items()):
                sigma = 1 if petal.center > geom.height else -1
                terms.append((geom, sigma))
            self._terms[(petal.kind, petal.j)] = terms
        self._gcache = {}
        self.tail_bound = None
        if flatness is not None:
            x_end = max((g.x_end for g in self.geoms.values()), default=0.0)
            self.tail_bound = tail_estimate(flatness, x_end, cfg.eps)

    # -- field access --------------------------------------------------------

    def _block_g(self, geom: LineGeometry, name: str) -> np.ndarray:
        key = (geom.kind, geom.j, name)
        if key not in self._gcache:
            ev = self.cocycle.evaluator(geom.kind, geom.j)
            block = geom.block(name)
            self._gcache[key] = np.asarray(ev(block.w), dtype=complex)
        return self._gcache[key]

    def _point_g(self, geom: LineGeometry, pts: np.ndarray) -> np.ndarray:
        ev = self.cocycle.evaluator(geom.kind, geom.j)
        return np.asarray(ev(pts), dtype=complex)

    # -- evaluation ----------------------------------------------------------

    def petal_ids(self) -> list:
        return window_petals(self.cfg.J)

    def value(self, petal, p):
        """R on the given plus/minus petal at p (scalar or array)."""
        if isinstance(petal, PetalId):
            key = (petal.kind, petal.j)
        else:
            kind, j = petal
            key = (kind, int(j))
        if key not in self._terms:
            raise ValidationError(f"no petal {key} in this atlas (window J={self.cfg.J})")
        arr, scalar = as_complex_array(p)
        out = petal_sum(self._terms[key], arr, self._block_g, self._point_g, self.cfg)
        return complex(out[0]) if scalar else out

    def gluing_residual(self, kind: str, j: int, p):
        """Defect of the jump identity on the (kind, j) strip.

        zero strip:  R_plus^{j-1} - R_minus^j - G_zero^j
        infty strip: R_minus^j - R_plus^j - G_infty^j
        """
        arr, scalar = as_complex_array(p)
        ev = self.cocycle.evaluator(kind, j)
        g = np.asarray(ev(arr), dtype=complex) if ev is not None else np.zeros(arr.shape, complex)
        if kind == "zero":
            out = self.value(("plus", j - 1), arr) - self.value(("minus", j), arr) - g
        elif kind == "infty":
            out = self.value(("minus", j), arr) - self.value(("plus", j), arr) - g
        else:
            raise ValidationError(f"jump identities live on zero/infty strips, not {kind!r}")
        out = np.atleast_1d(out)
        return complex(out[0]) if scalar else out

    def moments(self, kind: str, j: int, order: int) -> np.ndarray:
        """INT G(w) w^p dw over the (kind, j) line for p = 0..order."""
        geom = self.geoms.get((kind, int(j)))
        if geom is None:
            return np.zeros(order + 1, dtype=complex)
        g = self._block_g(geom, "main")
        coef = geom.main.cw * g
        return np.array([np.sum(coef * geom.main.w ** p) for p in range(order + 1)])


def realize_cocycle(cocycle: CocycleField, domain: DomainSpec,
                    cfg: CHConfig | None = None, flatness=None) -> PetalFunctionAtlas:
    """Realize a cocycle field as a petal-function atlas.

    The jump identities hold by construction: the difference of the two
    petal corrections across a strip reproduces the strip's gluing field up
    to quadrature error.  When a flatness certificate is supplied the
    truncation tail is certified against ``cfg.tail_tol``.
    """
    cfg = cfg or CHConfig()
    atlas = PetalFunctionAtlas(domain, cfg, cocycle, flatness=flatness)
    if atlas.tail_bound is not None and atlas.tail_bound > cfg.tail_tol:
        raise ValidationError(
            f"certified truncation tail {atlas.tail_bound:.3g} exceeds "
            f"tail_tol={cfg.tail_tol:g}; increase cfg.length"
        )
    return atlas


def asymptotic_coeffs(atlas: PetalFunctionAtlas, petal=None, order: int = 4) -> np.ndarray:
    """Coefficients a_0..a_order of the expansion R ~ sum_p a_p zeta^-(p+1).

    a_p = (1/2 pi i) * sum over lines of INT G(w) w^p dw.  The integrals run
    over the same truncated lines for every petal, so the coefficients do
    not depend on which petal the expansion is read on; ``petal`` is
    accepted for interface symmetry and only validated.
    """
    if order < 0 or order > atlas.cfg.max_moment_order:
        raise ValidationError(
            f"order must lie in [0, {atlas.cfg.max_moment_order}], got {order}"
        )
    if petal is not None and isinstance(petal, PetalId) and petal.kind not in ("plus", "minus"):
        raise ValidationError("expansions are read on plus/minus petals")
    total = np.zeros(order + 1, dtype=complex)
    for kind, j in atlas.cocycle.active_lines():
        total += atlas.moments(kind, j, order)
    return total / _2PII


def export_atlas_csv(atlas: PetalFunctionAtlas, path: str, n_re: int = 24,
                     n_im: int = 7, margin: float = 0.35, span: float = 8.0) -> int:
    """Sample every petal on a grid and write rows to a CSV file.

    Columns: re_zeta, im_zeta, petal_j, petal_sign, re_R, im_R, region.
    Returns the number of rows written.
    """
    rows = []
    for petal in atlas.petal_ids():
        hw = petal.halfwidth - margin
        edges = (petal.center - hw, petal.center + hw)
        x_need = max(atlas.domain.boundary_x(h) for h in edges)
        for kind, j in petal_lines(petal):
            if (kind, j) in atlas.geoms:
                x_need = max(x_need, atlas.geoms[(kind, j)].x_start)
        x_lo = x_need + 0.5
        x_hi = x_lo + min(span, atlas.cfg.length - 2.0)
        sign = "+" if petal.kind == "plus" else "-"
        for y in np.linspace(edges[0], edges[1], n_im):
            zs = cheb_grid(x_lo, x_hi, n_re) + 1j * y
            vals = atlas.value(petal, zs)
            for z, v in zip(zs, vals):
                region, _ = region_classify(z, petal, atlas.cfg.eps)
                rows.append([float(z.real), float(z.imag), petal.j, sign,
                             float(v.real), float(v.imag), region])
    write_csv(path, ["re_zeta", "im_zeta", "petal_j", "petal_sign",
                     "re_R", "im_R", "region"], rows)
    return len(rows)
