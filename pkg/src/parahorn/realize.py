"""Realization: iterate petal corrections until the gluing data is matched.

Given a window of horn-map pairs, the target is a correction R per petal
such that the corrected coordinates ``psi = psi_nf + R`` reproduce the
prescribed gluing on every zero/infty strip:

    psi_plus^{j-1} - psi_minus^j = g_zero^j  ( exp(+2 pi i psi_plus^{j-1}) )
    psi_minus^j - psi_plus^j    = g_infty^j ( exp(-2 pi i psi_plus^j) )

The fixed point is reached by iteration: corrections from the previous step
feed the gluing-field arguments of the next.  Each step is linear in the
field, so the update is computed increment-by-increment (the new R is the
old one plus the transform of the field increment), which keeps full
relative precision even when the fields sit at the bottom of the double
range.  Convergence is measured as the sup over per-petal sample grids of
``|exp(2 pi i R_new) - exp(2 pi i R_old)|``; the contraction is geometric
once the corrections are small.

On top of the converged atlas this module recovers the germ itself -- the
unit time map of the corrected coordinate, computed in split form
``f = x0 + u`` with ``x0`` the model time-one map -- and produces the
instrument panel: cocycle residuals, Abel residuals, gluing mismatch
between neighboring petals, and the realness defect on the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import series as ps
from .cauchy_heine import (
    CHConfig,
    LineGeometry,
    _cauchy_sum,
    ch_on_line,
    line_geometry,
    window_petals,
)
from .moduli import HornMapSequence, check_radii, g_from_h
from .normal_form import FormalClass, f0_increment, psi_nf, psi_nf_prime, segment_psi_increment
from .surface import DomainSpec, PetalId
from .util import (
    ConvergenceError,
    DivergenceError,
    DomainTooLargeError,
    SingularPointError,
    ValidationError,
    as_complex_array,
    cheb_grid,
    parallel_map,
)

_2PII = 2j * math.pi
_PRUNE = 1e-200


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class IterationConfig:
    """Knobs of the realization iteration.

    max_steps/tol drive the stopping rule; ``ch`` is the quadrature layout;
    grid_* describe the per-petal sample grids (Chebyshev in Re, uniform
    rows across the central band, kept ``exclusion`` right of the domain
    boundary); max_shrink bounds how often the domain floor may be raised
    when the gluing arguments leave their discs.
    """

    max_steps: int = 25
    tol: float = 1e-8
    ch: CHConfig = field(default_factory=CHConfig)
    grid_re: int = 12
    grid_im: int = 7
    grid_span: float = 8.0
    exclusion: float = 0.5
    max_shrink: int = 10
    threads: int | None = 1

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValidationError(f"max_steps must be >= 1, got {self.max_steps}")
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.grid_re < 2 or self.grid_im < 2:
            raise ValidationError("sample grids need at least 2 points per direction")
        if not self.exclusion > 0:
            raise ValidationError(f"exclusion must be positive, got {self.exclusion}")
        if self.max_shrink < 0:
            raise ValidationError(f"max_shrink must be >= 0, got {self.max_shrink}")


# ---------------------------------------------------------------------------
# per-line bookkeeping


@dataclass
class _LineData:
    """One active gluing line: geometry, field series, exponent bookkeeping."""

    key: tuple
    geom: LineGeometry
    g_poly: np.ndarray     # power-indexed coefficients of the g-series
    s: int                 # exponent sign: +1 on zero lines, -1 on infty lines
    own_petal: tuple       # plus petal whose psi feeds the field argument
    sigma_own: int         # branch of the own petal across this line
    disc: float            # validity radius of the g-series
    tau: dict = field(default_factory=dict)      # block name -> tau_nf (pruned)
    taupow: dict = field(default_factory=dict)   # block name -> (D+1, n) powers

    @property
    def degree(self) -> int:
        return self.g_poly.size - 1


_BLOCKS = ("main", "down", "down_arc", "up", "up_arc")


def _line_data(key: tuple, geom: LineGeometry, g, cls: FormalClass) -> _LineData:
    kind, j = key
    s = 1 if kind == "zero" else -1
    own = ("plus", j - 1) if kind == "zero" else ("plus", j)
    center = 2.0 * math.pi * own[1]
    sigma_own = 1 if center > geom.height else -1
    data = _LineData(key, geom, g.as_poly(), s, own, sigma_own, float(g.sigma))
    # on oversized trial domains |tau| can overflow; the caller's radius
    # gate rejects those lines, so the infs never feed the iteration
    with np.errstate(over="ignore", invalid="ignore"):
        for name in _BLOCKS:
            block = geom.block(name)
            tau = np.exp(s * _2PII * np.asarray(psi_nf(cls, block.w)))
            tau[np.abs(tau) < _PRUNE] = 0.0
            data.tau[name] = tau
            pows = np.empty((data.degree + 1, tau.size), dtype=complex)
            pows[0] = 1.0
            for k in range(1, data.degree + 1):
                pows[k] = pows[k - 1] * tau
            data.taupow[name] = pows
    return data


def _field_values(line: _LineData, name: str, r_vals: np.ndarray) -> np.ndarray:
    """G on a node block given the own-petal correction there."""
    pows = line.taupow[name]
    phase = np.exp(line.s * _2PII * r_vals)
    out = np.zeros(pows.shape[1], dtype=complex)
    fac = np.ones_like(phase)
    for k in range(1, line.degree + 1):
        fac = fac * phase
        c = line.g_poly[k]
        if c != 0.0:
            out += c * pows[k] * fac
    return out


def _field_increment(line: _LineData, name: str, r_prev: np.ndarray,
                     dr: np.ndarray) -> np.ndarray:
    """G(R_prev + dr) - G(R_prev) on a block, cancellation-free."""
    pows = line.taupow[name]
    out = np.zeros(pows.shape[1], dtype=complex)
    for k in range(1, line.degree + 1):
        c = line.g_poly[k]
        if c == 0.0:
            continue
        arg = line.s * _2PII * k
        out += c * pows[k] * np.exp(arg * r_prev) * np.expm1(arg * dr)
    return out


def _field_at_points(line: _LineData, cls: FormalClass, pts: np.ndarray,
                     r_prev: np.ndarray, dr: np.ndarray | None) -> np.ndarray:
    """G increment (or G itself when dr is None) at arbitrary points."""
    tau = np.exp(line.s * _2PII * np.asarray(psi_nf(cls, pts)))
    tau[np.abs(tau) < _PRUNE] = 0.0
    out = np.zeros(pts.shape, dtype=complex)
    powk = np.ones_like(tau)
    for k in range(1, line.degree + 1):
        powk = powk * tau
        c = line.g_poly[k]
        if c == 0.0:
            continue
        arg = line.s * _2PII * k
        if dr is None:
            out += c * powk * np.exp(arg * r_prev)
        else:
            out += c * powk * np.exp(arg * r_prev) * np.expm1(arg * dr)
    return out


# ---------------------------------------------------------------------------
# iteration targets


@dataclass
class _Job:
    """One target family whose correction chain the iteration maintains."""

    petal_key: tuple
    targets: np.ndarray
    line_key: tuple | None = None   # set for node-block jobs
    block: str | None = None
    is_grid: bool = False


def _branch(petal_key: tuple, height: float) -> int:
    kind, j = petal_key
    center = 2.0 * math.pi * j if kind == "plus" else (2.0 * j - 1.0) * math.pi
    return 1 if center > height else -1


def _petal_grid(domain: DomainSpec, petal: PetalId, cfg: IterationConfig) -> np.ndarray:
    band = math.pi / 2.0 - cfg.ch.eps - 0.05
    rows = np.linspace(petal.center - band, petal.center + band, cfg.grid_im)
    x_lo = max(domain.boundary_x(h) for h in (rows[0], rows[-1], petal.center))
    x_lo += cfg.exclusion
    xs = cheb_grid(x_lo, x_lo + cfg.grid_span, cfg.grid_re)
    return (xs[None, :] + 1j * rows[:, None]).ravel()


def _route(job: _Job, line: _LineData, eps: float) -> tuple:
    """(route, sigma) of one line on one job; routes are uniform per job."""
    sigma = _branch(job.petal_key, line.geom.height)
    if job.line_key == line.key:
        if job.block == "main":
            return "pv", line.sigma_own
        # shifted lines and arcs: beyond the line for the away branch,
        # plain direct on the approach side
        away = ("down", "down_arc") if line.sigma_own > 0 else ("up", "up_arc")
        return ("direct+corr" if job.block in away else "direct"), line.sigma_own
    d = job.targets.imag - line.geom.height
    sd = sigma * d
    if np.all(sd > eps):
        return "direct", sigma
    raise ValidationError(
        f"target family {job.petal_key}/{job.line_key}/{job.block} is not "
        f"cleanly on the near side of the {line.key} line; the window "
        f"geometry is inconsistent"
    )


# ---------------------------------------------------------------------------
# the driver


class FatouAtlas:
    """Converged corrections for every petal of the window.

    Holds the static line geometry, the per-step field increments on every
    node block, and evaluates R (hence psi) anywhere by replaying the
    iteration at the requested points; branch corrections recurse through
    the plus-petal chains that feed the field arguments, terminating at the
    zeroth step where every correction vanishes.
    """

    def __init__(self, domain: DomainSpec, config: IterationConfig,
                 cls: FormalClass, moduli: HornMapSequence, lines: list,
                 hist: list, deltas: list, shrink_count: int):
        self.domain = domain
        self.config = config
        self.cls = cls
        self.moduli = moduli
        self.lines = lines
        self.hist = hist          # hist[s][(line key, block)] = field increment at step s
        self.deltas = [float(d) for d in deltas]
        self.shrink_count = int(shrink_count)
        self.geoms = {line.key: line.geom for line in lines}

    # duck-type the sampling exporter of the one-shot atlas
    @property
    def cfg(self) -> CHConfig:
        return self.config.ch

    @property
    def n_steps(self) -> int:
        return len(self.hist)

    def petal_ids(self) -> list:
        return window_petals(self.config.ch.J)

    # -- evaluation ----------------------------------------------------------

    def _petal_key(self, petal) -> tuple:
        if isinstance(petal, PetalId):
            key = (petal.kind, petal.j)
        else:
            kind, j = petal
            key = (kind, int(j))
        if key[0] not in ("plus", "minus"):
            raise ValidationError("corrections live on plus/minus petals")
        return key

    def _chain(self, petal_key: tuple, pts: np.ndarray) -> list:
        """R at pts for every step 0..n, with the petal's branch routing."""
        eps = self.config.ch.eps
        plans = []
        for line in self.lines:
            sigma = _branch(petal_key, line.geom.height)
            d = pts.imag - line.geom.height
            lens = np.abs(d) <= eps
            beyond = sigma * d < -eps
            sub_chain = None
            if np.any(beyond):
                if line.own_petal == petal_key:
                    sub_chain = "self"
                else:
                    sub_chain = self._chain(line.own_petal, pts[beyond])
            if np.any(lens):
                start = line.geom.x_start + 1j * line.geom.height
                arc_name, _ = line.geom.shift_blocks(sigma)
                arc = line.geom.block(arc_name)
                dmin = np.min(np.abs(pts[lens][:, None] - arc.w[None, :]), axis=1) \
                    if arc.w.size else np.full(int(lens.sum()), np.inf)
                dmin = np.minimum(dmin, np.abs(pts[lens] - start))
                if np.any(dmin < eps / 2):
                    raise SingularPointError(
                        f"evaluation within {eps / 2:g} of the start of the "
                        f"{line.key} line"
                    )
            plans.append((line, sigma, lens, beyond, sub_chain))
        values = [np.zeros(pts.shape, dtype=complex)]
        for s in range(self.n_steps):
            dr = np.zeros(pts.shape, dtype=complex)
            for line, sigma, lens, beyond, sub in plans:
                inc = self.hist[s][line.key]
                far = ~lens
                if np.any(far):
                    dr[far] -= _cauchy_sum(line.geom.main, inc["main"], pts[far])
                if np.any(lens):
                    arc_name, shift_name = line.geom.shift_blocks(sigma)
                    dr[lens] -= _cauchy_sum(line.geom.block(arc_name), inc[arc_name], pts[lens])
                    dr[lens] -= _cauchy_sum(line.geom.block(shift_name), inc[shift_name], pts[lens])
                if np.any(beyond):
                    if sub == "self":
                        prev = values[s - 1][beyond] if s >= 1 else None
                        cur = values[s][beyond]
                    else:
                        prev = sub[s - 1] if s >= 1 else None
                        cur = sub[s]
                    if s == 0:
                        g_inc = _field_at_points(line, self.cls, pts[beyond],
                                                 np.zeros_like(cur), None)
                    else:
                        g_inc = _field_at_points(line, self.cls, pts[beyond],
                                                 prev, cur - prev)
                    dr[beyond] -= sigma * g_inc
            values.append(values[-1] + dr)
        return values

    def r_value(self, petal, p):
        """The correction R on the given petal at p (scalar or array)."""
        key = self._petal_key(petal)
        arr, scalar = as_complex_array(p)
        out = self._chain(key, arr)[-1]
        return complex(out[0]) if scalar else out

    # alias used by the CSV exporter
    def value(self, petal, p):
        return self.r_value(petal, p)

    def psi(self, petal, p):
        """The corrected coordinate psi = psi_nf + R on the petal."""
        arr, scalar = as_complex_array(p)
        out = np.asarray(psi_nf(self.cls, arr)) + self._chain(self._petal_key(petal), arr)[-1]
        return complex(out[0]) if scalar else out

    def report(self) -> dict:
        q = 0.0
        for k in range(2, len(self.deltas)):
            if self.deltas[k - 1] > 0:
                q = max(q, self.deltas[k] / self.deltas[k - 1])
        return {
            "steps": len(self.deltas),
            "deltas": self.deltas,
            "q_estimate": q,
            "shrink_count": self.shrink_count,
        }


def _active_lines(moduli: HornMapSequence) -> list:
    out = []
    for j in moduli.indices():
        h0, hinf = moduli.pair(j)
        g0 = g_from_h(h0, "zero")
        ginf = g_from_h(hinf, "infty")
        if np.max(np.abs(g0.coeffs)) > 0.0:
            out.append((("zero", j), g0))
        if np.max(np.abs(ginf.coeffs)) > 0.0:
            out.append((("infty", j), ginf))
    return out


def _iterate_once(moduli: HornMapSequence, cls: FormalClass, domain: DomainSpec,
                  cfg: IterationConfig, shrink_count: int) -> FatouAtlas:
    active = _active_lines(moduli)
    lines = [_line_data(key, line_geometry(domain, key[0], key[1], cfg.ch), g, cls)
             for key, g in active]

    # preconditions: the model part of the gluing argument stays below half
    # the trusted radius along each line, and every node block (the shifted
    # companions reach somewhat larger |t|) stays inside the full disc
    for line in lines:
        top = float(np.max(np.abs(line.tau["main"])))
        if top > line.disc / 2.0:
            raise DomainTooLargeError(
                f"|t| reaches {top:.3g} on the {line.key} line, above half "
                f"the trusted radius {line.disc:g}; the domain is too large"
            )
        worst = max(float(np.max(np.abs(line.tau[name]))) for name in _BLOCKS)
        if worst > line.disc:
            raise DomainTooLargeError(
                f"|t| reaches {worst:.3g} on the {line.key} deformation "
                f"blocks, outside the trusted radius {line.disc:g}"
            )

    if not lines:
        return FatouAtlas(domain, cfg, cls, moduli, [], [], [0.0], shrink_count)

    jobs = []
    for line in lines:
        for name in _BLOCKS:
            jobs.append(_Job(line.own_petal, line.geom.block(name).w,
                             line_key=line.key, block=name))
    for petal in window_petals(cfg.ch.J):
        jobs.append(_Job((petal.kind, petal.j), _petal_grid(domain, petal, cfg),
                         is_grid=True))

    routes = [[_route(job, line, cfg.ch.eps) for line in lines] for job in jobs]

    r_cur = [np.zeros(job.targets.shape, dtype=complex) for job in jobs]
    r_prev_blocks = {}   # (line key, block) -> R of the own petal, previous step
    dr_blocks = {}
    hist = []
    deltas = []
    bad_ratios = 0

    block_index = {(job.line_key, job.block): i
                   for i, job in enumerate(jobs) if not job.is_grid}

    for step in range(cfg.max_steps):
        # field increments on every block of every line
        inc_step = {}
        for line in lines:
            inc = {}
            for name in _BLOCKS:
                i = block_index[(line.key, name)]
                if step == 0:
                    inc[name] = _field_values(line, name, r_cur[i])
                else:
                    inc[name] = _field_increment(
                        line, name, r_prev_blocks[(line.key, name)],
                        dr_blocks[(line.key, name)])
            inc_step[line.key] = inc
        hist.append(inc_step)

        # apply the transforms to every target family
        sup = 0.0
        new_dr = {}
        for i, job in enumerate(jobs):
            dr = np.zeros(job.targets.shape, dtype=complex)
            for line, (route, sigma) in zip(lines, routes[i]):
                inc = inc_step[line.key]
                if route == "pv":
                    dr -= ch_on_line(line.geom, inc["main"], sigma)
                    continue
                dr -= _cauchy_sum(line.geom.main, inc["main"], job.targets)
                if route == "direct+corr":
                    dr -= sigma * inc[job.block]
            if job.is_grid:
                scale = np.exp(_2PII * r_cur[i])
                sup = max(sup, float(np.max(np.abs(scale * np.expm1(_2PII * dr)))))
            else:
                key = (job.line_key, job.block)
                r_prev_blocks[key] = r_cur[i].copy()
                new_dr[key] = dr
            r_cur[i] = r_cur[i] + dr
        dr_blocks = new_dr
        deltas.append(sup)

        # domain guard: the corrected arguments must stay inside the discs
        for line in lines:
            for name in _BLOCKS:
                i = block_index[(line.key, name)]
                amp = np.abs(line.tau[name]) * np.exp(
                    -line.s * 2.0 * math.pi * r_cur[i].imag)
                if float(np.max(amp, initial=0.0)) > line.disc:
                    raise DomainTooLargeError(
                        f"gluing argument left the trusted disc on the "
                        f"{line.key} {name} block at step {step + 1}"
                    )

        if sup < cfg.tol:
            return FatouAtlas(domain, cfg, cls, moduli, lines, hist, deltas,
                              shrink_count)
        if len(deltas) >= 2 and deltas[-2] > 0 and deltas[-1] / deltas[-2] >= 1.0:
            bad_ratios += 1
            if bad_ratios >= 3:
                raise DivergenceError(
                    f"contraction estimate stayed >= 1 for three steps "
                    f"(deltas {deltas[-4:]}); the data does not contract here"
                )
        else:
            bad_ratios = 0

    raise ConvergenceError(
        f"correction iteration not below tol={cfg.tol:g} after "
        f"{cfg.max_steps} steps (last delta {deltas[-1]:.3g})"
    )


def iterate_fatou(moduli: HornMapSequence, cls: FormalClass, domain: DomainSpec,
                  cfg: IterationConfig | None = None) -> FatouAtlas:
    """Realize the window: corrected Fatou coordinates matching the gluing.

    Preconditions: the window passes check_radii.  If the gluing arguments
    leave their trusted discs, the domain floor is raised one unit at a time
    (at most ``cfg.max_shrink`` times, recorded in the atlas) before giving
    up with DomainTooLargeError.
    """
    cfg = cfg or IterationConfig()
    rad = check_radii(moduli)
    if not rad["ok"]:
        raise ValidationError(
            f"window radii too small for realization (margins {rad['margins']})"
        )
    dom = domain
    count = 0
    while True:
        try:
            return _iterate_once(moduli, cls, dom, cfg, count)
        except DomainTooLargeError:
            if count >= cfg.max_shrink:
                raise
            dom = dom.with_floor(dom.re_floor + 1.0 if dom.re_floor > 0 else
                                 _first_floor(dom))
            count += 1


def _first_floor(domain: DomainSpec) -> float:
    """A starting floor one unit right of the innermost line start."""
    h0 = math.pi / 2.0
    return domain.boundary_x(h0) + 1.0


# ---------------------------------------------------------------------------
# germ recovery


class RealizedGerm:
    """The realized germ, evaluated in split form ``f = x0 + u``.

    ``x0`` is the model unit-time map and ``u`` the (typically tiny)
    modulus-driven correction, solved from the Abel relation of the
    corrected coordinate.  Keeping the two parts separate preserves the
    relative accuracy of ``u`` even when it sits far below ``|x0|``.
    """

    def __init__(self, atlas: FatouAtlas):
        self.atlas = atlas
        self.cls = atlas.cls
        self.domain = atlas.domain

    def apply_split(self, petal, p, max_iter: int = 12):
        """(x0, u) with f = x0 + u and psi(x0 + u) = psi(p) + 1."""
        arr, scalar = as_complex_array(p)
        x0 = arr + np.asarray(f0_increment(self.cls, arr))
        r_here = np.asarray(self.atlas.r_value(petal, arr))
        u = (r_here - np.asarray(self.atlas.r_value(petal, x0))) \
            / np.asarray(psi_nf_prime(self.cls, x0))
        for _ in range(max_iter):
            res = (np.asarray(segment_psi_increment(self.cls, x0, u))
                   + np.asarray(self.atlas.r_value(petal, x0 + u)) - r_here)
            step = res / np.asarray(psi_nf_prime(self.cls, x0 + u))
            u = u - step
            if float(np.max(np.abs(step), initial=0.0)) < 1e-15 * (
                    1.0 + float(np.max(np.abs(u), initial=0.0))):
                break
        if scalar:
            return complex(x0[0]), complex(u[0])
        return x0, u

    def evaluate(self, petal, p):
        """f(p) on the petal (plus-petal values on the overlaps)."""
        x0, u = self.apply_split(petal, p)
        return x0 + u

    def abel_residual(self, petal, p):
        """|psi(f(zeta)) - psi(zeta) - 1| measured in split form."""
        arr, scalar = as_complex_array(p)
        x0, u = self.apply_split(petal, arr)
        res = (np.asarray(segment_psi_increment(self.cls, x0, u))
               + np.asarray(self.atlas.r_value(petal, x0 + u))
               - np.asarray(self.atlas.r_value(petal, arr)))
        out = np.abs(res)
        return float(out[0]) if scalar else out

    def gluing_mismatch(self, j: int, p, kind: str = "infty"):
        """|f_plus - f_minus| on the overlap strip of index j."""
        arr, scalar = as_complex_array(p)
        plus_j = j if kind == "infty" else j - 1
        _, u_plus = self.apply_split(("plus", plus_j), arr)
        _, u_minus = self.apply_split(("minus", j), arr)
        out = np.abs(u_plus - u_minus)
        return float(out[0]) if scalar else out


def recover_germ(atlas: FatouAtlas) -> RealizedGerm:
    """Wrap the converged atlas as an evaluable germ."""
    return RealizedGerm(atlas)


def check_r_plus_invariance(germ: RealizedGerm, n_points: int = 32,
                            span: float = 6.0) -> float:
    """Sup of |Im f| over a real segment in the central attracting petal.

    Conjugation-symmetric gluing data must produce a germ that maps the real
    axis to itself; the returned defect is the measure used by the symmetry
    gate.
    """
    dom = germ.domain
    x_lo = dom.boundary_x(0.0) + 1.0
    xs = np.linspace(x_lo, x_lo + span, n_points).astype(complex)
    vals = germ.evaluate(("plus", 0), xs)
    return float(np.max(np.abs(vals.imag)))


# ---------------------------------------------------------------------------
# instrument panel


def _strip_points(atlas: FatouAtlas, key: tuple, n: int = 10) -> np.ndarray:
    geom = atlas.geoms[key]
    xs = np.linspace(geom.x_start + 0.6, geom.x_start + 4.0, n)
    return xs + 1j * geom.height


def cocycle_residual(atlas: FatouAtlas, n: int = 10) -> float:
    """Sup defect of the gluing identities at the converged coordinates."""
    worst = 0.0
    for line in atlas.lines:
        pts = _strip_points(atlas, line.key, n)
        kind, j = line.key
        if kind == "zero":
            diff = (atlas.r_value(("plus", j - 1), pts)
                    - atlas.r_value(("minus", j), pts))
        else:
            diff = (atlas.r_value(("minus", j), pts)
                    - atlas.r_value(("plus", j), pts))
        r_own = np.asarray(atlas.r_value(line.own_petal, pts))
        g_val = _field_at_points(line, atlas.cls, pts, r_own, None)
        worst = max(worst, float(np.max(np.abs(diff - g_val))))
    return worst


def realization_report(atlas: FatouAtlas, germ: RealizedGerm | None = None,
                       n: int = 8) -> dict:
    """The run report: convergence record plus residual diagnostics."""
    germ = germ or recover_germ(atlas)
    rep = atlas.report()
    rep["cocycle_residual_max"] = cocycle_residual(atlas)

    def petal_abel(petal):
        pts = _petal_grid(atlas.domain, petal, atlas.config)
        sub = pts[:: max(1, pts.size // (n * n))]
        return float(np.max(germ.abel_residual((petal.kind, petal.j), sub)))

    abel = parallel_map(petal_abel, atlas.petal_ids(), atlas.config.threads)
    rep["abel_residual_max"] = float(max(abel, default=0.0))

    glue = 0.0
    for line in atlas.lines:
        pts = _strip_points(atlas, line.key, n)
        glue = max(glue, float(np.max(germ.gluing_mismatch(line.key[1], pts,
                                                           kind=line.key[0]))))
    rep["gluing_residual_max"] = glue
    rep["rplus_invariance"] = check_r_plus_invariance(germ)
    return rep


# ---------------------------------------------------------------------------
# asymptotics of the realized correction


def correction_coefficients(atlas: FatouAtlas, order: int = 4) -> np.ndarray:
    """a_0..a_order with R ~ sum_p a_p zeta^-(p+1) on every petal.

    Integrates the converged field against powers along each line; the
    same numbers serve every petal of the window.
    """
    if order < 0 or order > atlas.config.ch.max_moment_order:
        raise ValidationError(
            f"order must lie in [0, {atlas.config.ch.max_moment_order}], got {order}"
        )
    total = np.zeros(order + 1, dtype=complex)
    for line in atlas.lines:
        block = line.geom.main
        g_total = np.zeros(block.w.size, dtype=complex)
        for step in atlas.hist:
            g_total = g_total + step[line.key]["main"]
        coef = block.cw * g_total
        total += np.array([np.sum(coef * block.w ** p) for p in range(order + 1)])
    return total / _2PII


def gevrey_report(atlas: FatouAtlas, order: float = 0.9, n_max: int = 5,
                  bound_kind: str = "log_gevrey", rays: int = 3,
                  ray_angle: float = 0.06, n_samples: int = 48):
    """Fit the correction's remainders on the central petal against a bound.

    Samples R on slightly tilted rays inside the central attracting petal,
    converts to the small parameter ell = 1/zeta, and runs the remainder
    verifier with the coefficients from :func:`correction_coefficients`.
    """
    from .asymptotics import verify_log_gevrey

    coeffs = correction_coefficients(atlas, order=n_max - 1)
    ell_coeffs = np.zeros(n_max + 1, dtype=complex)
    ell_coeffs[1 : n_max + 1] = coeffs[:n_max]

    x_lo = atlas.domain.boundary_x(0.0) + atlas.config.exclusion + 0.5
    x_hi = x_lo + atlas.config.grid_span
    radii = np.geomspace(x_lo, x_hi, n_samples)
    angles = np.linspace(-ray_angle, ray_angle, rays)
    zetas = (radii[None, :] * np.exp(1j * angles[:, None])).ravel()
    ells = 1.0 / zetas

    def values(ell):
        return np.asarray(atlas.r_value(("plus", 0), 1.0 / np.asarray(ell, complex)))

    return verify_log_gevrey(values, ell_coeffs, order, ells, n_max=n_max,
                             bound_kind=bound_kind)


def realize_linear(moduli: HornMapSequence, cls: FormalClass, domain: DomainSpec,
                   cfg: IterationConfig | None = None, order: float = 0.9,
                   n_max: int = 5):
    """Full pipeline on a linear-mode domain: germ plus remainder report."""
    atlas = iterate_fatou(moduli, cls, domain, cfg)
    germ = recover_germ(atlas)
    return germ, gevrey_report(atlas, order=order, n_max=n_max)
