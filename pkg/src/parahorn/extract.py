"""Horn maps out of a germ: orbit-sum Fatou coordinates and extraction.

The realization step builds a germ from prescribed transition data.  This
module walks the opposite way: given a germ ``f`` close to the model map
-- any object exposing ``cls``, ``domain`` and the split evaluation
``apply_split`` -- it reconstructs per-petal Fatou coordinates as orbit
sums of the Abel defect,

    psi(zeta) = psi_nf(zeta) + R(zeta),
    R(zeta)   = sum_{k>=0} [psi_nf(f^{k+1} zeta) - psi_nf(f^k zeta) - 1]

on the upper (forward-attracting) petals and the mirrored backward sum on
the lower (forward-repelling) ones, samples the mismatch of neighbouring
coordinates on circles of the transition variable ``t``, and reads the
horn-map coefficients off a discrete Fourier transform, attaching
per-coefficient noise floors taken from the unused high-frequency bins.

The direction split is not an optimization: ``t`` is constant along every
orbit of ``f``, so two sums taken along the *same* forward orbit agree up
to a function of ``t`` and their difference is structurally blind to the
coordinate mismatch.  Each branch has to be normalized in the funnel of
its own petal -- forward orbits drift onto the axis of an upper petal,
backward orbits onto the axis of a lower one -- where the correction is a
clean inverse-power series and the truncated tail can be fitted and
restored.

The ``roundtrip`` driver closes the loop: realize a window, extract it
back through the orbit route (which never touches the realization
internals), and compare coefficients after factoring out the linear
rescalings the data is only defined up to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .moduli import (
    Equivalence,
    GermSeries,
    HornMapSequence,
    equivalence_normalize,
    g_from_h,
    h_from_g,
)
from .normal_form import (
    FormalClass,
    f0_inverse,
    psi_nf,
    psi_nf_inverse,
    psi_nf_prime,
    segment_psi_increment,
)
from .surface import PetalId, line_height
from .util import (
    ConvergenceError,
    EscapeError,
    InversionError,
    ValidationError,
    as_complex_array,
)

_2PI = 2.0 * math.pi


@dataclass(frozen=True)
class OrbitConfig:
    """Knobs of the orbit sums and of the circle sampling.

    Orbits advance by roughly ``1 / psi_nf'`` per step, which shrinks like
    ``exp(-Re zeta)``: after K steps an orbit has only reached an abscissa
    of order ``log K``.  Bare truncation of the sum therefore converges
    uselessly slowly; instead every point runs a fixed ``max_orbit`` steps
    in lockstep and the remaining tail -- an algebraic function of the end
    point -- is fitted to the orbit's own last increments and added in
    closed form.

    Attributes:
        max_orbit: lockstep orbit length K.  Larger K pushes the end point
            right like log K; the default reaches Re zeta ~ 5.5 from the
            usual anchors.
        term_tol: a step where every term falls below this ends the sum
            early (identity transition data collapses it on step one).
        tail_correction: fit ``delta_k ~ sum_i a_i (w_k^-i - w_{k+1}^-i)``
            on the trailing part of the orbit and add the telescoped tail
            ``sum_i a_i w_K^-i``.
        tail_order: number of inverse powers in the tail model.
        tail_window: trailing fraction of the steps used for the fit.
        tail_x_min: minimum end abscissa for a trustworthy fit; ending
            short of it raises ConvergenceError (raise ``max_orbit``).
        n_samples: circle sample count for the coefficient transform,
            raised to 4x the degree when that is larger.
        degree: number of coefficients extracted per horn map.
        anchor_margin: distance right of the line start at which the
            sampling circle is anchored.  Must clear the deformation arcs
            of the evaluation geometry (> 2.5x its eps).
        rho_safety: sampling radius as a fraction of |t| at the anchor.
        rho_min: entries whose accessible radius falls below this are
            returned as zero series flagged ``meta["inaccessible"]``
            instead of dividing noise floors by astronomically small
            powers of rho.
        newton_tol / newton_max: circle inversion psi(zeta) = s.  The
            tolerance sits well above the tail-fit floor of the coordinate
            and far below anything visible at coefficient level.
        inverse_tol / inverse_max: backward steps solve f(v) = target by
            Newton seeded with the model inverse.  The tolerance is a gap
            in the log chart; position errors enter the sums only through
            the correction's slope (~1e-4), so 1e-12 is already far below
            every other error source.
    """

    max_orbit: int = 256
    term_tol: float = 1e-17
    tail_correction: bool = True
    tail_order: int = 2
    tail_window: float = 0.5
    tail_x_min: float = 3.0
    n_samples: int = 64
    degree: int = 8
    anchor_margin: float = 0.45
    rho_safety: float = 0.85
    rho_min: float = 1e-8
    newton_tol: float = 1e-6
    newton_max: int = 16
    inverse_tol: float = 1e-12
    inverse_max: int = 12

    def __post_init__(self):
        if self.max_orbit < 16:
            raise ValidationError(
                f"max_orbit must allow a meaningful orbit, got {self.max_orbit}"
            )
        if self.degree < 1:
            raise ValidationError("extraction degree must be >= 1")
        if not 0.0 < self.rho_safety < 1.0:
            raise ValidationError(
                f"rho_safety must sit strictly inside (0, 1), got {self.rho_safety}"
            )
        if self.n_samples < 8:
            raise ValidationError("n_samples must be >= 8")
        if not self.anchor_margin > 0:
            raise ValidationError("anchor_margin must be positive")
        if self.tail_order < 1 or not 0.0 < self.tail_window <= 1.0:
            raise ValidationError(
                "tail model needs order >= 1 and a window fraction in (0, 1]"
            )
        if not self.inverse_tol > 0 or self.inverse_max < 2:
            raise ValidationError(
                "backward-step Newton needs inverse_tol > 0 and inverse_max >= 2"
            )


# ---------------------------------------------------------------------------
# orbit sums


def _as_petal(petal) -> PetalId:
    """Normalize ``PetalId`` / ``(kind, j)`` / ``(j, kind)`` petal handles."""
    if isinstance(petal, PetalId):
        return petal
    if isinstance(petal, (tuple, list)) and len(petal) == 2:
        kind = next((x for x in petal if isinstance(x, str)), None)
        j = next((x for x in petal if not isinstance(x, str)), None)
        if kind is not None and j is not None:
            return PetalId(int(j), kind)
    raise ValidationError(
        f"petal must be a PetalId or a (kind, j) pair, got {petal!r}"
    )


def _tail_fit(froms: list, tos: list, deltas: list, w_end, cfg: OrbitConfig):
    """Closed-form tail of the orbit sums past the truncation point.

    The correction behaves algebraically deep in a petal's funnel,
    R ~ sum_i a_i / w^i, so each recorded increment is exactly
    delta_k = sum_i a_i (from_k^-i - to_k^-i).  Fitting the a_i on the
    trailing window of the increments (least squares, relative weights)
    and evaluating sum_i a_i / w_end^i recovers the value of R at the
    truncation point, up to the next inverse power.
    """
    n_steps = len(deltas)
    lo = max(1, int(n_steps * (1.0 - cfg.tail_window)))
    w_from = np.stack(froms[lo:])  # (F, n)
    w_to = np.stack(tos[lo:])
    d_seq = np.stack(deltas[lo:])
    powers = np.arange(1, cfg.tail_order + 1)
    # basis (F, n, M): differences of inverse powers along the orbit
    basis = (
        (1.0 / w_from)[:, :, None] ** powers[None, None, :]
        - (1.0 / w_to)[:, :, None] ** powers[None, None, :]
    )
    end_pow = (1.0 / w_end)[:, None] ** powers[None, :]  # (n, M)
    tail = np.zeros(w_end.shape, dtype=complex)
    for i in range(w_end.size):
        weights = 1.0 / (np.abs(d_seq[:, i]) + 1e-300)
        a, *_ = np.linalg.lstsq(
            basis[:, i, :] * weights[:, None], d_seq[:, i] * weights, rcond=None
        )
        tail[i] = end_pow[i] @ a
    return tail


def _split_arrays(germ, pid: PetalId, w):
    """One germ evaluation, both pieces as arrays: f(w) = x0 + u."""
    x0, u = germ.apply_split(pid, w)
    x0 = np.atleast_1d(np.asarray(x0, dtype=complex))
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    return x0, u


def _check_step(pid: PetalId, w, u, nxt, step: int):
    """Sanity of one orbit step: perturbative, finite, inside the strip."""
    if not np.all(np.isfinite(nxt)) or not pid.strip_contains(nxt, margin=-0.5):
        raise EscapeError(
            f"orbit left the {pid.kind}({pid.j}) strip at step {step}",
            steps=step,
        )
    if np.any(np.abs(u) > 0.5) or np.any(np.abs(nxt - w) > 1.5):
        raise EscapeError(
            f"orbit step {step} is not perturbative "
            f"(max |u| = {float(np.abs(u).max()):.3g})",
            steps=step,
        )
    if float(nxt.real.min()) < 0.05:
        raise EscapeError(
            f"orbit reached the left edge of the chart at step {step}",
            steps=step,
        )


def orbit_correction(germ, petal, p, cfg: OrbitConfig | None = None):
    """Fatou correction R at ``p`` on a petal branch, by orbit sum.

    Parameters
    ----------
    germ : object
        Must expose ``cls``, ``domain`` and ``apply_split(petal, pts) ->
        (x0, u)`` with ``f = x0 + u`` and ``psi_nf(x0) = psi_nf(pts) + 1``
        up to round-off.  Each term of the sum is then a segment integral
        of ``psi_nf'`` from ``x0`` to ``x0 + u``, which keeps terms of
        size 1e-12 meaningful even where |psi_nf| is huge.
    petal : PetalId or (kind, j)
        Branch on which the orbit is evaluated.  Upper (plus) petals are
        forward-attracting and sum along forward orbits; lower (minus)
        petals are forward-repelling, so their sum runs along the inverse
        orbit, each backward step solved by Newton around the model
        inverse.  Both directions drift into the petal's own funnel,
        which is where this branch's correction actually decays -- a
        forward sum on a lower petal would converge, but to the upper
        branch's normalization, silently erasing the mismatch between
        the two.
    p : complex or array
        Evaluation points.
    cfg : OrbitConfig, optional

    Returns
    -------
    complex or ndarray
        The correction, normalized to vanish along the petal's own axis
        as Re zeta -> +inf (the same normalization as the realization
        atlas, which is what makes the two routes directly comparable).
        All points run their orbits in lockstep, so differences of two
        calls at the same points share their truncation structure.

    Raises
    ------
    EscapeError
        An orbit left its strip or took a non-perturbative step.
    ConvergenceError
        The orbit ended short of the asymptotic regime (``tail_x_min``),
        or a backward step failed to converge.
    """
    cfg = cfg or OrbitConfig()
    pid = _as_petal(petal)
    if pid.kind not in ("plus", "minus"):
        raise ValidationError(
            f"orbit sums live on plus/minus petals, got {pid.kind!r}"
        )
    arr, scalar = as_complex_array(p)
    w = arr.astype(complex).copy()
    total = np.zeros(w.shape, dtype=complex)
    froms: list = []
    tos: list = []
    deltas: list = []
    early = False
    forward = pid.kind == "plus"
    for step in range(cfg.max_orbit):
        if forward:
            x0, u = _split_arrays(germ, pid, w)
            nxt = x0 + u
            _check_step(pid, w, u, nxt, step)
            d = np.atleast_1d(
                np.asarray(segment_psi_increment(germ.cls, x0, u), dtype=complex)
            )
            total += d
            froms.append(w)
            tos.append(nxt)
        else:
            # backward step: solve f(nxt) = w, seeded by the model inverse
            nxt = np.atleast_1d(
                np.asarray(f0_inverse(germ.cls, w), dtype=complex)
            )
            gap = math.inf
            for _ in range(cfg.inverse_max):
                x0, u = _split_arrays(germ, pid, nxt)
                res = x0 + u - w
                gap = float(np.abs(res).max())
                if gap < cfg.inverse_tol:
                    break
                nxt = nxt - res * np.asarray(
                    psi_nf_prime(germ.cls, x0 + u)
                ) / np.asarray(psi_nf_prime(germ.cls, nxt))
            else:
                raise ConvergenceError(
                    f"backward orbit step {step} stalled on petal "
                    f"{pid.kind}({pid.j}): gap {gap:.3g} after "
                    f"{cfg.inverse_max} Newton iterations"
                )
            _check_step(pid, w, u, nxt, step)
            d = np.atleast_1d(
                np.asarray(segment_psi_increment(germ.cls, x0, u), dtype=complex)
            )
            total -= d
            froms.append(nxt)
            tos.append(w)
        deltas.append(d)
        w = nxt
        if float(np.abs(d).max()) < cfg.term_tol:
            early = True  # constant correction along the orbit: R = 0
            break
    if early or not cfg.tail_correction:
        return complex(total[0]) if scalar else total
    x_end = float(w.real.min())
    if x_end < cfg.tail_x_min:
        raise ConvergenceError(
            f"orbit ended at Re zeta = {x_end:.3g}, short of the asymptotic "
            f"regime (tail_x_min = {cfg.tail_x_min:g}); raise max_orbit"
        )
    total += _tail_fit(froms, tos, deltas, w, cfg)
    return complex(total[0]) if scalar else total


class FatouExtract:
    """Per-petal Fatou coordinates of a germ, evaluated by orbit sums.

    The orbit route uses only germ evaluations, so applying it to a
    realized germ is a genuinely independent reconstruction of the
    corrections, not a replay of the realization.
    """

    def __init__(self, germ, cfg: OrbitConfig | None = None):
        for name in ("cls", "domain", "apply_split"):
            if not hasattr(germ, name):
                raise ValidationError(
                    f"germ must expose {name!r} for orbit extraction"
                )
        self.germ = germ
        self.cls: FormalClass = germ.cls
        self.domain = germ.domain
        self.cfg = cfg or OrbitConfig()

    def correction(self, petal, p):
        """Orbit-sum correction R on the petal's branch."""
        return orbit_correction(self.germ, petal, p, self.cfg)

    def psi(self, petal, p):
        """The coordinate psi_nf + R, normalized to R -> 0 rightward."""
        arr, scalar = as_complex_array(p)
        vals = np.asarray(psi_nf(self.cls, arr), dtype=complex) + np.asarray(
            self.correction(petal, arr)
        )
        return complex(vals[0]) if scalar else vals

    def invert(self, petal, s, seeds):
        """Solve psi(petal, zeta) = s by batched Newton from caller seeds.

        Seeds select the branch; callers pass model inverses continued
        along the target path.  The derivative is approximated by the
        model's (the correction slope is orders of magnitude smaller).
        """
        s_arr, scalar = as_complex_array(s)
        z0, _ = as_complex_array(seeds)
        z = np.broadcast_to(z0, s_arr.shape).astype(complex).copy()
        err = math.inf
        for _ in range(self.cfg.newton_max):
            res = np.asarray(self.psi(petal, z)) - s_arr
            err = float(np.abs(res).max())
            if err < self.cfg.newton_tol:
                return complex(z[0]) if scalar else z
            z = z - res / np.asarray(psi_nf_prime(self.cls, z))
        worst = complex(z[int(np.argmax(np.abs(res)))])
        raise InversionError(
            f"Fatou inversion stalled on petal {petal}: residual {err:.3g} "
            f"after {self.cfg.newton_max} Newton steps",
            last=worst,
        )


def fatou_from_germ(germ, cfg: OrbitConfig | None = None) -> FatouExtract:
    """Orbit-sum Fatou coordinates of a germ (see :class:`FatouExtract`)."""
    return FatouExtract(germ, cfg)


# ---------------------------------------------------------------------------
# circle sampling


def _strip_petals(kind: str, j: int) -> tuple[PetalId, PetalId]:
    """(parametrizing petal, opposite petal) of a transition strip.

    The strip variable is built from the Fatou coordinate of the petal
    whose transition argument it is: the upper petal of index j for an
    infty strip, the upper petal of index j-1 for a zero strip; the
    opposite branch is the lower petal of index j in both cases.
    """
    if kind == "infty":
        return PetalId(j, "plus"), PetalId(j, "minus")
    if kind == "zero":
        return PetalId(j - 1, "plus"), PetalId(j, "minus")
    raise ValidationError(f"strips come in kinds zero/infty, not {kind!r}")


def extract_gluing_series(
    fx: FatouExtract, kind: str, j: int, degree: int | None = None
) -> GermSeries:
    """One transition series g(t) from the Fatou-coordinate mismatch.

    Solves psi(zeta_q) = s_0 + q on the parametrizing petal for Q
    equispaced q in [0, 1), evaluates the difference of the two
    neighbouring corrections along the resulting closed t-circle, and
    reads the Taylor coefficients off a discrete Fourier transform.  The
    magnitude of the unused bins just above ``degree`` calibrates a noise
    floor attached per coefficient -- dividing it by rho^k inflates the
    high ones deliberately: those digits really are unknown.

    The sampling radius rho = rho_safety * |t(anchor)| is dictated by the
    geometry: |t| decays superexponentially along a line, so only strips
    whose line starts near the domain boundary carry observable data.
    Entries below ``rho_min`` return a zero series with
    ``meta["inaccessible"] = True`` and infinite noise.
    """
    cfg = fx.cfg
    deg = cfg.degree if degree is None else int(degree)
    par, opp = _strip_petals(kind, j)
    h = line_height(kind, j)
    x_anchor = fx.domain.boundary_x(h) + cfg.anchor_margin
    anchor = complex(x_anchor, h)
    sgn = -1.0 if kind == "infty" else 1.0  # t = exp(sgn * 2 pi i * psi)
    meta = {"kind": kind, "j": int(j), "anchor_x": x_anchor}

    # model estimate of the accessible radius first: skip the orbit work
    # (and the overflowing exponentials) when the strip carries no data.
    log_rho0 = -sgn * _2PI * complex(psi_nf(fx.cls, anchor)).imag
    if log_rho0 + math.log(cfg.rho_safety) < math.log(cfg.rho_min):
        rho = math.exp(max(log_rho0, -700.0)) * cfg.rho_safety
        meta.update({"inaccessible": True, "rho": rho})
        return GermSeries(
            np.zeros(deg, dtype=complex),
            sigma=cfg.rho_min,
            coeff_noise=np.full(deg, np.inf),
            meta=meta,
        )

    s0 = complex(fx.psi(par, anchor))
    s_base = s0 - 1j * sgn * math.log(cfg.rho_safety) / _2PI
    t_base = complex(np.exp(sgn * _2PI * 1j * s_base))
    rho = abs(t_base)
    meta["rho"] = rho

    Q = max(cfg.n_samples, 4 * deg)
    targets = s_base + np.arange(Q) / Q
    seeds = np.empty(Q, dtype=complex)
    zprev = anchor
    for i in range(Q):
        zprev = psi_nf_inverse(fx.cls, complex(targets[i]), seed=zprev).zeta
        seeds[i] = zprev
    circle = fx.invert(par, targets, seeds)
    if not fx.domain.contains(circle):
        raise EscapeError(
            f"sampling circle for {kind}({j}) left the domain; raise "
            "anchor_margin or widen the domain"
        )
    r_par = np.asarray(fx.correction(par, circle))
    r_opp = np.asarray(fx.correction(opp, circle))
    g_vals = (r_opp - r_par) if kind == "infty" else (r_par - r_opp)

    # t_q = t_base * exp(sgn * 2 pi i q/Q): the matching transform is the
    # inverse DFT for the infty orientation, the forward one for zero.
    if kind == "infty":
        spec = np.fft.ifft(g_vals)
    else:
        spec = np.fft.fft(g_vals) / Q
    powers = t_base ** np.arange(1, deg + 1)
    coeffs = spec[1 : deg + 1] / powers
    hi = spec[deg + 1 : 2 * deg + 1]
    floor = float(np.abs(hi).max()) if hi.size else 0.0
    noise = floor / rho ** np.arange(1.0, deg + 1.0)
    meta.update(
        {
            "floor": floor,
            "c0": complex(spec[0]),
            "n_samples": int(Q),
        }
    )
    return GermSeries(coeffs, sigma=rho, coeff_noise=noise, meta=meta)


def horn_maps_from_fatou(
    fx: FatouExtract, J: int, degree: int | None = None
) -> HornMapSequence:
    """Extract the whole window |j| <= J as horn maps.

    Each transition series is exponentiated back to a diffeomorphism germ
    (:func:`~parahorn.moduli.h_from_g`); coefficient noise rides through
    the linearization (a factor 2 pi and one index shift) and the sampling
    annotations move into the horn map's ``meta``.
    """
    if J < 0:
        raise ValidationError("window size J must be >= 0")
    entries = {}
    for j in range(-J, J + 1):
        pair = []
        for kind in ("zero", "infty"):
            g = extract_gluing_series(fx, kind, j, degree=degree)
            hmap = h_from_g(g, kind, sigma=g.sigma)
            if g.coeff_noise is not None:
                nh = np.zeros(hmap.degree)
                n = min(hmap.degree - 1, g.coeff_noise.size)
                nh[1 : n + 1] = _2PI * g.coeff_noise[:n]
                hmap.coeff_noise = nh
            hmap.meta = dict(g.meta or {})
            pair.append(hmap)
        entries[j] = (pair[0], pair[1])
    return HornMapSequence(J=J, entries=entries)


def extract_horn_maps(
    germ, J: int, cfg: OrbitConfig | None = None, degree: int | None = None
) -> HornMapSequence:
    """Horn maps of a germ in one call (orbit sums + circle sampling)."""
    return horn_maps_from_fatou(FatouExtract(germ, cfg), J, degree=degree)


# ---------------------------------------------------------------------------
# round trip


def apply_equivalence(seq: HornMapSequence, eq: Equivalence) -> HornMapSequence:
    """Rescale a window onto the gauge of the reference it was matched to.

    With the matching scalars of ``equivalence_normalize(a, b)`` this
    turns ``a`` into the window that equals ``b`` in exact arithmetic:
    ``h0_j(t) -> h0_j(t / gamma_j) / beta_{j-1}`` and
    ``hinf_j(t) -> hinf_j(t / beta_j) / gamma_j``.
    """
    entries = {}
    for j in seq.indices():
        h0, hinf = seq.pair(j)
        b_prev = complex(eq.beta.get(j - 1, 1.0))
        b_here = complex(eq.beta.get(j, 1.0))
        g_here = complex(eq.gamma.get(j, 1.0))
        k0 = np.arange(1, h0.degree + 1)
        ki = np.arange(1, hinf.degree + 1)
        c0 = h0.coeffs * g_here ** (-k0) / b_prev
        ci = hinf.coeffs * b_here ** (-ki) / g_here
        n0 = None
        if h0.coeff_noise is not None:
            n0 = h0.coeff_noise / np.abs(g_here) ** k0 / abs(b_prev)
        ni = None
        if hinf.coeff_noise is not None:
            ni = hinf.coeff_noise / np.abs(b_here) ** ki / abs(g_here)
        entries[j] = (
            GermSeries(c0, h0.sigma * abs(g_here), coeff_noise=n0, meta=h0.meta),
            GermSeries(ci, hinf.sigma * abs(b_here), coeff_noise=ni, meta=hinf.meta),
        )
    return HornMapSequence(J=seq.J, entries=entries)


@dataclass
class RoundtripReport:
    """Forward-backward comparison of a horn-map window.

    ``linear_coefficients`` holds the recovered linear coefficient of each
    transition series after normalization, keyed ``(kind, j)``;
    ``reference_coefficients`` the input values; ``inaccessible`` the
    entries whose data never reached the evaluation geometry (reported
    separately rather than counted as agreeing).
    """

    extracted: HornMapSequence
    normalized: HornMapSequence
    equivalence: Equivalence | None
    linear_coefficients: dict
    reference_coefficients: dict
    linear_errors: dict
    max_linear_error: float
    inaccessible: tuple
    n_steps: int
    shrink: int

    def to_dict(self) -> dict:
        out = {
            "max_linear_error": self.max_linear_error,
            "n_steps": self.n_steps,
            "shrink": self.shrink,
            "equivalent": self.equivalence is not None,
            "inaccessible": [f"{kind}({j})" for kind, j in self.inaccessible],
            "entries": [
                {
                    "kind": kind,
                    "j": j,
                    "recovered": [
                        self.linear_coefficients[(kind, j)].real,
                        self.linear_coefficients[(kind, j)].imag,
                    ],
                    "reference": [
                        self.reference_coefficients[(kind, j)].real,
                        self.reference_coefficients[(kind, j)].imag,
                    ],
                    "error": self.linear_errors[(kind, j)],
                }
                for (kind, j) in sorted(self.linear_coefficients)
            ],
        }
        if self.equivalence is not None:
            out["max_match_residual"] = self.equivalence.max_residual
            out["match_case"] = self.equivalence.case
        return out


def roundtrip(
    seq: HornMapSequence,
    cls: FormalClass,
    domain,
    iter_cfg=None,
    orbit_cfg: OrbitConfig | None = None,
    degree: int | None = None,
) -> RoundtripReport:
    """Realize a window, extract it back, compare after normalization.

    The comparison happens on the additive transform side: the recovered
    linear coefficient of every transition series -- after factoring out
    the matching rescalings -- against the input's.  Entries whose
    sampling radius is inaccessible on the given domain are listed
    separately; their data never entered the evaluation geometry, so
    silence about them is the honest report.
    """
    from .realize import iterate_fatou, recover_germ

    atlas = iterate_fatou(seq, cls, domain, iter_cfg)
    germ = recover_germ(atlas)
    fx = FatouExtract(germ, orbit_cfg)
    extracted = horn_maps_from_fatou(fx, seq.J, degree=degree)
    eq = equivalence_normalize(extracted, seq)
    normalized = apply_equivalence(extracted, eq) if eq is not None else extracted
    lin: dict = {}
    ref: dict = {}
    err: dict = {}
    inaccessible = []
    for j in seq.indices():
        for kind in ("zero", "infty"):
            h_out = normalized.horn(kind, j)
            if (h_out.meta or {}).get("inaccessible"):
                inaccessible.append((kind, j))
                continue
            key = (kind, j)
            lin[key] = g_from_h(h_out, kind).c1
            ref[key] = g_from_h(seq.horn(kind, j), kind).c1
            err[key] = abs(lin[key] - ref[key])
    return RoundtripReport(
        extracted=extracted,
        normalized=normalized,
        equivalence=eq,
        linear_coefficients=lin,
        reference_coefficients=ref,
        linear_errors=err,
        max_linear_error=max(err.values(), default=0.0),
        inaccessible=tuple(inaccessible),
        n_steps=atlas.n_steps,
        shrink=atlas.shrink_count,
    )
