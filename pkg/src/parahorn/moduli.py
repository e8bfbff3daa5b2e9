"""Horn-map data: germ series, windowed sequences, and their invariant checks.

A modulus entry of index j is a pair of one-variable analytic germs
``(h0_j, hinf_j)`` fixing 0, each a diffeomorphism on a disc of radius
``sigma_j``.  A desk-scale window keeps the entries for ``|j| <= J`` and
treats everything outside as the identity.

The transform input is not the horn map itself but its logarithm: for a map
``h`` tangent to the identity, ``g = log(h(t)/t) / (2 pi i)`` (zero kind:
the same with the inverse map).  ``g_from_h`` / ``h_from_g`` convert in both
directions and round-trip to machine precision at these degrees.

Also here: the conjugate-symmetry check pairing index j with 1-j, the
uniform distortion bounds, and the normalization that decides whether two
windows are equivalent up to the linear rescalings allowed by the theory.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import series as ps
from .util import ValidationError


@dataclass
class GermSeries:
    """Polynomial jet c_1 t + ... + c_D t^D with a validity radius.

    ``coeffs[k]`` holds ``c_{k+1}``.  ``coeff_noise`` (optional, same shape)
    carries per-coefficient uncertainty estimates attached by the extraction
    pipeline; analysis code treats coefficients below their noise as unknown
    rather than zero.  ``meta`` is a free-form annotation slot (sampling
    radius, consistency flags, ...) that never affects numerics.
    """

    coeffs: np.ndarray
    sigma: float
    coeff_noise: np.ndarray | None = None
    meta: dict | None = None

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if self.coeffs.ndim != 1 or self.coeffs.size < 1:
            raise ValidationError("series needs a 1-d coefficient array")
        if not (self.sigma > 0):
            raise ValidationError(f"series radius must be positive, got {self.sigma}")
        if self.coeff_noise is not None:
            self.coeff_noise = np.asarray(self.coeff_noise, dtype=float)
            if self.coeff_noise.shape != self.coeffs.shape:
                raise ValidationError("coeff_noise must match coeffs in shape")

    @property
    def degree(self) -> int:
        return int(self.coeffs.size)

    @property
    def c1(self) -> complex:
        return complex(self.coeffs[0])

    def coefficient(self, k: int) -> complex:
        """c_k, zero beyond the stored degree (k >= 1)."""
        if k < 1:
            raise ValidationError("coefficients are indexed from 1")
        return complex(self.coeffs[k - 1]) if k <= self.degree else 0.0

    def noise(self, k: int) -> float:
        if self.coeff_noise is None or not (1 <= k <= self.degree):
            return 0.0
        return float(self.coeff_noise[k - 1])

    def as_poly(self, degree: int | None = None) -> np.ndarray:
        """Power-indexed array [0, c1, c2, ...] for the series helpers."""
        d = self.degree if degree is None else degree
        out = np.zeros(d + 1, dtype=complex)
        n = min(d, self.degree)
        out[1 : n + 1] = self.coeffs[:n]
        return out

    def evaluate(self, t):
        t_arr = np.asarray(t, dtype=complex)
        if np.any(np.abs(t_arr) > self.sigma * (1 + 1e-12)):
            raise ValidationError(
                f"evaluation outside the validity disc |t| <= {self.sigma}"
            )
        return ps.evaluate(self.as_poly(), t_arr)

    def derivative_evaluate(self, t):
        t_arr = np.asarray(t, dtype=complex)
        if np.any(np.abs(t_arr) > self.sigma * (1 + 1e-12)):
            raise ValidationError(
                f"evaluation outside the validity disc |t| <= {self.sigma}"
            )
        return ps.evaluate(ps.derivative(self.as_poly()), t_arr)

    def is_identity(self, tol: float = 0.0) -> bool:
        rest = np.abs(self.coeffs[1:]).max() if self.degree > 1 else 0.0
        return abs(self.c1 - 1.0) <= tol and rest <= tol

    @staticmethod
    def identity(degree: int, sigma: float) -> "GermSeries":
        c = np.zeros(degree, dtype=complex)
        c[0] = 1.0
        return GermSeries(c, sigma)

    @staticmethod
    def from_c2_list(pairs, sigma: float, degree: int) -> "GermSeries":
        """Series from [re, im] pairs for c_2.. with c_1 = 1 implicit."""
        c = np.zeros(degree, dtype=complex)
        c[0] = 1.0
        for k, (re, im) in enumerate(pairs):
            if k + 1 >= degree:
                break
            c[k + 1] = complex(re, im)
        return GermSeries(c, sigma)


def require_diffeo(g: GermSeries, what: str = "series") -> None:
    if g.c1 == 0:
        raise ValidationError(f"{what} must have a nonzero linear coefficient")


# ---------------------------------------------------------------------------
# windowed sequences


@dataclass
class HornMapSequence:
    """Window |j| <= J of horn-map pairs (h0_j, hinf_j)."""

    J: int
    entries: dict  # j -> (GermSeries, GermSeries)

    def __post_init__(self):
        if self.J < 0:
            raise ValidationError("window size J must be >= 0")
        for j in self.indices():
            if j not in self.entries:
                raise ValidationError(f"missing modulus entry for j={j}")
            h0, hinf = self.entries[j]
            require_diffeo(h0, f"h0[{j}]")
            require_diffeo(hinf, f"hinf[{j}]")

    def indices(self) -> range:
        return range(-self.J, self.J + 1)

    def pair(self, j: int) -> tuple[GermSeries, GermSeries]:
        return self.entries[j]

    def horn(self, kind: str, j: int) -> GermSeries:
        h0, hinf = self.entries[j]
        if kind == "zero":
            return h0
        if kind == "infty":
            return hinf
        raise ValidationError(f"horn maps come in kinds zero/infty, not {kind!r}")

    def sigma(self, j: int) -> float:
        h0, hinf = self.entries[j]
        return min(h0.sigma, hinf.sigma)

    def max_degree(self) -> int:
        return max(max(h0.degree, hi.degree) for h0, hi in self.entries.values())

    def is_identity(self, tol: float = 0.0) -> bool:
        return all(
            h0.is_identity(tol) and hi.is_identity(tol)
            for h0, hi in self.entries.values()
        )

    @staticmethod
    def identity(J: int, degree: int = 8, sigma: float = 1.0) -> "HornMapSequence":
        entries = {
            j: (GermSeries.identity(degree, sigma), GermSeries.identity(degree, sigma))
            for j in range(-J, J + 1)
        }
        return HornMapSequence(J=J, entries=entries)

    # -- file format --------------------------------------------------------

    def to_dict(self) -> dict:
        out_entries = []
        for j in self.indices():
            h0, hinf = self.entries[j]
            for name, g in (("h0", h0), ("hinf", hinf)):
                if abs(g.c1 - 1.0) > 1e-12:
                    raise ValidationError(
                        f"{name}[{j}] is not tangent to the identity; "
                        "files store c_2.. with c_1 = 1 implicit"
                    )
            out_entries.append(
                {
                    "j": j,
                    "h0": [[c.real, c.imag] for c in h0.coeffs[1:]],
                    "hinf": [[c.real, c.imag] for c in hinf.coeffs[1:]],
                    "sigma": self.sigma(j),
                }
            )
        return {"J": self.J, "entries": out_entries}

    @staticmethod
    def from_dict(d: dict, degree: int | None = None) -> "HornMapSequence":
        try:
            J = int(d["J"])
            raw = d["entries"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed moduli payload: {exc}") from exc
        entries = {}
        for item in raw:
            j = int(item["j"])
            sigma = float(item["sigma"])
            dmax = degree
            if dmax is None:
                dmax = max(len(item["h0"]), len(item["hinf"]), 1) + 1
            entries[j] = (
                GermSeries.from_c2_list(item["h0"], sigma, dmax),
                GermSeries.from_c2_list(item["hinf"], sigma, dmax),
            )
        return HornMapSequence(J=J, entries=entries)

    def save(self, path: str) -> None:
        from .util import write_json

        write_json(path, self.to_dict())

    @staticmethod
    def load(path: str, degree: int | None = None) -> "HornMapSequence":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
        return HornMapSequence.from_dict(payload, degree=degree)


def check_radii(seq: HornMapSequence, k1: float = 1.0, k: float = 5.0,
                c: float = 1.0) -> dict:
    """Check sigma_j >= k1 * exp(-k * exp(c * sqrt(|j|))) across the window."""
    margins = {}
    ok = True
    for j in seq.indices():
        bound = k1 * math.exp(-k * math.exp(c * math.sqrt(abs(j))))
        margins[j] = seq.sigma(j) - bound
        ok = ok and margins[j] >= 0
    return {"ok": ok, "margins": margins}


# ---------------------------------------------------------------------------
# h <-> g


TWO_PI_I = 2j * math.pi


def g_from_h(h: GermSeries, which: str) -> GermSeries:
    """Logarithm series of a horn map, the additive transform input.

    infty kind: g = log(h(t)/t) / (2 pi i).
    zero kind:  g = log(h^{-1}(t)/t) / (2 pi i)  (the inverse enters the
    gluing on the zero strips).

    The horn map must be tangent to the identity (c_1 = 1); the result is
    truncated one degree below ``h`` since the top coefficient of ``h``
    contributes only beyond it.
    """
    if which not in ("zero", "infty"):
        raise ValidationError(f"kind must be zero/infty, got {which!r}")
    if abs(h.c1 - 1.0) > 1e-12:
        raise ValidationError(
            f"horn map is not tangent to the identity (c1={h.c1}); "
            "normalize before taking the logarithm"
        )
    d = max(h.degree - 1, 1)
    poly = h.as_poly()
    if which == "zero":
        poly = ps.revert(poly, h.degree)
    # u = h(t)/t - 1 as a series in t of degree d
    u = np.zeros(d + 1, dtype=complex)
    u[1 : d + 1] = poly[2 : d + 2]
    logs = ps.log1p_series(u, d) / TWO_PI_I
    return GermSeries(logs[1:], h.sigma)


def h_from_g(g: GermSeries, which: str, sigma: float | None = None,
             degree: int | None = None) -> GermSeries:
    """Horn map from its logarithm series (inverse of :func:`g_from_h`)."""
    if which not in ("zero", "infty"):
        raise ValidationError(f"kind must be zero/infty, got {which!r}")
    if sigma is None:
        sigma = g.sigma
    d = g.degree + 1 if degree is None else degree
    u = TWO_PI_I * g.as_poly(d - 1)
    u = np.concatenate([u, np.zeros(max(0, d + 1 - u.size), dtype=complex)])[: d + 1]
    e = ps.exp_series(u, d)
    # h(t) = t * exp(2 pi i g(t)): shift the exponential up one power
    poly = np.zeros(d + 1, dtype=complex)
    poly[1:] = e[:d]
    if which == "zero":
        poly = ps.revert(poly, d)
    return GermSeries(poly[1:], sigma)


# ---------------------------------------------------------------------------
# symmetry and bounds


@dataclass(frozen=True)
class SymmetryReport:
    symmetric: bool
    max_deviation: float
    tol: float
    warnings: tuple

    def __bool__(self) -> bool:
        return self.symmetric


def check_symmetry(seq: HornMapSequence, tol: float = 1e-9) -> SymmetryReport:
    """Conjugate symmetry of the window: the inverse of h0_{1-j}, with
    conjugated coefficients, must equal hinf_j.

    Entries whose partner index 1-j falls outside the window are compared
    against the identity and flagged with a warning (partial-window check).
    """
    warnings = []
    max_dev = 0.0
    dmax = seq.max_degree()
    for j in seq.indices():
        partner = 1 - j
        if partner in seq.entries:
            h0p = seq.horn("zero", partner)
            lhs = np.conj(ps.revert(h0p.as_poly(dmax), dmax))
        else:
            warnings.append(
                f"partner index {partner} for j={j} is outside the window; "
                "compared against the identity"
            )
            lhs = np.zeros(dmax + 1, dtype=complex)
            lhs[1] = 1.0
        rhs = seq.horn("infty", j).as_poly(dmax)
        max_dev = max(max_dev, float(np.abs(lhs - rhs).max()))
    return SymmetryReport(
        symmetric=max_dev <= tol,
        max_deviation=max_dev,
        tol=tol,
        warnings=tuple(warnings),
    )


def check_uniform_bounds(seq: HornMapSequence, n_radii: int = 8,
                         n_angles: int = 64) -> tuple[float, float]:
    """Distortion constants over the whole window:

    d1 = sup |h(t) - t| / |t|^2,   d2 = sup |h'(t) - 1| / |t|,

    suprema over both kinds, all j, and discs |t| <= sigma_j (sampled on
    circles).  Finite by construction for polynomial jets; the two numbers
    feed the a-priori contraction estimates of the realization step.
    """
    d1 = 0.0
    d2 = 0.0
    angles = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    for j in seq.indices():
        for kind in ("zero", "infty"):
            h = seq.horn(kind, j)
            for r in np.linspace(h.sigma / n_radii, h.sigma, n_radii):
                t = r * angles
                d1 = max(d1, float(np.max(np.abs(h.evaluate(t) - t)) / r**2))
                d2 = max(d2, float(np.max(np.abs(h.derivative_evaluate(t) - 1.0)) / r))
    return d1, d2


# ---------------------------------------------------------------------------
# equivalence normalization


@dataclass
class Equivalence:
    """A linear identification between two windows.

    a.h0_j(t) = beta_{j-1} * b.h0_j(gamma_j * t)
    a.hinf_j(t) = gamma_j * b.hinf_j(beta_j * t)

    ``beta`` covers indices -J-1 .. J, ``gamma`` covers -J .. J.  When the
    windows carry no nonlinear information the scalars are only fixed up to
    a one-parameter family (``family=True``); root-of-unity ambiguities from
    t^m-symmetric data are resolved by enumeration and the number of
    verified solutions is recorded.
    """

    beta: dict
    gamma: dict
    family: bool
    n_solutions: int
    max_residual: float
    case: str


def _reliable_nonzero(g: GermSeries, k: int, floor: float) -> bool:
    c = g.coefficient(k)
    return abs(c) > max(3.0 * g.noise(k), floor)


def equivalence_normalize(a: HornMapSequence, b: HornMapSequence,
                          tol_rel: float = 1e-6) -> Equivalence | None:
    """Find rescalings identifying window ``a`` with window ``b``.

    Returns None when no identification exists; otherwise the scalars with
    diagnostics.  Coefficients below their recorded noise floors are treated
    as unknown and neither pin nor veto the identification.
    """
    if a.J != b.J:
        raise ValidationError("windows must share J to be compared")
    J = a.J
    dmax = min(a.max_degree(), b.max_degree())

    # linear-coefficient ratios fix all products beta_{j-1} gamma_j, gamma_j beta_j
    r0 = {j: a.horn("zero", j).c1 / b.horn("zero", j).c1 for j in a.indices()}
    rinf = {j: a.horn("infty", j).c1 / b.horn("infty", j).c1 for j in a.indices()}

    # chain with the free scalar s: beta_j = B_j * s, gamma_j = G_j / s
    B = {-J - 1: 1.0 + 0.0j}
    G = {}
    for j in range(-J, J + 1):
        G[j] = r0[j] / B[j - 1]
        B[j] = rinf[j] / G[j]

    def scaled_pair(kind: str, j: int, s: complex) -> tuple[complex, complex]:
        """(prefactor, argument scale) for this entry at free scalar s."""
        if kind == "zero":
            return B[j - 1] * s, G[j] / s
        return G[j] / s, B[j] * s

    # find a pinning coefficient: any entry with both sides reliable at
    # order p >= 2 determines s^(p-1)
    pin = None
    for j in a.indices():
        for kind in ("zero", "infty"):
            ga, gb = a.horn(kind, j), b.horn(kind, j)
            floor_a = 1e-12 * max(1.0, float(np.abs(ga.coeffs).max()))
            floor_b = 1e-12 * max(1.0, float(np.abs(gb.coeffs).max()))
            for p in range(2, dmax + 1):
                ra = _reliable_nonzero(ga, p, floor_a)
                rb = _reliable_nonzero(gb, p, floor_b)
                if ra and rb:
                    pin = (kind, j, p)
                    break
            if pin:
                break
        if pin:
            break

    def residual(s: complex) -> float:
        worst = 0.0
        for j in a.indices():
            for kind in ("zero", "infty"):
                ga, gb = a.horn(kind, j), b.horn(kind, j)
                pref, arg = scaled_pair(kind, j, s)
                floor_a = 1e-12 * max(1.0, float(np.abs(ga.coeffs).max()))
                floor_b = 1e-12 * max(1.0, float(np.abs(gb.coeffs).max()))
                for p in range(1, dmax + 1):
                    ca, cb = ga.coefficient(p), gb.coefficient(p)
                    factor = abs(pref * arg**p)
                    noise = 3.0 * (ga.noise(p) + factor * gb.noise(p)) \
                        + floor_a + factor * floor_b
                    pred = pref * arg**p * cb
                    err = abs(ca - pred)
                    scale = max(abs(ca), abs(pred))
                    if scale <= noise:
                        continue  # unknowable at this noise level
                    worst = max(worst, err / max(scale, 1e-300))
        return worst

    if pin is None:
        # no nonlinear content anywhere: one-parameter family
        res = residual(1.0)
        if res > tol_rel:
            return None
        beta = {j: B[j] for j in B}
        gamma = {j: G[j] for j in G}
        return Equivalence(beta, gamma, family=True, n_solutions=0,
                           max_residual=res, case="linear-family")

    kind, j, p = pin
    ca = a.horn(kind, j).coefficient(p)
    cb = b.horn(kind, j).coefficient(p)
    pref1, arg1 = scaled_pair(kind, j, 1.0)
    # ca = pref * arg^p * cb with pref*arg independent of s and
    # arg = arg1 / s (zero kind) or pref = pref1 / s ... both reduce to
    # s^(p-1) = known:   zero: ca = (pref1 s)(arg1/s)^p cb
    #                    infty: ca = (pref1/s)(arg1 s)^p cb
    target = ca / (pref1 * arg1**p * cb)
    if kind == "zero":
        # target = s^{1-p}
        s_pow = 1.0 / target
    else:
        # target = s^{p-1}
        s_pow = target
    n_roots = p - 1
    base = s_pow ** (1.0 / n_roots)
    solutions = []
    best = None
    for k in range(n_roots):
        s = base * np.exp(2j * np.pi * k / n_roots)
        res = residual(s)
        if best is None or res < best[1]:
            best = (s, res)
        if res <= tol_rel:
            solutions.append((s, res))
    if not solutions:
        return None
    s, res = solutions[0]
    beta = {j_: B[j_] * s for j_ in B}
    gamma = {j_: G[j_] / s for j_ in G}
    case = "generic" if len(solutions) == 1 else f"{len(solutions)}-fold symmetric"
    return Equivalence(beta, gamma, family=False, n_solutions=len(solutions),
                       max_residual=res, case=case)
