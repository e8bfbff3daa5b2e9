"""Command-line front end: realize, extract, roundtrip, verify-moduli, model, export.

One binary with subcommands.  Every numeric option can also be set in a
TOML config file (``--config``), with command-line flags taking precedence;
sections ``[ch]``, ``[iter]`` and ``[orbit]`` feed the quadrature,
iteration and extraction configs field by field.

Runs write their artifacts into a run directory: ``inputs.json`` (a
self-contained echo of everything needed to re-derive the run), the
command's report JSON, and CSV sample tables.  Reports are deterministic
-- sorted keys, floats at 17 significant digits, no timestamps -- so the
same inputs and seed produce byte-identical files.  Validation problems
exit with code 1, convergence problems with code 2, and every error path
prints a JSON error object on stderr.

CSV columns:
    atlas_samples.csv / germ_samples.csv:
        petal_kind, petal_j, re_zeta, im_zeta, re_<q>, im_<q>
        where <q> is the correction R (atlas) or the mapped point f(zeta).
    export / model grid output:
        re_zeta, im_zeta, re_value, im_value
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - python < 3.11
    import tomli as tomllib

from . import realize as rz
from .cauchy_heine import CHConfig
from .extract import FatouExtract, OrbitConfig, horn_maps_from_fatou, roundtrip
from .moduli import (
    HornMapSequence,
    check_radii,
    check_symmetry,
    check_uniform_bounds,
    g_from_h,
)
from .normal_form import (
    FormalClass,
    a_m,
    f0,
    f0_inverse,
    psi_nf,
    psi_nf_prime,
    x0_velocity,
)
from .surface import DomainSpec, PetalId, parse_domain
from .util import (
    ConvergenceError,
    ParahornError,
    ValidationError,
    json_dumps_det,
    write_csv,
    write_json,
)

_EVALS = {
    "psi_nf": psi_nf,
    "psi_nf_prime": psi_nf_prime,
    "f0": f0,
    "f0_inverse": f0_inverse,
    "x0_velocity": x0_velocity,
    "a_m": lambda cls, p: a_m(p, cls.m),
}


# ---------------------------------------------------------------------------
# configuration plumbing


@dataclass
class RunConfig:
    """Everything a subcommand needs, already parsed and validated.

    Built by merging command-line flags over the TOML config file over the
    dataclass defaults; ``extra`` carries command-specific leftovers
    (evaluator name, grid spec, run directory to re-derive, ...).
    """

    command: str
    cls: FormalClass | None = None
    domain: DomainSpec | None = None
    moduli: HornMapSequence | None = None
    ch: CHConfig | None = None
    iter_cfg: rz.IterationConfig | None = None
    orbit: OrbitConfig | None = None
    out: str = "parahorn_run"
    seed: int = 0
    degree: int | None = None
    require_symmetry: bool = False
    max_error: float | None = None
    extra: dict = field(default_factory=dict)


def _load_toml(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"{path} is not valid TOML: {exc}") from exc


def _pick(ns, name: str, file_cfg: dict, default=None):
    """Flag value if given, else config-file value, else default."""
    v = getattr(ns, name, None)
    if v is not None:
        return v
    return file_cfg.get(name, default)


def _make(cls_, section: dict, what: str):
    try:
        return cls_(**section)
    except TypeError as exc:
        raise ValidationError(f"bad {what} parameters: {exc}") from exc


def _build_configs(ns, file_cfg: dict, seq_j: int | None):
    """CHConfig / IterationConfig / OrbitConfig from file sections + flags."""
    ch_sec = dict(file_cfg.get("ch", {}))
    for flag, key in (("eps", "eps"), ("window_j", "J"), ("length", "length"),
                      ("nodes_per_unit", "nodes_per_unit")):
        v = getattr(ns, flag, None)
        if v is not None:
            ch_sec[key] = v
    if "J" not in ch_sec and seq_j is not None:
        ch_sec["J"] = seq_j
    ch = _make(CHConfig, ch_sec, "quadrature")

    it_sec = dict(file_cfg.get("iter", {}))
    for flag in ("max_steps", "tol", "threads"):
        v = getattr(ns, flag, None)
        if v is not None:
            it_sec[flag] = v
    it_sec.setdefault("threads", None)  # None = available cores
    iter_cfg = _make(lambda **kw: rz.IterationConfig(ch=ch, **kw), it_sec,
                     "iteration")

    orb_sec = dict(file_cfg.get("orbit", {}))
    for flag in ("max_orbit", "degree", "n_samples"):
        v = getattr(ns, flag, None)
        if v is not None:
            orb_sec[flag] = v
    orbit = _make(OrbitConfig, orb_sec, "orbit")
    return ch, iter_cfg, orbit


def _load_moduli(src: str, window_j: int | None) -> HornMapSequence:
    if src == "identity":
        return HornMapSequence.identity(window_j if window_j is not None else 1)
    return HornMapSequence.load(src)


def _run_config(ns) -> RunConfig:
    file_cfg = _load_toml(getattr(ns, "config", None))
    cfg = RunConfig(command=ns.command)
    cfg.out = _pick(ns, "out", file_cfg, "parahorn_run")
    cfg.seed = int(_pick(ns, "seed", file_cfg, 0))
    cfg.degree = _pick(ns, "degree", file_cfg)
    cfg.require_symmetry = bool(_pick(ns, "require_symmetry", file_cfg, False))
    cfg.max_error = _pick(ns, "max_error", file_cfg)

    m = int(_pick(ns, "m", file_cfg, 0))
    rho = float(_pick(ns, "rho", file_cfg, 0.0))
    cfg.cls = FormalClass(m, rho)

    if ns.command in ("realize", "extract", "roundtrip"):
        src = _pick(ns, "moduli", file_cfg)
        if src is None:
            raise ValidationError(
                f"{ns.command} needs --moduli (a JSON path or 'identity')"
            )
        cfg.moduli = _load_moduli(str(src), getattr(ns, "window_j", None))
        dom = _pick(ns, "domain", file_cfg)
        if dom is None:
            raise ValidationError(
                f"{ns.command} needs --domain (linear:a,b or quadratic:C,R)"
            )
        cfg.domain = dom if isinstance(dom, DomainSpec) else parse_domain(str(dom))
        cfg.ch, cfg.iter_cfg, cfg.orbit = _build_configs(ns, file_cfg, cfg.moduli.J)
    cfg.extra = {
        name: getattr(ns, name)
        for name in ("moduli_path", "eval", "zeta", "grid", "run", "petal",
                     "quantity", "out_file")
        if hasattr(ns, name)
    }
    return cfg


# ---------------------------------------------------------------------------
# shared output helpers


def _ensure_outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _fmt_complex(v: complex) -> str:
    v = complex(v)
    if v.imag == 0.0:
        return format(v.real, ".17g")
    return f"{v.real:.17g}{v.imag:+.17g}j"


def _parse_complex(text: str) -> complex:
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex number {text!r}") from exc


def _parse_grid(spec: str) -> np.ndarray:
    """Grid syntax ``x0:x1:n`` (real axis) or ``x0:x1:n@y`` (horizontal row)."""
    try:
        body, _, height = spec.partition("@")
        x0, x1, n = body.split(":")
        xs = np.linspace(float(x0), float(x1), int(n))
        return xs + 1j * (float(height) if height else 0.0)
    except ValueError as exc:
        raise ValidationError(
            f"cannot parse grid {spec!r}, expected x0:x1:n or x0:x1:n@y"
        ) from exc


def _parse_petal(text: str) -> PetalId:
    try:
        kind, j = text.split(":")
        return PetalId(int(j), kind)
    except ValueError as exc:
        raise ValidationError(
            f"cannot parse petal {text!r}, expected kind:j (e.g. plus:0)"
        ) from exc


def _domain_dict(d: DomainSpec) -> dict:
    return {"kind": d.kind, "a": d.a, "b": d.b, "C": d.C, "R": d.R,
            "re_floor": d.re_floor}


def _inputs_payload(cfg: RunConfig) -> dict:
    it = asdict(cfg.iter_cfg)
    it.pop("ch", None)
    return {
        "command": cfg.command,
        "moduli": cfg.moduli.to_dict(),
        "m": cfg.cls.m,
        "rho": cfg.cls.rho,
        "domain": _domain_dict(cfg.domain),
        "ch": asdict(cfg.ch),
        "iter": it,
        "orbit": asdict(cfg.orbit),
        "seed": cfg.seed,
    }


def _sample_grid(domain: DomainSpec, petal: PetalId, rng, n_re: int = 10,
                 n_rows: int = 5, span: float = 6.0) -> np.ndarray:
    """Per-petal sample points: central band rows, optional jittered abscissas."""
    h = petal.center
    x0 = domain.boundary_x(h) + 0.5
    xs = np.linspace(x0, x0 + span, n_re)
    if rng is not None and n_re > 1:
        xs = xs + rng.uniform(-0.25, 0.25, xs.shape) * (xs[1] - xs[0])
    ys = h + np.linspace(-0.35, 0.35, n_rows) * petal.halfwidth
    pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    return np.array([p for p in pts if domain.contains(complex(p))])


def _write_sample_csvs(outdir: str, atlas, germ, seed: int) -> None:
    rng = np.random.default_rng(seed) if seed else None
    atlas_rows, germ_rows = [], []
    for petal in atlas.petal_ids():
        pts = _sample_grid(atlas.domain, petal, rng)
        rv = np.asarray(atlas.r_value((petal.kind, petal.j), pts))
        fv = np.asarray(germ.evaluate((petal.kind, petal.j), pts))
        for p, r, f in zip(pts, rv, fv):
            base = [petal.kind, petal.j, float(p.real), float(p.imag)]
            atlas_rows.append(base + [float(r.real), float(r.imag)])
            germ_rows.append(base + [float(f.real), float(f.imag)])
    write_csv(os.path.join(outdir, "atlas_samples.csv"),
              ["petal_kind", "petal_j", "re_zeta", "im_zeta", "re_r", "im_r"],
              atlas_rows)
    write_csv(os.path.join(outdir, "germ_samples.csv"),
              ["petal_kind", "petal_j", "re_zeta", "im_zeta", "re_f", "im_f"],
              germ_rows)


def _model_residual(germ, domain: DomainSpec) -> float:
    """Sup of |f - f0| on a central-petal grid: distance to the model germ."""
    pts = _sample_grid(domain, PetalId(0, "plus"), None)
    fv = np.asarray(germ.evaluate(("plus", 0), pts))
    mv = np.asarray(f0(germ.cls, pts))
    return float(np.max(np.abs(fv - mv)))


def _gevrey_section(atlas) -> dict:
    """Both remainder reports plus the verdict line.

    Linear-domain corrections satisfy the stronger bound; quadratic-domain
    runs are expected to fail it and fit only the weak one, and the verdict
    string says which situation was measured.
    """
    lg = rz.gevrey_report(atlas, order=0.9, n_max=5, bound_kind="log_gevrey")
    qw = rz.gevrey_report(atlas, order=0.9, n_max=5, bound_kind="quadratic_weak")
    if lg.passed:
        verdict = "log_gevrey"
    elif qw.passed:
        verdict = "quadratic_weak only"
    else:
        verdict = "neither"
    return {"log_gevrey": lg.to_dict(), "quadratic_weak": qw.to_dict(),
            "verdict": verdict}


def _check_symmetry_gate(cfg: RunConfig) -> None:
    if cfg.require_symmetry:
        rep = check_symmetry(cfg.moduli)
        if not rep.symmetric:
            raise ValidationError(
                "moduli are not conjugation-symmetric "
                f"(max deviation {rep.max_deviation:.3g}) "
                "and --require-symmetry is set"
            )


# ---------------------------------------------------------------------------
# subcommands


def cmd_realize(cfg: RunConfig) -> int:
    """Realize a moduli window as a germ; write report and sample CSVs."""
    _check_symmetry_gate(cfg)
    outdir = _ensure_outdir(cfg.out)
    atlas = rz.iterate_fatou(cfg.moduli, cfg.cls, cfg.domain, cfg.iter_cfg)
    germ = rz.recover_germ(atlas)
    report = rz.realization_report(atlas, germ)
    report["model_residual"] = _model_residual(germ, atlas.domain)
    report["domain"] = _domain_dict(atlas.domain)
    report["formal_class"] = {"m": cfg.cls.m, "rho": cfg.cls.rho}
    report["gevrey"] = _gevrey_section(atlas)
    write_json(os.path.join(outdir, "inputs.json"), _inputs_payload(cfg))
    write_json(os.path.join(outdir, "report.json"), report)
    _write_sample_csvs(outdir, atlas, germ, cfg.seed)
    print(f"realized window J={cfg.moduli.J} in {report['steps']} steps; "
          f"cocycle residual {report['cocycle_residual_max']:.3g}, "
          f"gevrey verdict: {report['gevrey']['verdict']}")
    print(f"artifacts in {outdir}/: inputs.json report.json "
          "atlas_samples.csv germ_samples.csv")
    return 0


def cmd_extract(cfg: RunConfig) -> int:
    """Realize, then read the horn maps back off the germ by orbit sums."""
    _check_symmetry_gate(cfg)
    outdir = _ensure_outdir(cfg.out)
    atlas = rz.iterate_fatou(cfg.moduli, cfg.cls, cfg.domain, cfg.iter_cfg)
    germ = rz.recover_germ(atlas)
    fx = FatouExtract(germ, cfg.orbit)
    ext = horn_maps_from_fatou(fx, cfg.moduli.J, degree=cfg.degree)
    entries = []
    for j in ext.indices():
        for kind in ("zero", "infty"):
            h = ext.horn(kind, j)
            meta = h.meta or {}
            entry = {"kind": kind, "j": j, "sigma": h.sigma,
                     "inaccessible": bool(meta.get("inaccessible", False))}
            if not entry["inaccessible"]:
                g = g_from_h(h, kind)
                entry.update({
                    "rho": meta.get("rho", h.sigma),
                    "noise_floor": meta.get("floor", 0.0),
                    "g_c1": [g.c1.real, g.c1.imag],
                    "g_c1_noise": g.noise(1) if g.coeff_noise is not None
                    else h.noise(2),
                })
            entries.append(entry)
    d1, d2 = check_uniform_bounds(ext)
    report = {"J": ext.J, "entries": entries,
              "uniform_d1": d1, "uniform_d2": d2,
              "accessible": sum(1 for e in entries if not e["inaccessible"])}
    write_json(os.path.join(outdir, "inputs.json"), _inputs_payload(cfg))
    write_json(os.path.join(outdir, "extract_report.json"), report)
    ext.save(os.path.join(outdir, "extracted.json"))
    print(f"extracted {report['accessible']}/{len(entries)} transitions "
          f"(window J={ext.J}); uniform bound d1 = {d1:.6g}")
    print(f"artifacts in {outdir}/: inputs.json extracted.json "
          "extract_report.json")
    return 0


def cmd_roundtrip(cfg: RunConfig) -> int:
    """Realize, extract back, and compare linear coefficients per entry."""
    _check_symmetry_gate(cfg)
    outdir = _ensure_outdir(cfg.out)
    rep = roundtrip(cfg.moduli, cfg.cls, cfg.domain, iter_cfg=cfg.iter_cfg,
                    orbit_cfg=cfg.orbit, degree=cfg.degree)
    payload = rep.to_dict()
    write_json(os.path.join(outdir, "inputs.json"), _inputs_payload(cfg))
    write_json(os.path.join(outdir, "roundtrip.json"), payload)
    def short(re_im):
        v = complex(re_im[0], re_im[1])
        if v.imag == 0.0:
            return format(v.real, ".10g")
        return f"{v.real:.10g}{v.imag:+.10g}j"

    print(f"{'entry':>10}  {'recovered':>26}  {'reference':>26}  {'error':>12}")
    for e in payload["entries"]:
        name = f"{e['kind']}({e['j']})"
        print(f"{name:>10}  {short(e['recovered']):>26}  "
              f"{short(e['reference']):>26}  {e['error']:>12.6g}")
    for name in payload["inaccessible"]:
        print(f"{name:>10}  {'-- inaccessible on this domain --':>58}")
    print(f"max linear-coefficient error: {rep.max_linear_error:.6g}  "
          f"(report in {outdir}/roundtrip.json)")
    if cfg.max_error is not None and rep.max_linear_error > cfg.max_error:
        raise ConvergenceError(
            f"roundtrip error {rep.max_linear_error:.6g} exceeds the "
            f"--max-error bound {cfg.max_error:g}"
        )
    return 0


def cmd_verify_moduli(cfg: RunConfig) -> int:
    """Structural and quantitative checks of a moduli file."""
    seq = HornMapSequence.load(cfg.extra["moduli_path"])
    radii = check_radii(seq)
    sym = check_symmetry(seq)
    d1, d2 = check_uniform_bounds(seq)
    bounds_ok = math.isfinite(d1) and math.isfinite(d2)
    passed = bool(radii["ok"]) and bounds_ok
    if cfg.require_symmetry:
        passed = passed and sym.symmetric
    report = {
        "path": os.path.basename(cfg.extra["moduli_path"]),
        "J": seq.J,
        "max_degree": seq.max_degree(),
        "radii_ok": bool(radii["ok"]),
        "radii_margins": {str(j): v for j, v in radii["margins"].items()},
        "symmetric": bool(sym.symmetric),
        "uniform_d1": d1,
        "uniform_d2": d2,
        "passed": passed,
    }
    print(json_dumps_det(report))
    if not passed:
        _error_json(cfg.command, ValidationError("moduli failed verification"))
        return 1
    return 0


def cmd_model(cfg: RunConfig) -> int:
    """Evaluate a model-map quantity at a point or along a grid row."""
    name = cfg.extra.get("eval") or "psi_nf"
    if name not in _EVALS:
        raise ValidationError(
            f"unknown --eval {name!r}; choose from {sorted(_EVALS)}"
        )
    fn = _EVALS[name]
    if cfg.extra.get("zeta") is not None:
        v = fn(cfg.cls, _parse_complex(cfg.extra["zeta"]))
        print(_fmt_complex(complex(v)))
        return 0
    if cfg.extra.get("grid"):
        zs = _parse_grid(cfg.extra["grid"])
        vals = np.asarray(fn(cfg.cls, zs))
        rows = [[float(z.real), float(z.imag), float(v.real), float(v.imag)]
                for z, v in zip(zs, vals)]
        _emit_csv(cfg.extra.get("out_file"),
                  ["re_zeta", "im_zeta", "re_value", "im_value"], rows)
        return 0
    raise ValidationError("model needs --zeta or --grid")


def cmd_export(cfg: RunConfig) -> int:
    """Re-derive a saved run from its inputs.json and sample it on a grid.

    Atlases are not serialized; the run directory's ``inputs.json`` pins
    everything needed to rebuild one deterministically, which keeps saved
    runs small and makes every export reproducible from first principles.
    """
    rundir = cfg.extra.get("run")
    if not rundir:
        raise ValidationError("export needs --run pointing at a run directory")
    path = os.path.join(rundir, "inputs.json")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            inp = json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"no inputs.json under {rundir!r}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    seq = HornMapSequence.from_dict(inp["moduli"])
    cls = FormalClass(int(inp["m"]), float(inp["rho"]))
    domain = DomainSpec(**inp["domain"])
    ch = CHConfig(**inp["ch"])
    iter_cfg = rz.IterationConfig(ch=ch, **inp["iter"])
    atlas = rz.iterate_fatou(seq, cls, domain, iter_cfg)
    germ = rz.recover_germ(atlas)

    petal = _parse_petal(cfg.extra.get("petal") or "plus:0")
    quantity = cfg.extra.get("quantity") or "r"
    if cfg.extra.get("grid"):
        pts = _parse_grid(cfg.extra["grid"])
    else:
        rng = np.random.default_rng(cfg.seed) if cfg.seed else None
        pts = _sample_grid(atlas.domain, petal, rng)
    key = (petal.kind, petal.j)
    if quantity == "r":
        vals = np.asarray(atlas.r_value(key, pts))
    elif quantity == "f":
        vals = np.asarray(germ.evaluate(key, pts))
    elif quantity == "psi":
        vals = np.asarray([atlas.psi(key, complex(p)) for p in pts])
    else:
        raise ValidationError(
            f"unknown --quantity {quantity!r}; choose from ['f', 'psi', 'r']"
        )
    rows = [[float(p.real), float(p.imag), float(v.real), float(v.imag)]
            for p, v in zip(pts, vals)]
    _emit_csv(cfg.extra.get("out_file"),
              ["re_zeta", "im_zeta", f"re_{quantity}", f"im_{quantity}"], rows)
    return 0


def _emit_csv(path: str | None, header: list, rows: list) -> None:
    if path:
        write_csv(path, header, rows)
        print(f"wrote {len(rows)} rows to {path}")
        return
    writer = csv.writer(sys.stdout)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v
                         for v in row])


_DISPATCH = {
    "realize": cmd_realize,
    "extract": cmd_extract,
    "roundtrip": cmd_roundtrip,
    "verify-moduli": cmd_verify_moduli,
    "model": cmd_model,
    "export": cmd_export,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors are JSON on stderr, exit code 1."""

    def error(self, message):
        _error_json(self.prog, ValidationError(message))
        raise SystemExit(1)


def _add_common(p, orbit: bool = False):
    p.add_argument("--config", metavar="TOML",
                   help="config file; flags given here override its values")
    p.add_argument("--m", type=int, help="formal invariant m (default 0)")
    p.add_argument("--rho", type=float, help="formal invariant rho (default 0)")
    p.add_argument("--domain", help="linear:a,b or quadratic:C,R")
    p.add_argument("--moduli", help="moduli JSON path, or 'identity'")
    p.add_argument("--out", help="run directory (default parahorn_run)")
    p.add_argument("--seed", type=int, help="grid jitter seed; 0 disables jitter")
    p.add_argument("--threads", type=int,
                   help="worker threads (default: available cores)")
    p.add_argument("--require-symmetry", action="store_true", default=None,
                   help="refuse moduli that are not conjugation-symmetric")
    p.add_argument("--eps", type=float, help="near-line lens half-width")
    p.add_argument("--window-j", type=int, help="line window half-width J")
    p.add_argument("--length", type=float, help="integration line length")
    p.add_argument("--nodes-per-unit", type=int, help="quadrature density")
    p.add_argument("--max-steps", type=int, help="iteration step cap")
    p.add_argument("--tol", type=float, help="iteration stopping tolerance")
    if orbit:
        p.add_argument("--max-orbit", type=int, help="orbit length K")
        p.add_argument("--degree", type=int, help="extracted coefficients per map")
        p.add_argument("--n-samples", type=int, help="circle sample count")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="parahorn", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", help="moduli window -> germ on a domain",
                       description=cmd_realize.__doc__)
    _add_common(p)

    p = sub.add_parser("extract", help="realize, then read horn maps back",
                       description=cmd_extract.__doc__)
    _add_common(p, orbit=True)

    p = sub.add_parser("roundtrip", help="realize + extract + compare",
                       description=cmd_roundtrip.__doc__)
    _add_common(p, orbit=True)
    p.add_argument("--max-error", type=float,
                   help="exit 2 if the max linear-coefficient error exceeds this")

    p = sub.add_parser("verify-moduli", help="check a moduli JSON file",
                       description=cmd_verify_moduli.__doc__)
    p.add_argument("moduli_path", help="moduli JSON file to verify")
    p.add_argument("--config", metavar="TOML")
    p.add_argument("--require-symmetry", action="store_true", default=None)

    p = sub.add_parser("model", help="evaluate model-map quantities",
                       description=cmd_model.__doc__)
    p.add_argument("--config", metavar="TOML")
    p.add_argument("--m", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--eval", choices=sorted(_EVALS), default="psi_nf",
                   help="which quantity to evaluate")
    p.add_argument("--zeta", help="a single complex point, e.g. 1 or 2+0.5j")
    p.add_argument("--grid", help="x0:x1:n or x0:x1:n@y")
    p.add_argument("--out-file", help="CSV destination (default: stdout)")

    p = sub.add_parser("export", help="re-sample a saved run",
                       description=cmd_export.__doc__)
    p.add_argument("--run", required=True, help="run directory with inputs.json")
    p.add_argument("--petal", help="kind:j (default plus:0)")
    p.add_argument("--quantity", choices=["f", "psi", "r"], default="r",
                   help="what to sample")
    p.add_argument("--grid", help="x0:x1:n or x0:x1:n@y (default: petal grid)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-file", help="CSV destination (default: stdout)")
    p.add_argument("--config", metavar="TOML")
    return parser


def _error_json(command: str, exc: Exception) -> None:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc),
                         "command": str(command)}}
    print(json_dumps_det(payload), file=sys.stderr)


def main(argv=None) -> int:
    """Entry point: parse, dispatch, map errors to exit codes 1/2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _run_config(ns)
        return _DISPATCH[ns.command](cfg)
    except ValidationError as exc:
        _error_json(ns.command, exc)
        return 1
    except ConvergenceError as exc:
        _error_json(ns.command, exc)
        return 2
    except ParahornError as exc:
        _error_json(ns.command, exc)
        return 1
    except OSError as exc:
        _error_json(ns.command, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
