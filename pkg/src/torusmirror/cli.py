"""Batch front end: run configuration, verification suites and reports."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import cone as _cone
from .bundles import hom_dims, make_bundle
from .dolbeault import solve_h0
from .errors import ConfigError, TorusMirrorError
from .fukaya import m2_constant, m3_nontransversal_constant, triangles
from .lattice import LATTICE_TOL, TWO_PI, compose, lattice_offset
from .sl2z import reduction_matrix, transport_cone_class, transported_cone
from .theta import MIN_IM_TAU, ModuliParams

__all__ = ["RunConfig", "SuiteReport", "CheckRecord", "load_config", "run", "scan", "main", "SUITES"]

PI = math.pi
SCHEMA = 1
SUITES = ("cone", "m2", "homdims", "identity", "ctau", "sl2z")
CSV_DIGITS = 12


@dataclass
class RunConfig:
    """Validated run parameters. ``mu``, ``nu`` and ``eta_override`` are lattice coefficients."""

    tau: list = field(default_factory=lambda: [0.0, 1.0])
    mu: list = field(default_factory=lambda: [PI, 0.0])
    nu: list = field(default_factory=lambda: [0.0, 0.0])
    epsilon: float = PI / 2
    truncation: int = 25
    grid: int = 32
    tol: float = 1e-6
    suites: list = field(default_factory=lambda: ["cone"])
    eta_override: list | None = None
    tau_grid: list = field(default_factory=list)

    @property
    def tau_c(self) -> complex:
        return complex(self.tau[0], self.tau[1])

    @property
    def params(self) -> ModuliParams:
        return ModuliParams(self.tau_c)

    @property
    def mu_c(self) -> complex:
        return compose(self.mu[0], self.mu[1], self.tau_c)

    @property
    def nu_c(self) -> complex:
        return compose(self.nu[0], self.nu[1], self.tau_c)

    def to_dict(self) -> dict:
        return asdict(self)


def _pair(value, name, problems) -> list | None:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        problems[name] = f"expected a pair of numbers, got {value!r}"
        return None
    out = [float(v) for v in value]
    if not all(math.isfinite(v) for v in out):
        problems[name] = f"entries must be finite, got {value!r}"
        return None
    return out


def _number(value, name, problems, integer=False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok:
        problems[name] = f"expected {'an integer' if integer else 'a number'}, got {value!r}"
        return None
    if not integer and not math.isfinite(value):
        problems[name] = f"must be finite, got {value!r}"
        return None
    return int(value) if integer else float(value)


def validate_config(raw: dict) -> RunConfig:
    """Build a :class:`RunConfig`, collecting every field problem before raising."""
    if not isinstance(raw, dict):
        raise ConfigError({"<root>": "configuration must be a JSON object"})
    problems: dict[str, str] = {}
    cfg = RunConfig()
    known = set(RunConfig.__dataclass_fields__)
    for key in sorted(set(raw) - known):
        problems[key] = "unknown field"

    for name in ("tau", "mu", "nu"):
        if name in raw:
            val = _pair(raw[name], name, problems)
            if val is not None:
                setattr(cfg, name, val)
    if cfg.tau[1] <= 0:
        problems["tau"] = f"imaginary part must be positive, got {cfg.tau[1]!r}"
    elif cfg.tau[1] < MIN_IM_TAU:
        problems["tau"] = f"imaginary part below the supported minimum {MIN_IM_TAU}"

    if "epsilon" in raw:
        v = _number(raw["epsilon"], "epsilon", problems)
        if v is not None:
            cfg.epsilon = v
    if not 0 < cfg.epsilon < PI:
        problems["epsilon"] = f"must lie in (0, pi), got {cfg.epsilon!r}"

    for name, lo in (("truncation", 10), ("grid", 16)):
        if name in raw:
            v = _number(raw[name], name, problems, integer=True)
            if v is not None:
                setattr(cfg, name, v)
        if getattr(cfg, name) < lo:
            problems[name] = f"must be at least {lo}, got {getattr(cfg, name)!r}"

    if "tol" in raw:
        v = _number(raw["tol"], "tol", problems)
        if v is not None:
            cfg.tol = v
    if not cfg.tol >= 1e-12:
        problems["tol"] = f"must be at least 1e-12, got {cfg.tol!r}"

    if "suites" in raw:
        s = raw["suites"]
        if not isinstance(s, list) or not all(isinstance(x, str) for x in s):
            problems["suites"] = f"expected a list of suite names, got {s!r}"
        else:
            bad = [x for x in s if x not in SUITES]
            if bad:
                problems["suites"] = f"unknown suites {bad}; choose from {list(SUITES)}"
            elif len(set(s)) != len(s):
                problems["suites"] = "duplicate suite names"
            else:
                cfg.suites = list(s)

    if raw.get("eta_override") is not None:
        cfg.eta_override = _pair(raw["eta_override"], "eta_override", problems)

    if "tau_grid" in raw:
        g = raw["tau_grid"]
        if not isinstance(g, list):
            problems["tau_grid"] = "expected a list of [re, im] pairs"
        else:
            pts = []
            for i, item in enumerate(g):
                pt = _pair(item, f"tau_grid[{i}]", problems)
                if pt is not None and pt[1] <= 0:
                    problems[f"tau_grid[{i}]"] = f"imaginary part must be positive, got {pt[1]!r}"
                elif pt is not None and pt[1] < MIN_IM_TAU:
                    problems[f"tau_grid[{i}]"] = f"imaginary part below the supported minimum {MIN_IM_TAU}"
                pts.append(pt)
            cfg.tau_grid = pts

    if problems:
        raise ConfigError(problems)
    _check_feasible(cfg)
    return cfg


def _check_feasible(cfg: RunConfig) -> None:
    """Refuse tolerance and truncation combinations that cannot be honoured."""
    problems = {}
    if "cone" in cfg.suites and cfg.tol < 1e-8:
        problems["tol"] = f"the cone suite cannot certify below 1e-8 (got {cfg.tol:g})"
    taus = [cfg.tau_c] + [complex(*t) for t in cfg.tau_grid]
    for tau in taus:
        kappa = tau.imag / abs(tau) ** 2
        tail = math.exp(-2 * PI * kappa * (cfg.truncation - 1) ** 2)
        if tail > 1e-16:
            problems["truncation"] = (f"truncation {cfg.truncation} leaves a series tail of {tail:.1e} "
                                      f"at tau={tau}; raise it")
            break
    if problems:
        raise ConfigError(problems)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return validate_config({})
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError({"<file>": f"not valid JSON: {exc}"}) from None
    except OSError as exc:
        raise ConfigError({"<file>": str(exc)}) from None
    return validate_config(raw)


@dataclass
class CheckRecord:
    name: str
    measured: object
    threshold: object
    passed: bool


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0
    csv: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def check(self, name, measured, threshold, passed=None):
        if passed is None:
            passed = measured is not None and math.isfinite(measured) and measured <= threshold
        self.checks.append(CheckRecord(name, measured, threshold, bool(passed)))

    def body(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks], "details": self.details}


def _cpair(z) -> list:
    return [float(z.real), float(z.imag)]


def _suite_cone(cfg: RunConfig, debug_a0: bool) -> SuiteReport:
    rep = SuiteReport("cone")
    eta = None
    if cfg.eta_override is not None:
        eta = compose(cfg.eta_override[0], cfg.eta_override[1], cfg.tau_c)
    r = _cone.verify_cone(cfg.mu_c, cfg.nu_c, cfg.params, grid=cfg.grid, N=cfg.truncation,
                          tol=cfg.tol, epsilon=cfg.epsilon, eta=eta)
    rep.details = r.to_dict()
    if not r.applicable:
        klass = _cone.eta_class(cfg.mu_c, cfg.nu_c, cfg.params)
        a, b = lattice_offset(eta - klass, cfg.tau_c)
        dist = max(abs(a - round(a)), abs(b - round(b)))
        rep.check("eta_on_class", dist, LATTICE_TOL)
        return rep
    rep.check("phi_phitilde", r.residual_phi_phitilde, cfg.tol)
    rep.check("phitilde_phi", r.residual_phitilde_phi, cfg.tol)
    rep.check("offdiag", r.offdiag, cfg.tol)
    rep.check("diag_spread", r.diag_spread, cfg.tol)
    rep.check("c_tau_nonzero", abs(r.c_tau_direct), 1e-8, abs(r.c_tau_direct) > 1e-8)
    rep.csv["cone_grid_residuals.csv"] = (["x", "y", "res11", "res12", "res21", "res22"],
                                          r.grid_residuals.tolist())
    return rep


def _m2_config(cfg: RunConfig) -> tuple:
    p, q = cfg.mu
    s, t = cfg.nu
    return (p, q, s, t, p + s + PI, q + t + PI)


def _suite_m2(cfg: RunConfig, debug_a0: bool) -> SuiteReport:
    rep = SuiteReport("m2")
    params = cfg.params
    conf = _m2_config(cfg)
    val = m2_constant(conf, params, "triangles")
    closed = m2_constant(conf, params, "closed_form")
    generic = (conf[0], conf[1], conf[2], conf[3], conf[4] + 0.37, conf[5] + 0.21)
    g_tri = m2_constant(generic, params, "triangles")
    g_cf = m2_constant(generic, params, "closed_form")
    rep.check("m2_vanishing", abs(val), 1e-10)
    rep.check("m2_closed_form_vanishing", abs(closed), 1e-10)
    rep.check("routes_agree_generic", abs(g_tri - g_cf), 1e-8)
    rep.details = {"config": list(conf), "m2": _cpair(val), "generic_config": list(generic),
                   "generic_triangles": _cpair(g_tri), "generic_closed_form": _cpair(g_cf)}
    rows = [t.csv_row() for t in triangles(conf, params)]
    rep.csv["triangles.csv"] = (["index", "area_euclid", "area_sympl_re", "area_sympl_im", "holonomy_re",
                                 "holonomy_im", "sign", "term_re", "term_im"], rows)
    return rep


def homdim_pairs(limit: int = 3):
    """All coprime ``(n, a), (m, b)`` with ranks and ``|degree|`` up to ``limit`` and distinct slopes."""
    objs = [(n, a) for n in range(1, limit + 1) for a in range(-limit, limit + 1) if math.gcd(n, abs(a)) == 1]
    return [(x, y) for x in objs for y in objs if y[1] * x[0] != x[1] * y[0]]


def _suite_homdims(cfg: RunConfig, debug_a0: bool) -> SuiteReport:
    rep = SuiteReport("homdims")
    params = cfg.params
    tau = cfg.tau_c
    mismatches, min_gap, count = [], math.inf, 0
    for (n, a), (m, b) in homdim_pairs():
        B1 = make_bundle(n, a, cfg.mu_c, params)
        B2 = make_bundle(m, b, cfg.nu_c, params)
        est = solve_h0(B1, B2)
        count += 1
        min_gap = min(min_gap, est.gap)
        if not est.conclusive or est.dimension != hom_dims(B1, B2)[0]:
            mismatches.append([n, a, m, b, est.dimension, hom_dims(B1, B2)[0]])
    # six lattice shifts (h0 = 1) and two half-period controls (h0 = 0)
    shifts = [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 2), (2, -1), (0.5, 0), (0, 0.5)]
    ranks = [(1, 0), (2, 1), (3, -1), (1, 1), (2, -1), (3, 2), (2, 1), (1, 0)]
    for (n, a), (dp, dq) in zip(ranks, shifts):
        B1 = make_bundle(n, a, cfg.mu_c, params)
        B2 = make_bundle(n, a, cfg.mu_c + TWO_PI * (dp + dq * tau), params)
        est = solve_h0(B1, B2)
        count += 1
        min_gap = min(min_gap, est.gap)
        if not est.conclusive or est.dimension != hom_dims(B1, B2)[0]:
            mismatches.append([n, a, n, a, est.dimension, hom_dims(B1, B2)[0]])
    rep.check("mismatches", len(mismatches), 0)
    rep.check("min_spectral_gap", min_gap, 10.0, min_gap >= 10.0)
    rep.details = {"pairs": count, "mismatches": mismatches}
    return rep


def _suite_identity(cfg: RunConfig, debug_a0: bool) -> SuiteReport:
    rep = SuiteReport("identity")
    params = cfg.params
    xs = [TWO_PI * j / 16 for j in range(16)]
    for a in (-2, -1, 1, 2, 3):
        worst = max(abs(_cone.identity_id_sum(a, cfg.epsilon, cfg.mu_c, cfg.nu_c, params, x)) for x in xs)
        rep.check(f"a={a}", worst, 1e-8)
    if debug_a0:
        vals = [_cone.identity_id_sum(0, cfg.epsilon, cfg.mu_c, cfg.nu_c, params, x, allow_zero=True)
                for x in xs[:4]]
        rep.details["a0_values"] = [_cpair(v) for v in vals]
    return rep


def _suite_ctau(cfg: RunConfig, debug_a0: bool) -> SuiteReport:
    rep = SuiteReport("ctau")
    params = cfg.params
    tau = cfg.tau_c
    d, j = _cone.c_tau(params, "direct"), _cone.c_tau(params, "jacobi")
    m3 = m3_nontransversal_constant(params)
    cross = (np.conj(tau) - tau) / (4 * PI * tau) * 1j * m3
    rep.check("routes_agree_rel", abs(d - j) / abs(d), 1e-10)
    rep.check("nonzero", abs(d), 0.0, abs(d) > 0)
    rep.check("cross_side_rel", abs(d - cross) / abs(d), 1e-10)
    rep.details = {"c_tau_direct": _cpair(d), "c_tau_jacobi": _cpair(j), "m3": _cpair(m3)}
    return rep


def _suite_sl2z(cfg: RunConfig, debug_a0: bool) -> SuiteReport:
    rep = SuiteReport("sl2z")
    cases = [(1, 0, 1, 1), (2, 1, 3, 2), (1, 0, 2, 1), (3, 1, 2, 1), (1, -1, 1, 0), (2, -1, 1, 0)]
    klass = _cone.eta_class(cfg.mu_c, cfg.nu_c, cfg.params)
    bad_det, bad_slope, bad_class = 0, 0, 0
    out = []
    for n, a, m, b in cases:
        g = reduction_matrix(n, a, m, b)
        bad_det += g.det != 1
        bad_slope += transported_cone(g) != (m + n, a + b)
        bad_class += transport_cone_class(g, cfg.mu_c, cfg.nu_c, cfg.params) != klass
        out.append({"namb": [n, a, m, b], "matrix": g.as_rows()})
    rep.check("determinant_failures", bad_det, 0)
    rep.check("cone_slope_failures", bad_slope, 0)
    rep.check("class_failures", bad_class, 0)
    rep.details = {"matrices": out}
    return rep


_RUNNERS = {"cone": _suite_cone, "m2": _suite_m2, "homdims": _suite_homdims,
            "identity": _suite_identity, "ctau": _suite_ctau, "sl2z": _suite_sl2z}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v) + 0.0:.{CSV_DIGITS}g}"  # + 0.0 folds -0.0 into 0.0


def write_csv(path: Path, header: list, rows: list) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _sanitize(obj):
    # JSON has no NaN/inf; encode them as strings so the report stays valid
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.generic):
        return _sanitize(obj.item())
    return obj


def write_report(out: Path, reports: list[SuiteReport], cfg: RunConfig, deterministic: bool,
                 extra: dict | None = None) -> dict:
    """Write ``report.json`` (and ``timing.json`` in deterministic mode)."""
    out.mkdir(parents=True, exist_ok=True)
    body = _sanitize({"schema": SCHEMA, "config": cfg.to_dict(),
                      "suites": [r.body() for r in reports],
                      "passed": all(r.passed for r in reports)})
    if extra:
        body.update(_sanitize(extra))
    digest = hashlib.sha256(_dump(body).encode("utf-8")).hexdigest()
    doc = dict(body, digest=digest)
    timing = {r.suite: r.wall_time for r in reports}
    if deterministic:
        (out / "timing.json").write_text(_dump(timing), encoding="utf-8")
    else:
        doc["timing"] = timing
    (out / "report.json").write_text(_dump(doc), encoding="utf-8")
    for r in reports:
        for name, (header, rows) in r.csv.items():
            write_csv(out / name, header, rows)
    return doc


def run(cfg: RunConfig, out: str | Path | None = None, deterministic: bool = True,
        debug_allow_a0: bool = False, suites: list[str] | None = None) -> tuple[int, list[SuiteReport]]:
    """Run the requested suites in order; exit status 0 iff all pass."""
    names = list(cfg.suites if suites is None else suites)
    reports = []
    for name in names:
        t0 = time.perf_counter()
        rep = _RUNNERS[name](cfg, debug_allow_a0)
        rep.wall_time = time.perf_counter() - t0
        reports.append(rep)
    if out is not None:
        write_report(Path(out), reports, cfg, deterministic)
    return (0 if reports and all(r.passed for r in reports) else 1), reports


SCAN_HEADER = ["tau_re", "tau_im", "c_tau_direct_re", "c_tau_direct_im", "c_tau_jacobi_re",
               "c_tau_jacobi_im", "m2_abs", "cone_residual", "verdict"]


def scan(cfg: RunConfig, tau_grid: list[complex] | None = None) -> list[list]:
    """One row per modulus: both ``c_tau`` routes, ``|m2|`` at the vanishing point, cone residual, verdict."""
    grid = [complex(*t) for t in cfg.tau_grid] if tau_grid is None else [complex(t) for t in tau_grid]
    bad = {f"tau_grid[{i}]": f"imaginary part must be positive, got {t.imag!r}"
           for i, t in enumerate(grid) if not t.imag > 0}
    if bad:
        raise ConfigError(bad)
    rows = []
    for tau in grid:
        params = ModuliParams(tau)
        mu = compose(cfg.mu[0], cfg.mu[1], tau)
        nu = compose(cfg.nu[0], cfg.nu[1], tau)
        d, j = _cone.c_tau(params, "direct"), _cone.c_tau(params, "jacobi")
        m2 = abs(m2_constant(_m2_config(cfg), params, "triangles"))
        r = _cone.verify_cone(mu, nu, params, grid=cfg.grid, N=cfg.truncation, tol=cfg.tol,
                              epsilon=cfg.epsilon)
        res = max(r.residual_phi_phitilde, r.residual_phitilde_phi)
        verdict = r.verdict and m2 <= 1e-10 and abs(d - j) <= 1e-10 * abs(d)
        rows.append([tau.real, tau.imag, d.real, d.imag, j.real, j.imag, m2, res, bool(verdict)])
    return rows


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="directory for report.json and CSV dumps")
    common.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                        help="keep wall times out of report.json (default on)")
    common.add_argument("--debug-allow-a0", action="store_true",
                        help="also evaluate the a=0 branch of the identity sum")

    ap = argparse.ArgumentParser(prog="torusmirror", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suites", nargs="*",
                   help=f"suites to run ({', '.join(SUITES)}); default: config suites")
    c = sub.add_parser("ctau", parents=[common], help="evaluate c_tau by both routes")
    c.add_argument("--tau", nargs=2, type=float, metavar=("RE", "IM"))
    s = sub.add_parser("sl2z", parents=[common], help="lattice transport utilities")
    ssub = s.add_subparsers(dest="action", required=True)
    r = ssub.add_parser("reduce", parents=[common], help="reduction matrix for (n, a, m, b)")
    for name in ("n", "a", "m", "b"):
        r.add_argument(name, type=int)
    sc = sub.add_parser("scan", parents=[common], help="sweep moduli from the config tau_grid")
    sc.add_argument("--tau", nargs=2, type=float, action="append", metavar=("RE", "IM"),
                    help="add a modulus to the sweep (repeatable)")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "verify":
            bad = [x for x in args.suites if x not in SUITES]
            if bad:
                raise ConfigError({"suites": f"unknown suites {bad}; choose from {list(SUITES)}"})
            names = args.suites or cfg.suites
            cfg.suites = list(names)
            _check_feasible(cfg)
            code, reports = run(cfg, args.out, args.deterministic, args.debug_allow_a0)
            for rep in reports:
                print(f"{rep.suite}: {'PASS' if rep.passed else 'FAIL'}")
                for chk in rep.checks:
                    print(f"  {chk.name}: measured={chk.measured} threshold={chk.threshold} "
                          f"{'ok' if chk.passed else 'FAILED'}")
            return code
        if args.command == "ctau":
            if args.tau is not None:
                cfg = validate_config(dict(cfg.to_dict(), tau=list(args.tau), suites=["ctau"]))
            code, reports = run(cfg, args.out, args.deterministic, suites=["ctau"])
            print(_dump(reports[0].body()), end="")
            return code
        if args.command == "sl2z":
            g = reduction_matrix(args.n, args.a, args.m, args.b)
            doc = {"matrix": g.as_rows(), "det": g.det, "cone": list(transported_cone(g)),
                   "eta_class": _cpair(transport_cone_class(g, cfg.mu_c, cfg.nu_c, cfg.params))}
            if args.out:
                Path(args.out).mkdir(parents=True, exist_ok=True)
                (Path(args.out) / "report.json").write_text(_dump({"schema": SCHEMA, "sl2z": doc}),
                                                            encoding="utf-8")
            print(_dump(doc), end="")
            return 0
        if args.command == "scan":
            grid = None
            if args.tau:
                grid = [complex(re, im) for re, im in args.tau]
            rows = scan(cfg, grid)
            if args.out:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
                write_csv(out / "scan.csv", SCAN_HEADER, rows)
            else:
                w = csv.writer(sys.stdout, lineterminator="\n")
                w.writerow(SCAN_HEADER)
                for row in rows:
                    w.writerow([_fmt(v) for v in row])
            return 0 if all(r[-1] for r in rows) else 1
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except TorusMirrorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
