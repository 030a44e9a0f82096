"""Scenarios, reproducible runs and parameter sweeps.

A scenario is a TOML document.  Every run writes into
``<out>/<solver>-<hash>/`` where ``hash`` is the SHA-256 of the canonical JSON
form of the scenario, so identical scenarios share a directory and a finished
run is reused instead of recomputed.
"""
from __future__ import annotations

import copy
import csv
import datetime as _dt
import hashlib
import io
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .blowup import (
    CFLError,
    FDGrid,
    OdeBlowupInstance,
    critical_k0_sweep,
    fit_growth_exponent,
    glassey_functionals,
    holder_constant,
    lem2_lower_bound,
    ode_blowup_integrate,
    radial_fd_solve,
)
from .duhamel import (
    PicardDivergence,
    PicardGrid,
    decay_fit,
    kappa_range,
    picard_solve,
    verify_I,
    verify_I0_I1,
    zone_samples,
)
from .exponents import classify, exponent_table
from .radial_linear import (
    QuadratureError,
    RadialProfile,
    algebraic_profile,
    bump_profile,
    linear_field,
    smooth_profile,
    xkappa_norm,
    zero_profile,
)
from . import transforms as tr

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
OUT_ENV = "WAVECRIT_OUT"
DEFAULT_OUT = "wavecrit-runs"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_DIVERGENCE = 5

SOLVERS = ("exponents", "classify", "transform", "linear", "picard", "fd", "ode-lemma", "verify")
TRANSFORMS = {
    "dissipation_shift": tr.dissipation_shift,
    "time_reparam_sub1": tr.time_reparam_sub1,
    "time_reparam_super1": tr.time_reparam_super1,
    "exponential_reparam": tr.exponential_reparam,
    "mass_shift": tr.mass_shift,
    "liouville_mu2": tr.liouville_mu2,
}


class ScenarioError(ValueError):
    """Invalid scenario; ``problems`` lists ``(field, message)`` pairs."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{k}: {v}" for k, v in problems))


def default_out_root() -> Path:
    return Path(os.environ.get(OUT_ENV, DEFAULT_OUT))


# ---------------------------------------------------------------------------
# scenario


@dataclass
class Scenario:
    """Validated scenario.  Sections are plain dictionaries mirroring the TOML tables."""

    name: str
    solver: str
    problem: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    ode: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)
    transform: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    SECTIONS = ("problem", "data", "grid", "tolerances", "fit", "ode", "verify", "transform", "sweep")

    @classmethod
    def from_dict(cls, d: dict, solver: str | None = None) -> "Scenario":
        d = copy.deepcopy(d)
        unknown = set(d) - {"name", "solver", *cls.SECTIONS}
        if unknown:
            raise ScenarioError([(k, "unknown key") for k in sorted(unknown)])
        sc = cls(name=str(d.get("name", "scenario")), solver=solver or d.get("solver", ""),
                 **{k: dict(d.get(k, {})) for k in cls.SECTIONS})
        sc.validate()
        return sc

    @classmethod
    def from_toml(cls, path: str | os.PathLike, solver: str | None = None) -> "Scenario":
        with open(path, "rb") as fh:
            try:
                raw = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ScenarioError([("file", str(exc))]) from exc
        return cls.from_dict(raw, solver)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"name": self.name, "solver": self.solver}
        for k in self.SECTIONS:
            v = getattr(self, k)
            if v:
                d[k] = copy.deepcopy(v)
        return d

    def run_dict(self) -> dict:
        """The part of the scenario that determines the numbers (no sweep axes)."""
        d = self.to_dict()
        d.pop("sweep", None)
        return d

    @property
    def hash(self) -> str:
        blob = json.dumps(self.run_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_overrides(self, overrides: dict) -> "Scenario":
        d = self.to_dict()
        d.pop("sweep", None)
        for key, val in overrides.items():
            section, _, name = key.partition(".")
            if not name or section not in self.SECTIONS:
                raise ScenarioError([(key, "sweep axes must be '<section>.<field>'")])
            d.setdefault(section, {})[name] = val
        return Scenario.from_dict(d)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        errs: list[tuple[str, str]] = []
        if self.solver not in SOLVERS:
            errs.append(("solver", f"must be one of {', '.join(SOLVERS)}"))
            raise ScenarioError(errs)
        pb = self.problem
        need_problem = self.solver in ("classify", "transform", "picard", "fd")
        if need_problem:
            for k in ("n", "p"):
                if k not in pb:
                    errs.append((f"problem.{k}", "required"))
            if "p" in pb and not _num(pb["p"]) > 1:
                errs.append(("problem.p", "must be > 1"))
            if "n" in pb and not (isinstance(pb["n"], int) and pb["n"] >= 1):
                errs.append(("problem.n", "must be an integer >= 1"))
        if self.solver in ("linear", "picard", "fd"):
            errs += _check_profile(self.data, "data")
            if "position" in self.data:
                errs += _check_profile(self.data["position"], "data.position")
        if self.solver == "picard":
            if pb.get("n", 3) != 3:
                errs.append(("problem.n", "picard solver is three-dimensional"))
            kappa = self.data.get("kappa")
            if kappa is None:
                errs.append(("data.kappa", "required"))
            elif "p" in pb and _num(pb["p"]) > 1:
                kr = kappa_range(_num(pb["p"]))
                if kr.empty:
                    errs.append(("problem.p", "kappa range empty"))
                elif kappa not in kr:
                    errs.append(("data.kappa", f"outside the admissible range {kr.to_dict()}"))
        if self.solver == "fd":
            form = pb.get("form", "Damped")
            if form not in ("Damped", "WeightedWave"):
                errs.append(("problem.form", "must be Damped or WeightedWave"))
            if self.data.get("shape", "bump") not in ("bump", "zero"):
                errs.append(("data.shape", "finite differences need compact support (bump or zero)"))
            if "horizon" not in self.grid:
                errs.append(("grid.horizon", "required"))
        if self.solver == "transform" and self.transform.get("kind") not in TRANSFORMS:
            errs.append(("transform.kind", f"must be one of {', '.join(TRANSFORMS)}"))
        if self.solver == "ode-lemma":
            for k in ("p", "q", "K1"):
                if k not in self.ode:
                    errs.append((f"ode.{k}", "required"))
        if self.solver == "verify":
            pairs = self.verify.get("pairs")
            if not pairs or not all(isinstance(x, list) and len(x) == 2 for x in pairs):
                errs.append(("verify.pairs", "list of [p, kappa] pairs required"))
        if errs:
            raise ScenarioError(errs)


def _num(x) -> float:
    try:
        return float(x)
    except (TypeError, ValueError):
        return math.nan


def _check_profile(d: dict, prefix: str) -> list[tuple[str, str]]:
    errs = []
    shape = d.get("shape", "bump")
    if shape not in ("algebraic", "smooth", "bump", "zero"):
        errs.append((f"{prefix}.shape", "must be algebraic, smooth, bump or zero"))
    if shape != "zero" and not _num(d.get("epsilon")) > 0:
        errs.append((f"{prefix}.epsilon", "required, > 0"))
    if shape in ("algebraic", "smooth") and not _num(d.get("kappa")) > 1:
        errs.append((f"{prefix}.kappa", "required, > 1"))
    return errs


def make_profile(d: dict) -> RadialProfile:
    shape = d.get("shape", "bump")
    kappa = float(d.get("kappa", 2.0))
    if shape == "zero":
        return zero_profile(kappa)
    eps = float(d["epsilon"])
    if shape == "algebraic":
        return algebraic_profile(eps, kappa)
    if shape == "smooth":
        return smooth_profile(eps, kappa)
    return bump_profile(eps, float(d.get("radius", 1.0)), kappa)


def _spec(pb: dict) -> tr.ProblemSpec:
    keys = ("n", "p", "mu", "m", "form", "weight_exponent", "speed_exponent", "mass_coefficient",
            "initial_time", "nonlinearity_constant")
    return tr.ProblemSpec(**{k: pb[k] for k in keys if k in pb})


# ---------------------------------------------------------------------------
# manifest and outputs


@dataclass
class RunManifest:
    scenario_hash: str
    name: str
    solver: str
    version: str
    status: str
    exit_code: int
    started: str
    finished: str
    run_dir: str
    outputs: list[str] = field(default_factory=list)
    measurements: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    error: str | None = None
    scenario: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(**d)


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    path.write_text(buf.getvalue())


# ---------------------------------------------------------------------------
# dispatch


class _Out:
    def __init__(self, run_dir: Path):
        self.dir = run_dir
        self.files: list[str] = []
        self.measurements: dict = {}
        self.verdicts: dict = {}

    def json(self, name: str, obj) -> None:
        write_json(self.dir / name, obj)
        self.files.append(name)

    def csv(self, name: str, header, rows) -> None:
        write_csv(self.dir / name, header, rows)
        self.files.append(name)

    def field(self, name: str, fld) -> None:
        fld.to_csv(self.dir / name)
        self.files.append(name)


def _run_exponents(sc: Scenario, out: _Out) -> None:
    dims = tuple(sc.problem.get("dims", (1, 2, 3, 4, 5)))
    mus = tuple(float(m) for m in sc.problem.get("mus", (1.0, 2.0, 4.0)))
    rows = exponent_table(dims, mus)
    out.json("exponents.json", {"schema_version": SCHEMA_VERSION, "rows": rows})
    out.measurements["rows"] = len(rows)


def _run_classify(sc: Scenario, out: _Out) -> None:
    pb = sc.problem
    cases = pb.get("cases") or [[pb["n"], pb.get("mu", 2.0), pb.get("m", 0.0), pb["p"]]]
    res = []
    for n, mu, m, p in cases:
        v = classify(int(n), float(mu), float(m), float(p))
        res.append({"n": n, "mu": mu, "m": m, "p": p, **v.to_dict()})
    out.json("classification.json", {"schema_version": SCHEMA_VERSION, "results": res})
    out.verdicts["regime"] = res[0]["regime"] if len(res) == 1 else [r["regime"] for r in res]


def _run_transform(sc: Scenario, out: _Out) -> None:
    spec = _spec(sc.problem)
    new, dmap = TRANSFORMS[sc.transform["kind"]](spec)
    out.json("transform.json", {"schema_version": SCHEMA_VERSION, "kind": sc.transform["kind"],
                                "input": spec.to_dict(), "output": new.to_dict(),
                                "data_map": dmap.to_dict()})
    out.measurements["determinant"] = dmap.determinant


def _run_linear(sc: Scenario, out: _Out) -> None:
    g = make_profile(sc.data)
    gr = sc.grid
    t_max = float(gr.get("t_max", 20.0))
    r_max = float(gr.get("r_max", t_max + 20.0))
    dt, dr = float(gr.get("dt", 0.25)), float(gr.get("dr", gr.get("dt", 0.25)))
    t = np.linspace(0.0, t_max, int(round(t_max / dt)) + 1)
    r = np.linspace(0.0, r_max, int(round(r_max / dr)) + 1)
    fld = linear_field(g, t, r)
    kappa = float(sc.data.get("kappa", g.kappa))
    rep = xkappa_norm(fld, kappa)
    out.field("field.csv", fld)
    out.json("norm.json", {"schema_version": SCHEMA_VERSION, **rep.to_dict()})
    out.measurements.update(norm_total=rep.total, norm_u=rep.norm_u, norm_dru=rep.norm_dru,
                            constant=rep.total / g.epsilon if g.epsilon > 0 else 0.0)


def _run_picard(sc: Scenario, out: _Out) -> None:
    g = make_profile(sc.data)
    p, kappa = float(sc.problem["p"]), float(sc.data["kappa"])
    gr = sc.grid
    grid = PicardGrid(float(gr.get("h", 0.25)), float(gr.get("t_max", 20.0)), float(gr.get("r_out", 10.0)))
    tol = sc.tolerances
    rep = picard_solve(g, p, kappa, grid, tol=float(tol.get("tol", 1e-10)),
                       max_iter=int(tol.get("max_iter", 8)))
    window = sc.fit.get("window", [min(10.0, grid.t_max / 4), grid.t_max])
    slope = decay_fit(rep.field, tuple(window)) if g.epsilon > 0 else None
    out.field("field.csv", rep.field)
    out.json("iteration.json", {"schema_version": SCHEMA_VERSION, **rep.to_dict(),
                                "decay_slope_r0": slope, "fit_window": window})
    out.measurements.update(norm_final=rep.norms[-1], linear_norm=rep.linear_norm,
                            contraction_ratio=rep.contraction_ratio, iterations=rep.iterations,
                            decay_slope_r0=slope)
    out.verdicts["converged"] = rep.converged


def _run_fd(sc: Scenario, out: _Out) -> None:
    pb = dict(sc.problem)
    pb.setdefault("form", "Damped")
    if pb["form"] == "WeightedWave" and "weight_exponent" not in pb:
        # the undamped rewrite of the damped problem with the same mu and m
        damped = {k: v for k, v in pb.items() if k not in ("form", "mass_coefficient")}
        spec, _ = tr.mass_shift(_spec(damped))
    else:
        spec = _spec(pb)
    vel = make_profile(sc.data)
    pos = make_profile(sc.data["position"]) if "position" in sc.data else None
    gr = sc.grid
    grid = FDGrid(float(gr.get("dr", 0.05)), float(gr.get("cfl", 0.5)), gr.get("r_max"),
                  gr.get("save_dt", 0.5))
    horizon = float(gr["horizon"])
    fld = radial_fd_solve(spec, grid, horizon, data=(pos, vel))
    n = spec.n
    F, F1 = glassey_functionals(fld, n)
    rhs = lem2_lower_bound(pos, vel, n, fld.t, fld.r[-1])
    out.field("field.csv", fld)
    out.csv("functionals.csv", ["t", "F", "F1", "bound_rhs"], zip(fld.t, F, F1, rhs))
    window = sc.fit.get("window")
    growth = None
    if window and fld.t[-1] >= window[1] - 1e-9:
        growth = fit_growth_exponent(fld.t, F, tuple(window))
    c = holder_constant(fld, n, spec.p)
    diag = {"schema_version": SCHEMA_VERSION, "blowup_candidate": fld.meta["blowup_candidate"],
            "t_stop": fld.meta["t_stop"], "fitted_growth_exponent": growth, "fit_window": window,
            "holder_constant": c, "verdict": "BlewUp candidate" if fld.meta["blowup_candidate"]
            else "BoundedThroughHorizon"}
    out.json("diagnostics.json", diag)
    out.measurements.update(growth_exponent=growth, holder_constant=c, t_stop=fld.meta["t_stop"],
                            F_final=float(F[-1]))
    out.verdicts["fd"] = diag["verdict"]


def _run_ode(sc: Scenario, out: _Out) -> None:
    o = dict(sc.ode)
    horizon = float(o.pop("horizon", 1e4))
    kw = {k: float(o.pop(k)) for k in ("escape_threshold", "eta") if k in o}
    sweep = o.pop("sweep_K0", None)
    inst = OdeBlowupInstance(**{k: float(v) for k, v in o.items()})
    d = ode_blowup_integrate(inst, horizon=horizon, **kw)
    out.csv("ode_series.csv", ["t", "F", "dF"], zip(d.t, d.F_series, d.F1_series))
    res = {"schema_version": SCHEMA_VERSION, **d.to_dict()}
    if sweep:
        res["K0_sweep"] = [{"K0": k, **dd.to_dict()} for k, dd in
                           critical_k0_sweep(inst.p, inst.K1, sweep, R=inst.R, T1=inst.T1,
                                             horizon=horizon, **kw)]
    out.json("ode.json", res)
    out.measurements["T_star"] = d.estimated_Tstar
    out.verdicts["ode"] = d.verdict.value


def _run_verify(sc: Scenario, out: _Out) -> None:
    v = sc.verify
    xi = [float(x) for x in v.get("xi_grid", [10, 100, 1e3, 1e4])]
    per_zone = int(v.get("per_zone", 25))
    samples = zone_samples(per_zone, float(v.get("t_max", 200.0)), int(v.get("seed", 0)))
    rows, zones = [], []
    for p, kappa in v["pairs"]:
        for x, val, ratio in verify_I(float(p), float(kappa), xi):
            rows.append((p, kappa, x, val, ratio))
        if kappa in kappa_range(float(p)):
            rep = verify_I0_I1(float(p), float(kappa), samples)
            zones.append({"p": p, "kappa": kappa, "ceilings": rep.ceilings})
    out.csv("verify_I.csv", ["p", "kappa", "xi", "I", "ratio"], rows)
    out.json("verify_zones.json", {"schema_version": SCHEMA_VERSION, "samples": len(samples), "runs": zones})
    out.measurements["max_I_ratio"] = max(r[4] for r in rows)


DISPATCH = {
    "exponents": _run_exponents,
    "classify": _run_classify,
    "transform": _run_transform,
    "linear": _run_linear,
    "picard": _run_picard,
    "fd": _run_fd,
    "ode-lemma": _run_ode,
    "verify": _run_verify,
}


def run_dir_for(sc: Scenario, out_root: Path) -> Path:
    return Path(out_root) / f"{sc.solver}-{sc.hash[:16]}"


def run(sc: Scenario, out_root: str | os.PathLike | None = None, resume: bool = True) -> RunManifest:
    """Execute one scenario; errors are recorded in the manifest, never raised."""
    out_root = Path(out_root) if out_root is not None else default_out_root()
    rdir = run_dir_for(sc, out_root)
    mpath = rdir / "manifest.json"
    if resume and mpath.exists():
        try:
            m = RunManifest.from_dict(json.loads(mpath.read_text()))
            if m.status == "ok" and m.scenario_hash == sc.hash:
                return m
        except (ValueError, TypeError):
            pass
    rdir.mkdir(parents=True, exist_ok=True)
    out = _Out(rdir)
    started = _now()
    status, code, err = "ok", EXIT_OK, None
    try:
        DISPATCH[sc.solver](sc, out)
    except PicardDivergence as exc:
        status, code, err = "divergence", EXIT_DIVERGENCE, f"{exc}; differences={exc.differences}"
    except (ScenarioError, CFLError) as exc:
        status, code, err = "validation", EXIT_VALIDATION, str(exc)
    except (QuadratureError, FloatingPointError, ArithmeticError) as exc:
        status, code, err = "numerical", EXIT_NUMERICAL, str(exc)
    except ValueError as exc:
        status, code, err = "validation", EXIT_VALIDATION, str(exc)
    except Exception as exc:  # recorded, so a sweep can continue
        log.exception("run %s failed", sc.name)
        status, code, err = "error", EXIT_FAILURE, f"{type(exc).__name__}: {exc}"
    m = RunManifest(sc.hash, sc.name, sc.solver, __version__, status, code, started, _now(), str(rdir),
                    out.files, _jsonable(out.measurements), _jsonable(out.verdicts), err, sc.run_dict())
    write_json(mpath, m.to_dict())
    return m


# ---------------------------------------------------------------------------
# sweeps


def _run_isolated(args) -> dict:
    overrides, sc_dict, out_root = args
    try:
        sc = Scenario.from_dict(sc_dict)
    except ScenarioError as exc:
        return {"overrides": overrides, "manifest": None, "status": "validation", "error": str(exc)}
    m = run(sc, out_root)
    return {"overrides": overrides, "manifest": m.to_dict(), "status": m.status, "error": m.error}


def sweep(base: Scenario, axes: dict[str, list] | None = None, out_root=None,
          jobs: int = 1) -> tuple[list[dict], Path]:
    """Run every point of the grid; failures are recorded per point.

    Results come back in grid order whatever ``jobs`` is, and ``summary.csv``
    is written under ``out_root``.
    """
    out_root = Path(out_root) if out_root is not None else default_out_root()
    out_root.mkdir(parents=True, exist_ok=True)
    axes = axes if axes is not None else base.sweep.get("axes", {})
    points = []
    for ov in _product(axes):
        d = base.to_dict()
        d.pop("sweep", None)
        for key, val in ov.items():
            section, _, name = key.partition(".")
            d.setdefault(section, {})[name] = val
        points.append((ov, d, str(out_root)))
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_isolated, points))
    else:
        results = [_run_isolated(pt) for pt in points]
    summary = out_root / f"summary-{base.solver}-{base.hash[:16]}.csv"
    _write_summary(summary, sorted(axes), results)
    return results, summary


def _product(axes: dict) -> list[dict]:
    keys = sorted(axes)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(axes[k] for k in keys))]


def _write_summary(path: Path, keys: list[str], results: list[dict]) -> None:
    mkeys: list[str] = []
    for r in results:
        m = r["manifest"] or {}
        for k in list(m.get("measurements", {})) + [f"verdict.{v}" for v in m.get("verdicts", {})]:
            if k not in mkeys:
                mkeys.append(k)
    rows = []
    for r in results:
        m = r["manifest"] or {}
        meas = m.get("measurements", {})
        verd = {f"verdict.{k}": v for k, v in m.get("verdicts", {}).items()}
        rows.append([r["overrides"].get(k) for k in keys] + [r["status"], m.get("scenario_hash", "")]
                    + [meas.get(k, verd.get(k, "")) for k in mkeys])
    write_csv(path, keys + ["status", "scenario_hash"] + mkeys, rows)
