"""Blow-up laboratory.

* the test weight ``phi1`` and the functionals ``F = int u dx`` and
  ``F1 = int u phi1 e^-t dx``;
* an integrator for the extremal ODE ``F'' = K1 (t+R)^-q F^p``;
* a leapfrog finite-difference solver for the radial damped or weighted wave
  equation in dimensions 1, 2, 3;
* the radial Radon transform in three dimensions.

Blow-up reported by the finite-difference solver is operational (an overflow
guard), so it is labelled a candidate.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .radial_linear import RadialProfile, SpaceTimeField, quad
from .transforms import Form, ProblemSpec

log = logging.getLogger(__name__)

__all__ = [
    "phi1",
    "log_phi1",
    "sphere_area",
    "glassey_functionals",
    "lem2_lower_bound",
    "holder_constant",
    "fit_growth_exponent",
    "Verdict",
    "OdeBlowupInstance",
    "BlowupDiagnostics",
    "ode_blowup_integrate",
    "critical_k0_sweep",
    "FDGrid",
    "CFLError",
    "radial_fd_solve",
    "fd_blowup_candidate",
    "discrete_energy",
    "radon_n3",
]

OVERFLOW_GUARD = 1e12


def sphere_area(n: int) -> float:
    """``|S^(n-1)|``; 2 for ``n = 1``."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def phi1(r: float, n: int) -> float:
    """``int_{S^(n-1)} e^(x.omega) domega`` at ``|x| = r``, by quadrature over the sphere."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if n == 1:
        return math.exp(r) + math.exp(-r)
    if n == 2:
        return quad(lambda th: math.exp(r * math.cos(th)), 0.0, 2 * math.pi, tol=1e-12)
    if n == 3:
        inner = quad(lambda th: math.exp(r * math.cos(th)) * math.sin(th), 0.0, math.pi, tol=1e-12)
        return 2 * math.pi * inner
    raise ValueError("phi1 is implemented for n in {1, 2, 3}")


def log_phi1(r, n: int):
    """``log phi1`` in closed form, safe for large ``r``."""
    r = np.asarray(r, dtype=float)
    if n == 1:
        return r + np.log1p(np.exp(-2 * r))
    if n == 2:
        return np.log(2 * np.pi * special.i0e(r)) + r
    if n == 3:
        with np.errstate(divide="ignore", invalid="ignore"):
            # sinh(r)/r = e^r (1 - e^-2r) / (2r)
            small = r < 1e-8
            val = r + np.log(-np.expm1(-2 * np.where(small, 1.0, r)) / (2 * np.where(small, 1.0, r)))
        return np.where(small, np.log(4 * np.pi), np.log(4 * np.pi) + val)
    raise ValueError("log_phi1 is implemented for n in {1, 2, 3}")


def _radial_integral(r: np.ndarray, y: np.ndarray) -> np.ndarray:
    return integrate.trapezoid(y, r, axis=-1)


def glassey_functionals(fld: SpaceTimeField, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(F(t), F1(t))`` by composite quadrature over the sampled support."""
    w = sphere_area(n) * fld.r ** (n - 1)
    F = _radial_integral(fld.r, fld.u * w[None, :])
    logw = log_phi1(fld.r, n)[None, :] - fld.t[:, None]
    F1 = _radial_integral(fld.r, fld.u * np.exp(logw) * w[None, :])
    return F, F1


def lem2_lower_bound(f: RadialProfile | None, g: RadialProfile | None, n: int, t, r_max: float):
    """Right-hand side ``(1-e^-2t)/2 int (f+g) phi1 + e^-2t int f phi1`` without its constant."""
    area = sphere_area(n)

    def moment(prof):
        if prof is None:
            return 0.0
        hi = prof.support if prof.support is not None else r_max
        return area * quad(lambda r: float(prof(r)) * math.exp(float(log_phi1(r, n))) * r ** (n - 1),
                           0.0, hi, tol=1e-10)

    mf, mg = moment(f), moment(g)
    t = np.asarray(t, dtype=float)
    return 0.5 * (1 - np.exp(-2 * t)) * (mf + mg) + np.exp(-2 * t) * mf


def holder_constant(fld: SpaceTimeField, n: int, p: float, t_window=(1.0, math.inf)) -> float:
    """Smallest ``c`` with ``F'' >= c <t>^-((n+1)(p-1)) |F|^p`` over the window.

    ``F''`` is taken from the equation, ``<t>^-(p-1) int |u|^p dx``.
    """
    w = sphere_area(n) * fld.r ** (n - 1)
    F = _radial_integral(fld.r, fld.u * w[None, :])
    Fpp = (1 + fld.t) ** (-(p - 1)) * _radial_integral(fld.r, np.abs(fld.u) ** p * w[None, :])
    sel = (fld.t >= t_window[0]) & (fld.t <= t_window[1]) & (np.abs(F) > 0)
    c = Fpp[sel] * (1 + fld.t[sel]) ** ((n + 1) * (p - 1)) / np.abs(F[sel]) ** p
    return float(c.min()) if c.size else math.nan


def fit_growth_exponent(t, y, window: tuple[float, float], shift: float = 1.0) -> float:
    """OLS slope of ``log|y|`` against ``log(shift + t)`` on ``window``."""
    t, y = np.asarray(t, float), np.asarray(y, float)
    sel = (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12) & (np.abs(y) > 0)
    if sel.sum() < 2:
        raise ValueError("fewer than two usable samples in the fit window")
    return float(np.polyfit(np.log(shift + t[sel]), np.log(np.abs(y[sel])), 1)[0])


# ---------------------------------------------------------------------------
# ODE lemma engine


class Verdict(str, enum.Enum):
    BLEW_UP = "BlewUp"
    BOUNDED = "BoundedThroughHorizon"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class OdeBlowupInstance:
    """Extremal case ``F'' = K1 (t+R)^-q F^p`` of the differential inequality.

    If ``F0``/``dF0`` are omitted they follow the lower bound ``K0 (t+R)^a``
    and its derivative at ``T1``.
    """

    p: float
    q: float
    K1: float
    R: float = 1.0
    a: float = 1.0
    K0: float = 1.0
    F0: float | None = None
    dF0: float | None = None
    T1: float = 0.0

    def __post_init__(self):
        if not self.p > 1 or not self.K1 > 0 or not self.R > 0 or not self.K0 > 0 or self.T1 < 0:
            raise ValueError("need p > 1, K1 > 0, R > 0, K0 > 0, T1 >= 0")

    @property
    def initial(self) -> tuple[float, float]:
        base = self.T1 + self.R
        F0 = self.K0 * base ** self.a if self.F0 is None else self.F0
        dF0 = self.a * self.K0 * base ** (self.a - 1) if self.dF0 is None else self.dF0
        return F0, dF0

    @property
    def subcritical(self) -> bool:
        return self.a >= 1 and self.a > (self.q - 2) / (self.p - 1)

    @property
    def critical(self) -> bool:
        return math.isclose(self.a, (self.q - 2) / (self.p - 1)) and self.q >= self.p + 1

    def to_dict(self) -> dict:
        F0, dF0 = self.initial
        return {"p": self.p, "q": self.q, "K1": self.K1, "R": self.R, "a": self.a, "K0": self.K0,
                "F0": F0, "dF0": dF0, "T1": self.T1,
                "subcritical": self.subcritical, "critical": self.critical}


@dataclass
class BlowupDiagnostics:
    """Time series and verdict.  ``F1_series`` holds ``F'`` for ODE runs and ``F1`` for PDE runs."""

    t: np.ndarray
    F_series: np.ndarray
    F1_series: np.ndarray
    verdict: Verdict
    estimated_Tstar: float | None = None
    fitted_growth_exponent: float | None = None
    fit_window: tuple[float, float] | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.estimated_Tstar is not None) != (self.verdict is Verdict.BLEW_UP):
            raise ValueError("estimated_Tstar must be present exactly when the verdict is BlewUp")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "estimated_Tstar": self.estimated_Tstar,
            "fitted_growth_exponent": self.fitted_growth_exponent,
            "fit_window": list(self.fit_window) if self.fit_window else None,
            "samples": int(self.t.size),
            "details": self.details,
        }


@dataclass
class _Run:
    t: list
    F: list
    dF: list
    escaped: bool
    underflow: bool
    t_end: float
    tail: float


def _ode_run(inst: OdeBlowupInstance, horizon: float, escape: float, eta: float,
             max_steps: int = 2_000_000) -> _Run:
    p, q, K1, R = inst.p, inst.q, inst.K1, inst.R

    def rhs(t, F):
        return K1 * (t + R) ** (-q) * abs(F) ** p

    t = inst.T1
    F, dF = inst.initial
    ts, Fs, dFs = [t], [F], [dF]
    for _ in range(max_steps):
        if t >= horizon:
            return _Run(ts, Fs, dFs, False, False, t, 0.0)
        a = abs(F) if F != 0 else 1e-300
        rate = max(abs(dF) / a, math.sqrt(rhs(t, F) / a), 1.0 / (t + R))
        h = min(eta / rate, horizon - t)
        if h < 1e-14 * (1 + t):
            return _Run(ts, Fs, dFs, False, True, t, 0.0)
        # classical RK4 on (F, F')
        k1f, k1v = dF, rhs(t, F)
        k2f, k2v = dF + 0.5 * h * k1v, rhs(t + 0.5 * h, F + 0.5 * h * k1f)
        k3f, k3v = dF + 0.5 * h * k2v, rhs(t + 0.5 * h, F + 0.5 * h * k2f)
        k4f, k4v = dF + h * k3v, rhs(t + h, F + h * k3f)
        F += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f)
        dF += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        t += h
        if not (math.isfinite(F) and math.isfinite(dF)):
            return _Run(ts, Fs, dFs, False, True, t, 0.0)
        ts.append(t)
        Fs.append(F)
        dFs.append(dF)
        if F > escape:
            # near blow-up F ~ C (T - t)^(-2/(p-1)), so T - t = 2 F / ((p-1) F')
            return _Run(ts, Fs, dFs, True, False, t, 2.0 * F / ((p - 1) * dF))
    return _Run(ts, Fs, dFs, False, True, t, 0.0)


def ode_blowup_integrate(inst: OdeBlowupInstance, horizon: float = 1e4, escape_threshold: float = 1e10,
                         eta: float = 0.02) -> BlowupDiagnostics:
    """RK4 with a step proportional to the local time scale of ``F``.

    ``T*`` is the escape time plus the asymptotic tail, extrapolated from runs
    at ``eta`` and ``eta/2`` (fourth order).
    """
    coarse = _ode_run(inst, horizon, escape_threshold, eta)
    fine = _ode_run(inst, horizon, escape_threshold, eta / 2)
    details = {"instance": inst.to_dict(), "eta": eta, "escape_threshold": escape_threshold,
               "horizon": horizon, "steps": len(fine.t) - 1}
    t, F, dF = np.array(fine.t), np.array(fine.F), np.array(fine.dF)
    if coarse.escaped and fine.escaped:
        T_c = coarse.t_end + coarse.tail
        T_f = fine.t_end + fine.tail
        T_star = T_f + (T_f - T_c) / 15.0
        details.update(T_star_coarse=T_c, T_star_fine=T_f,
                       step_halving_change=abs(T_f - T_c) / abs(T_f))
        verdict, tstar = Verdict.BLEW_UP, float(T_star)
    elif not coarse.escaped and not fine.escaped and not fine.underflow and not coarse.underflow:
        verdict, tstar = Verdict.BOUNDED, None
        details["F_at_horizon"] = float(F[-1])
    else:
        verdict, tstar = Verdict.INCONCLUSIVE, None
        details["t_stop"] = float(fine.t_end)
    return BlowupDiagnostics(t, F, dF, verdict, tstar, details=details)


def critical_k0_sweep(p: float, K1: float, K0_values, R: float = 1.0, T1: float = 0.0,
                      horizon: float = 1e4, **kw) -> list[tuple[float, BlowupDiagnostics]]:
    """Critical instances ``q = p + 1``, ``a = 1`` for increasing ``K0``."""
    q = p + 1.0
    a = (q - 2.0) / (p - 1.0)
    out = []
    for K0 in K0_values:
        inst = OdeBlowupInstance(p=p, q=q, K1=K1, R=R, a=a, K0=float(K0), T1=T1)
        out.append((float(K0), ode_blowup_integrate(inst, horizon=horizon, **kw)))
    return out


# ---------------------------------------------------------------------------
# finite differences


class CFLError(ValueError):
    pass


@dataclass(frozen=True)
class FDGrid:
    """``dr``, Courant number ``cfl = dt/dr`` and output stride in time.

    ``r_max`` defaults to ``R_data + horizon + 4 dr``.
    """

    dr: float = 0.05
    cfl: float = 0.5
    r_max: float | None = None
    save_dt: float | None = None

    @property
    def dt(self) -> float:
        return self.cfl * self.dr


def cfl_limit(n: int) -> float:
    """Courant bound from Gershgorin on the discrete radial Laplacian (origin row ``4n/dr^2``)."""
    return 1.0 / math.sqrt(n)


def _laplacian_coeffs(r: np.ndarray, n: int, h: float):
    """Coefficients ``(lo, mid, hi)`` of the conservative radial Laplacian."""
    nr = r.size
    lo = np.zeros(nr)
    hi = np.zeros(nr)
    rp = (r + 0.5 * h) ** (n - 1)
    rm = np.abs(r - 0.5 * h) ** (n - 1)
    rc = np.where(r > 0, r, 1.0) ** (n - 1)
    hi[1:] = rp[1:] / rc[1:] / h**2
    lo[1:] = rm[1:] / rc[1:] / h**2
    # origin: Lap u ~ n u_rr, with the even ghost u_{-1} = u_1
    hi[0] = 2.0 * n / h**2
    mid = -(hi + lo)
    return lo, mid, hi


def _profile_values(prof: RadialProfile | None, r: np.ndarray) -> np.ndarray:
    if prof is None:
        return np.zeros_like(r)
    return np.asarray(prof(r), dtype=float) * np.ones_like(r)


def radial_fd_solve(spec: ProblemSpec, grid: FDGrid, horizon: float,
                    data: tuple[RadialProfile | None, RadialProfile | None] | None = None,
                    source=None) -> SpaceTimeField:
    """Leapfrog solve of the radial problem described by ``spec`` on ``[0, horizon]``.

    ``Damped``:       v_tt - Lap v + mu/<t> v_t + m/(4<t>^2) v = c <t>^w |v|^p
    ``WeightedWave``: u_tt - Lap u + k/<t>^2 u                 = c <t>^w |u|^p

    ``data`` (or ``spec.data``) is ``(initial value, initial velocity)``.
    ``source(u)`` overrides the power nonlinearity ``|u|^p`` (pass
    ``lambda u: 0 * u`` for the free equation).
    """
    if spec.form not in (Form.DAMPED, Form.WEIGHTED_WAVE):
        raise ValueError(f"radial_fd_solve handles Damped and WeightedWave, not {spec.form.value}")
    n = spec.n
    if n not in (1, 2, 3):
        raise ValueError("radial_fd_solve handles n in {1, 2, 3}")
    if spec.initial_time < 0:
        raise ValueError("initial_time < 0 is not supported by the solver")
    if grid.cfl <= 0 or grid.cfl > cfl_limit(n) + 1e-12:
        raise CFLError(f"cfl = {grid.cfl} exceeds the stability bound {cfl_limit(n):.4f} for n = {n}")
    f0, f1 = data if data is not None else (spec.data or (None, None))
    supports = [d.support for d in (f0, f1) if d is not None]
    if any(s is None for s in supports):
        raise ValueError("finite-difference data must be compactly supported")
    R_data = max(supports, default=0.0)

    h, dt = grid.dr, grid.dt
    r_max = grid.r_max if grid.r_max is not None else R_data + horizon + 4 * h
    nr = int(math.ceil(r_max / h)) + 1
    r = h * np.arange(nr)
    nsteps = int(round(horizon / dt))
    if abs(nsteps * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise ValueError("horizon must be a multiple of dt")
    stride = 1 if grid.save_dt is None else max(1, int(round(grid.save_dt / dt)))

    lo, mid, hi = _laplacian_coeffs(r, n, h)
    t0 = spec.initial_time
    p = spec.p
    cnl = spec.nonlinearity_constant
    w = spec.weight_exponent
    if spec.form is Form.DAMPED:
        mu, mass = spec.mu, spec.m / 4.0
    else:
        mu, mass = 0.0, spec.mass_coefficient
    nonlin = source if source is not None else (lambda u: np.abs(u) ** p)

    def lap(u, J):
        out = mid[:J] * u[:J]
        out[1:] += lo[1:J] * u[: J - 1]
        out += hi[:J] * u[1 : J + 1]
        return out

    def accel_static(t, u, J):
        # everything except the damping term
        return lap(u, J) - mass / (1 + t) ** 2 * u[:J] + cnl * (1 + t) ** w * nonlin(u[:J])

    def active(t):
        return min(nr - 1, int(math.ceil((R_data + (t - t0)) / h)) + 4)

    u_prev = _profile_values(f0, r)
    v0 = _profile_values(f1, r)
    u_prev[-1] = 0.0
    v0[-1] = 0.0
    J = active(t0)
    u_cur = u_prev.copy()
    a0 = accel_static(t0, u_prev, J) - mu / (1 + t0) * v0[:J]
    u_cur[:J] = u_prev[:J] + dt * v0[:J] + 0.5 * dt**2 * a0

    times = [t0]
    rows = [u_prev.copy()]
    blow = None
    for k in range(1, nsteps):
        t = t0 + k * dt
        J = active(t)
        beta = 0.5 * mu * dt / (1 + t)
        u_next = np.zeros(nr)
        u_next[:J] = (2 * u_cur[:J] - (1 - beta) * u_prev[:J] + dt**2 * accel_static(t, u_cur, J)) / (1 + beta)
        if k % stride == 0:
            times.append(t)
            rows.append(u_cur.copy())
        u_prev, u_cur = u_cur, u_next
        peak = np.max(np.abs(u_cur[:J])) if J else 0.0
        if not np.isfinite(peak) or peak > OVERFLOW_GUARD:
            blow = t + dt
            break
    if blow is None and nsteps % stride == 0:
        times.append(t0 + nsteps * dt)
        rows.append(u_cur.copy())
    meta = {"n": n, "p": p, "form": spec.form.value, "dr": h, "dt": dt, "horizon": horizon,
            "R_data": R_data, "blowup_candidate": blow is not None, "t_stop": blow}
    return SpaceTimeField(np.array(times), r, np.array(rows), origin="finite-difference", meta=meta)


def fd_blowup_candidate(spec: ProblemSpec, grid: FDGrid, horizon: float, data=None) -> dict:
    """Overflow time at ``dr`` and ``dr/2``; both must trip for a candidate."""
    a = radial_fd_solve(spec, grid, horizon, data)
    b = radial_fd_solve(spec, FDGrid(grid.dr / 2, grid.cfl, grid.r_max, grid.save_dt), horizon, data)
    ta, tb = a.meta["t_stop"], b.meta["t_stop"]
    cand = ta is not None and tb is not None
    return {"candidate": cand, "t_stop": ta, "t_stop_half": tb,
            "relative_change": abs(ta - tb) / tb if cand else None}


def discrete_energy(fld: SpaceTimeField, n: int) -> np.ndarray:
    """``int (u_t^2 + u_r^2) r^(n-1) dr`` at interior saved times (centered differences)."""
    ut = np.gradient(fld.u, fld.t, axis=0)
    ur = np.gradient(fld.u, fld.r, axis=1)
    return _radial_integral(fld.r, (ut**2 + ur**2) * fld.r[None, :] ** (n - 1))


# ---------------------------------------------------------------------------
# Radon transform


def radon_n3(fld: SpaceTimeField, t: float, rho: float) -> float:
    """``2 pi int_rho^inf u(t, r) r dr`` for a three-dimensional radial field."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    i = int(np.argmin(np.abs(fld.t - t)))
    if abs(fld.t[i] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"t = {t} is not a sampled time")
    r, u = fld.r, fld.u[i]
    if rho >= r[-1]:
        return 0.0
    j = int(np.searchsorted(r, rho, side="right"))
    u_rho = np.interp(rho, r, u)
    rr = np.concatenate([[rho], r[j:]])
    uu = np.concatenate([[u_rho], u[j:]])
    return float(2 * np.pi * integrate.trapezoid(uu * rr, rr))
