"""Duhamel operator for the weighted radial wave and its Picard iteration.

The nonlinear problem (three space dimensions, radial)

    u_tt - u_rr - (2/r) u_r = <t>^-(p-1) f(u),   u(0) = 0,  u_t(0) = g

is solved as the fixed point ``u = u_lin + L u`` with

    L u(t, r) = int_0^t <s>^-(p-1) int_{-1}^{1} H_u[s](t - s + r sigma) dsigma ds,
    H_u[s](rho) = rho f(u(s, rho)) / 2.

:func:`apply_L` and :func:`dr_rLu` evaluate single points by nested adaptive
quadrature on an interpolated field.  :func:`picard_solve` works on a uniform
lattice with ``dt == dr`` so that every ``t - s +- r`` is a lattice node and
``L`` reduces to sums of an exact-on-nodes antiderivative of ``H_u[s]``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exponents import strauss_p0
from .radial_linear import (
    QUAD_TOL,
    QuadratureError,
    RadialProfile,
    SpaceTimeField,
    jbracket,
    linear_field,
    quad,
    xkappa_norm,
)

log = logging.getLogger(__name__)

__all__ = [
    "Nonlinearity",
    "KappaRange",
    "kappa_range",
    "lemma_kappa_range",
    "PicardGrid",
    "IterationReport",
    "PicardDivergence",
    "apply_L",
    "dr_rLu",
    "apply_L_lattice",
    "picard_solve",
    "decay_fit",
    "verify_I",
    "verify_I0_I1",
    "ZONES",
    "zone_samples",
    "zone_of",
    "model_integral_I",
    "integral_I0",
    "integral_I1",
    "ZoneBoundReport",
]

P0_5 = strauss_p0(5)


@dataclass(frozen=True)
class Nonlinearity:
    """Even nonlinearity ``f``; defaults to ``|u|^p``.

    ``lipschitz`` is the constant ``C`` in
    ``|f(u) - f(v)| <= C |u - v| (|u|^(p-1) + |v|^(p-1))``.
    """

    p: float
    func: Callable | None = None
    lipschitz: float | None = None

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("p must be > 1")

    def __call__(self, u):
        if self.func is not None:
            return self.func(u)
        return np.abs(u) ** self.p

    @property
    def derivative_bound(self) -> float:
        return self.p if self.lipschitz is None else self.lipschitz


@dataclass(frozen=True)
class KappaRange:
    p: float
    lower: float
    upper: float
    empty: bool
    lower_inclusive: bool = True

    def __contains__(self, kappa: float) -> bool:
        if self.empty:
            return False
        # endpoints such as 2(p-1) are not exact in floating point
        slack = 1e-12 * max(1.0, abs(kappa))
        above = kappa >= self.lower - slack if self.lower_inclusive else kappa > self.lower + slack
        return above and kappa <= self.upper + slack

    def to_dict(self) -> dict:
        return {"p": self.p, "lower": self.lower, "upper": self.upper,
                "empty": self.empty, "lower_inclusive": self.lower_inclusive}


def kappa_range(p: float) -> KappaRange:
    """Decay rates ``kappa`` for which the iteration closes at exponent ``p``.

    Below 2 the interval is ``[(3-p)/(p-1), 2(p-1)]``, which degenerates to a
    point at ``p = p0(5)`` and is reported empty there; from 2 on it is
    ``(1, 2(p-1)]``.
    """
    if not p > 1:
        raise ValueError("p must be > 1")
    if p >= 2:
        return KappaRange(p, 1.0, 2.0 * (p - 1.0), False, lower_inclusive=False)
    lo, hi = (3.0 - p) / (p - 1.0), 2.0 * (p - 1.0)
    return KappaRange(p, lo, hi, empty=(p <= P0_5 or lo > hi))


def lemma_kappa_range(p: float) -> KappaRange:
    """Range in which the model integral ``I(xi) <~ <xi>^(p-kappa)`` holds."""
    if not p > 1:
        raise ValueError("p must be > 1")
    if p < 2:
        return kappa_range(p)
    if p == 2:
        return KappaRange(p, 1.0, 2.0, False, lower_inclusive=False)
    return KappaRange(p, 1.0 / (p - 1.0), 2.0 * (p - 1.0), False)


# ---------------------------------------------------------------------------
# pointwise operator


class _UniformBilinear:
    """Scalar bilinear interpolation of an even-in-r field on a uniform grid."""

    def __init__(self, fld: SpaceTimeField):
        t, r = fld.t, fld.r
        ht, hr = np.diff(t), np.diff(r)
        if not (np.allclose(ht, ht[0]) and np.allclose(hr, hr[0])):
            raise ValueError("apply_L needs a uniform grid")
        self.t0, self.r0 = float(t[0]), float(r[0])
        self.ht, self.hr = float(ht[0]), float(hr[0])
        self.nt, self.nr = t.size, r.size
        self.u = fld.u
        self.tmax, self.rmax = float(t[-1]), float(r[-1])

    def __call__(self, s: float, rho: float) -> float:
        rho = abs(rho)
        if s < self.t0 - 1e-12 or s > self.tmax + 1e-12 or rho > self.rmax + 1e-12:
            raise ValueError(f"point ({s}, {rho}) outside the field's grid")
        x = min(max((s - self.t0) / self.ht, 0.0), self.nt - 1.000000001)
        y = min(max((rho - self.r0) / self.hr, 0.0), self.nr - 1.000000001)
        i, j = int(x), int(y)
        a, b = x - i, y - j
        u = self.u
        return ((1 - a) * ((1 - b) * u[i, j] + b * u[i, j + 1])
                + a * ((1 - b) * u[i + 1, j] + b * u[i + 1, j + 1]))


def _grid_points(lo: float, hi: float, step: float, origin: float = 0.0) -> list[float]:
    k0 = math.ceil((lo - origin) / step)
    k1 = math.floor((hi - origin) / step)
    if k1 - k0 > 300:
        return []
    return [origin + k * step for k in range(k0, k1 + 1)]


def apply_L(u: SpaceTimeField, p: float, t: float, r: float,
            nonlinearity: Nonlinearity | None = None, tol: float = QUAD_TOL) -> float:
    """``L u(t, r)`` by nested adaptive quadrature on the bilinear interpolant of ``u``."""
    f = nonlinearity or Nonlinearity(p)
    ip = _UniformBilinear(u)
    if t < 0 or t > ip.tmax + 1e-12:
        raise ValueError("t outside the field's time range")
    r = abs(float(r))
    if t == 0:
        return 0.0

    def H(s, rho):
        return 0.5 * rho * float(f(ip(s, rho)))

    def weight(s):
        return (1.0 + s) ** (-(p - 1.0))

    if r == 0.0:
        # (1/r) int_{a-r}^{a+r} H -> 2 H(a)
        return quad(lambda s: weight(s) * 2.0 * H(s, t - s), 0.0, t,
                    points=_grid_points(0, t, ip.ht) + _grid_points(0, t, ip.hr, t), tol=tol)

    def inner(s):
        a = t - s
        if t <= r:
            lo, hi = r - a, r + a
        else:
            lo, hi = a - r, a + r
        pts = _grid_points(lo, hi, ip.hr) + _grid_points(-hi, -lo, ip.hr) + [0.0]
        return quad(lambda rho: H(s, rho), lo, hi, points=pts, tol=tol) / r

    kinks = _grid_points(0, t, ip.ht) + [t - r, (t - r) / 2, (t + r) / 2]
    return quad(lambda s: weight(s) * inner(s), 0.0, t, points=kinks, tol=tol)


def dr_rLu(u: SpaceTimeField, p: float, t: float, r: float,
           nonlinearity: Nonlinearity | None = None, tol: float = QUAD_TOL) -> float:
    """``d_r(r L u)(t, r) = int_0^t <s>^-(p-1) (H(t-s+r) + H(t-s-r)) ds``."""
    f = nonlinearity or Nonlinearity(p)
    ip = _UniformBilinear(u)
    r = float(r)

    def H(s, rho):
        return 0.5 * rho * float(f(ip(s, rho)))

    def integrand(s):
        return (1.0 + s) ** (-(p - 1.0)) * (H(s, t - s + r) + H(s, t - s - r))

    kinks = _grid_points(0, t, ip.ht) + [t - abs(r)]
    return quad(integrand, 0.0, t, points=kinks, tol=tol)


# ---------------------------------------------------------------------------
# lattice operator


@dataclass(frozen=True)
class PicardGrid:
    """Uniform lattice ``t_i = i h`` on ``[0, t_max]``, ``r_j = j h`` on ``[0, t_max + r_out]``.

    The iteration lives on the backward cone ``t + r <= t_max + r_out``;
    results are reported on ``r <= r_out``, where every value is exact with
    respect to the truncated domain.
    """

    h: float = 0.25
    t_max: float = 20.0
    r_out: float = 10.0

    def __post_init__(self):
        if self.h <= 0 or self.t_max <= 0 or self.r_out < 3 * self.h:
            raise ValueError("need h > 0, t_max > 0 and r_out >= 3h")

    @property
    def nt(self) -> int:
        return int(round(self.t_max / self.h)) + 1

    @property
    def nr(self) -> int:
        return int(round((self.t_max + self.r_out) / self.h)) + 1

    @property
    def n_out(self) -> int:
        return int(round(self.r_out / self.h)) + 1

    @property
    def t(self) -> np.ndarray:
        return self.h * np.arange(self.nt)

    @property
    def r(self) -> np.ndarray:
        return self.h * np.arange(self.nr)

    def valid_mask(self) -> np.ndarray:
        i = np.arange(self.nt)[:, None]
        j = np.arange(self.nr)[None, :]
        return i + j <= self.nr - 1


def _simpson_weights(n: int, h: float) -> np.ndarray:
    """Weights on ``n + 1`` equispaced nodes; Simpson with a 3/8 tail for odd ``n``."""
    w = np.zeros(n + 1)
    if n == 0:
        return w
    if n == 1:
        w[:] = h / 2
        return w
    if n == 3:
        w[:] = np.array([1, 3, 3, 1]) * 3 * h / 8
        return w
    m = n if n % 2 == 0 else n - 3
    w[0 : m + 1 : 2] += 2 * h / 3
    w[1 : m : 2] += 4 * h / 3
    w[0] -= h / 3
    w[m] -= h / 3
    if m < n:
        w[m : m + 4] += np.array([1, 3, 3, 1]) * 3 * h / 8
    return w


def _antiderivative_rows(H: np.ndarray, h: float, jmax: np.ndarray) -> np.ndarray:
    """Row-wise ``G[k, j] = int_0^{r_j} H[k, .]`` (4th order), trusting ``H[k, :jmax[k]+1]``.

    ``H`` is odd in ``r``, so the node left of the origin is ``-H[:, 1]``.
    """
    nk, nr = H.shape
    Hpad = np.concatenate([-H[:, 1:2], H, H[:, -1:]], axis=1)  # index shift by one
    # cell [j, j+1]: h/24 (-H[j-1] + 13 H[j] + 13 H[j+1] - H[j+2])
    cells = h / 24.0 * (-Hpad[:, 0:nr - 1] + 13.0 * Hpad[:, 1:nr] + 13.0 * Hpad[:, 2:nr + 1]
                        - Hpad[:, 3:nr + 2])
    rows = np.arange(nk)
    last = jmax - 1
    ok = last >= 2
    rk, lc = rows[ok], last[ok]
    # last trusted cell: backward stencil h/24 (H[j-2] - 5 H[j-1] + 19 H[j] + 9 H[j+1])
    cells[rk, lc] = h / 24.0 * (H[rk, lc - 2] - 5.0 * H[rk, lc - 1] + 19.0 * H[rk, lc]
                                + 9.0 * H[rk, lc + 1])
    G = np.zeros_like(H)
    G[:, 1:] = np.cumsum(cells, axis=1)
    return G


def apply_L_lattice(u: np.ndarray, grid: PicardGrid, p: float,
                    nonlinearity: Nonlinearity | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``(L u, d_r(r L u))`` on the lattice; zero outside the backward cone."""
    f = nonlinearity or Nonlinearity(p)
    h, nt, nr = grid.h, grid.nt, grid.nr
    if u.shape != (nt, nr):
        raise ValueError(f"u has shape {u.shape}, expected {(nt, nr)}")
    r = grid.r
    s = grid.t
    H = 0.5 * r[None, :] * f(u)
    jmax = (nr - 1) - np.arange(nt)
    G = _antiderivative_rows(H, h, jmax)
    wt = (1.0 + s) ** (-(p - 1.0))

    Lu = np.zeros((nt, nr))
    dLu = np.zeros((nt, nr))
    for i in range(1, nt):
        nj = nr - i  # valid j = 0 .. nr-1-i
        j = np.arange(nj)[None, :]
        k = np.arange(i + 1)[:, None]
        a = i - k + j
        d = i - k - j
        b = np.abs(d)
        w = (_simpson_weights(i, h) * wt[: i + 1])[:, None]
        Gk = G[: i + 1]
        Hk = H[: i + 1]
        kk = np.broadcast_to(k, a.shape)
        diff = Gk[kk, a] - Gk[kk, b]
        with np.errstate(divide="ignore", invalid="ignore"):
            Lu[i, 1:nj] = (w * diff[:, 1:]).sum(axis=0) / r[1:nj]
        Lu[i, 0] = (w[:, 0] * 2.0 * Hk[np.arange(i + 1), i - np.arange(i + 1)]).sum()
        dLu[i, :nj] = (w * (Hk[kk, a] + np.sign(d) * Hk[kk, b])).sum(axis=0)
    return Lu, dLu


# ---------------------------------------------------------------------------
# Picard iteration


class PicardDivergence(RuntimeError):
    def __init__(self, message: str, norms: list[float], differences: list[float]):
        super().__init__(message)
        self.norms = norms
        self.differences = differences


@dataclass
class IterationReport:
    norms: list[float]
    differences: list[float]
    converged: bool
    contraction_ratio: float
    ratios: list[float]
    field: SpaceTimeField
    linear_norm: float
    kappa: float
    p: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "kappa": self.kappa,
            "linear_norm": self.linear_norm,
            "norms": self.norms,
            "differences": self.differences,
            "ratios": self.ratios,
            "contraction_ratio": self.contraction_ratio,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _norm_out(grid: PicardGrid, u: np.ndarray, dru: np.ndarray, kappa: float) -> float:
    n = grid.n_out
    fld = SpaceTimeField(grid.t, grid.r[:n], u[:, :n], dru[:, :n], origin="picard")
    return xkappa_norm(fld, kappa).total


def picard_solve(g: RadialProfile, p: float, kappa: float, grid: PicardGrid | None = None,
                 tol: float = 1e-10, max_iter: int = 8,
                 nonlinearity: Nonlinearity | None = None,
                 enforce_range: bool = True) -> IterationReport:
    """Iterate ``u_{n+1} = u_lin + L u_n`` from ``u_0 = u_lin``.

    Stops once ``||u_{n+1} - u_n||_{X_kappa} <= tol * ||u_lin||_{X_kappa}``.
    Three consecutive growing differences raise :class:`PicardDivergence`.
    """
    grid = grid or PicardGrid()
    if enforce_range:
        if not p > P0_5:
            raise ValueError(f"p = {p} is not above p0(5) = {P0_5}: kappa range empty")
        kr = kappa_range(p)
        if kappa not in kr:
            raise ValueError(f"kappa = {kappa} outside the admissible range {kr}")
    f = nonlinearity or Nonlinearity(p)
    lin = linear_field(g, grid.t, grid.r)
    valid = grid.valid_mask()
    u_lin = np.where(valid, lin.u, 0.0)
    d_lin = np.where(valid, lin.dr_ru, 0.0)
    lin_norm = _norm_out(grid, u_lin, d_lin, kappa)

    u, du = u_lin, d_lin
    norms: list[float] = [lin_norm]
    diffs: list[float] = []
    converged = False
    growing = 0
    for it in range(1, max_iter + 1):
        Lu, dLu = apply_L_lattice(u, grid, p, f)
        u_new = np.where(valid, u_lin + Lu, 0.0)
        du_new = np.where(valid, d_lin + dLu, 0.0)
        diff = _norm_out(grid, u_new - u, du_new - du, kappa)
        norms.append(_norm_out(grid, u_new, du_new, kappa))
        if diffs and diff > diffs[-1]:
            growing += 1
        else:
            growing = 0
        diffs.append(diff)
        u, du = u_new, du_new
        log.debug("picard iteration %d: norm %.6e diff %.6e", it, norms[-1], diff)
        if not np.all(np.isfinite(u)):
            raise PicardDivergence("iterate became non-finite", norms, diffs)
        if growing >= 3:
            raise PicardDivergence("differences grew for 3 consecutive iterations", norms, diffs)
        if diff <= tol * lin_norm:
            converged = True
            break

    floor = 1e-13 * max(norms[-1], 1e-300)
    ratios = [b / a for a, b in zip(diffs, diffs[1:]) if a > floor and b > floor]
    ratio = max(ratios) if ratios else 0.0
    n = grid.n_out
    out = SpaceTimeField(grid.t, grid.r[:n], u[:, :n], du[:, :n], origin="picard",
                         meta={"p": p, "kappa": kappa, "h": grid.h, "t_max": grid.t_max,
                               "r_out": grid.r_out, "profile": g.name, **g.params})
    return IterationReport(norms, diffs, converged, ratio, ratios, out, lin_norm, kappa, p, len(diffs))


def decay_fit(fld: SpaceTimeField, t_window: tuple[float, float], r: float = 0.0) -> float:
    """Least-squares slope of ``log|u(t, r)|`` against ``log<t>`` on ``t_window``."""
    j = int(np.argmin(np.abs(fld.r - r)))
    sel = (fld.t >= t_window[0] - 1e-12) & (fld.t <= t_window[1] + 1e-12)
    y = np.log(np.abs(fld.u[sel, j]))
    x = np.log1p(fld.t[sel])
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------------------
# model integrals behind the nonlinear estimates


def _I_integrand(p: float, kappa: float, xi: float):
    a, b = p - 1.0, p * (kappa - 1.0)

    def f(eta):
        return (1.0 + abs(eta + xi)) * (1.0 + abs(eta - xi)) ** (-a) * (1.0 + abs(eta)) ** (-b)

    return f


def model_integral_I(p: float, kappa: float, xi: float) -> float:
    """``I(xi) = int_{-xi}^{xi} <eta+xi> <eta-xi>^-(p-1) <eta>^-(p(kappa-1)) deta``."""
    if xi <= 0:
        return 0.0
    f = _I_integrand(p, kappa, xi)
    # split on a geometric mesh toward the three corners at -xi, 0, xi
    edges = {-xi, 0.0, xi}
    for c in (-xi, 0.0, xi):
        d = 1.0
        while d < xi:
            for x in (c - d, c + d):
                if -xi < x < xi:
                    edges.add(x)
            d *= 4.0
    e = sorted(edges)
    total = 0.0
    for lo, hi in zip(e, e[1:]):
        total += quad(f, lo, hi, tol=1e-9)
    return total


def verify_I(p: float, kappa: float, xi_grid: Sequence[float]) -> list[tuple[float, float, float]]:
    """``(xi, I(xi), I(xi) <xi>^(kappa-p))`` for each ``xi``; the last entry should stay bounded."""
    if kappa not in lemma_kappa_range(p):
        raise ValueError(f"(p, kappa) = {(p, kappa)} outside the admissible range")
    out = []
    for xi in xi_grid:
        val = model_integral_I(p, kappa, float(xi))
        out.append((float(xi), val, val * (1.0 + xi) ** (kappa - p)))
    return out


ZONES = ("t>=2r", "r<=1,t<=2r", "r>=1,r<=t<=2r", "t<=r,r>=1")


def zone_of(t: float, r: float) -> str:
    if t >= 2 * r:
        return ZONES[0]
    if r <= 1:
        return ZONES[1]
    if t >= r:
        return ZONES[2]
    return ZONES[3]


def _weight_I0(p: float, kappa: float):
    a, b = p, p * (kappa - 1.0)

    def f(s, rho):
        x = abs(rho)
        return (1.0 + s + x) ** (-a) * (1.0 + abs(s - x)) ** (-b) * (1.0 + x)

    return f


def integral_I0(p: float, kappa: float, t: float, r: float, reduced: bool = False) -> float:
    """``I0`` (or ``I0'`` when ``reduced``, valid for ``t <= r``) by nested quadrature."""
    f = _weight_I0(p, kappa)

    def inner(s):
        a = t - s
        lo, hi = (r - a, r + a) if reduced else (a - r, a + r)
        pts = [0.0, s, -s]
        return quad(lambda rho: f(s, rho), lo, hi, points=pts, tol=1e-9)

    kinks = [t - r, (t - r) / 2, (t + r) / 2, max(t - 2 * r, 0.0)]
    return quad(lambda s: (1.0 + s) ** (-(p - 1.0)) * inner(s), 0.0, t, points=kinks, tol=1e-9)


def integral_I1(p: float, kappa: float, t: float, r: float, sign: int) -> float:
    """``I_{1,+}`` (``sign = 1``) or ``I_{1,-}`` (``sign = -1``)."""
    a, b = p, p * (kappa - 1.0)

    def f(s):
        x = t - s + sign * r
        return ((1.0 + s) ** (-(p - 1.0)) * (1.0 + s + abs(x)) ** (-a)
                * (1.0 + abs(s - abs(x))) ** (-b) * (1.0 + abs(x)))

    kinks = [t - r, (t - r) / 2, (t + r) / 2]
    return quad(f, 0.0, t, points=kinks, tol=1e-9)


@dataclass
class ZoneBoundReport:
    samples: list[dict] = field(default_factory=list)
    ceilings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"samples": self.samples, "ceilings": self.ceilings}


def verify_I0_I1(p: float, kappa: float, samples: Sequence[tuple[float, float]]) -> ZoneBoundReport:
    """Ratios of ``I0``/``I0'``, ``I_{1,-}``, ``I_{1,+}`` to their zone-wise bounds.

    ``ceilings[zone][quantity]`` is the largest ratio seen in that zone.
    """
    if kappa not in kappa_range(p):
        raise ValueError(f"kappa = {kappa} outside the admissible range for p = {p}")
    rep = ZoneBoundReport()
    for t, r in samples:
        t, r = float(t), float(r)
        zone = zone_of(t, r)
        tp, tm = 1.0 + t + r, 1.0 + abs(t - r)
        row = {"t": t, "r": r, "zone": zone}
        if zone == ZONES[3]:
            i0 = integral_I0(p, kappa, t, r, reduced=True)
            b0 = tm ** (-(kappa - 1.0))
        else:
            i0 = integral_I0(p, kappa, t, r)
            b0 = r * tp ** (-kappa) if zone in ZONES[:2] else tm ** (-(kappa - 1.0))
        i1m = integral_I1(p, kappa, t, r, -1)
        b1m = tm ** (-kappa) if zone == ZONES[0] else tm ** (-(kappa - 1.0))
        i1p = integral_I1(p, kappa, t, r, 1)
        b1p = tp ** (-kappa)
        row.update(I0=i0, I0_bound=b0, I0_ratio=i0 / b0 if b0 > 0 else 0.0,
                   I1m=i1m, I1m_bound=b1m, I1m_ratio=i1m / b1m,
                   I1p=i1p, I1p_bound=b1p, I1p_ratio=i1p / b1p)
        rep.samples.append(row)
        c = rep.ceilings.setdefault(zone, {"I0": 0.0, "I1m": 0.0, "I1p": 0.0, "count": 0})
        c["I0"] = max(c["I0"], row["I0_ratio"])
        c["I1m"] = max(c["I1m"], row["I1m_ratio"])
        c["I1p"] = max(c["I1p"], row["I1p_ratio"])
        c["count"] += 1
    return rep


def zone_samples(per_zone: int = 25, t_max: float = 200.0, seed: int = 0) -> list[tuple[float, float]]:
    """Stratified ``(t, r)`` samples, ``per_zone`` in each of :data:`ZONES`, log-uniform in ``t``."""
    rng = np.random.default_rng(seed)
    out: list[tuple[float, float]] = []

    def logu(lo, hi):
        return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))

    for _ in range(per_zone):
        t = logu(0.5, t_max)
        out.append((t, t / 2 * rng.uniform(0.0, 1.0)))                  # t >= 2r
        r = rng.uniform(0.05, 1.0)
        out.append((rng.uniform(r, 2 * r) if r < 1 else r, r))           # r <= 1, t <= 2r
        r = logu(1.0, t_max / 2)
        out.append((r * rng.uniform(1.0, 2.0), r))                       # r >= 1, r <= t <= 2r
        r = logu(1.0, t_max)
        out.append((r * rng.uniform(0.01, 1.0), r))                      # t <= r, r >= 1
    return out
