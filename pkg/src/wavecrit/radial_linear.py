"""Free radial wave in three space dimensions and the weighted ``X_kappa`` norm.

For data ``u(0) = 0``, ``u_t(0) = g`` with ``g`` even in ``r`` the solution is

    u(t, r) = int_{-1}^{1} H(t + r s) ds = (1/r) int_{t-r}^{t+r} H(rho) drho,
    H(rho) = rho g(rho) / 2,

and ``d_r(r u) = H(t + r) + H(t - r)`` exactly.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "QuadratureError",
    "RadialProfile",
    "algebraic_profile",
    "smooth_profile",
    "bump_profile",
    "zero_profile",
    "SpaceTimeField",
    "WeightedNormReport",
    "h_of",
    "linear_solution",
    "dr_ru_linear",
    "linear_field",
    "xkappa_norm",
    "radial_wave_residual",
    "QUAD_TOL",
]

QUAD_TOL = 1e-10
QUAD_LIMIT = 400


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, value: float = math.nan, error: float = math.nan):
        super().__init__(f"{message} (value={value!r}, estimated error={error!r})")
        self.value = value
        self.error = error


def jbracket(x):
    """``<x> = 1 + |x|``."""
    return 1.0 + np.abs(x)


def quad(f: Callable[[float], float], a: float, b: float, points=None, tol: float = QUAD_TOL) -> float:
    """Adaptive Gauss-Kronrod on ``[a, b]``; raises when the error estimate exceeds ``tol``."""
    if a == b:
        return 0.0
    lo, hi = (a, b) if a < b else (b, a)
    pts = None
    if points is not None:
        pts = sorted({float(x) for x in points if lo < x < hi})
        pts = pts or None
    val, err = integrate.quad(f, lo, hi, points=pts, epsabs=tol * 1e-2, epsrel=1e-12, limit=QUAD_LIMIT)
    if not np.isfinite(val) or err > tol * max(1.0, abs(val)):
        raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge", val, err)
    return val if a < b else -val


@dataclass(frozen=True)
class RadialProfile:
    """Even radial datum with its derivative and decay metadata.

    ``g`` and ``g_prime`` accept arrays; evenness is built in by evaluating on
    ``|r|`` (``g_prime`` is odd accordingly).  ``support`` is the radius of the
    support for compactly supported shapes, ``None`` otherwise.
    """

    g: Callable
    g_prime: Callable
    epsilon: float
    kappa: float
    name: str = "custom"
    support: float | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, r):
        return self.g(r)

    def derivative(self, r):
        return self.g_prime(r)

    def scaled(self, factor: float) -> "RadialProfile":
        g, gp = self.g, self.g_prime
        return RadialProfile(
            lambda r: factor * g(r),
            lambda r: factor * gp(r),
            abs(factor) * self.epsilon,
            self.kappa,
            name=self.name,
            support=self.support,
            params={**self.params, "epsilon": abs(factor) * self.epsilon},
        )

    def combine(self, a: float, other: "RadialProfile", b: float) -> "RadialProfile":
        f, fp, g, gp = self.g, self.g_prime, other.g, other.g_prime
        sup = None if self.support is None or other.support is None else max(self.support, other.support)
        return RadialProfile(
            lambda r: a * f(r) + b * g(r),
            lambda r: a * fp(r) + b * gp(r),
            abs(a) * self.epsilon + abs(b) * other.epsilon,
            min(self.kappa, other.kappa),
            name="combination",
            support=sup,
        )

    def decay_constant(self, r) -> float:
        """Smallest ``C`` with ``|g| <= C eps <r>^-(k+1)`` and ``|g'| <= C eps <r>^-(k+2)`` on ``r``."""
        r = np.asarray(r, dtype=float)
        if self.epsilon == 0:
            return 0.0
        w = jbracket(r)
        c0 = np.max(np.abs(self.g(r)) * w ** (self.kappa + 1))
        c1 = np.max(np.abs(self.g_prime(r)) * w ** (self.kappa + 2))
        return float(max(c0, c1) / self.epsilon)


def algebraic_profile(epsilon: float, kappa: float) -> RadialProfile:
    """``g(r) = eps <r>^-(kappa+1)``; Lipschitz but not C^1 at ``r = 0``."""

    def g(r):
        return epsilon * jbracket(r) ** (-(kappa + 1.0))

    def gp(r):
        r = np.asarray(r, dtype=float)
        return -(kappa + 1.0) * epsilon * np.sign(r) * jbracket(r) ** (-(kappa + 2.0))

    return RadialProfile(g, gp, epsilon, kappa, "algebraic", None, {"epsilon": epsilon, "kappa": kappa})


def smooth_profile(epsilon: float, kappa: float) -> RadialProfile:
    """``g(r) = eps (1 + r^2)^-((kappa+1)/2)``: smooth, same decay as :func:`algebraic_profile`."""
    a = (kappa + 1.0) / 2.0

    def g(r):
        r = np.asarray(r, dtype=float)
        return epsilon * (1.0 + r * r) ** (-a)

    def gp(r):
        r = np.asarray(r, dtype=float)
        return -2.0 * a * epsilon * r * (1.0 + r * r) ** (-a - 1.0)

    return RadialProfile(g, gp, epsilon, kappa, "smooth", None, {"epsilon": epsilon, "kappa": kappa})


def bump_profile(epsilon: float, radius: float = 1.0, kappa: float = 2.0) -> RadialProfile:
    """``g(r) = eps (1 - (r/R)^2)^3`` on ``|r| < R``, zero outside (C^2, nonnegative)."""

    def g(r):
        s = 1.0 - (np.asarray(r, dtype=float) / radius) ** 2
        return epsilon * np.where(s > 0, s, 0.0) ** 3

    def gp(r):
        r = np.asarray(r, dtype=float)
        s = 1.0 - (r / radius) ** 2
        return np.where(s > 0, -6.0 * epsilon * r / radius**2 * np.where(s > 0, s, 0.0) ** 2, 0.0)

    return RadialProfile(g, gp, epsilon, kappa, "bump", radius,
                         {"epsilon": epsilon, "radius": radius, "kappa": kappa})


def zero_profile(kappa: float = 2.0) -> RadialProfile:
    return RadialProfile(lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                         lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                         0.0, kappa, "zero", 0.0, {})


def h_of(g: RadialProfile) -> Callable:
    """``H_g(rho) = rho g(rho) / 2``, odd in ``rho``."""
    gg = g.g

    def H(rho):
        rho = np.asarray(rho, dtype=float)
        return 0.5 * rho * gg(rho)

    return H


def _h_prime(g: RadialProfile) -> Callable:
    def Hp(rho):
        rho = np.asarray(rho, dtype=float)
        return 0.5 * (g.g(rho) + rho * g.g_prime(rho))

    return Hp


def linear_solution(g: RadialProfile, t: float, r: float) -> float:
    """``u_lin(t, r)`` by adaptive quadrature over ``sigma`` in ``[-1, 1]``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    r = abs(float(r))
    t = float(t)
    if r == 0.0:
        return float(t * g.g(t))
    H = h_of(g)
    kinks = [-t / r] if r > t else []
    if g.support is not None:
        kinks += [(-g.support - t) / r, (g.support - t) / r]
    return quad(lambda s: float(H(t + r * s)), -1.0, 1.0, points=kinks)


def dr_ru_linear(g: RadialProfile, t, r):
    """``d_r(r u_lin) = H(t + r) + H(t - r)``; vectorized."""
    H = h_of(g)
    return H(np.add(t, r)) + H(np.subtract(t, r))


def _antiderivative(g: RadialProfile, x: np.ndarray) -> np.ndarray:
    """``G(x) = int_0^x H`` at nonnegative points ``x`` by chained quadrature."""
    H = h_of(g)
    xs = np.unique(np.round(x, 12))
    G = np.empty_like(xs)
    acc, prev = 0.0, 0.0
    pts = [] if g.support is None else [g.support]
    for i, xi in enumerate(xs):
        acc += quad(lambda s: float(H(s)), prev, xi, points=pts, tol=QUAD_TOL * 1e-2)
        G[i] = acc
        prev = xi
    return np.interp(np.round(x, 12), xs, G)


def linear_field(g: RadialProfile, t_grid, r_grid) -> "SpaceTimeField":
    """Sample ``u_lin`` and ``d_r(r u_lin)`` on a tensor grid.

    Uses ``u = (G(t + r) - G(|t - r|)) / r`` with ``G`` an antiderivative of
    ``H`` accumulated by adaptive quadrature between consecutive abscissae, so
    each cell costs no new quadrature.  Cells with ``r`` below ``1e-6`` go
    through :func:`linear_solution` to avoid cancellation.
    """
    t = np.asarray(t_grid, dtype=float)
    r = np.asarray(r_grid, dtype=float)
    T, R = np.meshgrid(t, r, indexing="ij")
    if g.epsilon == 0:
        z = np.zeros_like(T)
        return SpaceTimeField(t, r, z, z.copy(), origin="linear")
    plus = T + R
    minus = np.abs(T - R)
    G = _antiderivative(g, np.concatenate([plus.ravel(), minus.ravel()]))
    Gp, Gm = G[: plus.size].reshape(T.shape), G[plus.size:].reshape(T.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (Gp - Gm) / R
    small = R < 1e-6
    if small.any():
        for i, j in zip(*np.nonzero(small)):
            u[i, j] = linear_solution(g, T[i, j], R[i, j])
    return SpaceTimeField(t, r, u, dr_ru_linear(g, T, R), origin="linear",
                          meta={"profile": g.name, **g.params})


@dataclass
class SpaceTimeField:
    """Radial field ``u(t, r)`` with ``d_r(r u)`` on a tensor grid (``[i, j] = (t_i, r_j)``)."""

    t: np.ndarray
    r: np.ndarray
    u: np.ndarray
    dr_ru: np.ndarray | None = None
    origin: str = "linear"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.r = np.asarray(self.r, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.t.ndim != 1 or self.r.ndim != 1:
            raise ValueError("grids must be one-dimensional")
        if np.any(np.diff(self.t) <= 0) or np.any(np.diff(self.r) <= 0):
            raise ValueError("grids must be strictly increasing")
        if self.t[0] < 0 or self.r[0] < 0:
            raise ValueError("grids must be nonnegative")
        if self.u.shape != (self.t.size, self.r.size):
            raise ValueError(f"u has shape {self.u.shape}, expected {(self.t.size, self.r.size)}")
        if self.dr_ru is None:
            self.dr_ru = dr_ru_from_u(self.r, self.u)
        self.dr_ru = np.asarray(self.dr_ru, dtype=float)
        if not np.all(np.isfinite(self.u)):
            raise ValueError("field contains non-finite values")

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape

    def restrict(self, t_max: float | None = None, r_max: float | None = None) -> "SpaceTimeField":
        it = self.t <= (np.inf if t_max is None else t_max + 1e-12)
        jr = self.r <= (np.inf if r_max is None else r_max + 1e-12)
        return SpaceTimeField(self.t[it], self.r[jr], self.u[np.ix_(it, jr)],
                              self.dr_ru[np.ix_(it, jr)], self.origin, dict(self.meta))

    def sample(self, t_grid, r_grid) -> np.ndarray:
        """Bilinear interpolation onto another tensor grid (within range)."""
        from scipy.interpolate import RegularGridInterpolator

        interp = RegularGridInterpolator((self.t, self.r), self.u, method="linear")
        T, R = np.meshgrid(np.asarray(t_grid, float), np.asarray(r_grid, float), indexing="ij")
        return interp(np.stack([T.ravel(), R.ravel()], axis=-1)).reshape(T.shape)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "r", "u", "dr_ru"])
            for i, ti in enumerate(self.t):
                for j, rj in enumerate(self.r):
                    w.writerow([repr(float(ti)), repr(float(rj)),
                                repr(float(self.u[i, j])), repr(float(self.dr_ru[i, j]))])


def dr_ru_from_u(r: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Second-order finite-difference ``d_r(r u)`` for fields without an exact one."""
    ru = u * r[None, :]
    if r.size < 3:
        return u.copy()
    return np.gradient(ru, r, axis=1, edge_order=2)


@dataclass(frozen=True)
class WeightedNormReport:
    norm_u: float
    norm_dru: float
    total: float
    argmax_u: tuple[float, float]
    argmax_dru: tuple[float, float]
    kappa: float

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "norm_u": self.norm_u,
            "norm_dru": self.norm_dru,
            "total": self.total,
            "argmax_u": list(self.argmax_u),
            "argmax_dru": list(self.argmax_dru),
        }


def xkappa_weights(t, r, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """``(<t+|r|> <t-|r|>^(k-1), <r>^-1 <t+|r|> <t-|r|>^(k-1))`` on the tensor grid."""
    T, R = np.meshgrid(np.asarray(t, float), np.abs(np.asarray(r, float)), indexing="ij")
    w = jbracket(T + R) * jbracket(T - R) ** (kappa - 1.0)
    return w, w / jbracket(R)


def xkappa_norm(field: SpaceTimeField, kappa: float, mask: np.ndarray | None = None) -> WeightedNormReport:
    """Grid suprema of the two weighted quantities defining ``||u||_{X_kappa}``."""
    if not kappa > 1:
        raise ValueError("kappa must be > 1")
    w_u, w_d = xkappa_weights(field.t, field.r, kappa)
    a = w_u * np.abs(field.u)
    b = w_d * np.abs(field.dr_ru)
    if mask is not None:
        a = np.where(mask, a, 0.0)
        b = np.where(mask, b, 0.0)
    ia = np.unravel_index(np.argmax(a), a.shape)
    ib = np.unravel_index(np.argmax(b), b.shape)
    nu, nd = float(a[ia]), float(b[ib])
    return WeightedNormReport(
        nu, nd, nu + nd,
        (float(field.t[ia[0]]), float(field.r[ia[1]])),
        (float(field.t[ib[0]]), float(field.r[ib[1]])),
        kappa,
    )


def radial_wave_residual(field: SpaceTimeField, n: int = 3, source: np.ndarray | None = None) -> np.ndarray:
    """``r^2 u_tt - (r^2 u_rr + (n-1) r u_r) - r^2 source`` at interior nodes.

    Central second-order differences on a uniform grid; returns an array of
    shape ``(Nt - 2, Nr - 2)`` aligned with ``t[1:-1], r[1:-1]``.
    """
    t, r, u = field.t, field.r, field.u
    dt, dr = np.diff(t), np.diff(r)
    if not (np.allclose(dt, dt[0], rtol=1e-9) and np.allclose(dr, dr[0], rtol=1e-9)):
        raise ValueError("residual needs uniform grids")
    ht, hr = dt[0], dr[0]
    utt = (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / ht**2
    urr = (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / hr**2
    ur = (u[1:-1, 2:] - u[1:-1, :-2]) / (2.0 * hr)
    rr = r[None, 1:-1]
    res = rr**2 * utt - (rr**2 * urr + (n - 1) * rr * ur)
    if source is not None:
        res = res - rr**2 * np.asarray(source)[1:-1, 1:-1]
    return res
