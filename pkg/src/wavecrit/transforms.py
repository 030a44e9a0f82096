"""Changes of unknown and of time for the damped semilinear wave equation.

Every transform maps a :class:`ProblemSpec` descriptor to a new descriptor plus
a :class:`DataMap` for the Cauchy data.  Nothing is solved here.

Equation shapes by ``form`` (``<t> = 1 + t``, ``w = weight_exponent``,
``c = nonlinearity_constant``, ``l = speed_exponent``, ``k = mass_coefficient``)::

    Damped                v_tt - Lap v + mu/<t> v_t + m/(4<t>^2) v = c <t>^w |v|^p
    WeightedWave          u_tt - Lap u + k/<t>^2 u                 = c <t>^w |u|^p
    VariableSpeedWave     v_tt - <t>^(2l) Lap v                    = c <t>^w |v|^p
    ExponentialSpeedWave  v_tt - e^(2t) Lap v                      = e^(2t) |v|^p

with data prescribed at ``t = initial_time``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np

__all__ = [
    "Form",
    "ProblemSpec",
    "DataMap",
    "dissipation_shift",
    "time_reparam_sub1",
    "time_reparam_super1",
    "exponential_reparam",
    "mass_shift",
    "liouville_mu2",
]


class Form(str, enum.Enum):
    DAMPED = "Damped"
    WEIGHTED_WAVE = "WeightedWave"
    VARIABLE_SPEED_WAVE = "VariableSpeedWave"
    EXPONENTIAL_SPEED_WAVE = "ExponentialSpeedWave"


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    p: float
    mu: float = 2.0
    m: float = 0.0
    form: Form = Form.DAMPED
    weight_exponent: float = 0.0
    speed_exponent: float = 0.0
    mass_coefficient: float = 0.0
    initial_time: float = 0.0
    nonlinearity_constant: float = 1.0
    data: tuple[Any, Any] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.p > 1:
            raise ValueError("p must be > 1")
        object.__setattr__(self, "form", Form(self.form))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["form"] = self.form.value
        d.pop("data")
        return d


@dataclass(frozen=True)
class DataMap:
    """``(u0, u1) = (a v0 + b v1, c v0 + d v1)`` plus the time substitution.

    ``time_kind`` is ``"identity"``, ``"polynomial"`` (``Lambda(t) = <t>^(l+1)/(l+1)``
    with ``time_exponent = l + 1``) or ``"exponential"`` (``Lambda(t) = e^t``).
    The old time is ``Lambda(t) - 1``.
    """

    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    time_kind: str = "identity"
    time_exponent: float = 1.0

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply(self, v0, v1):
        return self.a * v0 + self.b * v1, self.c * v0 + self.d * v1

    def inverse(self) -> "DataMap":
        det = self.determinant
        if det == 0:
            raise ZeroDivisionError("data map is singular")
        return DataMap(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def old_time(self, t):
        """Time of the original problem at new time ``t``."""
        t = np.asarray(t, dtype=float)
        if self.time_kind == "identity":
            return t
        if self.time_kind == "polynomial":
            e = self.time_exponent
            return (1.0 + t) ** e / e - 1.0
        if self.time_kind == "exponential":
            return np.exp(t) - 1.0
        raise ValueError(self.time_kind)

    def new_time(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.time_kind == "identity":
            return tau
        if self.time_kind == "polynomial":
            e = self.time_exponent
            return (e * (1.0 + tau)) ** (1.0 / e) - 1.0
        if self.time_kind == "exponential":
            return np.log1p(tau)
        raise ValueError(self.time_kind)

    def to_dict(self) -> dict:
        return asdict(self)


def _require_form(spec: ProblemSpec, form: Form) -> None:
    if spec.form is not form:
        raise ValueError(f"expected a {form.value} problem, got {spec.form.value}")


def dissipation_shift(spec: ProblemSpec) -> tuple[ProblemSpec, DataMap]:
    """``v# = <t>^(mu-1) v`` turns damping ``mu`` into ``2 - mu``.  An involution."""
    _require_form(spec, Form.DAMPED)
    if spec.m != 0:
        raise ValueError("dissipation_shift needs m = 0; use mass_shift")
    mu_sharp = 2.0 - spec.mu
    out = replace(
        spec,
        mu=mu_sharp,
        weight_exponent=spec.weight_exponent + (mu_sharp - 1.0) * (spec.p - 1.0),
    )
    return out, DataMap(1.0, 0.0, 1.0 - mu_sharp, 1.0)


def _polynomial_time(mu: float) -> tuple[float, float, float]:
    """``(l, t_bar, <t_bar>^l)`` for the undamped rewrite of damping ``mu < 1``."""
    ell = mu / (1.0 - mu)
    t_bar = (1.0 - mu) ** (-(1.0 - mu)) - 1.0
    return ell, t_bar, (1.0 - mu) ** (-mu)


def time_reparam_sub1(spec: ProblemSpec) -> tuple[ProblemSpec, DataMap]:
    """Damping ``mu < 1`` becomes a polynomial propagation speed ``<t>^l``."""
    _require_form(spec, Form.DAMPED)
    if not spec.mu < 1:
        raise ValueError(f"time_reparam_sub1 needs mu < 1, got {spec.mu}")
    if spec.m != 0 or spec.weight_exponent != 0 or spec.nonlinearity_constant != 1:
        raise ValueError("time_reparam_sub1 applies to the plain damped problem only")
    ell, t_bar, speed0 = _polynomial_time(spec.mu)
    out = replace(
        spec,
        mu=0.0,
        form=Form.VARIABLE_SPEED_WAVE,
        speed_exponent=ell,
        weight_exponent=2.0 * ell,
        initial_time=t_bar,
    )
    return out, DataMap(1.0, 0.0, 0.0, speed0, "polynomial", ell + 1.0)


def time_reparam_super1(spec: ProblemSpec) -> tuple[ProblemSpec, DataMap]:
    """Damping ``mu > 1``: shift to ``2 - mu`` and then reparametrize time."""
    _require_form(spec, Form.DAMPED)
    if not spec.mu > 1:
        raise ValueError(f"time_reparam_super1 needs mu > 1, got {spec.mu}")
    if spec.m != 0 or spec.weight_exponent != 0 or spec.nonlinearity_constant != 1:
        raise ValueError("time_reparam_super1 applies to the plain damped problem only")
    mu, p = spec.mu, spec.p
    ell, t_sharp, speed0 = _polynomial_time(2.0 - mu)
    # <tau> = (mu-1) <t>^(l+1) turns <tau>^((1-mu)(p-1)) into c_mu <t>^-(p-1)
    c_mu = (mu - 1.0) ** (-(mu - 1.0) * (p - 1.0))
    out = replace(
        spec,
        mu=0.0,
        form=Form.VARIABLE_SPEED_WAVE,
        speed_exponent=ell,
        weight_exponent=2.0 * ell - (p - 1.0),
        nonlinearity_constant=c_mu,
        initial_time=t_sharp,
    )
    shift = mu - 1.0
    return out, DataMap(1.0, 0.0, speed0 * shift, speed0, "polynomial", ell + 1.0)


def exponential_reparam(spec: ProblemSpec) -> tuple[ProblemSpec, DataMap]:
    """Damping exactly 1: ``Lambda(t) = e^t`` gives speed and weight ``e^(2t)``."""
    _require_form(spec, Form.DAMPED)
    if spec.mu != 1:
        raise ValueError(f"exponential_reparam needs mu = 1, got {spec.mu}")
    if spec.m != 0 or spec.weight_exponent != 0 or spec.nonlinearity_constant != 1:
        raise ValueError("exponential_reparam applies to the plain damped problem only")
    out = replace(spec, mu=0.0, form=Form.EXPONENTIAL_SPEED_WAVE, initial_time=0.0)
    return out, DataMap(time_kind="exponential")


def mass_shift(spec: ProblemSpec) -> tuple[ProblemSpec, DataMap]:
    """``u = <t>^(mu/2) v`` removes the damping and leaves a ``<t>^-2`` mass."""
    _require_form(spec, Form.DAMPED)
    mu = spec.mu
    out = replace(
        spec,
        mu=0.0,
        m=0.0,
        form=Form.WEIGHTED_WAVE,
        mass_coefficient=(mu * (2.0 - mu) + spec.m) / 4.0,
        weight_exponent=spec.weight_exponent - 0.5 * mu * (spec.p - 1.0),
    )
    return out, DataMap(1.0, 0.0, 0.5 * mu, 1.0)


def liouville_mu2(spec: ProblemSpec) -> tuple[ProblemSpec, DataMap]:
    """``u = <t> v`` for damping 2: the undamped wave with weight ``<t>^-(p-1)``."""
    if spec.mu != 2 or spec.m != 0:
        raise ValueError("liouville_mu2 needs mu = 2 and m = 0")
    return mass_shift(spec)


def rhs_ode(spec: ProblemSpec):
    """Right-hand side ``y' = f(t, y)`` of the spatially homogeneous problem.

    With ``Lap = 0`` every form reduces to a scalar ODE; this is what the
    transform tests integrate on both sides of a change of variables.
    """
    p = spec.p

    def nonlin(t, v):
        return spec.nonlinearity_constant * (1.0 + t) ** spec.weight_exponent * abs(v) ** p

    if spec.form is Form.DAMPED:
        def f(t, y):
            v, w = y
            return [w, -spec.mu / (1.0 + t) * w - spec.m / (4.0 * (1.0 + t) ** 2) * v + nonlin(t, v)]
    elif spec.form is Form.WEIGHTED_WAVE:
        def f(t, y):
            v, w = y
            return [w, -spec.mass_coefficient / (1.0 + t) ** 2 * v + nonlin(t, v)]
    elif spec.form is Form.VARIABLE_SPEED_WAVE:
        def f(t, y):
            v, w = y
            return [w, nonlin(t, v)]
    else:
        def f(t, y):
            v, w = y
            return [w, math.exp(2.0 * t) * abs(v) ** p]
    return f
