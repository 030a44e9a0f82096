"""Critical exponents and regime classification.

All functions here are pure.  ``strauss_p0(1)`` is ``math.inf``; callers that
compare against it get the usual IEEE ordering, so ``p <= strauss_p0(1)`` holds
for every finite ``p``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

__all__ = [
    "Regime",
    "RegimeVerdict",
    "strauss_p0",
    "fujita_p_inf",
    "p2",
    "p2_conjectural",
    "p_mu_tilde",
    "p_mu_tilde_closed_form",
    "space_dependent_exponent",
    "classify",
    "exponent_table",
]

# relative tolerance used to decide that p sits on a threshold
BOUNDARY_RTOL = 1e-12


def strauss_p0(d: float) -> float:
    """Positive root of ``(d-1) p**2 - (d+1) p - 2 = 0``; ``inf`` at ``d == 1``."""
    if not d >= 1:
        raise ValueError(f"strauss_p0 needs d >= 1, got {d!r}")
    if d == 1:
        return math.inf
    b = d + 1.0
    return (b + math.sqrt(b * b + 8.0 * (d - 1.0))) / (2.0 * (d - 1.0))


def fujita_p_inf(d: float) -> float:
    if not d > 0:
        raise ValueError(f"fujita_p_inf needs d > 0, got {d!r}")
    return 1.0 + 2.0 / d


def p2(n: int) -> float:
    """Critical exponent for the damping strength 2.

    Only ``n = 1, 2, 3`` are theorems; for ``n >= 4`` the same formula is
    returned and :func:`p2_conjectural` reports it as unproven.
    """
    if n < 1:
        raise ValueError(f"p2 needs n >= 1, got {n!r}")
    if n == 1:
        return 3.0
    return max(strauss_p0(n + 2), fujita_p_inf(n))


def p2_conjectural(n: int) -> bool:
    return n >= 4


def p_mu_tilde(n: int, mu: float) -> float:
    """Blow-up threshold for the damping ``mu`` with the mass ``m = (mu - 2) mu``."""
    if n < 1 or not mu > 0:
        raise ValueError(f"p_mu_tilde needs n >= 1 and mu > 0, got {(n, mu)!r}")
    return max(fujita_p_inf(n - 1 + mu / 2), strauss_p0(n + mu))


def p_mu_tilde_closed_form(n: int, mu: float) -> float:
    """Piecewise form of :func:`p_mu_tilde`, kept separate as a cross-check."""
    if n >= 3:
        return strauss_p0(n + mu)
    if n == 1:
        return fujita_p_inf(mu / 2)
    if mu >= 2:
        return fujita_p_inf(1 + mu / 2)
    return strauss_p0(2 + mu)


def space_dependent_exponent(n: int, alpha: float) -> float | None:
    """Critical exponent for the damping ``mu <x>^-alpha`` (table metadata only).

    Known to be ``1 + 2/(n - alpha)`` for ``alpha`` in (0, 1); ``None`` for
    ``alpha == 1``, where the answer is expected to depend on ``mu``.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if alpha == 1:
        return None
    return fujita_p_inf(n - alpha)


class Regime(str, enum.Enum):
    BLOW_UP = "BlowUp"
    GLOBAL_EXISTENCE = "GlobalExistence"
    OPEN = "Open"


@dataclass(frozen=True)
class RegimeVerdict:
    regime: Regime
    source: str
    boundary: bool = False
    sources: tuple[str, ...] = ()
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "source": self.source,
            "boundary": self.boundary,
            "sources": list(self.sources),
            "note": self.note,
        }


@dataclass
class _Claim:
    regime: Regime
    source: str
    threshold: float | None = None
    note: str = ""


def _on(p: float, threshold: float | None) -> bool:
    if threshold is None or math.isinf(threshold):
        return False
    return abs(p - threshold) <= BOUNDARY_RTOL * max(1.0, abs(threshold))


def _le(p: float, threshold: float) -> bool:
    return p <= threshold or _on(p, threshold)


def _lt(p: float, threshold: float) -> bool:
    return p < threshold and not _on(p, threshold)


def _claims(n: int, mu: float, m: float, p: float) -> list[_Claim]:
    out: list[_Claim] = []
    undamped = mu == 0 and m == 0

    if undamped:
        p0 = strauss_p0(n)
        if _le(p, p0):
            out.append(_Claim(Regime.BLOW_UP, "undamped wave: blow-up for 1 < p <= p0(n)", p0))
        elif n >= 2 and _le(p, (n + 3) / (n - 1)):
            out.append(
                _Claim(
                    Regime.GLOBAL_EXISTENCE,
                    "undamped wave: small data global existence for p0(n) < p <= (n+3)/(n-1)",
                    p0,
                )
            )
        return out

    if m != 0:
        if mu > 0 and _on(m, (mu - 2) * mu):
            pt = p_mu_tilde(n, mu)
            if _le(p, pt):
                out.append(
                    _Claim(Regime.BLOW_UP, "mass m=(mu-2)mu: blow-up for p <= p~_mu(n)", pt)
                )
        return out

    # m == 0, mu > 0 from here on
    pinf = fujita_p_inf(n)
    if mu > 1 and _le(p, pinf):
        out.append(_Claim(Regime.BLOW_UP, "nonexistence for mu > 1 and p <= 1+2/n", pinf))
    if 0 < mu <= 1:
        thr = fujita_p_inf(n - 1 + mu)
        if _le(p, thr):
            out.append(_Claim(Regime.BLOW_UP, "nonexistence for mu in (0,1] and p <= 1+2/(n-1+mu)", thr))
    if mu == 1 and _le(p, pinf):
        out.append(_Claim(Regime.BLOW_UP, "finite-time blow-up for mu = 1 and p <= p_inf(n)", pinf))
    if 1 < mu <= 2 and _lt(p, pinf):
        out.append(_Claim(Regime.BLOW_UP, "finite-time blow-up for mu in (1,2] and p < p_inf(n)", pinf))

    if mu == 2:
        thr = p2(n)
        if _le(p, thr):
            out.append(_Claim(Regime.BLOW_UP, "damping 2: blow-up for 1 < p <= p2(n)", thr))
        elif n == 2:
            out.append(_Claim(Regime.GLOBAL_EXISTENCE, "damping 2, n=2: global existence for p > 2", thr))
        elif n == 3:
            out.append(
                _Claim(
                    Regime.GLOBAL_EXISTENCE,
                    "damping 2, n=3: radial global existence for p > p0(5)",
                    thr,
                )
            )
        elif n >= 4:
            out.append(
                _Claim(
                    Regime.OPEN,
                    "damping 2, n>=4: p > p0(n+2) is conjectured critical",
                    thr,
                    note="odd n>=5 known only on a bounded range above p0(n+2); even n>=4 unresolved",
                )
            )

    # energy-solution existence for strong damping
    if _lt(pinf, p) and (
        (n == 1 and mu >= 5 / 3) or (n == 2 and mu >= 3) or (n >= 3 and mu >= n + 2)
    ):
        out.append(
            _Claim(
                Regime.GLOBAL_EXISTENCE,
                "effective damping: global existence for p > 1+2/n when mu is large",
                pinf,
            )
        )
    return out


def classify(n: int, mu: float, m: float, p: float) -> RegimeVerdict:
    """Sharpest regime statement available for ``(n, mu, m, p)``.

    Unknown regions come back as ``Open``; a point covered by several results
    lists all of them in ``sources``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if not p > 1:
        raise ValueError("p must be > 1")
    claims = _claims(n, mu, m, p)
    blow = [c for c in claims if c.regime is Regime.BLOW_UP]
    glob = [c for c in claims if c.regime is Regime.GLOBAL_EXISTENCE]
    if blow and glob:
        raise AssertionError(f"contradictory claims for {(n, mu, m, p)}: {claims}")
    chosen = blow or glob or [c for c in claims if c.regime is Regime.OPEN]
    if not chosen:
        return RegimeVerdict(Regime.OPEN, "no result available for these parameters")
    boundary = any(_on(p, c.threshold) for c in claims)
    return RegimeVerdict(
        regime=chosen[0].regime,
        source=chosen[0].source,
        boundary=boundary,
        sources=tuple(c.source for c in chosen),
        note="; ".join(c.note for c in chosen if c.note),
    )


def exponent_table(dims=(1, 2, 3, 4, 5), mus=(1.0, 2.0, 4.0)) -> list[dict]:
    """Rows ``{name, args, value, citation}`` for the ``exponents`` subcommand."""

    def enc(x: float) -> float | str:
        return "inf" if math.isinf(x) else x

    rows: list[dict] = []
    for d in dims:
        rows.append({"name": "p0", "args": {"d": d}, "value": enc(strauss_p0(d)),
                     "citation": "positive root of (d-1)p^2-(d+1)p-2"})
        rows.append({"name": "p_inf", "args": {"d": d}, "value": fujita_p_inf(d),
                     "citation": "1+2/d"})
        rows.append({"name": "p2", "args": {"n": d}, "value": p2(d),
                     "citation": "max{p0(n+2), p_inf(n)}", "conjectural": p2_conjectural(d)})
        for mu in mus:
            rows.append({"name": "p_mu_tilde", "args": {"n": d, "mu": mu},
                         "value": p_mu_tilde(d, mu),
                         "citation": "max{p_inf(n-1+mu/2), p0(n+mu)}"})
    return rows
