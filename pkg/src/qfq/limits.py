"""Closed-form reports for the four limiting regimes and the relevance table.

Each report is written directly in terms of the decoherence factors and
the surviving Green's quantities.  Every report also carries the degenerate
``GreensBundle`` it corresponds to, so it can be checked against the
general pipeline in ``spinstate``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .propagators import GreensBundle, _product
from .scenario import CausalRegion
from .spinstate import LN2, SIGN_PAIRS, measures, sigma_entropy, von_neumann_entropy

__all__ = [
    "LimitDomainError",
    "LimitReport",
    "Regime",
    "RelevanceEntry",
    "adiabatic_report",
    "nonadiabatic_report",
    "oneway_report",
    "pipeline_deviation",
    "relevance_table",
    "spacelike_report",
]

# slack on the uncertainty-relation preconditions
_PRE_TOL = 1e-12


class LimitDomainError(ValueError):
    pass


class Regime(enum.Enum):
    ADIABATIC_I = "adiabatic_i"
    NONADIABATIC_II = "nonadiabatic_ii"
    SPACELIKE_IV = "spacelike_IV"
    ONEWAY_II = "oneway_II"


@dataclass(frozen=True)
class LimitReport:
    regime: Regime
    inputs: dict
    outputs: dict
    mu: tuple
    mu_tilde: tuple
    bundle: GreensBundle
    extras: dict = field(default_factory=dict)


def _check_gamma(**gammas):
    for name, v in gammas.items():
        if not 0.0 <= v <= 1.0:
            raise LimitDomainError(f"{name} must lie in [0, 1], got {v!r}")


def _self_term(gamma: float) -> float:
    return math.inf if gamma == 0 else -0.5 * math.log(gamma)


def _mu(ga, gb, cos_phase, gk):
    out = []
    for s1, s2 in SIGN_PAIRS:
        radicand = (ga * ga + gb * gb + 2.0 * s2 * ga * gb * cos_phase
                    + (ga * gb * math.sinh(4.0 * gk)) ** 2)
        out.append(0.25 * (1.0 + s2 * ga * gb * math.cosh(4.0 * gk)
                           + s1 * math.sqrt(max(radicand, 0.0))))
    return tuple(out)


def _report(regime, inputs, bundle, s_a, s_b, s_ab, mu, mu_t, vd, connected,
            extras=None) -> LimitReport:
    v_a, v_b, d_a, d_b = vd
    neg = float(-sum(v for v in mu_t if v < 0))
    outputs = {
        "s_a": s_a, "s_b": s_b, "s_ab": s_ab, "negativity": neg,
        "i_ab": s_a + s_b - s_ab, "i_aphi": s_a + s_ab - s_b,
        "i_bphi": s_b + s_ab - s_a,
        "v_a": v_a, "v_b": v_b, "d_a": d_a, "d_b": d_b,
        "p_a": 2.0 * (LN2 - s_a), "p_b": 2.0 * (LN2 - s_b),
    }
    outputs.update({f"c_{k}": v for k, v in connected.items()})
    return LimitReport(regime, inputs, outputs, tuple(mu), tuple(mu_t), bundle,
                       extras or {})


def adiabatic_report(gamma_b: float, theta: float) -> LimitReport:
    """Alice adiabatic: ``gK_AA = gK_BA = 0`` and ``gR_AB = gR_BA = theta``."""
    _check_gamma(gamma_b=gamma_b)
    gb = gamma_b
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    mu = ((1 + gb) / 2, (1 - gb) / 2, 0.0, 0.0)
    mu_t = _mu(1.0, gb, math.cos(4 * theta), 0.0)
    s_a, s_b, s_ab = sigma_entropy(c2), sigma_entropy(gb * c2), sigma_entropy(gb)
    connected = {"xx": gb * s2 * s2, "yy": 0.0, "yz": -s2, "zy": -gb * s2}
    bundle = GreensBundle.from_gammas(1.0, gb, gR_BA=theta, gR_AB=theta)
    extras = {"averaged_distinguishability": 0.5 * (1 + gb * gb) * s2 * s2}
    return _report(Regime.ADIABATIC_I, {"gamma_b": gb, "theta": theta}, bundle,
                   s_a, s_b, s_ab, mu, mu_t,
                   (abs(c2), gb * abs(c2), abs(s2), gb * abs(s2)), connected, extras)


def nonadiabatic_report(gamma_a: float, theta: float) -> LimitReport:
    """Bob sudden: ``gamma_B = 0`` so Bob is fully decohered."""
    _check_gamma(gamma_a=gamma_a)
    ga = gamma_a
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    mu = ((1 + ga) / 4, (1 + ga) / 4, (1 - ga) / 4, (1 - ga) / 4)
    s_a, s_b, s_ab = sigma_entropy(ga * c2), LN2, LN2 + sigma_entropy(ga)
    connected = {"xx": 0.0, "yy": 0.0, "yz": -ga * s2, "zy": 0.0}
    bundle = GreensBundle.from_gammas(ga, 0.0, gR_BA=theta, gR_AB=theta)
    i_ab = s_a + s_b - s_ab
    extras = {"mi_below_min_entropy": i_ab <= min(s_a, s_b) + 1e-12,
              "conditional_entropy_nonnegative": s_ab >= max(s_a, s_b) - 1e-12}
    return _report(Regime.NONADIABATIC_II, {"gamma_a": ga, "theta": theta}, bundle,
                   s_a, s_b, s_ab, mu, mu,
                   (ga * abs(c2), 0.0, ga * abs(s2), 0.0), connected, extras)


def _check_rs(ga, gb, lhs):
    rhs = _product(_self_term(ga), _self_term(gb))
    if lhs > rhs + _PRE_TOL * max(1.0, abs(rhs)):
        raise LimitDomainError(
            f"unphysical parameters: uncertainty relation needs {lhs!r} <= {rhs!r}")


def spacelike_report(gamma_a: float, gamma_b: float, gk_ba: float) -> LimitReport:
    """No retarded influence; spins correlate only through vacuum fluctuations."""
    _check_gamma(gamma_a=gamma_a, gamma_b=gamma_b)
    ga, gb, g = gamma_a, gamma_b, gk_ba
    _check_rs(ga, gb, g * g)
    mu = _mu(ga, gb, 1.0, g)
    s_a, s_b = sigma_entropy(ga), sigma_entropy(gb)
    s_ab = von_neumann_entropy(mu)
    connected = {"xx": ga * gb * (math.cosh(4 * g) - 1.0),
                 "yy": ga * gb * math.sinh(4 * g), "yz": 0.0, "zy": 0.0}
    bundle = GreensBundle.from_gammas(ga, gb, gK_BA=g)
    return _report(Regime.SPACELIKE_IV,
                   {"gamma_a": ga, "gamma_b": gb, "gk_ba": g}, bundle,
                   s_a, s_b, s_ab, mu, mu, (ga, gb, 0.0, 0.0), connected)


def oneway_report(gamma_a: float, gamma_b: float, gk_ba: float,
                  gr_ba: float) -> LimitReport:
    """Only Alice can influence Bob: ``gR_AB = 0``."""
    _check_gamma(gamma_a=gamma_a, gamma_b=gamma_b)
    ga, gb, g, gr = gamma_a, gamma_b, gk_ba, gr_ba
    _check_rs(ga, gb, gr * gr / 4 + g * g)
    c2, s2 = math.cos(2 * gr), math.sin(2 * gr)
    mu = _mu(ga, gb, c2, g)
    s_a, s_b = sigma_entropy(ga), sigma_entropy(gb * c2)
    s_ab = von_neumann_entropy(mu)
    connected = {"xx": ga * gb * (math.cosh(4 * g) - c2),
                 "yy": ga * gb * math.sinh(4 * g), "yz": 0.0, "zy": -gb * s2}
    bundle = GreensBundle.from_gammas(ga, gb, gR_BA=gr, gK_BA=g)
    extras = {"duality_lhs": ga * ga + (gb * s2) ** 2}
    return _report(Regime.ONEWAY_II,
                   {"gamma_a": ga, "gamma_b": gb, "gk_ba": g, "gr_ba": gr}, bundle,
                   s_a, s_b, s_ab, mu, mu, (ga, gb * abs(c2), 0.0, gb * abs(s2)),
                   connected, extras)


def pipeline_deviation(report: LimitReport) -> float:
    """Largest absolute difference between a report and the general pipeline."""
    r = measures(report.bundle, with_matrix=False)
    full = r.scalars()
    dev = max(abs(full[k] - v) for k, v in report.outputs.items())
    dev = max(dev, float(np.max(np.abs(np.subtract(r.mu, report.mu)))))
    return max(dev, float(np.max(np.abs(np.subtract(r.mu_tilde, report.mu_tilde)))))


# Relevance table -------------------------------------------------------------

@dataclass(frozen=True)
class RelevanceEntry:
    structure: str  # "zero", "equal" (gR_AB = gR_BA) or "nonzero"
    relevant: bool
    value: float
    consistent: bool


_COLUMNS = {
    # quantity: (structure, relevant) for gR_AB, gR_BA, gK_BA
    "i": (("equal", True), ("equal", True), ("zero", False)),
    "ii": (("nonzero", True), ("nonzero", False), ("nonzero", False)),
    "IV": (("zero", False), ("zero", False), ("nonzero", True)),
    "II": (("zero", False), ("nonzero", True), ("nonzero", True)),
    # mirror images and the generic two-way case
    "ii_mirror": (("nonzero", False), ("nonzero", True), ("nonzero", False)),
    "III": (("nonzero", True), ("zero", False), ("nonzero", True)),
    "I": (("nonzero", True), ("nonzero", True), ("nonzero", True)),
}

_REGIME_COLUMN = {Regime.ADIABATIC_I: "i", Regime.NONADIABATIC_II: "ii",
                  Regime.SPACELIKE_IV: "IV", Regime.ONEWAY_II: "II"}


def _column_for(g: GreensBundle, region: Union[CausalRegion, Regime]) -> str:
    if isinstance(region, Regime):
        return _REGIME_COLUMN[region]
    if region is CausalRegion.I:
        if g.gamma_B == 0:
            return "ii"
        if g.gamma_A == 0:
            return "ii_mirror"
        if g.gamma_A == 1 or g.gamma_B == 1:
            return "i"
        return "I"
    return region.value


def relevance_table(g: GreensBundle, region: Union[CausalRegion, Regime],
                    tol: float = 1e-12) -> dict:
    """Structural status of ``gR_AB``, ``gR_BA`` and ``gK_BA`` in a regime.

    Region I splits into the adiabatic column ``i`` (a qubit with unit
    decoherence factor) and the nonadiabatic column ``ii`` (``gamma_B = 0``).
    """
    column = _column_for(g, region)
    names = ("gR_AB", "gR_BA", "gK_BA")
    out = {"column": column}
    for name, (structure, relevant) in zip(names, _COLUMNS[column]):
        value = getattr(g, name)
        if structure == "zero":
            ok = abs(value) <= tol
        elif structure == "equal":
            ok = abs(g.gR_AB - g.gR_BA) <= tol
        else:
            ok = True
        out[name] = RelevanceEntry(structure, relevant, value, ok)
    return out
