"""Coupling profiles, scenarios and causal-region classification.

A qubit couples to the field through a trapezoidal switching function
``lambda(t)``: a linear ramp of length ``T_on`` starting at ``t_on``, a
plateau of length ``T_plateau`` and a linear ramp-down of length ``T_off``.
A profile flagged ``infinite_past`` has been on since the remote past; its
``t_on`` is then the start of the nominal plateau and ``T_on`` is ignored.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "CausalRegion",
    "CouplingProfile",
    "QuadSettings",
    "Scenario",
    "ScenarioError",
    "classify_region",
    "coupling_at",
    "effective_duration",
    "load_scenario",
    "scenario_errors",
    "scenario_from_dict",
    "scenario_to_dict",
    "segments",
    "validate",
]


class ScenarioError(ValueError):
    """Raised with the full list of violated invariants."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class CausalRegion(enum.Enum):
    I = "I"      # influence both ways
    II = "II"    # only A -> B
    III = "III"  # only B -> A
    IV = "IV"    # spacelike, no retarded influence


@dataclass(frozen=True)
class CouplingProfile:
    lambda_bar: float
    t_on: float = 0.0
    T_on: float = 0.0
    T_plateau: float = 0.0
    T_off: float = 0.0
    infinite_past: bool = False

    @classmethod
    def ending_at(cls, t_off: float, lambda_bar: float, T_on: float,
                  T_plateau: float, T_off: float,
                  infinite_past: bool = False) -> "CouplingProfile":
        """Build a profile from its switch-off time rather than its start."""
        if infinite_past:
            return cls(lambda_bar, t_off - T_off - T_plateau, 0.0, T_plateau,
                       T_off, True)
        start = t_off - T_off - T_plateau - T_on
        return cls(lambda_bar, start, T_on, T_plateau, T_off, False)

    @property
    def ramp_on(self) -> float:
        return 0.0 if self.infinite_past else self.T_on

    @property
    def start(self) -> float:
        """First instant of nonzero coupling (``-inf`` for infinite past)."""
        return -math.inf if self.infinite_past else self.t_on

    @property
    def plateau_start(self) -> float:
        return self.t_on + self.ramp_on

    @property
    def plateau_end(self) -> float:
        return self.plateau_start + self.T_plateau

    @property
    def t_off(self) -> float:
        return self.plateau_end + self.T_off

    @property
    def on_center(self) -> float:
        """Midpoint of the ramp-up."""
        return self.t_on + 0.5 * self.ramp_on

    @property
    def off_center(self) -> float:
        """Midpoint of the ramp-down."""
        return self.t_off - 0.5 * self.T_off

    def shifted(self, dt: float) -> "CouplingProfile":
        return replace(self, t_on=self.t_on + dt)


@dataclass(frozen=True)
class QuadSettings:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    max_subdiv: int = 2 ** 14
    # "tail_bound" picks k_max from the analytic tail estimate; a number fixes it.
    k_max_policy: Union[str, float] = "tail_bound"


@dataclass(frozen=True)
class Scenario:
    mass: float
    distance: float
    profile_a: CouplingProfile
    profile_b: CouplingProfile
    quad: QuadSettings = field(default_factory=QuadSettings)

    def swapped(self) -> "Scenario":
        return replace(self, profile_a=self.profile_b, profile_b=self.profile_a)


def coupling_at(profile: CouplingProfile, t):
    """Trapezoid value at ``t`` (scalar or array)."""
    lam = profile.lambda_bar
    if profile.infinite_past:
        out = np.interp(t, [profile.plateau_end, profile.t_off], [lam, 0.0],
                        left=lam, right=0.0)
    else:
        xp = [profile.t_on, profile.plateau_start, profile.plateau_end,
              profile.t_off]
        out = np.interp(t, xp, [0.0, lam, lam, 0.0], left=0.0, right=0.0)
    return float(out) if np.ndim(out) == 0 else out


def effective_duration(profile: CouplingProfile) -> float:
    """Integral of the profile divided by its amplitude."""
    if profile.infinite_past:
        raise ValueError("unbounded support")
    return profile.T_plateau + 0.5 * (profile.T_on + profile.T_off)


def segments(profile: CouplingProfile) -> list[tuple[float, float, float, float]]:
    """Linear pieces ``(a, b, value_at_a, value_at_b)`` of nonzero length.

    The first piece of an infinite-past profile starts at ``-inf`` with a
    constant value.
    """
    lam = profile.lambda_bar
    pieces = []
    if profile.infinite_past:
        pieces.append((-math.inf, profile.plateau_end, lam, lam))
    else:
        pieces.append((profile.t_on, profile.plateau_start, 0.0, lam))
        pieces.append((profile.plateau_start, profile.plateau_end, lam, lam))
    pieces.append((profile.plateau_end, profile.t_off, lam, 0.0))
    return [p for p in pieces if p[1] > p[0]]


def classify_region(s: Scenario) -> CausalRegion:
    a, b, d = s.profile_a, s.profile_b, s.distance
    a_to_b = b.t_off - a.start >= d
    b_to_a = a.t_off - b.start >= d
    if a_to_b and b_to_a:
        return CausalRegion.I
    if a_to_b:
        return CausalRegion.II
    if b_to_a:
        return CausalRegion.III
    return CausalRegion.IV


def _profile_errors(p: CouplingProfile, path: str) -> list[str]:
    errs = []
    values = {"lambda_bar": p.lambda_bar, "t_on": p.t_on, "T_on": p.T_on,
              "T_plateau": p.T_plateau, "T_off": p.T_off}
    for name, v in values.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            errs.append(f"{path}.{name} must be a finite real")
    if errs:
        return errs
    if p.lambda_bar < 0:
        errs.append(f"{path}.lambda_bar must be nonnegative")
    for name in ("T_on", "T_plateau", "T_off"):
        if values[name] < 0:
            errs.append(f"{path}.{name} must be nonnegative")
    return errs


def scenario_errors(s: Scenario) -> list[str]:
    """Every violated invariant, each prefixed by its field path."""
    errs = []
    for name in ("mass", "distance"):
        v = getattr(s, name)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v) or v <= 0:
            errs.append(f"{name} must be positive")
    errs += _profile_errors(s.profile_a, "profile_a")
    errs += _profile_errors(s.profile_b, "profile_b")
    q = s.quad
    if not q.abs_tol > 0:
        errs.append("quad.abs_tol must be positive")
    if not q.rel_tol > 0:
        errs.append("quad.rel_tol must be positive")
    if not (isinstance(q.max_subdiv, int) and q.max_subdiv >= 1):
        errs.append("quad.max_subdiv must be a positive integer")
    if isinstance(q.k_max_policy, str):
        if q.k_max_policy != "tail_bound":
            errs.append("quad.k_max_policy must be 'tail_bound' or a positive number")
    elif not q.k_max_policy > 0:
        errs.append("quad.k_max_policy must be 'tail_bound' or a positive number")
    return errs


def validate(s: Scenario) -> Scenario:
    errs = scenario_errors(s)
    if errs:
        raise ScenarioError(errs)
    return s


_PROFILE_KEYS = {"lambda_bar", "t_on", "T_on", "T_plateau", "T_off", "infinite_past"}
_QUAD_KEYS = {"abs_tol", "rel_tol", "max_subdiv", "k_max_policy"}
_TOP_KEYS = {"mass", "distance", "profile_a", "profile_b", "quad"}


def _unknown(d: Mapping[str, Any], allowed: set, path: str) -> list[str]:
    return [f"{path}{k}: unknown key" for k in sorted(set(d) - allowed)]


def _profile_from_dict(d: Mapping[str, Any], path: str, errs: list[str]):
    if not isinstance(d, Mapping):
        errs.append(f"{path} must be an object")
        return None
    errs += _unknown(d, _PROFILE_KEYS, path + ".")
    past = bool(d.get("infinite_past", False))
    required = ["lambda_bar", "t_on", "T_plateau", "T_off"]
    if not past:
        required.append("T_on")
    elif d.get("T_on") not in (None, 0, 0.0):
        errs.append(f"{path}.T_on must be absent for an infinite_past profile")
    missing = [k for k in required if k not in d]
    errs += [f"{path}.{k}: missing" for k in missing]
    if missing:
        return None
    return CouplingProfile(
        lambda_bar=d["lambda_bar"], t_on=d["t_on"],
        T_on=0.0 if past else d["T_on"], T_plateau=d["T_plateau"],
        T_off=d["T_off"], infinite_past=past)


def scenario_from_dict(d: Mapping[str, Any]) -> Scenario:
    """Parse and validate the JSON form. Unknown keys are errors."""
    errs = _unknown(d, _TOP_KEYS, "")
    for k in ("mass", "distance", "profile_a", "profile_b"):
        if k not in d:
            errs.append(f"{k}: missing")
    pa = _profile_from_dict(d.get("profile_a", {}), "profile_a", errs)
    pb = _profile_from_dict(d.get("profile_b", {}), "profile_b", errs)
    qd = d.get("quad", {})
    errs += _unknown(qd, _QUAD_KEYS, "quad.")
    if errs:
        raise ScenarioError(errs)
    quad = QuadSettings(**qd)
    s = Scenario(d["mass"], d["distance"], pa, pb, quad)
    return validate(s)


def scenario_to_dict(s: Scenario) -> dict:
    def prof(p: CouplingProfile) -> dict:
        out = {"lambda_bar": p.lambda_bar, "t_on": p.t_on, "T_on": p.T_on,
               "T_plateau": p.T_plateau, "T_off": p.T_off,
               "infinite_past": p.infinite_past}
        if p.infinite_past:
            del out["T_on"]
        return out

    q = s.quad
    return {"mass": s.mass, "distance": s.distance,
            "profile_a": prof(s.profile_a), "profile_b": prof(s.profile_b),
            "quad": {"abs_tol": q.abs_tol, "rel_tol": q.rel_tol,
                     "max_subdiv": q.max_subdiv, "k_max_policy": q.k_max_policy}}


def load_scenario(path: Union[str, Path]) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))
