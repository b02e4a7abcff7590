"""Spin-field correlators on the final slice and particle-number observables.

Alice sits at the origin and Bob at ``(D, 0, 0)``.  Field correlators are
built from the convolutions ``Phi_R`` and ``Phi_K`` of a single profile with
the retarded and Keldysh propagators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .propagators import (
    FOUR_PI,
    GreensBundle,
    _retarded_regular_array,
    _retarded_tail,
    integrate_across_cone,
    panel_quad,
    _grid,
)
from .scenario import CouplingProfile, QuadSettings, Scenario, coupling_at, segments
from .spinstate import BlochState

__all__ = [
    "FieldPoint",
    "ParticleNumber",
    "particle_number",
    "phi_convolution",
    "spin_field_correlator",
    "spin_number_correlators",
]


@dataclass(frozen=True)
class FieldPoint:
    t_f: float
    x: tuple = (0.0, 0.0, 0.0)

    def distance_to_a(self) -> float:
        return math.dist(self.x, (0.0, 0.0, 0.0))

    def distance_to_b(self, D: float) -> float:
        return math.dist(self.x, (D, 0.0, 0.0))


def _profile_knots(profile: CouplingProfile) -> list[float]:
    out = []
    for a, b, _, _ in segments(profile):
        out += [a, b]
    return [k for k in out if math.isfinite(k)]


def phi_convolution(kind: str, profile: CouplingProfile, p: FieldPoint, r: float,
                    m: float, quad: Optional[QuadSettings] = None) -> float:
    """``int dt G(t_f - t, r) lambda(t)`` for ``kind`` in {retarded, keldysh}."""
    quad = quad or QuadSettings()
    if p.t_f < profile.t_off:
        raise ValueError("field point must lie on a slice after switch-off")
    if profile.lambda_bar == 0:
        return 0.0
    # tau = t_f - t; the profile is nonzero on [lo, hi]
    lo, hi = p.t_f - profile.t_off, p.t_f - profile.start
    knots = [p.t_f - k for k in _profile_knots(profile)]

    def weight(tau):
        return coupling_at(profile, p.t_f - np.asarray(tau))

    if kind == "retarded":
        if r <= 0:
            raise ValueError("retarded convolution needs r > 0")
        light_cone = weight(r) / (FOUR_PI * r)
        start = max(lo, r)
        if start >= hi:
            return float(light_cone)
        width = math.pi / m

        def integrand(tau):
            return weight(tau) * _retarded_regular_array(tau, r, m)

        if math.isinf(hi):
            # beyond tau_c the profile sits on its plateau
            tau_c = max(p.t_f - profile.plateau_end, start)
            edges = _grid(start, tau_c, width, knots)
            body = head = 0.0
            if tau_c > start:
                body = panel_quad(integrand, edges, quad.abs_tol, quad.rel_tol,
                                  quad.max_subdiv).value
            if tau_c > r:
                head = panel_quad(lambda t: _retarded_regular_array(t, r, m),
                                  _grid(r, tau_c, width, knots), quad.abs_tol,
                                  quad.rel_tol, quad.max_subdiv).value
            tail = profile.lambda_bar * (_retarded_tail(m, r) - head)
            return float(light_cone + body + tail)
        body = panel_quad(integrand, _grid(start, hi, width, knots), quad.abs_tol,
                          quad.rel_tol, quad.max_subdiv).value
        return float(light_cone + body)
    if kind == "keldysh":
        if profile.infinite_past:
            raise ValueError("keldysh convolution needs a finite-support profile")
        if r <= 0:
            raise ValueError("keldysh convolution needs r > 0")
        return integrate_across_cone(lambda t: float(weight(t)), lo, hi, r, m,
                                     knots, rel_tol=quad.rel_tol)
    raise ValueError(f"unknown kind {kind!r}")


_WHICH = {("y", "A"), ("z", "A"), ("y", "B"), ("z", "B")}


def spin_field_correlator(which, s: Scenario, g: GreensBundle, coeffs: BlochState,
                          p: FieldPoint) -> float:
    """Connected ``<d sigma_w^X d phi(x)>`` on the final slice.

    ``which`` is ``(w, X)`` with ``w`` in {y, z} and ``X`` in {A, B}.  The
    ``g`` argument is accepted for a uniform call shape; only the Bloch
    coefficients enter the printed forms.
    """
    which = tuple(which)
    if which not in _WHICH:
        raise ValueError(f"unsupported correlator {which!r}")
    t_last = max(s.profile_a.t_off, s.profile_b.t_off)
    if p.t_f < t_last:
        raise ValueError("field point must lie on a slice after both switch-offs")
    r_a, r_b = p.distance_to_a(), p.distance_to_b(s.distance)

    def phi(kind, X):
        prof, r = (s.profile_a, r_a) if X == "A" else (s.profile_b, r_b)
        return phi_convolution(kind, prof, p, r, s.mass, s.quad)

    w, X = which
    if w == "z":
        return phi("retarded", X)
    if X == "A":
        return -2.0 * coeffs.c_x0 * phi("keldysh", "A") + coeffs.c_yz * phi("retarded", "B")
    return -2.0 * coeffs.c_0x * phi("keldysh", "B") + coeffs.c_zy * phi("retarded", "A")


class ParticleNumber(NamedTuple):
    mean: float
    second_moment_excess: float  # <:N^2:> - <N>^2
    projected: Callable[[int, int], float]


def particle_number(g: GreensBundle) -> ParticleNumber:
    mean = g.gK_AA + g.gK_BB

    def projected(sigma_a: int, sigma_b: int) -> float:
        if sigma_a not in (1, -1) or sigma_b not in (1, -1):
            raise ValueError("spin labels must be +1 or -1")
        return mean + 2.0 * sigma_a * sigma_b * g.gK_BA

    return ParticleNumber(mean, 4.0 * g.gK_BA ** 2, projected)


def _one_side(dk: float, dr: float, c_x: float, c_cross: float, mean: float,
              n2: float, X: str) -> dict:
    raw = dk * c_x + dr * c_cross
    raw2 = (dk * dk - dr * dr) * c_x + 2.0 * dr * dk * c_cross
    return {
        f"x_{X}_N": raw,
        f"x_{X}_N_connected": raw - c_x * mean,
        f"y_{X}_N": 0.0,
        f"z_{X}_N": 0.0,
        f"x_{X}_N2": raw2,
        f"x_{X}_N2_connected": raw2 - c_x * n2,
        f"y_{X}_N2": 0.0,
        f"z_{X}_N2": 0.0,
    }


def spin_number_correlators(g: GreensBundle, coeffs: BlochState) -> dict:
    """Spin-number and spin-``:N^2:`` correlators, raw and connected."""
    mean = g.gK_AA + g.gK_BB
    n2 = mean * mean + 4.0 * g.gK_BA ** 2
    out = _one_side(g.gK_BB - g.gK_AA, g.gR_AB - g.gR_BA, coeffs.c_x0,
                    coeffs.c_yz, mean, n2, "A")
    out.update(_one_side(g.gK_AA - g.gK_BB, g.gR_BA - g.gR_AB, coeffs.c_0x,
                         coeffs.c_zy, mean, n2, "B"))
    return out
