"""Instantaneous-potential approximation parameterized by one angle.

The two spins interact through ``J(t) sigma_z sigma_z`` with no field
dynamics.  Everything is fixed by ``Theta = Jbar * (t_off - t_on)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .propagators import FOUR_PI, GreensBundle
from .scenario import Scenario, effective_duration
from .spinstate import sigma_entropy

__all__ = [
    "NewtonianComparison",
    "NewtonianPoint",
    "jbar",
    "newtonian_consistency",
    "newtonian_point",
    "theta_from_scenario",
]


@dataclass(frozen=True)
class NewtonianPoint:
    theta: float
    entropy: float
    negativity: float
    visibility: float
    distinguishability: float


def jbar(lambda_bar_a: float, lambda_bar_b: float, m: float, D: float) -> float:
    """Static Yukawa coupling between two plateaus."""
    if not m > 0:
        raise ValueError("jbar needs m > 0")
    if not D > 0:
        raise ValueError("jbar needs D > 0")
    return lambda_bar_a * lambda_bar_b * math.exp(-m * D) / (FOUR_PI * D)


def theta_from_scenario(s: Scenario) -> float:
    """``jbar`` times the effective duration of Bob's window.

    Meaningful when Alice sits on her plateau for all of Bob's window, so
    that Bob sees a static Yukawa coupling.
    """
    pa, pb = s.profile_a, s.profile_b
    return jbar(pa.lambda_bar, pb.lambda_bar, s.mass, s.distance) * effective_duration(pb)


def newtonian_point(theta: float) -> NewtonianPoint:
    c, sn = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return NewtonianPoint(theta=theta, entropy=sigma_entropy(c),
                          negativity=0.5 * abs(sn), visibility=abs(c),
                          distinguishability=abs(sn))


@dataclass(frozen=True)
class NewtonianComparison:
    theta: float
    dev_gR_BA: float
    dev_gR_AB: float
    gK_AA: float
    gK_BB: float
    gK_BA: float

    @property
    def max_relative_dev(self) -> float:
        if self.theta == 0:
            return 0.0 if max(self.dev_gR_BA, self.dev_gR_AB) == 0 else math.inf
        return max(self.dev_gR_BA, self.dev_gR_AB) / abs(self.theta)


def newtonian_consistency(g: GreensBundle, theta: float) -> NewtonianComparison:
    """Distance of a bundle from the instantaneous-potential regime."""
    return NewtonianComparison(theta=theta, dev_gR_BA=abs(g.gR_BA - theta),
                               dev_gR_AB=abs(g.gR_AB - theta), gK_AA=g.gK_AA,
                               gK_BB=g.gK_BB, gK_BA=g.gK_BA)
