"""Brute-force checks of the analytic two-qubit state.

Two routes that share no code with the closed-form pipeline:

* a single bosonic mode ``H = w a^dag a - J(t) x`` with
  ``J = lambda_A sigma_z^A + lambda_B sigma_z^B``, evolved in a truncated
  Fock space.  Each ``(sigma_A, sigma_B)`` sector evolves independently;
* a Simpson sum over the momentum grid of the continuum field, built from
  the Fourier transforms of the trapezoids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .propagators import FOUR_PI2, GreensBundle, correlation_knots, cross_correlation
from .scenario import (CouplingProfile, Scenario, ScenarioError, _profile_errors,
                       _profile_from_dict, coupling_at, segments)
from .spinstate import SIGN_PAIRS

__all__ = [
    "ConvergenceError",
    "EvolveResult",
    "ModeSum",
    "SingleModeConfig",
    "config_from_dict",
    "fourier_profile",
    "mode_sum_greens",
    "single_mode_evolve",
    "single_mode_greens",
    "weak_coupling_configs",
]


class ConvergenceError(ArithmeticError):
    """Raised when the cutoff and step study does not settle."""

    def __init__(self, message: str, trace: list):
        self.trace = trace
        super().__init__(f"{message}; trace: {trace}")


@dataclass(frozen=True)
class SingleModeConfig:
    omega: float
    g_a: CouplingProfile
    g_b: CouplingProfile
    n_max: int = 30
    dt: float = 0.05

    def __post_init__(self):
        errs = []
        if not self.omega > 0:
            errs.append("omega must be positive")
        if not (isinstance(self.n_max, int) and self.n_max >= 1):
            errs.append("n_max must be an integer >= 1")
        if not self.dt > 0:
            errs.append("dt must be positive")
        if self.g_a.infinite_past or self.g_b.infinite_past:
            errs.append("single-mode profiles need finite support")
        if errs:
            raise ValueError("; ".join(errs))


# Analytic single-mode Green's quantities -------------------------------------

def fourier_profile(profile: CouplingProfile, w):
    """``int lambda(t) exp(i w t) dt`` for a finite trapezoid, ``w > 0``."""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape, dtype=complex)
    for a, b, va, vb in segments(profile):
        slope = (vb - va) / (b - a)
        for t, v, sign in ((b, vb, 1.0), (a, va, -1.0)):
            out += sign * np.exp(1j * w * t) * (v / (1j * w) + slope / (w * w))
    return out


def _cubic_fourier(F, a: float, b: float, w: float) -> complex:
    """``int_a^b p(tau) exp(i w tau)`` for the cubic ``p`` matching ``F`` on [a, b]."""
    u = a + (b - a) * 0.5 * (1.0 - np.cos(np.pi * (np.arange(4) + 0.5) / 4))
    # fit maps [0, b - a] onto [-1, 1], which keeps short intervals well conditioned
    p = np.polynomial.Polynomial.fit(u - a, F(u), 3, domain=[0.0, b - a])
    total = 0j
    for t, sign in ((b, 1.0), (a, -1.0)):
        acc, d = 0j, p
        for k in range(4):
            acc += (-1) ** k * d(t - a) / (1j * w) ** (k + 1)
            d = d.deriv()
        total += sign * np.exp(1j * w * t) * acc
    return total


def _retarded_single(dst: CouplingProfile, src: CouplingProfile, w: float) -> float:
    knots = sorted({0.0} | {k for k in correlation_knots(dst, src) if k > 0})
    F = lambda tau: cross_correlation(dst, src, tau)
    total = 0j
    for a, b in zip(knots[:-1], knots[1:]):
        total += _cubic_fourier(F, a, b, w)
    return float(total.imag / w)


def single_mode_greens(cfg: SingleModeConfig) -> GreensBundle:
    """Green's quantities of the single mode from exact trapezoid transforms."""
    w = cfg.omega
    la, lb = fourier_profile(cfg.g_a, w), fourier_profile(cfg.g_b, w)
    gk = lambda x, y: float((x * np.conj(y)).real / (2.0 * w))
    gr_ba = _retarded_single(cfg.g_b, cfg.g_a, w) if cfg.g_a.lambda_bar and cfg.g_b.lambda_bar else 0.0
    gr_ab = _retarded_single(cfg.g_a, cfg.g_b, w) if cfg.g_a.lambda_bar and cfg.g_b.lambda_bar else 0.0
    return GreensBundle.from_greens(gr_ba, gr_ab, gk(la, la), gk(lb, lb), gk(la, lb))


# Truncated-Fock evolution ------------------------------------------------------

# commutator-free fourth-order Magnus coefficients
_C1, _C2 = 0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6
_A1, _A2 = 0.25 - math.sqrt(3) / 6, 0.25 + math.sqrt(3) / 6


def _evolve_once(cfg: SingleModeConfig, n_max: int, dt: float):
    w = cfg.omega
    dim = n_max + 1
    n_op = np.arange(dim, dtype=float)
    lower = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    x_op = (lower + lower.T) / math.sqrt(2.0 * w)
    knots = sorted({t for p in (cfg.g_a, cfg.g_b) if p.lambda_bar
                    for seg in segments(p) for t in seg[:2]})
    states = {s: np.eye(dim, dtype=complex)[0] for s in SIGN_PAIRS}
    for t0, t1 in zip(knots[:-1], knots[1:]):
        steps = max(1, math.ceil((t1 - t0) / dt - 1e-9))
        h = (t1 - t0) / steps
        starts = t0 + h * np.arange(steps)
        la = [coupling_at(cfg.g_a, starts + c * h) for c in (_C1, _C2)]
        lb = [coupling_at(cfg.g_b, starts + c * h) for c in (_C1, _C2)]
        for sa, sb in SIGN_PAIRS:
            j1 = sa * la[0] + sb * lb[0]
            j2 = sa * la[1] + sb * lb[1]
            # each exponent is h (w N / 2 - j x); the earlier-weighted one acts first
            js = np.stack([_A2 * j1 + _A1 * j2, _A1 * j1 + _A2 * j2], axis=1).ravel()
            mats = 0.5 * w * np.diag(n_op)[None] - js[:, None, None] * x_op[None]
            vals, vecs = np.linalg.eigh(mats)
            phases = np.exp(-1j * h * vals)
            psi = states[(sa, sb)]
            for k in range(js.size):
                v = vecs[k]
                psi = v @ (phases[k] * (v.T @ psi))
            states[(sa, sb)] = psi
    rho = np.empty((4, 4), dtype=complex)
    for i, s in enumerate(SIGN_PAIRS):
        for j, sp in enumerate(SIGN_PAIRS):
            rho[i, j] = 0.25 * np.vdot(states[sp], states[s])
    mean_n = 0.25 * sum(float(np.vdot(psi, n_op * psi).real) for psi in states.values())
    return rho, mean_n


class EvolveResult(NamedTuple):
    rho: np.ndarray
    mean_n: float
    n_max: int
    dt: float
    trace: list


def single_mode_evolve(cfg: SingleModeConfig, tol: float = 1e-8,
                       max_rounds: int = 6) -> EvolveResult:
    """Evolve ``|+x, +x, 0>`` and return the qubit state and ``<N>``.

    Each round compares the run at ``(n_max, dt)`` with runs at
    ``n_max + 5`` and ``dt / 2``.  A quantity that moves by ``tol`` or more
    is refined and the round repeats.
    """
    n_max, dt = cfg.n_max, cfg.dt
    trace = []
    for _ in range(max_rounds):
        base = _evolve_once(cfg, n_max, dt)
        more_n = _evolve_once(cfg, n_max + 5, dt)
        half_dt = _evolve_once(cfg, n_max, dt / 2)

        def change(other):
            return max(float(np.max(np.abs(other[0] - base[0]))),
                       abs(other[1] - base[1]))

        dn, dtc = change(more_n), change(half_dt)
        trace.append({"n_max": n_max, "dt": dt, "cutoff_change": dn, "step_change": dtc})
        if dn < tol and dtc < tol:
            return EvolveResult(base[0], base[1], n_max, dt, trace)
        if dn >= tol:
            n_max += 5
        if dtc >= tol:
            dt /= 2
    raise ConvergenceError("truncated-Fock evolution did not converge", trace)


# Momentum-grid sum ---------------------------------------------------------------

class ModeSum(NamedTuple):
    gK_AA: float
    gK_BB: float
    gK_BA: float
    # bounds on the neglected k > k_max contributions
    tail_AA: float
    tail_BB: float
    tail_BA: float


def _transform_bound(profile: CouplingProfile) -> float:
    """``c`` with ``|L(w)| <= lambda_bar * c / w^2`` (inf for a zero ramp)."""
    ramps = [profile.T_on, profile.T_off]
    if min(ramps) == 0:
        return math.inf
    return sum(2.0 / T for T in ramps)


def mode_sum_greens(s: Scenario, k_grid: int, k_max: float) -> ModeSum:
    """Keldysh quantities by Simpson summation over ``k`` in ``[0, k_max]``.

    Each mode contributes ``Re(L_X conj L_Y) sinc(k D) / (2 w)`` with
    ``L`` the Fourier transform of the profile.
    """
    if s.profile_a.infinite_past or s.profile_b.infinite_past:
        raise ValueError("mode sum needs finite supports")
    if k_grid < 3 or not k_max > 0:
        raise ValueError("need k_grid >= 3 and k_max > 0")
    k = np.linspace(0.0, k_max, k_grid)
    w = np.sqrt(s.mass ** 2 + k * k)
    la, lb = fourier_profile(s.profile_a, w), fourier_profile(s.profile_b, w)
    measure = k * k / (FOUR_PI2 * w)

    def total(x, y, D=0.0):
        vals = measure * (x * np.conj(y)).real * np.sinc(k * D / math.pi)
        return float(integrate.simpson(vals, x=k))

    pa, pb = s.profile_a, s.profile_b
    ca = pa.lambda_bar * _transform_bound(pa) if pa.lambda_bar else 0.0
    cb = pb.lambda_bar * _transform_bound(pb) if pb.lambda_bar else 0.0
    # integrand <= c_X c_Y / (4 pi^2 k^3), times 1/(k D) for the cross term
    self_tail = lambda c: c * c / (FOUR_PI2 * 2.0 * k_max ** 2)
    cross_tail = ca * cb / (FOUR_PI2 * 3.0 * k_max ** 3 * s.distance) if ca and cb else 0.0
    return ModeSum(total(la, la), total(lb, lb), total(la, lb, s.distance),
                   self_tail(ca), self_tail(cb), cross_tail)


def weak_coupling_configs() -> list[SingleModeConfig]:
    """Default oracle set: lambda_bar near 0.1, ramps from sudden to slow."""
    P = CouplingProfile
    return [
        SingleModeConfig(1.0, P(0.1, 0.0, 0.0, 3.0, 0.0), P(0.1, 0.0, 0.0, 3.0, 0.0)),
        SingleModeConfig(1.0, P(0.1, 0.0, 0.5, 2.0, 0.5), P(0.1, 1.0, 0.5, 2.0, 0.5)),
        SingleModeConfig(1.0, P(0.1, 0.0, 2.0, 3.0, 2.0), P(0.1, 1.0, 1.0, 2.0, 1.0)),
        SingleModeConfig(1.3, P(0.1, 0.0, 5.0, 4.0, 5.0), P(0.15, 2.0, 0.5, 1.0, 3.0)),
        SingleModeConfig(0.7, P(0.1, 0.0, 10.0, 0.0, 10.0), P(0.1, 5.0, 8.0, 2.0, 8.0)),
    ]


def config_from_dict(d: dict) -> SingleModeConfig:
    """Parse a single-mode config; errors use the scenario field-path format."""
    errs = [f"{k}: unknown key" for k in sorted(set(d) - {"omega", "g_a", "g_b", "n_max", "dt"})]
    errs += [f"{k}: missing" for k in ("omega", "g_a", "g_b") if k not in d]
    profiles = [_profile_from_dict(d.get(k, {}), k, errs) for k in ("g_a", "g_b")]
    for k, p in zip(("g_a", "g_b"), profiles):
        if p is not None:
            errs += _profile_errors(p, k)
    if errs:
        raise ScenarioError(errs)
    extra = {k: d[k] for k in ("n_max", "dt") if k in d}
    return SingleModeConfig(d["omega"], profiles[0], profiles[1], **extra)
