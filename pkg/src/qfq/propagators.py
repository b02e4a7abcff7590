"""Massive scalar field propagators and their double time integrals.

Conventions: ``s = dt**2 - r**2``; ``G_R`` is the retarded function of
``(d_t^2 - nabla^2 + m^2) G = delta``; ``G_K`` is the symmetrized vacuum
two-point function.  The integrated quantities are

    gR_XY = int dt dt' lambda_X(t) G_R(t - t', D) lambda_Y(t')
    gK_XY = int dt dt' lambda_X(t) G_K(t - t', |x_X - x_Y|) lambda_Y(t')

with ``gK_BA`` evaluated in momentum space through closed-form kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy import integrate, special

from .scenario import CouplingProfile, QuadSettings, Scenario, segments

__all__ = [
    "DIVERGENT",
    "Divergent",
    "Estimate",
    "GreensBundle",
    "NonadiabaticDivergence",
    "QuadratureError",
    "bessel_j1",
    "bessel_k1",
    "bessel_y1",
    "cross_correlation",
    "correlation_knots",
    "frak_g_keldysh",
    "frak_g_retarded",
    "g_keldysh_position",
    "g_retarded_regular",
    "greens_bundle",
    "integrate_across_cone",
    "keldysh_cross_position",
    "keldysh_kernel_cross",
    "keldysh_kernel_self",
    "panel_quad",
]

FOUR_PI = 4.0 * math.pi
FOUR_PI2 = 4.0 * math.pi ** 2


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, value: float, error: float):
        self.value = value
        self.error = error
        super().__init__(f"{message} (value={value!r}, error estimate={error!r})")


class NonadiabaticDivergence(ArithmeticError):
    """A self Keldysh integral diverges because a ramp has zero duration."""


class Divergent:
    """Marker returned in place of a divergent self Keldysh integral."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "nonadiabatic-divergent"


DIVERGENT = Divergent()


class Estimate(NamedTuple):
    value: float
    error: float


# Bessel functions ---------------------------------------------------------

def bessel_j1(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_j1 domain is x >= 0")
    out = special.j1(x)
    return float(out) if out.ndim == 0 else out


def bessel_y1(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bessel_y1 domain is x > 0")
    out = special.y1(x)
    return float(out) if out.ndim == 0 else out


def bessel_k1(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bessel_k1 domain is x > 0")
    out = special.k1(x)
    return float(out) if out.ndim == 0 else out


# Position-space propagators ----------------------------------------------

def _retarded_regular_array(dt, r, m):
    dt = np.asarray(dt, dtype=float)
    s = dt * dt - r * r
    inside = (s > 0) & (dt > 0)
    root = np.sqrt(np.where(inside, s, 1.0))
    # J1(x)/x is smooth; evaluate it through j1 with the small-x limit 1/2.
    x = m * root
    ratio = np.where(x > 1e-8, special.j1(x) / np.where(x > 1e-8, x, 1.0), 0.5)
    return np.where(inside, -m * m * ratio / FOUR_PI, 0.0)


def g_retarded_regular(dt, r: float, m: float):
    """Bessel part of ``G_R`` inside the future light cone, 0 elsewhere.

    The light-cone delta term is not included.
    """
    out = _retarded_regular_array(dt, r, m)
    return float(out) if np.ndim(out) == 0 else out


def _keldysh_of_s(s, m):
    s = np.asarray(s, dtype=float)
    root = np.sqrt(np.abs(s))
    safe = np.where(root > 0, root, 1.0)
    y = 0.5 * math.pi * special.y1(m * safe) / safe
    k = special.k1(m * safe) / safe
    return m / FOUR_PI2 * np.where(s > 0, y, k)


def _keldysh_array(dt, r, m):
    dt = np.asarray(dt, dtype=float)
    return _keldysh_of_s(dt * dt - r * r, m)


def g_keldysh_position(dt, r: float, m: float):
    """Closed form of ``G_K(dt, r)``; undefined on the light cone ``s = 0``."""
    s = np.asarray(dt, dtype=float) ** 2 - r * r
    if np.any(s == 0):
        raise ValueError("G_K is singular on the light cone (s = 0)")
    out = _keldysh_array(dt, r, m)
    return float(out) if np.ndim(out) == 0 else out


# Momentum-space kernels ---------------------------------------------------

_RAMP_FLOOR = 1e-12


def _ramp_factor(w, T: float):
    """``2 sin(w T / 2) / T``, replaced by its T -> 0 limit ``w`` below a floor."""
    if T <= _RAMP_FLOOR:
        return w
    return 2.0 * np.sin(0.5 * w * T) / T


def _ramp_terms(p: CouplingProfile):
    """(center, duration, sign) of each ramp; the ramp-down carries sign +1."""
    terms = [(p.off_center, p.T_off, 1.0)]
    if not p.infinite_past:
        terms.append((p.on_center, p.T_on, -1.0))
    return terms


def keldysh_kernel_cross(k, profile_a: CouplingProfile,
                         profile_b: CouplingProfile, m: float):
    """Four-term time kernel of the cross Keldysh integral (unit amplitudes).

    Ramp-up terms are absent for an infinite-past profile.
    """
    w = np.sqrt(m * m + np.asarray(k, dtype=float) ** 2)
    total = np.zeros_like(w)
    for ca, ta, sa in _ramp_terms(profile_a):
        ra = _ramp_factor(w, ta)
        for cb, tb, sb in _ramp_terms(profile_b):
            total = total + sa * sb * ra * _ramp_factor(w, tb) * np.cos(w * (ca - cb))
    out = total / (w * w)
    return float(out) if out.ndim == 0 else out


def keldysh_kernel_self(k, profile: CouplingProfile, m: float):
    """Three-term time kernel of the self Keldysh integral (unit amplitude)."""
    w = np.sqrt(m * m + np.asarray(k, dtype=float) ** 2)
    r_off = _ramp_factor(w, profile.T_off)
    total = r_off * r_off
    if not profile.infinite_past:
        r_on = _ramp_factor(w, profile.T_on)
        t_bar = profile.off_center - profile.on_center
        total = total + r_on * r_on - 2.0 * r_off * r_on * np.cos(w * t_bar)
    out = total / (w * w)
    return float(out) if out.ndim == 0 else out


# Adaptive panel quadrature ------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = f(x)
    k = half * (y @ _KW)
    g = half * (y @ _GW)
    return k, np.abs(k - g)


def panel_quad(f: Callable, edges: Sequence[float], abs_tol: float,
               rel_tol: float, max_subdiv: int) -> Estimate:
    """Adaptive Gauss-Kronrod (7, 15) quadrature over consecutive panels.

    ``f`` must accept a 2-D array of abscissae.  Panels whose error estimate
    exceeds an equal share of the tolerance are bisected until the summed
    estimate meets ``max(abs_tol, rel_tol * |I|)``; ``max_subdiv`` caps the
    number of bisections.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return Estimate(0.0, 0.0)
    val, err = _gk15(f, a, b)
    splits = 0
    while True:
        total = math.fsum(val)
        total_err = float(err.sum())
        target = max(abs_tol, rel_tol * abs(total))
        if total_err <= target:
            return Estimate(total, total_err)
        bad = err > target / err.size
        n_bad = int(bad.sum())
        if splits + n_bad > max_subdiv:
            raise QuadratureError("subdivision limit reached", total, total_err)
        splits += n_bad
        ab, bb = a[bad], b[bad]
        mid = 0.5 * (ab + bb)
        na = np.concatenate([ab, mid])
        nb = np.concatenate([mid, bb])
        nv, ne = _gk15(f, na, nb)
        a = np.concatenate([a[~bad], na])
        b = np.concatenate([b[~bad], nb])
        val = np.concatenate([val[~bad], nv])
        err = np.concatenate([err[~bad], ne])
        order = np.argsort(a, kind="stable")
        a, b, val, err = a[order], b[order], val[order], err[order]


def _grid(lo: float, hi: float, width: float, breaks: Sequence[float] = ()) -> np.ndarray:
    n = max(1, int(math.ceil((hi - lo) / width)))
    pts = set(np.linspace(lo, hi, n + 1).tolist())
    pts.update(x for x in breaks if lo < x < hi)
    return np.array(sorted(pts))


# Trapezoid correlation ------------------------------------------------------

def _piece_value(piece, t):
    a, b, va, vb = piece
    if math.isinf(a):
        return np.full_like(t, va)
    return va + (vb - va) * (t - a) / (b - a)


def cross_correlation(dst: CouplingProfile, src: CouplingProfile, tau):
    """``F(tau) = int dt lambda_dst(t) lambda_src(t - tau)``, exact.

    Each product of linear pieces is quadratic, so Simpson's rule on the
    overlap is exact.
    """
    if dst.infinite_past and src.infinite_past:
        raise ValueError("correlation of two infinite-past profiles diverges")
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    for pd in segments(dst):
        for ps in segments(src):
            lo = np.maximum(pd[0], ps[0] + tau)
            hi = np.minimum(pd[1], ps[1] + tau)
            ok = hi > lo
            if not np.any(ok):
                continue
            lo_ = np.where(ok, lo, 0.0)
            hi_ = np.where(ok, hi, 0.0)
            mid = 0.5 * (lo_ + hi_)

            def prod(t):
                return _piece_value(pd, t) * _piece_value(ps, t - tau)

            simpson = (hi_ - lo_) / 6.0 * (prod(lo_) + 4.0 * prod(mid) + prod(hi_))
            out = out + np.where(ok, simpson, 0.0)
    return float(out) if out.ndim == 0 else out


def correlation_knots(dst: CouplingProfile, src: CouplingProfile) -> list[float]:
    """Finite values of tau where ``cross_correlation`` changes polynomial."""
    ends_d = {x for p in segments(dst) for x in p[:2] if math.isfinite(x)}
    ends_s = {x for p in segments(src) for x in p[:2] if math.isfinite(x)}
    raw = sorted({d - s for d in ends_d for s in ends_s})
    # differences of endpoints can repeat up to roundoff; keep one of each
    tol = 1e-12 * max([1.0] + [abs(x) for x in raw])
    out = []
    for x in raw:
        if not out or x - out[-1] > tol:
            out.append(x)
    return out


# Retarded integral ---------------------------------------------------------

def _retarded_tail(m: float, D: float) -> float:
    """int_D^inf of the Bessel part of G_R in dt; equals -(1 - e^{-mD})/(4 pi D)."""
    return math.expm1(-m * D) / (FOUR_PI * D)


def frak_g_retarded(src: CouplingProfile, dst: CouplingProfile, D: float,
                    m: float, quad: Optional[QuadSettings] = None) -> Estimate:
    """``int dt dt' lambda_dst(t) G_R(t - t', D) lambda_src(t')``.

    The double integral collapses to one over ``tau = t - t'`` weighted by
    the exact trapezoid correlation; the delta term of ``G_R`` becomes
    ``F(D) / (4 pi D)``.
    """
    quad = quad or QuadSettings()
    if D <= 0:
        raise ValueError("cross retarded integral requires D > 0")
    if src.lambda_bar == 0 or dst.lambda_bar == 0:
        return Estimate(0.0, 0.0)
    if dst.t_off - src.start < D:
        return Estimate(0.0, 0.0)
    if dst.infinite_past and src.infinite_past:
        raise ValueError("retarded integral of two infinite-past profiles diverges")

    def integrand(tau):
        return cross_correlation(dst, src, tau) * _retarded_regular_array(tau, D, m)

    light_cone = cross_correlation(dst, src, D) / (FOUR_PI * D)
    knots = correlation_knots(dst, src)
    width = math.pi / m
    if src.infinite_past:
        # Beyond tau_c the correlation is the constant lambda_src * int lambda_dst.
        tau_c = max(dst.t_off - src.plateau_end, D)
        plateau = cross_correlation(dst, src, tau_c)
        edges = _grid(D, tau_c, width, knots)
        body = panel_quad(integrand, edges, quad.abs_tol / 2, quad.rel_tol,
                          quad.max_subdiv) if tau_c > D else Estimate(0.0, 0.0)
        head = panel_quad(lambda t: _retarded_regular_array(t, D, m), edges,
                          quad.abs_tol / 2 / max(abs(plateau), 1.0), quad.rel_tol,
                          quad.max_subdiv) if tau_c > D else Estimate(0.0, 0.0)
        tail = plateau * (_retarded_tail(m, D) - head.value)
        return Estimate(light_cone + body.value + tail,
                        body.error + abs(plateau) * head.error)
    hi = dst.t_off - src.t_on
    if hi <= D:
        return Estimate(light_cone, 0.0)
    body = panel_quad(integrand, _grid(D, hi, width, knots), quad.abs_tol,
                      quad.rel_tol, quad.max_subdiv)
    return Estimate(light_cone + body.value, body.error)


# Keldysh integrals ---------------------------------------------------------

def _has_zero_ramp(p: CouplingProfile) -> bool:
    return p.T_off == 0 or (not p.infinite_past and p.T_on == 0)


def _kernel_bound_terms(pa: CouplingProfile, pb: CouplingProfile):
    """Envelope of |kernel| * w^2 as a list of (coefficient, power of w)."""
    out = []
    for _, ta, _ in _ramp_terms(pa):
        for _, tb, _ in _ramp_terms(pb):
            coef, power = 1.0, 0
            for t in (ta, tb):
                if t > 0:
                    coef *= 2.0 / t
                else:
                    power += 1
            out.append((coef, power))
    return out


def _tail_bound(terms, prefactor: float, D: Optional[float], K: float) -> float:
    """Upper bound on the integral of the envelope over ``k > K``.

    Uses ``k <= w``: each term of the integrand is at most
    ``prefactor * c * k^(2 - 5 + p)`` times ``1/(kD)`` for cross terms.
    """
    total = 0.0
    for coef, power in terms:
        exponent = 3 - power + (1 if D else 0)
        if exponent <= 1:
            return math.inf
        c = coef / D if D else coef
        total += c * K ** (1 - exponent) / (exponent - 1)
    return prefactor * total


def _choose_k_max(terms, prefactor, D, target, policy):
    if not isinstance(policy, str):
        K = float(policy)
        return K, _tail_bound(terms, prefactor, D, K)
    K = 1.0
    while _tail_bound(terms, prefactor, D, K) > target:
        K *= 2.0
    lo = K / 2
    for _ in range(30):
        mid = 0.5 * (lo + K)
        if _tail_bound(terms, prefactor, D, mid) > target:
            lo = mid
        else:
            K = mid
    return K, _tail_bound(terms, prefactor, D, K)


def _phase_rate(pa: CouplingProfile, pb: CouplingProfile, D: float) -> float:
    rate = 0.0
    for ca, ta, _ in _ramp_terms(pa):
        for cb, tb, _ in _ramp_terms(pb):
            rate = max(rate, abs(ca - cb) + 0.5 * (ta + tb))
    return rate + D


def _self_cosines(p: CouplingProfile) -> list[tuple[float, float]]:
    """Self kernel times w^2 written as ``sum a_j cos(w phi_j)`` (finite ramps)."""
    To = p.T_off
    out = [(2.0 / To ** 2, 0.0), (-2.0 / To ** 2, To)]
    if p.infinite_past:
        return out
    Tn = p.T_on
    t_bar = p.off_center - p.on_center
    d, sig = 0.5 * (To - Tn), 0.5 * (To + Tn)
    c = -2.0 / (To * Tn)
    out += [(2.0 / Tn ** 2, 0.0), (-2.0 / Tn ** 2, Tn),
            (c, abs(t_bar + d)), (c, abs(t_bar - d)),
            (-c, t_bar + sig), (-c, abs(t_bar - sig))]
    return out


def _envelope_tail(m: float, K: float) -> float:
    """Exact ``int_K^inf k^2 / w^5 dk``."""
    return -math.expm1(-1.5 * math.log1p((m / K) ** 2)) / (3.0 * m * m)


def _self_tail(cosines, m: float, K: float) -> tuple[float, float]:
    """(exact tail of the non-oscillating part, bound on the rest) beyond K.

    For phi > 0 integration by parts gives ``|int_K^inf g cos(w phi)| <=
    2 g(K) / (d(w phi)/dk)(K)`` with ``g = k^2/w^5``, valid for K > m.
    """
    flat = sum(a for a, phi in cosines if phi == 0.0)
    wK = math.sqrt(m * m + K * K)
    env = _envelope_tail(m, K)
    bound = 0.0
    for a, phi in cosines:
        if phi > 0:
            bound += abs(a) * min(env, 2.0 * K / (phi * wK ** 4))
    return flat * env, bound


_MAX_PANELS = 2_000_000


def _keldysh_momentum(pa: CouplingProfile, pb: CouplingProfile, D: float,
                      m: float, quad: QuadSettings) -> Estimate:
    prefactor = pa.lambda_bar * pb.lambda_bar / FOUR_PI2
    if prefactor == 0:
        return Estimate(0.0, 0.0)
    cross = D > 0
    target = quad.abs_tol / 10
    tail_value = 0.0
    if cross:
        terms = _kernel_bound_terms(pa, pb)
        K, tail = _choose_k_max(terms, prefactor, D, target, quad.k_max_policy)
        if math.isinf(tail):
            raise NonadiabaticDivergence("momentum integral does not converge")

        def integrand(k):
            w2 = m * m + k * k
            # quadrature nodes are interior, so k > 0 here
            return (k * k / (w2 * np.sqrt(w2)) * np.sin(k * D) / (k * D)
                    * keldysh_kernel_cross(k, pa, pb, m))
    else:
        cosines = _self_cosines(pa)
        if isinstance(quad.k_max_policy, str):
            K = 2.0 * m
            while prefactor * _self_tail(cosines, m, K)[1] > target:
                K *= 2.0
        else:
            K = max(float(quad.k_max_policy), m)
        flat, rest = _self_tail(cosines, m, K)
        tail_value, tail = prefactor * flat, prefactor * rest

        def integrand(k):
            w2 = m * m + k * k
            return k * k / (w2 * np.sqrt(w2)) * keldysh_kernel_self(k, pa, m)

    width = 2.0 * math.pi / max(_phase_rate(pa, pb, D), 1.0)
    if K / width > _MAX_PANELS:
        raise QuadratureError("momentum cutoff needs too many panels", math.nan, math.inf)
    edges = _grid(0.0, K, width)
    body = panel_quad(integrand, edges, 0.9 * quad.abs_tol / prefactor,
                      quad.rel_tol, quad.max_subdiv)
    return Estimate(prefactor * body.value + tail_value,
                    prefactor * body.error + tail)


def _keldysh_self(p: CouplingProfile, m: float, quad: QuadSettings):
    if p.lambda_bar == 0:
        return Estimate(0.0, 0.0)
    if _has_zero_ramp(p):
        return DIVERGENT
    return _keldysh_momentum(p, p, 0.0, m, quad)


KeldyshValue = Union[Estimate, Divergent]


def frak_g_keldysh(s: Scenario) -> tuple[KeldyshValue, KeldyshValue, KeldyshValue]:
    """``(gK_AA, gK_BB, gK_BA)`` via the momentum-space kernels.

    A self term of a profile with a zero-duration ramp is reported as
    ``DIVERGENT``.
    """
    pa, pb, q = s.profile_a, s.profile_b, s.quad
    aa = _keldysh_self(pa, s.mass, q)
    bb = _keldysh_self(pb, s.mass, q)
    ba = _keldysh_momentum(pa, pb, s.distance, s.mass, q)
    return aa, bb, ba


def integrate_across_cone(weight: Callable[[float], float], lo: float,
                          hi: float, r: float, m: float,
                          knots: Sequence[float] = (),
                          rel_tol: float = 1e-9) -> float:
    """``int_lo^hi weight(tau) G_K(tau, r) dtau`` as a principal value.

    ``G_K`` has a simple pole where ``tau = +-r``.  Around each pole inside
    the range the integrand is folded symmetrically, which cancels the pole
    and leaves a bounded integrand.  ``knots`` are kinks of ``weight``.
    """
    if r <= 0:
        raise ValueError("the light-cone folding needs r > 0")
    knots = [k for k in knots if lo < k < hi]
    poles = [p for p in (-r, r) if lo < p < hi]
    cuts = sorted(set([lo, hi] + knots + poles))

    def f(tau):
        return float(weight(tau) * _keldysh_array(tau, r, m))

    def plain(a, b):
        pts = [k for k in knots if a < k < b]
        val, _ = integrate.quad(f, a, b, points=pts or None, limit=500,
                                epsabs=0.0, epsrel=rel_tol)
        return val

    def folded(p, delta):
        # s is formed from u directly: p +- u would round away the offset.
        # u = delta v^2 removes the logarithmic part of the singularity.
        sign = 1.0 if p > 0 else -1.0

        def g(v):
            u = delta * v * v
            out = weight(p + sign * u) * _keldysh_of_s(u * (2.0 * r + u), m)
            inn = weight(p - sign * u) * _keldysh_of_s(-u * (2.0 * r - u), m)
            return float(out + inn) * 2.0 * delta * v

        inner = sorted({math.sqrt(abs(k - p) / delta) for k in knots
                        if 0 < abs(k - p) < delta})
        val, _ = integrate.quad(g, 0.0, 1.0, points=inner or None, limit=500,
                                epsabs=0.0, epsrel=rel_tol)
        return val

    total = 0.0
    edges = [lo, hi]
    excluded = []
    for p in poles:
        delta = 0.5 * min(abs(c - p) for c in cuts if c != p)
        total += folded(p, delta)
        edges += [p - delta, p + delta]
        excluded.append((p - delta, p + delta))
    edges = sorted(edges)
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a or any(ea <= a and b <= eb for ea, eb in excluded):
            continue
        total += plain(a, b)
    return total


def keldysh_cross_position(s: Scenario, rel_tol: float = 1e-9) -> float:
    """Cross Keldysh integral from the position-space closed form of ``G_K``.

    Integrates the exact trapezoid correlation ``F_BA(tau)`` against
    ``G_K(tau, D)``; this route shares no code with the momentum kernels.
    """
    pa, pb = s.profile_a, s.profile_b
    if pa.infinite_past or pb.infinite_past:
        raise ValueError("position-space route needs finite supports")
    lo, hi = pb.t_on - pa.t_off, pb.t_off - pa.t_on
    return integrate_across_cone(lambda tau: cross_correlation(pb, pa, tau),
                                 lo, hi, s.distance, s.mass,
                                 correlation_knots(pb, pa), rel_tol)


# Bundle -------------------------------------------------------------------

def _gamma(gk: float) -> float:
    return math.exp(-2.0 * gk)


@dataclass(frozen=True)
class GreensBundle:
    gR_BA: float
    gR_AB: float
    gK_AA: float
    gK_BB: float
    gK_BA: float
    gamma_A: float
    gamma_B: float
    errors: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_greens(cls, gR_BA: float, gR_AB: float, gK_AA: float,
                    gK_BB: float, gK_BA: float,
                    errors: Optional[dict] = None) -> "GreensBundle":
        return cls(gR_BA, gR_AB, gK_AA, gK_BB, gK_BA, _gamma(gK_AA),
                   _gamma(gK_BB), dict(errors or {}))

    @classmethod
    def from_gammas(cls, gamma_A: float, gamma_B: float, gR_BA: float = 0.0,
                    gR_AB: float = 0.0, gK_BA: float = 0.0) -> "GreensBundle":
        """Degenerate bundle parameterized by the decoherence factors."""
        def gk(g):
            return math.inf if g == 0 else -0.5 * math.log(g)
        return cls(gR_BA, gR_AB, gk(gamma_A), gk(gamma_B), gK_BA,
                   gamma_A, gamma_B)

    def swapped(self) -> "GreensBundle":
        return GreensBundle(self.gR_AB, self.gR_BA, self.gK_BB, self.gK_AA,
                            self.gK_BA, self.gamma_B, self.gamma_A,
                            dict(self.errors))

    def invariant_violations(self, slack: float = 1e-9) -> list[str]:
        out = []
        if self.gK_AA < -slack or self.gK_BB < -slack:
            out.append("self Keldysh integrals must be nonnegative")
        for sign in (1, -1):
            if self.gK_AA + self.gK_BB + 2 * sign * self.gK_BA < -slack:
                out.append("gK_AA + gK_BB +- 2 gK_BA must be nonnegative")
        det = _product(self.gK_AA, self.gK_BB) - self.gK_BA ** 2
        if det < -slack:
            out.append("gK_AA gK_BB >= gK_BA^2 violated")
        if (self.gR_BA - self.gR_AB) ** 2 > 4 * det + slack:
            out.append("retarded Robertson-Schroedinger bound violated")
        return out


def _product(a: float, b: float) -> float:
    # 0 * inf arises only for degenerate limit bundles; take it as 0.
    if a == 0 or b == 0:
        return 0.0
    return a * b


def greens_bundle(s: Scenario) -> GreensBundle:
    aa, bb, ba = frak_g_keldysh(s)
    for name, v in (("gK_AA", aa), ("gK_BB", bb)):
        if v is DIVERGENT:
            raise NonadiabaticDivergence(f"{name} diverges for a zero-duration ramp")
    m, D, q = s.mass, s.distance, s.quad
    r_ba = frak_g_retarded(s.profile_a, s.profile_b, D, m, q)
    r_ab = frak_g_retarded(s.profile_b, s.profile_a, D, m, q)
    errors = {"gR_BA": r_ba.error, "gR_AB": r_ab.error, "gK_AA": aa.error,
              "gK_BB": bb.error, "gK_BA": ba.error}
    return GreensBundle.from_greens(r_ba.value, r_ab.value, aa.value,
                                    bb.value, ba.value, errors)
