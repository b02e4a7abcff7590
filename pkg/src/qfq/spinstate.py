"""Reduced two-qubit state, entanglement measures and inequality audits.

Basis order is ``|++>, |+->, |-+>, |-->`` with ``+`` and ``-`` the sigma_z
eigenstates of qubit A (left) and qubit B (right).  Entropies are in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import entr

from .propagators import GreensBundle, _product

__all__ = [
    "AuditResult",
    "BlochState",
    "MeasureReport",
    "assemble_rho",
    "audit_inequalities",
    "bloch_coefficients",
    "bundle_audits",
    "matrix_eigenvalues",
    "measures",
    "mutual_information",
    "negativity",
    "partial_transpose",
    "partial_transpose_eigenvalues",
    "rho_eigenvalues",
    "sigma_entropy",
    "von_neumann_entropy",
]

LN2 = math.log(2.0)
SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_I2 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"0": _I2, "x": _SX, "y": _SY, "z": _SZ}


def pauli_pair(u: str, v: str) -> np.ndarray:
    return np.kron(PAULI[u], PAULI[v])


@dataclass(frozen=True)
class BlochState:
    c_xx: float
    c_yy: float
    c_x0: float
    c_0x: float
    c_yz: float
    c_zy: float

    @property
    def rho(self) -> np.ndarray:
        return assemble_rho(self)

    def as_dict(self) -> dict:
        return {"xx": self.c_xx, "yy": self.c_yy, "x0": self.c_x0,
                "0x": self.c_0x, "yz": self.c_yz, "zy": self.c_zy}


def bloch_coefficients(g: GreensBundle) -> BlochState:
    ga, gb = g.gamma_A, g.gamma_B
    k4 = 4.0 * g.gK_BA
    return BlochState(
        c_xx=ga * gb * math.cosh(k4),
        c_yy=ga * gb * math.sinh(k4),
        c_x0=ga * math.cos(2.0 * g.gR_AB),
        c_0x=gb * math.cos(2.0 * g.gR_BA),
        c_yz=-ga * math.sin(2.0 * g.gR_AB),
        c_zy=-gb * math.sin(2.0 * g.gR_BA),
    )


def assemble_rho(c: BlochState) -> np.ndarray:
    rho = (pauli_pair("0", "0")
           + c.c_xx * pauli_pair("x", "x")
           + c.c_x0 * pauli_pair("x", "0")
           + c.c_0x * pauli_pair("0", "x")
           + c.c_yy * pauli_pair("y", "y")
           + c.c_yz * pauli_pair("y", "z")
           + c.c_zy * pauli_pair("z", "y"))
    return rho / 4.0


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Transpose on qubit B."""
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def matrix_eigenvalues(rho: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))


def _one_minus_gamma_sq(gk: float) -> float:
    """``1 - gamma^2`` with ``gamma = exp(-2 gk)``, accurate near ``gk = 0``."""
    return 1.0 if math.isinf(gk) else -math.expm1(-4.0 * gk)


def _closed_form(g: GreensBundle, phase: float) -> np.ndarray:
    # Written so nothing cancels for nearly pure states: the radicand uses
    # sin^2(phase/2) and the smaller root of each pair comes from the product.
    ga, gb = g.gamma_A, g.gamma_B
    gab = ga * gb
    sh2 = math.sinh(2.0 * g.gK_BA) ** 2
    sp2 = math.sin(0.5 * phase) ** 2
    tilt = gab * math.sinh(4.0 * g.gK_BA)
    both_mixed = _one_minus_gamma_sq(g.gK_AA) * _one_minus_gamma_sq(g.gK_BB)
    if math.isinf(g.gK_AA) or math.isinf(g.gK_BB):
        diff = ga - gb
    else:
        diff = gb * math.expm1(2.0 * (g.gK_BB - g.gK_AA))
    out = {}
    for s2 in (1, -1):
        lin = ga + gb if s2 == 1 else diff
        radicand = lin * lin - s2 * 4.0 * gab * sp2 + tilt * tilt
        root = math.sqrt(max(radicand, 0.0))
        if s2 == 1:
            a = 1.0 + gab * (1.0 + 2.0 * sh2)
        else:
            a = -math.expm1(-2.0 * (g.gK_AA + g.gK_BB)) - 2.0 * gab * sh2
        # a^2 - root^2, free of cancellation
        prod = both_mixed + s2 * 4.0 * gab * (sh2 + sp2)
        big = a + root
        out[(1, s2)] = 0.25 * big
        out[(-1, s2)] = 0.25 * prod / big if big > 0 else 0.0
    return np.array([out[p] for p in SIGN_PAIRS])


def rho_eigenvalues(g: GreensBundle) -> np.ndarray:
    """Closed-form eigenvalues ordered by ``(s1, s2)`` = ++, +-, -+, --."""
    return _closed_form(g, 2.0 * (g.gR_AB - g.gR_BA))


def partial_transpose_eigenvalues(g: GreensBundle) -> np.ndarray:
    return _closed_form(g, 2.0 * (g.gR_AB + g.gR_BA))


def negativity(g: GreensBundle) -> float:
    mu_t = partial_transpose_eigenvalues(g)
    return float(-mu_t[mu_t < 0].sum())


def sigma_entropy(v: float) -> float:
    """Entropy of the eigenvalues ``(1 +- v)/2``."""
    if abs(v) > 1.0 + 1e-12 or math.isnan(v):
        raise ValueError(f"sigma_entropy needs |v| <= 1, got {v!r}")
    v = min(1.0, max(-1.0, v))
    return float(entr(0.5 * (1.0 + v)) + entr(0.5 * (1.0 - v)))


def von_neumann_entropy(eigenvalues, clip: float = 1e-10) -> float:
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam < -clip):
        raise ValueError("eigenvalue below the clipping floor")
    return float(entr(np.clip(lam, 0.0, None)).sum())


@dataclass(frozen=True)
class AuditResult:
    id: str
    lhs: float
    rhs: float
    kind: str  # "le" for lhs <= rhs, "eq" for lhs == rhs
    tol: float

    @property
    def slack(self) -> float:
        if self.kind == "eq":
            return self.tol - abs(self.lhs - self.rhs)
        return self.rhs - self.lhs + self.tol

    @property
    def passed(self) -> bool:
        return self.slack >= 0


@dataclass(frozen=True)
class MeasureReport:
    s_a: float
    s_b: float
    s_ab: float
    negativity: float
    i_ab: float
    i_aphi: float
    i_bphi: float
    v_a: float
    v_b: float
    d_a: float
    d_b: float
    p_a: float
    p_b: float
    connected: dict
    mu: tuple
    mu_tilde: tuple
    # matrix route, kept beside the closed forms
    s_ab_matrix: float = math.nan
    negativity_matrix: float = math.nan
    audits: tuple = field(default=(), compare=False)

    @property
    def averaged_distinguishability(self) -> float:
        return 0.5 * (self.d_a ** 2 + self.d_b ** 2)

    def scalars(self) -> dict:
        out = {k: getattr(self, k) for k in (
            "s_a", "s_b", "s_ab", "negativity", "i_ab", "i_aphi", "i_bphi",
            "v_a", "v_b", "d_a", "d_b", "p_a", "p_b")}
        out.update({f"c_{k}": v for k, v in self.connected.items()})
        return out


def connected_correlators(g: GreensBundle) -> dict:
    ga, gb = g.gamma_A, g.gamma_B
    k4 = 4.0 * g.gK_BA
    return {
        "xx": ga * gb * (math.cosh(k4) - math.cos(2 * g.gR_BA) * math.cos(2 * g.gR_AB)),
        "yy": ga * gb * math.sinh(k4),
        "yz": -ga * math.sin(2 * g.gR_AB),
        "zy": -gb * math.sin(2 * g.gR_BA),
    }


def _xlogx_step(u: float, eps: float) -> float:
    """``v ln v - u ln u`` with ``v = u + eps``, accurate for small ``eps``."""
    v = u + eps
    if u <= 0.0:
        return v * math.log(v) if v > 0.0 else 0.0
    if v <= 0.0:
        return -u * math.log(u)
    return eps * math.log(u) + v * math.log1p(eps / u)


def mutual_information(g: GreensBundle) -> float:
    """``I_AB`` without the cancellation in ``S_A + S_B - S_AB``.

    ``rho`` and ``rho_A x rho_B`` commute with ``sigma_x x sigma_x`` and
    split into two 2x2 blocks.  In each block the eigenvalues of ``rho``
    are shifts of the product eigenvalues, and both shifts have closed
    forms free of cancellation.
    """
    ga, gb = g.gamma_A, g.gamma_B
    a, b, k = g.gR_AB, g.gR_BA, g.gK_BA
    c_x0, c_0x = ga * math.cos(2 * a), gb * math.cos(2 * b)
    conn_xx = 2.0 * ga * gb * (math.sinh(2 * k) ** 2 + math.sin(a) ** 2
                               + math.cos(2 * a) * math.sin(b) ** 2)
    total = 0.0
    for s2 in (1, -1):
        z = c_x0 + s2 * c_0x
        o2 = ((ga * math.sin(2 * a) + s2 * gb * math.sin(2 * b)) ** 2
              + (ga * gb * math.sinh(4 * k)) ** 2)
        r = math.sqrt(z * z + o2)
        dr = o2 / (r + abs(z)) if r > 0 else 0.0
        prods = sorted(0.25 * (1 + t * c_x0) * (1 + s2 * t * c_0x) for t in (1, -1))
        total += _xlogx_step(prods[1], 0.25 * (s2 * conn_xx + dr))
        total += _xlogx_step(prods[0], 0.25 * (s2 * conn_xx - dr))
    return total


def measures(g: GreensBundle, with_matrix: bool = True) -> MeasureReport:
    c = bloch_coefficients(g)
    mu = rho_eigenvalues(g)
    mu_t = partial_transpose_eigenvalues(g)
    s_a = sigma_entropy(c.c_x0)
    s_b = sigma_entropy(c.c_0x)
    s_ab = von_neumann_entropy(mu)
    neg = float(-mu_t[mu_t < 0].sum())
    extra = {}
    if with_matrix:
        rho = assemble_rho(c)
        extra["s_ab_matrix"] = von_neumann_entropy(matrix_eigenvalues(rho))
        pt = matrix_eigenvalues(partial_transpose(rho))
        extra["negativity_matrix"] = float(-pt[pt < 0].sum())
    report = MeasureReport(
        s_a=s_a, s_b=s_b, s_ab=s_ab, negativity=neg,
        i_ab=mutual_information(g), i_aphi=s_a + s_ab - s_b, i_bphi=s_b + s_ab - s_a,
        v_a=abs(c.c_x0), v_b=abs(c.c_0x), d_a=abs(c.c_yz), d_b=abs(c.c_zy),
        p_a=2.0 * (LN2 - s_a), p_b=2.0 * (LN2 - s_b),
        connected=connected_correlators(g),
        mu=tuple(mu.tolist()), mu_tilde=tuple(mu_t.tolist()), **extra)
    return replace(report, audits=tuple(audit_inequalities(g, report)))


def bundle_audits(g: GreensBundle, ineq_tol: float = 1e-9) -> list[AuditResult]:
    """Inequalities on the Green's quantities alone; defined for any bundle."""
    out = []

    def le(id_, lhs, rhs):
        out.append(AuditResult(id_, float(lhs), float(rhs), "le", ineq_tol))

    kk = _product(g.gK_AA, g.gK_BB)
    le("rs", (g.gR_BA - g.gR_AB) ** 2, 4.0 * (kk - g.gK_BA ** 2))
    le("rs_k", g.gK_BA ** 2, kk)
    le("keldysh_positivity_plus", -2.0 * g.gK_BA, g.gK_AA + g.gK_BB)
    le("keldysh_positivity_minus", 2.0 * g.gK_BA, g.gK_AA + g.gK_BB)

    def sh(x):
        return math.copysign(math.inf, x) if abs(x) > 700.0 else math.sinh(x)

    kk_sinh = _product(sh(2 * g.gK_AA), sh(2 * g.gK_BB))
    # an infinite self term fully decoheres a qubit; the condition then holds trivially
    pos_rhs = (-math.inf if math.isinf(kk_sinh)
               else 1.0 - 2.0 * (kk_sinh - sh(2 * g.gK_BA) ** 2))
    # written as lhs <= rhs: (1 - 2[...]) <= cos(2(gR_BA - gR_AB))
    le("positivity_condition", pos_rhs, math.cos(2 * (g.gR_BA - g.gR_AB)))
    return out


def audit_inequalities(g: GreensBundle, r: MeasureReport,
                       ineq_tol: float = 1e-9, eq_tol: float = 1e-9) -> list[AuditResult]:
    out = bundle_audits(g, ineq_tol)

    def le(id_, lhs, rhs):
        out.append(AuditResult(id_, float(lhs), float(rhs), "le", ineq_tol))

    def eq(id_, lhs, rhs, tol=eq_tol):
        out.append(AuditResult(id_, float(lhs), float(rhs), "eq", tol))

    le("duality_a", r.v_a ** 2 + r.d_b ** 2, 1.0)
    le("duality_b", r.v_b ** 2 + r.d_a ** 2, 1.0)
    le("averaged_duality", r.averaged_distinguishability,
       1.0 - 0.5 * (r.v_a ** 2 + r.v_b ** 2))
    eq("tradeoff_a", r.i_ab + r.i_aphi, 2.0 * r.s_a)
    eq("tradeoff_b", r.i_ab + r.i_bphi, 2.0 * r.s_b)
    le("mi_bound_a", r.i_ab, 2.0 * LN2 - r.p_a)
    le("mi_bound_b", r.i_ab, 2.0 * LN2 - r.p_b)
    le("mi_bound_averaged", r.i_ab, 2.0 * LN2 - 0.5 * (r.p_a + r.p_b))
    for name, value in r.connected.items():
        le(f"wvhc_{name}", 0.5 * value ** 2, r.i_ab)
    eq("mu_sum", sum(r.mu), 1.0, 1e-12)
    eq("mu_tilde_sum", sum(r.mu_tilde), 1.0, 1e-12)
    for i, v in enumerate(r.mu):
        le(f"mu_nonnegative_{i}", -v, 0.0)
    return out
