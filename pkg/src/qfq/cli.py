"""Command-line front end: figure data, sweeps, audits and oracle runs as CSV.

Exit codes: 0 success, 1 audit failure, 2 usage error, 3 numeric failure.
``QFQ_WORKERS`` sets the number of worker processes (default 1).  Output is
byte-identical for any worker count.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import limits
from .limits import LimitDomainError, Regime
from .newtonian import newtonian_point
from .oracle import (ConvergenceError, config_from_dict, single_mode_evolve,
                     single_mode_greens, weak_coupling_configs)
from .propagators import (GreensBundle, NonadiabaticDivergence, QuadratureError,
                          greens_bundle)
from .scenario import (CausalRegion, CouplingProfile, QuadSettings, Scenario,
                       ScenarioError, classify_region, scenario_from_dict,
                       validate)
from .spinstate import (assemble_rho, bloch_coefficients, bundle_audits, matrix_eigenvalues,
                        measures, negativity, partial_transpose,
                        von_neumann_entropy)

__all__ = [
    "FIGURE_IDS",
    "SweepSpec",
    "cmd_audit",
    "cmd_figure",
    "cmd_oracle",
    "cmd_sweep",
    "fig12_scenario",
    "fig14_scenario",
    "figure_table",
    "main",
    "random_scenario",
    "sweep_spec_from_dict",
]

EXIT_OK, EXIT_AUDIT, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

GAMMAS = (0.0, 0.25, 0.5, 0.75, 1.0)
THETA_GRID = np.linspace(0.0, math.pi, 401)
# neither figure states its sampling; 200 log-spaced points each
FIG12_D_GRID = np.logspace(math.log10(0.5), math.log10(20.0), 200)
FIG14_TOFF_GRID = np.logspace(0.0, 3.0, 200)
TIGHT_QUAD = QuadSettings(abs_tol=1e-13, rel_tol=1e-8)

NUMERIC_ERRORS = (QuadratureError, NonadiabaticDivergence, ConvergenceError,
                  FloatingPointError)


# Output helpers ------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.16e" % (float(v) + 0.0)  # folds -0.0 into 0.0


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def workers() -> int:
    try:
        return max(1, int(os.environ.get("QFQ_WORKERS", "1")))
    except ValueError:
        return 1


def ordered_map(fn: Callable, items: Sequence) -> list:
    """``map`` over a process pool; results keep input order."""
    n = workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))


# Figures -----------------------------------------------------------------------

FIGURE_IDS = ("fig3", "fig6", "fig7", "fig8", "fig10", "fig11", "fig12", "fig14")
CORR_KEYS = ("xx", "yy", "yz", "zy")


def fig12_scenario(D: float, quad: QuadSettings = TIGHT_QUAD) -> Scenario:
    """Symmetric simultaneous windows used for the distance sweep."""
    p = CouplingProfile(1.0, 0.0, 2.0, 4.0, 2.0)
    return Scenario(1.0, float(D), p, p, quad)


def fig14_scenario(T_off_a: float, quad: QuadSettings = TIGHT_QUAD) -> Scenario:
    """Alice on since the remote past, switched off before Bob can reach her."""
    D = 5.0
    pb = CouplingProfile(1.0, 0.0, 1.0, 2.0, 1.0)
    pa = CouplingProfile.ending_at(pb.t_on + D - 1.0, 1.0, 0.0, 0.0,
                                   float(T_off_a), infinite_past=True)
    return Scenario(1.0, D, pa, pb, quad)


def rs_oneway_ratio(g: GreensBundle) -> float:
    """LHS over RHS of the uncertainty relation with ``gR_AB = 0``."""
    return (g.gR_BA ** 2 / 4 + g.gK_BA ** 2) / (g.gK_AA * g.gK_BB)


_PHYS_COLUMNS = (["region", "gR_BA", "gR_AB", "gK_AA", "gK_BB", "gK_BA", "i_ab",
                  "negativity"] + [f"c_{k}" for k in CORR_KEYS]
                 + [f"C_{k}" for k in CORR_KEYS])


def _physical_row(s: Scenario) -> list:
    g = greens_bundle(s)
    r = measures(g, with_matrix=False)
    row = [classify_region(s).value, g.gR_BA, g.gR_AB, g.gK_AA, g.gK_BB, g.gK_BA,
           r.i_ab, r.negativity]
    row += [r.connected[k] for k in CORR_KEYS]
    row += [0.5 * r.connected[k] ** 2 for k in CORR_KEYS]
    return row


def _fig12_point(D: float) -> list:
    return [D] + _physical_row(fig12_scenario(D))


def _fig14_point(T_off: float) -> list:
    s = fig14_scenario(T_off)
    row = _physical_row(s)
    g = GreensBundle.from_greens(row[1], row[2], row[3], row[4], row[5])
    return [T_off] + row + [rs_oneway_ratio(g)]


def _abstract_figure(fig: str):
    thetas = THETA_GRID
    if fig == "fig3":
        header = ["theta", "entropy_over_ln2", "distinguishability_sq",
                  "visibility_sq", "negativity"]
        rows = []
        for th in thetas:
            p = newtonian_point(th)
            rows.append([th, p.entropy / math.log(2), p.distinguishability ** 2,
                         p.visibility ** 2, p.negativity])
        return header, rows
    if fig in ("fig6", "fig7", "fig8"):
        report, label = limits.adiabatic_report, "gamma_b"
    else:
        report, label = limits.nonadiabatic_report, "gamma_a"
    fields = {"fig6": ["negativity"], "fig7": ["i_ab", "averaged_distinguishability"],
              "fig8": ["i_aphi", "i_bphi"], "fig10": ["i_ab", "averaged_distinguishability"],
              "fig11": ["i_aphi", "i_bphi"]}[fig]
    header = ["theta"] + [f"{f}_{label}_{g:g}" for f in fields for g in GAMMAS]
    rows = []
    for th in thetas:
        reps = [report(gm, th) for gm in GAMMAS]
        row = [th]
        for f in fields:
            for rep in reps:
                if f == "averaged_distinguishability":
                    o = rep.outputs
                    row.append(0.5 * (o["d_a"] ** 2 + o["d_b"] ** 2))
                else:
                    row.append(rep.outputs[f])
        rows.append(row)
    return header, rows


def figure_table(fig: str, grid: Optional[Sequence[float]] = None):
    """Header and rows of a figure; ``grid`` overrides the x sampling."""
    if fig not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {fig!r}; choose from {', '.join(FIGURE_IDS)}")
    if fig == "fig12":
        xs = list(FIG12_D_GRID if grid is None else grid)
        return ["D"] + _PHYS_COLUMNS, ordered_map(_fig12_point, xs)
    if fig == "fig14":
        xs = list(FIG14_TOFF_GRID if grid is None else grid)
        return (["T_off_a"] + _PHYS_COLUMNS + ["rs_ratio"],
                ordered_map(_fig14_point, xs))
    return _abstract_figure(fig)


def cmd_figure(fig: str, out_path: str) -> int:
    header, rows = figure_table(fig)
    write_csv(out_path, header, rows)
    return EXIT_OK


# Sweeps ------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"
    outputs: tuple = ()
    base: Optional[Scenario] = None
    regime: Optional[Regime] = None
    fixed: tuple = ()  # (name, value) pairs for abstract sweeps

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.count)
        return np.linspace(self.start, self.stop, self.count)


_REPORTS = {Regime.ADIABATIC_I: limits.adiabatic_report,
            Regime.NONADIABATIC_II: limits.nonadiabatic_report,
            Regime.SPACELIKE_IV: limits.spacelike_report,
            Regime.ONEWAY_II: limits.oneway_report}

_BUNDLE_FIELDS = ("gR_BA", "gR_AB", "gK_AA", "gK_BB", "gK_BA", "gamma_A", "gamma_B")


def sweep_spec_from_dict(d: dict) -> SweepSpec:
    errs = []
    allowed = {"base", "regime", "fixed", "parameter", "range", "outputs"}
    errs += [f"{k}: unknown key" for k in sorted(set(d) - allowed)]
    rng = d.get("range", {})
    for k in ("start", "stop", "count"):
        if k not in rng:
            errs.append(f"range.{k}: missing")
    if "parameter" not in d:
        errs.append("parameter: missing")
    if ("base" in d) == ("regime" in d):
        errs.append("exactly one of base or regime is required")
    if errs:
        raise ScenarioError(errs)
    spacing = rng.get("spacing", "linear")
    count = rng["count"]
    if not isinstance(count, int) or count < 2:
        errs.append("range.count must be an integer >= 2")
    if rng["start"] == rng["stop"]:
        errs.append("range must have nonzero length")
    if spacing not in ("linear", "log"):
        errs.append("range.spacing must be linear or log")
    elif spacing == "log" and not (rng["start"] > 0 and rng["stop"] > 0):
        errs.append("log spacing needs a positive range")
    base = regime = None
    if "base" in d:
        try:
            base = scenario_from_dict(d["base"])
        except ScenarioError as e:
            errs += [f"base.{m}" for m in e.errors]
    else:
        try:
            regime = Regime(d["regime"])
        except ValueError:
            errs.append(f"regime: unknown value {d['regime']!r}")
    if errs:
        raise ScenarioError(errs)
    return SweepSpec(d["parameter"], float(rng["start"]), float(rng["stop"]), count,
                     spacing, tuple(d.get("outputs", ())), base, regime,
                     tuple(sorted(d.get("fixed", {}).items())))


def _set_parameter(s: Scenario, name: str, value: float) -> Scenario:
    if name in ("mass", "distance"):
        return replace(s, **{name: value})
    who, _, field_name = name.partition(".")
    if who in ("profile_a", "profile_b") and field_name in (
            "lambda_bar", "t_on", "T_on", "T_plateau", "T_off"):
        return replace(s, **{who: replace(getattr(s, who), **{field_name: value})})
    raise ValueError(f"unknown sweep parameter {name!r}")


def _sweep_point(args) -> tuple[dict, str]:
    spec, value = args
    try:
        if spec.regime is not None:
            kwargs = dict(spec.fixed)
            kwargs[spec.parameter] = value
            rep = _REPORTS[spec.regime](**kwargs)
            return dict(rep.outputs), ""
        s = validate(_set_parameter(spec.base, spec.parameter, value))
        g = greens_bundle(s)
        out = {k: getattr(g, k) for k in _BUNDLE_FIELDS}
        out.update(measures(g, with_matrix=False).scalars())
        return out, ""
    except (ScenarioError, LimitDomainError, ValueError, TypeError, *NUMERIC_ERRORS) as e:
        return {}, f"{type(e).__name__}: {e}"


def cmd_sweep(spec: SweepSpec, out_path: str) -> int:
    xs = spec.values()
    results = ordered_map(_sweep_point, [(spec, float(x)) for x in xs])
    outputs = list(spec.outputs)
    if not outputs:
        outputs = sorted({k for r, _ in results for k in r})
    header = [spec.parameter] + outputs + ["error"]
    rows = []
    for x, (r, err) in zip(xs, results):
        rows.append([x] + [r.get(k, math.nan) for k in outputs] + [err])
    write_csv(out_path, header, rows)
    return EXIT_OK


# Audit ----------------------------------------------------------------------------

def random_scenario(rng: np.random.Generator) -> Scenario:
    """One audit scenario.

    Sampling ranges: mass in [0.5, 2], distance in [0.5, 15], lambda_bar in
    [0.1, 2], ramps in [0.5, 5], plateaus in [0, 5], Alice starting at 0
    and Bob starting in [-10, 10].  All uniform.
    """
    m = rng.uniform(0.5, 2.0)
    D = rng.uniform(0.5, 15.0)

    def prof(t_on):
        return CouplingProfile(rng.uniform(0.1, 2.0), t_on, rng.uniform(0.5, 5.0),
                               rng.uniform(0.0, 5.0), rng.uniform(0.5, 5.0))

    pa = prof(0.0)
    pb = prof(rng.uniform(-10.0, 10.0))
    return Scenario(m, D, pa, pb)


AUDIT_HEADER = ["scenario", "region", "audit", "lhs", "rhs", "slack", "passed"]


def _audit_rows(index: int, s: Scenario, g: GreensBundle) -> list:
    region = classify_region(s)
    rows = []

    def add(id_, lhs, rhs, tol):
        rows.append([index, region.value, id_, lhs, rhs, rhs - lhs + tol, lhs <= rhs + tol])

    try:
        r = measures(g, with_matrix=True)
    except ValueError:
        # rho has a clearly negative eigenvalue; the entropies are undefined
        lowest = float(matrix_eigenvalues(assemble_rho(bloch_coefficients(g))).min())
        add("state_positive", -lowest, 0.0, 1e-10)
        rows += [[index, region.value, a.id, a.lhs, a.rhs, a.slack, a.passed]
                 for a in bundle_audits(g)]
        add("bundle_invariants", float(len(g.invariant_violations())), 0.0, 0.0)
        return rows
    rows += [[index, region.value, a.id, a.lhs, a.rhs, a.slack, a.passed] for a in r.audits]
    if region is not CausalRegion.I:
        add("separable_outside_region_i", r.negativity, 0.0, 1e-12)
    add("bundle_invariants", float(len(g.invariant_violations())), 0.0, 0.0)
    add("entropy_matrix_route", abs(r.s_ab - r.s_ab_matrix), 0.0, 1e-9)
    add("negativity_matrix_route", abs(r.negativity - r.negativity_matrix), 0.0, 1e-9)
    return rows


def _audit_point(args):
    index, s = args
    try:
        return greens_bundle(s), ""
    except NUMERIC_ERRORS as e:
        return None, f"{type(e).__name__}: {e}"


def cmd_audit(n_random: int, seed: int, out_path: str,
              bundle_hook: Optional[Callable[[int, GreensBundle], GreensBundle]] = None) -> int:
    """Run the pipeline and every inequality on ``n_random`` scenarios.

    ``bundle_hook`` lets tests corrupt a bundle before the audit.
    """
    rng = np.random.default_rng(seed)
    scenarios = [random_scenario(rng) for _ in range(n_random)]
    results = ordered_map(_audit_point, list(enumerate(scenarios)))
    rows, failed = [], False
    for i, (s, (g, err)) in enumerate(zip(scenarios, results)):
        if g is None:
            rows.append([i, classify_region(s).value, "pipeline", math.nan, math.nan,
                         math.nan, False])
            print(f"scenario {i}: {err}", file=sys.stderr)
            failed = True
            continue
        if bundle_hook is not None:
            g = bundle_hook(i, g)
        for row in _audit_rows(i, s, g):
            failed |= not row[-1]
            rows.append(row)
    write_csv(out_path, AUDIT_HEADER, rows)
    return EXIT_AUDIT if failed else EXIT_OK


# Oracle ------------------------------------------------------------------------------

ORACLE_HEADER = ["config", "quantity", "analytic", "brute_force", "delta"]


def oracle_rows(index: int, cfg) -> list:
    g = single_mode_greens(cfg)
    res = single_mode_evolve(cfg)
    rho_a = assemble_rho(bloch_coefficients(g))
    rho_b = res.rho
    rows = []
    for i in range(4):
        for j in range(4):
            for part, f in (("re", np.real), ("im", np.imag)):
                a, b = float(f(rho_a[i, j])), float(f(rho_b[i, j]))
                rows.append([index, f"rho_{i}{j}_{part}", a, b, b - a])
    pt = matrix_eigenvalues(partial_transpose(rho_b))
    neg_b = float(-pt[pt < 0].sum())
    s_ab_b = von_neumann_entropy(matrix_eigenvalues(rho_b))
    r = measures(g, with_matrix=False)
    for name, a, b in (("negativity", negativity(g), neg_b),
                       ("s_ab", r.s_ab, s_ab_b),
                       ("mean_n", g.gK_AA + g.gK_BB, res.mean_n)):
        rows.append([index, name, a, b, b - a])
    rows.append([index, "n_max", res.n_max, res.n_max, 0.0])
    rows.append([index, "dt", res.dt, res.dt, 0.0])
    return rows


def _load_oracle_configs(path: Optional[str]):
    if path is None:
        return weak_coupling_configs()
    with open(path) as fh:
        d = json.load(fh)
    items = d["configs"] if isinstance(d, dict) and "configs" in d else [d]
    return [config_from_dict(c) for c in items]


def cmd_oracle(config_path: Optional[str], out_path: str) -> int:
    cfgs = _load_oracle_configs(config_path)
    rows = []
    for i, cfg in enumerate(cfgs):
        rows += oracle_rows(i, cfg)
    write_csv(out_path, ORACLE_HEADER, rows)
    return EXIT_OK


# Entry point -----------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    f = sub.add_parser("figure", help="write the data behind one figure")
    f.add_argument("id", choices=FIGURE_IDS)
    f.add_argument("--out", required=True)
    s = sub.add_parser("sweep", help="sweep one parameter of a scenario or limit")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    a = sub.add_parser("audit", help="inequality audit over random scenarios")
    a.add_argument("--n", type=int, default=100)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", required=True)
    o = sub.add_parser("oracle", help="compare against the truncated-Fock oracle")
    o.add_argument("--config", default=None,
                   help="JSON config or {\"configs\": [...]}; default is the weak-coupling set")
    o.add_argument("--out", required=True)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "figure":
            return cmd_figure(args.id, args.out)
        if args.command == "sweep":
            with open(args.config) as fh:
                spec = sweep_spec_from_dict(json.load(fh))
            return cmd_sweep(spec, args.out)
        if args.command == "audit":
            if args.n < 1:
                print("error: --n must be positive", file=sys.stderr)
                return EXIT_USAGE
            return cmd_audit(args.n, args.seed, args.out)
        return cmd_oracle(args.config, args.out)
    except NUMERIC_ERRORS as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KeyError, ValueError, OSError) as e:
        # ScenarioError and JSONDecodeError are ValueErrors
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
