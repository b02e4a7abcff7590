"""Two qubits coupled to a massive scalar field: exact reduced state and measures."""
from .limits import (LimitReport, Regime, adiabatic_report, nonadiabatic_report,
                     oneway_report, relevance_table, spacelike_report)
from .newtonian import NewtonianPoint, jbar, newtonian_consistency, newtonian_point
from .observables import (FieldPoint, particle_number, phi_convolution,
                          spin_field_correlator, spin_number_correlators)
from .oracle import (SingleModeConfig, mode_sum_greens, single_mode_evolve,
                     single_mode_greens)
from .propagators import (DIVERGENT, GreensBundle, frak_g_keldysh, frak_g_retarded,
                          g_keldysh_position, g_retarded_regular, greens_bundle)
from .scenario import (CausalRegion, CouplingProfile, QuadSettings, Scenario,
                       ScenarioError, classify_region, load_scenario,
                       scenario_from_dict)
from .spinstate import (BlochState, MeasureReport, assemble_rho,
                        audit_inequalities, bloch_coefficients, measures,
                        negativity, rho_eigenvalues)

__all__ = [
    "BlochState", "CausalRegion", "CouplingProfile", "DIVERGENT", "FieldPoint",
    "GreensBundle", "LimitReport", "MeasureReport", "NewtonianPoint",
    "QuadSettings", "Regime", "Scenario", "ScenarioError", "SingleModeConfig",
    "adiabatic_report", "assemble_rho", "audit_inequalities",
    "bloch_coefficients", "classify_region", "frak_g_keldysh",
    "frak_g_retarded", "g_keldysh_position", "g_retarded_regular",
    "greens_bundle", "jbar", "load_scenario", "measures", "mode_sum_greens",
    "negativity", "newtonian_consistency", "newtonian_point",
    "nonadiabatic_report", "oneway_report", "particle_number",
    "phi_convolution", "relevance_table", "rho_eigenvalues",
    "scenario_from_dict", "single_mode_evolve", "single_mode_greens",
    "spacelike_report", "spin_field_correlator", "spin_number_correlators",
]
