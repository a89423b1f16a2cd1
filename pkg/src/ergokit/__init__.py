"""Extremal passive states, ergotropy and work bounds for finite spectra."""

from ._backend import backend_name
from .asymptotic import DosModel, binary_entropy, s_of_e, sigma0_energy, sigma0_entropy
from .meps import (DominanceRow, MepsSolution, ShellPairWindow,
                   brute_force_min_entropy, feasible_pairs, lambda_for_energy,
                   meps_at_energy, meps_at_entropy, sigma0_dominance_check)
from .spectrum import (CutPoint, Spectrum, flat_energy, flat_log_count,
                       load_spectrum, make_equally_spaced, make_exponential_dos,
                       make_polynomial_dos, make_qubit_ensemble)
from .states import (FlatState, PopulationVector, TwoBlockState, energy,
                     entropy, ergotropy, is_passive, load_populations, passify)
from .thermal import (BathTerms, BoundReport, GibbsState, activatable_work,
                      bath_decomposition, beta_for_energy, beta_for_entropy,
                      bound_report, delta_max, free_energy, gibbs,
                      matched_gibbs, work_bounds)

__version__ = "0.1.0"

__all__ = [
    "BathTerms", "BoundReport", "CutPoint", "DominanceRow", "DosModel",
    "FlatState", "GibbsState", "MepsSolution", "PopulationVector",
    "ShellPairWindow", "Spectrum", "TwoBlockState", "activatable_work",
    "backend_name", "bath_decomposition", "beta_for_energy",
    "beta_for_entropy", "binary_entropy", "bound_report",
    "brute_force_min_entropy", "delta_max", "energy", "entropy", "ergotropy",
    "feasible_pairs", "flat_energy", "flat_log_count", "free_energy", "gibbs",
    "is_passive", "lambda_for_energy", "load_populations", "load_spectrum",
    "make_equally_spaced", "make_exponential_dos", "make_polynomial_dos",
    "make_qubit_ensemble", "matched_gibbs", "meps_at_energy",
    "meps_at_entropy", "passify", "s_of_e", "sigma0_dominance_check",
    "sigma0_energy", "sigma0_entropy", "work_bounds",
]
