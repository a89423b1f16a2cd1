"""Gibbs states, entropy-matched temperatures and work-extraction bounds.

All Boltzmann sums run over shells with log degeneracies and energies
referenced to the ground state, so partition functions stay finite for
ensembles whose dimension would overflow naively (200 qubits and beyond).
Root finding is bracketing plus bisection throughout: unconditional
convergence matters more here than iteration count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .meps import meps_at_entropy
from .spectrum import Spectrum
from .states import (PopulationVector, State, energy, entropy, ergotropy,
                     is_passive, passify)

_BETA_TOL = 1e-10


@dataclass(frozen=True)
class GibbsState:
    """Thermal state exp(-beta*H)/Z over a spectrum.

    ``log_partition`` is referenced to the ground energy, i.e. it is
    ln sum_j g_j exp(-beta*(e_j - e_1)), which keeps it finite for any
    beta >= 0; the identity S = beta*(E - e_1) + log_partition holds.
    """

    spec: Spectrum
    beta: float
    log_partition: float
    energy: float
    entropy: float

    def shell_weights(self) -> np.ndarray:
        """Total population per shell (degeneracy-summed Boltzmann factors)."""
        spec = self.spec
        if math.isinf(self.beta):
            w = np.zeros(spec.num_shells)
            w[0] = 1.0
            return w
        x = spec.log_degeneracies - self.beta * spec.shifted_energies
        return np.exp(x - self.log_partition)

    def populations(self) -> PopulationVector:
        """Explicit per-level populations (dense spectra only)."""
        return PopulationVector(self.spec, self.shell_weights())


def gibbs(spec: Spectrum, beta: float) -> GibbsState:
    """Gibbs state at inverse temperature beta >= 0 (inf = ground shell)."""
    if not beta >= 0.0:
        raise ValueError(f"inverse temperature must be >= 0, got {beta}")
    if math.isinf(beta):
        log_z = float(spec.log_degeneracies[0])
        return GibbsState(spec, beta, log_z, spec.ground_energy, log_z)
    x = spec.log_degeneracies - beta * spec.shifted_energies
    log_z = float(logsumexp(x))
    w = np.exp(x - log_z)
    e_mean = spec.ground_energy + float(w @ spec.shifted_energies)
    s_val = beta * (e_mean - spec.ground_energy) + log_z
    return GibbsState(spec, beta, log_z, e_mean, s_val)


def _bracket_decreasing(eval_at, target, lo=0.0, hi=1.0, max_doublings=300):
    """Expand [lo, hi] until eval_at(hi) < target (eval_at decreasing)."""
    for _ in range(max_doublings):
        if eval_at(hi) < target:
            return lo, hi
        lo, hi = hi, hi * 2.0
    raise RuntimeError(f"bracket expansion failed for target {target}")


def beta_for_entropy(spec: Spectrum, s_target: float, tol: float = _BETA_TOL) -> float:
    """Inverse temperature with S(tau_beta) = s_target.

    S is strictly decreasing in beta from ln(dim) at beta = 0 down to the
    ground-shell entropy; zero entropy maps to the +inf sentinel.  Uses
    geometric bracket expansion followed by bisection.
    """
    log_dim = spec.log_dim
    if not -1e-12 <= s_target <= log_dim + 1e-9:
        raise ValueError(f"entropy {s_target} outside [0, ln dim = {log_dim}]")
    s_target = min(max(s_target, 0.0), log_dim)
    s_floor = float(spec.log_degeneracies[0])
    if s_target <= s_floor + tol:
        if s_target < s_floor - tol:
            raise ValueError(
                f"entropy {s_target} below the ground-shell entropy {s_floor}; "
                "no Gibbs state reaches it")
        return math.inf
    if s_target >= log_dim:
        return 0.0

    def s_of(beta):
        return gibbs(spec, beta).entropy

    lo, hi = _bracket_decreasing(s_of, s_target)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s_mid = s_of(mid)
        if abs(s_mid - s_target) <= tol:
            return mid
        if s_mid > s_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def beta_for_energy(spec: Spectrum, e_target: float, tol: float = _BETA_TOL) -> float:
    """Inverse temperature with E(tau_beta) = e_target (E decreasing in beta)."""
    ground, mean = spec.ground_energy, spec.mean_energy
    slack = 1e-9 * max(1.0, mean - ground)
    if not ground - slack <= e_target <= mean + slack:
        raise ValueError(f"energy {e_target} outside [{ground}, {mean}]")
    e_target = min(max(e_target, ground), mean)
    if e_target >= mean:
        return 0.0
    if e_target <= ground:
        return math.inf

    def e_of(beta):
        return gibbs(spec, beta).energy

    scale = max(mean - ground, 1e-300)
    lo, hi = _bracket_decreasing(e_of, e_target)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        e_mid = e_of(mid)
        if abs(e_mid - e_target) <= tol * scale:
            return mid
        if e_mid > e_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def matched_gibbs(state: State, tol: float = _BETA_TOL) -> GibbsState:
    """Gibbs state over the same spectrum with the same entropy."""
    spec = state.spec
    return gibbs(spec, beta_for_entropy(spec, entropy(state), tol))


def _require_passive(sigma: State):
    if isinstance(sigma, PopulationVector) and not is_passive(sigma):
        raise ValueError("state is not passive (populations increase with energy)")


def activatable_work(sigma: State, tol: float = _BETA_TOL) -> float:
    """Work per copy unlockable from a passive state in the many-copy limit.

    The energy above the entropy-matched Gibbs state; zero exactly for
    Gibbs states, which are the only completely passive states.
    """
    _require_passive(sigma)
    return energy(sigma) - matched_gibbs(sigma, tol).energy


def delta_max(spec: Spectrum, s_target: float, tol_s: float = 1e-9) -> float:
    """Energy gap between the most energetic passive state and the matched
    Gibbs state at entropy ``s_target``; the upper bound on activatable work.

    Vanishes at s_target = 0 and at s_target = ln(dim), and identically for
    two-level systems, where every passive state is thermal.
    """
    sol = meps_at_entropy(spec, s_target, tol_s=tol_s)
    tau = gibbs(spec, beta_for_entropy(spec, s_target))
    return sol.energy_value - tau.energy


def work_bounds(rho: PopulationVector, tol_s: float = 1e-9) -> tuple[float, float]:
    """Entropy-and-energy-only bracket on the ergotropy of ``rho``.

    lower = E(rho) - E(most energetic passive state at S(rho)),
    upper = E(rho) - E(Gibbs state at S(rho));
    the ergotropy always lies inside [lower, upper].
    """
    s_val = entropy(rho)
    e_val = energy(rho)
    lower = e_val - meps_at_entropy(rho.spec, s_val, tol_s=tol_s).energy_value
    upper = e_val - gibbs(rho.spec, beta_for_entropy(rho.spec, s_val)).energy
    return lower, upper


def free_energy(state: State | GibbsState, beta: float) -> float:
    """F_beta[rho] = tr(H rho) - S(rho) / beta."""
    if not beta > 0.0:
        raise ValueError(f"bath inverse temperature must be positive, got {beta}")
    if isinstance(state, GibbsState):
        return state.energy - state.entropy / beta
    return energy(state) - entropy(state) / beta


@dataclass(frozen=True)
class BathTerms:
    """Decomposition of the bath-assisted free-energy difference.

    F_beta[sigma] - F_beta[tau_beta] = delta_term + matched_free_energy
    - bath_free_energy, where the matched state shares sigma's entropy and
    both free energies are taken at the bath temperature.
    """

    delta_term: float
    matched_free_energy: float
    bath_free_energy: float

    @property
    def total(self) -> float:
        return self.delta_term + self.matched_free_energy - self.bath_free_energy


def bath_decomposition(sigma: State, beta_bath: float,
                       tol: float = _BETA_TOL) -> BathTerms:
    """Split the extractable-work bound with a bath into its three terms.

    ``delta_term`` is the state's energy above its entropy-matched Gibbs
    state (the activatable work); the remaining two terms are bath-referenced
    free energies of the matched and of the bath-temperature Gibbs state.
    """
    if not beta_bath > 0.0:
        raise ValueError(f"bath inverse temperature must be positive, got {beta_bath}")
    _require_passive(sigma)
    tau_matched = matched_gibbs(sigma, tol)
    tau_bath = gibbs(sigma.spec, beta_bath)
    return BathTerms(
        delta_term=energy(sigma) - tau_matched.energy,
        matched_free_energy=free_energy(tau_matched, beta_bath),
        bath_free_energy=free_energy(tau_bath, beta_bath),
    )


@dataclass(frozen=True)
class BoundReport:
    """All work quantities and bounds for one input state."""

    ergotropy: float
    w_act: float
    delta_max: float
    weight_lower: float
    weight_upper: float
    bath_terms: BathTerms | None


def bound_report(rho: PopulationVector, beta_bath: float | None = None,
                 tol_s: float = 1e-9) -> BoundReport:
    """Ergotropy, activatable work, the MEPS gap and the weight bounds.

    The activatable work and the bath decomposition refer to the passive
    rearrangement of ``rho``, which shares its spectrum of populations.
    """
    sigma = passify(rho)
    lower, upper = work_bounds(rho, tol_s=tol_s)
    terms = bath_decomposition(sigma, beta_bath) if beta_bath else None
    return BoundReport(
        ergotropy=ergotropy(rho),
        w_act=activatable_work(sigma),
        delta_max=delta_max(rho.spec, entropy(rho), tol_s=tol_s),
        weight_lower=lower,
        weight_upper=upper,
        bath_terms=terms,
    )


__all__ = [
    "GibbsState", "BathTerms", "BoundReport", "gibbs", "beta_for_entropy",
    "beta_for_energy", "matched_gibbs", "activatable_work", "delta_max",
    "work_bounds", "free_energy", "bath_decomposition", "bound_report",
]
