"""Diagonal states over a spectrum: entropy, energy, passive rearrangement.

Inputs are population vectors in the energy eigenbasis: the maximal work
extractable by a cyclic unitary depends only on the eigenvalues of the state,
and the optimal final state is diagonal with populations sorted against
energy.  Three families are modelled:

* ``PopulationVector`` -- explicit probabilities over a dense spectrum;
* ``FlatState`` -- uniform over the lowest ``k`` levels (the vertices of the
  passive simplex), with possibly fractional ``k``;
* ``TwoBlockState`` -- a mixture of two flat states, the form every extremal
  passive state takes.

All values are immutable and all operations pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from ._backend import kernels
from .spectrum import CutPoint, Spectrum, flat_energy, flat_log_count

DENSE_DIMENSION_LIMIT = 10**6

_PROB_SUM_TOL = 1e-12


class PopulationVector:
    """Probabilities over the levels of a dense (unit-degeneracy) spectrum."""

    def __init__(self, spec: Spectrum, probs):
        if not spec.is_unit_degenerate:
            raise ValueError("population vectors need a dense spectrum "
                             "(all degeneracies 1)")
        if spec.dim > DENSE_DIMENSION_LIMIT:
            raise ValueError(f"dense dimension {spec.dim:g} exceeds "
                             f"{DENSE_DIMENSION_LIMIT}")
        probs = np.asarray(probs, dtype=float)
        if probs.ndim != 1 or probs.size != spec.num_shells:
            raise ValueError(f"expected {spec.num_shells} probabilities, "
                             f"got shape {probs.shape}")
        if np.any(probs < -1e-15):
            raise ValueError("negative probability")
        total = float(probs.sum())
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self.spec = spec
        self.probs = np.clip(probs, 0.0, None)
        self.probs.flags.writeable = False

    def __repr__(self):
        return f"PopulationVector(d={self.probs.size})"


@dataclass(frozen=True)
class FlatState:
    """Uniform mixture over the lowest levels of a spectrum, up to a cut."""

    spec: Spectrum
    cut: CutPoint

    def __post_init__(self):
        self.spec._check_cut(self.cut)
        if self.spec.cut_log_count(self.cut) < -1e-9:
            raise ValueError("flat state must cover at least one level")


@dataclass(frozen=True)
class TwoBlockState:
    """Mixture lam * omega_k + (1 - lam) * omega_l of two flat states, k <= l.

    Implied level populations are nonincreasing in energy for any
    lam in [0, 1], so the state is passive by construction.
    """

    spec: Spectrum
    low_cut: CutPoint
    high_cut: CutPoint
    weight: float

    def __post_init__(self):
        self.spec._check_cut(self.low_cut)
        self.spec._check_cut(self.high_cut)
        low = self.spec.cut_log_count(self.low_cut)
        high = self.spec.cut_log_count(self.high_cut)
        if low > high + 1e-12:
            raise ValueError("low cut must not exceed high cut")
        if not -1e-12 <= self.weight <= 1.0 + 1e-12:
            raise ValueError(f"mixing weight {self.weight} outside [0, 1]")
        object.__setattr__(self, "weight", min(max(self.weight, 0.0), 1.0))

    def to_populations(self) -> PopulationVector:
        """Expand to an explicit population vector (dense spectra only)."""
        spec = self.spec
        k = spec.cut_count(self.low_cut)
        l = spec.cut_count(self.high_cut)
        if abs(k - round(k)) > 1e-9 or abs(l - round(l)) > 1e-9:
            raise ValueError("cannot expand fractional cuts")
        k, l = int(round(k)), int(round(l))
        probs = np.zeros(int(spec.dim))
        probs[:l] += (1.0 - self.weight) / l
        probs[:k] += self.weight / k
        return PopulationVector(spec, probs)


State = PopulationVector | FlatState | TwoBlockState


def entropy(state: State) -> float:
    """Von Neumann entropy in nats (diagonal states: -sum p ln p)."""
    if isinstance(state, PopulationVector):
        return float(-xlogy(state.probs, state.probs).sum())
    if isinstance(state, FlatState):
        return flat_log_count(state.spec, state.cut)
    if isinstance(state, TwoBlockState):
        return kernels.two_block_entropy(
            state.spec.cut_log_count(state.low_cut),
            state.spec.cut_log_count(state.high_cut),
            state.weight)
    raise TypeError(f"not a state: {state!r}")


def energy(state: State) -> float:
    """Mean energy tr(rho H)."""
    if isinstance(state, PopulationVector):
        return float(state.probs @ state.spec.energies)
    if isinstance(state, FlatState):
        return flat_energy(state.spec, state.cut)
    if isinstance(state, TwoBlockState):
        lam = state.weight
        return (lam * flat_energy(state.spec, state.low_cut)
                + (1.0 - lam) * flat_energy(state.spec, state.high_cut))
    raise TypeError(f"not a state: {state!r}")


def passify(rho: PopulationVector) -> PopulationVector:
    """Passive rearrangement: probabilities nonincreasing against energy.

    Stable with respect to ties, which cannot affect the energy.
    """
    order = np.argsort(-rho.probs, kind="stable")
    return PopulationVector(rho.spec, rho.probs[order])


def is_passive(rho: PopulationVector, tol: float = 1e-12) -> bool:
    """Whether populations are already nonincreasing in energy."""
    return bool(np.all(np.diff(rho.probs) <= tol))


def ergotropy(rho: PopulationVector) -> float:
    """Maximal work extractable by a cyclic unitary process.

    The energy gap between the state and its passive rearrangement; zero
    exactly when the populations are already passive-ordered up to ties.
    """
    return energy(rho) - energy(passify(rho))


def load_populations(spec: Spectrum, path) -> PopulationVector:
    """Read one probability per line; '#' comments allowed.

    The values must sum to 1 within 1e-9 and are renormalized exactly.
    """
    vals = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals.append(float(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not vals:
        raise ValueError(f"{path}: no probabilities found")
    probs = np.array(vals)
    if np.any(probs < 0.0):
        raise ValueError(f"{path}: negative probability")
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"{path}: probabilities sum to {total}, not 1")
    return PopulationVector(spec, probs / total)
