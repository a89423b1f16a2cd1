"""Hamiltonian spectra as degeneracy-aggregated shells with log-domain prefix tables.

A spectrum is a sorted sequence of shells ``(energy, degeneracy)``.
Degeneracies are real numbers: integer multiplicities for many-body shells
(binomial rows for non-interacting qubits) and real weights for discretized
density-of-states models.  Prefix tables over level counts and energy sums
are kept both in the linear domain (compensated summation, exact while
representable) and in the log domain, so the energy and entropy of "flat"
states -- uniform mixtures of the lowest-energy levels -- stay accurate even
when the total dimension is as large as 2**200.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Linear prefix sums are carried alongside the log tables while they stay
# below this magnitude; beyond it only the log tables are meaningful.
_LINEAR_LIMIT = 1e300

# Largest count for which neighbouring integers are distinguishable in a
# float64, used to decide whether integer cuts can be resolved exactly.
EXACT_COUNT_LIMIT = 2.0**52


@dataclass(frozen=True)
class CutPoint:
    """Cut position for a flat state: shell index plus filled fraction.

    A cut ``(shell=j, frac=f)`` denotes the ``N_{j-1} + f * g_j`` lowest
    energy levels, with ``f`` in ``(0, 1]``; ``f == 1`` is the full shell
    boundary.  Fractional counts are meaningful for real-valued degeneracy
    models and for the continuous relaxation used on huge spectra.
    """

    shell: int
    frac: float = 1.0

    def __post_init__(self):
        if self.shell < 0:
            raise ValueError(f"negative shell index {self.shell}")
        if not 0.0 < self.frac <= 1.0:
            raise ValueError(f"cut fraction must be in (0, 1], got {self.frac}")


class Spectrum:
    """Sorted energy shells with prefix tables for flat-state queries.

    Levels sharing an energy are merged into a single shell on construction;
    within-shell arrangement never affects the energy of a state.  Instances
    are immutable after construction and safe to share across threads.
    """

    def __init__(self, energies, degeneracies=None, log_degeneracies=None,
                 integer_degeneracies=None):
        energies = np.asarray(energies, dtype=float)
        if degeneracies is None and log_degeneracies is None:
            raise ValueError("need degeneracies or log_degeneracies")
        if log_degeneracies is None:
            degeneracies = np.asarray(degeneracies, dtype=float)
            if np.any(degeneracies <= 0.0) or not np.all(np.isfinite(degeneracies)):
                raise ValueError("degeneracies must be positive and finite")
            log_degeneracies = np.log(degeneracies)
        else:
            log_degeneracies = np.asarray(log_degeneracies, dtype=float)
            with np.errstate(over="ignore"):
                degeneracies = np.exp(log_degeneracies)
        if energies.ndim != 1 or energies.shape != log_degeneracies.shape:
            raise ValueError("energies and degeneracies must be equal-length 1-D")
        if energies.size == 0:
            raise ValueError("empty spectrum")
        if not np.all(np.isfinite(energies)):
            raise ValueError("energies must be finite")

        order = np.argsort(energies, kind="stable")
        energies = energies[order]
        log_degeneracies = log_degeneracies[order]
        energies, log_degeneracies = _merge_equal_energies(energies, log_degeneracies)
        with np.errstate(over="ignore"):
            degeneracies = np.exp(log_degeneracies)

        if integer_degeneracies is None:
            finite = np.isfinite(degeneracies)
            integer_degeneracies = bool(
                np.all(finite)
                and np.all(np.abs(degeneracies - np.round(degeneracies)) <= 1e-9)
            )

        self.energies = energies
        self.degeneracies = degeneracies
        self.log_degeneracies = log_degeneracies
        self.integer_degeneracies = integer_degeneracies
        self.ground_energy = float(energies[0])

        shifted = energies - self.ground_energy
        with np.errstate(divide="ignore"):
            log_shifted = np.where(shifted > 0.0, np.log(shifted), -np.inf)
        self.shifted_energies = shifted
        self.log_shifted_energies = log_shifted

        self.cum_count, self.log_cum_count = _prefix_tables(log_degeneracies)
        self.cum_energy_weighted, self.log_cum_energy_weighted = _prefix_tables(
            log_degeneracies + log_shifted)

        # flat energy at each full-shell boundary count N_j
        with np.errstate(invalid="ignore"):
            self.boundary_flat_energies = self.ground_energy + np.where(
                np.isinf(self.log_cum_energy_weighted) & (self.log_cum_energy_weighted < 0),
                0.0,
                np.exp(self.log_cum_energy_weighted - self.log_cum_count),
            )

        for arr in (self.energies, self.degeneracies, self.log_degeneracies,
                    self.shifted_energies, self.log_shifted_energies,
                    self.cum_count, self.log_cum_count,
                    self.cum_energy_weighted, self.log_cum_energy_weighted,
                    self.boundary_flat_energies):
            arr.flags.writeable = False

        if self.log_dim <= 0.0:
            raise ValueError("spectrum must hold more than one level in total")

    # -- basic queries ---------------------------------------------------

    @property
    def num_shells(self) -> int:
        return self.energies.size

    @property
    def log_dim(self) -> float:
        """ln of the total level count."""
        return float(self.log_cum_count[-1])

    @property
    def dim(self) -> float:
        """Total level count; inf when not representable as a float."""
        return float(self.cum_count[-1])

    @property
    def mean_energy(self) -> float:
        """Energy of the maximally mixed state, the largest flat-state energy."""
        return float(self.boundary_flat_energies[-1])

    @property
    def is_unit_degenerate(self) -> bool:
        return bool(np.all(self.degeneracies == 1.0))

    def __repr__(self):
        return (f"Spectrum({self.num_shells} shells, ln(dim)={self.log_dim:.6g}, "
                f"energies [{self.energies[0]:g}, {self.energies[-1]:g}])")

    # -- cut points ------------------------------------------------------

    def cut_count(self, cut: CutPoint) -> float:
        """Level count of a cut; may be inexact beyond 2**52."""
        self._check_cut(cut)
        prev = self.cum_count[cut.shell - 1] if cut.shell else 0.0
        return prev + cut.frac * self.degeneracies[cut.shell]

    def cut_log_count(self, cut: CutPoint) -> float:
        self._check_cut(cut)
        term = math.log(cut.frac) + self.log_degeneracies[cut.shell]
        if cut.shell == 0:
            return term
        return float(np.logaddexp(self.log_cum_count[cut.shell - 1], term))

    def cut_at_count(self, count: float) -> CutPoint:
        """Cut point holding exactly ``count`` lowest levels (1 <= count <= dim)."""
        if not count >= 1.0 - 1e-9:
            raise ValueError(f"cut count must be >= 1, got {count}")
        log_count = math.log(max(count, 1.0))
        if log_count > self.log_dim + 1e-12:
            raise ValueError(f"cut count {count} exceeds the total dimension")
        log_count = min(log_count, self.log_dim)
        j = int(np.searchsorted(self.log_cum_count, log_count, side="left"))
        j = min(j, self.num_shells - 1)
        if np.isfinite(self.cum_count[j]):
            prev = self.cum_count[j - 1] if j else 0.0
            frac = (min(count, self.cum_count[j]) - prev) / self.degeneracies[j]
        elif j == 0:
            frac = math.exp(log_count - self.log_degeneracies[0])
        else:
            prev = self.log_cum_count[j - 1]
            frac = math.exp(prev - self.log_degeneracies[j]) * math.expm1(
                max(log_count - prev, 0.0))
        frac = min(max(frac, np.nextafter(0.0, 1.0)), 1.0)
        return CutPoint(j, float(frac))

    def full_cut(self) -> CutPoint:
        return CutPoint(self.num_shells - 1, 1.0)

    def ground_cut(self) -> CutPoint:
        """Cut holding a single level (the pure ground state)."""
        return self.cut_at_count(1.0)

    def _check_cut(self, cut: CutPoint):
        if cut.shell >= self.num_shells:
            raise ValueError(
                f"cut shell {cut.shell} out of range for {self.num_shells} shells")

    # -- expansion -------------------------------------------------------

    def level_energies(self, limit: int = 2**22) -> np.ndarray:
        """Per-level energy array, one entry per level (degeneracies unrolled).

        Requires integer degeneracies and a total dimension below ``limit``.
        """
        if not self.integer_degeneracies:
            raise ValueError("cannot expand non-integer degeneracies")
        if not self.dim <= limit:
            raise ValueError(f"dimension {self.dim} exceeds expansion limit {limit}")
        reps = np.round(self.degeneracies).astype(np.int64)
        return np.repeat(self.energies, reps)


def flat_energy(spec: Spectrum, cut: CutPoint) -> float:
    """Mean energy of the flat state over the lowest ``cut`` levels."""
    spec._check_cut(cut)
    j, f = cut.shell, cut.frac
    g = spec.degeneracies[j]
    prev_n = spec.cum_count[j - 1] if j else 0.0
    prev_w = spec.cum_energy_weighted[j - 1] if j else 0.0
    count = prev_n + f * g
    if count < 1.0 - 1e-9:
        raise ValueError(f"cut holds {count} < 1 levels")
    if np.isfinite(count) and np.isfinite(prev_w):
        w = prev_w + f * g * spec.shifted_energies[j]
        return spec.ground_energy + w / count
    # log-domain path for huge counts
    log_n = spec.cut_log_count(cut)
    term = math.log(f) + spec.log_degeneracies[j] + spec.log_shifted_energies[j]
    prev = spec.log_cum_energy_weighted[j - 1] if j else -np.inf
    log_w = float(np.logaddexp(prev, term))
    if log_w == -np.inf:
        return spec.ground_energy
    return spec.ground_energy + math.exp(log_w - log_n)


def flat_log_count(spec: Spectrum, cut: CutPoint) -> float:
    """ln of the level count under the cut; the flat state's entropy in nats."""
    log_n = spec.cut_log_count(cut)
    if log_n < -1e-9:
        raise ValueError("cut holds fewer than one level")
    return max(log_n, 0.0)


# -- constructors ---------------------------------------------------------

def make_equally_spaced(d: int, gap: float) -> Spectrum:
    """Single system with ``d`` equally spaced non-degenerate levels.

    The ground level sits at 0; an overall energy offset cancels in every
    work quantity.
    """
    if d < 2:
        raise ValueError(f"need at least two levels, got d={d}")
    if not gap > 0:
        raise ValueError(f"gap must be positive, got {gap}")
    energies = gap * np.arange(d, dtype=float)
    return Spectrum(energies, np.ones(d), integer_degeneracies=True)


def make_qubit_ensemble(n: int, splitting: float) -> Spectrum:
    """``n`` non-interacting two-level systems: binomial shell degeneracies.

    Shell ``k`` sits at ``k * splitting`` with degeneracy C(n, k); the log
    degeneracies are exact for any ``n`` (computed from integer binomials),
    so total dimensions like 2**200 are handled without overflow.
    """
    if n < 1:
        raise ValueError(f"need at least one qubit, got n={n}")
    if not splitting > 0:
        raise ValueError(f"splitting must be positive, got {splitting}")
    energies = splitting * np.arange(n + 1, dtype=float)
    log_deg = np.array([math.log(math.comb(n, k)) for k in range(n + 1)])
    return Spectrum(energies, log_degeneracies=log_deg, integer_degeneracies=True)


def make_polynomial_dos(a: float, c: float, e_max: float, levels: int) -> Spectrum:
    """Discretized polynomial density of states g(E) = c * E**a on [0, e_max].

    The cumulative count is N(E) = c * E**(1+a) / (a+1).  Shell ``j`` sits at
    the right endpoint ``j * e_max / levels`` and carries the real-valued
    weight ``N(E_j) - N(E_{j-1})``; a non-degenerate ground shell is placed
    at energy 0.
    """
    _check_dos_args(e_max, levels)
    if a < 0:
        raise ValueError(f"polynomial exponent must be >= 0, got a={a}")
    if not c > 0:
        raise ValueError(f"DOS prefactor must be positive, got c={c}")
    edges = e_max * np.arange(levels + 1, dtype=float) / levels
    cum = c * edges ** (1.0 + a) / (1.0 + a)
    weights = np.diff(cum)
    return _dos_spectrum(edges[1:], weights)


def make_exponential_dos(b: float, e_max: float, levels: int) -> Spectrum:
    """Discretized exponential density of states g(E) = exp(b*E) on [0, e_max].

    Cumulative count N(E) = (exp(b*E) - 1) / b; bin weights are evaluated as
    exp(b*E_{j-1}) * expm1(b*dE) / b, stable for small ``b*dE``.
    """
    _check_dos_args(e_max, levels)
    if not b > 0:
        raise ValueError(f"DOS rate must be positive, got b={b}")
    edges = e_max * np.arange(levels + 1, dtype=float) / levels
    de = e_max / levels
    weights = np.exp(b * edges[:-1]) * math.expm1(b * de) / b
    return _dos_spectrum(edges[1:], weights)


def _check_dos_args(e_max, levels):
    if not e_max > 0:
        raise ValueError(f"energy ceiling must be positive, got {e_max}")
    if levels < 2:
        raise ValueError(f"need at least 2 levels in a DOS discretization, got {levels}")


def _dos_spectrum(shell_energies, weights):
    if np.any(weights <= 0.0):
        raise ValueError("DOS discretization produced a non-increasing count")
    energies = np.concatenate(([0.0], shell_energies))
    degs = np.concatenate(([1.0], weights))
    return Spectrum(energies, degs, integer_degeneracies=False)


# -- file interface --------------------------------------------------------

def load_spectrum(path) -> Spectrum:
    """Read a spectrum file: one ``energy degeneracy`` pair per line.

    Lines starting with '#' are ignored.  Energies need not be pre-sorted;
    equal energies are merged (degeneracies summed).
    """
    energies, degs = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 'energy degeneracy', got {line!r}")
            try:
                e, g = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if not g > 0:
                raise ValueError(f"{path}:{lineno}: degeneracy must be positive, got {g}")
            energies.append(e)
            degs.append(g)
    if not energies:
        raise ValueError(f"{path}: no shells found")
    return Spectrum(np.array(energies), np.array(degs))


# -- internals -------------------------------------------------------------

def _merge_equal_energies(energies, log_degs):
    """Collapse runs of equal energies into single shells (log-domain sum)."""
    if energies.size == 1:
        return energies, log_degs
    boundaries = np.concatenate(([True], np.diff(energies) > 0.0))
    if boundaries.all():
        return energies, log_degs
    idx = np.flatnonzero(boundaries)
    merged_e = energies[idx]
    merged_g = np.empty(idx.size)
    groups = np.split(log_degs, idx[1:])
    for i, grp in enumerate(groups):
        m = grp.max()
        merged_g[i] = m + math.log(np.exp(grp - m).sum())
    return merged_e, merged_g


def _prefix_tables(log_terms):
    """Prefix sums of exp(log_terms): linear (Kahan) and log tables.

    The linear table is exact Kahan-compensated summation while finite and
    turns to inf past ~1e300; the log table equals log of the linear sum
    while available and continues with logaddexp accumulation beyond.
    """
    m = log_terms.size
    lin = np.empty(m)
    lg = np.empty(m)
    total = 0.0
    comp = 0.0
    log_total = -np.inf
    overflowed = False
    for i in range(m):
        lt = log_terms[i]
        if not overflowed:
            t = math.exp(lt) if lt < 709.0 else math.inf
            y = t - comp
            s = total + y
            comp = (s - total) - y
            total = s
            if total > _LINEAR_LIMIT or not math.isfinite(total):
                overflowed = True
                total = math.inf
                log_total = np.logaddexp(log_total, lt)
            else:
                log_total = math.log(total) if total > 0.0 else -math.inf
        else:
            total = math.inf
            log_total = np.logaddexp(log_total, lt)
        lin[i] = total
        lg[i] = log_total
    return lin, lg
