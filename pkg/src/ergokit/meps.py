"""Extremal passive states: minimum entropy at fixed energy and its dual.

Passive states form a simplex whose vertices are the flat states omega_k;
on the fixed-energy slice the entropy (a concave function) is minimized at
a vertex, i.e. at a two-block mixture lam * omega_k + (1 - lam) * omega_l
with the weight pinned by the energy.  The solvers here enumerate those
vertices:

* dense spectra: all O(d^2) integer pairs (k, l);
* aggregated spectra: one box per ordered shell pair.  Small boxes (the
  product of the two shell degeneracies below ``EXACT_PAIRS_LIMIT``) are
  enumerated exactly over integer cuts; large boxes are relaxed to
  continuous cuts inside each shell and minimized by a coarse scan plus
  nested golden-section search, with integer roundings of the relaxed
  optimum competing whenever counts are still exactly representable.

The dual problem -- maximum energy at fixed entropy, the most energetic
passive state -- is solved by bisection on the energy, using the fact that
the minimal entropy is nondecreasing in the energy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize
from scipy.special import xlogy

from . import _kernels_py as _npk
from ._backend import kernels
from .spectrum import EXACT_COUNT_LIMIT, CutPoint, Spectrum, flat_energy
from .states import TwoBlockState, energy, entropy

# Shell-pair boxes with at most this many integer cut pairs are enumerated
# exactly instead of relaxed to continuous cuts.
EXACT_PAIRS_LIMIT = 1 << 20

# Largest dimension the forced-dense solver will expand a spectrum to.
DENSE_EXPANSION_LIMIT = 1 << 20

_WIDTH_TOL = 1e-12  # meps_at_entropy bisects the energy to this relative width


@dataclass(frozen=True)
class MepsSolution:
    """Optimal two-block state with its entropy, energy and vertex pair."""

    state: TwoBlockState
    entropy_value: float
    energy_value: float
    pair: tuple[CutPoint, CutPoint]
    lam: float


@dataclass(frozen=True)
class ShellPairWindow:
    """Feasible cut windows (filled fractions) for one ordered shell pair."""

    low_shell: int
    low_window: tuple[float, float]
    high_shell: int
    high_window: tuple[float, float]


@dataclass(frozen=True)
class DominanceRow:
    """Whether the ground+top two-block form attains the optimum at one S."""

    entropy_target: float
    energy: float
    low_log_count: float
    high_log_count: float
    weight: float
    sigma0_entropy: float
    optimal_entropy: float
    dominant: bool


def lambda_for_energy(spec: Spectrum, k: CutPoint, l: CutPoint, e_target: float) -> float:
    """Mixing weight putting lam*omega_k + (1-lam)*omega_l at the target energy.

    Requires flat_energy(k) <= e_target <= flat_energy(l); a degenerate pair
    (equal flat energies) returns 0 by convention.
    """
    e_k = flat_energy(spec, k)
    e_l = flat_energy(spec, l)
    if e_k > e_l + 1e-12:
        raise ValueError("low cut has higher flat energy than high cut")
    slack = 1e-9 * max(1.0, abs(e_k), abs(e_l))
    if not e_k - slack <= e_target <= e_l + slack:
        raise ValueError(
            f"target energy {e_target} outside [{e_k}, {e_l}]")
    denom = e_l - e_k
    if denom <= 0.0:
        return 0.0
    return min(max((e_l - e_target) / denom, 0.0), 1.0)


# -- feasibility ------------------------------------------------------------

def _energy_bounds(spec: Spectrum) -> tuple[float, float]:
    return flat_energy(spec, spec.ground_cut()), spec.mean_energy


def _validate_energy(spec: Spectrum, e_target: float) -> float:
    lo, hi = _energy_bounds(spec)
    slack = 1e-9 * max(1.0, hi - lo)
    if not lo - slack <= e_target <= hi + slack:
        raise ValueError(f"energy {e_target} outside the flat-state range "
                         f"[{lo}, {hi}]")
    return min(max(e_target, lo), hi)


def _shell_cut_params(spec: Spectrum, idx: np.ndarray):
    """(log_n0, log_g, log_w0, log_de) arrays for cuts inside shells ``idx``."""
    log_n0 = np.where(idx > 0, spec.log_cum_count[np.maximum(idx - 1, 0)], -np.inf)
    log_w0 = np.where(idx > 0,
                      spec.log_cum_energy_weighted[np.maximum(idx - 1, 0)], -np.inf)
    return (log_n0, spec.log_degeneracies[idx], log_w0,
            spec.log_shifted_energies[idx])


def _crossing_fractions(spec: Spectrum, idx: np.ndarray, e_target: float,
                        iters: int = 60):
    """Per-shell fractions bracketing flat_energy == e_target inside shells idx."""
    log_n0, log_g, log_w0, log_de = _shell_cut_params(spec, idx)
    lo = np.zeros(idx.size)
    hi = np.ones(idx.size)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        _, e_mid = _npk._flat_at_fraction(mid, log_n0, log_g, log_w0, log_de,
                                          spec.ground_energy)
        above = e_mid >= e_target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return lo, hi


def _shell_windows(spec: Spectrum, e_target: float):
    """Feasible low-cut and high-cut shells with their fraction windows."""
    m = spec.num_shells
    eb = spec.boundary_flat_energies
    eb_prev = np.concatenate(([spec.ground_energy], eb[:-1]))
    hosts_state = spec.log_cum_count >= 0.0  # shell range reaches count 1
    n_prev = np.concatenate(([0.0], spec.cum_count[:-1]))
    with np.errstate(invalid="ignore"):
        floor = np.clip((1.0 - n_prev) / spec.degeneracies, 0.0, None)
    floor = np.nan_to_num(floor, nan=0.0)

    f_lo = np.ones(m)
    f_hi = np.zeros(m)
    crossing = (eb_prev < e_target) & (eb > e_target)
    if np.any(crossing):
        cidx = np.flatnonzero(crossing)
        f_lo[cidx], f_hi[cidx] = _crossing_fractions(spec, cidx, e_target)

    u0 = floor
    u1 = np.where(eb <= e_target, 1.0, f_lo)
    low_ok = hosts_state & (eb_prev <= e_target) & (u0 <= u1)

    v0 = np.maximum(floor, np.where(eb_prev >= e_target, 0.0, f_hi))
    v1 = np.ones(m)
    high_ok = hosts_state & (eb >= e_target) & (v0 <= v1)

    lows = np.flatnonzero(low_ok)
    highs = np.flatnonzero(high_ok)
    return lows, u0[lows], u1[lows], highs, v0[highs], v1[highs]


def feasible_pairs(spec: Spectrum, e_target: float):
    """Vertex pairs straddling the energy hyperplane.

    Dense (unit-degeneracy) spectra give the explicit list of integer cut
    pairs as (CutPoint, CutPoint) tuples; aggregated spectra give one
    ShellPairWindow per feasible ordered shell pair.
    """
    e_target = _validate_energy(spec, e_target)
    if spec.is_unit_degenerate:
        flat = _level_flat_energies(spec)
        kmax = int(np.searchsorted(flat, e_target, side="right"))
        lmin = int(np.searchsorted(flat, e_target, side="left")) + 1
        return [(CutPoint(k - 1, 1.0), CutPoint(l - 1, 1.0))
                for k in range(1, kmax + 1)
                for l in range(max(k, lmin), flat.size + 1)]
    lows, u0, u1, highs, v0, v1 = _shell_windows(spec, e_target)
    out = []
    for a, i in enumerate(lows):
        for b, j in enumerate(highs):
            if i <= j:
                out.append(ShellPairWindow(int(i), (float(u0[a]), float(u1[a])),
                                           int(j), (float(v0[b]), float(v1[b]))))
    return out


# -- solvers ----------------------------------------------------------------

def _level_flat_energies(spec: Spectrum, limit: int = DENSE_EXPANSION_LIMIT):
    levels = spec.level_energies(limit)
    return np.cumsum(levels) / np.arange(1, levels.size + 1)


def _dense_candidate(spec: Spectrum, e_target: float, limit: int):
    flat = _level_flat_energies(spec, limit)
    s_val, k, l, lam = kernels.dense_min_pair(flat, e_target)
    return s_val, spec.cut_at_count(float(k)), spec.cut_at_count(float(l)), lam


def _aggregated_candidate(spec: Spectrum, e_target: float,
                          exact_pairs_limit: int = EXACT_PAIRS_LIMIT):
    lows, u0, u1, highs, v0, v1 = _shell_windows(spec, e_target)
    if lows.size == 0 or highs.size == 0:
        raise RuntimeError("no feasible shell pair; energy validation failed")

    pl, ph = np.meshgrid(np.arange(lows.size), np.arange(highs.size),
                         indexing="ij")
    keep = lows[pl] <= highs[ph]
    pl, ph = pl[keep], ph[keep]
    bi, bj = lows[pl], highs[ph]

    n_prev = np.concatenate(([0.0], spec.cum_count[:-1]))
    w_prev = np.concatenate(([0.0], spec.cum_energy_weighted[:-1]))
    g = spec.degeneracies
    de = spec.shifted_energies
    ground = spec.ground_energy

    countable = np.isfinite(spec.cum_count[bj]) & (spec.cum_count[bj] <= EXACT_COUNT_LIMIT)
    if spec.integer_degeneracies:
        exact = countable & (g[bi] * g[bj] <= exact_pairs_limit)
    else:
        exact = np.zeros(bi.size, dtype=bool)

    # candidate rows: (entropy, log_k, log_l, lam, shell_i, shell_j, frac_u, frac_v)
    rows = []

    if np.any(exact):
        ei, ej = bi[exact], bj[exact]
        s_arr, k_arr, l_arr, lam_arr = kernels.exact_boxes_min(
            n_prev[ei], w_prev[ei], de[ei],
            np.maximum(n_prev[ei] + 1.0, 1.0), spec.cum_count[ei],
            n_prev[ej], w_prev[ej], de[ej],
            np.maximum(n_prev[ej] + 1.0, 1.0), spec.cum_count[ej],
            ground, e_target)
        ok = np.isfinite(s_arr)
        if np.any(ok):
            with np.errstate(divide="ignore"):
                rows.append((s_arr[ok], np.log(k_arr[ok]), np.log(l_arr[ok]),
                             lam_arr[ok], ei[ok], ej[ok],
                             (k_arr[ok] - n_prev[ei][ok]) / g[ei][ok],
                             (l_arr[ok] - n_prev[ej][ok]) / g[ej][ok]))

    relaxed = ~exact
    if np.any(relaxed):
        ri, rj = bi[relaxed], bj[relaxed]
        rpl, rph = pl[relaxed], ph[relaxed]
        lo_p = _shell_cut_params(spec, ri)
        hi_p = _shell_cut_params(spec, rj)
        s_arr, u_arr, v_arr, lam_arr = kernels.relaxed_boxes_min(
            *lo_p, u0[rpl], u1[rpl], *hi_p, v0[rph], v1[rph],
            ground, e_target)
        ok = np.isfinite(s_arr)
        if np.any(ok):
            with np.errstate(divide="ignore"):
                log_k = np.logaddexp(lo_p[0][ok], np.log(u_arr[ok]) + lo_p[1][ok])
                log_l = np.logaddexp(hi_p[0][ok], np.log(v_arr[ok]) + hi_p[1][ok])
            rows.append((s_arr[ok], log_k, log_l, lam_arr[ok], ri[ok], rj[ok],
                         u_arr[ok], v_arr[ok]))

        # integer roundings of the relaxed optimum, where counts resolve
        roundable = ok & countable[relaxed] & spec.integer_degeneracies
        if np.any(roundable):
            rows.append(_rounded_candidates(
                spec, ri[roundable], rj[roundable], u_arr[roundable],
                v_arr[roundable], n_prev, w_prev, e_target))

    best = None
    for s_arr, log_k, log_l, lam_arr, si, sj, fu, fv in rows:
        if s_arr.size == 0:
            continue
        order = np.lexsort((log_l, log_k, s_arr))
        top = order[0]
        cand = (float(s_arr[top]), float(log_k[top]), float(log_l[top]),
                float(lam_arr[top]), int(si[top]), int(sj[top]),
                float(fu[top]), float(fv[top]))
        if best is None or cand[:3] < best[:3]:
            best = cand
    if best is None or not math.isfinite(best[0]):
        raise RuntimeError("no feasible vertex pair found")

    s_val, _, _, lam, si, sj, fu, fv = best
    return s_val, _fraction_cut(spec, si, fu), _fraction_cut(spec, sj, fv), lam


def _rounded_candidates(spec, si, sj, u, v, n_prev, w_prev, e_target):
    """Integer cut pairs around a relaxed optimum, evaluated exactly."""
    g = spec.degeneracies
    de = spec.shifted_energies
    k_star = n_prev[si] + u * g[si]
    l_star = n_prev[sj] + v * g[sj]
    ka = np.maximum(n_prev[si] + 1.0, 1.0)
    kb = spec.cum_count[si]
    la = np.maximum(n_prev[sj] + 1.0, 1.0)
    lb = spec.cum_count[sj]
    ks = np.stack([np.clip(np.floor(k_star), ka, kb),
                   np.clip(np.ceil(k_star), ka, kb)])
    ls = np.stack([np.clip(np.floor(l_star), la, lb),
                   np.clip(np.ceil(l_star), la, lb)])
    kk = np.concatenate([ks[0], ks[0], ks[1], ks[1]])
    ll = np.concatenate([ls[0], ls[1], ls[0], ls[1]])
    ii = np.concatenate([si] * 4)
    jj = np.concatenate([sj] * 4)
    keep = kk <= ll
    kk, ll, ii, jj = kk[keep], ll[keep], ii[keep], jj[keep]
    e_k = spec.ground_energy + (w_prev[ii] + (kk - n_prev[ii]) * de[ii]) / kk
    e_l = spec.ground_energy + (w_prev[jj] + (ll - n_prev[jj]) * de[jj]) / ll
    s_arr, lam = _npk.pair_entropy(np.log(kk), np.log(ll), e_k, e_l, e_target)
    ok = np.isfinite(s_arr)
    return (s_arr[ok], np.log(kk[ok]), np.log(ll[ok]), np.asarray(lam)[ok],
            ii[ok], jj[ok], (kk[ok] - n_prev[ii][ok]) / g[ii][ok],
            (ll[ok] - n_prev[jj][ok]) / g[jj][ok])


def _fraction_cut(spec: Spectrum, shell: int, frac: float) -> CutPoint:
    if frac <= 0.0:
        return CutPoint(shell - 1, 1.0)
    return CutPoint(shell, min(frac, 1.0))


def meps_at_energy(spec: Spectrum, e_target: float, method: str = "auto",
                   exact_pairs_limit: int = EXACT_PAIRS_LIMIT,
                   dense_limit: int = DENSE_EXPANSION_LIMIT) -> MepsSolution:
    """Passive state of minimal entropy at the given energy.

    ``method`` selects the solver: 'dense' enumerates integer pairs on the
    expanded level list (requires integer degeneracies and a modest
    dimension), 'aggregated' works shell-pair-wise on the aggregated
    representation, 'auto' picks 'dense' exactly for unit-degeneracy spectra.
    """
    e_target = _validate_energy(spec, e_target)
    if method == "auto":
        method = "dense" if spec.is_unit_degenerate else "aggregated"
    if method == "dense":
        s_val, cut_k, cut_l, lam = _dense_candidate(spec, e_target, dense_limit)
    elif method == "aggregated":
        s_val, cut_k, cut_l, lam = _aggregated_candidate(spec, e_target,
                                                         exact_pairs_limit)
    else:
        raise ValueError(f"unknown method {method!r}")
    state = TwoBlockState(spec, cut_k, cut_l, lam)
    return MepsSolution(state=state, entropy_value=entropy(state),
                        energy_value=energy(state), pair=(cut_k, cut_l),
                        lam=state.weight)


def meps_at_entropy(spec: Spectrum, s_target: float, tol_s: float = 1e-9,
                    method: str = "auto",
                    exact_pairs_limit: int = EXACT_PAIRS_LIMIT) -> MepsSolution:
    """Most energetic passive state at the given entropy.

    Bisects the energy using the monotonicity of the minimal entropy,
    returning the largest energy whose minimal entropy stays at or below
    ``s_target`` (so plateaus resolve to their right end).  Away from
    plateaus the achieved entropy matches ``s_target`` within ``tol_s``.
    """
    log_dim = spec.log_dim
    if not -1e-12 <= s_target <= log_dim + 1e-9:
        raise ValueError(f"entropy {s_target} outside [0, ln dim = {log_dim}]")
    s_target = min(max(s_target, 0.0), log_dim)
    lo, hi = _energy_bounds(spec)
    if s_target <= 0.0:
        cut = spec.ground_cut()
        state = TwoBlockState(spec, cut, cut, 1.0)
        return MepsSolution(state, entropy(state), energy(state), (cut, cut), 1.0)
    if s_target >= log_dim:
        cut = spec.full_cut()
        state = TwoBlockState(spec, cut, cut, 0.0)
        return MepsSolution(state, entropy(state), energy(state), (cut, cut), 0.0)

    width_tol = _WIDTH_TOL * max(hi - lo, 1.0)
    best = None
    e_lo, e_hi = lo, hi
    while e_hi - e_lo > width_tol:
        mid = 0.5 * (e_lo + e_hi)
        sol = meps_at_energy(spec, mid, method=method,
                             exact_pairs_limit=exact_pairs_limit)
        if sol.entropy_value <= s_target:
            e_lo, best = mid, sol
        else:
            e_hi = mid
    if best is None:
        best = meps_at_energy(spec, e_lo, method=method,
                              exact_pairs_limit=exact_pairs_limit)
    return best


# -- brute-force oracle (tests only) -----------------------------------------

_GRID_STEPS = {2: 2000, 3: 400, 4: 100, 5: 48, 6: 30}


@lru_cache(maxsize=16)
def _simplex_grid(total: int, parts: int) -> np.ndarray:
    """All compositions of ``total`` into ``parts`` nonnegative integers."""
    if parts == 1:
        return np.full((1, 1), float(total))
    combos = np.array(list(itertools.combinations(range(total + parts - 1),
                                                  parts - 1)), dtype=np.int64)
    edges = np.concatenate([np.full((combos.shape[0], 1), -1), combos,
                            np.full((combos.shape[0], 1), total + parts - 1)],
                           axis=1)
    return (np.diff(edges, axis=1) - 1).astype(float)


@lru_cache(maxsize=16)
def _vertex_grid(flat_key: bytes, d: int, steps: int):
    flat = np.frombuffer(flat_key)
    weights = _simplex_grid(steps, d) / steps
    vertex_pop = np.tril(np.ones((d, d))) / np.arange(1, d + 1)[:, None]
    pops = weights @ vertex_pop
    grid_s = -xlogy(pops, pops).sum(axis=1)
    grid_e = weights @ flat
    return weights, grid_e, grid_s


def brute_force_min_entropy(spec: Spectrum, e_target: float,
                            resolution: float = 1e-3) -> float:
    """Validation oracle: direct minimization over the passive simplex.

    Scans a grid of convex weights over the flat-state vertices, keeps the
    candidates whose energy lies within ``resolution`` of the target (plus
    the nearest ones regardless), and polishes each with an SLSQP descent
    under the exact energy and normalization constraints.  Dense spectra
    with at most 6 levels only; independent of the vertex-pair solver.
    """
    if not spec.is_unit_degenerate:
        raise ValueError("oracle needs a dense spectrum")
    d = int(spec.dim)
    if d > 6:
        raise ValueError(f"oracle limited to d <= 6, got {d}")
    e_target = _validate_energy(spec, e_target)
    flat = _level_flat_energies(spec)
    weights, grid_e, grid_s = _vertex_grid(flat.tobytes(), d, _GRID_STEPS[d])

    near = np.abs(grid_e - e_target) <= max(resolution, 1e-12)
    cand = np.flatnonzero(near)
    if cand.size > 16:
        cand = cand[np.argsort(grid_s[cand])[:16]]
    nearest = np.argsort(np.abs(grid_e - e_target))[:8]
    starts = np.unique(np.concatenate([cand, nearest]))

    vertex_pop = np.tril(np.ones((d, d))) / np.arange(1, d + 1)[:, None]

    def fun(q):
        p = q @ vertex_pop
        return float(-xlogy(p, p).sum())

    def grad(q):
        p = np.maximum(q @ vertex_pop, 1e-18)
        return -vertex_pop @ (1.0 + np.log(p))

    constraints = [
        {"type": "eq", "fun": lambda q: q.sum() - 1.0,
         "jac": lambda q: np.ones(d)},
        {"type": "eq", "fun": lambda q: q @ flat - e_target,
         "jac": lambda q: flat},
    ]
    best = math.inf
    for idx in starts:
        res = minimize(fun, weights[idx], jac=grad, method="SLSQP",
                       bounds=[(0.0, 1.0)] * d, constraints=constraints,
                       options={"maxiter": 300, "ftol": 1e-14})
        q = np.clip(res.x, 0.0, None)
        if abs(q.sum() - 1.0) > 1e-9 or abs(q @ flat - e_target) > 1e-9:
            continue
        best = min(best, fun(q))
    if not math.isfinite(best):
        raise RuntimeError(f"oracle found no feasible point at E={e_target}")
    return best


# -- ground+top dominance -----------------------------------------------------

def sigma0_dominance_check(spec: Spectrum, s_grid) -> list[DominanceRow]:
    """Check per entropy target whether the (ground, full-cut) pair is optimal.

    The candidate lam * omega_1 + (1 - lam) * omega_dim at the optimal
    energy competes against the solver's optimum; it dominates when it
    matches the minimal entropy within 1e-9.
    """
    rows = []
    ground_cut = spec.ground_cut()
    full = spec.full_cut()
    for s_target in np.asarray(s_grid, dtype=float):
        sol = meps_at_entropy(spec, float(s_target))
        lam0 = lambda_for_energy(spec, ground_cut, full, sol.energy_value)
        sigma0 = TwoBlockState(spec, ground_cut, full, lam0)
        s_sigma0 = entropy(sigma0)
        rows.append(DominanceRow(
            entropy_target=float(s_target),
            energy=sol.energy_value,
            low_log_count=spec.cut_log_count(sol.pair[0]),
            high_log_count=spec.cut_log_count(sol.pair[1]),
            weight=sol.lam,
            sigma0_entropy=s_sigma0,
            optimal_entropy=sol.entropy_value,
            dominant=bool(s_sigma0 <= sol.entropy_value + 1e-9),
        ))
    return rows
