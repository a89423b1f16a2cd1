"""Pure-numpy kernels for the entropy-minimization inner loops.

This module is the fallback backend: it mirrors the compiled extension in
``_core.pyx`` function by function, trading scalar loops for vectorization
over candidate pairs and shell-pair boxes.  Both backends implement the same
closed form for the entropy of a two-block state

    sigma = lam * omega_k + (1 - lam) * omega_l,   k <= l,

evaluated from log counts so it stays finite and accurate for counts of
order 2**200:

    r  = k / l = exp(log_k - log_l)
    p2 = (1 - lam) * (1 - r)          # total weight above the low cut
    S  = (1 - p2) * (log_k - log1p(-p2)) + p2 * (log_l - log(1 - lam))
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

# Mixing weights outside [0, 1] by more than this are infeasible; smaller
# excursions are clamped.
LAMBDA_SLACK = 1e-12

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
# golden-section iterations for a relative interval tolerance of 1e-10
GOLDEN_ITERS = 48
COARSE_GRID = 9


def two_block_entropy(log_k, log_l, lam):
    """Entropy (nats) of lam * omega_k + (1-lam) * omega_l from log counts."""
    log_k, log_l, lam = np.broadcast_arrays(
        np.asarray(log_k, dtype=float), np.asarray(log_l, dtype=float),
        np.asarray(lam, dtype=float))
    scalar = log_k.ndim == 0
    if scalar:
        log_k, log_l, lam = (np.atleast_1d(log_k), np.atleast_1d(log_l),
                             np.atleast_1d(lam))
    d = np.minimum(log_k - log_l, 0.0)
    p2 = (1.0 - lam) * -np.expm1(d)
    out = np.empty(p2.shape)
    low = (lam >= 1.0) | (p2 <= 0.0)
    high = (lam <= 0.0) & ~low
    mid = ~(low | high)
    out[low] = log_k[low]
    out[high] = log_l[high]
    p2m = p2[mid]
    out[mid] = ((1.0 - p2m) * (log_k[mid] - np.log1p(-p2m))
                + p2m * (log_l[mid] - np.log(1.0 - lam[mid])))
    if scalar:
        return float(out[0])
    return out


def mixing_weight(e_k, e_l, energy):
    """Weight lam placing lam*omega_k + (1-lam)*omega_l at the target energy.

    Degenerate pairs (equal flat energies) get lam = 0 by convention.
    Weights outside [0,1] by more than LAMBDA_SLACK come out unclamped so the
    caller can reject the pair; smaller excursions are clamped.
    """
    e_k, e_l = np.broadcast_arrays(np.asarray(e_k, float), np.asarray(e_l, float))
    denom = e_l - e_k
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (e_l - energy) / denom
    lam = np.where(denom > 0.0, lam, 0.0)
    inside = (lam >= -LAMBDA_SLACK) & (lam <= 1.0 + LAMBDA_SLACK)
    lam = np.where(inside, np.clip(lam, 0.0, 1.0), lam)
    if lam.ndim == 0:
        return float(lam)
    return lam


def pair_entropy(log_k, log_l, e_k, e_l, energy):
    """Entropy and weight of the pair constrained to the target energy.

    Returns (S, lam); infeasible pairs (weight beyond the slack) get S = inf.
    """
    lam = np.asarray(mixing_weight(e_k, e_l, energy))
    feasible = (lam >= 0.0) & (lam <= 1.0)
    S = np.asarray(two_block_entropy(log_k, log_l, np.where(feasible, lam, 0.5)))
    S = np.where(feasible, S, np.inf)
    if S.ndim == 0:
        return float(S), float(lam)
    return S, lam


# -- dense spectra ----------------------------------------------------------

def dense_min_pair(flat_energies, energy, block=256):
    """Minimum-entropy feasible pair over a dense spectrum.

    ``flat_energies[k-1]`` is the flat-state energy of the k lowest levels.
    Returns (S, k, l, lam) with 1-based counts; ties resolve to the
    lexicographically smallest (k, l).
    """
    flat = np.asarray(flat_energies, dtype=float)
    d = flat.size
    kmax = int(np.searchsorted(flat, energy, side="right"))
    lmin = int(np.searchsorted(flat, energy, side="left")) + 1
    if kmax == 0 or lmin > d:
        raise ValueError("target energy outside the flat-energy range")
    log_counts = np.log(np.arange(1, d + 1, dtype=float))
    l_idx = np.arange(lmin - 1, d)
    e_l = flat[l_idx]
    log_l = log_counts[l_idx]
    best = (np.inf, -1, -1, 0.0)
    for start in range(0, kmax, block):
        kk = np.arange(start, min(start + block, kmax))
        S, lam = pair_entropy(log_counts[kk][:, None], log_l[None, :],
                              flat[kk][:, None], e_l[None, :], energy)
        S = np.where(l_idx[None, :] >= kk[:, None], S, np.inf)
        flat_pos = int(np.argmin(S))
        s_val = float(S.flat[flat_pos])
        if s_val < best[0]:
            i, j = divmod(flat_pos, l_idx.size)
            best = (s_val, int(kk[i]) + 1, int(l_idx[j]) + 1,
                    float(np.asarray(lam)[i, j]))
    return best


# -- aggregated spectra: exact integer enumeration over a box ---------------

def exact_boxes_min(lo_n0, lo_w0, lo_de, lo_ka, lo_kb,
                    hi_n0, hi_w0, hi_de, hi_la, hi_lb,
                    ground, energy, block=256):
    """Exact integer-cut minimization per shell-pair box.

    All counts must be exactly representable (below 2**52).  For box ``b``
    the low cut ranges over integer counts [lo_ka[b], lo_kb[b]] inside a
    shell with ``lo_n0`` levels and shifted-energy sum ``lo_w0`` below it and
    level energy offset ``lo_de``; the high side likewise.  Returns per-box
    arrays (S, k, l, lam); boxes with no feasible pair get S = inf.
    """
    nbox = len(lo_ka)
    S_out = np.full(nbox, np.inf)
    k_out = np.zeros(nbox)
    l_out = np.zeros(nbox)
    lam_out = np.zeros(nbox)
    for b in range(nbox):
        ks = np.arange(lo_ka[b], lo_kb[b] + 1.0)
        e_k = ground + (lo_w0[b] + (ks - lo_n0[b]) * lo_de[b]) / ks
        keep = e_k <= energy
        ks, e_k = ks[keep], e_k[keep]
        if ks.size == 0:
            continue
        ls = np.arange(hi_la[b], hi_lb[b] + 1.0)
        e_l = ground + (hi_w0[b] + (ls - hi_n0[b]) * hi_de[b]) / ls
        keep = e_l >= energy
        ls, e_l = ls[keep], e_l[keep]
        if ls.size == 0:
            continue
        log_ls = np.log(ls)
        best = (np.inf, 0.0, 0.0, 0.0)
        for start in range(0, ks.size, block):
            kc = ks[start:start + block]
            ec = e_k[start:start + block]
            S, lam = pair_entropy(np.log(kc)[:, None], log_ls[None, :],
                                  ec[:, None], e_l[None, :], energy)
            S = np.where(ls[None, :] >= kc[:, None], S, np.inf)
            pos = int(np.argmin(S))
            val = float(S.flat[pos])
            if val < best[0]:
                i, j = divmod(pos, ls.size)
                best = (val, float(kc[i]), float(ls[j]),
                        float(np.asarray(lam)[i, j]))
        if best[0] < S_out[b]:
            S_out[b], k_out[b], l_out[b], lam_out[b] = best
    return S_out, k_out, l_out, lam_out


# -- aggregated spectra: continuous relaxation over a box --------------------

def _flat_at_fraction(frac, log_n0, log_g, log_w0, log_de, ground):
    """Log count and flat energy of a cut at shell fraction ``frac``."""
    with np.errstate(divide="ignore"):
        log_f = np.log(frac)
    term = log_f + log_g
    log_count = np.logaddexp(log_n0, term)
    log_w = np.logaddexp(log_w0, term + log_de)
    e_flat = ground + np.exp(log_w - log_count)
    return log_count, e_flat


def relaxed_boxes_min(lo_logn0, lo_logg, lo_logw0, lo_logde, lo_u0, lo_u1,
                      hi_logn0, hi_logg, hi_logw0, hi_logde, hi_v0, hi_v1,
                      ground, energy):
    """Continuous two-cut minimization per shell-pair box.

    Cuts are parameterized by the filled fraction of each shell, restricted
    to the feasibility windows [u0, u1] x [v0, v1] supplied by the caller
    (so the mixing weight stays inside [0, 1] up to rounding).  A coarse
    scan over a COARSE_GRID**2 lattice (endpoints included) locates the best
    cell; nested golden-section search refines within the neighbouring
    cells.  Returns per-box arrays (S, u, v, lam).
    """
    lo = (lo_logn0, lo_logg, lo_logw0, lo_logde)
    hi = (hi_logn0, hi_logg, hi_logw0, hi_logde)
    nbox = len(lo_u0)

    def eval_uv(u, v):
        log_k, e_k = _flat_at_fraction(u, *lo, ground)
        log_l, e_l = _flat_at_fraction(v, *hi, ground)
        S, lam = pair_entropy(log_k, log_l, e_k, e_l, energy)
        return np.asarray(S), np.asarray(lam)

    best_S = np.full(nbox, np.inf)
    best_u = lo_u0.copy()
    best_v = hi_v0.copy()
    best_lam = np.zeros(nbox)

    def consider(u, v, S, lam):
        better = S < best_S
        if np.any(better):
            best_S[better] = S[better]
            best_u[better] = u[better]
            best_v[better] = v[better]
            best_lam[better] = lam[better]

    # coarse scan, endpoints included
    grid = np.linspace(0.0, 1.0, COARSE_GRID)
    best_iu = np.zeros(nbox, dtype=np.intp)
    best_iv = np.zeros(nbox, dtype=np.intp)
    for iu, gu in enumerate(grid):
        u = lo_u0 + gu * (lo_u1 - lo_u0)
        for iv, gv in enumerate(grid):
            v = hi_v0 + gv * (hi_v1 - hi_v0)
            S, lam = eval_uv(u, v)
            better = S < best_S
            best_iu[better] = iu
            best_iv[better] = iv
            consider(u, v, S, lam)

    # refine within the cells adjacent to the scan winner
    du = (lo_u1 - lo_u0) / (COARSE_GRID - 1)
    dv = (hi_v1 - hi_v0) / (COARSE_GRID - 1)
    ua = np.maximum(lo_u0, lo_u0 + (best_iu - 1) * du)
    ub = np.minimum(lo_u1, lo_u0 + (best_iu + 1) * du)
    va = np.maximum(hi_v0, hi_v0 + (best_iv - 1) * dv)
    vb = np.minimum(hi_v1, hi_v0 + (best_iv + 1) * dv)

    def inner_min(u):
        """Golden-section minimum over v for the given per-box u."""
        a, b = va.copy(), vb.copy()
        loc_S = np.full(nbox, np.inf)
        loc_v = a.copy()
        loc_lam = np.zeros(nbox)

        def probe(v):
            S, lam = eval_uv(u, v)
            better = S < loc_S
            loc_S[better] = S[better]
            loc_v[better] = v[better]
            loc_lam[better] = lam[better]
            return S

        probe(a)
        probe(b)
        x1 = b - _INVPHI * (b - a)
        x2 = a + _INVPHI * (b - a)
        f1 = probe(x1)
        f2 = probe(x2)
        for _ in range(GOLDEN_ITERS):
            shrink_hi = f1 < f2
            b = np.where(shrink_hi, x2, b)
            a = np.where(shrink_hi, a, x1)
            x1n = np.where(shrink_hi, b - _INVPHI * (b - a), x2)
            x2n = np.where(shrink_hi, x1, a + _INVPHI * (b - a))
            xnew = np.where(shrink_hi, x1n, x2n)
            fnew = probe(xnew)
            f1, f2 = (np.where(shrink_hi, fnew, f2), np.where(shrink_hi, f1, fnew))
            x1, x2 = x1n, x2n
        return loc_S, loc_v, loc_lam

    def outer_probe(u):
        S, v, lam = inner_min(u)
        consider(u, v, S, lam)
        return S

    a, b = ua.copy(), ub.copy()
    outer_probe(a)
    outer_probe(b)
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = outer_probe(x1)
    f2 = outer_probe(x2)
    for _ in range(GOLDEN_ITERS):
        shrink_hi = f1 < f2
        b = np.where(shrink_hi, x2, b)
        a = np.where(shrink_hi, a, x1)
        x1n = np.where(shrink_hi, b - _INVPHI * (b - a), x2)
        x2n = np.where(shrink_hi, x1, a + _INVPHI * (b - a))
        xnew = np.where(shrink_hi, x1n, x2n)
        fnew = outer_probe(xnew)
        f1, f2 = (np.where(shrink_hi, fnew, f2), np.where(shrink_hi, f1, fnew))
        x1, x2 = x1n, x2n

    return best_S, best_u, best_v, best_lam
