# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the entropy-minimization inner loops.

Scalar-loop twin of ``_kernels_py``: same two-block entropy closed form,
same candidate enumeration order and tie-breaking, same coarse-scan plus
nested golden-section refinement for relaxed shell-pair boxes.
"""

from libc.math cimport INFINITY, exp, expm1, log, log1p

import numpy as np

BACKEND = "compiled"
LAMBDA_SLACK = 1e-12

cdef double _SLACK = 1e-12
cdef double _INVPHI = 0.6180339887498949
cdef int _GOLDEN_ITERS = 48
cdef int _COARSE = 9


cdef inline double _logaddexp(double a, double b) nogil:
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a > b:
        return a + log1p(exp(b - a))
    return b + log1p(exp(a - b))


cdef inline double _two_block(double log_k, double log_l, double lam) nogil:
    cdef double d, p2
    if lam >= 1.0:
        return log_k
    if lam <= 0.0:
        return log_l
    d = log_k - log_l
    if d > 0.0:
        d = 0.0
    p2 = (1.0 - lam) * (-expm1(d))
    if p2 <= 0.0:
        return log_k
    return (1.0 - p2) * (log_k - log1p(-p2)) + p2 * (log_l - log(1.0 - lam))


cdef inline double _pair_s(double log_k, double log_l, double e_k, double e_l,
                           double energy, double* lam_out) nogil:
    cdef double denom = e_l - e_k
    cdef double lam
    if denom > 0.0:
        lam = (e_l - energy) / denom
        if lam < -_SLACK or lam > 1.0 + _SLACK:
            lam_out[0] = lam
            return INFINITY
        if lam < 0.0:
            lam = 0.0
        elif lam > 1.0:
            lam = 1.0
    else:
        lam = 0.0
    lam_out[0] = lam
    return _two_block(log_k, log_l, lam)


def two_block_entropy(double log_k, double log_l, double lam):
    """Entropy (nats) of lam * omega_k + (1-lam) * omega_l from log counts."""
    return _two_block(log_k, log_l, lam)


def dense_min_pair(flat_energies, double energy):
    """Minimum-entropy feasible pair over a dense spectrum (1-based counts)."""
    cdef double[::1] flat = np.ascontiguousarray(flat_energies, dtype=np.float64)
    cdef Py_ssize_t d = flat.shape[0]
    cdef Py_ssize_t kmax = 0, lmin = d
    cdef Py_ssize_t i, k, l, lstart
    for i in range(d):
        if flat[i] <= energy:
            kmax = i + 1
        else:
            break
    for i in range(d):
        if flat[i] >= energy:
            lmin = i
            break
    if kmax == 0 or lmin == d:
        raise ValueError("target energy outside the flat-energy range")
    cdef double[::1] logc = np.log(np.arange(1, d + 1, dtype=np.float64))
    cdef double best = INFINITY, best_lam = 0.0, s, lam
    cdef Py_ssize_t bk = -1, bl = -1
    with nogil:
        for k in range(kmax):
            lstart = lmin if lmin > k else k
            for l in range(lstart, d):
                s = _pair_s(logc[k], logc[l], flat[k], flat[l], energy, &lam)
                if s < best:
                    best = s
                    bk = k
                    bl = l
                    best_lam = lam
    return best, bk + 1, bl + 1, best_lam


def exact_boxes_min(lo_n0, lo_w0, lo_de, lo_ka, lo_kb,
                    hi_n0, hi_w0, hi_de, hi_la, hi_lb,
                    double ground, double energy):
    """Exact integer-cut minimization per shell-pair box (counts < 2**52)."""
    cdef double[::1] ln0 = np.ascontiguousarray(lo_n0, dtype=np.float64)
    cdef double[::1] lw0 = np.ascontiguousarray(lo_w0, dtype=np.float64)
    cdef double[::1] lde = np.ascontiguousarray(lo_de, dtype=np.float64)
    cdef double[::1] lka = np.ascontiguousarray(lo_ka, dtype=np.float64)
    cdef double[::1] lkb = np.ascontiguousarray(lo_kb, dtype=np.float64)
    cdef double[::1] hn0 = np.ascontiguousarray(hi_n0, dtype=np.float64)
    cdef double[::1] hw0 = np.ascontiguousarray(hi_w0, dtype=np.float64)
    cdef double[::1] hde = np.ascontiguousarray(hi_de, dtype=np.float64)
    cdef double[::1] hla = np.ascontiguousarray(hi_la, dtype=np.float64)
    cdef double[::1] hlb = np.ascontiguousarray(hi_lb, dtype=np.float64)
    cdef Py_ssize_t nbox = lka.shape[0]
    s_out = np.full(nbox, np.inf)
    k_out = np.zeros(nbox)
    l_out = np.zeros(nbox)
    lam_out = np.zeros(nbox)
    cdef double[::1] sv = s_out, kv = k_out, lv = l_out, av = lam_out
    cdef Py_ssize_t b
    cdef double kk, ll, lfirst, e_k, e_l, s, lam, logk
    cdef double best, bk, bl, blam
    with nogil:
        for b in range(nbox):
            # first high cut whose flat energy reaches the target
            lfirst = hla[b]
            while lfirst <= hlb[b]:
                e_l = ground + (hw0[b] + (lfirst - hn0[b]) * hde[b]) / lfirst
                if e_l >= energy:
                    break
                lfirst += 1.0
            if lfirst > hlb[b]:
                continue
            best = INFINITY
            bk = 0.0
            bl = 0.0
            blam = 0.0
            kk = lka[b]
            while kk <= lkb[b]:
                e_k = ground + (lw0[b] + (kk - ln0[b]) * lde[b]) / kk
                if e_k > energy:
                    break
                logk = log(kk)
                ll = lfirst if lfirst > kk else kk
                while ll <= hlb[b]:
                    e_l = ground + (hw0[b] + (ll - hn0[b]) * hde[b]) / ll
                    s = _pair_s(logk, log(ll), e_k, e_l, energy, &lam)
                    if s < best:
                        best = s
                        bk = kk
                        bl = ll
                        blam = lam
                    ll += 1.0
                kk += 1.0
            if best < sv[b]:
                sv[b] = best
                kv[b] = bk
                lv[b] = bl
                av[b] = blam
    return s_out, k_out, l_out, lam_out


cdef inline void _flat_frac(double f, double logn0, double logg, double logw0,
                            double logde, double ground,
                            double* log_count, double* e_flat) nogil:
    cdef double term, lc, lw
    if f <= 0.0:
        lc = logn0
        lw = logw0
    else:
        term = log(f) + logg
        lc = _logaddexp(logn0, term)
        lw = _logaddexp(logw0, term + logde)
    log_count[0] = lc
    if lw == -INFINITY or lc == -INFINITY:
        e_flat[0] = ground
    else:
        e_flat[0] = ground + exp(lw - lc)


cdef inline double _eval_box(double u, double v,
                             double llogn0, double llogg, double llogw0, double llogde,
                             double hlogn0, double hlogg, double hlogw0, double hlogde,
                             double ground, double energy, double* lam_out) nogil:
    cdef double lk, ek, hl, el
    _flat_frac(u, llogn0, llogg, llogw0, llogde, ground, &lk, &ek)
    _flat_frac(v, hlogn0, hlogg, hlogw0, hlogde, ground, &hl, &el)
    return _pair_s(lk, hl, ek, el, energy, lam_out)


cdef double _inner_golden(double u, double va, double vb,
                          double llogn0, double llogg, double llogw0, double llogde,
                          double hlogn0, double hlogg, double hlogw0, double hlogde,
                          double ground, double energy,
                          double* v_best, double* lam_best) nogil:
    cdef double a = va, b = vb
    cdef double best = INFINITY, bv = va, blam = 0.0
    cdef double x1, x2, f1, f2, s, lam, xnew
    cdef int it

    s = _eval_box(u, a, llogn0, llogg, llogw0, llogde,
                  hlogn0, hlogg, hlogw0, hlogde, ground, energy, &lam)
    if s < best:
        best = s; bv = a; blam = lam
    s = _eval_box(u, b, llogn0, llogg, llogw0, llogde,
                  hlogn0, hlogg, hlogw0, hlogde, ground, energy, &lam)
    if s < best:
        best = s; bv = b; blam = lam
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = _eval_box(u, x1, llogn0, llogg, llogw0, llogde,
                   hlogn0, hlogg, hlogw0, hlogde, ground, energy, &lam)
    if f1 < best:
        best = f1; bv = x1; blam = lam
    f2 = _eval_box(u, x2, llogn0, llogg, llogw0, llogde,
                   hlogn0, hlogg, hlogw0, hlogde, ground, energy, &lam)
    if f2 < best:
        best = f2; bv = x2; blam = lam
    for it in range(_GOLDEN_ITERS):
        if f1 < f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = b - _INVPHI * (b - a)
            xnew = x1
            f1 = _eval_box(u, xnew, llogn0, llogg, llogw0, llogde,
                           hlogn0, hlogg, hlogw0, hlogde, ground, energy, &lam)
            s = f1
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = a + _INVPHI * (b - a)
            xnew = x2
            f2 = _eval_box(u, xnew, llogn0, llogg, llogw0, llogde,
                           hlogn0, hlogg, hlogw0, hlogde, ground, energy, &lam)
            s = f2
        if s < best:
            best = s; bv = xnew; blam = lam
    v_best[0] = bv
    lam_best[0] = blam
    return best


cdef void _relax_box(double u0, double u1, double v0, double v1,
                     double llogn0, double llogg, double llogw0, double llogde,
                     double hlogn0, double hlogg, double hlogw0, double hlogde,
                     double ground, double energy,
                     double* s_out, double* u_out, double* v_out,
                     double* lam_out) nogil:
    cdef double best = INFINITY, bu = u0, bv = v0, blam = 0.0
    cdef double du = (u1 - u0) / (_COARSE - 1)
    cdef double dv = (v1 - v0) / (_COARSE - 1)
    cdef int iu, iv, biu = 0, biv = 0
    cdef double u, v, s, lam, vv

    for iu in range(_COARSE):
        u = u0 + du * iu
        for iv in range(_COARSE):
            v = v0 + dv * iv
            s = _eval_box(u, v, llogn0, llogg, llogw0, llogde,
                          hlogn0, hlogg, hlogw0, hlogde, ground, energy, &lam)
            if s < best:
                best = s; bu = u; bv = v; blam = lam; biu = iu; biv = iv

    cdef double ua = u0 + du * (biu - 1 if biu > 0 else 0)
    cdef double ub = u0 + du * (biu + 1 if biu < _COARSE - 1 else _COARSE - 1)
    cdef double va = v0 + dv * (biv - 1 if biv > 0 else 0)
    cdef double vb = v0 + dv * (biv + 1 if biv < _COARSE - 1 else _COARSE - 1)

    cdef double a = ua, b = ub
    cdef double x1, x2, f1, f2, xnew

    s = _inner_golden(a, va, vb, llogn0, llogg, llogw0, llogde,
                      hlogn0, hlogg, hlogw0, hlogde, ground, energy, &vv, &lam)
    if s < best:
        best = s; bu = a; bv = vv; blam = lam
    s = _inner_golden(b, va, vb, llogn0, llogg, llogw0, llogde,
                      hlogn0, hlogg, hlogw0, hlogde, ground, energy, &vv, &lam)
    if s < best:
        best = s; bu = b; bv = vv; blam = lam
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = _inner_golden(x1, va, vb, llogn0, llogg, llogw0, llogde,
                       hlogn0, hlogg, hlogw0, hlogde, ground, energy, &vv, &lam)
    if f1 < best:
        best = f1; bu = x1; bv = vv; blam = lam
    f2 = _inner_golden(x2, va, vb, llogn0, llogg, llogw0, llogde,
                       hlogn0, hlogg, hlogw0, hlogde, ground, energy, &vv, &lam)
    if f2 < best:
        best = f2; bu = x2; bv = vv; blam = lam
    for iu in range(_GOLDEN_ITERS):
        if f1 < f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = b - _INVPHI * (b - a)
            xnew = x1
            f1 = _inner_golden(xnew, va, vb, llogn0, llogg, llogw0, llogde,
                               hlogn0, hlogg, hlogw0, hlogde, ground, energy,
                               &vv, &lam)
            s = f1
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = a + _INVPHI * (b - a)
            xnew = x2
            f2 = _inner_golden(xnew, va, vb, llogn0, llogg, llogw0, llogde,
                               hlogn0, hlogg, hlogw0, hlogde, ground, energy,
                               &vv, &lam)
            s = f2
        if s < best:
            best = s; bu = xnew; bv = vv; blam = lam

    s_out[0] = best
    u_out[0] = bu
    v_out[0] = bv
    lam_out[0] = blam


def relaxed_boxes_min(lo_logn0, lo_logg, lo_logw0, lo_logde, lo_u0, lo_u1,
                      hi_logn0, hi_logg, hi_logw0, hi_logde, hi_v0, hi_v1,
                      double ground, double energy):
    """Continuous two-cut minimization per shell-pair box."""
    cdef double[::1] ln0 = np.ascontiguousarray(lo_logn0, dtype=np.float64)
    cdef double[::1] lg = np.ascontiguousarray(lo_logg, dtype=np.float64)
    cdef double[::1] lw0 = np.ascontiguousarray(lo_logw0, dtype=np.float64)
    cdef double[::1] lde = np.ascontiguousarray(lo_logde, dtype=np.float64)
    cdef double[::1] u0 = np.ascontiguousarray(lo_u0, dtype=np.float64)
    cdef double[::1] u1 = np.ascontiguousarray(lo_u1, dtype=np.float64)
    cdef double[::1] hn0 = np.ascontiguousarray(hi_logn0, dtype=np.float64)
    cdef double[::1] hg = np.ascontiguousarray(hi_logg, dtype=np.float64)
    cdef double[::1] hw0 = np.ascontiguousarray(hi_logw0, dtype=np.float64)
    cdef double[::1] hde = np.ascontiguousarray(hi_logde, dtype=np.float64)
    cdef double[::1] v0 = np.ascontiguousarray(hi_v0, dtype=np.float64)
    cdef double[::1] v1 = np.ascontiguousarray(hi_v1, dtype=np.float64)
    cdef Py_ssize_t nbox = u0.shape[0]
    s_arr = np.full(nbox, np.inf)
    u_arr = np.zeros(nbox)
    v_arr = np.zeros(nbox)
    lam_arr = np.zeros(nbox)
    cdef double[::1] sv = s_arr, uv = u_arr, vv = v_arr, av = lam_arr
    cdef Py_ssize_t b
    with nogil:
        for b in range(nbox):
            _relax_box(u0[b], u1[b], v0[b], v1[b],
                       ln0[b], lg[b], lw0[b], lde[b],
                       hn0[b], hg[b], hw0[b], hde[b],
                       ground, energy, &sv[b], &uv[b], &vv[b], &av[b])
    return s_arr, u_arr, v_arr, lam_arr
