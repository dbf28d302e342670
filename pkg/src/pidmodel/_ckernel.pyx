# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cohort integrator; same contract as ``_pykernel.evolve_cohorts``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, isnan, NAN

cnp.import_array()


def evolve_cohorts(lam, tcr, alpha1, s_prime, l_prime, double alpha0,
                   start_index, start_exp, Py_ssize_t n_exp):
    cdef const double[::1] lam_v = np.ascontiguousarray(lam, dtype=np.float64)
    cdef const double[::1] tcr_v = np.ascontiguousarray(tcr, dtype=np.float64)
    cdef const double[::1] a1_v = np.ascontiguousarray(alpha1, dtype=np.float64)
    cdef const double[::1] sp = np.ascontiguousarray(s_prime, dtype=np.float64)
    cdef const double[::1] lp = np.ascontiguousarray(l_prime, dtype=np.float64)
    cdef const long long[::1] y0s = np.ascontiguousarray(start_index, dtype=np.int64)
    cdef const long long[::1] e0s = np.ascontiguousarray(start_exp, dtype=np.int64)
    cdef Py_ssize_t n_c = y0s.shape[0]
    cdef Py_ssize_t n_s = sp.shape[0]
    cdef Py_ssize_t n_years = lam_v.shape[0]
    cdef Py_ssize_t s

    # rates depend on L' only, which takes few distinct values; exp() once per value
    uniq, inverse = np.unique(np.asarray(l_prime, dtype=np.float64), return_inverse=True)
    cdef const double[::1] ul = np.ascontiguousarray(uniq)
    cdef const long long[::1] li = np.ascontiguousarray(inverse.ravel(), dtype=np.int64)
    cdef Py_ssize_t n_u = ul.shape[0], u
    cdef double[::1] eg = np.empty(n_u)
    cdef double[::1] ed = np.empty(n_u)
    cdef double[::1] sl = np.empty(n_s)
    for s in range(n_s):
        sl[s] = sp[s] * lp[s]

    out_arr = np.empty((n_c, n_exp + 1, n_s))
    cdef double[:, :, ::1] out = out_arr
    cdef double[::1] m = np.empty(n_s)

    cdef Py_ssize_t c, k, y, y0, e0, filled
    cdef bint switched
    cdef double lam_y, tcr_y, a1, seg, grow_end, asym_scale, grow_rate, decay_rate, dt_g, dt_d

    for c in range(n_c):
        y0 = y0s[c]
        e0 = e0s[c]
        for k in range(e0 + 1):
            for s in range(n_s):
                out[c, k, s] = 0.0
        for s in range(n_s):
            m[s] = 0.0
        switched = False
        filled = e0
        for k in range(e0, n_exp):
            y = y0 + k
            if y >= n_years:
                break
            lam_y = lam_v[y]
            tcr_y = tcr_v[y]
            if not switched and k >= tcr_y:
                switched = True
            seg = <double>k
            dt_g = 0.0
            if not switched:
                grow_end = k + 1.0
                if tcr_y < grow_end:
                    grow_end = tcr_y
                dt_g = grow_end - k
                seg = grow_end
                if grow_end < k + 1.0:
                    switched = True
            dt_d = 0.0
            a1 = 0.0
            if switched and seg < k + 1.0:
                dt_d = k + 1.0 - seg
                a1 = a1_v[y]
            asym_scale = lam_y * lam_y
            grow_rate = alpha0 / lam_y
            decay_rate = a1 / lam_y
            for u in range(n_u):
                eg[u] = exp(-grow_rate / ul[u] * dt_g)
                ed[u] = exp(-decay_rate / ul[u] * dt_d)
            for s in range(n_s):
                if dt_g > 0.0:
                    m[s] = sl[s] * asym_scale + (m[s] - sl[s] * asym_scale) * eg[li[s]]
                if dt_d > 0.0:
                    if isnan(a1):
                        m[s] = NAN
                    else:
                        m[s] = m[s] * ed[li[s]]
                out[c, k + 1, s] = m[s]
            filled = k + 1
        # past the end of the calendar
        for k in range(filled + 1, n_exp + 1):
            for s in range(n_s):
                out[c, k, s] = NAN
    return out_arr
