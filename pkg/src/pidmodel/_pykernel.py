"""Pure-Python cohort integrator, vectorized over states only."""
import math

import numpy as np


def evolve_cohorts(lam, tcr, alpha1, s_prime, l_prime, alpha0, start_index, start_exp, n_exp):
    """Integrate every cohort year by year.

    Parameters
    ----------
    lam, tcr, alpha1 : (n_years,) float arrays
        Calendar coefficients; ``sigma_min`` equals ``lam``.
    s_prime, l_prime : (n_states,) float arrays
    alpha0 : float
    start_index : (n_cohorts,) int array
        Index into the calendar arrays of the year each cohort starts work.
    start_exp : (n_cohorts,) int array
        Experience at which integration begins from zero income.
    n_exp : int
        Largest experience to record.

    Returns
    -------
    out : (n_cohorts, n_exp + 1, n_states) float array
        Income at each integer experience; ``nan`` past the calendar end.
    """
    lam = np.asarray(lam, dtype=float)
    tcr = np.asarray(tcr, dtype=float)
    alpha1 = np.asarray(alpha1, dtype=float)
    s_prime = np.asarray(s_prime, dtype=float)
    l_prime = np.asarray(l_prime, dtype=float)
    n_years = lam.size
    out = np.full((len(start_index), n_exp + 1, s_prime.size), np.nan)
    sl = s_prime * l_prime
    for c, (y0, e0) in enumerate(zip(start_index, start_exp)):
        y0, e0 = int(y0), int(e0)
        out[c, : e0 + 1] = 0.0
        m = np.zeros(s_prime.size)
        switched = False
        for k in range(e0, n_exp):
            y = y0 + k
            if y >= n_years:
                break
            lam_y = lam[y]
            tcr_y = tcr[y]
            if not switched and k >= tcr_y:
                switched = True
            seg = float(k)
            if not switched:
                grow_end = min(k + 1.0, tcr_y)
                asym = sl * (lam_y * lam_y)
                m = asym + (m - asym) * np.exp(-(alpha0 / lam_y) / l_prime * (grow_end - k))
                seg = grow_end
                if grow_end < k + 1.0:
                    switched = True
            if switched and seg < k + 1.0:
                a1 = alpha1[y]
                if math.isnan(a1):
                    m = np.full_like(m, np.nan)
                else:
                    m = m * np.exp(-(a1 / lam_y) / l_prime * (k + 1.0 - seg))
            out[c, k + 1] = m
    return out
