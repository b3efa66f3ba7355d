# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_pykernels``."""
import numpy as np

from libc.math cimport cos, log, log1p

cdef double TWO_PI = 6.283185307179586


def garch11_filter(const double[::1] xi2, double alpha0, double alpha1,
                   double beta1, double h_init):
    cdef Py_ssize_t n = xi2.shape[0], t
    h_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] h = h_arr
    if n == 0:
        return h_arr
    with nogil:
        h[0] = h_init
        for t in range(1, n):
            h[t] = alpha0 + alpha1 * xi2[t - 1] + beta1 * h[t - 1]
    return h_arr


def garch11_simulate(const double[::1] eps, double alpha0, double alpha1,
                     double beta1, double h_init):
    cdef Py_ssize_t n = eps.shape[0], t
    h_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] h = h_arr
    if n == 0:
        return h_arr
    with nogil:
        h[0] = h_init
        for t in range(1, n):
            h[t] = alpha0 + (alpha1 * eps[t - 1] * eps[t - 1] + beta1) * h[t - 1]
    return h_arr


def garch11_nll(const double[::1] xi2, double alpha1, double beta1, double nu):
    cdef Py_ssize_t n = xi2.shape[0], t
    cdef double alpha0 = 1.0 - alpha1 - beta1
    cdef double h = 1.0, da = 0.0, db = 0.0, h_prev, da_prev, db_prev
    cdef double total = 0.0, ga = 0.0, gb = 0.0, gnu = 0.0
    cdef double dldh, q, c, half_nu1
    cdef bint student = nu > 0.0
    if student:
        half_nu1 = 0.5 * (nu + 1.0)
        c = 1.0 / (nu - 2.0)
    with nogil:
        for t in range(n):
            if t > 0:
                h_prev = h
                da_prev = da
                db_prev = db
                h = alpha0 + alpha1 * xi2[t - 1] + beta1 * h_prev
                da = -1.0 + xi2[t - 1] + beta1 * da_prev
                db = -1.0 + h_prev + beta1 * db_prev
            if student:
                q = xi2[t] * c / h
                total += 0.5 * log(h) + half_nu1 * log1p(q)
                dldh = 0.5 / h - half_nu1 * q / ((1.0 + q) * h)
                gnu += 0.5 * log1p(q) - half_nu1 * q * c / (1.0 + q)
            else:
                total += 0.5 * (log(h) + xi2[t] / h)
                dldh = 0.5 * (1.0 / h - xi2[t] / (h * h))
            ga += dldh * da
            gb += dldh * db
    return total, np.array([ga, gb, gnu])


def lag_cosine_sum(const double[::1] gamma, Py_ssize_t m,
                   const double[::1] omegas, int power, bint bartlett):
    cdef Py_ssize_t k, l, nw = omegas.shape[0]
    cdef double acc, w, lw, base
    out_arr = np.empty(nw, dtype=np.float64)
    cdef double[::1] out = out_arr
    coef_arr = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] coef = coef_arr
    with nogil:
        for l in range(1, m + 1):
            w = 1.0 - l / (m + 0.5) if bartlett else 1.0
            lw = 1.0
            if power == 1:
                lw = <double> l
            coef[l] = 2.0 * w * lw * gamma[l]
        base = gamma[0] if power == 0 else 0.0
        for k in range(nw):
            acc = base
            for l in range(1, m + 1):
                acc += coef[l] * cos(l * omegas[k])
            out[k] = acc / TWO_PI
    return out_arr
