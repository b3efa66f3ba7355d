"""Pure numpy implementations of the compiled kernels in ``_ckernels``."""
import numpy as np
from scipy.signal import lfilter

TWO_PI = 2.0 * np.pi


def _ar1_filter(drive, beta1):
    # y[t] = drive[t] + beta1 * y[t-1], y[-1] = 0
    return lfilter([1.0], [1.0, -beta1], drive)


def garch11_filter(xi2, alpha0, alpha1, beta1, h_init):
    xi2 = np.asarray(xi2, dtype=np.float64)
    if xi2.size == 0:
        return np.empty(0)
    drive = np.empty_like(xi2)
    drive[0] = h_init
    drive[1:] = alpha0 + alpha1 * xi2[:-1]
    return _ar1_filter(drive, beta1)


def garch11_simulate(eps, alpha0, alpha1, beta1, h_init):
    eps = np.asarray(eps, dtype=np.float64)
    n = eps.size
    h = np.empty(n)
    if n == 0:
        return h
    coef = (alpha1 * eps * eps + beta1).tolist()
    prev = float(h_init)
    h[0] = prev
    for t in range(1, n):
        prev = alpha0 + coef[t - 1] * prev
        h[t] = prev
    return h


def garch11_nll(xi2, alpha1, beta1, nu):
    xi2 = np.asarray(xi2, dtype=np.float64)
    h = garch11_filter(xi2, 1.0 - alpha1 - beta1, alpha1, beta1, 1.0)
    da = np.zeros_like(xi2)
    db = np.zeros_like(xi2)
    if xi2.size > 1:
        da[1:] = -1.0 + xi2[:-1]
        db[1:] = -1.0 + h[:-1]
        da = _ar1_filter(da, beta1)
        db = _ar1_filter(db, beta1)
    if nu > 0.0:
        half_nu1 = 0.5 * (nu + 1.0)
        c = 1.0 / (nu - 2.0)
        q = xi2 * c / h
        lq = np.log1p(q)
        total = np.sum(0.5 * np.log(h) + half_nu1 * lq)
        dldh = 0.5 / h - half_nu1 * q / ((1.0 + q) * h)
        gnu = np.sum(0.5 * lq - half_nu1 * q * c / (1.0 + q))
    else:
        total = np.sum(0.5 * (np.log(h) + xi2 / h))
        dldh = 0.5 * (1.0 / h - xi2 / (h * h))
        gnu = 0.0
    return float(total), np.array([np.dot(dldh, da), np.dot(dldh, db), gnu])


def lag_cosine_sum(gamma, m, omegas, power, bartlett):
    gamma = np.asarray(gamma, dtype=np.float64)
    omegas = np.asarray(omegas, dtype=np.float64)
    lags = np.arange(1, m + 1, dtype=np.float64)
    coef = 2.0 * gamma[1:m + 1]
    if bartlett:
        coef = coef * (1.0 - lags / (m + 0.5))
    if power == 1:
        coef = coef * lags
    base = gamma[0] if power == 0 else 0.0
    out = np.empty(omegas.size)
    step = max(1, 2_000_000 // max(m, 1))
    for start in range(0, omegas.size, step):
        w = omegas[start:start + step]
        out[start:start + step] = base + np.cos(np.outer(w, lags)) @ coef
    return out / TWO_PI
