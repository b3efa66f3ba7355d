"""Lag-window estimation of the spectral density at frequency zero.

The variance factor c_f = f(0) of the residual process is estimated with a
Bartlett lag window whose width is chosen by a two-stage iterative plug-in:
a global stage minimising the integrated MSE over [0, pi], followed by a
local step at omega = 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import fft as sfft

from . import kernels
from .errors import DegenerateInputError, InvalidInputError

CF_FLOOR = 1e-10
GRID_SIZE = 512
MAX_GLOBAL_ITER = 20
FREQ_GRID = np.linspace(0.0, np.pi, GRID_SIZE)
FREQ_GRID.setflags(write=False)


@dataclass(frozen=True, eq=False)
class AcfEstimate:
    gamma: np.ndarray
    n: int
    mean_removed: bool = True

    @property
    def max_lag(self) -> int:
        return self.gamma.size - 1


@dataclass(frozen=True)
class SpectralEstimate:
    c_f: float
    window_width: int
    iterations: int
    converged: bool
    global_width: float
    derivative_fallback: bool = False
    floored: bool = False


class DerivativeIntegrals(NamedTuple):
    int_f2: float
    int_f1_sq: float
    f1_zero: float


def autocovariance(x, max_lag: int) -> AcfEstimate:
    """Biased sample autocovariances (divisor n) of the mean-removed series."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if x.ndim != 1 or n < 2:
        raise InvalidInputError("autocovariance needs a 1-D series of length >= 2")
    if not 0 <= max_lag < n:
        raise InvalidInputError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("series contains non-finite values")
    xc = x - x.mean()
    nfft = sfft.next_fast_len(2 * n, real=True)
    ft = sfft.rfft(xc, nfft)
    gamma = sfft.irfft(ft.real ** 2 + ft.imag ** 2, nfft)[: max_lag + 1] / n
    # Lag 0 directly: avoids FFT round-off in the degeneracy test.
    gamma[0] = float(xc @ xc) / n
    if not gamma[0] > 0.0:
        raise DegenerateInputError("series is constant; autocovariance is zero")
    gamma.setflags(write=False)
    return AcfEstimate(gamma=gamma, n=n)


def _check_width(acf: AcfEstimate, m: int) -> int:
    m = int(m)
    if not 1 <= m <= acf.max_lag:
        raise InvalidInputError(f"window width must lie in [1, {acf.max_lag}], got {m}")
    return m


def lag_window_cf(acf: AcfEstimate, m: int) -> float:
    """Bartlett lag-window estimate of f(0)."""
    m = _check_width(acf, m)
    return float(kernels.lag_cosine_sum(acf.gamma, m, np.zeros(1), 0, True)[0])


def spectral_density(acf: AcfEstimate, m: int, omega):
    m = _check_width(acf, m)
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    out = kernels.lag_cosine_sum(acf.gamma, m, np.ascontiguousarray(w), 0, True)
    return float(out[0]) if np.ndim(omega) == 0 else out


def generalized_derivative(acf: AcfEstimate, m: int, omega):
    """Plug-in f^(1)(w) = (1/2pi) sum_{|l|<=m} |l| gamma(l) cos(lw), truncated at m, unweighted."""
    m = _check_width(acf, m)
    w = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    out = kernels.lag_cosine_sum(acf.gamma, m, np.ascontiguousarray(w), 1, False)
    return float(out[0]) if np.ndim(omega) == 0 else out


def generalized_derivative_integrals(acf: AcfEstimate, m: int) -> DerivativeIntegrals:
    """Trapezoid integrals of f^2 and (f^(1))^2 over [0, pi], plus f^(1)(0)."""
    f = spectral_density(acf, m, FREQ_GRID)
    f1 = generalized_derivative(acf, m, FREQ_GRID)
    return DerivativeIntegrals(
        int_f2=float(np.trapezoid(f * f, FREQ_GRID)),
        int_f1_sq=float(np.trapezoid(f1 * f1, FREQ_GRID)),
        f1_zero=float(f1[0]),
    )


def _clamp_width(m: float, upper: int) -> int:
    return int(min(max(math.floor(m), 1), upper))


def select_cf(x, initial_width: int | None = None) -> SpectralEstimate:
    """Estimate c_f = f(0) of a residual series with an iteratively chosen window."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < 20:
        raise InvalidInputError(f"select_cf needs at least 20 observations, got {n}")
    upper = n // 2
    acf = autocovariance(x, upper)
    inflation = n ** (2.0 / 21.0)
    cube_root_n = n ** (1.0 / 3.0)

    m_global = float(upper if initial_width is None else _clamp_width(initial_width, upper))
    converged = False
    iterations = 0
    for iterations in range(1, MAX_GLOBAL_ITER + 1):
        pilot = _clamp_width(m_global / inflation, upper)
        ints = generalized_derivative_integrals(acf, pilot)
        if not ints.int_f2 > 0.0:
            raise DegenerateInputError("estimated spectral density integrates to zero")
        m_new = cube_root_n * (3.0 * ints.int_f1_sq / (2.0 * ints.int_f2)) ** (1.0 / 3.0)
        m_new = min(max(m_new, 1.0), float(upper))
        step = abs(m_new - m_global)
        m_global = m_new
        if step <= 1.0:
            converged = True
            break

    pilot = _clamp_width(m_global / inflation, upper)
    f0 = spectral_density(acf, pilot, 0.0)
    f1 = generalized_derivative(acf, pilot, 0.0)
    fallback = False
    if abs(f1) <= 1e-8 * abs(f0) or not f0 > 0.0:
        warnings.warn("f^(1)(0) is numerically zero; using window width n^(1/3)", RuntimeWarning)
        width = _clamp_width(cube_root_n, upper)
        fallback = True
    else:
        width = _clamp_width(cube_root_n * (3.0 * f1 * f1 / (4.0 * f0 * f0)) ** (1.0 / 3.0), upper)

    c_f = lag_window_cf(acf, width)
    floored = not c_f >= CF_FLOOR
    if floored:
        c_f = CF_FLOOR
    return SpectralEstimate(
        c_f=float(c_f), window_width=width, iterations=iterations, converged=converged,
        global_width=float(m_global), derivative_fallback=fallback, floored=floored,
    )
