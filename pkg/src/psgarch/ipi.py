"""Iterative plug-in selection of the P-spline penalty parameter."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import pspline, spectral
from .errors import DegenerateInputError, InvalidInputError


@dataclass(frozen=True)
class IpiConfig:
    """Settings for ``select_lambda``.

    ``K=None`` means min(n // 4, 40) and ``tol=None`` means 1/n, both
    resolved against the series length at call time.
    """

    p: int = 3
    K: int | None = None
    lambda0: float = 0.2
    max_iter: int = 20
    tol: float | None = None
    squared_norm_denominator: bool = True
    pinv_tol: float = pspline.GRAM_PINV_TOL

    def resolve(self, n: int) -> "IpiConfig":
        K = min(n // 4, 40) if self.K is None else self.K
        tol = 1.0 / n if self.tol is None else self.tol
        return replace(self, K=K, tol=tol)


@dataclass(frozen=True, eq=False)
class IpiResult:
    lambda_hat: float
    iterations: int
    converged: bool
    fit: pspline.SmootherFit
    spectral: spectral.SpectralEstimate
    kqa_trace: tuple
    lambda_trace: tuple
    cf_trace: tuple
    config: IpiConfig
    cf_floored: bool = False


def select_lambda(y, config: IpiConfig | None = None, basis: pspline.SplineBasis | None = None) -> IpiResult:
    """Alternate fit -> residual c_f -> lambda_A until the penalty settles.

    Stops when |lambda_i - lambda_{i-1}| < tol or after ``max_iter`` passes;
    the last lambda is returned either way, with ``converged`` telling which.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    cfg = (config or IpiConfig()).resolve(n)
    if y.ndim != 1 or not np.all(np.isfinite(y)):
        raise InvalidInputError("y must be a finite 1-D series")
    if np.ptp(y) == 0.0:
        raise DegenerateInputError("y is constant")
    if basis is None:
        basis = pspline.cached_basis(n, cfg.p, cfg.K, cfg.pinv_tol)
    elif (basis.n, basis.p, basis.K) != (n, cfg.p, cfg.K):
        raise InvalidInputError("basis does not match the series length / configuration")

    lam_prev = float(cfg.lambda0)
    lambdas = [lam_prev]
    kqas = [pspline.kqa(cfg.K, lam_prev, cfg.p, n)]
    cfs = []
    floored = False
    converged = False
    iteration = 0
    est = None
    for iteration in range(1, cfg.max_iter + 1):
        current = pspline.fit(basis, y, lam_prev)
        est = spectral.select_cf(current.residuals)
        floored = floored or est.floored
        cfs.append(est.c_f)
        lam = pspline.lambda_a(basis, current.fitted, est.c_f, cfg.squared_norm_denominator)
        lambdas.append(lam)
        kqas.append(pspline.kqa(cfg.K, lam, cfg.p, n))
        if abs(lam - lam_prev) < cfg.tol:
            converged = True
            lam_prev = lam
            break
        lam_prev = lam

    if min(kqas) <= 1.0:
        warnings.warn(
            f"K_qA fell to {min(kqas):.3f} <= 1; the many-knot regime does not hold",
            RuntimeWarning,
        )
    return IpiResult(
        lambda_hat=lam_prev, iterations=iteration, converged=converged,
        fit=pspline.fit(basis, y, lam_prev), spectral=est,
        kqa_trace=tuple(kqas), lambda_trace=tuple(lambdas), cf_trace=tuple(cfs),
        config=cfg, cf_floored=floored,
    )
