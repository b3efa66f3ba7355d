"""P-Spline-GARCH: smooth scale from log-squared returns, unit GARCH(1,1) on the rest.

Returns are modelled as r_t = mu + sqrt(v(tau_t) h_t) eps_t. The scale v is
estimated by smoothing y_t = ln((r_t - rbar)^2) with the plug-in-penalised P-spline
and rescaling with C_eps so the standardized returns have unit variance; a
GARCH(1,1) with alpha0 = 1 - alpha1 - beta1 is then fitted by maximum
likelihood to the standardized returns.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from . import kernels
from .errors import DegenerateInputError, InvalidInputError, NumericFailure
from .ipi import IpiConfig, IpiResult, select_lambda
from .pspline import rescaled_times

PERSISTENCE_CAP = 1.0 - 1e-6
MIN_GARCH_OBS = 250
_START_ALPHA = (0.02, 0.05, 0.1, 0.15)
_START_BETA = (0.5, 0.7, 0.8, 0.9)


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    returns: np.ndarray
    mean: float
    centered: np.ndarray
    tau: np.ndarray
    zero_count: int

    @property
    def n(self) -> int:
        return self.returns.size

    @property
    def degenerate(self) -> bool:
        return bool(np.all(self.centered == 0.0))

    def jittered(self) -> np.ndarray:
        """Centered returns with exact zeros replaced by the smallest nonzero |r*|."""
        if self.zero_count == 0:
            return self.centered
        nonzero = np.abs(self.centered[self.centered != 0.0])
        if nonzero.size == 0:
            raise DegenerateInputError("all centered returns are zero")
        out = self.centered.copy()
        out[out == 0.0] = nonzero.min()
        return out


@dataclass(frozen=True, eq=False)
class ScaleFit:
    m_hat: np.ndarray
    c_eps: float
    v_hat: np.ndarray
    lambda_hat: float
    ipi: IpiResult


@dataclass(frozen=True)
class GarchParams:
    alpha1: float
    beta1: float
    dist: str = "normal"
    nu: float | None = None
    loglik: float = float("nan")
    converged: bool = True

    @property
    def alpha0(self) -> float:
        return 1.0 - self.alpha1 - self.beta1

    def __post_init__(self):
        if self.dist not in ("normal", "t"):
            raise InvalidInputError(f"unknown innovation family {self.dist!r}")
        if self.alpha1 < 0 or self.beta1 < 0 or not self.alpha1 + self.beta1 < 1:
            raise InvalidInputError(
                f"need alpha1, beta1 >= 0 and alpha1 + beta1 < 1, got ({self.alpha1}, {self.beta1})"
            )
        if self.dist == "t" and not (self.nu is not None and self.nu > 4):
            raise InvalidInputError(f"student-t innovations need nu > 4, got {self.nu}")


@dataclass(frozen=True, eq=False)
class SemiGarchFit:
    returns: ReturnSeries
    scale: ScaleFit
    garch: GarchParams
    xi: np.ndarray
    h: np.ndarray
    sigma_total: np.ndarray


def _frozen(a):
    a = np.asarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def from_returns(returns) -> ReturnSeries:
    r = np.asarray(returns, dtype=np.float64)
    if r.ndim != 1 or r.size < 1:
        raise InvalidInputError("returns must be a non-empty 1-D series")
    if not np.all(np.isfinite(r)):
        raise InvalidInputError("returns contain non-finite values")
    mean = float(r.mean())
    centered = r - mean
    return ReturnSeries(
        returns=_frozen(r), mean=mean, centered=_frozen(centered),
        tau=_frozen(rescaled_times(r.size)), zero_count=int(np.sum(centered == 0.0)),
    )


def to_returns(prices) -> ReturnSeries:
    """Log returns r_t = ln P_t - ln P_{t-1}, mean removed."""
    prices = np.asarray(prices, dtype=np.float64)
    if prices.ndim != 1 or prices.size < 2:
        raise InvalidInputError("need at least two prices")
    if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
        raise InvalidInputError("prices must be finite and strictly positive")
    return from_returns(np.diff(np.log(prices)))


def log_transform(rs) -> np.ndarray:
    """y_t = ln(r*_t^2)."""
    if isinstance(rs, ReturnSeries):
        centered = rs.jittered()
    else:
        centered = np.asarray(rs, dtype=np.float64)
    if np.any(centered == 0.0):
        raise DegenerateInputError("zero centered return; log transform undefined")
    return np.log(centered * centered)


def estimate_scale(rs: ReturnSeries, config: IpiConfig | None = None) -> ScaleFit:
    y = log_transform(rs)
    result = select_lambda(y, config)
    m_hat = result.fit.fitted
    c_eps = float(np.mean(np.exp(y - m_hat)))
    v_hat = c_eps * np.exp(m_hat)
    return ScaleFit(
        m_hat=m_hat, c_eps=c_eps, v_hat=_frozen(v_hat), lambda_hat=result.lambda_hat, ipi=result,
    )


def garch_filter(params: GarchParams, xi, h_init: float = 1.0) -> np.ndarray:
    """Conditional variances h_t of the unit GARCH(1,1) recursion."""
    xi = np.asarray(xi, dtype=np.float64)
    return kernels.garch11_filter(
        np.ascontiguousarray(xi * xi), params.alpha0, params.alpha1, params.beta1, float(h_init)
    )


# -- maximum likelihood -------------------------------------------------------

def _t_const(nu):
    return special.gammaln(0.5 * (nu + 1)) - special.gammaln(0.5 * nu) - 0.5 * np.log(np.pi * (nu - 2))


def _t_const_grad(nu):
    return 0.5 * special.digamma(0.5 * (nu + 1)) - 0.5 * special.digamma(0.5 * nu) - 0.5 / (nu - 2)


def negative_loglik(xi2, alpha1, beta1, dist="normal", nu=None):
    """Negative log-likelihood and its gradient in (alpha1, beta1, nu)."""
    n = xi2.size
    if dist == "t":
        val, grad = kernels.garch11_nll(xi2, alpha1, beta1, float(nu))
        val -= n * _t_const(nu)
        grad = grad.copy()
        grad[2] -= n * _t_const_grad(nu)
    else:
        val, grad = kernels.garch11_nll(xi2, alpha1, beta1, 0.0)
        val += 0.5 * n * np.log(2 * np.pi)
    return float(val), grad


def _unpack(theta, fixed_nu, estimate_nu):
    u, v = theta[0], theta[1]
    s_u = special.expit(u)
    s_v = special.expit(v)
    rho = PERSISTENCE_CAP * s_u
    alpha, beta = rho * s_v, rho * (1.0 - s_v)
    nu = 4.0 + np.exp(theta[2]) if estimate_nu else fixed_nu
    return alpha, beta, nu, (rho, s_u, s_v)


def _pack(alpha, beta, nu, estimate_nu):
    rho = (alpha + beta) / PERSISTENCE_CAP
    share = alpha / (alpha + beta)
    theta = [special.logit(rho), special.logit(share)]
    if estimate_nu:
        theta.append(np.log(nu - 4.0))
    return np.array(theta)


def fit_unit_garch(xi, dist: str = "normal", nu: float | None = None) -> GarchParams:
    """Maximum likelihood for the unit-variance GARCH(1,1).

    For ``dist="t"`` the degrees of freedom are estimated unless ``nu`` is
    given. Returns ``GarchParams`` with the maximised log-likelihood.
    """
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim != 1 or xi.size < MIN_GARCH_OBS:
        raise InvalidInputError(f"need at least {MIN_GARCH_OBS} standardized returns")
    if not np.all(np.isfinite(xi)):
        raise InvalidInputError("standardized returns contain non-finite values")
    if dist not in ("normal", "t"):
        raise InvalidInputError(f"unknown innovation family {dist!r}")
    if dist == "t" and nu is not None and not nu > 4:
        raise InvalidInputError(f"student-t innovations need nu > 4, got {nu}")
    var = float(np.var(xi))
    if abs(var - 1.0) > 0.1:
        warnings.warn(f"standardized returns have variance {var:.3f}, not ~1", RuntimeWarning)

    xi2 = np.ascontiguousarray(xi * xi)
    estimate_nu = dist == "t" and nu is None
    nu_start = 8.0 if nu is None else float(nu)

    best = None
    for a in _START_ALPHA:
        for b in _START_BETA:
            if a + b >= 0.999:
                continue
            val, _ = negative_loglik(xi2, a, b, dist, nu_start if dist == "t" else None)
            if best is None or val < best[0]:
                best = (val, a, b)
    start_val, a0, b0 = best
    theta0 = _pack(a0, b0, nu_start, estimate_nu)

    def objective(theta):
        alpha, beta, nu_, (rho, s_u, s_v) = _unpack(theta, nu_start, estimate_nu)
        val, g = negative_loglik(xi2, alpha, beta, dist, nu_ if dist == "t" else None)
        # chain rule through alpha = rho s_v, beta = rho (1 - s_v), rho = cap * s_u
        drho_du = PERSISTENCE_CAP * s_u * (1.0 - s_u)
        ds_dv = s_v * (1.0 - s_v)
        grad = [
            (g[0] * s_v + g[1] * (1.0 - s_v)) * drho_du,
            (g[0] - g[1]) * rho * ds_dv,
        ]
        if estimate_nu:
            grad.append(g[2] * (nu_ - 4.0))
        return val, np.array(grad)

    bounds = [(-30.0, 30.0), (-30.0, 30.0)] + ([(np.log(0.01), np.log(1000.0))] if estimate_nu else [])
    with np.errstate(over="ignore"):
        res = optimize.minimize(objective, theta0, jac=True, method="L-BFGS-B", bounds=bounds)
    if not np.isfinite(res.fun) or res.fun > start_val:
        theta, val, ok = theta0, start_val, False
    else:
        theta, val, ok = res.x, float(res.fun), bool(res.success)
    alpha, beta, nu_hat, _ = _unpack(theta, nu_start, estimate_nu)
    params = GarchParams(
        alpha1=float(alpha), beta1=float(beta), dist=dist,
        nu=float(nu_hat) if dist == "t" else None, loglik=-val, converged=ok,
    )
    if not ok:
        # L-BFGS-B may stop on a flat boundary (alpha1 -> 0); accept if the
        # gradient there is small, otherwise report the best point.
        _, g = objective(theta)
        if not np.all(np.isfinite(g)) or np.max(np.abs(g)) > 1e-3 * xi.size:
            raise NumericFailure(f"GARCH likelihood maximisation failed: {res.message}", best=params)
    return params


def fit_semigarch(series, *, prices: bool = False, config: IpiConfig | None = None,
                  dist: str = "normal", nu: float | None = None) -> SemiGarchFit:
    """Full pipeline on a price or return series."""
    rs = to_returns(series) if prices else from_returns(series)
    if rs.degenerate:
        raise DegenerateInputError("returns are constant")
    scale = estimate_scale(rs, config)
    xi = rs.centered / np.sqrt(scale.v_hat)
    garch = fit_unit_garch(xi, dist, nu)
    h = garch_filter(garch, xi)
    return SemiGarchFit(
        returns=rs, scale=scale, garch=garch, xi=_frozen(xi), h=_frozen(h),
        sigma_total=_frozen(np.sqrt(scale.v_hat * h)),
    )
