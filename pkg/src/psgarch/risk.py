"""One-day VaR / ES forecasts from a fitted Semi-GARCH model.

Losses are negative returns. VaR and ES are reported as positive loss
levels: VaR_a(n+k) = -rbar + sqrt(v(tau_n) h_{n+k}) q_a, with q_a the
a-quantile of the unit-variance innovation law, and analogously for ES.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import kernels
from .errors import InvalidConfigurationError, InvalidInputError
from .semigarch import SemiGarchFit

TRAFFIC_LIGHT_HORIZON = 250
# (green upper, yellow upper) exceedance counts over 250 days
_ZONES = {0.99: (4, 9), 0.975: (10, 17)}


@dataclass(frozen=True, eq=False)
class RiskForecast:
    horizon: int
    alpha: float
    dist: str
    var_path: np.ndarray
    es_path: np.ndarray
    h_path: np.ndarray
    losses: np.ndarray
    pot_var: int
    pot_es: int
    zone: str | None


def _check_level(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"confidence level must lie in (0, 1), got {alpha}")


def _check_nu(nu, lower=2.0):
    if nu is None or not nu > lower:
        raise InvalidInputError(f"degrees of freedom must exceed {lower:g}, got {nu}")


def t_es_factor(nu: float, alpha: float) -> float:
    """ES at level alpha of the t distribution rescaled to unit variance."""
    _check_nu(nu)
    _check_level(alpha)
    q = special.stdtrit(nu, alpha)
    dens = math.exp(
        special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2)
        - 0.5 * math.log(nu * math.pi) - (nu + 1) / 2 * math.log1p(q * q / nu)
    )
    return dens / (1 - alpha) * (nu + q * q) / (nu - 1) * math.sqrt((nu - 2) / nu)


def normal_es_factor(alpha: float) -> float:
    _check_level(alpha)
    z = special.ndtri(alpha)
    return math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi) / (1 - alpha)


def var_factor(dist: str, nu: float | None, alpha: float) -> float:
    """alpha-quantile of the unit-variance innovation distribution."""
    _check_level(alpha)
    if dist == "normal":
        return float(special.ndtri(alpha))
    if dist == "t":
        _check_nu(nu)
        return float(special.stdtrit(nu, alpha) * math.sqrt((nu - 2) / nu))
    raise InvalidInputError(f"unknown innovation family {dist!r}")


def es_factor(dist: str, nu: float | None, alpha: float) -> float:
    if dist == "normal":
        return normal_es_factor(alpha)
    if dist == "t":
        return t_es_factor(nu, alpha)
    raise InvalidInputError(f"unknown innovation family {dist!r}")


def alpha_star(nu: float, alpha: float) -> float:
    """VaR level whose quantile equals the alpha-ES of the unit-variance t."""
    es = t_es_factor(nu, alpha)
    return float(special.stdtr(nu, es * math.sqrt(nu / (nu - 2))))


def traffic_light(pot: int, alpha: float, horizon: int = TRAFFIC_LIGHT_HORIZON) -> str:
    if horizon != TRAFFIC_LIGHT_HORIZON:
        raise InvalidConfigurationError(f"traffic-light zones are defined for 250 days only, got {horizon}")
    level = min(_ZONES, key=lambda a: abs(a - alpha))
    if abs(level - alpha) > 1e-9:
        raise InvalidConfigurationError(f"no traffic-light zones for alpha={alpha}")
    if pot < 0:
        raise InvalidInputError("exceedance count cannot be negative")
    green, yellow = _ZONES[level]
    if pot <= green:
        return "green"
    return "yellow" if pot <= yellow else "red"


def rolling_forecast(fit: SemiGarchFit, future_returns, alpha: float) -> RiskForecast:
    """One-step-ahead VaR/ES over the hold-out period.

    The scale is frozen at its last in-sample value v(tau_n); h_{n+k} uses
    information through n+k-1 only.
    """
    future = np.asarray(future_returns, dtype=np.float64)
    if future.ndim != 1 or future.size == 0:
        raise InvalidInputError("future returns must be a non-empty 1-D series")
    if not np.all(np.isfinite(future)):
        raise InvalidInputError("future returns contain non-finite values")
    _check_level(alpha)
    params = fit.garch
    rbar = fit.returns.mean
    v_last = float(fit.scale.v_hat[-1])
    xi_out = (future - rbar) / math.sqrt(v_last)

    # h_{n+1} from (xi_n, h_n); the filter then feeds on the descaled hold-out
    # returns, so h_{n+k} only sees returns up to n+k-1.
    h_next = params.alpha0 + params.alpha1 * fit.xi[-1] ** 2 + params.beta1 * fit.h[-1]
    h = kernels.garch11_filter(
        np.ascontiguousarray(xi_out * xi_out), params.alpha0, params.alpha1, params.beta1, h_next
    )
    sigma = np.sqrt(v_last * h)
    var_path = -rbar + sigma * var_factor(params.dist, params.nu, alpha)
    es_path = -rbar + sigma * es_factor(params.dist, params.nu, alpha)
    losses = -future
    pot_var = int(np.sum(losses > var_path))
    zone = None
    if future.size == TRAFFIC_LIGHT_HORIZON and any(abs(alpha - a) < 1e-9 for a in _ZONES):
        zone = traffic_light(pot_var, alpha)
    return RiskForecast(
        horizon=future.size, alpha=alpha, dist=params.dist, var_path=var_path, es_path=es_path,
        h_path=h, losses=losses, pot_var=pot_var, pot_es=int(np.sum(losses > es_path)), zone=zone,
    )
