"""P-Spline-GARCH: semiparametric volatility with a P-spline scale function.

Returns are modelled as r_t = mu + sqrt(v(tau_t) h_t) eps_t: a smooth
deterministic scale v estimated by penalised splines on log-squared returns,
with the penalty chosen by an iterative plug-in rule, times a unit-variance
GARCH(1,1) conditional variance h_t.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateInputError, InvalidConfigurationError, InvalidInputError, NumericFailure, PsgarchError,
)
from .ipi import IpiConfig, IpiResult, select_lambda  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .pspline import SmootherFit, SplineBasis, build_basis, fit, kqa, lambda_a  # noqa: E402
from .risk import RiskForecast, alpha_star, es_factor, rolling_forecast, traffic_light, var_factor  # noqa: E402
from .semigarch import (  # noqa: E402
    GarchParams, ReturnSeries, SemiGarchFit, fit_semigarch, fit_unit_garch, from_returns, to_returns,
)
from .spectral import SpectralEstimate, select_cf  # noqa: E402

__all__ = [
    "BACKEND", "DegenerateInputError", "GarchParams", "InvalidConfigurationError", "InvalidInputError",
    "IpiConfig", "IpiResult", "NumericFailure", "PsgarchError", "ReturnSeries", "RiskForecast",
    "SemiGarchFit", "SmootherFit", "SpectralEstimate", "SplineBasis", "alpha_star", "build_basis",
    "es_factor", "fit", "fit_semigarch", "fit_unit_garch", "from_returns", "kqa", "lambda_a",
    "rolling_forecast", "select_cf", "select_lambda", "to_returns", "traffic_light", "var_factor",
]
