"""psgarch command-line interface.

Subcommands
    smooth     P-spline smoothing with iterative plug-in penalty selection
    fit        full P-Spline-GARCH fit on prices or returns
    forecast   fit without the last ``--horizon`` returns, then rolling VaR/ES
    simulate   Monte-Carlo comparison of constant-scale and P-spline volatility

Exit codes: 0 success, 2 input or configuration error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io, kernels, risk, simulation
from .errors import (
    DegenerateInputError, InvalidConfigurationError, InvalidInputError, NumericFailure, PsgarchError,
)
from .ipi import IpiConfig, select_lambda
from .pspline import rescaled_times
from .semigarch import fit_semigarch

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("psgarch")


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _level(s):
    v = float(s)
    if not 0.5 <= v < 1:
        raise argparse.ArgumentTypeError(f"confidence level must lie in [0.5, 1), got {s}")
    return v


def _add_common(p: argparse.ArgumentParser, data=True):
    if data:
        p.add_argument("--input", required=True, type=Path, help="headed CSV file")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--price-col", help="column of prices (log returns are taken)")
        src.add_argument("--return-col", help="column of returns")
        p.add_argument("--date-col", help="ISO-8601 date column (default: a column named 'date' if present)")
    p.add_argument("--p", type=_positive_int, default=3, help="spline degree (default 3)")
    p.add_argument("--knots", type=_positive_int, default=None, help="number of knots K (default min(n/4, 40))")
    p.add_argument("--lambda0", type=float, default=0.2, help="initial penalty (default 0.2)")
    p.add_argument("--tol", type=float, default=None, help="penalty convergence threshold (default 1/n)")
    p.add_argument("--max-iter", type=_positive_int, default=20)
    norm = p.add_mutually_exclusive_group()
    norm.add_argument("--squared-norm-denominator", dest="squared", action="store_true", default=True,
                      help="curvature term as squared norm in the plug-in rule (default)")
    norm.add_argument("--plain-norm-denominator", dest="squared", action="store_false",
                      help="curvature term as plain Euclidean norm")
    p.add_argument("--dist", choices=("normal", "t"), default="normal", help="innovation family")
    p.add_argument("--nu", type=float, default=None, help="t degrees of freedom (estimated if omitted)")
    p.add_argument("--alpha", type=_level, nargs="+", default=[0.99, 0.975], help="VaR/ES levels")
    p.add_argument("--horizon", type=_positive_int, default=250, help="hold-out length for forecast")
    p.add_argument("--seed", type=int, default=20240101)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory (created if missing)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psgarch", description="P-Spline-GARCH volatility modelling")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({kernels.BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sm = sub.add_parser("smooth", help="smooth a series, or the log-squared returns")
    _add_common(sm, data=False)
    sm.add_argument("--input", required=True, type=Path)
    src = sm.add_mutually_exclusive_group(required=True)
    src.add_argument("--series-col", help="smooth this column as is")
    src.add_argument("--price-col", help="smooth log-squared centered returns of these prices")
    src.add_argument("--return-col", help="smooth log-squared centered returns")
    sm.add_argument("--date-col")

    for name, text in (("fit", "fit the P-Spline-GARCH model"),
                       ("forecast", "hold out the last --horizon returns and backtest VaR/ES")):
        _add_common(sub.add_parser(name, help=text))

    si = sub.add_parser("simulate", help="Monte-Carlo study of CS vs P-spline volatility")
    _add_common(si, data=False)
    si.add_argument("--n", type=_positive_int, default=2000, help="sample size (default 2000)")
    si.add_argument("--replications", type=_positive_int, default=100)
    si.add_argument("--garch", type=float, nargs=2, default=(0.08, 0.87), metavar=("ALPHA1", "BETA1"))
    si.add_argument("--amplitude", type=float, default=0.8, help="sine scale amplitude a in (1 + a sin 2 pi tau)^2")
    si.add_argument("--scale-csv", type=Path, help="use column v_hat of a fit_scale.csv as the true scale")
    si.add_argument("--knot-grid", type=_positive_int, nargs="+", default=list(simulation.DEFAULT_KNOT_GRID))
    return parser


def _ipi_config(args) -> IpiConfig:
    if not args.lambda0 > 0:
        raise InvalidConfigurationError("--lambda0 must be positive")
    if args.tol is not None and not args.tol > 0:
        raise InvalidConfigurationError("--tol must be positive")
    return IpiConfig(p=args.p, K=args.knots, lambda0=args.lambda0, max_iter=args.max_iter,
                     tol=args.tol, squared_norm_denominator=args.squared)


def _check_dist(args):
    if args.dist == "normal" and args.nu is not None:
        raise InvalidConfigurationError("--nu only applies with --dist t")
    if args.nu is not None and not args.nu > 4:
        raise InvalidConfigurationError("--nu must exceed 4")


def _load(args):
    col = args.price_col or args.return_col
    series = io.read_series(args.input, col, args.date_col)
    dates = series.dates
    values = series.values
    if args.price_col:
        if np.any(values <= 0):
            raise InvalidInputError("prices must be strictly positive")
        returns = np.diff(np.log(values))
        dates = dates[1:] if dates else None
    else:
        returns = values
    return returns, dates


def _ipi_summary(res) -> dict:
    return {
        "lambda_hat": res.lambda_hat,
        "iterations": res.iterations,
        "converged": res.converged,
        "c_f": res.spectral.c_f,
        "c_f_floored": res.cf_floored,
        "window_width": res.spectral.window_width,
        "K": res.config.K,
        "p": res.config.p,
        "lambda0": res.config.lambda0,
        "tol": res.config.tol,
        "squared_norm_denominator": res.config.squared_norm_denominator,
        "trace_s": res.fit.trace_s,
        "iteration_log": [
            {"iteration": i, "lambda_in": lam_in, "c_f": cf, "lambda_out": lam_out, "kqa": kq}
            for i, (lam_in, cf, lam_out, kq) in enumerate(
                zip(res.lambda_trace[:-1], res.cf_trace, res.lambda_trace[1:], res.kqa_trace[1:]), start=1
            )
        ],
        "kqa_trace": list(res.kqa_trace),
    }


def _index_columns(n, dates):
    cols = {"t": np.arange(1, n + 1)}
    if dates:
        cols["date"] = list(dates)
    cols["tau"] = rescaled_times(n)
    return cols


def cmd_smooth(args) -> dict:
    cfg = _ipi_config(args)
    if args.series_col:
        series = io.read_series(args.input, args.series_col, args.date_col)
        y, dates, kind = series.values, series.dates, "series"
    else:
        from .semigarch import from_returns, log_transform
        returns, dates = _load(args)
        y, kind = log_transform(from_returns(returns)), "log_squared_returns"
    res = select_lambda(y, cfg)
    summary = {"command": "smooth", "input": str(args.input), "target": kind, "n": y.size, **_ipi_summary(res)}
    cols = _index_columns(y.size, dates)
    cols.update(y=y, m_hat=res.fit.fitted, residual=res.fit.residuals)
    io.write_csv(args.out_dir / "smooth_curve.csv", cols)
    return {"smooth.json": summary}


def _fit(args, returns):
    _check_dist(args)
    return fit_semigarch(returns, config=_ipi_config(args), dist=args.dist, nu=args.nu)


def _fit_summary(fit) -> dict:
    g = fit.garch
    return {
        "n": fit.returns.n,
        "mean_return": fit.returns.mean,
        "zero_returns": fit.returns.zero_count,
        "c_eps": fit.scale.c_eps,
        "scale": _ipi_summary(fit.scale.ipi),
        "garch": {"alpha0": g.alpha0, "alpha1": g.alpha1, "beta1": g.beta1, "dist": g.dist,
                  "nu": g.nu, "loglik": g.loglik, "converged": g.converged},
    }


def cmd_fit(args) -> dict:
    returns, dates = _load(args)
    fit = _fit(args, returns)
    scale = np.sqrt(fit.scale.v_hat)
    cols = _index_columns(fit.returns.n, dates)
    cols.update(
        ret=fit.returns.returns, scale=scale,
        band_lower=fit.returns.mean - scale, band_upper=fit.returns.mean + scale,
        v_hat=fit.scale.v_hat, h=fit.h, sigma=fit.sigma_total,
    )
    io.write_csv(args.out_dir / "fit_scale.csv", cols)
    return {"fit.json": {"command": "fit", "input": str(args.input), **_fit_summary(fit)}}


def cmd_forecast(args) -> dict:
    returns, dates = _load(args)
    H = args.horizon
    if returns.size - H < _min_fit_length(args):
        raise InvalidInputError(
            f"{returns.size} returns leave {returns.size - H} for fitting after holding out {H}"
        )
    fit = _fit(args, returns[:-H])
    future = returns[-H:]
    cols = {"t": np.arange(returns.size - H + 1, returns.size + 1)}
    if dates:
        cols["date"] = list(dates[-H:])
    cols["loss"] = -future
    levels = {}
    for a in args.alpha:
        fc = risk.rolling_forecast(fit, future, a)
        if np.any(fc.es_path < fc.var_path):
            raise NumericFailure(f"ES below VaR at level {a}")
        tag = f"{a:g}"
        cols[f"var_{tag}"] = fc.var_path
        cols[f"es_{tag}"] = fc.es_path
        levels[tag] = {
            "alpha": a, "pot_var": fc.pot_var, "pot_es": fc.pot_es, "zone": fc.zone,
            "expected_pot": (1 - a) * H,
            "alpha_star": risk.alpha_star(fit.garch.nu, a) if fit.garch.dist == "t" else None,
            "mean_var": float(fc.var_path.mean()), "mean_es": float(fc.es_path.mean()),
        }
    cols["h"] = fc.h_path
    io.write_csv(args.out_dir / "forecast.csv", cols)
    summary = {"command": "forecast", "input": str(args.input), "horizon": H,
               "fit": _fit_summary(fit), "levels": levels}
    return {"forecast.json": summary}


def _min_fit_length(args) -> int:
    p = args.p
    K = args.knots or 40
    return max(250, 2 * (p + 1 + K))


def cmd_simulate(args) -> dict:
    a1, b1 = args.garch
    if args.scale_csv is not None:
        scale_fn = simulation.tabulated_scale(io.read_series(args.scale_csv, "v_hat").values)
        name = f"tabulated({args.scale_csv.name})"
    else:
        scale_fn = simulation.sine_scale(args.amplitude)
        name = f"sine(a={args.amplitude:g})"
    design = simulation.SimDesign(
        scale_fn=scale_fn, alpha1=a1, beta1=b1, n=args.n, replications=args.replications,
        seed=args.seed, knot_grid=tuple(args.knot_grid), p=args.p, lambda0=args.lambda0,
        squared_norm_denominator=args.squared, name=name,
    )
    started = time.perf_counter()
    report = simulation.run_study(design, threads=args.threads)
    log.info("study finished in %.1f s", time.perf_counter() - started)

    rows = [{"method": r.method, "K": r.K, "M_x1e4": r.maae * 1e4, "R_pct": r.rmaae,
             "mean_lambda": r.mean_lambda} for r in report.rows]
    io.write_csv(args.out_dir / "simulate_table.csv", {
        "method": [r["method"] for r in rows],
        "K": ["" if r["K"] is None else r["K"] for r in rows],
        "M_x1e4": [r["M_x1e4"] for r in rows],
        "R_pct": [r["R_pct"] for r in rows],
        "mean_lambda": [r["mean_lambda"] for r in rows],
    })
    aae = {"replication": np.arange(len(report.aae["CS"]))}
    aae.update({("CS" if m == "CS" else f"PC_K{m}"): v for m, v in report.aae.items()})
    io.write_csv(args.out_dir / "simulate_aae.csv", aae)
    summary = {
        "command": "simulate", "design": name, "n": design.n, "replications": design.replications,
        "garch": [a1, b1], "seed": design.seed, "failures": report.failures,
        "m_cs": report.m_cs, "rows": rows,
    }
    return {"simulate.json": summary}


COMMANDS = {"smooth": cmd_smooth, "fit": cmd_fit, "forecast": cmd_forecast, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        outputs = COMMANDS[args.command](args)
        for fname, payload in outputs.items():
            io.write_json(args.out_dir / fname, payload)
            log.info("wrote %s", args.out_dir / fname)
    except NumericFailure as exc:
        print(f"psgarch: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidInputError, InvalidConfigurationError, DegenerateInputError, OSError) as exc:
        print(f"psgarch: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PsgarchError as exc:
        print(f"psgarch: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
