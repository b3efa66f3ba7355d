"""Truncated-polynomial P-spline smoother on an equidistant time design.

The smoother is

    m_hat = T (T'T + lam^(2p) D)^+ T' y

with T = [1, tau, ..., tau^p, (tau - x_1)_+^p, ..., (tau - x_K)_+^p] and
D = diag(0, ..., 0, 1, ..., 1). Internally the spline columns are
orthogonalised against the polynomial block and diagonalised once per
basis, so a fit at any ``lam`` costs O(nK) and the traces of S and S^2 are
available in closed form.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import numkernel
from .errors import DegenerateInputError, InvalidConfigurationError, InvalidInputError

# Relative cutoff for the generalized inverse of T'T used by lambda_a. The Gram
# matrix of the truncated power basis is near singular (condition ~1e14 at
# K = 40) and the plug-in formula is only meaningful once its tiny singular
# directions are dropped; sqrt(machine eps) is the customary ginv default.
GRAM_PINV_TOL = float(np.sqrt(np.finfo(np.float64).eps))
# Rank cutoff for the smoother's own decomposition (kept tight: exact fits).
FIT_RANK_TOL = 1e-12


def _frozen(a):
    a = np.asarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SplineBasis:
    n: int
    p: int
    K: int
    tau: np.ndarray
    knots: np.ndarray
    design: np.ndarray
    penalty_mask: np.ndarray
    gram_pinv: np.ndarray
    pinv_tol: float
    # Orthonormal basis of the polynomial columns and its triangular factor.
    _q_poly: np.ndarray = field(repr=False)
    _r_poly: np.ndarray = field(repr=False)
    # SVD of the spline columns after removing their polynomial part.
    _u: np.ndarray = field(repr=False)
    _s: np.ndarray = field(repr=False)
    _vt: np.ndarray = field(repr=False)
    _rank: int = field(repr=False)
    # tr[(T'T)^+ D] and tr{[(T'T)^+ D]^2}
    _tr_gd: float = field(repr=False)
    _tr_gd2: float = field(repr=False)

    @property
    def n_coef(self) -> int:
        return self.p + 1 + self.K

    @property
    def delta(self) -> float:
        """Knot spacing 1/(K+1)."""
        return 1.0 / (self.K + 1)


@dataclass(frozen=True, eq=False)
class SmootherFit:
    lam: float
    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    trace_s: float
    trace_s2: float


def rescaled_times(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def design_matrix(tau, knots, p: int) -> np.ndarray:
    tau = np.asarray(tau, dtype=np.float64)
    poly = tau[:, None] ** np.arange(p + 1)
    trunc = np.maximum(0.0, tau[:, None] - np.asarray(knots)[None, :]) ** p
    return np.hstack([poly, trunc])


def build_basis(n: int, p: int = 3, K: int = 40, pinv_tol: float = GRAM_PINV_TOL) -> SplineBasis:
    if p < 1 or K < 1:
        raise InvalidConfigurationError(f"need p >= 1 and K >= 1, got p={p}, K={K}")
    if n < 2 * (p + 1 + K):
        raise InvalidConfigurationError(
            f"n={n} too small for p={p}, K={K}; need n >= {2 * (p + 1 + K)}"
        )
    tau = rescaled_times(n)
    knots = np.arange(1, K + 1) / (K + 1)
    design = design_matrix(tau, knots, p)
    mask = np.r_[np.zeros(p + 1), np.ones(K)]

    gram_pinv = numkernel.pseudo_inverse(design.T @ design, tol=pinv_tol)
    gd = gram_pinv * mask[None, :]
    tr_gd = float(np.trace(gd))
    tr_gd2 = float(np.sum(gd * gd.T))

    q, r = np.linalg.qr(design[:, : p + 1])
    z = design[:, p + 1 :]
    z_perp = z - q @ (q.T @ z)
    u, s, vt = np.linalg.svd(z_perp, full_matrices=False)
    rank = int(np.sum(s > FIT_RANK_TOL * s[0])) if s[0] > 0 else 0

    return SplineBasis(
        n=n, p=p, K=K, tau=_frozen(tau), knots=_frozen(knots), design=_frozen(design),
        penalty_mask=_frozen(mask), gram_pinv=_frozen(gram_pinv), pinv_tol=pinv_tol,
        _q_poly=_frozen(q), _r_poly=_frozen(r), _u=_frozen(u), _s=_frozen(s),
        _vt=_frozen(vt), _rank=rank, _tr_gd=tr_gd, _tr_gd2=tr_gd2,
    )


@functools.lru_cache(maxsize=64)
def cached_basis(n: int, p: int = 3, K: int = 40, pinv_tol: float = GRAM_PINV_TOL) -> SplineBasis:
    """``build_basis`` memoised on its arguments; bases are immutable."""
    return build_basis(n, p, K, pinv_tol)


def _check_series(basis: SplineBasis, y, name="y") -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (basis.n,):
        raise InvalidInputError(f"{name} must have shape ({basis.n},), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return y


def _shrinkage(basis: SplineBasis, lam: float) -> np.ndarray:
    if not (lam >= 0 and np.isfinite(lam)):
        raise InvalidInputError(f"lambda must be finite and >= 0, got {lam}")
    s2 = basis._s[: basis._rank] ** 2
    return s2 / (s2 + lam ** (2 * basis.p))


def fit(basis: SplineBasis, y, lam: float) -> SmootherFit:
    y = _check_series(basis, y)
    shrink = _shrinkage(basis, lam)
    r = basis._rank
    q, u = basis._q_poly, basis._u[:, :r]
    qy = q.T @ y
    uy = u.T @ y
    spline_part = u @ (shrink * uy)
    fitted = q @ qy + spline_part

    # Spline coefficients b = V diag(s/(s^2+lam*)) U'y, then the polynomial
    # coefficients solve P a = H_P (y - Z b).
    b = basis._vt[:r].T @ (shrink / basis._s[:r] * uy)
    z = basis.design[:, basis.p + 1 :]
    a = np.linalg.solve(basis._r_poly, q.T @ (y - z @ b))
    coef = np.r_[a, b]

    trace_s = basis.p + 1 + float(np.sum(shrink))
    trace_s2 = basis.p + 1 + float(np.sum(shrink * shrink))
    return SmootherFit(
        lam=float(lam), coefficients=_frozen(coef), fitted=_frozen(fitted),
        residuals=_frozen(y - fitted), trace_s=trace_s, trace_s2=trace_s2,
    )


def smoother_matrix(basis: SplineBasis, lam: float) -> np.ndarray:
    """Dense n x n smoother matrix S_lam (for inspection and testing)."""
    shrink = _shrinkage(basis, lam)
    u = basis._u[:, : basis._rank]
    return basis._q_poly @ basis._q_poly.T + (u * shrink) @ u.T


def bias_component(basis: SplineBasis, m, lam: float) -> float:
    """Average squared bias (1/n) ||(S_lam - I) m||^2."""
    m = _check_series(basis, m, "m")
    resid = fit(basis, m, lam).residuals
    return float(resid @ resid) / basis.n


def variance_component(basis: SplineBasis, lam: float, c_f: float) -> float:
    """Variance approximation 2 pi c_f tr(S_lam^2) / n."""
    if not c_f > 0:
        raise InvalidInputError(f"c_f must be positive, got {c_f}")
    shrink = _shrinkage(basis, lam)
    trace_s2 = basis.p + 1 + float(np.sum(shrink * shrink))
    return 2.0 * np.pi * c_f * trace_s2 / basis.n


def curvature_vector(basis: SplineBasis, m) -> np.ndarray:
    """T (T'T)^+ D (T'T)^+ T' m.

    The polynomial part of m is removed first. The penalty annihilates it in
    exact arithmetic, but the truncated inverse leaks a little of it, which
    would break invariance under m -> m + const.
    """
    q = basis._q_poly
    m = m - q @ (q.T @ m)
    g = basis.gram_pinv
    t = basis.design
    inner = basis.penalty_mask * (g @ (t.T @ m))
    return t @ (g @ inner)


def lambda_a(basis: SplineBasis, m_hat, c_f: float, squared_norm_denominator: bool = False) -> float:
    """Plug-in approximation of the MASE-optimal penalty parameter.

    With ``squared_norm_denominator`` the curvature term enters as a squared
    norm; otherwise as the plain Euclidean norm.
    """
    m_hat = _check_series(basis, m_hat, "m_hat")
    if not c_f > 0:
        raise InvalidInputError(f"c_f must be positive, got {c_f}")
    norm = float(np.linalg.norm(curvature_vector(basis, m_hat)))
    if squared_norm_denominator:
        norm = norm * norm
    scale = 2.0 * np.pi * c_f
    num = scale * basis._tr_gd
    den = norm + scale * basis._tr_gd2
    if not (den > 0 and num > 0 and np.isfinite(num / den)):
        raise DegenerateInputError(f"lambda_A undefined: numerator {num}, denominator {den}")
    return float((num / den) ** (1.0 / (2 * basis.p)))


def kqa(K: int, lam: float, p: int, n: int) -> float:
    """Large-knot indicator K_{q,A}; values above 1 mean many-knot asymptotics apply."""
    if K <= 0 or lam <= 0 or p <= 0 or n <= 0:
        raise InvalidInputError("kqa arguments must all be positive")
    q = p + 1
    lam_star = lam ** (2 * p)
    return K * (lam_star * np.pi ** (2 * q)) ** (1.0 / (2 * q)) * n ** (-1.0 / (2 * q))
