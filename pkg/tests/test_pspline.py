import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from psgarch import pspline
from psgarch.errors import InvalidConfigurationError, InvalidInputError


def poly_samples(tau, coefs):
    return sum(c * tau ** j for j, c in enumerate(coefs))


# -- basis --------------------------------------------------------------------

def test_small_basis_layout():
    b = pspline.build_basis(10, p=1, K=2)
    np.testing.assert_allclose(b.knots, [1 / 3, 2 / 3])
    assert b.design.shape == (10, 4)
    np.testing.assert_allclose(b.tau, (np.arange(1, 11) - 0.5) / 10)
    np.testing.assert_array_equal(b.penalty_mask, [0, 0, 1, 1])
    assert b.delta == pytest.approx(1 / 3)


def test_default_size_basis():
    b = pspline.build_basis(7641, p=3, K=40)
    assert b.design.shape == (7641, 44)
    assert b.penalty_mask.sum() == 40


@pytest.mark.parametrize("n,p,K", [(10, 1, 2), (200, 3, 10), (500, 2, 20)])
def test_design_columns(n, p, K):
    b = pspline.build_basis(n, p, K)
    np.testing.assert_array_equal(b.design[:, 0], 1.0)
    assert b.design[0, p + K] == 0.0
    for j in range(p + 1):
        np.testing.assert_allclose(b.design[:, j], b.tau ** j)
    for i, x in enumerate(b.knots):
        np.testing.assert_allclose(b.design[:, p + 1 + i], np.maximum(0, b.tau - x) ** p)
    assert np.all(np.diff(b.tau) > 0) and 0 < b.tau[0] and b.tau[-1] < 1


@pytest.mark.parametrize("n,p,K", [(7, 1, 2), (10, 0, 2), (50, 3, 0), (87, 3, 40)])
def test_basis_rejects_bad_configuration(n, p, K):
    with pytest.raises(InvalidConfigurationError):
        pspline.build_basis(n, p, K)


def test_basis_is_immutable():
    b = pspline.build_basis(100, 3, 5)
    with pytest.raises(ValueError):
        b.design[0, 0] = 2.0
    with pytest.raises(AttributeError):
        b.n = 3


# -- fit ----------------------------------------------------------------------

@pytest.mark.parametrize("lam", [0.0, 0.3, 5.0, 1e3])
def test_polynomial_reproduced(lam):
    b = pspline.build_basis(300, 3, 20)
    y = poly_samples(b.tau, [1.0, -2.0, 3.0, 4.0])
    np.testing.assert_allclose(pspline.fit(b, y, lam).fitted, y, atol=1e-8)


def test_zero_penalty_reproduces_column_span():
    b = pspline.build_basis(120, 3, 8)
    coef = np.random.default_rng(0).standard_normal(b.n_coef)
    y = b.design @ coef
    fit = pspline.fit(b, y, 0.0)
    np.testing.assert_allclose(fit.fitted, y, atol=1e-8)
    np.testing.assert_allclose(fit.coefficients, coef, rtol=1e-6, atol=1e-6)


def test_fit_matches_dense_oracle_example():
    n, p, K, lam = 50, 2, 5, 0.5
    b = pspline.build_basis(n, p, K)
    y = np.random.default_rng(11).standard_normal(n)
    S = O.smoother(O.design(n, p, K), p, K, lam)
    ref = np.array([float(v) for v in O.fitted(S, y)])
    fit = pspline.fit(b, y, lam)
    np.testing.assert_allclose(fit.fitted, ref, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(b.design @ fit.coefficients, fit.fitted, atol=1e-10)
    assert fit.trace_s == pytest.approx(float(O.trace(S)), rel=1e-10)


def test_fit_invariants():
    b = pspline.build_basis(400, 3, 15)
    y = np.random.default_rng(2).standard_normal(400)
    fit = pspline.fit(b, y, 0.4)
    np.testing.assert_allclose(fit.fitted + fit.residuals, y, rtol=0, atol=1e-14)
    assert 0 <= fit.trace_s2 <= fit.trace_s <= b.n_coef


def test_trace_shrinks_with_lambda():
    b = pspline.build_basis(300, 3, 20)
    traces = [pspline.fit(b, np.zeros(300), lam).trace_s for lam in np.arange(0, 5.01, 0.1)]
    assert np.all(np.diff(traces) <= 1e-12)


def test_large_lambda_tends_to_polynomial_regression():
    b = pspline.build_basis(300, 3, 20)
    y = np.sin(6 * b.tau) + np.random.default_rng(3).standard_normal(300) * 0.1
    poly = b.design[:, :4]
    ols = poly @ np.linalg.lstsq(poly, y, rcond=None)[0]
    np.testing.assert_allclose(pspline.fit(b, y, 1e6).fitted, ols, atol=1e-4)


def test_constant_shift_equivariance():
    b = pspline.build_basis(250, 3, 12)
    y = np.random.default_rng(4).standard_normal(250)
    np.testing.assert_allclose(pspline.fit(b, y + 7.5, 0.3).fitted, pspline.fit(b, y, 0.3).fitted + 7.5, atol=1e-9)


def test_smoother_matrix_symmetric_and_consistent():
    b = pspline.build_basis(200, 3, 10)
    S = pspline.smoother_matrix(b, 0.25)
    assert np.linalg.norm(S - S.T) < 1e-10
    fit = pspline.fit(b, np.cos(3 * b.tau), 0.25)
    np.testing.assert_allclose(S @ np.cos(3 * b.tau), fit.fitted, atol=1e-10)
    assert np.trace(S) == pytest.approx(fit.trace_s, rel=1e-10)
    assert np.sum(S * S) == pytest.approx(fit.trace_s2, rel=1e-10)


def test_concurrent_fits_on_shared_basis():
    from concurrent.futures import ThreadPoolExecutor

    b = pspline.build_basis(1000, 3, 40)
    ys = np.random.default_rng(9).standard_normal((8, 1000))
    serial = [pspline.fit(b, y, 0.2).fitted for y in ys]
    with ThreadPoolExecutor(4) as pool:
        threaded = list(pool.map(lambda y: pspline.fit(b, y, 0.2).fitted, ys))
    for a, c in zip(serial, threaded):
        np.testing.assert_array_equal(a, c)


@pytest.mark.parametrize("bad", [np.array([np.nan] * 50), np.ones(49)])
def test_fit_rejects_bad_series(bad):
    with pytest.raises(InvalidInputError):
        pspline.fit(pspline.build_basis(50, 2, 5), bad, 0.5)


@pytest.mark.parametrize("lam", [-0.1, np.inf, np.nan])
def test_fit_rejects_bad_lambda(lam):
    with pytest.raises(InvalidInputError):
        pspline.fit(pspline.build_basis(50, 2, 5), np.zeros(50), lam)


@settings(max_examples=60, deadline=None)
@given(
    p=st.integers(1, 3), K=st.integers(1, 20), extra=st.integers(0, 300),
    lam=st.floats(0.0, 1e3), coefs=st.lists(st.floats(-10, 10), min_size=4, max_size=4),
)
def test_polynomial_reproduction_property(p, K, extra, lam, coefs):
    n = 2 * (p + 1 + K) + extra
    b = pspline.cached_basis(n, p, K)
    y = poly_samples(b.tau, coefs[: p + 1])
    np.testing.assert_allclose(pspline.fit(b, y, lam).fitted, y, atol=1e-8)


# -- MASE components and lambda_A -------------------------------------------

def test_bias_component_zero_cases():
    b = pspline.build_basis(100, 3, 8)
    assert pspline.bias_component(b, poly_samples(b.tau, [1, 2, 3, 4]), 1.0) < 1e-12
    assert pspline.bias_component(b, np.zeros(100), 1.0) == 0.0


def test_bias_and_variance_match_dense_oracle():
    n, p, K, lam = 40, 3, 8, 1.0
    b = pspline.build_basis(n, p, K)
    S = O.smoother(O.design(n, p, K), p, K, lam)
    m = np.sin(2 * np.pi * b.tau)
    assert pspline.bias_component(b, m, lam) == pytest.approx(float(O.bias(S, m)), rel=1e-9)
    c_f = 1 / (2 * np.pi)
    assert pspline.variance_component(b, lam, c_f) == pytest.approx(float(O.variance(S, c_f)), rel=1e-10)


def test_variance_component_linear_and_validated():
    b = pspline.build_basis(100, 3, 8)
    v = pspline.variance_component(b, 0.3, 0.7)
    assert pspline.variance_component(b, 0.3, 1.4) == pytest.approx(2 * v, rel=1e-14)
    for c in (0.0, -1.0):
        with pytest.raises(InvalidInputError):
            pspline.variance_component(b, 0.3, c)


def test_lambda_a_zero_curvature_cancels_cf():
    b = pspline.build_basis(200, 3, 10)
    expected = (b._tr_gd / b._tr_gd2) ** (1 / 6)
    for c in (0.2, 0.8):
        for sq in (False, True):
            assert pspline.lambda_a(b, np.zeros(200), c, sq) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("squared", [False, True])
def test_lambda_a_matches_dense_oracle(squared):
    n, p, K, c_f = 200, 3, 10, 0.2
    b = pspline.build_basis(n, p, K)
    y = np.sin(2 * np.pi * b.tau) + 0.3 * np.random.default_rng(5).standard_normal(n)
    m_hat = pspline.fit(b, y, 0.2).fitted
    ref = float(O.lambda_a(O.design(n, p, K), p, K, m_hat, c_f, pspline.GRAM_PINV_TOL, squared))
    assert pspline.lambda_a(b, m_hat, c_f, squared) == pytest.approx(ref, rel=1e-9)


def test_curvature_vector_matches_direct_formula():
    b = pspline.build_basis(150, 3, 10)
    m = np.cos(5 * b.tau)
    g, t, d = b.gram_pinv, b.design, np.diag(b.penalty_mask)
    poly = t[:, :4]
    m_perp = m - poly @ np.linalg.lstsq(poly, m, rcond=None)[0]
    np.testing.assert_allclose(pspline.curvature_vector(b, m), t @ g @ d @ g @ t.T @ m_perp, rtol=1e-8, atol=1e-8)


def test_curvature_ignores_polynomial_part():
    b = pspline.build_basis(300, 3, 12)
    m = np.sin(7 * b.tau)
    cubic = 2.0 - 3.0 * b.tau + 0.5 * b.tau ** 3
    np.testing.assert_allclose(pspline.curvature_vector(b, m + cubic), pspline.curvature_vector(b, m), atol=1e-9)
    assert np.linalg.norm(pspline.curvature_vector(b, cubic)) < 1e-9
    assert pspline.lambda_a(b, m + 7.0, 0.3) == pytest.approx(pspline.lambda_a(b, m, 0.3), rel=1e-12)


def test_lambda_a_errors():
    b = pspline.build_basis(100, 3, 8)
    with pytest.raises(InvalidInputError):
        pspline.lambda_a(b, np.zeros(100), 0.0)
    with pytest.raises(InvalidInputError):
        pspline.lambda_a(b, np.zeros(99), 0.1)


# -- K_{q,A} --------------------------------------------------------------------

def test_kqa_reported_value():
    assert pspline.kqa(40, 0.05, 3, 7660) == pytest.approx(4.344, abs=1e-3)


def test_kqa_exponent_cancels():
    n, p = 5000, 3
    q = p + 1
    lam_star = n / np.pi ** (2 * q)
    lam = lam_star ** (1 / (2 * p))
    assert pspline.kqa(17, lam, p, n) == pytest.approx(17, rel=1e-12)


def test_kqa_default_configuration_admissible():
    assert pspline.kqa(40, 0.2, 3, 7641) > 1


@pytest.mark.parametrize("args", [(0, 0.2, 3, 100), (40, 0.0, 3, 100), (40, 0.2, 0, 100), (40, 0.2, 3, 0)])
def test_kqa_rejects_nonpositive(args):
    with pytest.raises(InvalidInputError):
        pspline.kqa(*args)
