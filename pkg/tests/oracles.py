"""Independent reference implementations used by the tests.

Everything here is assembled from first principles in mpmath at high
precision (or with plain loops), sharing no code with the package.
"""
import math

import mpmath as mp

mp.mp.dps = 40


def design(n, p, K):
    tau = [(mp.mpf(t) - mp.mpf("0.5")) / n for t in range(1, n + 1)]
    knots = [mp.mpf(i) / (K + 1) for i in range(1, K + 1)]
    rows = []
    for x in tau:
        row = [x ** j for j in range(p + 1)]
        row += [(x - k) ** p if x > k else mp.mpf(0) for k in knots]
        rows.append(row)
    return mp.matrix(rows)


def penalty(p, K):
    return mp.diag([0] * (p + 1) + [1] * K)


def smoother(T, p, K, lam):
    """S = T (T'T + lam^(2p) D)^(-1) T'."""
    A = T.T * T + mp.mpf(lam) ** (2 * p) * penalty(p, K)
    return T * mp.inverse(A) * T.T


def pinv(A, tol):
    """Moore-Penrose inverse with singular values below tol * s_max dropped."""
    U, S, V = mp.svd_r(A)
    smax = max(S)
    out = mp.zeros(A.cols, A.rows)
    for i in range(len(S)):
        if S[i] > tol * smax:
            out += (V[i, :].T * (1 / S[i])) * U[:, i].T
    return out


def vec(xs):
    return mp.matrix([mp.mpf(float(x)) for x in xs])


def trace(A):
    return mp.fsum(A[i, i] for i in range(A.rows))


def norm2(v):
    return mp.fsum(x * x for x in v)


def fitted(S, y):
    return S * vec(y)


def bias(S, m):
    mv = vec(m)
    return norm2(S * mv - mv) / S.rows


def variance(S, c_f):
    # tr(S^2) as the sum of S_ij S_ji
    tr_s2 = mp.fsum(S[i, j] * S[j, i] for i in range(S.rows) for j in range(S.cols))
    return 2 * mp.pi * c_f * tr_s2 / S.rows


def lambda_a(T, p, K, m, c_f, tol, squared):
    G = pinv(T.T * T, tol)
    GD = G * penalty(p, K)
    P = T[:, : p + 1]
    mv = vec(m)
    mv = mv - P * (mp.inverse(P.T * P) * (P.T * mv))  # drop the polynomial part
    curv = T * (GD * (G * (T.T * mv)))
    nrm = norm2(curv)
    if not squared:
        nrm = mp.sqrt(nrm)
    sc = 2 * mp.pi * c_f
    return (sc * trace(GD) / (nrm + sc * trace(GD * GD))) ** (mp.mpf(1) / (2 * p))


def normal_quantile(alpha, lo=-40.0, hi=40.0):
    """z with Phi(z) = alpha by bisection on the error function."""
    target = mp.mpf(alpha)
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    for _ in range(200):
        mid = (lo + hi) / 2
        if (1 + mp.erf(mid / mp.sqrt(2))) / 2 < target:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def acov_naive(x, lag):
    n = len(x)
    mean = math.fsum(x) / n
    return math.fsum((x[t] - mean) * (x[t + lag] - mean) for t in range(n - lag)) / n
