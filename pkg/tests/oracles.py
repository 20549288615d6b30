"""Independent reference implementations used only by the test suite.

Everything here is deliberately written against different machinery than
the package: exact rationals instead of floats, mpmath instead of the
homegrown series, Sturm bisection instead of LAPACK, dense products
instead of tridiagonal assembly.  Agreement between the two stacks is
the point of the tests.
"""

from fractions import Fraction

import mpmath
import numpy as np

mpmath.mp.dps = 40


# ---------------------------------------------------------------------------
# exact rational coefficient streams


def frac_lambda_hat0(a: Fraction, b: Fraction, c: Fraction) -> Fraction:
    return (c + a + 1) / (2 * c + a + b + 2)


def frac_lambda_n(a: Fraction, b: Fraction, c: Fraction, n: int) -> Fraction:
    t = n + c
    return ((t + a + 1) / (2 * t + a + b + 2)) * (
        (t + a + b + 1) / (2 * t + a + b + 1)
    )


def frac_mu_n(a: Fraction, b: Fraction, c: Fraction, n: int) -> Fraction:
    t = n + c
    if t == 0:
        return Fraction(0)
    return (t / (2 * t + a + b + 1)) * ((t + b) / (2 * t + a + b))


def frac_beta_moment(alpha: Fraction, beta: Fraction, k: int) -> Fraction:
    """E[X^k] = (alpha)_k / (alpha+beta)_k for X ~ Beta(alpha, beta)."""
    out = Fraction(1)
    for j in range(k):
        out *= (alpha + j) / (alpha + beta + j)
    return out


# ---------------------------------------------------------------------------
# Sturm-sequence bisection eigensolver (no LAPACK anywhere)


def sturm_count(diag, off, x: float) -> int:
    """Number of eigenvalues strictly below x, by the LDL^T sign count."""
    count = 0
    q = diag[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, len(diag)):
        if q == 0.0:
            q = 1e-300
        q = (diag[i] - x) - off[i - 1] ** 2 / q
        if q < 0.0:
            count += 1
    return count


def sturm_eigenvalues(diag, off, tol: float = 1e-14) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = len(diag)
    radius = np.zeros(n)
    if n > 1:
        radius[:-1] += np.abs(off)
        radius[1:] += np.abs(off)
    lo_all = float(np.min(diag - radius)) - tol
    hi_all = float(np.max(diag + radius)) + tol
    vals = np.empty(n)
    for k in range(n):
        lo, hi = lo_all, hi_all
        # invariant: count(lo) <= k < count(hi)
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if sturm_count(diag, off, mid) <= k:
                lo = mid
            else:
                hi = mid
        vals[k] = 0.5 * (lo + hi)
    return vals


# ---------------------------------------------------------------------------
# Beta distribution facts


def beta_density(a1: float, b1: float, x: float) -> float:
    """Density of Beta(a1, b1) at x."""
    lg = mpmath.loggamma
    norm = mpmath.e ** (lg(a1 + b1) - lg(a1) - lg(b1))
    return float(norm * mpmath.mpf(x) ** (a1 - 1) * mpmath.mpf(1 - x) ** (b1 - 1))


def beta_moment(a1: float, b1: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (a1 + j) / (a1 + b1 + j)
    return out


# ---------------------------------------------------------------------------
# mpmath references


def mp_ln_gamma(x: float) -> tuple[float, int]:
    """(log |Gamma(x)|, sign) by mpmath."""
    g = mpmath.gamma(x)
    return float(mpmath.log(abs(g))), (1 if g > 0 else -1)


def mp_hyp2f1(alpha: float, beta: float, gamma: float, x) -> complex:
    return complex(mpmath.hyp2f1(alpha, beta, gamma, x))


def mp_gamma_ratio(nums, dens) -> float:
    out = mpmath.mpf(1)
    for v in nums:
        out *= mpmath.gamma(v)
    for v in dens:
        out /= mpmath.gamma(v)
    return float(out)


# ---------------------------------------------------------------------------
# measure transforms


def uniform_stieltjes(z: complex) -> complex:
    """integral over [0,1] of dx/(x - z) for the uniform measure.

    The path x - z keeps a constant nonzero imaginary part for Im z != 0,
    so principal logs apply without branch adjustments.
    """
    import cmath

    return cmath.log(1.0 - z) - cmath.log(-z)


# ---------------------------------------------------------------------------
# dense matrix oracle


def dense_bbt(s, t) -> np.ndarray:
    """B B^T for the lower bidiagonal B with diagonal s, subdiagonal t."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    n = len(s)
    bmat = np.zeros((n, n))
    bmat[np.arange(n), np.arange(n)] = s
    if n > 1:
        bmat[np.arange(1, n), np.arange(n - 1)] = t
    return bmat @ bmat.T


# ---------------------------------------------------------------------------
# tensor-quadrature oracle for the exact finite-N moment at N = 2


def _beta_rule(alpha: float, beta: float, m: int):
    """m-point Gauss rule for the Beta(alpha, beta) probability measure
    on [0, 1], built from Jacobi-weight nodes on [-1, 1]."""
    from scipy.special import roots_jacobi

    u, w = roots_jacobi(m, beta - 1.0, alpha - 1.0)
    return (1.0 + u) / 2.0, w / w.sum()


def quadrature_moment_n2(kappa: float, a: float, b: float, k: int, m: int = 24):
    """E[(1/2) tr((B B^T)^k)] for the N = 2 model by 3-d tensor quadrature
    over p1 ~ Beta(kappa+a+1, kappa+b+1), p2 ~ Beta(a+1, b+1),
    q1 ~ Beta(kappa, a+b+2)."""
    p1_x, p1_w = _beta_rule(kappa + a + 1.0, kappa + b + 1.0, m)
    p2_x, p2_w = _beta_rule(a + 1.0, b + 1.0, m)
    q1_x, q1_w = _beta_rule(kappa, a + b + 2.0, m)
    total = 0.0
    for p1, w1 in zip(p1_x, p1_w):
        for p2, w2 in zip(p2_x, p2_w):
            for q1, w3 in zip(q1_x, q1_w):
                s = np.sqrt([p1, p2 * (1.0 - q1)])
                t = np.sqrt([q1 * (1.0 - p1)])
                j = dense_bbt(s, t)
                total += w1 * w2 * w3 * np.trace(np.linalg.matrix_power(j, k))
    return total / 2.0
