"""Closed-form spectral analysis: Stieltjes transforms, density, polynomials.

Everything here is hypergeometric.  Each quantity also has an independent
operator-side route (continued fraction, three-term recurrence, Gauss
quadrature), and the test suite leans on those cross-checks; keep both
sides intact when modifying formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import (
    JacobiParams,
    ModelKind,
    lambda_hat0,
    lambda_n,
    mu_n,
    validate_model,
)
from .errors import ParameterError, PoleError, UnsupportedRegionError
from .hypergeom import gamma_ratio, hyp2f1, ln_gamma
from .spectral import stieltjes_cf

__all__ = [
    "DensityProfile",
    "stieltjes_closed",
    "stieltjes_auto",
    "u_of_x",
    "v_of_x",
    "density_closed",
    "density_numeric",
    "density_profile",
    "recurrence_rn",
    "wimp_rn",
    "pn_recurrence",
    "pn_combination",
    "pn_explicit",
    "zeta_n",
    "zeta_asymptotic",
]


def stieltjes_closed(kind: ModelKind, p: JacobiParams, z: complex) -> complex:
    """Closed hypergeometric form of the Stieltjes transform at z.

    All three associated models share the numerator 2F1(c+1, c+a+1;
    2c+a+b+2; 1/z); they differ in the denominator series.  Principal
    branch; raises UnsupportedRegionError when 1/z falls outside the
    implemented 2F1 regions (fall back to stieltjes_cf then).
    """
    validate_model(kind, p)
    z = complex(z)
    if z == 0.0:
        raise ParameterError("z = 0 is on the support")
    a, b, c = p.a, p.b, p.c
    x = 1.0 / z
    num, _ = hyp2f1(c + 1.0, c + a + 1.0, 2.0 * c + a + b + 2.0, x)
    if kind in (ModelKind.CLASSICAL, ModelKind.ASSOC_I):
        den, _ = hyp2f1(c, c + a, 2.0 * c + a + b, x)
    elif kind is ModelKind.ASSOC_II:
        den, _ = hyp2f1(c, c + a + 1.0, 2.0 * c + a + b + 1.0, x)
    else:
        den, _ = hyp2f1(c, c + a + 1.0, 2.0 * c + a + b + 2.0, x)
    if den == 0.0:
        raise PoleError(f"denominator series vanishes at z = {z}")
    return -num / (z * den)


def stieltjes_auto(
    kind: ModelKind, p: JacobiParams, z: complex, depth: int = 2000
) -> tuple[complex, str]:
    """Stieltjes transform by the closed form when its region allows,
    otherwise by the continued fraction.  Returns (value, route)."""
    try:
        return stieltjes_closed(kind, p, z), "closed"
    except UnsupportedRegionError:
        return stieltjes_cf(kind, p, z, depth=depth), "cf"


def u_of_x(p: JacobiParams, x: float) -> float:
    """Boundary solution U(x) = G * 2F1(c, -c-a-b-1; -a; x), G the gamma
    normalizer; requires a away from the integers."""
    a, b, c = p.a, p.b, p.c
    coef = gamma_ratio((c + 1.0, a + 1.0), (c + a + 1.0,))
    val, _ = hyp2f1(c, -(c + a + b + 1.0), -a, x)
    return coef * val


def v_of_x(p: JacobiParams, x: float) -> float:
    """Companion solution carrying the x^(1+a) (1-x)^(1+b) prefactor;
    identically zero at c = 0."""
    a, b, c = p.a, p.b, p.c
    if c == 0.0:
        return 0.0
    sin_a = math.sin(math.pi * a)
    if sin_a == 0.0:
        raise ParameterError("v_of_x needs a away from the integers")
    coef = (
        -math.pi
        * c
        / sin_a
        * gamma_ratio((c + a + b + 2.0,), (1.0 + c + b, 2.0 + a))
    )
    val, _ = hyp2f1(1.0 - c, 2.0 + c + a + b, 2.0 + a, x)
    return coef * (1.0 - x) ** (1.0 + b) * x ** (1.0 + a) * val


def _require_density_domain(p: JacobiParams) -> None:
    validate_model(ModelKind.ASSOC_III, p)
    if p.c < 0.0 or p.c + p.a <= 0.0 or p.c + p.b <= 0.0:
        raise ParameterError(
            "closed-form density needs c >= 0, c+a > 0, c+b > 0; "
            f"got (a, b, c) = ({p.a}, {p.b}, {p.c})"
        )
    if abs(p.a - round(p.a)) <= 1e-8:
        raise ParameterError(
            "closed-form density needs a away from the integers; "
            "use density_numeric instead"
        )


def density_closed(p: JacobiParams, x) -> float | np.ndarray:
    """Limiting spectral density at x in (0,1).

    nu(x) = Z * x^a (1-x)^b / |U(x) + e^{i pi a} V(x)|^2 with
    |.|^2 = U^2 + 2 U V cos(pi a) + V^2 (everything real).  At c = 0 this
    collapses to the Beta(a+1, b+1) density.  Needs a non-integer; for
    integer a (or arguments past the hypergeometric regions) use
    density_numeric.
    """
    _require_density_domain(p)
    a, b, c = p.a, p.b, p.c
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xs <= 0.0) | (xs >= 1.0)):
        raise ParameterError("density is defined on the open interval (0, 1)")
    norm = gamma_ratio((c + 1.0, c + a + b + 2.0), (c + a + 1.0, c + b + 1.0))
    cos_a = math.cos(math.pi * a)
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        u = u_of_x(p, float(xi))
        v = v_of_x(p, float(xi))
        denom = u * u + 2.0 * cos_a * u * v + v * v
        out[i] = norm * xi**a * (1.0 - xi) ** b / denom
    return float(out[0]) if np.ndim(x) == 0 else out


def density_numeric(
    kind: ModelKind,
    p: JacobiParams,
    x,
    eps: float = 1e-6,
    *,
    depth: int | None = None,
    richardson: bool = False,
) -> float | np.ndarray:
    """Density by Stieltjes inversion, Im S(x + i eps) / pi.

    The continued-fraction depth is chosen from eps (the tail-coefficient
    error is damped like exp(-C depth sqrt(eps)) near the support) unless
    given.  The smoothing bias is linear in eps (the next term of
    Im S(x + i eps) is eps * Re S'(x)); ``richardson`` removes it by
    linear extrapolation from eps and eps/2.
    """
    if eps <= 0.0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if depth is None:
        depth = max(400, int(12.0 / math.sqrt(eps)))
    xs = np.atleast_1d(np.asarray(x, dtype=float))

    def _dens(e: float) -> np.ndarray:
        # limit tail: at distance eps the zero-tail truncation resolves
        # into its own atoms and the imaginary part collapses between them
        s = stieltjes_cf(kind, p, xs + 1j * e, depth=depth, warn_tol=None, tail="limit")
        return np.imag(s) / math.pi

    if richardson:
        out = 2.0 * _dens(eps / 2.0) - _dens(eps)
    else:
        out = _dens(eps)
    return float(out[0]) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class DensityProfile:
    """Density sampled on a grid inside (0, 1)."""

    params: JacobiParams
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        if g.shape != v.shape or g.ndim != 1 or len(g) < 2:
            raise ParameterError("grid and values must be matching 1d arrays")
        if np.any(np.diff(g) <= 0.0) or g[0] <= 0.0 or g[-1] >= 1.0:
            raise ParameterError("grid must increase strictly inside (0, 1)")
        if np.any(v < 0.0):
            raise ParameterError("density values must be nonnegative")

    @property
    def mass(self) -> float:
        """Trapezoid mass over the grid; near 1 when the grid resolves
        the density (endpoint singularities are not captured)."""
        return float(np.trapezoid(self.values, self.grid))


def density_profile(
    p: JacobiParams,
    grid,
    *,
    method: str = "auto",
    eps: float = 1e-6,
) -> tuple[DensityProfile, str]:
    """Evaluate the density on a grid; returns (profile, route used)."""
    grid = np.asarray(grid, dtype=float)
    if method not in ("auto", "closed", "numeric"):
        raise ParameterError(f"unknown density method {method!r}")
    if method in ("auto", "closed"):
        try:
            vals = density_closed(p, grid)
            return DensityProfile(p, grid, np.asarray(vals)), "closed"
        except (ParameterError, UnsupportedRegionError):
            if method == "closed":
                raise
    vals = density_numeric(ModelKind.ASSOC_III, p, grid, eps=eps)
    return DensityProfile(p, grid, np.asarray(vals)), "numeric"


# ---------------------------------------------------------------------------
# associated polynomials


def _rn_step(p: JacobiParams, j: int, x: float, r_j: float, r_jm1: float) -> float:
    """One step of the shared three-term recurrence:

    (j+c+1)/(j+c+a+1) lambda_j R_{j+1}
        = (x - lambda_j - mu_j) R_j - (j+c+a)/(j+c) mu_j R_{j-1}.

    At j = 0 the trailing term multiplies R_{-1} = 0, so the (j+c)
    denominator is never touched there.
    """
    a, c = p.a, p.c
    lam = lambda_n(p, j)
    mu = mu_n(p, j)
    rhs = (x - lam - mu) * r_j
    if r_jm1 != 0.0:
        rhs -= (j + c + a) / (j + c) * mu * r_jm1
    return rhs * (j + c + a + 1.0) / ((j + c + 1.0) * lam)


def recurrence_rn(p: JacobiParams, n: int, x: float) -> float:
    """R_n(x) by the three-term recurrence from R_{-1} = 0, R_0 = 1."""
    n = int(n)
    if n < 0:
        raise ParameterError(f"polynomial degree must be >= 0, got {n}")
    r_prev, r = 0.0, 1.0
    for j in range(n):
        r_prev, r = r, _rn_step(p, j, x, r, r_prev)
    return r


def wimp_rn(p: JacobiParams, n: int, x: float) -> float:
    """R_n(x) by the explicit two-by-two hypergeometric formula.

    Independent of the recurrence; used to cross-check it.  Requires a
    away from the integers and the generic-parameter conditions of the
    formula (gamma + 2c - 1 nonzero).
    """
    n = int(n)
    if n < 0:
        raise ParameterError(f"polynomial degree must be >= 0, got {n}")
    a, b, c = p.a, p.b, p.c
    g = p.gamma
    if abs(a - round(a)) <= 1e-8 or a == 0.0:
        raise ParameterError("explicit R_n formula needs a away from the integers")
    if g + 2.0 * c - 1.0 == 0.0:
        raise ParameterError("explicit R_n formula breaks at gamma + 2c = 1")

    # coefficient of the first product, gamma factors premerged
    c1 = gamma_ratio(
        (c + 1.0, g + c, n + a + c + 1.0),
        (a + c, g + c - 1.0, n + c + 1.0),
    ) / (a * (g + 2.0 * c - 1.0))
    f1a, _ = hyp2f1(c, 2.0 - g - c, 1.0 - a, x)
    f1b, _ = hyp2f1(-n - c, n + g + c, a + 1.0, x)

    c2 = gamma_ratio(
        (c + 1.0, g + c, n + g + c - a),
        (g + c - a - 1.0, c, n + c + g),
    ) / (a * (g + 2.0 * c - 1.0))
    f2a, _ = hyp2f1(1.0 - c, g + c - 1.0, a + 1.0, x)
    f2b, _ = hyp2f1(n + c + 1.0, 1.0 - n - g - c, 1.0 - a, x)

    sign = 1.0 if n % 2 == 0 else -1.0
    return sign * (c1 * f1a * f1b - c2 * f2a * f2b)


def pn_recurrence(p: JacobiParams, n: int, x: float) -> float:
    """P_n(x): same recurrence as R_n but seeded by the modified head,
    (c+1)/(c+a+1) lambda_hat0 P_1 = (x - lambda_hat0) P_0."""
    n = int(n)
    if n < 0:
        raise ParameterError(f"polynomial degree must be >= 0, got {n}")
    if n == 0:
        return 1.0
    a, c = p.a, p.c
    lam0 = lambda_hat0(p)
    p_prev, p_cur = 1.0, (x - lam0) * (c + a + 1.0) / ((c + 1.0) * lam0)
    for j in range(1, n):
        p_prev, p_cur = p_cur, _rn_step(p, j, x, p_cur, p_prev)
    return p_cur


def pn_combination(p: JacobiParams, n: int, x: float) -> float:
    """P_n(x) as R_n(x; c) plus an affine-in-x multiple of R_{n-1}(x; c+1).

    P_n = R_n + [ c(c+b)(2c+gamma+1) / ((c+1)(2c+gamma-1)(c+gamma))
                  - x c(2c+gamma+1) / ((c+1)(c+gamma)) ] R_{n-1}(.; c+1).
    """
    n = int(n)
    if n < 0:
        raise ParameterError(f"polynomial degree must be >= 0, got {n}")
    if n == 0:
        return 1.0
    b, c = p.b, p.c
    g = p.gamma
    den1 = (c + 1.0) * (2.0 * c + g - 1.0) * (c + g)
    den2 = (c + 1.0) * (c + g)
    if den1 == 0.0 or den2 == 0.0:
        raise ParameterError("combination formula denominator vanishes")
    coef = (
        c * (c + b) * (2.0 * c + g + 1.0) / den1
        - x * c * (2.0 * c + g + 1.0) / den2
    )
    return recurrence_rn(p, n, x) + coef * recurrence_rn(p.shifted(1.0), n - 1, x)


def pn_explicit(p: JacobiParams, n: int, x: float) -> float:
    """P_n(x) by the explicit two-product hypergeometric formula.

    (-1)^n P_n = G1 * 2F1(c, -c-gamma; -a; x) 2F1(-c-n, c+n+gamma; 1+a; x)
               - G2 * x(1-x) 2F1(1-c, 1+c+gamma; 2+a; x)
                          * 2F1(1+c+n, -c-n-a-b; 1-a; x)
    with gamma-factor coefficients G1, G2.  Needs a away from the integers
    (and a != -1 in G2).
    """
    n = int(n)
    if n < 0:
        raise ParameterError(f"polynomial degree must be >= 0, got {n}")
    a, b, c = p.a, p.b, p.c
    g = p.gamma
    if abs(a - round(a)) <= 1e-8 or a == 0.0 or a == -1.0:
        raise ParameterError("explicit P_n formula needs a away from the integers")

    g1 = gamma_ratio((c + 1.0, n + c + a + 1.0), (n + c + 1.0, c + a + 1.0))
    f1a, _ = hyp2f1(c, -(c + g), -a, x)
    f1b, _ = hyp2f1(-(c + n), c + n + g, 1.0 + a, x)

    g2 = gamma_ratio(
        (g + c + 1.0, n + c + b + 1.0), (g + n + c, c + b + 1.0)
    ) * (c / (a * (a + 1.0)))
    f2a, _ = hyp2f1(1.0 - c, 1.0 + c + g, 2.0 + a, x)
    f2b, _ = hyp2f1(1.0 + c + n, -(c + n + a + b), 1.0 - a, x)

    sign = 1.0 if n % 2 == 0 else -1.0
    return sign * (g1 * f1a * f1b - g2 * x * (1.0 - x) * f2a * f2b)


def zeta_n(p: JacobiParams, n: int) -> float:
    """Normalizer turning P_n into an orthonormal family: P_n / zeta_n.

    zeta_n = sqrt(mu_1..mu_n / (lambda_hat0 lambda_1..lambda_{n-1}))
             * (c+a+1)_n / (c+1)_n, computed in log space.
    """
    n = int(n)
    if n < 0:
        raise ParameterError(f"index must be >= 0, got {n}")
    if n == 0:
        return 1.0
    validate_model(ModelKind.ASSOC_III, p)
    a, c = p.a, p.c
    idx = np.arange(1, n + 1, dtype=float)
    mus = mu_n(p, idx)
    lams = lambda_n(p, idx[:-1]) if n > 1 else np.empty(0)
    if np.any(mus <= 0.0) or np.any(lams <= 0.0):
        raise ParameterError("zeta_n needs positive coefficient streams")
    half = 0.5 * (
        np.sum(np.log(mus)) - math.log(lambda_hat0(p)) - np.sum(np.log(lams))
    )
    lp = (
        ln_gamma(c + a + 1.0 + n)[0]
        - ln_gamma(c + a + 1.0)[0]
        - ln_gamma(c + 1.0 + n)[0]
        + ln_gamma(c + 1.0)[0]
    )
    return math.exp(half + lp)


def zeta_asymptotic(p: JacobiParams, n: int) -> float:
    """Large-n shape (2n)^(-1/2) * sqrt(G), the constant zeta_n levels to."""
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}")
    a, b, c = p.a, p.b, p.c
    g = gamma_ratio((c + 1.0, c + a + b + 2.0), (c + a + 1.0, c + b + 1.0))
    return math.sqrt(g / (2.0 * n))
