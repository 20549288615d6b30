"""Recurrence coefficients for classical and associated Jacobi measures.

The parameter triple (a, b, c) enters everything downstream through two
coefficient streams lambda_n, mu_n and a modified head coefficient
lambda_hat0.  Three tridiagonal (Jacobi) operators are assembled from them,
differing only in the top-left entry and first off-diagonal:

* ``ASSOC_I``   : diag starts at lambda_0 + mu_0,
* ``ASSOC_II``  : diag starts at lambda_0,
* ``ASSOC_III`` : diag starts at lambda_hat0 (off-diagonal uses lambda_hat0
  too).

``CLASSICAL`` is ``ASSOC_I`` pinned at c = 0, whose spectral measure is
Beta(a+1, b+1).  The spectral measure of ``ASSOC_III`` is the one the
tridiagonal beta ensembles converge to in the beta*N -> 2c regime.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "JacobiParams",
    "ModelKind",
    "lambda_hat0",
    "lambda_n",
    "mu_n",
    "tridiag_entries",
    "validate_model",
]


@dataclass(frozen=True)
class JacobiParams:
    """Parameter triple (a, b, c); requires a > -1 and b > -1."""

    a: float
    b: float
    c: float = 0.0

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not np.isfinite(v):
                raise ParameterError(f"{name} must be a finite real, got {v!r}")
        if self.a <= -1.0 or self.b <= -1.0:
            raise ParameterError(
                f"need a > -1 and b > -1, got a={self.a}, b={self.b}"
            )

    @property
    def gamma(self) -> float:
        """The combination a + b + 1 that recurs in every formula."""
        return self.a + self.b + 1.0

    def shifted(self, dc: float) -> "JacobiParams":
        """Same (a, b) with c moved by dc."""
        return JacobiParams(self.a, self.b, self.c + dc)


class ModelKind(enum.Enum):
    """Which spectral measure a Jacobi matrix represents."""

    CLASSICAL = "classical"
    ASSOC_I = "assoc-i"
    ASSOC_II = "assoc-ii"
    ASSOC_III = "assoc-iii"


def validate_model(kind: ModelKind, p: JacobiParams) -> None:
    """Check the constraint set of the given model; raise ParameterError.

    CLASSICAL pins c = 0.  ASSOC_I and ASSOC_II need c >= 0, c+a > 0,
    c+b > 0.  ASSOC_III only needs the shifted constraints c+1 > 0,
    c+a+1 > 0, c+b+1 > 0 (so that ASSOC_I at c+1 is always valid, which
    the m-function identity uses).
    """
    if kind is ModelKind.CLASSICAL:
        if p.c != 0.0:
            raise ParameterError(f"classical model requires c = 0, got c={p.c}")
    elif kind in (ModelKind.ASSOC_I, ModelKind.ASSOC_II):
        if p.c < 0.0 or p.c + p.a <= 0.0 or p.c + p.b <= 0.0:
            raise ParameterError(
                f"{kind.value} requires c >= 0, c+a > 0, c+b > 0; "
                f"got (a, b, c) = ({p.a}, {p.b}, {p.c})"
            )
    elif kind is ModelKind.ASSOC_III:
        if p.c + 1.0 <= 0.0 or p.c + p.a + 1.0 <= 0.0 or p.c + p.b + 1.0 <= 0.0:
            raise ParameterError(
                f"{kind.value} requires c+1 > 0, c+a+1 > 0, c+b+1 > 0; "
                f"got (a, b, c) = ({p.a}, {p.b}, {p.c})"
            )
    else:  # pragma: no cover - enum is closed
        raise ParameterError(f"unknown model kind {kind!r}")


def lambda_hat0(p: JacobiParams) -> float:
    """Head coefficient (c+a+1) / (2c+a+b+2) of the third model."""
    den = 2.0 * p.c + p.a + p.b + 2.0
    if den == 0.0:
        raise ParameterError("lambda_hat0 denominator 2c+a+b+2 vanishes")
    return (p.c + p.a + 1.0) / den


def _as_index(n) -> tuple[np.ndarray, bool]:
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 0):
        raise ParameterError(f"coefficient index must be >= 0, got {n!r}")
    return arr, arr.ndim == 0


def lambda_n(p: JacobiParams, n) -> float | np.ndarray:
    """Coefficient stream lambda_n(c), n >= 0.

    lambda_n = (n+c+a+1)/(2n+2c+a+b+2) * (n+c+a+b+1)/(2n+2c+a+b+1).
    Accepts a scalar index or an integer array.
    """
    arr, scalar = _as_index(n)
    t = arr + p.c
    den1 = 2.0 * t + p.a + p.b + 2.0
    den2 = den1 - 1.0
    if np.any(den1 == 0.0) or np.any(den2 == 0.0):
        raise ParameterError("lambda_n denominator vanishes for some index")
    out = ((t + p.a + 1.0) / den1) * ((t + p.a + p.b + 1.0) / den2)
    return float(out) if scalar else out


def mu_n(p: JacobiParams, n) -> float | np.ndarray:
    """Coefficient stream mu_n(c), n >= 0.

    mu_n = (n+c)/(2n+2c+a+b+1) * (n+c+b)/(2n+2c+a+b).  The first factor
    vanishes exactly at n = 0, c = 0 and the second is then never
    evaluated (its denominator can vanish there too, e.g. a = -b).
    """
    arr, scalar = _as_index(n)
    t = arr + p.c
    den1 = 2.0 * t + p.a + p.b + 1.0
    den2 = den1 - 1.0
    zero = t == 0.0
    if np.any(den1 == 0.0) or np.any((den2 == 0.0) & ~zero):
        raise ParameterError("mu_n denominator vanishes for some index")
    safe_den2 = np.where(zero, 1.0, den2)
    out = np.where(zero, 0.0, (t / den1) * ((t + p.b) / safe_den2))
    return float(out) if scalar else out


def tridiag_entries(
    kind: ModelKind, p: JacobiParams, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the size-by-size Jacobi truncation.

    Rows n >= 2 are shared by all kinds: diag lambda_{n-1} + mu_{n-1},
    off-diagonal sqrt(lambda_{n-1} mu_n).  The first row depends on the
    kind as described in the module docstring.

    Returns
    -------
    (diag, offdiag) : arrays of length size and size-1.
    """
    validate_model(kind, p)
    size = int(size)
    if size < 1:
        raise ParameterError(f"size must be >= 1, got {size}")

    first_lam = lambda_hat0(p) if kind is ModelKind.ASSOC_III else lambda_n(p, 0)

    diag = np.empty(size)
    if kind in (ModelKind.CLASSICAL, ModelKind.ASSOC_I):
        diag[0] = first_lam + mu_n(p, 0)
    else:
        diag[0] = first_lam

    if size == 1:
        return diag, np.empty(0)

    idx = np.arange(1, size, dtype=float)
    lam = lambda_n(p, idx)
    mu = mu_n(p, idx)
    diag[1:] = lam + mu

    rad = np.concatenate(([first_lam], lam[:-1])) * mu
    if np.any(rad < 0.0):
        raise ParameterError(
            "negative radicand in off-diagonal entries; parameters leave "
            "the positive-definite regime"
        )
    return diag, np.sqrt(rad)
