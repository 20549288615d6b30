"""Spectral tools for symmetric tridiagonal operators.

Moments of the spectral measure at the first basis vector, Gauss
quadrature rules read off eigen-decompositions, and the resolvent
(Stieltjes transform) evaluated as a finite continued fraction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .coeffs import JacobiParams, ModelKind, tridiag_entries
from .errors import ConvergenceError, ConvergenceWarning, ParameterError

__all__ = [
    "DEFAULT_RTOL",
    "SymmetricTridiagonal",
    "DiscreteMeasure",
    "MomentVector",
    "jacobi_matrix",
    "moment11",
    "gauss_quadrature",
    "stieltjes_cf",
    "eigen_tridiagonal",
]

# default relative tolerance for deterministic identity checks
DEFAULT_RTOL = 1e-10


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Symmetric tridiagonal matrix stored as diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        d = np.atleast_1d(np.asarray(self.diag, dtype=float))
        e = np.atleast_1d(np.asarray(self.offdiag, dtype=float)) if np.size(
            self.offdiag
        ) else np.empty(0)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if d.ndim != 1 or e.ndim != 1 or len(e) != max(len(d) - 1, 0):
            raise ParameterError("need diag of length n and offdiag of length n-1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ParameterError("tridiagonal entries must be finite")

    @property
    def size(self) -> int:
        return len(self.diag)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        if len(self.offdiag):
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        n = self.size
        if n > 1:
            m[np.arange(n - 1), np.arange(1, n)] = self.offdiag
            m[np.arange(1, n), np.arange(n - 1)] = self.offdiag
        return m


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure (nodes ascending)."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_1d(np.asarray(self.nodes, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)
        if x.shape != w.shape or x.ndim != 1 or len(x) == 0:
            raise ParameterError("nodes and weights must be matching 1d arrays")
        if np.any(w < -1e-15):
            raise ParameterError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ParameterError(f"weights sum to {w.sum()!r}, expected 1")
        # nondecreasing, not strictly increasing: empirical spectra may tie
        # after the boundary clamp
        if np.any(np.diff(x) < 0.0):
            raise ParameterError("nodes must be sorted ascending")

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.nodes ** int(k)))


@dataclass(frozen=True)
class MomentVector:
    """Moment sequence m_0..m_K with m_0 = 1."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or len(v) == 0 or not np.all(np.isfinite(v)):
            raise ParameterError("moment vector must be a finite 1d array")
        if abs(v[0] - 1.0) > 1e-9:
            raise ParameterError(f"m_0 must be 1, got {v[0]!r}")

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])


def jacobi_matrix(kind: ModelKind, p: JacobiParams, size: int) -> SymmetricTridiagonal:
    """Size-by-size truncation of the model's Jacobi operator."""
    d, e = tridiag_entries(kind, p, size)
    return SymmetricTridiagonal(d, e)


def moment11(
    kind: ModelKind, p: JacobiParams, k: int, *, size: int | None = None
) -> float:
    """k-th moment of the spectral measure at e_1, via <e1, J^k e1>.

    A walk of length k from index 1 cannot pass floor(k/2)+2, so the
    default truncation at that size is exact; any larger `size` gives the
    same value (a useful consistency check).
    """
    k = int(k)
    if k < 0:
        raise ParameterError(f"moment order must be >= 0, got {k}")
    if size is None:
        size = k // 2 + 2
    elif size < k // 2 + 2:
        raise ParameterError(f"size {size} too small for moment order {k}")
    t = jacobi_matrix(kind, p, size)
    v = np.zeros(size)
    v[0] = 1.0
    for _ in range(k):
        v = t.matvec(v)
    return float(v[0])


def eigen_tridiagonal(
    t: SymmetricTridiagonal,
    *,
    want_first_components: bool = False,
    check: bool = False,
):
    """Eigenvalues (ascending) of a symmetric tridiagonal matrix.

    With ``want_first_components`` also returns the first components of the
    orthonormal eigenvectors (all that Gauss quadrature needs).  With
    ``check`` the reconstruction residual of every pair is verified against
    1e-10 * ||T||.
    """
    need_vectors = want_first_components or check
    try:
        if need_vectors:
            vals, vecs = scipy.linalg.eigh_tridiagonal(t.diag, t.offdiag)
        else:
            vals = scipy.linalg.eigvalsh_tridiagonal(t.diag, t.offdiag)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    if check:
        norm = max(np.max(np.abs(t.diag)) + 2 * (np.max(np.abs(t.offdiag)) if len(t.offdiag) else 0.0), 1e-300)
        resid = t.dense() @ vecs - vecs * vals
        worst = np.max(np.sqrt(np.sum(resid**2, axis=0)))
        if worst > 1e-10 * norm:
            raise ConvergenceError(
                f"eigenpair residual {worst:.3e} exceeds 1e-10 * ||T|| = {1e-10 * norm:.3e}"
            )
    if want_first_components:
        return vals, vecs[0]
    return vals


def gauss_quadrature(kind: ModelKind, p: JacobiParams, m: int) -> DiscreteMeasure:
    """M-point Gauss rule for the model's spectral measure.

    Nodes are the eigenvalues of the M-by-M truncation; the weight at a
    node is the squared first component of its normalized eigenvector.
    Exact for polynomials of degree <= 2M-1.
    """
    if m < 1:
        raise ParameterError(f"need m >= 1 quadrature points, got {m}")
    t = jacobi_matrix(kind, p, m)
    nodes, first = eigen_tridiagonal(t, want_first_components=True)
    if np.any(np.diff(nodes) <= 0.0):
        raise ConvergenceError("quadrature nodes are not strictly increasing")
    return DiscreteMeasure(nodes, first**2)


def _limit_tail(zc: np.ndarray) -> np.ndarray:
    """Herglotz fixed point of the deep-level fraction map.

    The coefficient streams tend to 1/4, so levels far down look like the
    constant-coefficient operator with d = 1/2, e^2 = 1/16, whose
    transform solves S = -1/(z - 1/2 + S/16).  Seeding the tail with this
    root keeps the approximated spectrum continuous, which matters for z
    within an eigenvalue spacing of the support; the zero tail instead
    converges to the purely atomic measure of the truncation.
    """
    w = zc - 0.5
    disc = np.sqrt(w * w - 0.25 + 0j)
    s = 8.0 * (-w + disc)
    alt = 8.0 * (-w - disc)
    off_axis = zc.imag != 0.0
    pick_alt = np.where(
        off_axis,
        s.imag * np.sign(zc.imag) <= 0.0,
        np.abs(alt) < np.abs(s),
    )
    return np.where(pick_alt, alt, s)


def stieltjes_cf(
    kind: ModelKind,
    p: JacobiParams,
    z,
    depth: int = 400,
    *,
    warn_tol: float | None = DEFAULT_RTOL,
    tail: str = "zero",
):
    """Stieltjes transform S(z) = integral d nu(x) / (x - z), truncated
    continued fraction of the given depth.

    Satisfies -1/S_J(z) = z - d_1 + e_1^2 S_J'(z) level by level, with the
    tail below `depth` set to zero (``tail="zero"``, the default) or to
    the constant-coefficient fixed point (``tail="limit"``, needed when z
    sits closer to the support than the truncation's eigenvalue spacing).
    Accepts scalar or array z (complex, off the support).  When the
    depth-halved value differs by more than ``warn_tol`` (relative), a
    ConvergenceWarning is emitted; pass ``warn_tol=None`` to skip that
    second evaluation.
    """
    depth = int(depth)
    if depth < 2:
        raise ParameterError(f"depth must be >= 2, got {depth}")
    if tail not in ("zero", "limit"):
        raise ParameterError(f"tail must be 'zero' or 'limit', got {tail!r}")
    zc = np.asarray(z, dtype=complex)
    scalar = zc.ndim == 0
    zc = np.atleast_1d(zc)

    # one extra row so the deepest level can couple to a nonzero tail
    d, e = tridiag_entries(kind, p, depth + 1)
    e2 = e**2
    seed = _limit_tail(zc) if tail == "limit" else np.zeros_like(zc)

    def _eval(levels: int) -> np.ndarray:
        s = seed
        for j in range(levels - 1, -1, -1):
            s = -1.0 / (zc - d[j] + e2[j] * s)
        return s

    s_full = _eval(depth)
    if warn_tol is not None:
        s_half = _eval(depth // 2)
        rel = np.max(np.abs(s_full - s_half) / np.maximum(np.abs(s_full), 1e-300))
        if rel > warn_tol:
            warnings.warn(
                f"continued fraction not converged at depth {depth} "
                f"(depth-halving delta {rel:.3e}); increase depth or move z "
                "away from the support",
                ConvergenceWarning,
                stacklevel=2,
            )
    return complex(s_full[0]) if scalar else s_full
