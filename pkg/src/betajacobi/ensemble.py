"""Finite-N tridiagonal beta ensembles and their kappa -> infinity limit.

The N-point ensemble with density proportional to
prod |l_j - l_i|^beta * prod l^a (1-l)^b on (0,1)^N is realized as
J = B B^T for a lower bidiagonal B built from independent Beta variates;
J is symmetric tridiagonal, so sampling plus a tridiagonal eigensolver
gives the spectrum in O(N^2).  Moments can also be computed exactly for
small N by enumerating closed walks and averaging monomials in the Beta
variables.  Sending kappa = beta/2 to infinity with a = A kappa,
b = B kappa freezes the matrix onto deterministic entries.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError
from .spectral import (
    DiscreteMeasure,
    MomentVector,
    SymmetricTridiagonal,
    eigen_tridiagonal,
)

__all__ = [
    "EnsembleConfig",
    "BidiagonalFactor",
    "RegimeParams",
    "substream",
    "sample_beta",
    "sample_model",
    "to_tridiagonal",
    "empirical_measure",
    "mc_moments",
    "exact_moment",
    "limit_pq",
    "limit_bidiagonal_squares",
    "limit_tridiagonal",
    "MAX_EXACT_N",
    "MAX_EXACT_K",
]

# closed-walk enumeration is exponential in k; keep it at desk scale
MAX_EXACT_N = 8
MAX_EXACT_K = 8

_CLAMP_TOL = 1e-12
_FAIL_TOL = 1e-10
_MAX_FAILURE_RATE = 1e-3
_CHUNK = 65536
_CHUNK_KEY_BASE = 1 << 62


@dataclass(frozen=True)
class EnsembleConfig:
    """Finite ensemble: N points, Dyson parameter beta, weights (a, b)."""

    N: int
    beta: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N!r}")
        if not np.isfinite(self.beta) or self.beta < 0.0:
            raise ParameterError(f"beta must be >= 0, got {self.beta!r}")
        if self.a <= -1.0 or self.b <= -1.0:
            raise ParameterError(
                f"need a > -1 and b > -1, got a={self.a}, b={self.b}"
            )

    @property
    def kappa(self) -> float:
        return self.beta / 2.0

    @property
    def c(self) -> float:
        """The c = kappa * N combination the limit regime holds fixed."""
        return self.kappa * self.N


@dataclass(frozen=True)
class BidiagonalFactor:
    """Lower bidiagonal factor B: diagonal s (length N), subdiagonal t."""

    s: np.ndarray
    t: np.ndarray

    def __post_init__(self) -> None:
        s = np.atleast_1d(np.asarray(self.s, dtype=float))
        t = (
            np.atleast_1d(np.asarray(self.t, dtype=float))
            if np.size(self.t)
            else np.empty(0)
        )
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        if len(t) != len(s) - 1:
            raise ParameterError("need len(t) == len(s) - 1")
        for name, arr in (("s", s), ("t", t)):
            if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ParameterError(f"{name} entries must lie in [0, 1]")


@dataclass(frozen=True)
class RegimeParams:
    """Slopes (A, B) of the weight exponents a = A kappa, b = B kappa."""

    A: float
    B: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.A) and np.isfinite(self.B)):
            raise ParameterError("regime slopes must be finite")
        if self.A <= 0.0 or self.B <= 0.0:
            raise ParameterError(
                f"regime slopes must be positive, got A={self.A}, B={self.B}"
            )


def _fold_seed(seed: int) -> int:
    return int(np.random.SeedSequence(seed).generate_state(1, np.uint64)[0])


def _stream(folded: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(folded << 64) | index))


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for trial `index` under `seed`.

    Streams are keyed, not jumped, so any trial can be regenerated in
    isolation and results do not depend on scheduling.
    """
    if index < 0:
        raise ParameterError(f"stream index must be >= 0, got {index}")
    return _stream(_fold_seed(seed), index)


def _beta_draw(
    alpha: np.ndarray, beta: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Beta variates as gamma ratios X / (X + Y), elementwise.

    Shape 0 is taken as the degenerate point mass at 0 (the kappa -> 0
    edge of the q variables).  Ratios 0/0 from underflowing tiny shapes
    are redrawn.
    """
    x = rng.standard_gamma(alpha)
    y = rng.standard_gamma(beta)
    tot = x + y
    for _ in range(100):
        bad = (tot == 0.0) & (alpha > 0.0)
        if not np.any(bad):
            break
        x[bad] = rng.standard_gamma(alpha[bad])
        y[bad] = rng.standard_gamma(beta[bad])
        tot = x + y
    else:
        raise ConvergenceError("beta sampler kept underflowing; shapes too small")
    out = np.zeros_like(x)
    nz = tot > 0.0
    out[nz] = x[nz] / tot[nz]
    return out


def sample_beta(alpha: float, beta: float, rng: np.random.Generator) -> float:
    """One Beta(alpha, beta) variate via two gamma variates."""
    if alpha <= 0.0 or beta <= 0.0:
        raise ParameterError(f"beta shapes must be positive, got ({alpha}, {beta})")
    return float(_beta_draw(np.array([alpha]), np.array([beta]), rng)[0])


def _shape_arrays(cfg: EnsembleConfig):
    n = np.arange(1, cfg.N + 1, dtype=float)
    alpha_p = (cfg.N - n) * cfg.kappa + cfg.a + 1.0
    beta_p = (cfg.N - n) * cfg.kappa + cfg.b + 1.0
    m = np.arange(1, cfg.N, dtype=float)
    alpha_q = (cfg.N - m) * cfg.kappa
    beta_q = (cfg.N - m - 1.0) * cfg.kappa + cfg.a + cfg.b + 2.0
    return alpha_p, beta_p, alpha_q, beta_q


def _sample_st(cfg: EnsembleConfig, shapes, rng: np.random.Generator):
    alpha_p, beta_p, alpha_q, beta_q = shapes
    p = _beta_draw(alpha_p, beta_p, rng)
    q = _beta_draw(alpha_q, beta_q, rng)
    q_prev = np.concatenate(([0.0], q))
    s = np.sqrt(p * (1.0 - q_prev))
    t = np.sqrt(q * (1.0 - p[:-1])) if cfg.N > 1 else np.empty(0)
    return s, t


def sample_model(cfg: EnsembleConfig, rng: np.random.Generator) -> BidiagonalFactor:
    """Draw the bidiagonal factor: s_n^2 = p_n (1 - q_{n-1}),
    t_n^2 = q_n (1 - p_n), with p_n, q_n the graded Beta variables."""
    s, t = _sample_st(cfg, _shape_arrays(cfg), rng)
    return BidiagonalFactor(s, t)


def to_tridiagonal(factor: BidiagonalFactor) -> SymmetricTridiagonal:
    """J = B B^T: diagonal s_i^2 + t_{i-1}^2, off-diagonal s_i t_i."""
    s, t = factor.s, factor.t
    diag = s**2
    if len(t):
        diag = diag + np.concatenate(([0.0], t**2))
        off = s[:-1] * t
    else:
        off = np.empty(0)
    return SymmetricTridiagonal(diag, off)


def _clamp_spectrum(vals: np.ndarray) -> np.ndarray | None:
    """Zero out roundoff-level boundary violations; None if beyond 1e-10."""
    if vals[0] < -_FAIL_TOL or vals[-1] > 1.0 + _FAIL_TOL:
        return None
    out = vals.copy()
    out[(out < 0.0) & (out >= -_CLAMP_TOL)] = 0.0
    out[(out > 1.0) & (out <= 1.0 + _CLAMP_TOL)] = 1.0
    return out


def empirical_measure(
    cfg: EnsembleConfig, rng: np.random.Generator
) -> DiscreteMeasure:
    """One sampled spectrum as a uniform-weight measure."""
    t = to_tridiagonal(sample_model(cfg, rng))
    vals = np.sort(np.asarray(eigen_tridiagonal(t)))
    clamped = _clamp_spectrum(vals)
    if clamped is None:
        raise ConvergenceError(
            f"sampled spectrum escapes [0,1] beyond {_FAIL_TOL}: "
            f"[{vals[0]!r}, {vals[-1]!r}]"
        )
    return DiscreteMeasure(clamped, np.full(cfg.N, 1.0 / cfg.N))


def _eig_batch(diags: np.ndarray, offs: np.ndarray) -> np.ndarray:
    """Eigenvalues of a stack of tridiagonal matrices, ascending."""
    m, n = diags.shape
    if n == 1:
        return diags.copy()
    dense = np.zeros((m, n, n))
    idx = np.arange(n)
    dense[:, idx, idx] = diags
    dense[:, idx[:-1], idx[1:]] = offs
    dense[:, idx[1:], idx[:-1]] = offs
    return np.linalg.eigvalsh(dense)


def _mc_chunk(cfg, shapes, folded, lo, hi, k_max, out, fail_counts, slot):
    n = cfg.N
    m = hi - lo
    alpha_p, beta_p, alpha_q, beta_q = shapes
    # one stream per chunk, drawn in bulk; keys are offset so they never
    # collide with the per-trial substream keys used by empirical_measure
    rng = _stream(folded, _CHUNK_KEY_BASE + lo // _CHUNK)
    p = _beta_draw(
        np.broadcast_to(alpha_p, (m, n)), np.broadcast_to(beta_p, (m, n)), rng
    )
    if n > 1:
        q = _beta_draw(
            np.broadcast_to(alpha_q, (m, n - 1)),
            np.broadcast_to(beta_q, (m, n - 1)),
            rng,
        )
        # squares of the bidiagonal entries, same algebra as _sample_st
        s2 = p.copy()
        s2[:, 1:] *= 1.0 - q
        t2 = q * (1.0 - p[:, :-1])
        diags = s2.copy()
        diags[:, 1:] += t2
        offs = np.sqrt(s2[:, :-1] * t2)
    else:
        diags = p.copy()
        offs = np.empty((m, 0))
    try:
        vals = _eig_batch(diags, offs)
    except np.linalg.LinAlgError:
        vals = np.full((m, n), np.nan)
        for j in range(m):
            try:
                vals[j] = eigen_tridiagonal(SymmetricTridiagonal(diags[j], offs[j]))
            except ConvergenceError:
                pass
    finite = np.isfinite(vals).all(axis=1)
    in_range = (vals[:, 0] >= -_FAIL_TOL) & (vals[:, -1] <= 1.0 + _FAIL_TOL)
    good = finite & in_range
    vals[(vals < 0.0) & (vals >= -_CLAMP_TOL)] = 0.0
    vals[(vals > 1.0) & (vals <= 1.0 + _CLAMP_TOL)] = 1.0
    vals[~good] = np.nan
    fail_counts[slot] += int(m - good.sum())
    pw = np.ones((m, n))
    for k in range(k_max + 1):
        out[lo:hi, k] = pw.mean(axis=1)
        if k < k_max:
            pw *= vals
    out[lo:hi][~good] = np.nan


def mc_moments(
    cfg: EnsembleConfig,
    k_max: int,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
) -> tuple[MomentVector, np.ndarray]:
    """Monte Carlo estimate of the mean empirical moments m_k, k <= k_max.

    Trials are drawn in fixed-size chunks, each from its own keyed
    stream, so the estimate depends only on the seed: reruns are
    identical and the thread count never changes the result.  Returns
    (means, standard errors); means[0] is exactly 1, stderr[0] is 0.
    Trials whose eigensolve fails are dropped; a failure rate above 0.1%
    aborts.
    """
    if trials < 2:
        raise ParameterError(f"need at least 2 trials, got {trials}")
    if k_max < 0:
        raise ParameterError(f"k_max must be >= 0, got {k_max}")
    threads = max(1, int(threads))
    folded = _fold_seed(seed)
    shapes = _shape_arrays(cfg)

    per_trial = np.empty((trials, k_max + 1))
    bounds = list(range(0, trials, _CHUNK)) + [trials]
    jobs = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    fail_counts = np.zeros(len(jobs), dtype=int)

    def run(job_idx: int) -> None:
        lo, hi = jobs[job_idx]
        _mc_chunk(cfg, shapes, folded, lo, hi, k_max, per_trial, fail_counts, job_idx)

    if threads == 1 or len(jobs) == 1:
        for j in range(len(jobs)):
            run(j)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(len(jobs))))

    failures = int(fail_counts.sum())
    if failures > _MAX_FAILURE_RATE * trials:
        raise ConvergenceError(
            f"{failures}/{trials} trials failed the eigensolve; "
            "refusing to report biased moments"
        )
    ok = per_trial[~np.isnan(per_trial[:, 0])]
    n_ok = len(ok)
    means = ok.mean(axis=0)
    stderr = ok.std(axis=0, ddof=1) / np.sqrt(n_ok)
    means[0] = 1.0
    stderr[0] = 0.0
    return MomentVector(means), stderr


# ---------------------------------------------------------------------------
# exact moments for small N: closed walks + Beta monomial averages


def _poly_mul(pa: dict, pb: dict) -> dict:
    out: dict = {}
    for ea, ca in pa.items():
        for eb, cb in pb.items():
            key = tuple(i + j for i, j in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
    return out


def _poly_add_into(target: dict, other: dict) -> None:
    for key, coef in other.items():
        target[key] = target.get(key, 0) + coef


def _beta_power_mean(alpha: float, beta: float, j: int) -> float:
    """E[X^j] for X ~ Beta(alpha, beta); alpha = 0 means X = 0."""
    if j == 0:
        return 1.0
    if alpha == 0.0:
        return 0.0
    out = 1.0
    for r in range(j):
        out *= (alpha + r) / (alpha + beta + r)
    return out


def exact_moment(n: int, kappa: float, a: float, b: float, k: int) -> float:
    """Exact ensemble-mean moment E[(1/N) tr J^k] at finite N.

    tr J^k is expanded over closed walks on the path graph; diagonal steps
    carry d_v = p_v(1-q_{v-1}) + q_{v-1}(1-p_{v-1}), and each edge is
    crossed an even number of times, contributing powers of
    e_v^2 = p_v q_v (1-p_v)(1-q_{v-1}).  Monomials in the independent
    p, q variables then average by the Beta moment product formula.
    Guarded to N <= 8, k <= 8.
    """
    if not (1 <= n <= MAX_EXACT_N):
        raise ParameterError(f"exact_moment needs 1 <= N <= {MAX_EXACT_N}, got {n}")
    if not (0 <= k <= MAX_EXACT_K):
        raise ParameterError(f"exact_moment needs 0 <= k <= {MAX_EXACT_K}, got {k}")
    if kappa < 0.0 or a <= -1.0 or b <= -1.0:
        raise ParameterError("need kappa >= 0 and a, b > -1")
    if k == 0:
        return 1.0

    nvars = 3 * n - 2  # p_1..p_N, q_1..q_{N-1}, edge symbols E_1..E_{N-1}
    zero = (0,) * nvars

    def unit(var: int) -> tuple:
        e = [0] * nvars
        e[var] = 1
        return tuple(e)

    def p_var(i: int) -> int:  # all index helpers take 1-based labels
        return i - 1

    def q_var(i: int) -> int:
        return n + i - 1

    def e_var(i: int) -> int:
        return 2 * n - 1 + i - 1

    one = {zero: 1}

    # diagonal step polynomials d_v; q_0 = 0 kills half of d_1
    d_poly = []
    for v in range(1, n + 1):
        if v == 1:
            d_poly.append({unit(p_var(1)): 1})
            continue
        pv = {unit(p_var(v)): 1}
        pm = {unit(p_var(v - 1)): 1}
        qm = {unit(q_var(v - 1)): 1}
        dv = _poly_mul(pv, {zero: 1, unit(q_var(v - 1)): -1})
        _poly_add_into(dv, _poly_mul(qm, {zero: 1, unit(p_var(v - 1)): -1}))
        d_poly.append(dv)

    # squared off-diagonal polynomials e_v^2 = p_v q_v (1-p_v)(1-q_{v-1})
    e2_poly = []
    for v in range(1, n):
        base = _poly_mul({unit(p_var(v)): 1}, {unit(q_var(v)): 1})
        base = _poly_mul(base, {zero: 1, unit(p_var(v)): -1})
        if v >= 2:
            base = _poly_mul(base, {zero: 1, unit(q_var(v - 1)): -1})
        e2_poly.append(base)

    # walk-sum DP for tr J^k, edge crossings as formal symbols
    trace_poly: dict = {}
    for start in range(n):
        layer: list[dict | None] = [None] * n
        layer[start] = dict(one)
        for _ in range(k):
            nxt: list[dict | None] = [None] * n
            for v in range(n):
                g = layer[v]
                if not g:
                    continue
                stay = _poly_mul(g, d_poly[v])
                if nxt[v] is None:
                    nxt[v] = stay
                else:
                    _poly_add_into(nxt[v], stay)
                for w, edge in ((v + 1, v + 1), (v - 1, v)):
                    if not 0 <= w < n:
                        continue
                    ev = e_var(edge)
                    moved: dict = {}
                    for key, coef in g.items():
                        lifted = list(key)
                        lifted[ev] += 1
                        moved[tuple(lifted)] = coef
                    if nxt[w] is None:
                        nxt[w] = moved
                    else:
                        _poly_add_into(nxt[w], moved)
            layer = nxt
        g = layer[start]
        if g:
            _poly_add_into(trace_poly, g)

    shape_p = [
        ((n - i) * kappa + a + 1.0, (n - i) * kappa + b + 1.0)
        for i in range(1, n + 1)
    ]
    shape_q = [
        ((n - i) * kappa, (n - i - 1) * kappa + a + b + 2.0) for i in range(1, n)
    ]

    e2_pows: list[dict[int, dict]] = [dict() for _ in range(n - 1)]

    def e2_power(edge: int, m: int) -> dict:
        cache = e2_pows[edge]
        if m not in cache:
            cache[m] = (
                e2_poly[edge]
                if m == 1
                else _poly_mul(e2_power(edge, m - 1), e2_poly[edge])
            )
        return cache[m]

    total = 0.0
    for expo, coef in trace_poly.items():
        pq_part = expo[: 2 * n - 1] + (0,) * (n - 1)
        mono = {pq_part: coef}
        for edge in range(n - 1):
            m = expo[e_var(edge + 1)]
            if m % 2 != 0:
                raise AssertionError("odd edge power in a closed walk")
            if m:
                mono = _poly_mul(mono, e2_power(edge, m // 2))
        for key, cf in mono.items():
            val = float(cf)
            for i in range(1, n + 1):
                j = key[p_var(i)]
                if j:
                    val *= _beta_power_mean(*shape_p[i - 1], j)
            for i in range(1, n):
                j = key[q_var(i)]
                if j:
                    val *= _beta_power_mean(*shape_q[i - 1], j)
            total += val
    return total / n


# ---------------------------------------------------------------------------
# kappa -> infinity limit


def limit_pq(size: int, n_param: float, a_slope: float, b_slope: float):
    """Limits of the Beta means: p_n -> (n-N-A)/(2n-2N-A-B),
    q_n -> (n-N)/(2n-2N-A-B+1), for n = 1..size (q stops at size-1).

    `n_param` is the N appearing in the formulas; it usually equals
    `size` but may be any real (the formulas continue analytically, which
    is how the substitution identity against the third model is checked).
    """
    size = int(size)
    if size < 1:
        raise ParameterError(f"size must be >= 1, got {size}")
    n = np.arange(1, size + 1, dtype=float)
    den = 2.0 * n - 2.0 * n_param - a_slope - b_slope
    if np.any(den == 0.0) or np.any(den + 1.0 == 0.0):
        raise ParameterError("limit formulas hit a vanishing denominator")
    p_lim = (n - n_param - a_slope) / den
    q_lim = ((n - n_param) / (den + 1.0))[: size - 1]
    return p_lim, q_lim


def limit_bidiagonal_squares(
    size: int, n_param: float, a_slope: float, b_slope: float
):
    """Deterministic limits of (s_n^2, t_n^2) under a = A kappa, b = B kappa.

    Assembled from limit_pq exactly as the sampler assembles s, t from
    p, q (with q_0 = 0), so the finite-kappa and limit pipelines share
    their arithmetic shape.
    """
    p_lim, q_lim = limit_pq(size, n_param, a_slope, b_slope)
    q_prev = np.concatenate(([0.0], q_lim))
    s2 = p_lim * (1.0 - q_prev)
    t2 = q_lim * (1.0 - p_lim[:-1]) if size > 1 else np.empty(0)
    return s2, t2


def limit_tridiagonal(n: int, regime: RegimeParams) -> SymmetricTridiagonal:
    """The N-by-N deterministic matrix the ensemble freezes onto."""
    s2, t2 = limit_bidiagonal_squares(n, float(n), regime.A, regime.B)
    if np.any(s2 < 0.0) or np.any(t2 < 0.0):
        raise ParameterError("limit squares must be nonnegative")
    return to_tridiagonal(BidiagonalFactor(np.sqrt(s2), np.sqrt(t2)))
