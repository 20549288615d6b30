"""Interacting particle dynamics on [0, 1] and the moment hierarchy.

N particles follow coupled Jacobi-type diffusions with electrostatic
repulsion; their empirical power moments obey, in the c = beta N / 2
regime, an autonomous quadratic ODE hierarchy whose fixed point matches
the spectral moments of the third associated model.  Both levels are
implemented: an Euler-Maruyama particle scheme and an RK4 integrator for
the hierarchy, plus the recursion generating the stationary moments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import JacobiParams, lambda_hat0
from .ensemble import substream
from .errors import ConvergenceError, ParameterError
from .spectral import MomentVector

__all__ = [
    "ParticleState",
    "MomentPath",
    "drift",
    "em_step",
    "simulate_moments",
    "ode_rhs",
    "integrate_moments",
    "stationary_uk",
    "moment_drift_finite_n",
]

# pairwise gaps below this are treated as hard collisions
EPS_DIV = 1e-12


@dataclass(frozen=True)
class ParticleState:
    """Sorted particle positions in [0, 1] at a given time."""

    time: float
    positions: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_1d(np.asarray(self.positions, dtype=float))
        object.__setattr__(self, "positions", x)
        if x.ndim != 1 or len(x) < 1:
            raise ParameterError("positions must be a nonempty 1-d array")
        if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
            raise ParameterError("positions must lie in [0, 1]")
        if np.any(np.diff(x) < 0.0):
            raise ParameterError("positions must be sorted ascending")

    @property
    def n(self) -> int:
        return len(self.positions)

    def moment(self, k: int) -> float:
        return float(np.mean(self.positions**k))


@dataclass(frozen=True)
class MomentPath:
    """Moment trajectories: times (T,), moments (T, k_max+1), m_0 = 1."""

    times: np.ndarray
    moments: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        m = np.asarray(self.moments, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "moments", m)
        if m.ndim != 2 or len(t) != m.shape[0]:
            raise ParameterError("moments must be (len(times), k_max + 1)")
        if np.any(np.abs(m[:, 0] - 1.0) > 1e-9):
            raise ParameterError("column 0 must be the constant 1")

    @property
    def k_max(self) -> int:
        return self.moments.shape[1] - 1

    def final(self) -> MomentVector:
        return MomentVector(self.moments[-1])


def _drift_arrays(x: np.ndarray, a: float, b: float, beta: float):
    """Drift and diffusion coefficient for a batch of configurations.

    x has shape (..., N).  The singular interaction sum uses reciprocal
    gaps clipped at +-1/EPS_DIV, which for nonzero gaps equals flooring
    |gap| at EPS_DIV with the sign kept.  Exactly coincident pairs (the
    diagonal, a point-mass start, particles clamped to the same boundary)
    contribute zero: a tie has no well-defined repulsion direction, and
    one noise step separates the pair.
    """
    gaps = x[..., :, None] - x[..., None, :]
    with np.errstate(divide="ignore"):
        inv = 1.0 / gaps
    np.clip(inv, -1.0 / EPS_DIV, 1.0 / EPS_DIV, out=inv)
    inv[gaps == 0.0] = 0.0
    interaction = inv.sum(axis=-1)
    xx = x * (1.0 - x)
    mu = (a + 1.0) - (a + b + 2.0) * x + beta * xx * interaction
    sigma = np.sqrt(2.0 * np.maximum(xx, 0.0))
    return mu, sigma


def drift(state: ParticleState, a: float, b: float, beta: float):
    """(drift, diffusion) vectors of the particle SDE at `state`."""
    return _drift_arrays(state.positions, a, b, beta)


def em_step(
    state: ParticleState,
    a: float,
    b: float,
    beta: float,
    dt: float,
    rng: np.random.Generator,
) -> ParticleState:
    """One Euler-Maruyama step; clamps to [0, 1] and re-sorts."""
    if dt <= 0.0:
        raise ParameterError(f"dt must be positive, got {dt}")
    mu, sigma = _drift_arrays(state.positions, a, b, beta)
    noise = rng.standard_normal(state.n)
    x = state.positions + mu * dt + sigma * np.sqrt(dt) * noise
    np.clip(x, 0.0, 1.0, out=x)
    x.sort()
    return ParticleState(state.time + dt, x)


def simulate_moments(
    n: int,
    a: float,
    b: float,
    beta: float,
    x0: float | np.ndarray,
    t_end: float,
    dt: float,
    paths: int,
    k_max: int,
    seed: int,
    *,
    record_every: int | None = None,
) -> tuple[MomentPath, np.ndarray]:
    """Path-averaged empirical moments of the N-particle SDE.

    All paths step together as a (paths, N) batch on one substream, so
    the run is reproducible from (seed,) alone.  Returns (path, stderr)
    where stderr[t, k] is the across-path standard error at each record
    time.  `record_every` defaults to about 200 records plus the final
    time.
    """
    if paths < 2:
        raise ParameterError(f"need at least 2 paths, got {paths}")
    if t_end <= 0.0 or dt <= 0.0:
        raise ParameterError("need t_end > 0 and dt > 0")
    steps = int(round(t_end / dt))
    if record_every is None:
        record_every = max(1, steps // 200)

    x0 = np.asarray(x0, dtype=float)
    if x0.ndim == 0:
        x = np.full((paths, n), float(x0))
    elif x0.shape == (n,):
        x = np.tile(np.sort(x0), (paths, 1))
    else:
        raise ParameterError("x0 must be a scalar or a length-N array")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ParameterError("x0 must lie in [0, 1]")
    x = np.sort(x, axis=1)

    rng = substream(seed, 0)
    sqdt = np.sqrt(dt)
    times = [0.0]
    kvec = np.arange(k_max + 1)

    def record(xb):
        pw = xb[:, :, None] ** kvec  # (paths, N, k+1)
        per_path = pw.mean(axis=1)
        return per_path.mean(axis=0), per_path.std(axis=0, ddof=1) / np.sqrt(paths)

    m0, s0 = record(x)
    mom_rows, err_rows = [m0], [s0]
    for step in range(1, steps + 1):
        mu, sigma = _drift_arrays(x, a, b, beta)
        x = x + mu * dt + sigma * (sqdt * rng.standard_normal(x.shape))
        np.clip(x, 0.0, 1.0, out=x)
        x.sort(axis=1)
        if step % record_every == 0 or step == steps:
            mk, sk = record(x)
            mom_rows.append(mk)
            err_rows.append(sk)
            times.append(step * dt)
    path = MomentPath(np.array(times), np.vstack(mom_rows))
    return path, np.vstack(err_rows)


def ode_rhs(m: np.ndarray, p: JacobiParams) -> np.ndarray:
    """Right side of the autonomous moment hierarchy.

    m_k' = -k (2c + a + b + k + 1) m_k + k (a + k) m_{k-1}
           + c k sum_{i=0}^{k-1} m_i m_{k-1-i} - c k sum_{j=1}^{k-1} m_j m_{k-j}

    with m_0 = 1 held fixed.  Both quadratic sums come from one
    self-convolution of m.
    """
    m = np.asarray(m, dtype=float)
    a, b, c = p.a, p.b, p.c
    k_max = len(m) - 1
    out = np.zeros_like(m)
    if k_max == 0:
        return out
    conv = np.convolve(m, m)
    k = np.arange(1, k_max + 1, dtype=float)
    low = conv[:k_max]  # sum_{i+j=k-1} m_i m_j for k = 1..k_max
    # sum_{j=1}^{k-1} m_j m_{k-j} = conv[k] - 2 m_k (strip i=0 and i=k)
    high = conv[1 : k_max + 1] - 2.0 * m[1:]
    out[1:] = (
        -k * (2.0 * c + a + b + k + 1.0) * m[1:]
        + k * (a + k) * m[:-1]
        + c * k * low
        - c * k * high
    )
    return out


def integrate_moments(
    m0: np.ndarray,
    p: JacobiParams,
    t_end: float,
    dt: float,
    *,
    record_every: int | None = None,
) -> MomentPath:
    """Fixed-step RK4 for the moment hierarchy from m0 (with m0[0] = 1)."""
    m = np.asarray(m0, dtype=float).copy()
    if m.ndim != 1 or len(m) < 1:
        raise ParameterError("m0 must be a nonempty 1-d array")
    if abs(m[0] - 1.0) > 1e-9:
        raise ParameterError("m0[0] must be 1")
    if t_end <= 0.0 or dt <= 0.0:
        raise ParameterError("need t_end > 0 and dt > 0")
    steps = int(round(t_end / dt))
    if record_every is None:
        record_every = max(1, steps // 200)
    times = [0.0]
    rows = [m.copy()]
    for step in range(1, steps + 1):
        k1 = ode_rhs(m, p)
        k2 = ode_rhs(m + 0.5 * dt * k1, p)
        k3 = ode_rhs(m + 0.5 * dt * k2, p)
        k4 = ode_rhs(m + dt * k3, p)
        m = m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if np.any(~np.isfinite(m)) or np.any(np.abs(m) > 10.0):
            raise ConvergenceError(
                f"moment hierarchy blew up at t = {step * dt:.6g}"
            )
        if step % record_every == 0 or step == steps:
            times.append(step * dt)
            rows.append(m.copy())
    return MomentPath(np.array(times), np.vstack(rows))


def stationary_uk(p: JacobiParams, k_max: int) -> MomentVector:
    """Fixed point of the hierarchy by recursion:

    u_k = [ (a + k) u_{k-1} + c sum_{i=0}^{k-1} u_i u_{k-1-i}
            - c sum_{j=1}^{k-1} u_j u_{k-j} ] / (2c + a + b + k + 1),

    u_0 = 1.  The j-sum never touches u_k, so the recursion is closed.
    u_1 reproduces the spectral head coefficient.
    """
    if k_max < 0:
        raise ParameterError(f"k_max must be >= 0, got {k_max}")
    a, b, c = p.a, p.b, p.c
    u = np.empty(k_max + 1)
    u[0] = 1.0
    for k in range(1, k_max + 1):
        den = 2.0 * c + a + b + k + 1.0
        if den == 0.0:
            raise ParameterError(f"stationary recursion hits zero divisor at k={k}")
        low = float(np.dot(u[:k], u[k - 1 :: -1]))
        high = float(np.dot(u[1:k], u[k - 1 : 0 : -1]))
        u[k] = ((a + k) * u[k - 1] + c * low - c * high) / den
    if k_max >= 1:
        expect = lambda_hat0(JacobiParams(a, b, c))
        assert abs(u[1] - expect) <= 1e-12 * max(1.0, abs(expect))
    return MomentVector(u)


def moment_drift_finite_n(
    moments: np.ndarray, k: int, a: float, b: float, c: float, n: int
) -> float:
    """Expected instantaneous drift of m_k for the N-particle system.

    Equals the hierarchy right side plus the finite-N correction
    -(c/N) (k^2 m_{k-1} - k (k+1) m_k), which vanishes as N grows; used
    to test the particle scheme against the generator without taking any
    limit.
    """
    m = np.asarray(moments, dtype=float)
    if not 1 <= k <= len(m) - 1:
        raise ParameterError(f"need 1 <= k <= {len(m) - 1}, got {k}")
    rhs = ode_rhs(m, JacobiParams(a, b, c))[k]
    corr = (c / n) * (k**2 * m[k - 1] - k * (k + 1) * m[k])
    return float(rhs - corr)
