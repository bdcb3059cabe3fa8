"""Information matrices, D-optimal sampling densities and greedy sampling schedules."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from ._validation import check_count, check_hermitian
from .estimator import SamplingSchedule
from .exceptions import NotConverged
from .signals import FrequencyBasis, regressor_psi

__all__ = [
    "DesignMeasure",
    "InformationMatrix",
    "expected_info",
    "doptimal_density",
    "kw_statistic",
    "greedy_selection",
    "greedy_schedule",
    "logdet_gain",
    "logdet_hermitian",
    "sample_schedule",
    "uniform_schedule",
    "uniform_measure",
]

log = logging.getLogger(__name__)

REFACTOR_EVERY = 50
DRIFT_TOL = 1e-8
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class InformationMatrix:
    """Hermitian PSD information matrix; ``mass`` is the sample count (or expected count)."""

    entries: np.ndarray
    mass: float

    def __post_init__(self):
        H = np.asarray(self.entries, dtype=complex)
        check_hermitian(H, tol=1e-13)
        H = 0.5 * (H + H.conj().T)
        lam = np.linalg.eigvalsh(H)
        if lam.size and lam[0] < -1e-9 * max(np.abs(lam[-1]), 1e-300):
            raise ValueError(f"information matrix is not PSD (min eigenvalue {lam[0]:.3g})")
        H.setflags(write=False)
        object.__setattr__(self, "entries", H)
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def logdet(self) -> float:
        return logdet_hermitian(self.entries)


@dataclass(frozen=True)
class DesignMeasure:
    """Sampling density discretized on a strictly increasing time grid.

    Each grid point owns the cell between the midpoints to its neighbours; the
    outer cells are closed at ``0`` and ``horizon`` (or extend half a spacing
    past the end points when no horizon is given).
    """

    grid: np.ndarray
    weights: np.ndarray
    horizon: float | None = None

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float).ravel().copy()
        w = np.asarray(self.weights, dtype=float).ravel().copy()
        if g.size == 0 or g.size != w.size:
            raise ValueError("grid and weights must be nonempty and of equal length")
        if np.any(np.diff(g) <= 0):
            raise ValueError("design grid must be strictly increasing")
        if g[0] < 0:
            raise ValueError("design grid must lie in [0, T]")
        if self.horizon is not None and g[-1] > self.horizon:
            raise ValueError("design grid exceeds the horizon")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("design weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"design weights must sum to 1 (got {w.sum()!r})")
        w /= w.sum()
        g.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "weights", w)
        if self.horizon is not None:
            object.__setattr__(self, "horizon", float(self.horizon))

    @classmethod
    def from_schedule(cls, schedule) -> "DesignMeasure":
        """Empirical measure of a schedule (repeated times merge into one atom)."""
        times = np.asarray(getattr(schedule, "times", schedule), dtype=float)
        grid, counts = np.unique(times, return_counts=True)
        return cls(grid, counts / counts.sum(), getattr(schedule, "horizon", None))

    @property
    def L(self) -> int:
        return self.grid.size

    def cell_edges(self) -> np.ndarray:
        g = self.grid
        if g.size == 1:
            half = 0.0
            return np.array([g[0] - half, g[0] + half])
        mids = 0.5 * (g[1:] + g[:-1])
        lo = max(0.0, g[0] - 0.5 * (g[1] - g[0]))
        hi = g[-1] + 0.5 * (g[-1] - g[-2])
        if self.horizon is not None:
            hi = min(self.horizon, hi)
        return np.concatenate([[lo], mids, [hi]])


def uniform_measure(T: float, L: int) -> DesignMeasure:
    """Uniform density on ``[0, T]``: equal weights on ``L`` cell midpoints."""
    L = check_count(L, "L")
    grid = (np.arange(L) + 0.5) * (T / L)
    return DesignMeasure(grid, np.full(L, 1.0 / L), T)


def uniform_schedule(T: float, N: int) -> SamplingSchedule:
    """Equally spaced instants including both end points (``[0]`` when ``N == 1``)."""
    N = check_count(N, "N")
    if N == 1:
        return SamplingSchedule(np.zeros(1), T)
    return SamplingSchedule(np.linspace(0.0, T, N), T)


def logdet_hermitian(H) -> float:
    """``log det`` of a Hermitian PD matrix via Cholesky; ``-inf`` if not PD."""
    try:
        Lc = la.cholesky(np.asarray(H), lower=True)
    except la.LinAlgError:
        return -np.inf
    return float(2.0 * np.sum(np.log(np.real(np.diagonal(Lc)))))


def _entries(R):
    return R.entries if isinstance(R, InformationMatrix) else np.asarray(R, dtype=complex)


def expected_info(measure: DesignMeasure, basis: FrequencyBasis, N) -> InformationMatrix:
    """Expected ``Psi^H Psi`` for ``N`` draws from ``measure``.

    Entry ``(p, q)`` is ``N * sum_l w_l exp(j (beta_q - beta_p) t_l)``, the
    elementwise conjugate of ``N * sum_l w_l psi psi^H``; both share the
    determinant and spectrum. The diagonal is exactly ``N``.
    """
    if N <= 0:
        raise ValueError(f"N must be positive, got {N}")
    P = regressor_psi(basis, measure.grid)
    R = N * ((P.conj().T * measure.weights) @ P)
    np.fill_diagonal(R, N)
    return InformationMatrix(0.5 * (R + R.conj().T), N)


def logdet_gain(R, psi) -> float:
    """``log(1 + psi^H R^{-1} psi)``, the log-det increase from adding ``psi psi^H`` to ``R``."""
    R = _entries(R)
    try:
        Lc = la.cholesky(R, lower=True)
    except la.LinAlgError as exc:
        raise ValueError("R must be Hermitian positive definite") from exc
    w = la.solve_triangular(Lc, np.asarray(psi, dtype=complex), lower=True)
    return float(np.log1p(np.vdot(w, w).real))


def _cholupdate(Lc: np.ndarray, x: np.ndarray) -> None:
    """In-place rank-one update ``Lc Lc^H + x x^H`` of a lower Cholesky factor."""
    x = x.astype(complex, copy=True)
    n = x.size
    for k in range(n):
        lkk = Lc[k, k].real
        r = np.hypot(lkk, abs(x[k]))
        c = r / lkk
        s = x[k] / lkk
        Lc[k, k] = r
        if k + 1 < n:
            Lc[k + 1:, k] = (Lc[k + 1:, k] + np.conj(s) * x[k + 1:]) / c
            x[k + 1:] = c * x[k + 1:] - s * Lc[k + 1:, k]


def greedy_selection(basis: FrequencyBasis, grid, N: int, ridge: float = 1e-8):
    """Greedy log-det maximization over a candidate grid.

    Starting from ``ridge * I``, each step picks the unused grid point with the
    largest ``psi^H R^{-1} psi`` (earliest point on ties) and adds
    ``psi psi^H`` to ``R``.

    Returns
    -------
    order : ndarray of int
        Grid indices in selection order.
    gains : ndarray
        Log-det increase of each step.
    """
    grid = np.asarray(grid, dtype=float)
    N = check_count(N, "N")
    if not ridge > 0:
        raise ValueError(f"ridge must be positive, got {ridge}")
    if grid.size < N:
        raise ValueError(f"grid size L={grid.size} must be >= N={N}: each grid point is used at most once")

    C = basis.dim
    P = regressor_psi(basis, grid)  # (L, C)
    PT = np.ascontiguousarray(P.T)
    R = ridge * np.eye(C, dtype=complex)
    Lc = np.sqrt(ridge) * np.eye(C, dtype=complex)
    available = np.ones(grid.size, dtype=bool)
    order = np.empty(N, dtype=int)
    gains = np.empty(N)

    for k in range(N):
        W = la.solve_triangular(Lc, PT, lower=True, check_finite=False)
        s = np.einsum("ij,ij->j", W.real, W.real) + np.einsum("ij,ij->j", W.imag, W.imag)
        s[~available] = -np.inf
        best = s.max()
        i = int(np.flatnonzero(s >= best - TIE_RTOL * abs(best))[0])
        order[k] = i
        gains[k] = np.log1p(s[i])
        available[i] = False

        p = P[i]
        R += np.outer(p, p.conj())
        if k + 1 < C or (k + 1) % REFACTOR_EVERY == 0:
            # R = ridge*I + rank-(k+1) term is ill-conditioned until C points are in
            Lc = la.cholesky(R, lower=True)
            continue
        _cholupdate(Lc, p)
        if np.linalg.norm(Lc @ Lc.conj().T - R) > DRIFT_TOL * np.linalg.norm(R):
            Lc = la.cholesky(R, lower=True)
    return order, gains


def greedy_schedule(basis: FrequencyBasis, T: float, L: int, N: int, ridge: float = 1e-8) -> SamplingSchedule:
    """Deterministic D-optimized schedule of ``N`` distinct points from a uniform ``L``-point grid on ``[0, T]``."""
    L = check_count(L, "L")
    N = check_count(N, "N")
    if L < N:
        raise ValueError(f"grid size L={L} must be >= N={N}: each grid point is used at most once")
    if N <= 2 * basis.M:
        raise ValueError(f"N={N} must exceed 2M={2 * basis.M}")
    if not ridge > 0:
        raise ValueError(f"ridge must be positive, got {ridge}")
    grid = np.linspace(0.0, T, L)
    order, _ = greedy_selection(basis, grid, N, ridge)
    return SamplingSchedule(np.sort(grid[order]), T)


def _variance_function(P, weights):
    """``d_l = psi_l^H M(w)^{-1} psi_l`` for all candidates, ``log det M(w)`` and the whitened regressors."""
    M = (P.T * weights) @ P.conj()
    M = 0.5 * (M + M.conj().T)
    Lc = la.cholesky(M, lower=True)
    W = la.solve_triangular(Lc, P.T, lower=True, check_finite=False)
    d = np.einsum("ij,ij->j", W.real, W.real) + np.einsum("ij,ij->j", W.imag, W.imag)
    return d, float(2.0 * np.sum(np.log(np.real(np.diagonal(Lc))))), W


def kw_statistic(measure: DesignMeasure, basis: FrequencyBasis) -> float:
    """Kiefer-Wolfowitz statistic ``max_l psi_l^H M(w)^{-1} psi_l`` (equals ``2M+1`` at the optimum)."""
    d, _, _ = _variance_function(regressor_psi(basis, measure.grid), measure.weights)
    return float(d.max())


def _vertex_gain(alpha, d, C):
    # log det((1-a) M + a psi psi^H) - log det M
    return (C - 1) * np.log1p(-alpha) + np.log1p(alpha * (d - 1.0))


def _vertex_step(d, C, lower):
    """Exact line search along ``(1-a) M + a psi psi^H`` for ``a >= lower``."""
    alpha = lower
    if d > 1.0:
        alpha = max(lower, (d - C) / (C * (d - 1.0)))
    return alpha, _vertex_gain(alpha, d, C)


def _exchange_step(di, dj, dij, wj):
    """Exact line search for moving mass ``a in [0, wj]`` from point ``j`` to point ``i``.

    ``log det`` changes by ``log(1 + a (di - dj) - a^2 (di dj - |dij|^2))``.
    """
    curv = di * dj - abs(dij) ** 2
    alpha = wj if curv <= 0 else min(wj, (di - dj) / (2.0 * curv))
    alpha = max(alpha, 0.0)
    return alpha, float(np.log1p(alpha * (di - dj) - alpha**2 * curv))


def doptimal_density(
    basis: FrequencyBasis,
    grid,
    max_iters: int = 20000,
    kw_tol: float = 1e-3,
    horizon: float | None = None,
    callback=None,
) -> DesignMeasure:
    """Maximize ``log det sum_l w_l psi_l psi_l^H`` over the probability simplex.

    Vertex-direction method with exchange steps. With ``i`` the candidate of
    largest variance function ``d`` and ``j`` the support point of smallest,
    each iteration takes whichever of three exactly line-searched moves gives
    the largest log-det increase: mix toward ``i``, mix away from ``j``, or
    transfer mass from ``j`` to ``i``. Stops once the Kiefer-Wolfowitz
    statistic ``max d`` is within ``(2M+1)(1 + kw_tol)``.

    ``callback(iteration, logdet, kw)`` is called after every evaluation.
    Raises ``NotConverged`` (carrying the best iterate) if ``max_iters`` is hit.
    """
    grid = np.asarray(grid, dtype=float).ravel()
    C = basis.dim
    if grid.size < C:
        raise ValueError(f"grid size L={grid.size} must be >= 2M+1={C}")
    if not kw_tol > 0:
        raise ValueError("kw_tol must be positive")
    max_iters = check_count(max_iters, "max_iters", minimum=0)

    P = regressor_psi(basis, grid)
    w = np.full(grid.size, 1.0 / grid.size)
    target = C * (1.0 + kw_tol)
    kw = np.inf
    for it in range(max_iters + 1):
        d, logdet, W = _variance_function(P, w)
        kw = float(d.max())
        if callback is not None:
            callback(it, logdet, kw)
        if kw <= target:
            return _measure(grid, w, horizon)
        if it == max_iters:
            break

        i = int(np.argmax(d))
        support = np.flatnonzero(w > 0)
        j = int(support[np.argmin(d[support])])
        a_min = -w[j] / (1.0 - w[j])

        moves = [
            ("toward", *_vertex_step(d[i], C, 0.0)),
            ("away", *_vertex_step(d[j], C, a_min)),
        ]
        if i != j:
            dij = np.vdot(W[:, i], W[:, j])
            moves.append(("exchange", *_exchange_step(d[i], d[j], dij, w[j])))
        kind, alpha, gain = max(moves, key=lambda m: m[2])
        if not gain > 0:
            break

        if kind == "exchange":
            w[i] += alpha
            w[j] = 0.0 if alpha >= w[j] else w[j] - alpha
        elif kind == "away":
            w *= 1.0 - alpha
            w[j] += alpha
            if alpha == a_min:
                w[j] = 0.0
        else:
            w *= 1.0 - alpha
            w[i] += alpha
        w = np.clip(w, 0.0, None)
        w /= w.sum()

    measure = _measure(grid, w, horizon)
    raise NotConverged(
        f"D-optimal density not converged after {it} iterations "
        f"(KW statistic {kw:.6g} > {target:.6g})",
        measure=measure,
        kw_statistic=kw,
        iterations=it,
    )


def _measure(grid, w, horizon):
    w = np.clip(w, 0.0, None)
    return DesignMeasure(grid, w / w.sum(), horizon)


def sample_schedule(measure: DesignMeasure, N: int, seed=None) -> SamplingSchedule:
    """Draw ``N`` i.i.d. instants: pick a cell by inverse CDF, then jitter uniformly inside it."""
    N = check_count(N, "N")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(measure.weights)
    idx = np.searchsorted(cdf, rng.random(N) * cdf[-1], side="right")
    idx = np.minimum(idx, measure.L - 1)
    edges = measure.cell_edges()
    lo, hi = edges[idx], edges[idx + 1]
    t = np.sort(lo + rng.random(N) * (hi - lo))
    horizon = measure.horizon if measure.horizon is not None else float(edges[-1])
    return SamplingSchedule(np.clip(t, 0.0, horizon), horizon)
