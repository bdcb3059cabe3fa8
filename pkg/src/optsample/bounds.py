"""Matrix Bernstein deviation bounds for ``Psi^H Psi`` and the resulting covariance bound.

The covariance bound conditions on the high-probability event
``||R_N - R_0|| <= t`` and drops the complementary tail; it is an
approximation, not a hard bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_hermitian
from .exceptions import VacuousBound
from .infodesign import DesignMeasure, InformationMatrix, sample_schedule
from .signals import FrequencyBasis, regressor_psi

__all__ = [
    "BernsteinParams",
    "bernstein_t",
    "bernstein_rhs",
    "solve_t",
    "min_eigenvalue_hermitian",
    "rn_inverse_bound",
    "covariance_bound",
    "bernstein_deviations",
    "bernstein_calibration",
    "jittered_expected_info",
    "bound_sweep",
    "APPROXIMATION_NOTE",
]

APPROXIMATION_NOTE = "approximate (tail neglected)"


@dataclass(frozen=True)
class BernsteinParams:
    M: int
    N: int
    delta: float

    def __post_init__(self):
        check_count(self.M, "M", minimum=0)
        check_count(self.N, "N")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def dim(self) -> int:
        return 2 * self.M + 1

    @property
    def R_const(self) -> float:
        """Almost-sure bound on ``||X_k||``."""
        return 2.0 * self.dim

    @property
    def v_const(self) -> float:
        """Bound on the matrix variance ``||sum E[X_k^2]||``."""
        return 4.0 * self.N * self.dim**2


def bernstein_rhs(dim: int, N: int, t) -> float:
    """``dim * exp(-(t^2/2) / (v + R t / 3))`` with ``R = 2 dim`` and ``v = 4 N dim^2``."""
    R = 2.0 * dim
    v = 4.0 * N * dim**2
    t = np.asarray(t, dtype=float)
    return dim * np.exp(-(0.5 * t**2) / (v + R * t / 3.0))


def bernstein_t(dim: int, N: int, delta: float) -> float:
    """Deviation level ``t`` at which the Bernstein tail equals ``delta`` (``0 < delta <= dim``).

    Positive root of ``t^2/2 = c (v + R t/3)`` with ``c = log(dim/delta)``.
    """
    if not 0.0 < delta <= dim:
        raise ValueError(f"delta must lie in (0, {dim}], got {delta}")
    R = 2.0 * dim
    v = 4.0 * N * dim**2
    c = np.log(dim / delta)
    a = R * c / 3.0
    return float(a + np.sqrt(a * a + 2.0 * v * c))


def solve_t(params: BernsteinParams) -> float:
    return bernstein_t(params.dim, params.N, params.delta)


def min_eigenvalue_hermitian(H) -> float:
    """Smallest eigenvalue of a Hermitian matrix (dense eigensolver)."""
    if isinstance(H, InformationMatrix):
        H = H.entries
    H = check_hermitian(np.asarray(H, dtype=complex), tol=1e-12)
    return float(np.linalg.eigvalsh(0.5 * (H + H.conj().T))[0])


def rn_inverse_bound(R0, t: float) -> float:
    """Coefficient ``1 / (lambda_min(R0) - t)`` of the identity bounding ``R_N^{-1}``.

    Raises ``VacuousBound`` when ``t >= lambda_min(R0)``.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    lam = min_eigenvalue_hermitian(R0)
    if t >= lam:
        raise VacuousBound(
            f"bound is vacuous: t={t:.6g} >= lambda_min(R0)={lam:.6g}", t=t, lambda_min=lam
        )
    return 1.0 / (lam - t)


def covariance_bound(A, R0, t: float, sigma: float) -> np.ndarray:
    """``sigma^2 A^{-1} A^{-H} / (lambda_min(R0) - t)``, the approximate high-probability covariance bound."""
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    coef = rn_inverse_bound(R0, t)
    Ainv = np.linalg.inv(np.asarray(A, dtype=complex))
    return sigma**2 * coef * (Ainv @ Ainv.conj().T)


def jittered_expected_info(measure: DesignMeasure, basis: FrequencyBasis, N) -> InformationMatrix:
    """Exact ``E[R_N]`` for the piecewise-uniform density that ``sample_schedule`` draws from."""
    edges = measure.cell_edges()
    lo, hi = edges[:-1], edges[1:]
    width = hi - lo
    diff = basis.betas[None, :] - basis.betas[:, None]  # beta_q - beta_p, as in expected_info
    # E exp(j d t) over a cell [lo, hi]; limit 1 for d*width -> 0
    half = 0.5 * np.multiply.outer(diff, width)
    mid = 0.5 * (lo + hi)
    cell_means = np.exp(1j * np.multiply.outer(diff, mid)) * np.sinc(half / np.pi)
    R = N * cell_means @ measure.weights
    np.fill_diagonal(R, N)
    return InformationMatrix(0.5 * (R + R.conj().T), N)


def bernstein_deviations(basis, measure, N, trials, seed=None) -> np.ndarray:
    """Spectral norms ``||R_N - R_0||`` over ``trials`` schedules drawn from ``measure``."""
    check_count(trials, "trials")
    R0 = jittered_expected_info(measure, basis, N).entries
    children = np.random.SeedSequence(seed).spawn(trials)
    out = np.empty(trials)
    for k, child in enumerate(children):
        P = regressor_psi(basis, sample_schedule(measure, N, child).times)
        D = P.conj().T @ P - R0
        out[k] = np.max(np.abs(np.linalg.eigvalsh(0.5 * (D + D.conj().T))))
    return out


def bernstein_calibration(basis, measure, N, t, trials, seed=None) -> float:
    """Empirical ``Pr(||R_N - R_0|| >= t)``; should not exceed ``bernstein_rhs``."""
    if trials < 100:
        raise ValueError(f"bernstein_calibration needs trials >= 100, got {trials}")
    return float(np.mean(bernstein_deviations(basis, measure, N, trials, seed) >= t))


def bound_sweep(basis, A, measure, N_values, delta, sigma):
    """Approximate covariance bound across sample counts.

    Returns one dict per ``N`` with keys ``N, delta, t, lambda_min_R0,
    bound_trace`` (``None`` when vacuous) and ``note``.
    """
    rows = []
    for N in N_values:
        t = solve_t(BernsteinParams(basis.M, int(N), delta))
        R0 = jittered_expected_info(measure, basis, N)
        lam = min_eigenvalue_hermitian(R0)
        try:
            trace = float(np.trace(covariance_bound(A, R0, t, sigma)).real)
            note = APPROXIMATION_NOTE
        except VacuousBound:
            trace, note = None, "vacuous"
        rows.append({"N": int(N), "delta": delta, "t": t, "lambda_min_R0": lam, "bound_trace": trace, "note": note})
    return rows
