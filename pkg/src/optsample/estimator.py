"""Nonparametric least-squares FRF estimation from nonuniformly sampled data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample_times, check_target
from .exceptions import RankDeficient
from .signals import FrequencyBasis, Multisine, amplitude_matrix, regressor_psi

__all__ = [
    "SamplingSchedule",
    "RegressionSystem",
    "FrfEstimate",
    "build_regression",
    "ls_estimate",
    "fim",
    "psi_gram",
    "MultisineFRF",
    "RANK_CONDITION_LIMIT",
]

RANK_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class SamplingSchedule:
    """Sorted sampling instants in ``[0, horizon]`` (seconds)."""

    times: np.ndarray
    horizon: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel().copy()
        horizon = float(self.horizon)
        if t.size == 0:
            raise ValueError("sampling schedule needs at least one instant")
        if not np.all(np.isfinite(t)):
            raise ValueError("sampling instants must be finite")
        if np.any(np.diff(t) < 0):
            raise ValueError("sampling instants must be sorted ascending")
        if t[0] < 0 or t[-1] > horizon:
            raise ValueError(f"sampling instants must lie in [0, {horizon}]")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "horizon", horizon)

    @classmethod
    def from_unsorted(cls, times, horizon=None):
        t = np.sort(np.asarray(times, dtype=float).ravel())
        return cls(t, t[-1] if horizon is None else horizon)

    def __len__(self):
        return self.times.size

    @property
    def N(self) -> int:
        return self.times.size

    def min_spacing(self) -> float:
        return float(np.min(np.diff(self.times))) if self.N > 1 else np.inf


@dataclass(frozen=True)
class RegressionSystem:
    """Stacked regressors: ``Phi = Psi @ A`` with ``Psi`` the generalized Vandermonde matrix."""

    Psi: np.ndarray
    A: np.ndarray
    Phi: np.ndarray
    basis: FrequencyBasis

    @property
    def N(self) -> int:
        return self.Psi.shape[0]


@dataclass(frozen=True)
class FrfEstimate:
    theta_hat: np.ndarray
    basis: FrequencyBasis
    residual_norm: float
    condition_estimate: float

    def __post_init__(self):
        if self.theta_hat.shape != (self.basis.dim,):
            raise ValueError("estimate length does not match the frequency basis")

    def conjugate_asymmetry(self) -> float:
        """Largest ``|theta(+w) - conj(theta(-w))|`` over the excited pairs."""
        th = self.theta_hat
        if th.size == 1:
            return 0.0
        return float(np.max(np.abs(th[1::2] - np.conj(th[2::2]))))

    def rows(self):
        """``(omega, re, im, magnitude, phase)`` per basis frequency."""
        th = self.theta_hat
        return list(zip(self.basis.betas, th.real, th.imag, np.abs(th), np.angle(th)))


def build_regression(u: Multisine, schedule) -> RegressionSystem:
    times = np.asarray(getattr(schedule, "times", schedule), dtype=float)
    basis = u.basis
    Psi = regressor_psi(basis, times)
    A = amplitude_matrix(u)
    # A is diagonal: column scaling is the product Psi @ A
    Phi = Psi * np.diagonal(A)
    return RegressionSystem(Psi, A, Phi, basis)


def ls_estimate(reg: RegressionSystem, y) -> FrfEstimate:
    """Complex least-squares solve of ``y ~ Phi theta`` through a thin QR of ``Phi``.

    Raises ``RankDeficient`` when the spectral condition number of ``Phi``
    exceeds ``RANK_CONDITION_LIMIT``.
    """
    y = np.asarray(y, dtype=float).ravel()
    N, C = reg.Phi.shape
    if y.size != N:
        raise ValueError(f"got {y.size} measurements for {N} regression rows")
    if N < C:
        raise ValueError(f"need N > 2M samples for a well-posed estimate: N={N}, 2M+1={C}")
    Q, R = la.qr(reg.Phi, mode="economic")
    sv = la.svdvals(R)
    cond = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
    if not cond <= RANK_CONDITION_LIMIT:
        raise RankDeficient(f"regression matrix is rank deficient (condition number {cond:.3g})", condition=cond)
    theta = la.solve_triangular(R, Q.conj().T @ y)
    resid = float(np.linalg.norm(y - reg.Phi @ theta))
    return FrfEstimate(theta, reg.basis, resid, float(cond))


def fim(reg: RegressionSystem):
    """Fisher information ``Phi^H Phi`` (unit noise variance)."""
    from .infodesign import InformationMatrix

    return InformationMatrix(_gram(reg.Phi), reg.N)


def psi_gram(reg: RegressionSystem):
    """Sampling-only information ``Psi^H Psi``; its diagonal equals ``N``."""
    from .infodesign import InformationMatrix

    R = _gram(reg.Psi)
    # |psi_l(t)| = 1, so the diagonal is N up to rounding; store it exactly
    np.fill_diagonal(R, reg.N)
    return InformationMatrix(R, reg.N)


def _gram(X):
    G = X.conj().T @ X
    return 0.5 * (G + G.conj().T)


class MultisineFRF(RegressorMixin, BaseEstimator):
    """Estimate FRF values at the excited frequencies of a known multisine.

    Parameters
    ----------
    omegas : array-like of shape (M,)
        Excitation frequencies in rad/s.
    offset : float, default=1.0
        Constant input level ``a0``.
    amplitudes, phases : array-like of shape (M,), optional
        Cosine amplitudes (default 1) and phases in rad (default 0).

    Attributes
    ----------
    theta_ : ndarray of shape (2M+1,)
        Complex FRF estimate ordered ``[G(0), G(jw1), G(-jw1), ...]``.
    basis_ : FrequencyBasis
    condition_ : float
        Spectral condition number of the regression matrix.
    residual_norm_ : float
    n_features_in_ : int
        Always 1; the single feature is the sampling time in seconds.
    """

    def __init__(self, omegas=(), offset=1.0, amplitudes=None, phases=None):
        self.omegas = omegas
        self.offset = offset
        self.amplitudes = amplitudes
        self.phases = phases

    def _multisine(self):
        return Multisine.from_arrays(self.offset, self.omegas, self.amplitudes, self.phases)

    def fit(self, X, y):
        t = check_sample_times(X)
        y = check_target(y, t.size)
        self.n_features_in_ = 1
        u = self._multisine()
        est = ls_estimate(build_regression(u, t), y)
        self.multisine_ = u
        self.basis_ = est.basis
        self.theta_ = est.theta_hat
        self.condition_ = est.condition_estimate
        self.residual_norm_ = est.residual_norm
        return self

    def predict(self, X):
        check_is_fitted(self, "theta_")
        t = check_sample_times(X)
        return (build_regression(self.multisine_, t).Phi @ self.theta_).real

    def frequency_response(self):
        """Return ``(omega, G)`` pairs for the nonnegative excited frequencies."""
        check_is_fitted(self, "theta_")
        idx = np.r_[0, 1:self.theta_.size:2]
        return self.basis_.betas[idx], self.theta_[idx]
