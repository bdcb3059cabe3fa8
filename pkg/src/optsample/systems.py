"""Continuous-time SISO plants and steady-state measurement generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import FrequencyBasis, Multisine, amplitude_matrix, regressor_psi

__all__ = [
    "RationalTransferFunction",
    "MeasurementRecord",
    "freq_response",
    "true_theta",
    "steady_state_output",
    "simulate_measurements",
]

HURWITZ_MARGIN = -1e-9
NOISE_KINDS = ("gaussian", "uniform")


@dataclass(frozen=True)
class RationalTransferFunction:
    """``G(p) = num(p) / den(p)`` with real coefficients in ascending powers of ``p``."""

    num: tuple
    den: tuple

    def __post_init__(self):
        num = np.trim_zeros(np.asarray(self.num, dtype=float).ravel(), "b")
        den = np.trim_zeros(np.asarray(self.den, dtype=float).ravel(), "b")
        if den.size == 0:
            raise ValueError("denominator must have a nonzero coefficient")
        if num.size == 0:
            num = np.zeros(1)
        if num.size > den.size:
            raise ValueError("transfer function must be proper (deg num <= deg den)")
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
            raise ValueError("transfer function coefficients must be finite")
        if den.size > 1:
            # np.roots wants descending order
            poles = np.roots(den[::-1])
            if np.any(poles.real > HURWITZ_MARGIN):
                raise ValueError(f"denominator is not Hurwitz (poles {poles}); no steady state exists")
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))

    @property
    def poles(self) -> np.ndarray:
        return np.roots(np.asarray(self.den)[::-1]) if len(self.den) > 1 else np.array([])


@dataclass(frozen=True)
class MeasurementRecord:
    schedule: object  # SamplingSchedule; kept untyped to avoid an import cycle
    y: np.ndarray
    noise_sigma: float
    seed: int | None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        if y.size != len(self.schedule):
            raise ValueError("measurement count does not match schedule length")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)


def freq_response(G: RationalTransferFunction, omega):
    """Evaluate ``G(j omega)``; accepts scalar or array ``omega``."""
    s = 1j * np.asarray(omega, dtype=float)
    # polyval wants descending order
    num = np.polyval(np.asarray(G.num)[::-1], s)
    den = np.polyval(np.asarray(G.den)[::-1], s)
    if np.any(np.abs(den) < 1e-300):
        raise ZeroDivisionError(f"transfer function has a pole on the imaginary axis near omega={omega}")
    out = num / den
    return complex(out) if np.ndim(out) == 0 else out


def true_theta(G: RationalTransferFunction, basis: FrequencyBasis) -> np.ndarray:
    """FRF values ``[G(0), G(jw1), G(-jw1), ...]`` in basis order."""
    return np.asarray(freq_response(G, basis.betas), dtype=complex)


def steady_state_output(G: RationalTransferFunction, u: Multisine, t):
    """Steady-state response of ``G`` to ``u`` at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, freq_response(G, 0.0).real * u.offset)
    for omega, amp, phase in u.components:
        g = freq_response(G, omega)
        out = out + np.abs(g) * amp * np.cos(omega * t + phase + np.angle(g))
    return out if out.ndim else float(out)


def _regression_output(G, u, t):
    """Same quantity as ``steady_state_output`` via ``Re(psi(t)^T A theta)``."""
    theta = true_theta(G, u.basis)
    d = np.diagonal(amplitude_matrix(u))
    return (regressor_psi(u.basis, t) @ (d * theta)).real


def simulate_measurements(G, u, schedule, sigma, seed=None, noise="gaussian") -> MeasurementRecord:
    """Noisy steady-state samples ``y_k = x(t_k) + e_k`` with i.i.d. zero-mean noise.

    ``noise`` selects the distribution ("gaussian" or "uniform"); both have
    variance ``sigma**2``. ``seed`` may be an int or a ``numpy.random.SeedSequence``.
    """
    if sigma < 0 or not np.isfinite(sigma):
        raise ValueError(f"noise sigma must be finite and >= 0, got {sigma}")
    times = np.asarray(getattr(schedule, "times", schedule), dtype=float)
    if times.size == 0:
        raise ValueError("schedule is empty")
    x = steady_state_output(G, u, times)
    e = draw_noise(np.random.default_rng(seed), times.size, sigma, noise)
    return MeasurementRecord(schedule, x + e, float(sigma), seed if isinstance(seed, (int, type(None))) else None)


def draw_noise(rng: np.random.Generator, n: int, sigma: float, kind: str = "gaussian") -> np.ndarray:
    if kind == "gaussian":
        return sigma * rng.standard_normal(n)
    if kind == "uniform":
        half_width = np.sqrt(3.0) * sigma
        return rng.uniform(-half_width, half_width, n)
    raise ValueError(f"unknown noise distribution {kind!r}; expected one of {NOISE_KINDS}")
