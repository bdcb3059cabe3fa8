"""Multisine excitation signals and their complex-exponential regressors.

Column ordering used throughout the package is ``[0, +w1, -w1, ..., +wM, -wM]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Multisine",
    "FrequencyBasis",
    "eval_multisine",
    "regressor_psi",
    "regressor_phi",
    "amplitude_matrix",
]


@dataclass(frozen=True)
class Multisine:
    """Offset plus ``M`` cosines: ``u(t) = a0 + sum_m a_m cos(w_m t + phi_m)``.

    ``components`` is a sequence of ``(omega, amplitude, phase)`` triples with
    ``omega`` in rad/s.
    """

    offset: float
    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple(tuple(float(v) for v in c) for c in self.components)
        for c in comps:
            if len(c) != 3:
                raise ValueError(f"multisine component must be (omega, amplitude, phase), got {c}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "offset", float(self.offset))

        if not np.isfinite(self.offset) or self.offset == 0.0:
            raise ValueError("multisine offset amplitude must be finite and nonzero")
        omegas = self.omegas
        if np.any(~np.isfinite(omegas)) or np.any(omegas <= 0):
            raise ValueError("multisine frequencies must be finite and strictly positive")
        if len(np.unique(omegas)) != len(omegas):
            raise ValueError("multisine frequencies must be pairwise distinct")
        amps = self.amplitudes
        if np.any(~np.isfinite(amps)) or np.any(amps == 0):
            raise ValueError("multisine amplitudes must be finite and nonzero")
        if np.any(~np.isfinite(self.phases)):
            raise ValueError("multisine phases must be finite")

    @classmethod
    def from_arrays(cls, offset, omegas, amplitudes=None, phases=None):
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        amplitudes = np.ones_like(omegas) if amplitudes is None else np.broadcast_to(amplitudes, omegas.shape)
        phases = np.zeros_like(omegas) if phases is None else np.broadcast_to(phases, omegas.shape)
        return cls(offset, tuple(zip(omegas, amplitudes, phases)))

    @property
    def M(self) -> int:
        return len(self.components)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([c[0] for c in self.components], dtype=float)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c[1] for c in self.components], dtype=float)

    @property
    def phases(self) -> np.ndarray:
        return np.array([c[2] for c in self.components], dtype=float)

    @property
    def basis(self) -> "FrequencyBasis":
        return FrequencyBasis.from_omegas(self.omegas)


@dataclass(frozen=True)
class FrequencyBasis:
    """Ordered frequency list ``[0, +w1, -w1, ..., +wM, -wM]`` in rad/s."""

    betas: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.betas, dtype=float).ravel()
        if b.size % 2 != 1 or b[0] != 0.0:
            raise ValueError("frequency basis must have odd length and start with 0")
        if not np.array_equal(b[1::2], -b[2::2]):
            raise ValueError("frequency basis entries must come in adjacent (+w, -w) pairs")
        b.setflags(write=False)
        object.__setattr__(self, "betas", b)

    @classmethod
    def from_omegas(cls, omegas) -> "FrequencyBasis":
        w = np.asarray(omegas, dtype=float).ravel()
        betas = np.empty(2 * w.size + 1)
        betas[0] = 0.0
        betas[1::2] = w
        betas[2::2] = -w
        return cls(betas)

    @property
    def omegas(self) -> np.ndarray:
        return self.betas[1::2].copy()

    @property
    def M(self) -> int:
        return (self.betas.size - 1) // 2

    @property
    def dim(self) -> int:
        return self.betas.size

    def __len__(self):
        return self.betas.size

    def __eq__(self, other):
        return isinstance(other, FrequencyBasis) and np.array_equal(self.betas, other.betas)

    def __hash__(self):
        return hash(self.betas.tobytes())


def eval_multisine(u: Multisine, t):
    """Evaluate the multisine at time(s) ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, u.offset)
    for omega, amp, phase in u.components:
        out = out + amp * np.cos(omega * t + phase)
    return out if out.ndim else float(out)


def regressor_psi(basis: FrequencyBasis, t) -> np.ndarray:
    """Unit-modulus regressor ``exp(j * beta * t)``.

    Scalar ``t`` gives a vector of length ``2M+1``; an array of times gives the
    generalized Vandermonde matrix with one row per time.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        return np.exp(1j * basis.betas * t)
    return np.exp(1j * np.multiply.outer(t, basis.betas))


def amplitude_matrix(u: Multisine) -> np.ndarray:
    """Diagonal matrix ``diag(a0, a1/2 e^{j phi1}, a1/2 e^{-j phi1}, ...)``."""
    d = np.empty(2 * u.M + 1, dtype=complex)
    d[0] = u.offset
    half = 0.5 * u.amplitudes * np.exp(1j * u.phases)
    d[1::2] = half
    d[2::2] = np.conj(half)
    if np.any(d == 0):
        raise ValueError("amplitude matrix is singular: zero input amplitude")
    return np.diag(d)


def regressor_phi(u: Multisine, t) -> np.ndarray:
    """Output regressor ``A psi(t)`` (rows ``psi(t_k)^T A`` for array ``t``)."""
    d = np.diagonal(amplitude_matrix(u))
    return regressor_psi(u.basis, t) * d
