"""Truncated Fourier analysis on the circle with the H^{1/2} structure.

All vectors live on the nonzero modes ``-N..-1, 1..N``.  Coefficient arrays
are stored in the order returned by :func:`modes`, i.e. negative modes first::

    pos(m) = m + N      for m < 0
    pos(m) = m + N - 1  for m > 0

Reversing an array maps mode ``m`` to mode ``-m``; the operator module relies
on that.

Two coordinate systems are used.  ``coeffs`` are the plain Fourier
coefficients ``u_hat(m) = (u, e^{im theta})``.  The omega-basis coordinates are
``u_tilde(m) = f(m) u_hat(m)`` with ``f(m) = sqrt(m)`` for ``m > 0`` and
``f(m) = i sqrt(|m|)`` for ``m < 0`` (see :func:`basis_scale`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_grid, check_n_trunc

__all__ = [
    "FourierVector",
    "modes",
    "pos",
    "basis_scale",
    "grid",
    "analyze",
    "synthesize",
    "evaluate",
    "hilbert_J",
    "omega",
    "inner_omega",
    "norm_omega",
    "to_omega_basis",
    "from_omega_basis",
    "basis_vector",
    "omega_basis_vector",
]


def modes(n_trunc: int) -> np.ndarray:
    """Nonzero mode indices ``[-N, ..., -1, 1, ..., N]`` in storage order."""
    n_trunc = check_n_trunc(n_trunc)
    return np.concatenate([np.arange(-n_trunc, 0), np.arange(1, n_trunc + 1)])


def pos(m: int, n_trunc: int) -> int:
    """Array position of mode ``m``."""
    if m == 0 or abs(m) > n_trunc:
        raise IndexError(f"mode {m} outside 0 < |m| <= {n_trunc}")
    return m + n_trunc if m < 0 else m + n_trunc - 1


def basis_scale(n_trunc: int) -> np.ndarray:
    """Factors ``f(m)`` with ``e^{im theta} = f(m) * e_tilde_m``."""
    m = modes(n_trunc)
    return np.where(m > 0, np.sqrt(np.abs(m)) + 0j, 1j * np.sqrt(np.abs(m)))


def grid(n_points: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n_points) / n_points


@dataclass(frozen=True)
class FourierVector:
    """Mean-zero trigonometric polynomial of degree <= N.

    Parameters
    ----------
    coeffs : array of complex, shape (2N,)
        Fourier coefficients in storage order (see module docstring).
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0 or c.size % 2:
            raise ValueError(f"coefficient array must have even length 2N, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients contain NaN or Inf")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def n_trunc(self) -> int:
        return self.coeffs.size // 2

    @classmethod
    def zeros(cls, n_trunc: int) -> "FourierVector":
        return cls(np.zeros(2 * check_n_trunc(n_trunc), dtype=complex))

    @classmethod
    def from_modes(cls, n_trunc: int, values: dict) -> "FourierVector":
        """Build from a ``{mode: coefficient}`` mapping."""
        c = np.zeros(2 * check_n_trunc(n_trunc), dtype=complex)
        for m, v in values.items():
            c[pos(int(m), n_trunc)] = v
        return cls(c)

    def __getitem__(self, m: int) -> complex:
        return complex(self.coeffs[pos(m, self.n_trunc)])

    def __add__(self, other: "FourierVector") -> "FourierVector":
        _same_trunc(self, other)
        return FourierVector(self.coeffs + other.coeffs)

    def __sub__(self, other: "FourierVector") -> "FourierVector":
        _same_trunc(self, other)
        return FourierVector(self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "FourierVector":
        return FourierVector(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "FourierVector":
        return FourierVector(-self.coeffs)

    def conj(self) -> "FourierVector":
        """Coefficients of the pointwise complex conjugate function."""
        return FourierVector(np.conj(self.coeffs[::-1]))

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - self.conj().coeffs)) <= tol)

    def derivative(self) -> "FourierVector":
        return FourierVector(1j * modes(self.n_trunc) * self.coeffs)


def _same_trunc(u: FourierVector, v: FourierVector) -> None:
    if u.n_trunc != v.n_trunc:
        raise ValueError(f"truncation mismatch: N={u.n_trunc} vs N={v.n_trunc}")


def analyze(samples, n_trunc: int) -> FourierVector:
    """Fourier coefficients of uniformly sampled data, mean discarded.

    ``samples[j]`` is the value at ``theta_j = 2 pi j / M``; ``M >= 4N`` is
    required.
    """
    n_trunc = check_n_trunc(n_trunc)
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    n_points = check_grid(samples.size, n_trunc)
    spectrum = np.fft.fft(samples) / n_points
    return FourierVector(spectrum[modes(n_trunc) % n_points])


def synthesize(u: FourierVector, n_points: int) -> np.ndarray:
    """Sample ``u`` on the uniform grid of ``n_points`` points."""
    n_points = check_grid(n_points, u.n_trunc)
    spectrum = np.zeros(n_points, dtype=complex)
    spectrum[modes(u.n_trunc) % n_points] = u.coeffs
    return np.fft.ifft(spectrum) * n_points


def evaluate(u: FourierVector, theta) -> np.ndarray:
    """Evaluate ``u`` at arbitrary points (direct sum, no FFT)."""
    theta = np.asarray(theta, dtype=float)
    phases = np.exp(1j * np.multiply.outer(theta, modes(u.n_trunc)))
    return phases @ u.coeffs


def hilbert_J(u: FourierVector) -> FourierVector:
    """Hilbert transform: multiply mode ``m`` by ``i sgn(m)``."""
    return FourierVector(1j * np.sign(modes(u.n_trunc)) * u.coeffs)


def omega(u: FourierVector, v: FourierVector) -> complex:
    """Symplectic form ``(1/2pi) int u v' dtheta``, bilinear and antisymmetric."""
    _same_trunc(u, v)
    m = modes(u.n_trunc)
    # pair u_hat(m) with the derivative coefficient of v at -m
    return complex(np.sum(u.coeffs * (-1j * m) * v.coeffs[::-1]))


def inner_omega(u: FourierVector, v: FourierVector) -> complex:
    """H^{1/2} inner product, linear in ``u`` and conjugate-linear in ``v``.

    Equals ``-omega(u, J conj(v))``.
    """
    _same_trunc(u, v)
    weight = np.abs(modes(u.n_trunc))
    return complex(np.sum(weight * u.coeffs * np.conj(v.coeffs)))


def norm_omega(u: FourierVector) -> float:
    return float(np.sqrt(np.sum(np.abs(modes(u.n_trunc)) * np.abs(u.coeffs) ** 2)))


def to_omega_basis(u: FourierVector) -> np.ndarray:
    """Coordinates of ``u`` in the orthonormal basis ``e_tilde``."""
    return basis_scale(u.n_trunc) * u.coeffs


def from_omega_basis(coords) -> FourierVector:
    coords = np.asarray(coords, dtype=complex)
    return FourierVector(coords / basis_scale(coords.size // 2))


def basis_vector(m: int, n_trunc: int) -> FourierVector:
    """``e^{im theta}``."""
    return FourierVector.from_modes(n_trunc, {m: 1.0})


def omega_basis_vector(m: int, n_trunc: int) -> FourierVector:
    """Unit vector ``e_tilde_m`` of the omega basis."""
    coords = np.zeros(2 * check_n_trunc(n_trunc), dtype=complex)
    coords[pos(m, n_trunc)] = 1.0
    return from_omega_basis(coords)
