"""Circle diffeomorphisms and their symplectic representation.

A diffeomorphism is handled through its lift ``R -> R`` with
``psi(theta + 2 pi) = psi(theta) + 2 pi``.  It acts on functions by
``(psi . u)(theta) = u(psi^{-1}(theta))`` minus the mean, and its matrix in
the plain Fourier basis is

    I[n, m] = (1/2pi) int exp(i m psi^{-1}(theta) - i n theta) dtheta.

Conjugating by the omega-basis scaling turns ``I`` into the operator
``embed(psi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._validation import check_grid, check_n_trunc
from .fourier import (
    FourierVector,
    analyze,
    basis_scale,
    evaluate,
    grid,
    modes,
    omega_basis_vector,
    synthesize,
)

__all__ = [
    "CircleDiffeo",
    "TrigDiffeo",
    "ComposedDiffeo",
    "make_diffeo",
    "rotation",
    "random_diffeo",
    "embed_rect",
    "interior_residuals",
    "invert_diffeo",
    "act_on_function",
    "i_matrix",
    "embed",
    "DecayReport",
    "decay_report",
    "vector_field_matrix",
    "lie_action",
    "cos_field",
    "sin_field",
    "counterexample_operator",
    "counterexample_curve",
]

MIN_SLOPE = 1e-6
NEWTON_TOL = 1e-12


class CircleDiffeo:
    """Orientation-preserving circle diffeomorphism (base class).

    Subclasses provide the lift ``__call__`` and its ``derivative``.
    """

    def __call__(self, theta):
        raise NotImplementedError

    def derivative(self, theta):
        raise NotImplementedError

    def inverse(self, theta):
        return invert_diffeo(self, theta)

    def compose(self, inner: "CircleDiffeo") -> "ComposedDiffeo":
        """``self o inner``."""
        return ComposedDiffeo(self, inner)

    def __matmul__(self, inner: "CircleDiffeo") -> "ComposedDiffeo":
        return self.compose(inner)

    def min_slope(self, n_points: int = 4096) -> float:
        return float(np.min(self.derivative(grid(n_points))))


@dataclass(frozen=True)
class TrigDiffeo(CircleDiffeo):
    """``theta + shift + sum_k (a_k cos k theta + b_k sin k theta)``."""

    a: tuple = ()
    b: tuple = ()
    shift: float = 0.0

    @property
    def degree(self) -> int:
        return max(len(self.a), len(self.b))

    def _coeffs(self):
        K = self.degree
        a = np.zeros(K)
        b = np.zeros(K)
        a[: len(self.a)] = self.a
        b[: len(self.b)] = self.b
        return np.arange(1, K + 1), a, b

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        k, a, b = self._coeffs()
        kt = np.multiply.outer(theta, k)
        return theta + self.shift + np.cos(kt) @ a + np.sin(kt) @ b

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        k, a, b = self._coeffs()
        kt = np.multiply.outer(theta, k)
        return 1.0 + np.cos(kt) @ (k * b) - np.sin(kt) @ (k * a)

    def as_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "shift": self.shift}


@dataclass(frozen=True)
class ComposedDiffeo(CircleDiffeo):
    """``outer o inner``; evaluated numerically, never expanded."""

    outer: CircleDiffeo
    inner: CircleDiffeo

    def __call__(self, theta):
        return self.outer(self.inner(theta))

    def derivative(self, theta):
        x = self.inner(theta)
        return self.outer.derivative(x) * self.inner.derivative(theta)

    def inverse(self, theta):
        return self.inner.inverse(self.outer.inverse(theta))


def make_diffeo(a=(), b=(), shift: float = 0.0, n_check: int | None = None) -> TrigDiffeo:
    """Validated trigonometric perturbation of the identity.

    Raises
    ------
    ValueError
        If the derivative drops to ``1e-6`` or below on the validation grid.
    """
    a = tuple(float(x) for x in np.atleast_1d(np.asarray(a, dtype=float)))
    b = tuple(float(x) for x in np.atleast_1d(np.asarray(b, dtype=float)))
    if not np.all(np.isfinite(a + b)) or not np.isfinite(shift):
        raise ValueError("diffeomorphism coefficients must be finite")
    psi = TrigDiffeo(a=a, b=b, shift=float(shift))
    n_check = n_check or max(4096, 64 * psi.degree)
    slope = psi.min_slope(n_check)
    if slope <= MIN_SLOPE:
        raise ValueError(f"not orientation preserving: min derivative {slope:.3g} <= {MIN_SLOPE}")
    return psi


def rotation(alpha: float) -> TrigDiffeo:
    return TrigDiffeo(shift=float(alpha))


def random_diffeo(rng, degree: int = 3, min_slope: float = 0.5) -> TrigDiffeo:
    """Random trigonometric diffeomorphism with derivative at least ``min_slope``.

    Coefficients are drawn Gaussian and rescaled so that
    ``sum_k k (|a_k| + |b_k|) <= (1 - min_slope) * U(0.2, 1)``, which bounds
    ``|psi' - 1|`` pointwise.
    """
    rng = np.random.default_rng(rng)
    a = rng.standard_normal(degree)
    b = rng.standard_normal(degree)
    k = np.arange(1, degree + 1)
    budget = (1.0 - min_slope) * rng.uniform(0.2, 1.0)
    scale = budget / float(np.sum(k * (np.abs(a) + np.abs(b))))
    return make_diffeo(a * scale, b * scale, shift=float(rng.uniform(-np.pi, np.pi)))


def invert_diffeo(psi: CircleDiffeo, theta, tol: float = NEWTON_TOL, max_iter: int = 200):
    """Solve ``psi(x) = theta`` pointwise by safeguarded Newton iteration.

    The bracket starts at ``[theta - pi, theta + pi]`` and is widened until it
    contains the root; Newton steps leaving the bracket fall back to
    bisection.
    """
    theta = np.asarray(theta, dtype=float)
    target = theta.ravel().copy()
    lo = target - np.pi
    hi = target + np.pi
    for _ in range(64):
        glo = psi(lo) - target
        ghi = psi(hi) - target
        bad_lo = glo > 0
        bad_hi = ghi < 0
        if not (bad_lo.any() or bad_hi.any()):
            break
        width = hi - lo
        lo = np.where(bad_lo, lo - width, lo)
        hi = np.where(bad_hi, hi + width, hi)
    else:
        raise RuntimeError("could not bracket the inverse; is the map monotone?")

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        g = psi(x) - target
        done = np.abs(g) <= tol * np.maximum(1.0, np.abs(target))
        if done.all():
            return x.reshape(theta.shape)
        lo = np.where(g < 0, x, lo)
        hi = np.where(g > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = x - g / psi.derivative(x)
        inside = (step > lo) & (step < hi) & np.isfinite(step)
        x = np.where(done, x, np.where(inside, step, 0.5 * (lo + hi)))
    raise RuntimeError("inverse did not converge")


def _default_grid(n_trunc: int, n_points) -> int:
    return 8 * n_trunc if n_points is None else check_grid(n_points, n_trunc, factor=8)


def act_on_function(psi: CircleDiffeo, u: FourierVector, n_points: int | None = None) -> FourierVector:
    """``psi . u``: composition with ``psi^{-1}``, mean removed, truncated to N."""
    n_points = _default_grid(u.n_trunc, n_points)
    x = psi.inverse(grid(n_points))
    return analyze(evaluate(u, x), u.n_trunc)


def i_matrix(psi: CircleDiffeo, n_trunc: int, n_points: int | None = None, rows: int | None = None):
    """Matrix ``I[n, m]`` of ``psi`` in the plain Fourier basis.

    Columns are the FFT of ``exp(i m psi^{-1}(theta_j))``.  ``rows`` sets the
    row truncation (defaults to ``n_trunc``); it may be as large as
    ``n_points // 2 - 1`` to expose the spectral tail.
    """
    n_trunc = check_n_trunc(n_trunc)
    n_points = _default_grid(n_trunc, n_points)
    rows = n_trunc if rows is None else int(rows)
    if not 1 <= rows < n_points // 2:
        raise ValueError(f"rows must lie in [1, {n_points // 2 - 1}]")
    x = psi.inverse(grid(n_points))
    samples = np.exp(1j * np.multiply.outer(x, modes(n_trunc)))
    spectrum = np.fft.fft(samples, axis=0) / n_points
    return spectrum[modes(rows) % n_points, :]


def embed(psi: CircleDiffeo, n_trunc: int, n_points: int | None = None) -> np.ndarray:
    """Operator of ``psi`` in the omega basis: ``f(n) I[n, m] / f(m)``."""
    f = basis_scale(n_trunc)
    return f[:, None] * i_matrix(psi, n_trunc, n_points) / f[None, :]


@dataclass(frozen=True)
class DecayReport:
    """Column sums ``S_m = sum_n |n| |I[n, m]|^2`` and corner sums.

    ``corner_neg`` sums ``|n| |I[n,m]|^2`` over ``n > 0, m < 0`` (the squared
    ``||.||_2`` seminorm of the embedded operator); ``corner_pos`` over
    ``n < 0, m > 0``.
    """

    modes: np.ndarray
    column_sums: np.ndarray
    corner_neg: float
    corner_pos: float
    rows: int = field(default=0)

    @property
    def ratios(self) -> np.ndarray:
        return self.column_sums / np.abs(self.modes)

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    def rows_table(self):
        return [
            (int(m), float(s), float(r))
            for m, s, r in zip(self.modes, self.column_sums, self.ratios)
        ]


def decay_report(psi: CircleDiffeo, n_trunc: int, n_points: int | None = None, rows: int | None = None) -> DecayReport:
    """Bounded-growth diagnostics for the columns of ``I``.

    Row sums run over every resolved frequency (``|n| < n_points / 2``) unless
    ``rows`` is given, so that only the column range is truncated.
    """
    n_points = _default_grid(n_trunc, n_points)
    rows = n_points // 2 - 1 if rows is None else rows
    I = i_matrix(psi, n_trunc, n_points, rows=rows)
    n = modes(rows)[:, None]
    m = modes(n_trunc)[None, :]
    weighted = np.abs(n) * np.abs(I) ** 2
    return DecayReport(
        modes=modes(n_trunc),
        column_sums=weighted.sum(axis=0),
        corner_neg=float(weighted[(n > 0) & (m < 0)].sum()),
        corner_pos=float(weighted[(n < 0) & (m > 0)].sum()),
        rows=rows,
    )


def _s_table(m, n):
    """Phase ``s(m, n)``: -i, 1, 1, i by sign quadrant."""
    return np.where(
        (m > 0) & (n > 0), -1j, np.where((m < 0) & (n < 0), 1j, 1.0 + 0j)
    )


def vector_field_matrix(kind: str, index: int, n_trunc: int) -> np.ndarray:
    """Omega-basis matrix of the vector field ``cos(l theta)`` or ``sin(k theta)``.

    Parameters
    ----------
    kind : {"cos", "sin"}
    index : int
        ``l >= 0`` for cosine, ``k >= 1`` for sine.
    n_trunc : int
    """
    m = modes(n_trunc)[:, None]
    n = modes(n_trunc)[None, :]
    up = (m - n == index).astype(float)
    down = (n - m == index).astype(float)
    amp = 0.5 * np.sqrt(np.abs(m * n))
    if kind == "cos":
        if index < 0:
            raise ValueError("cosine index must be >= 0")
        return _s_table(m, n) * amp * (up + down)
    if kind == "sin":
        if index < 1:
            raise ValueError("sine index must be >= 1")
        return _s_table(m, n) * (-1j) * amp * (up - down)
    raise ValueError(f"unknown vector field kind {kind!r}; expected 'cos' or 'sin'")


def cos_field(l: int) -> Callable:
    return lambda theta: np.cos(l * np.asarray(theta))


def sin_field(k: int) -> Callable:
    return lambda theta: np.sin(k * np.asarray(theta))


def lie_action(field_fn: Callable, u: FourierVector, n_points: int | None = None) -> FourierVector:
    """Infinitesimal action ``-u' X`` of a real vector field, mean removed.

    Raises
    ------
    ValueError
        If the field takes non-real values on the grid.
    """
    n_points = _default_grid(u.n_trunc, n_points)
    X = np.asarray(field_fn(grid(n_points)))
    if np.iscomplexobj(X):
        if np.max(np.abs(X.imag)) > 1e-12:
            raise ValueError("vector field must be real-valued")
        X = X.real
    X = np.broadcast_to(X, (n_points,))
    return analyze(-synthesize(u.derivative(), n_points) * X, u.n_trunc)


def counterexample_operator(n_trunc: int) -> np.ndarray:
    """Symplectic operator that no diffeomorphism produces.

    Identity except on the ``+-1`` modes, where it is
    ``[[sqrt2, i], [-i, sqrt2]]`` in the order (1, -1).
    """
    n = check_n_trunc(n_trunc)
    A = np.eye(2 * n, dtype=complex)
    p1, m1 = n, n - 1
    A[p1, p1] = A[m1, m1] = np.sqrt(2.0)
    A[p1, m1] = 1j
    A[m1, p1] = -1j
    return A


def counterexample_curve(n_samples: int, n_trunc: int = 1) -> np.ndarray:
    """Values of ``A e_tilde_1`` at ``n_samples`` equispaced angles."""
    A = counterexample_operator(n_trunc)
    e1 = omega_basis_vector(1, n_trunc)
    image = FourierVector(A @ (basis_scale(n_trunc) * e1.coeffs) / basis_scale(n_trunc))
    return evaluate(image, grid(int(n_samples)))


def embed_rect(psi: CircleDiffeo, n_trunc: int, n_points: int | None = None, rows: int | None = None) -> np.ndarray:
    """Columns ``|m| <= n_trunc`` of the embedding with ``rows`` output modes."""
    n_points = _default_grid(n_trunc, n_points)
    rows = n_trunc if rows is None else int(rows)
    I = i_matrix(psi, n_trunc, n_points, rows=rows)
    return basis_scale(rows)[:, None] * I / basis_scale(n_trunc)[None, :]


def interior_residuals(psi: CircleDiffeo, phi: CircleDiffeo, n_trunc: int,
                       n_points: int | None = None, interior: int | None = None) -> dict:
    """Form-preservation and homomorphism residuals on the interior block.

    Truncation cuts off sums over intermediate modes, so the identities are
    tested on columns and rows ``|m|, |n| <= interior`` (default ``N // 2``)
    while the inner sums run over the full resolved spectrum:

    * ``A^T J A = J`` and ``A^# A = I`` sum over every output mode
      ``|k| < M / 2``;
    * ``embed(psi o phi) = embed(psi) embed(phi)`` sums over
      ``|k| < M / 4``, the factor ``embed(psi)`` being sampled on ``2 M``
      points so that those columns stay resolved.
    """
    from .operators import j_matrix, transpose

    n_trunc = check_n_trunc(n_trunc)
    n_points = _default_grid(n_trunc, n_points)
    K = n_trunc // 2 if interior is None else int(interior)
    if not 1 <= K <= n_trunc:
        raise ValueError(f"interior must lie in [1, {n_trunc}]")
    inner = slice(n_trunc - K, n_trunc + K)
    full = n_points // 2 - 1
    signs = np.outer(np.sign(modes(n_trunc)), np.sign(modes(full)))
    eye = np.eye(2 * n_trunc)
    pres = sharp_inv = 0.0
    for f in (psi, phi, psi @ phi):
        A = embed_rect(f, n_trunc, n_points, rows=full)
        G = transpose(A) @ j_matrix(full) @ A - j_matrix(n_trunc)
        S = (signs * transpose(A)) @ A - eye
        pres = max(pres, float(np.max(np.abs(G[inner, inner]))))
        sharp_inv = max(sharp_inv, float(np.max(np.abs(S[inner, inner]))))

    mid = max(n_trunc, n_points // 4 - 1)
    A = embed_rect(psi, mid, 2 * n_points, rows=n_trunc)
    B = embed_rect(phi, n_trunc, n_points, rows=mid)
    C = embed(psi @ phi, n_trunc, n_points)
    hom = float(np.max(np.abs((A @ B - C)[inner, inner])))
    return {"interior": K, "preserves_omega": pres, "sharp_inverse": sharp_inv, "homomorphism": hom}
