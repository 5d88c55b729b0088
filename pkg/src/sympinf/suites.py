"""Randomised property suites shared by the command line and the tests."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .fourier import FourierVector, hilbert_J, inner_omega, modes, omega, synthesize
from .lie_algebra import random_sp
from .operators import (
    bar,
    dagger,
    entry_condition_residual,
    invert,
    j_matrix,
    predicates,
    sharp,
    transpose,
)

__all__ = ["random_vector", "random_symplectic", "algebra_suite", "symplectic_suite"]


def random_vector(n_trunc: int, rng) -> FourierVector:
    """Gaussian coefficients damped like ``|m|^-1`` so the H^1/2 norm stays O(1)."""
    m = np.abs(modes(n_trunc))
    c = (rng.standard_normal(2 * n_trunc) + 1j * rng.standard_normal(2 * n_trunc)) / m
    return FourierVector(c)


def random_symplectic(n_trunc: int, rng, factors: int = 3, scale: float = 0.3) -> np.ndarray:
    """Product of exponentials of random sp elements."""
    A = np.eye(2 * n_trunc, dtype=complex)
    for _ in range(factors):
        A = A @ expm(random_sp(n_trunc, rng, scale=scale))
    return A


def algebra_suite(n_trunc: int = 8, n_instances: int = 500, seed: int = 0) -> dict:
    """Largest residual of each algebraic identity over random instances.

    ``omega_quadrature`` compares the coefficient formula for ``omega`` with
    ``(1/2pi) int u v' dtheta`` evaluated on a grid; ``norm_identity`` checks
    ``(u, u)_omega = sum |n| |u_hat(n)|^2`` and ``(u, v)_omega =
    -omega(u, J conj(v))``.
    """
    rng = np.random.default_rng(seed)
    N = n_trunc
    n2 = 2 * N
    M = 8 * N
    J = j_matrix(N)
    weight = np.abs(modes(N))
    worst = dict.fromkeys(
        ["involutions", "sharp_product", "j_squared", "omega_antisymmetry",
         "omega_quadrature", "norm_identity"],
        0.0,
    )
    worst["j_squared"] = float(np.max(np.abs(J @ J + np.eye(n2))))
    for _ in range(n_instances):
        A = rng.standard_normal((n2, n2)) + 1j * rng.standard_normal((n2, n2))
        B = rng.standard_normal((n2, n2)) + 1j * rng.standard_normal((n2, n2))
        for f in (bar, dagger, transpose, sharp):
            worst["involutions"] = max(worst["involutions"], float(np.max(np.abs(f(f(A)) - A))))
        worst["sharp_product"] = max(
            worst["sharp_product"], float(np.max(np.abs(sharp(A @ B) - sharp(B) @ sharp(A))))
        )
        u, v = random_vector(N, rng), random_vector(N, rng)
        w = omega(u, v)
        worst["omega_antisymmetry"] = max(worst["omega_antisymmetry"], abs(w + omega(v, u)))
        quad = np.mean(synthesize(u, M) * synthesize(v.derivative(), M))
        worst["omega_quadrature"] = max(worst["omega_quadrature"], abs(w - quad))
        direct = float(np.sum(weight * np.abs(u.coeffs) ** 2))
        worst["norm_identity"] = max(
            worst["norm_identity"],
            abs(inner_omega(u, u) - direct),
            abs(inner_omega(u, v) + omega(u, hilbert_J(v.conj()))),
        )
    return {k: float(v) for k, v in worst.items()}


def symplectic_suite(n_trunc: int = 8, n_instances: int = 100, seed: int = 0, tol: float = 1e-9) -> dict:
    """Agreement of the membership criteria, and closure, on random group elements.

    Each instance is tested with the exact element and with a perturbed copy
    (which must fail every criterion), so agreement covers both verdicts.
    """
    rng = np.random.default_rng(seed)
    disagreements = 0
    passes = 0
    closure = 0.0
    for _ in range(n_instances):
        A = random_symplectic(n_trunc, rng)
        B = random_symplectic(n_trunc, rng)
        for X in (A, A + 1e-3 * np.eye(2 * n_trunc)):
            c = predicates(X, tol)
            verdicts = {
                c.preserves_omega,
                c.is_invertible_symplectic,
                c.is_symplectic,
                entry_condition_residual(X) <= tol,
            }
            disagreements += len(verdicts) > 1
            passes += c.is_symplectic
        for X in (A @ B, invert(A)):
            c = predicates(X, tol)
            closure = max(closure, c.preserves, c.invertibility, c.sharp_inverse, c.reality)
    return {
        "instances": n_instances,
        "disagreements": disagreements,
        "exact_elements_passing": passes,
        "closure_residual": float(closure),
    }
