"""Matrices of bounded operators on the truncated omega space.

An operator is a ``(2N, 2N)`` complex array ``A[pos(m), pos(n)] =
(A e_tilde_n, e_tilde_m)_omega``.  Because storage order is ``-N..-1, 1..N``,
index reversal ``A[::-1, ::-1]`` is the substitution ``(m, n) -> (-m, -n)``.
Positive modes occupy the trailing ``N`` rows/columns.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_n_trunc, check_operator
from .fourier import modes

__all__ = [
    "BlockView",
    "SymplecticChecks",
    "identity",
    "j_matrix",
    "sign_matrix",
    "involution",
    "bar",
    "dagger",
    "transpose",
    "sharp",
    "blocks",
    "norm2",
    "hs_norm",
    "predicates",
    "preserves_omega_residual",
    "invertibility_residual",
    "entry_condition_residual",
    "sharp_inverse_residual",
    "compose",
    "invert",
]

INVOLUTIONS = ("bar", "dagger", "transpose", "sharp")
COND_WARN = 1e12


def identity(n_trunc: int) -> np.ndarray:
    return np.eye(2 * check_n_trunc(n_trunc), dtype=complex)


def j_matrix(n_trunc: int) -> np.ndarray:
    """Hilbert transform: ``J_{m,n} = i sgn(m) delta_{mn}``."""
    return np.diag(1j * np.sign(modes(n_trunc))).astype(complex)


def sign_matrix(n_trunc: int) -> np.ndarray:
    """``sgn(m n)`` as a ``(2N, 2N)`` array."""
    s = np.sign(modes(n_trunc))
    return np.outer(s, s)


def _flip(A):
    return A[..., ::-1, ::-1]


def bar(A):
    """``(A_bar)_{m,n} = conj(A_{-m,-n})``; works on stacks of matrices."""
    return np.conj(_flip(A))


def dagger(A):
    return np.conj(np.swapaxes(A, -1, -2))


def transpose(A):
    """``(A^T)_{m,n} = A_{-n,-m}``."""
    return np.swapaxes(_flip(A), -1, -2)


def sharp(A):
    """Symplectic adjoint ``(A^#)_{m,n} = sgn(mn) A_{-n,-m}``."""
    A = np.asarray(A)
    return sign_matrix(A.shape[-1] // 2) * transpose(A)


_INVOLUTION_FUNCS = {"bar": bar, "dagger": dagger, "transpose": transpose, "sharp": sharp}


def involution(A, kind: str) -> np.ndarray:
    """Apply one of ``bar``, ``dagger``, ``transpose``, ``sharp``."""
    try:
        func = _INVOLUTION_FUNCS[kind]
    except KeyError:
        raise ValueError(f"unknown involution {kind!r}; expected one of {INVOLUTIONS}") from None
    A, _ = check_operator(A)
    return func(A)


class BlockView(NamedTuple):
    """Blocks of ``A`` split by the sign of row/column mode.

    ``a`` maps positive to positive modes, ``b`` negative to positive,
    ``c`` positive to negative, ``d`` negative to negative.  Rows and
    columns inside each block follow storage order.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def assemble(self) -> np.ndarray:
        return np.block([[self.d, self.c], [self.b, self.a]])


def blocks(A) -> BlockView:
    A, n = check_operator(A)
    return BlockView(
        a=A[n:, n:].copy(), b=A[n:, :n].copy(), c=A[:n, n:].copy(), d=A[:n, :n].copy()
    )


def norm2(A) -> float:
    """Hilbert-Schmidt norm of the block ``b`` (a seminorm)."""
    return float(np.linalg.norm(blocks(A).b))


def hs_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A)))


def _sup(R) -> float:
    return float(np.max(np.abs(R))) if np.size(R) else 0.0


def reality_residual(A) -> float:
    return _sup(A - bar(A))


def preserves_omega_residual(A) -> float:
    """``max |A^T J A - J|``."""
    A, n = check_operator(A)
    J = j_matrix(n)
    return _sup(transpose(A) @ J @ A - J)


def invertibility_residual(A) -> float:
    """``max |A J A^T - J|``; with form preservation this is invertibility."""
    A, n = check_operator(A)
    J = j_matrix(n)
    return _sup(A @ J @ transpose(A) - J)


def entry_condition_residual(A) -> float:
    """Residual of ``sum_k sgn(mk) A_{k,m} conj(A_{k,n}) = delta_{mn}``.

    Summed entrywise, without using the matrix involutions, so it can serve
    as an independent check of :func:`preserves_omega_residual` for real-form
    matrices.
    """
    A, n = check_operator(A)
    s = np.sign(modes(n))
    S = np.einsum("m,k,km,kn->mn", s, s, A, np.conj(A))
    return _sup(S - np.eye(2 * n))


def sharp_inverse_residual(A) -> float:
    """``max(|A^# A - I|, |A A^# - I|)``."""
    A, n = check_operator(A)
    As = sharp(A)
    eye = np.eye(2 * n)
    return max(_sup(As @ A - eye), _sup(A @ As - eye))


@dataclass(frozen=True)
class SymplecticChecks:
    """Outcome of :func:`predicates` with the residual behind each flag."""

    tol: float
    reality: float
    preserves: float
    invertibility: float
    sharp_inverse: float

    @property
    def is_real(self) -> bool:
        return self.reality <= self.tol

    @property
    def preserves_omega(self) -> bool:
        return self.preserves <= self.tol

    @property
    def is_invertible_symplectic(self) -> bool:
        return self.preserves_omega and self.invertibility <= self.tol

    @property
    def is_symplectic(self) -> bool:
        return self.is_real and self.sharp_inverse <= self.tol

    def as_dict(self) -> dict:
        return {
            "tol": self.tol,
            "is_real": self.is_real,
            "preserves_omega": self.preserves_omega,
            "is_invertible_symplectic": self.is_invertible_symplectic,
            "is_symplectic": self.is_symplectic,
            "reality_residual": self.reality,
            "preserves_residual": self.preserves,
            "invertibility_residual": self.invertibility,
            "sharp_inverse_residual": self.sharp_inverse,
        }


def predicates(A, tol: float = 1e-10) -> SymplecticChecks:
    """Evaluate membership in the (truncated) symplectic group.

    Examples
    --------
    >>> predicates(identity(3)).is_symplectic
    True
    >>> predicates(2 * identity(3)).preserves_omega
    False
    """
    A, _ = check_operator(A)
    return SymplecticChecks(
        tol=float(tol),
        reality=reality_residual(A),
        preserves=preserves_omega_residual(A),
        invertibility=invertibility_residual(A),
        sharp_inverse=sharp_inverse_residual(A),
    )


def compose(A, B) -> np.ndarray:
    A, n = check_operator(A)
    B, k = check_operator(B)
    if n != k:
        raise ValueError(f"truncation mismatch: N={n} vs N={k}")
    return A @ B


def invert(A) -> np.ndarray:
    """Dense LU inverse; warns when the condition number exceeds 1e12.

    Raises
    ------
    numpy.linalg.LinAlgError
        If ``A`` is singular.
    """
    A, _ = check_operator(A)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond):
        raise np.linalg.LinAlgError("matrix is singular")
    if cond > COND_WARN:
        warnings.warn(f"ill-conditioned operator (cond={cond:.3g})", RuntimeWarning, stacklevel=2)
    return np.linalg.inv(A)
