"""The truncated Lie algebra sp_HS, its orthonormal basis, covariance and drift.

``sp_HS`` is the real vector space of ``(2N, 2N)`` matrices with
``A = A_bar`` and ``A + A^# = 0``, carrying the real Hilbert-Schmidt inner
product ``Re Tr(X Y^dagger)``.  Its real dimension is ``N (2N + 1)``.

Generators of the ambient HS space are the matrix units ``e^re_{mn}`` (entry
1 at ``(m, n)``) and ``e^im_{mn}`` (entry ``i``).  Their images under the
four-case formula (:func:`generator_image`) are parallel within each orbit
``{(m,n), (n,m), (-m,-n), (-n,-m)}`` (sign-matched for the ``sgn(mn) < 0``
cases), vanish for ``e^re_{mm}`` with ``m n > 0``, and have norm ``sqrt 2`` on
the diagonal orbits.  :func:`canonical_basis` keeps one representative per
orbit and normalises it.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_n_trunc, check_operator
from .fourier import modes, pos
from .operators import bar, sharp

__all__ = [
    "BasisElement",
    "SpCheck",
    "CovarianceSpec",
    "DriftMatrix",
    "matrix_unit",
    "generator_image",
    "project_pi",
    "canonical_basis",
    "basis_tensor",
    "sp_dimension",
    "is_in_sp",
    "hs_inner",
    "random_sp",
    "drift_D",
    "dmatrix_formula",
    "dmatrix_comparison",
    "sum_xi_oracle",
]

TAGS = ("re", "im")


def sp_dimension(n_trunc: int) -> int:
    n = check_n_trunc(n_trunc)
    return n * (2 * n + 1)


def matrix_unit(tag: str, m: int, n: int, n_trunc: int) -> np.ndarray:
    if tag not in TAGS:
        raise ValueError(f"tag must be 're' or 'im', got {tag!r}")
    E = np.zeros((2 * n_trunc, 2 * n_trunc), dtype=complex)
    E[pos(m, n_trunc), pos(n, n_trunc)] = 1.0 if tag == "re" else 1j
    return E


def generator_image(tag: str, m: int, n: int, n_trunc: int) -> np.ndarray:
    """Four-case image of a matrix unit in sp_HS.

    For ``sgn(mn) > 0``::

        re: (e_{mn} - e_{nm} + e_{-m,-n} - e_{-n,-m}) / 2
        im: (e_{mn} + e_{nm} - e_{-m,-n} - e_{-n,-m}) / 2

    and for ``sgn(mn) < 0``::

        re: (e_{mn} + e_{-n,-m} + e_{-m,-n} + e_{nm}) / 2
        im: (e_{mn} + e_{-n,-m} - e_{-m,-n} - e_{nm}) / 2

    This is twice the orthogonal projection of the unit (see
    :func:`project_pi`).
    """
    u = functools.partial(matrix_unit, tag, n_trunc=n_trunc)
    if m * n > 0:
        if tag == "re":
            return 0.5 * (u(m, n) - u(n, m) + u(-m, -n) - u(-n, -m))
        return 0.5 * (u(m, n) + u(n, m) - u(-m, -n) - u(-n, -m))
    if tag == "re":
        return 0.5 * (u(m, n) + u(-n, -m) + u(-m, -n) + u(n, m))
    return 0.5 * (u(m, n) + u(-n, -m) - u(-m, -n) - u(n, m))


def project_pi(E) -> np.ndarray:
    """Orthogonal projection of HS onto sp_HS (real HS inner product).

    ``A -> A_bar`` and ``A -> -A^#`` are commuting HS isometries of order two
    whose common fixed space is sp_HS, so the projection is their average.
    Works on stacks of matrices.
    """
    E = np.asarray(E, dtype=complex)
    S = sharp(E)
    return 0.25 * (E + bar(E) - S - bar(S))


@dataclass(frozen=True)
class BasisElement:
    """Normalised canonical basis element of sp_HS.

    ``(tag, m, n)`` names the representative generator; ``sign`` is
    ``sgn(mn)``.
    """

    tag: str
    m: int
    n: int
    matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def sign(self) -> int:
        return 1 if self.m * self.n > 0 else -1

    @property
    def key(self) -> tuple:
        return (self.tag, self.m, self.n)


def _representatives(n_trunc: int):
    for p in range(1, n_trunc + 1):
        for q in range(p, n_trunc + 1):
            if p != q:
                yield ("re", p, q)
            yield ("im", p, q)
    for p in range(1, n_trunc + 1):
        for q in range(p, n_trunc + 1):
            yield ("re", p, -q)
            yield ("im", p, -q)


@functools.lru_cache(maxsize=32)
def canonical_basis(n_trunc: int) -> tuple:
    """Orthonormal basis of sp_HS, one element per generator orbit.

    Ordering: compact part (``sgn(mn) > 0``) first, then the ``sgn(mn) < 0``
    part, each by ``(p, q)`` with ``p <= q``.
    """
    n_trunc = check_n_trunc(n_trunc)
    out = []
    for tag, m, n in _representatives(n_trunc):
        X = generator_image(tag, m, n, n_trunc)
        X = X / np.linalg.norm(X)
        X.flags.writeable = False
        out.append(BasisElement(tag, m, n, X))
    if len(out) != sp_dimension(n_trunc):
        raise AssertionError("basis size does not match dim sp(2N)")
    return tuple(out)


@functools.lru_cache(maxsize=32)
def basis_tensor(n_trunc: int) -> np.ndarray:
    """Canonical basis stacked as an array of shape ``(dim, 2N, 2N)``."""
    T = np.stack([b.matrix for b in canonical_basis(n_trunc)])
    T.flags.writeable = False
    return T


def _orbit(tag: str, m: int, n: int) -> tuple:
    """Canonical key of the orbit containing generator ``(tag, m, n)``."""
    if m * n > 0:
        p, q = sorted((abs(m), abs(n)))
        return (tag, p, q)
    p, q = sorted((abs(m), abs(n)))
    return (tag, p, -q)


def hs_inner(X, Y) -> float:
    """Real Hilbert-Schmidt inner product ``Re Tr(X Y^dagger)``."""
    return float(np.real(np.vdot(np.asarray(Y), np.asarray(X))))


@dataclass(frozen=True)
class SpCheck:
    tol: float
    reality: float
    sharp: float

    @property
    def ok(self) -> bool:
        return self.reality <= self.tol and self.sharp <= self.tol

    def __bool__(self) -> bool:
        return self.ok


def is_in_sp(A, tol: float = 1e-10) -> SpCheck:
    """Membership test: ``A = A_bar`` and ``A + A^# = 0``.

    The Hilbert-Schmidt condition on the off-diagonal block holds
    automatically at finite N.
    """
    A, _ = check_operator(A)
    return SpCheck(
        tol=float(tol),
        reality=float(np.max(np.abs(A - bar(A)))),
        sharp=float(np.max(np.abs(A + sharp(A)))),
    )


def random_sp(n_trunc: int, rng, scale: float = 1.0, size=None) -> np.ndarray:
    """Gaussian element(s) of sp_HS with i.i.d. ``N(0, scale^2)`` coordinates."""
    T = basis_tensor(n_trunc)
    shape = (T.shape[0],) if size is None else (size, T.shape[0])
    coords = scale * rng.standard_normal(shape)
    return np.tensordot(coords, T, axes=1)


@dataclass(frozen=True)
class CovarianceSpec:
    """Diagonal covariance on the canonical basis.

    The default weight of the element generated by modes ``(m, n)`` is
    ``c * (|m| |n|)^(-p)``; ``overrides`` maps ``(tag, m, n)`` of any generator
    in an orbit to an explicit weight.
    """

    p: float = 2.0
    c: float = 1.0
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.p) or not np.isfinite(self.c) or self.c < 0:
            raise ValueError("covariance needs finite p and c >= 0")
        clean = {}
        for (tag, m, n), q in dict(self.overrides).items():
            if tag not in TAGS or m == 0 or n == 0:
                raise ValueError(f"bad override key {(tag, m, n)!r}")
            q = float(q)
            if not np.isfinite(q) or q < 0:
                raise ValueError(f"override weight must be finite and >= 0, got {q}")
            key = _orbit(tag, int(m), int(n))
            if key[0] == "re" and key[1] == key[2]:
                raise ValueError(f"generator {(tag, m, n)} has zero image in sp_HS")
            clean[key] = q
        object.__setattr__(self, "overrides", clean)

    def weights(self, n_trunc: int) -> np.ndarray:
        basis = canonical_basis(n_trunc)
        q = np.array([self.c * float(abs(b.m) * abs(b.n)) ** (-self.p) for b in basis])
        for i, b in enumerate(basis):
            if b.key in self.overrides:
                q[i] = self.overrides[b.key]
        return q

    def trace(self, n_trunc: int) -> float:
        return float(self.weights(n_trunc).sum())

    @classmethod
    def zero(cls) -> "CovarianceSpec":
        return cls(c=0.0)

    @classmethod
    def single(cls, tag: str, m: int, n: int, q: float = 1.0) -> "CovarianceSpec":
        """Weight ``q`` on one orbit, zero elsewhere."""
        return cls(c=0.0, overrides={(tag, m, n): q})


def resolve_weights(Q, n_trunc: int) -> np.ndarray:
    """Accept a :class:`CovarianceSpec` or an explicit weight array."""
    if isinstance(Q, CovarianceSpec):
        return Q.weights(n_trunc)
    q = np.asarray(Q, dtype=float)
    if q.shape != (sp_dimension(n_trunc),):
        raise ValueError(f"expected {sp_dimension(n_trunc)} weights, got shape {q.shape}")
    if not np.all(np.isfinite(q)) or np.any(q < 0):
        raise ValueError("weights must be finite and non-negative")
    return q


@dataclass(frozen=True)
class DriftMatrix:
    """Real diagonal Ito correction ``D``; ``diag`` is in storage order."""

    diag: np.ndarray

    @property
    def n_trunc(self) -> int:
        return self.diag.size // 2

    def matrix(self) -> np.ndarray:
        return np.diag(self.diag).astype(complex)

    def __getitem__(self, m: int) -> float:
        return float(self.diag[pos(m, self.n_trunc)])


def drift_D(Q, n_trunc: int) -> DriftMatrix:
    """Drift ``D = -sum_xi q(xi) xi xi^#`` from closed-form diagonal blocks.

    Each normalised element contributes ``-q/4`` (compact, ``sgn(mn) > 0``) or
    ``+q/4`` (``sgn(mn) < 0``) at the four modes ``+-m, +-n``; diagonal orbits
    hit the same mode twice, which accounts for their renormalisation.
    """
    n_trunc = check_n_trunc(n_trunc)
    q = resolve_weights(Q, n_trunc)
    diag = np.zeros(2 * n_trunc)
    for qi, b in zip(q, canonical_basis(n_trunc)):
        if qi == 0:
            continue
        share = -0.25 * qi * b.sign
        for k in (b.m, -b.m, b.n, -b.n):
            diag[pos(k, n_trunc)] += share
    if np.max(np.abs(diag - diag[::-1])) > 1e-14 * max(1.0, np.max(np.abs(diag))):
        raise AssertionError("drift lost its m <-> -m symmetry")
    return DriftMatrix(diag)


def sum_xi_oracle(Q, n_trunc: int) -> np.ndarray:
    """Brute-force ``sum_xi (sqrt(q) xi)(sqrt(q) xi)^#`` by matrix products."""
    q = resolve_weights(Q, n_trunc)
    T = basis_tensor(n_trunc)
    scaled = np.sqrt(q)[:, None, None] * T
    return np.einsum("aij,ajk->ik", scaled, sharp(scaled))


def dmatrix_formula(Q, n_trunc: int) -> np.ndarray:
    """``D_m = -1/4 sgn(m) sum_k sgn(k) [Q^re_{mk} + Q^im_{mk}]`` literally.

    ``Q^tag_{mk}`` is the weight of the basis element whose orbit contains
    generator ``(tag, m, k)``; generators with zero image contribute 0.
    """
    n_trunc = check_n_trunc(n_trunc)
    q = resolve_weights(Q, n_trunc)
    lookup = {b.key: qi for qi, b in zip(q, canonical_basis(n_trunc))}
    out = np.zeros(2 * n_trunc)
    ms = modes(n_trunc)
    for i, m in enumerate(ms):
        total = 0.0
        for k in ms:
            for tag in TAGS:
                total += np.sign(k) * lookup.get(_orbit(tag, int(m), int(k)), 0.0)
        out[i] = -0.25 * np.sign(m) * total
    return out


def dmatrix_comparison(Q, n_trunc: int) -> dict:
    """Least-squares constant ``c`` with ``drift_D ~ c * dmatrix_formula``.

    Reports the fit and the residual so a convention mismatch shows up as a
    number rather than an assertion.
    """
    D = drift_D(Q, n_trunc).diag
    F = dmatrix_formula(Q, n_trunc)
    denom = float(F @ F)
    c = float(D @ F / denom) if denom > 0 else None
    resid = D - (c or 0.0) * F
    return {
        "fitted_constant": c,
        "max_abs_residual": float(np.max(np.abs(resid))),
        "max_abs_difference": float(np.max(np.abs(D - F))),
        "drift": D.tolist(),
        "formula": F.tolist(),
    }
