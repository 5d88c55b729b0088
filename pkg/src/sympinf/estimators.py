"""scikit-learn style wrappers over the functional core.

The wrappers hold configuration as constructor parameters (so ``get_params``
/ ``set_params`` and ``sklearn.base.clone`` work) and store fitted state in
trailing-underscore attributes.  They add no numerics of their own.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_grid, check_n_trunc
from .diffeo import CircleDiffeo, decay_report, embed, interior_residuals, make_diffeo
from .fourier import FourierVector, analyze, basis_scale, modes, synthesize
from .lie_algebra import CovarianceSpec, drift_D, resolve_weights
from .operators import predicates
from .sde import simulate

__all__ = ["FourierTransformer", "DiffeoEmbedding", "SymplecticBrownianMotion"]


def _rows(X, width=None, name="X", dtype=float):
    X = np.asarray(X, dtype=dtype)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {X.shape}")
    if width is not None and X.shape[1] != width:
        raise ValueError(f"{name} has {X.shape[1]} columns, expected {width}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or Inf")
    return X


class FourierTransformer(TransformerMixin, BaseEstimator):
    """Samples on a uniform grid <-> truncated Fourier coefficients.

    Parameters
    ----------
    n_trunc : int
        Number of positive modes ``N`` kept.
    omega_basis : bool
        Return coordinates in the orthonormal omega basis instead of plain
        Fourier coefficients.

    Each row of ``X`` is one function sampled at ``2 pi j / M``.
    """

    def __init__(self, n_trunc=8, omega_basis=False):
        self.n_trunc = n_trunc
        self.omega_basis = omega_basis

    def fit(self, X, y=None):
        n = check_n_trunc(self.n_trunc)
        X = _rows(X, dtype=complex)
        self.n_points_ = check_grid(X.shape[1], n)
        self.modes_ = modes(n)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_points_")
        X = _rows(X, self.n_points_, dtype=complex)
        out = np.stack([analyze(row, self.n_trunc).coeffs for row in X])
        if self.omega_basis:
            out = out * basis_scale(self.n_trunc)
        return out

    def inverse_transform(self, C):
        check_is_fitted(self, "n_points_")
        C = _rows(C, 2 * self.n_trunc, "C", dtype=complex)
        if self.omega_basis:
            C = C / basis_scale(self.n_trunc)
        return np.stack([synthesize(FourierVector(c), self.n_points_) for c in C])


class DiffeoEmbedding(TransformerMixin, BaseEstimator):
    """Operator of a circle diffeomorphism acting on omega-basis coordinates.

    ``fit`` accepts either a :class:`~sympinf.diffeo.CircleDiffeo` or an array
    ``[a_1..a_K, b_1..b_K, shift]`` of trigonometric coefficients.  After
    fitting, ``operator_`` holds the ``(2N, 2N)`` matrix, ``checks_`` the
    group predicates of the full block, ``interior_`` the interior-block
    residuals and ``decay_`` the column-growth report.  ``transform`` applies
    the operator to rows of omega-basis coordinates.
    """

    def __init__(self, n_trunc=16, n_points=None, tol=1e-6):
        self.n_trunc = n_trunc
        self.n_points = n_points
        self.tol = tol

    def _diffeo(self, psi):
        if isinstance(psi, CircleDiffeo):
            return psi
        c = np.asarray(psi, dtype=float).ravel()
        if c.size % 2 != 1:
            raise ValueError("coefficient array must be [a_1..a_K, b_1..b_K, shift]")
        K = c.size // 2
        return make_diffeo(c[:K], c[K:2 * K], float(c[-1]))

    def fit(self, psi, y=None):
        n = check_n_trunc(self.n_trunc)
        self.diffeo_ = self._diffeo(psi)
        M = self.n_points or 8 * n
        self.operator_ = embed(self.diffeo_, n, M)
        self.checks_ = predicates(self.operator_, self.tol)
        self.interior_ = interior_residuals(self.diffeo_, self.diffeo_, n, M)
        self.decay_ = decay_report(self.diffeo_, n, M)
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = _rows(X, 2 * self.n_trunc, dtype=complex)
        return X @ self.operator_.T


class SymplecticBrownianMotion(BaseEstimator):
    """Brownian motion ``X_t`` on the truncated group driven by covariance ``Q``.

    Parameters
    ----------
    n_trunc : int
    covariance : CovarianceSpec, optional
        Defaults to ``CovarianceSpec()``.
    dt : float
    scheme : {"euler", "midpoint"}
    random_state : int

    ``fit`` resolves the weights (``weights_``) and the Ito drift
    (``drift_``); it takes no data.  ``sample`` simulates paths and
    ``predict_mean`` returns the exact mean ``exp(t D / 2)``.
    """

    def __init__(self, n_trunc=8, covariance=None, dt=1e-3, scheme="euler", random_state=0):
        self.n_trunc = n_trunc
        self.covariance = covariance
        self.dt = dt
        self.scheme = scheme
        self.random_state = random_state

    def fit(self, X=None, y=None):
        n = check_n_trunc(self.n_trunc)
        self.covariance_ = CovarianceSpec() if self.covariance is None else self.covariance
        self.weights_ = resolve_weights(self.covariance_, n)
        self.drift_ = drift_D(self.weights_, n)
        return self

    def sample(self, T=1.0, n_paths=1, record_every=None, keep_increments=False):
        check_is_fitted(self, "drift_")
        return simulate(self.weights_, self.n_trunc, T, self.dt, self.random_state, n_paths,
                        self.scheme, record_every, keep_increments)

    def predict_mean(self, T):
        """``E[X_T] = exp(T D / 2)``; ``T`` may be a scalar or 1-D array."""
        check_is_fitted(self, "drift_")
        scalar = np.ndim(T) == 0
        T = np.atleast_1d(np.asarray(T, dtype=float))
        out = np.stack([expm(0.5 * t * self.drift_.matrix()) for t in T])
        return out[0] if scalar else out
