"""Brownian motion on sp_HS and the group-valued process ``X_t = I + Y_t``.

The Ito equation ``dX = X dW + 1/2 X D dt`` is stepped with explicit
Euler-Maruyama; a Stratonovich midpoint scheme for ``dX = X o dW`` is
available for comparison.  ``W`` is expanded on the canonical basis,
``dW = sum_xi sqrt(q(xi) dt) zeta_xi xi``.

Random numbers: every path owns a ``numpy.random.Generator`` (PCG64) seeded
from ``SeedSequence([seed, path_index])``; normals come from numpy's
ziggurat sampler and are drawn per path in step order, so results do not
depend on how paths are batched or threaded.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_n_trunc, check_positive
from .lie_algebra import (
    CovarianceSpec,
    DriftMatrix,
    basis_tensor,
    drift_D,
    resolve_weights,
)
from .operators import sharp

__all__ = [
    "RNG_SCHEME",
    "RngStream",
    "SdePath",
    "SimulationResult",
    "brownian_increment",
    "euler_step",
    "midpoint_step",
    "defect",
    "simulate",
    "refinement_study",
    "mean_flow",
    "sharp_path_consistency",
    "l20_norm",
    "lipschitz_report",
    "trace_identity_residual",
]

RNG_SCHEME = "sympinf-rng/1: PCG64(SeedSequence([seed, path])), ziggurat normals, step-major"
SCHEMES = ("euler", "midpoint")
BLOCK = 256


@dataclass
class RngStream:
    """Reproducible normal stream for one path."""

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        seq = np.random.SeedSequence([int(self.seed) & (2**64 - 1), int(self.stream_id)])
        self.generator = np.random.default_rng(seq)

    def normals(self, *shape) -> np.ndarray:
        return self.generator.standard_normal(shape)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _increments(z, sqrt_q, T, dt):
    """Map normals ``z[..., dim]`` to sp_HS increments ``[..., 2N, 2N]``."""
    dim, n2, _ = T.shape
    coeffs = z * (sqrt_q * math.sqrt(dt))
    return (coeffs.reshape(-1, dim) @ T.reshape(dim, -1)).reshape(z.shape[:-1] + (n2, n2))


def brownian_increment(Q, dt: float, rng, n_trunc: int) -> np.ndarray:
    """One increment ``Delta W`` over a step of length ``dt``."""
    dt = check_positive(dt, "dt")
    n_trunc = check_n_trunc(n_trunc)
    q = resolve_weights(Q, n_trunc)
    T = basis_tensor(n_trunc)
    z = _as_generator(rng).standard_normal(T.shape[0])
    return _increments(z, np.sqrt(q), T, dt)


def _drift_diag(D) -> np.ndarray:
    return D.diag if isinstance(D, DriftMatrix) else np.asarray(D, dtype=float)


def euler_step(X, dW, D, dt: float):
    """``X + X dW + 1/2 X D dt`` (stacks of matrices allowed)."""
    return X + X @ dW + (0.5 * dt) * X * _drift_diag(D)


def midpoint_step(X, dW, D=None, dt: float = 0.0, iterations: int = 3):
    """Stratonovich midpoint ``X' = X + 1/2 (X + X') dW`` by fixed-point iteration.

    ``D`` and ``dt`` are accepted for signature parity with
    :func:`euler_step` and ignored: the Stratonovich form carries no drift.
    """
    Xn = X + X @ dW
    for _ in range(iterations):
        Xn = X + 0.5 * (X + Xn) @ dW
    return Xn


_STEPPERS = {"euler": euler_step, "midpoint": midpoint_step}


def defect(X):
    """``max(|X^# X - I|_HS, |X X^# - I|_HS)``; vectorised over leading axes."""
    X = np.asarray(X)
    Xs = sharp(X)
    eye = np.eye(X.shape[-1])
    left = np.linalg.norm(Xs @ X - eye, axis=(-2, -1))
    right = np.linalg.norm(X @ Xs - eye, axis=(-2, -1))
    out = np.maximum(left, right)
    return float(out) if out.ndim == 0 else out


@dataclass
class SdePath:
    """One simulated trajectory, recorded every ``stride`` steps."""

    times: np.ndarray
    states: np.ndarray
    defects: np.ndarray
    seed: int
    path_id: int
    dt: float
    drift: np.ndarray
    increments: np.ndarray | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class SimulationResult:
    paths: list
    summary: dict


def _n_steps(T: float, dt: float) -> tuple[int, float]:
    T = check_positive(T, "T")
    dt = check_positive(dt, "dt")
    if dt > T * (1 + 1e-12):
        raise ValueError(f"dt={dt} exceeds the horizon T={T}")
    J = max(1, int(round(T / dt)))
    return J, T / J


def _threads(threads) -> int:
    if threads is None:
        threads = os.environ.get("SYMPINF_THREADS", "1")
    try:
        threads = int(threads)
    except ValueError:
        raise ValueError(f"SYMPINF_THREADS must be an integer, got {threads!r}") from None
    return max(1, threads)


def _run_chunk(path_ids, seed, q, T, D, J, dt, stride, scheme, keep_increments):
    n2 = T.shape[-1]
    P = len(path_ids)
    streams = [RngStream(seed, pid) for pid in path_ids]
    step = _STEPPERS[scheme]
    sqrt_q = np.sqrt(q)
    X = np.broadcast_to(np.eye(n2, dtype=complex), (P, n2, n2)).copy()
    rec_idx = list(range(0, J + 1, stride))
    if rec_idx[-1] != J:
        rec_idx.append(J)
    states = np.empty((P, len(rec_idx), n2, n2), dtype=complex)
    states[:, 0] = X
    incs = np.empty((P, J, n2, n2), dtype=complex) if keep_increments else None
    r = 1
    j = 0
    while j < J:
        B = min(BLOCK, J - j)
        z = np.stack([s.normals(B, T.shape[0]) for s in streams])
        dW = _increments(z, sqrt_q, T, dt)
        for b in range(B):
            X = step(X, dW[:, b], D, dt)
            j += 1
            if keep_increments:
                incs[:, j - 1] = dW[:, b]
            if r < len(rec_idx) and j == rec_idx[r]:
                states[:, r] = X
                r += 1
    return states, np.array(rec_idx), incs


def simulate(
    Q=None,
    n_trunc: int = 8,
    T: float = 1.0,
    dt: float = 1e-3,
    seed: int = 0,
    n_paths: int = 1,
    scheme: str = "euler",
    record_every: int | None = None,
    keep_increments: bool = False,
    threads: int | None = None,
) -> SimulationResult:
    """Simulate ``n_paths`` independent trajectories from ``X_0 = I``.

    Parameters
    ----------
    Q : CovarianceSpec or array of weights, optional
        Defaults to ``CovarianceSpec()``.
    n_trunc, T, dt, seed, n_paths
        Truncation, horizon, step, master seed and path count.  ``dt`` is
        adjusted to ``T / round(T / dt)``.
    scheme : {"euler", "midpoint"}
    record_every : int, optional
        Store states every this many steps (default: about 1000 records).
    keep_increments : bool
        Keep every ``Delta W`` (needed by :func:`sharp_path_consistency`).
    threads : int, optional
        Worker threads over path chunks; defaults to ``$SYMPINF_THREADS`` or 1.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    n_trunc = check_n_trunc(n_trunc)
    if int(n_paths) < 1:
        raise ValueError("n_paths must be >= 1")
    Q = CovarianceSpec() if Q is None else Q
    J, dt = _n_steps(T, dt)
    stride = max(1, J // 1000) if record_every is None else max(1, int(record_every))
    q = resolve_weights(Q, n_trunc)
    Tb = basis_tensor(n_trunc)
    D = drift_D(q, n_trunc)

    ids = list(range(int(n_paths)))
    workers = min(_threads(threads), len(ids))
    chunks = [ids[i::workers] for i in range(workers)]
    args = (seed, q, Tb, D, J, dt, stride, scheme, keep_increments)
    if workers == 1:
        outs = [_run_chunk(chunks[0], *args)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(lambda c: _run_chunk(c, *args), chunks))

    by_id = {}
    for chunk, (states, rec_idx, incs) in zip(chunks, outs):
        for k, pid in enumerate(chunk):
            by_id[pid] = SdePath(
                times=rec_idx * dt,
                states=states[k],
                defects=defect(states[k]),
                seed=int(seed),
                path_id=pid,
                dt=dt,
                drift=D.diag.copy(),
                increments=None if incs is None else incs[k],
            )
    paths = [by_id[i] for i in ids]
    return SimulationResult(paths, _summary(paths, n_trunc, T, dt, seed, scheme, D))


def _mean_flow_stats(finals, D, T):
    n = finals.shape[0]
    mean = finals.mean(axis=0)
    exact = np.diag(np.exp(0.5 * T * D.diag)).astype(complex)
    err = np.abs(mean - exact)
    if n > 1:
        std = np.sqrt(np.sum(np.abs(finals - mean) ** 2, axis=0) / (n - 1))
    else:
        std = np.zeros_like(err)
    se = std / math.sqrt(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, err / se, np.where(err <= 1e-12, 0.0, np.inf))
    return mean, exact, err, se, z


def _summary(paths, n_trunc, T, dt, seed, scheme, D):
    finals = np.stack([p.final for p in paths])
    final_defects = np.array([p.defects[-1] for p in paths])
    _, _, err, _, z = _mean_flow_stats(finals, D, T)
    return {
        "schema": "sympinf.simulate/1",
        "rng": RNG_SCHEME,
        "scheme": scheme,
        "seed": int(seed),
        "N": int(n_trunc),
        "dt": float(dt),
        "T": float(T),
        "n_paths": len(paths),
        "max_defect": float(max(p.defects.max() for p in paths)),
        "mean_defect": float(final_defects.mean()),
        "mean_flow_residual": float(err.max()),
        "mean_flow_max_z": float(z.max()),
    }


def refinement_study(
    Q=None,
    n_trunc: int = 8,
    T: float = 1.0,
    dts=(1e-2, 1e-3, 1e-4),
    seed: int = 0,
    n_paths: int = 64,
    scheme: str = "euler",
) -> dict:
    """Defect at ``T`` for several step sizes driven by the same Brownian path.

    Normals are drawn at the finest step; coarser increments are sums of the
    fine ones, so the comparison is pathwise.

    Returns
    -------
    dict
        ``{dt: array of final defects, shape (n_paths,)}``.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    n_trunc = check_n_trunc(n_trunc)
    dts = sorted((float(d) for d in dts), reverse=True)
    fine = dts[-1]
    J, fine = _n_steps(T, fine)
    factors = []
    for d in dts:
        f = d / fine
        if abs(f - round(f)) > 1e-6 or J % int(round(f)):
            raise ValueError(f"step {d} is not a divisor-compatible multiple of {fine}")
        factors.append(int(round(f)))
    block = factors[0]
    Q = CovarianceSpec() if Q is None else Q
    q = resolve_weights(Q, n_trunc)
    sqrt_q = np.sqrt(q)
    Tb = basis_tensor(n_trunc)
    dim, n2, _ = Tb.shape
    D = drift_D(q, n_trunc)
    step = _STEPPERS[scheme]
    streams = [RngStream(seed, pid) for pid in range(n_paths)]
    X = [np.broadcast_to(np.eye(n2, dtype=complex), (n_paths, n2, n2)).copy() for _ in factors]
    for _ in range(J // block):
        z = np.stack([s.normals(block, dim) for s in streams])
        for li, f in enumerate(factors):
            zc = z.reshape(n_paths, block // f, f, dim).sum(axis=2) / math.sqrt(f)
            dW = _increments(zc, sqrt_q, Tb, fine * f)
            Xl = X[li]
            for s in range(block // f):
                Xl = step(Xl, dW[:, s], D, fine * f)
            X[li] = Xl
    return {d: defect(Xl) for d, Xl in zip(dts, X)}


def mean_flow(Q=None, n_trunc: int = 4, T: float = 1.0, dt: float = 1e-3, seed: int = 0,
              n_paths: int = 1024, n_sigma: float = 3.0, threads=None) -> dict:
    """Compare the Monte-Carlo mean of ``X_T`` with ``exp(T D / 2)``.

    The mean of the Ito equation solves ``dE = 1/2 E D dt``; with ``D``
    diagonal the exponential is entrywise.  Each complex entry passes if
    ``|mean - exact| <= n_sigma * std / sqrt(n_paths)``.
    """
    res = simulate(Q, n_trunc, T, dt, seed, n_paths, record_every=10**9, threads=threads)
    finals = np.stack([p.final for p in res.paths])
    D = DriftMatrix(res.paths[0].drift)
    mean, exact, err, se, z = _mean_flow_stats(finals, D, T)
    return {
        "schema": "sympinf.meanflow/1",
        "seed": int(seed),
        "N": int(n_trunc),
        "T": float(T),
        "dt": float(res.summary["dt"]),
        "n_paths": int(n_paths),
        "n_sigma": float(n_sigma),
        "max_abs_error": float(err.max()),
        "max_z": float(z.max()),
        "passed": bool(np.all(z <= n_sigma)),
        "mean": mean,
        "exact": exact,
        "standard_error": se,
    }


def sharp_path_consistency(path: SdePath) -> float:
    """Rerun the ``#``-side recursion and compare with ``(X_j - I)^#``.

    Uses ``Y'^# = Y^# + dW^# (I + Y^#) + 1/2 D^# (I + Y^#) dt``.  The path
    must carry its increments and have been recorded at every step.
    """
    if path.increments is None:
        raise ValueError("path was simulated without keep_increments=True")
    J = path.increments.shape[0]
    if path.states.shape[0] != J + 1:
        raise ValueError("path must be recorded at every step (record_every=1)")
    n2 = path.states.shape[-1]
    eye = np.eye(n2)
    Dm = np.diag(path.drift).astype(complex)
    Ds = sharp(Dm)
    Ys = np.zeros((n2, n2), dtype=complex)
    worst = 0.0
    for j in range(J):
        G = eye + Ys
        Ys = Ys + sharp(path.increments[j]) @ G + 0.5 * path.dt * Ds @ G
        target = sharp(path.states[j + 1] - eye)
        worst = max(worst, float(np.max(np.abs(Ys - target))))
    return worst


def l20_norm(Y, Q, n_trunc: int) -> float:
    """``|B(Y)|_{L2^0}`` with ``B(Y) A = (I + Y) A``: ``sqrt(sum q |(I+Y) xi|_HS^2)``."""
    return _l20(np.eye(2 * n_trunc) + np.asarray(Y), resolve_weights(Q, n_trunc), basis_tensor(n_trunc))


def _l20(M, q, T):
    prods = M @ T
    return float(np.sqrt(np.sum(q * np.sum(np.abs(prods) ** 2, axis=(1, 2)))))


def lipschitz_report(Q=None, n_trunc: int = 4, n_samples: int = 100, seed: int = 0,
                     scale: float = 1.0) -> list:
    """Check the Lipschitz and linear-growth hypotheses on random pairs in sp_HS.

    Constants:

    * cond. 2, ``|B(Y1) - B(Y2)| <= C1 |Y1 - Y2|`` with
      ``C1 = sqrt(Tr Q) * max ||xi||_op``;
    * cond. 3, ``|B(Y)|^2 <= K1 (1 + |Y|^2)`` with
      ``K1 = 2 Tr Q * max(1, max ||xi||_op^2)``;
    * cond. 5, ``|F(Y1) - F(Y2)| <= C2 |Y1 - Y2|`` with ``C2 = ||D||_op / 2``;
    * cond. 6, ``|F(Y)|^2 <= K2 (1 + |Y|^2)`` with ``K2 = |D|_HS^2 / 2``.

    Returns one dict per condition with the bound and the largest observed
    ratio.
    """
    from .lie_algebra import random_sp

    Q = CovarianceSpec() if Q is None else Q
    n_trunc = check_n_trunc(n_trunc)
    q = resolve_weights(Q, n_trunc)
    T = basis_tensor(n_trunc)
    D = drift_D(q, n_trunc).diag
    eye = np.eye(2 * n_trunc)
    xi_op = max(np.linalg.norm(x, 2) for x in T)
    trQ = float(q.sum())
    consts = {
        2: math.sqrt(trQ) * xi_op,
        3: 2 * trQ * max(1.0, xi_op**2),
        5: 0.5 * float(np.max(np.abs(D))),
        6: 0.5 * float(np.sum(D**2)),
    }
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(consts, 0.0)
    for _ in range(int(n_samples)):
        Y1, Y2 = random_sp(n_trunc, rng, scale=scale, size=2)
        dY = np.linalg.norm(Y1 - Y2)
        worst[2] = max(worst[2], _l20(Y1 - Y2, q, T) / dY)
        worst[3] = max(worst[3], _l20(eye + Y1, q, T) ** 2 / (1 + np.linalg.norm(Y1) ** 2))
        F = lambda Y: 0.5 * (eye + Y) * D  # noqa: E731  (I+Y) D with diagonal D
        worst[5] = max(worst[5], np.linalg.norm(F(Y1) - F(Y2)) / dY)
        worst[6] = max(worst[6], np.linalg.norm(F(Y1)) ** 2 / (1 + np.linalg.norm(Y1) ** 2))
    return [
        {
            "condition": k,
            "bound": float(consts[k]),
            "max_ratio": float(worst[k]),
            "passed": bool(worst[k] <= consts[k] * (1 + 1e-12)),
        }
        for k in sorted(consts)
    ]


def trace_identity_residual(dim_h: int = 6, dim_u: int = 4, rng=None) -> float:
    """``|Tr(G Phi Phi^*) - Tr(Phi^* G Phi)|`` for random real maps."""
    rng = np.random.default_rng(rng)
    G = rng.standard_normal((dim_h, dim_h))
    Phi = rng.standard_normal((dim_h, dim_u))
    return float(abs(np.trace(G @ Phi @ Phi.T) - np.trace(Phi.T @ G @ Phi)))
