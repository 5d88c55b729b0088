"""Command-line front end.

Exit codes: 0 success, 1 validation or input error, 2 a numerical check
exceeded its tolerance.  Every run writes ``config.json`` plus the
command's JSON report and CSV tables into ``--out``; existing files are
never replaced unless ``--force`` is given.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from ._validation import check_grid, check_n_trunc, check_positive
from .diffeo import (
    counterexample_curve,
    counterexample_operator,
    decay_report,
    embed,
    interior_residuals,
    make_diffeo,
    rotation,
)
from .fourier import modes
from .lie_algebra import (
    CovarianceSpec,
    dmatrix_comparison,
    drift_D,
    resolve_weights,
    sum_xi_oracle,
)
from .operators import norm2, predicates
from .sde import mean_flow, simulate
from .suites import algebra_suite, symplectic_suite

__all__ = ["RunConfig", "ValidationError", "build_parser", "run", "main"]

COMMANDS = ("check", "embed", "counterexample", "drift", "simulate", "meanflow")

DEFAULT_TOLS = {
    "check": {"identity": 1e-10, "symplectic": 1e-9},
    "embed": {"omega": 1e-6, "homomorphism": 1e-5},
    "counterexample": {"ellipse": 1e-10, "symplectic": 1e-12},
    "drift": {"oracle": 1e-12},
    "simulate": {"max_defect": math.inf},
    "meanflow": {"n_sigma": 3.0},
}


class ValidationError(ValueError):
    """Bad command line, configuration or input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


@dataclass
class RunConfig:
    """Validated parameters of one command invocation."""

    command: str
    N: int = 8
    M: int | None = None
    dt: float = 1e-3
    T: float = 1.0
    n_paths: int = 64
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    cov: str | None = None
    diffeo: str | None = None
    out: str = "sympinf_out"
    samples: int = 360
    scheme: str = "euler"
    record_every: int | None = None
    force: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        try:
            self.N = check_n_trunc(self.N)
            if self.M is not None:
                self.M = check_grid(self.M, self.N)
            self.dt = check_positive(self.dt, "dt")
            self.T = check_positive(self.T, "T")
        except (TypeError, ValueError) as exc:
            raise ValidationError(str(exc)) from exc
        if self.dt > self.T:
            raise ValidationError(f"dt={self.dt} exceeds T={self.T}")
        if self.n_paths < 1:
            raise ValidationError("--paths must be >= 1")
        if self.samples < 1:
            raise ValidationError("--samples must be >= 1")
        if self.record_every is not None and self.record_every < 1:
            raise ValidationError("--record-every must be >= 1")
        if self.scheme not in ("euler", "midpoint"):
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        known = DEFAULT_TOLS[self.command]
        for name, value in self.tolerances.items():
            if name not in known:
                raise ValidationError(
                    f"unknown tolerance {name!r} for {self.command}; known: {sorted(known)}"
                )
            if not value > 0:
                raise ValidationError(f"tolerance {name} must be positive")
        return self

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLS[self.command][name])

    def as_dict(self) -> dict:
        d = asdict(self)
        d["tolerances"] = {k: self.tol(k) for k in DEFAULT_TOLS[self.command]}
        d["tolerances"] = {k: (v if math.isfinite(v) else None) for k, v in d["tolerances"].items()}
        d.pop("force")
        return d


def _parse_tol(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} is not a number") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"tolerance {name!r} must be finite")
    return name, v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=None, dest="N", help="truncation order N")
    common.add_argument("--grid", type=int, default=None, dest="M", help="quadrature points M (>= 4N)")
    common.add_argument("--dt", type=float, default=1e-3)
    common.add_argument("--t", type=float, default=1.0, dest="T", help="time horizon")
    common.add_argument("--paths", type=int, default=None, dest="n_paths")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cov", default=None, help="covariance JSON file")
    common.add_argument("--diffeo", default=None, help="diffeomorphism JSON file")
    common.add_argument("--out", default="sympinf_out", help="output directory")
    common.add_argument("--tol", type=_parse_tol, action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--samples", type=int, default=360)
    common.add_argument("--scheme", default="euler", choices=("euler", "midpoint"))
    common.add_argument("--record-every", type=int, default=None)
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")

    parser = _Parser(prog="sympinf", description="Truncated Sp(infinity) experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "check": "algebraic identity and symplectic-criteria suites",
        "embed": "diffeomorphism -> operator, predicates, decay report",
        "counterexample": "symplectic operator outside the diffeomorphism image",
        "drift": "covariance -> Ito drift D with oracle comparison",
        "simulate": "Brownian motion on the group",
        "meanflow": "Monte-Carlo mean of X_T against exp(T D / 2)",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    n_paths = ns.n_paths
    if n_paths is None:
        n_paths = 1024 if ns.command == "meanflow" else 64
    N = ns.N
    if N is None:
        N = 4 if ns.command == "meanflow" else 8
    return RunConfig(
        command=ns.command,
        N=N,
        M=ns.M,
        dt=ns.dt,
        T=ns.T,
        n_paths=n_paths,
        seed=ns.seed,
        tolerances=dict(ns.tol),
        cov=ns.cov,
        diffeo=ns.diffeo,
        out=ns.out,
        samples=ns.samples,
        scheme=ns.scheme,
        record_every=ns.record_every,
        force=ns.force,
    ).validate()


class _Outputs:
    def __init__(self, cfg: RunConfig):
        self.dir = Path(cfg.out)
        self.force = cfg.force

    def json(self, name, kind, body):
        return io.save_report(self.dir / name, kind, body, overwrite=self.force)

    def csv(self, name, header, rows):
        return io.write_csv(self.dir / name, header, rows, overwrite=self.force)


def _covariance(cfg: RunConfig) -> CovarianceSpec:
    return io.load_covariance(cfg.cov) if cfg.cov else CovarianceSpec()


def _check(cfg, out):
    alg = algebra_suite(cfg.N, 500, cfg.seed)
    sym = symplectic_suite(cfg.N, 100, cfg.seed, cfg.tol("symplectic"))
    ok = max(alg.values()) <= cfg.tol("identity") and sym["disagreements"] == 0 \
        and sym["closure_residual"] <= cfg.tol("symplectic")
    out.json("check.json", "check", {"N": cfg.N, "seed": cfg.seed, "identities": alg,
                                     "symplectic": sym, "passed": ok})
    out.csv("check.csv", ["identity", "max_residual"], sorted(alg.items()))
    return ok


def _embed(cfg, out):
    psi = io.load_diffeo(cfg.diffeo) if cfg.diffeo else make_diffeo(b=[0.3])
    M = cfg.M or 8 * cfg.N
    A = embed(psi, cfg.N, M)
    checks = predicates(A, cfg.tol("omega"))
    res = interior_residuals(psi, psi, cfg.N, M)
    rot = embed(rotation(1.0), cfg.N, M)
    decay = decay_report(psi, cfg.N, M)
    io.save_matrix(out.dir / "embed_matrix.json", A, overwrite=out.force)
    out.csv("decay.csv", ["m", "column_sum", "ratio"], decay.rows_table())
    ok = res["preserves_omega"] <= cfg.tol("omega") and res["homomorphism"] <= cfg.tol("homomorphism")
    out.json("embed.json", "embed", {
        "N": cfg.N, "M": M, "diffeo": psi.as_dict(),
        "predicates_full_block": checks.as_dict(),
        "interior": res,
        "norm2": norm2(A),
        "rotation_norm2": norm2(rot),
        "decay": {"max_ratio": decay.max_ratio, "corner_neg": decay.corner_neg,
                  "corner_pos": decay.corner_pos, "rows": decay.rows},
        "passed": ok,
    })
    return ok


def _counterexample(cfg, out):
    A = counterexample_operator(cfg.N)
    checks = predicates(A, cfg.tol("symplectic"))
    z = counterexample_curve(cfg.samples, cfg.N)
    r = np.abs(z)
    err = max(abs(r.min() - (math.sqrt(2) - 1)), abs(r.max() - (math.sqrt(2) + 1)))
    ok = checks.is_symplectic and checks.preserves_omega and err <= cfg.tol("ellipse")
    io.save_matrix(out.dir / "counterexample_matrix.json", A, overwrite=out.force)
    out.csv("ellipse.csv", ["x", "y"], zip(z.real, z.imag))
    out.json("counterexample.json", "counterexample", {
        "N": cfg.N, "samples": cfg.samples, "predicates": checks.as_dict(),
        "min_modulus": float(r.min()), "max_modulus": float(r.max()),
        "ellipse_error": float(err), "passed": ok,
    })
    return ok


def _drift(cfg, out):
    Q = _covariance(cfg)
    D = drift_D(Q, cfg.N)
    oracle = -sum_xi_oracle(Q, cfg.N)
    resid = float(np.max(np.abs(np.diag(D.diag) - oracle)))
    cmp = dmatrix_comparison(Q, cfg.N)
    ok = resid <= cfg.tol("oracle")
    out.csv("drift.csv", ["m", "D", "formula"], zip(modes(cfg.N), cmp["drift"], cmp["formula"]))
    out.json("drift.json", "drift", {
        "N": cfg.N, "covariance": io.covariance_to_dict(Q),
        "trace_Q": float(resolve_weights(Q, cfg.N).sum()),
        "drift": D.diag, "oracle_residual": resid,
        "formula_fitted_constant": cmp["fitted_constant"],
        "formula_max_abs_difference": cmp["max_abs_difference"],
        "passed": ok,
    })
    return ok


def _simulate(cfg, out):
    Q = _covariance(cfg)
    res = simulate(Q, cfg.N, cfg.T, cfg.dt, cfg.seed, cfg.n_paths, cfg.scheme, cfg.record_every)
    p1, m1 = cfg.N, cfg.N - 1
    rows = (
        (p.path_id, t, d, X[p1, p1].real, X[p1, p1].imag, X[p1, m1].real, X[p1, m1].imag)
        for p in res.paths for t, d, X in zip(p.times, p.defects, p.states)
    )
    out.csv("paths.csv", ["path", "t", "defect", "re_X_1_1", "im_X_1_1", "re_X_1_m1", "im_X_1_m1"], rows)
    ok = res.summary["max_defect"] <= cfg.tol("max_defect")
    body = {k: v for k, v in res.summary.items() if k != "schema"}
    out.json("summary.json", "simulate", {**body, "passed": ok})
    return ok


def _meanflow(cfg, out):
    r = mean_flow(_covariance(cfg), cfg.N, cfg.T, cfg.dt, cfg.seed, cfg.n_paths, cfg.tol("n_sigma"))
    ms = modes(cfg.N)
    rows = []
    for i, m in enumerate(ms):
        for j, n in enumerate(ms):
            rows.append((m, n, r["mean"][i, j].real, r["mean"][i, j].imag, r["exact"][i, j].real,
                         r["standard_error"][i, j]))
    out.csv("meanflow.csv", ["m", "n", "re_mean", "im_mean", "exact", "standard_error"], rows)
    body = {k: v for k, v in r.items() if k not in ("schema", "mean", "exact", "standard_error")}
    if not math.isfinite(body["max_z"]):
        body["max_z"] = None
    out.json("meanflow.json", "meanflow", body)
    return r["passed"]


_HANDLERS = {
    "check": _check,
    "embed": _embed,
    "counterexample": _counterexample,
    "drift": _drift,
    "simulate": _simulate,
    "meanflow": _meanflow,
}


def run(argv=None) -> int:
    """Execute one command; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        out = _Outputs(cfg)
        io.save_report(out.dir / "config.json", "config", cfg.as_dict(), overwrite=cfg.force)
        ok = _HANDLERS[cfg.command](cfg, out)
    except FileExistsError as exc:
        print(f"sympinf: output exists (use --force): {exc.filename}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"sympinf: error: {exc}", file=sys.stderr)
        return 1
    status = "ok" if ok else "TOLERANCE FAILURE"
    print(f"sympinf {cfg.command}: {status} (outputs in {cfg.out})")
    return 0 if ok else 2


def main() -> None:
    sys.exit(run())
