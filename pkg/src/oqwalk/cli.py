"""Command-line interface.

Subcommands: validate, analyze, asymptotics, rate, simulate, oracle-check.
All reports are JSON on stdout (sorted keys, fixed indentation) so repeated
runs are byte-identical; optional --out writes CSV/JSON artifacts.  Exit
codes: 0 success, 2 document parse error, 3 validation/precondition/oracle
failure, 4 indeterminate spectral analysis, 5 non-unique invariant state
without a two-level fallback, 6 simulation degeneracy or standardization
failure, 1 anything else.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .asymptotics import (
    asymptotic_stats,
    c2_parameters,
    lambda_curve,
    rate_function,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    AssumptionError,
    ConvergenceError,
    DegenerateStepError,
    HermiticityError,
    ModelFormatError,
    ModelValidationError,
    MultiplicityError,
    OQWalkError,
    PathBudgetError,
    PositivityError,
    SingularRestrictionError,
    SpectralIndeterminateError,
    StandardizationError,
    TraceDriftError,
    TraceGaugeError,
)
from .model import (
    BUILTIN_NAMES,
    builtin,
    default_initial_state,
    load_initial_state,
    model_from_dict,
    random_initial_state,
    validate_model,
)
from .structure import (
    bn_decomposition,
    c2_m_classifier,
    classify_c2,
    is_irreducible_L,
    is_irreducible_M,
    is_regular,
    period,
)
from .trajectories import (
    batch_statistics,
    exact_distribution,
    mgf_check,
    write_batch_csv,
)

_EXIT_MAP = (
    (ModelFormatError, 2),
    (ModelValidationError, 3),
    (AssumptionError, 3),
    (PathBudgetError, 3),
    (MultiplicityError, 5),
    (DegenerateStepError, 6),
    (TraceDriftError, 6),
    (StandardizationError, 6),
    (SpectralIndeterminateError, 4),
    (PositivityError, 4),
    (ConvergenceError, 4),
    (SingularRestrictionError, 4),
    (HermiticityError, 4),
    (TraceGaugeError, 4),
    (OQWalkError, 1),
)


def _exit_code(exc: OQWalkError) -> int:
    for cls, code in _EXIT_MAP:
        if isinstance(exc, cls):
            return code
    return 1


def _matrix_json(m) -> list:
    return [
        [{"im": float(z.imag), "re": float(z.real)} for z in row]
        for row in np.asarray(m, dtype=complex)
    ]


def _vector_json(v) -> list:
    return [float(x) for x in np.asarray(v, dtype=float)]


def _real_matrix_json(m) -> list:
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def _law_json(law) -> dict | None:
    if law is None:
        return None
    return {",".join(str(c) for c in s): float(p) for s, p in sorted(law.items())}


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--model", metavar="PATH", help="model JSON document")
    g.add_argument("--builtin", choices=BUILTIN_NAMES, help="bundled model")
    p.add_argument("--p", type=float, default=None, dest="bias",
                   help="rightward probability for classical_dilation")
    p.add_argument("--tol-positivity", type=float, default=None)
    p.add_argument("--tol-residual", type=float, default=None)
    p.add_argument("--tol-trace", type=float, default=None)


def _add_state_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--initial", metavar="PATH", help="initial-state JSON document")
    g.add_argument("--random-initial", type=int, metavar="SEED", default=None,
                   help="seeded random internal state at the origin")


_DEFAULT_TILTS = (0.0, 0.5, -0.5, 1.0, -1.0)


@dataclass(frozen=True)
class RunConfig:
    """One validated CLI invocation; every command is a pure function of it.

    Exactly one of ``model_path`` / ``builtin_name`` is set.  The default
    initial state (no ``initial_path``, no ``random_initial_seed``) is the
    maximally mixed internal state at the origin.
    """

    command: str
    model_path: str | None = None
    builtin_name: str | None = None
    bias: float | None = None
    initial_path: str | None = None
    random_initial_seed: int | None = None
    seed: int = 0
    steps: int = 1000
    trajectories: int = 1000
    u_min: float = -4.0
    u_max: float = 4.0
    u_points: int = 41
    x_min: float = -1.0
    x_max: float = 1.0
    x_points: int = 21
    tilts: tuple[float, ...] = _DEFAULT_TILTS
    tolerances: Tolerances = DEFAULT_TOLERANCES
    out_dir: str | None = None

    def __post_init__(self):
        if (self.model_path is None) == (self.builtin_name is None):
            raise ModelFormatError(
                "exactly one of a model path or a builtin name must be given")
        if self.steps < 1:
            raise ModelFormatError(f"step count must be >= 1, got {self.steps}")
        if self.trajectories < 1:
            raise ModelFormatError(
                f"trajectory count must be >= 1, got {self.trajectories}")
        if not self.u_min < self.u_max:
            raise ModelFormatError(
                f"need u_min < u_max, got [{self.u_min}, {self.u_max}]")
        if self.u_points < 3:
            raise ModelFormatError(
                f"tilt grid needs at least 3 points, got {self.u_points}")
        if not self.x_min <= self.x_max:
            raise ModelFormatError(
                f"need x_min <= x_max, got [{self.x_min}, {self.x_max}]")
        if self.x_points < 1:
            raise ModelFormatError(
                f"velocity grid needs at least 1 point, got {self.x_points}")
        if self.seed < 0 or self.seed > 2**64 - 1:
            raise ModelFormatError(f"seed must fit in 64 bits, got {self.seed}")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    get = lambda name, default: getattr(args, name, default)  # noqa: E731
    tilts = get("tilts", None)
    tols = DEFAULT_TOLERANCES.with_overrides(
        positivity=args.tol_positivity,
        residual=args.tol_residual,
        trace=args.tol_trace,
    )
    return RunConfig(
        command=args.command,
        model_path=args.model,
        builtin_name=args.builtin,
        bias=args.bias,
        initial_path=get("initial", None),
        random_initial_seed=get("random_initial", None),
        seed=get("seed", 0),
        steps=get("steps", 1000),
        trajectories=get("trajectories", 1000),
        u_min=get("u_min", -4.0),
        u_max=get("u_max", 4.0),
        u_points=get("u_points", 41),
        x_min=get("x_min", -1.0),
        x_max=get("x_max", 1.0),
        x_points=get("x_points", 21),
        tilts=_DEFAULT_TILTS if tilts is None else tuple(tilts),
        tolerances=tols,
        out_dir=get("out", None),
    )


def _load_document(path: str) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _resolve_model(cfg: RunConfig, validate: bool = True):
    if cfg.builtin_name is not None:
        return builtin(cfg.builtin_name, cfg.bias)
    obj = _load_document(cfg.model_path)
    return model_from_dict(obj, cfg.tolerances, validate=validate)


def _resolve_state(cfg: RunConfig, model):
    if cfg.initial_path is not None:
        return load_initial_state(cfg.initial_path, model, cfg.tolerances)
    if cfg.random_initial_seed is not None:
        return random_initial_state(model, cfg.random_initial_seed)
    return default_initial_state(model)


def _out_dir(cfg: RunConfig) -> Path | None:
    if cfg.out_dir is None:
        return None
    path = Path(cfg.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


# --------------------------------------------------------------------------
# Subcommand bodies.
# --------------------------------------------------------------------------

def _cmd_validate(cfg: RunConfig) -> int:
    tols = cfg.tolerances
    model = _resolve_model(cfg, validate=False)
    report = validate_model(model, tols)
    _emit({
        "choi_min_eigenvalue": float(report.choi_min_eigenvalue),
        "choi_psd": bool(report.choi_psd),
        "h1_joint_range": bool(report.h1_holds),
        "h2_non_scalar": bool(report.h2_holds),
        "internal_dim": model.internal_dim,
        "lattice_dim": model.lattice_dim,
        "stochasticity_residual": float(report.residual),
        "valid": bool(report.is_valid),
    })
    return 0 if report.is_valid else 3


def _cmd_analyze(cfg: RunConfig) -> int:
    tols = cfg.tolerances
    model = _resolve_model(cfg)
    validation = validate_model(model, tols)

    irr = is_irreducible_L(model, tols)
    aux: dict = {
        "irreducible": bool(irr.irreducible),
        "closure_dimension": irr.closure_dimension,
        "fixed_point_count": irr.fixed_point_count,
        "min_fixed_eigenvalue": (
            None if irr.min_fixed_eigenvalue is None
            else float(irr.min_fixed_eigenvalue)
        ),
        "period": None,
        "projections": None,
        "regular": None,
        "positivity_onset": None,
    }
    if irr.irreducible:
        pd = period(model, tols)
        reg = is_regular(model, tols)
        aux["period"] = pd.period
        aux["projections"] = [_matrix_json(p) for p in pd.projections]
        aux["regular"] = bool(reg.regular)
        aux["positivity_onset"] = reg.onset_estimate
    bn = bn_decomposition(model, tols)
    aux["recurrent_dimension"] = bn.recurrent_dimension
    aux["decaying_dimension"] = bn.decaying_dimension
    aux["recurrent_basis"] = _matrix_json(bn.recurrent_basis)

    mirr = is_irreducible_M(model, tols=tols)
    lattice = {
        "verdict": mirr.verdict,
        "closure_dimension": mirr.closure_dimension,
        "max_length_used": mirr.max_length_used,
        "witness": None if mirr.witness is None else _matrix_json(mirr.witness),
    }

    two_level = None
    if model.internal_dim == 2:
        try:
            cls = classify_c2(model, tols)
            two_level = {
                "situation": cls.situation,
                "rays": [_matrix_json(r.reshape(-1, 1)) for r in cls.rays],
                "m_irreducible": None,
                "m_period": None,
                "reducible_reason": None,
            }
        except AssumptionError:
            two_level = None
        if (two_level is not None and model.lattice_dim == 1
                and set(model.displacements) == {(1,), (-1,)}):
            mcls = c2_m_classifier(model, tols)
            two_level["m_irreducible"] = bool(mcls.m_irreducible)
            two_level["m_period"] = mcls.m_period
            two_level["reducible_reason"] = mcls.reducible_reason

    _emit({
        "auxiliary_map": aux,
        "lattice_walk": lattice,
        "model": {
            "internal_dim": model.internal_dim,
            "lattice_dim": model.lattice_dim,
            "n_steps": model.n_steps,
        },
        "two_level": two_level,
        "validation": {
            "choi_min_eigenvalue": float(validation.choi_min_eigenvalue),
            "h1_joint_range": bool(validation.h1_holds),
            "h2_non_scalar": bool(validation.h2_holds),
            "stochasticity_residual": float(validation.residual),
            "valid": bool(validation.is_valid),
        },
    })
    return 0


def _stats_with_fallback(model, initial_state, tols):
    """Spectral drift/covariance, falling back to two-level closed forms.

    Returns (mean, covariance-or-None, method, extra-json).
    """
    try:
        stats = asymptotic_stats(model, tols)
        return (
            stats.mean,
            stats.covariance,
            "spectral",
            {
                "covariance_alt": _real_matrix_json(stats.covariance_alt),
                "eta_basis": [_matrix_json(e) for e in stats.eta_basis],
                "method_residuals": {
                    k: float(v)
                    for k, v in sorted(stats.method_residuals.items())
                },
            },
        )
    except MultiplicityError:
        if model.internal_dim != 2:
            raise
        params = c2_parameters(model, initial_state, tols)
        extra = {
            "situation": params.situation,
            "periodic": bool(params.periodic),
            "law_a": _law_json(params.law_a),
            "law_b": _law_json(params.law_b),
            "weight_first": (
                None if params.weight_first is None else float(params.weight_first)
            ),
        }
        return params.mean, params.covariance, "two-level-closed-form", extra


def _cmd_asymptotics(cfg: RunConfig) -> int:
    tols = cfg.tolerances
    model = _resolve_model(cfg)
    state = _resolve_state(cfg, model)
    mean, cov, method, extra = _stats_with_fallback(model, state, tols)

    us = np.linspace(cfg.u_min, cfg.u_max, cfg.u_points)
    curves = []
    for axis in range(model.lattice_dim):
        direction = np.zeros(model.lattice_dim)
        direction[axis] = 1.0
        curve = lambda_curve(model, us, direction, tols=tols)
        curves.append({
            "axis": axis,
            "u": _vector_json(curve.parameters),
            "lambda": _vector_json(curve.lambda_values),
            "log_lambda": _vector_json(curve.log_lambda_values),
            "degenerate_u": _vector_json(curve.degenerate_parameters),
            "kinks": [
                {
                    "u": k.u,
                    "lambda_slope_left": k.lambda_slope_left,
                    "lambda_slope_right": k.lambda_slope_right,
                    "log_slope_left": k.log_slope_left,
                    "log_slope_right": k.log_slope_right,
                    "slope_jump": k.slope_jump,
                }
                for k in curve.kinks
            ],
        })

    summary = {
        "covariance": None if cov is None else _real_matrix_json(cov),
        "drift": _vector_json(mean),
        "lambda_curves": curves,
        "method": method,
        **extra,
    }
    _emit(summary)

    out = _out_dir(cfg)
    if out is not None:
        _write_json(out / "asymptotics.json", summary)
        for curve in curves:
            lines = ["u,lambda,log_lambda"]
            for u, lam, ll in zip(curve["u"], curve["lambda"], curve["log_lambda"]):
                lines.append(f"{u!r},{lam!r},{ll!r}")
            path = out / f"lambda_curve_axis{curve['axis']}.csv"
            path.write_text("\n".join(lines) + "\n")
    return 0


def _cmd_rate(cfg: RunConfig) -> int:
    tols = cfg.tolerances
    model = _resolve_model(cfg)
    xs = np.linspace(cfg.x_min, cfg.x_max, cfg.x_points)
    table = rate_function(
        model, xs, u_min=cfg.u_min, u_max=cfg.u_max, points=cfg.u_points,
        tols=tols,
    )
    summary = {
        "x_grid": _vector_json(table.x_grid),
        "rate": [
            float(v) if np.isfinite(v) else None for v in table.rate
        ],
        "maximizers": [
            float(u) if np.isfinite(u) else None for u in table.maximizers
        ],
        "finite": [bool(b) for b in table.finite],
        "upper_bound_only": bool(table.upper_bound_only),
        "u_grid": _vector_json(table.u_grid),
        "log_lambda": _vector_json(table.log_lambda),
        "kinks": [float(k) for k in table.kinks],
    }
    _emit(summary)
    out = _out_dir(cfg)
    if out is not None:
        _write_json(out / "rate_function.json", summary)
        lines = ["x,rate,maximizer,finite"]
        for x, v, u, fin in zip(table.x_grid, table.rate,
                                table.maximizers, table.finite):
            lines.append(f"{float(x)!r},{float(v)!r},{float(u)!r},{int(fin)}")
        (out / "rate_function.csv").write_text("\n".join(lines) + "\n")
        lines = ["u,log_lambda"]
        for u, ll in zip(table.u_grid, table.log_lambda):
            lines.append(f"{float(u)!r},{float(ll)!r}")
        (out / "log_lambda_window.csv").write_text("\n".join(lines) + "\n")
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    tols = cfg.tolerances
    model = _resolve_model(cfg)
    state = _resolve_state(cfg, model)
    mean, cov, method, extra = _stats_with_fallback(model, state, tols)
    if cov is None:
        raise StandardizationError(
            "branch step laws have distinct means; no single Gaussian limit "
            "exists to standardize against"
        )
    batch = batch_statistics(
        model, cfg.steps, cfg.trajectories, cfg.seed,
        initial_state=state, mean=mean, covariance=cov, tols=tols,
    )
    summary = {
        "covariance": _real_matrix_json(cov),
        "drift": _vector_json(mean),
        "ks_distance": float(batch.ks_distance),
        "mean_standardized": _vector_json(batch.mean_standardized),
        "method": method,
        "n_steps": batch.n_steps,
        "n_traj": batch.n_traj,
        "root_seed": batch.root_seed,
        "variance_standardized": _vector_json(batch.variance_standardized),
    }
    _emit(summary)
    out = _out_dir(cfg)
    if out is not None:
        _write_json(out / "summary.json", summary)
        with open(out / "trajectories.csv", "w", newline="") as fh:
            write_batch_csv(batch, fh)
    return 0


def _cmd_oracle_check(cfg: RunConfig) -> int:
    tols = cfg.tolerances
    model = _resolve_model(cfg)
    state = _resolve_state(cfg, model)
    failures = 0
    checks = []

    for p in range(1, cfg.steps + 1):
        for u_scalar in cfg.tilts:
            u = np.zeros(model.lattice_dim)
            u[0] = u_scalar
            report = mgf_check(model, u, p, initial_state=state, tols=tols)
            ok = report.relative_gap <= 1e-10
            failures += 0 if ok else 1
            status = "ok" if ok else "FAIL"
            print(f"{status} mgf p={p} u={u_scalar} gap={report.relative_gap:.3e}")
            checks.append({
                "check": "mgf", "p": p, "u": u_scalar,
                "gap": float(report.relative_gap), "ok": ok,
            })

    for p in range(1, min(cfg.steps, 10) + 1):
        try:
            dist = exact_distribution(model, p, initial_state=state, tols=tols)
            gap, ok = dist.tv_gap, dist.tv_gap <= 1e-10
        except ConvergenceError:
            gap, ok = float("nan"), False
        failures += 0 if ok else 1
        status = "ok" if ok else "FAIL"
        print(f"{status} distribution p={p} tv_gap={gap:.3e}")
        checks.append({
            "check": "distribution", "p": p, "gap": float(gap), "ok": ok,
        })

    print("PASS" if failures == 0 else f"FAIL ({failures} checks)")
    out = _out_dir(cfg)
    if out is not None:
        _write_json(out / "oracle_check.json",
                    {"checks": checks, "failures": failures})
    return 0 if failures == 0 else 3


# --------------------------------------------------------------------------
# Parser assembly.
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oqwalk",
        description="Open quantum random walks: validation, structure, "
                    "asymptotics, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model document")
    _add_model_args(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("analyze", help="structural analysis report")
    _add_model_args(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("asymptotics", help="drift, covariance, tilted curves")
    _add_model_args(p)
    _add_state_args(p)
    p.add_argument("--u-min", type=float, default=-4.0)
    p.add_argument("--u-max", type=float, default=4.0)
    p.add_argument("--u-points", type=int, default=41)
    p.add_argument("--out", default=None, help="directory for CSV/JSON artifacts")
    p.set_defaults(func=_cmd_asymptotics)

    p = sub.add_parser("rate", help="large-deviation rate function")
    _add_model_args(p)
    p.add_argument("--x-min", type=float, default=-1.0)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--x-points", type=int, default=21)
    p.add_argument("--u-min", type=float, default=-4.0)
    p.add_argument("--u-max", type=float, default=4.0)
    p.add_argument("--u-points", type=int, default=41)
    p.add_argument("--out", default=None, help="directory for CSV/JSON artifacts")
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("simulate", help="seeded trajectory batch with CLT summary")
    _add_model_args(p)
    _add_state_args(p)
    p.add_argument("-P", "--steps", type=int, default=1000)
    p.add_argument("-N", "--trajectories", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="directory for CSV/JSON artifacts")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("oracle-check",
                       help="sampler-free cross-checks on small horizons")
    _add_model_args(p)
    _add_state_args(p)
    p.add_argument("-P", "-p", "--steps", type=int, default=8,
                   help="largest horizon to check")
    p.add_argument("-u", "--tilt", type=float, action="append", dest="tilts",
                   default=None, metavar="U",
                   help="tilt to check (repeatable; default 0, +-0.5, +-1)")
    p.add_argument("--out", default=None, help="directory for JSON artifacts")
    p.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(_config_from_args(args))
    except OQWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
