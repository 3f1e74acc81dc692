"""Asymptotic statistics of a lattice walk: drift, diffusion, tilted spectra.

The central objects are the invariant state of the auxiliary map, the drift
vector, the CLT covariance (computed by two genuinely different routes that
must agree), the tilted-eigenvalue curve u -> lambda_u with kink detection,
and the large-deviation rate function obtained as a Legendre transform of
log lambda_u.  A closed-form fallback for two-level models covers the cases
where the generic spectral route degenerates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    AssumptionError,
    ConvergenceError,
    MultiplicityError,
    PositivityError,
    SingularRestrictionError,
    TraceGaugeError,
)
from .model import KrausModel, LatticeState, default_initial_state
from .numerics import frob, project_to_state, psd_check, solve_on_traceless, unvec, vec
from .structure import _fixed_point_data, classify_c2, is_irreducible_L, period
from .superop import (
    Superoperator,
    build_superop,
    derivative_maps,
    perron,
    spectral_radius,
    weighted_superop,
)

__all__ = [
    "invariant_state",
    "drift",
    "covariance",
    "covariance_ags",
    "AsymptoticStats",
    "asymptotic_stats",
    "log_lambda",
    "KinkRecord",
    "LambdaCurve",
    "lambda_curve",
    "find_kinks",
    "RateFunctionTable",
    "rate_function",
    "C2Parameters",
    "c2_parameters",
]


def invariant_state(model: KrausModel,
                    tols: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """The invariant state of the auxiliary map; must be unique.

    Raises :class:`MultiplicityError` when the fixed space has dimension
    greater than one (two-level models can then fall back to
    :func:`c2_parameters`).
    """
    count, _, h = _fixed_point_data(build_superop(model), tols)
    if count != 1 or h is None:
        raise MultiplicityError(
            f"invariant state is not unique (fixed-point count {count}); "
            "for two-level models use the closed-form route instead"
        )
    return project_to_state(h, what="invariant state")


def drift(model: KrausModel, rho: np.ndarray | None = None,
          tols: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Mean displacement per step under the invariant internal state."""
    if rho is None:
        rho = invariant_state(model, tols)
    weights = np.array(
        [float(np.trace(op @ rho @ op.conj().T).real) for op in model.operators]
    )
    return weights @ model.steps_array


def _directional_curvature_eta(model: KrausModel, u: np.ndarray,
                               rho: np.ndarray,
                               superop: Superoperator,
                               tols: Tolerances) -> tuple[float, np.ndarray]:
    """lambda''(0) - lambda'(0)^2 along u, via the corrector equation.

    Returns the curvature together with the traceless corrector eta that
    produced it.
    """
    n = model.internal_dim
    d1, d2 = derivative_maps(model, u)
    l1rho = d1.apply(rho)
    lam1 = float(np.trace(l1rho).real)
    rhs = l1rho - lam1 * rho
    rhs = (rhs + rhs.conj().T) / 2
    eye = np.eye(n * n, dtype=complex)
    eta = solve_on_traceless(eye - superop.matrix, rhs, tols)
    eta = (eta + eta.conj().T) / 2
    lam2 = float(np.trace(d2.apply(rho)).real) + 2 * float(np.trace(d1.apply(eta)).real)
    return lam2 - lam1**2, eta


def _directional_curvature_ags(model: KrausModel, u: np.ndarray,
                               rho: np.ndarray,
                               superop: Superoperator,
                               mean: np.ndarray,
                               tols: Tolerances) -> float:
    """Same quantity via the adjoint-side observable equation.

    Solves (Id - adjoint)(Y) = sum_s <u,s> L_s^dag L_s - <u,m> Id, which is
    consistent exactly when m is the drift; the answer is invariant under the
    Y -> Y + c Id gauge, so any particular solution works.
    """
    n = model.internal_dim
    phi = model.steps_array @ u
    a_u = np.zeros((n, n), dtype=complex)
    for w, op in zip(phi, model.operators):
        a_u += w * (op.conj().T @ op)
    shift = float(u @ mean)
    b = a_u - shift * np.eye(n)

    k = np.eye(n * n, dtype=complex) - superop.matrix.conj().T
    y_vec, *_ = np.linalg.lstsq(k, vec(b), rcond=None)
    resid = np.linalg.norm(k @ y_vec - vec(b))
    if resid > 1e-9 * max(1.0, np.linalg.norm(vec(b))):
        raise SingularRestrictionError(
            f"observable equation is inconsistent (residual {resid:.3e}); "
            "drift input is wrong or the map is degenerate"
        )
    y = unvec(y_vec, n)
    y = (y + y.conj().T) / 2
    y = y - (np.trace(y) / n) * np.eye(n)

    d1, d2 = derivative_maps(model, u)
    l1rho = d1.apply(rho)
    lam1 = float(np.trace(l1rho).real)
    correction = float(np.trace(l1rho @ y).real) - lam1 * float(np.trace(rho @ y).real)
    lam2 = float(np.trace(d2.apply(rho)).real) + 2 * correction
    return lam2 - lam1**2


def _quadratic_form_to_matrix(model: KrausModel, q) -> np.ndarray:
    """Assemble a symmetric matrix from its quadratic form by polarization."""
    d = model.lattice_dim
    c = np.zeros((d, d))
    basis = np.eye(d)
    for i in range(d):
        c[i, i] = q(basis[i])
    for i in range(d):
        for j in range(i + 1, d):
            plus = q(basis[i] + basis[j])
            minus = q(basis[i] - basis[j])
            c[i, j] = c[j, i] = (plus - minus) / 4
    return (c + c.T) / 2


def covariance(model: KrausModel, rho: np.ndarray | None = None,
               tols: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """CLT covariance via the corrector (traceless-solve) route."""
    if rho is None:
        rho = invariant_state(model, tols)
    superop = build_superop(model)
    c = _quadratic_form_to_matrix(
        model,
        lambda u: _directional_curvature_eta(model, u, rho, superop, tols)[0],
    )
    report = psd_check(c.astype(complex), tol=1e-8, tols=tols)
    if not report.is_psd:
        raise PositivityError(
            f"covariance is not positive semidefinite "
            f"(minimum eigenvalue {report.min_eigenvalue:.3e})"
        )
    return c


def covariance_ags(model: KrausModel, rho: np.ndarray | None = None,
                   mean: np.ndarray | None = None,
                   tols: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """CLT covariance via the adjoint-observable route (independent check)."""
    if rho is None:
        rho = invariant_state(model, tols)
    if mean is None:
        mean = drift(model, rho, tols)
    superop = build_superop(model)
    c = _quadratic_form_to_matrix(
        model,
        lambda u: _directional_curvature_ags(model, u, rho, superop, mean, tols),
    )
    report = psd_check(c.astype(complex), tol=1e-8, tols=tols)
    if not report.is_psd:
        raise PositivityError(
            f"covariance (adjoint route) is not positive semidefinite "
            f"(minimum eigenvalue {report.min_eigenvalue:.3e})"
        )
    return c


@dataclass(frozen=True)
class AsymptoticStats:
    """Drift and covariance with route-agreement diagnostics.

    ``eta_basis`` holds the traceless correctors for the coordinate tilt
    directions; ``method_residuals`` collects the cross-check gaps by name.
    """

    mean: np.ndarray
    covariance: np.ndarray
    covariance_alt: np.ndarray
    route_gap: float
    drift_fd_gap: float
    eta_basis: tuple[np.ndarray, ...] = ()
    method_residuals: dict[str, float] = field(default_factory=dict)


def asymptotic_stats(model: KrausModel,
                     tols: Tolerances = DEFAULT_TOLERANCES) -> AsymptoticStats:
    """Drift + covariance by both routes, with cross-checks recorded.

    ``route_gap`` is the max-abs difference of the two covariance routes;
    ``drift_fd_gap`` compares the drift against central differences of
    log lambda_u at h = 1e-5.
    """
    rho = invariant_state(model, tols)
    mean = drift(model, rho, tols)
    c_eta = covariance(model, rho, tols)
    c_ags = covariance_ags(model, rho, mean, tols)
    route_gap = float(np.max(np.abs(c_eta - c_ags)))

    superop = build_superop(model)
    etas = []
    eta_residual = 0.0
    for i in range(model.lattice_dim):
        e = np.zeros(model.lattice_dim)
        e[i] = 1.0
        _, eta = _directional_curvature_eta(model, e, rho, superop, tols)
        if abs(np.trace(eta)) > 1e-12:
            raise TraceGaugeError(
                f"corrector along axis {i} has trace {np.trace(eta):.3e}"
            )
        d1, _ = derivative_maps(model, e)
        lam1 = float(np.trace(d1.apply(rho)).real)
        defect = (eta - superop.apply(eta)) - (d1.apply(rho) - lam1 * rho)
        eta_residual = max(eta_residual, float(np.linalg.norm(defect)))
        etas.append(eta)

    h = 1e-5
    fd = np.zeros_like(mean)
    for i in range(model.lattice_dim):
        e = np.zeros(model.lattice_dim)
        e[i] = 1.0
        fd[i] = (log_lambda(model, h * e) - log_lambda(model, -h * e)) / (2 * h)
    drift_fd_gap = float(np.max(np.abs(fd - mean)))
    return AsymptoticStats(
        mean, c_eta, c_ags, route_gap, drift_fd_gap,
        eta_basis=tuple(etas),
        method_residuals={
            "covariance_route_gap": route_gap,
            "drift_fd_gap": drift_fd_gap,
            "eta_fixed_point_residual": eta_residual,
        },
    )


def _shifted_map(model: KrausModel, u: np.ndarray) -> tuple[float, Superoperator]:
    """Tilted map rescaled so its weights lie in (0, 1] (overflow-free)."""
    phi = model.steps_array @ u
    shift = float(np.max(phi))
    return shift, weighted_superop(model, np.exp(phi - shift))


def log_lambda(model: KrausModel, u,
               tols: Tolerances = DEFAULT_TOLERANCES) -> float:
    """log of the leading tilted eigenvalue, stable for large tilts."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    shift, shifted = _shifted_map(model, u)
    radius = spectral_radius(shifted, tols)
    if radius <= 0:
        raise ConvergenceError("tilted map has zero spectral radius")
    return shift + float(np.log(radius))


@dataclass(frozen=True)
class KinkRecord:
    """A point where the tilted-eigenvalue curve has a slope discontinuity.

    Slopes are one-sided, taken from secants just outside the certified
    bracket; they are reported for both lambda_u and log lambda_u.
    """

    u: float
    lambda_slope_left: float
    lambda_slope_right: float
    log_slope_left: float
    log_slope_right: float
    slope_jump: float


@dataclass(frozen=True)
class LambdaCurve:
    """Sampled tilted-eigenvalue curve along a fixed direction."""

    parameters: np.ndarray
    direction: np.ndarray
    lambda_values: np.ndarray
    log_lambda_values: np.ndarray
    kinks: tuple[KinkRecord, ...]
    degenerate_parameters: tuple[float, ...]


_KINK_BRACKET_WIDTH = 1e-7
_KINK_JUMP_TOL = 1e-3
_KINK_SLOPE_OFFSET = 1e-4


def _refine_kink(f, a: float, m: float, b: float, fa: float, fm: float,
                 fb: float) -> tuple[float, float]:
    """Shrink a slope-jump bracket; returns (location, final jump).

    A genuine kink keeps a constant slope jump as the bracket shrinks, while
    smooth curvature scales the jump down with the width, so following the
    max-jump sub-bracket separates the two cases.
    """
    while b - a > _KINK_BRACKET_WIDTH:
        q1, q2 = (a + m) / 2, (m + b) / 2
        fq1, fq2 = f(q1), f(q2)
        triples = (
            (a, q1, m, fa, fq1, fm),
            (q1, m, q2, fq1, fm, fq2),
            (m, q2, b, fm, fq2, fb),
        )
        best, best_jump = None, -1.0
        for t in triples:
            ta, tm, tb, va, vm, vb = t
            jump = abs((vb - vm) / (tb - tm) - (vm - va) / (tm - ta))
            if jump > best_jump:
                best, best_jump = t, jump
        a, m, b, fa, fm, fb = best
    jump = abs((fb - fm) / (b - m) - (fm - fa) / (m - a))
    return m, jump


def lambda_curve(model: KrausModel, parameters, direction=None,
                 refine_kinks: bool = True,
                 tols: Tolerances = DEFAULT_TOLERANCES) -> LambdaCurve:
    """Evaluate u -> lambda_u along ``t * direction`` and locate kinks.

    Each grid point goes through a full Perron extraction (on the rescaled
    map, so large tilts cannot overflow); kink refinement between grid points
    uses radius-only evaluations.  Kinks are certified to a bracket of width
    1e-7 and reported with one-sided slopes from secants at offsets 1e-4 and
    2e-4 outside the bracket.
    """
    ts = np.asarray(parameters, dtype=float)
    if direction is None:
        direction = np.zeros(model.lattice_dim)
        direction[0] = 1.0
    direction = np.asarray(direction, dtype=float)

    lams = np.empty(len(ts))
    logs = np.empty(len(ts))
    degenerate: list[float] = []
    for i, t in enumerate(ts):
        shift, shifted = _shifted_map(model, t * direction)
        data = perron(shifted, tols)
        logs[i] = shift + float(np.log(data.lambda_u))
        lams[i] = float(np.exp(logs[i]))
        if data.degenerate:
            degenerate.append(float(t))

    def f(t: float) -> float:
        shift, shifted = _shifted_map(model, t * direction)
        return float(np.exp(shift + np.log(spectral_radius(shifted, tols))))

    kinks: list[KinkRecord] = []
    if refine_kinks and len(ts) >= 3:
        for i in range(1, len(ts) - 1):
            a, m, b = ts[i - 1], ts[i], ts[i + 1]
            fa, fm, fb = lams[i - 1], lams[i], lams[i + 1]
            sl = (fm - fa) / (m - a)
            sr = (fb - fm) / (b - m)
            scale = max(1.0, abs(sl), abs(sr))
            if abs(sr - sl) <= _KINK_JUMP_TOL * scale:
                continue
            u0, jump = _refine_kink(f, a, m, b, fa, fm, fb)
            if jump <= _KINK_JUMP_TOL * scale:
                continue  # curvature masquerading as a kink
            if any(abs(u0 - k.u) < (b - a) / 2 for k in kinks):
                continue
            h = _KINK_SLOPE_OFFSET
            left = (f(u0 - h) - f(u0 - 2 * h)) / h
            right = (f(u0 + 2 * h) - f(u0 + h)) / h
            lam0 = f(u0)
            kinks.append(KinkRecord(
                u=float(u0),
                lambda_slope_left=float(left),
                lambda_slope_right=float(right),
                log_slope_left=float(left / lam0),
                log_slope_right=float(right / lam0),
                slope_jump=float(jump),
            ))
    return LambdaCurve(
        parameters=ts,
        direction=direction,
        lambda_values=lams,
        log_lambda_values=logs,
        kinks=tuple(kinks),
        degenerate_parameters=tuple(degenerate),
    )


def find_kinks(model: KrausModel, u_min: float = -4.0, u_max: float = 4.0,
               points: int = 41, direction=None,
               tols: Tolerances = DEFAULT_TOLERANCES) -> tuple[KinkRecord, ...]:
    """Scan [u_min, u_max] for slope discontinuities of the tilted curve."""
    ts = np.linspace(u_min, u_max, points)
    return lambda_curve(model, ts, direction, refine_kinks=True, tols=tols).kinks


@dataclass(frozen=True)
class RateFunctionTable:
    """Legendre transform values I(x) = sup_u (u x - log lambda_u).

    ``upper_bound_only`` is set when the auxiliary map is reducible: the
    transform then certifies only an upper bound on exponential decay.
    Infinite values mark positions outside the reachable velocity range.
    The window grid of log lambda_u used for the sup is kept (``u_grid``,
    ``log_lambda``) along with any slope-discontinuity locations found on
    it (``kinks``).
    """

    x_grid: np.ndarray
    rate: np.ndarray
    maximizers: np.ndarray
    finite: np.ndarray
    upper_bound_only: bool
    u_grid: np.ndarray
    log_lambda: np.ndarray
    kinks: tuple[float, ...]


_RATE_SUP_CAP = 1e6
_GOLDEN_RATIO = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_max(g, a: float, b: float, xtol: float = 1e-8) -> tuple[float, float]:
    """Golden-section maximization on [a, b] to absolute width xtol."""
    x1 = b - _GOLDEN_RATIO * (b - a)
    x2 = a + _GOLDEN_RATIO * (b - a)
    g1, g2 = g(x1), g(x2)
    while b - a > xtol:
        if g1 < g2:
            a, x1, g1 = x1, x2, g2
            x2 = a + _GOLDEN_RATIO * (b - a)
            g2 = g(x2)
        else:
            b, x2, g2 = x2, x1, g1
            x1 = b - _GOLDEN_RATIO * (b - a)
            g1 = g(x1)
    u = (a + b) / 2
    return u, g(u)


def _legendre_point(c, x: float, u_lo: float, u_hi: float,
                    points: int) -> tuple[float, float]:
    """sup_u (u x - c(u)) by grid bracketing, window growth, golden refinement."""
    us = list(np.linspace(u_lo, u_hi, points))
    gs = [u * x - c(u) for u in us]
    for _ in range(64):
        i = int(np.argmax(gs))
        if gs[i] > _RATE_SUP_CAP:
            return float("inf"), float(np.sign(us[i]) * np.inf)
        if max(gs) - min(gs) <= 1e-12 * max(1.0, abs(gs[i])):
            return float(gs[i]), float(us[i])  # flat objective (degenerate walk)
        if 0 < i < len(us) - 1:
            u_star, val = _golden_max(
                lambda u: u * x - c(u), us[i - 1], us[i + 1]
            )
            return float(val), float(u_star)
        # Maximum at the window edge: extend outward by the current width.
        width = us[-1] - us[0]
        if i == 0:
            new = list(np.linspace(us[0] - width, us[0], points))[:-1]
            us = new + us
            gs = [u * x - c(u) for u in new] + gs
        else:
            new = list(np.linspace(us[-1], us[-1] + width, points))[1:]
            us = us + new
            gs = gs + [u * x - c(u) for u in new]
    raise ConvergenceError(
        f"Legendre maximizer for x = {x} did not localize within the window "
        "growth budget"
    )


def rate_function(model: KrausModel, positions,
                  u_min: float = -4.0, u_max: float = 4.0, points: int = 41,
                  tols: Tolerances = DEFAULT_TOLERANCES) -> RateFunctionTable:
    """Large-deviation rate function on a grid of velocities (1-D walks only)."""
    if model.lattice_dim != 1:
        raise AssumptionError(
            "rate-function evaluation is implemented for one-dimensional walks"
        )
    xs = np.asarray(positions, dtype=float)
    upper_only = not is_irreducible_L(model, tols).irreducible

    curve = lambda_curve(model, np.linspace(u_min, u_max, points),
                         refine_kinks=True, tols=tols)
    u_grid = curve.parameters
    log_grid = curve.log_lambda_values

    cache: dict[float, float] = {
        float(u): float(v) for u, v in zip(u_grid, log_grid)
    }

    def c(u: float) -> float:
        if u not in cache:
            cache[u] = log_lambda(model, u, tols)
        return cache[u]

    if abs(c(0.0)) > 1e-10:
        raise ConvergenceError(
            f"log lambda at u = 0 is {c(0.0):.3e}, not 0; map is not "
            "trace preserving to tolerance"
        )

    # c is a limit of convex functions, so its sampled second differences
    # may dip below zero only by rounding.
    second_c = log_grid[2:] - 2 * log_grid[1:-1] + log_grid[:-2]
    if second_c.size and np.min(second_c) < -1e-8 * max(
            1.0, float(np.max(np.abs(log_grid)))):
        raise ConvergenceError(
            "log lambda_u sampled on the window is not convex; tilted "
            "spectral data is unreliable here"
        )

    values = np.empty(len(xs))
    maximizers = np.empty(len(xs))
    for j, x in enumerate(xs):
        val, u_star = _legendre_point(c, float(x), u_min, u_max, points)
        if np.isfinite(val) and val < 0:
            if val < -1e-10:
                raise ConvergenceError(
                    f"rate function came out negative ({val:.3e}) at x = {x}"
                )
            val = 0.0
        values[j] = val
        maximizers[j] = u_star
    finite = np.isfinite(values)

    # Convexity sanity on the finite part (equally spaced grids only).
    fin = values[finite]
    if len(fin) >= 3 and len(set(np.round(np.diff(xs), 12))) == 1:
        second = fin[2:] - 2 * fin[1:-1] + fin[:-2]
        if np.min(second) < -1e-8 * max(1.0, np.max(np.abs(fin))):
            raise ConvergenceError("rate-function values violate convexity")
    return RateFunctionTable(
        x_grid=xs,
        rate=values,
        maximizers=maximizers,
        finite=finite,
        upper_bound_only=upper_only,
        u_grid=u_grid,
        log_lambda=log_grid,
        kinks=tuple(k.u for k in curve.kinks),
    )


# --------------------------------------------------------------------------
# Closed forms for two-level models.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class C2Parameters:
    """Walk statistics of a two-level model from its normal form.

    ``law_a`` / ``law_b`` map displacements to probabilities for the one or
    two effective classical step distributions; ``weight_first`` is the mass
    the initial state puts on the first invariant ray (two-ray case only).
    ``covariance`` is None in the two-ray case with distinct branch means,
    where no single Gaussian limit exists.
    """

    situation: int
    periodic: bool
    mean: np.ndarray
    covariance: np.ndarray | None
    law_a: dict[tuple[int, ...], float] | None
    law_b: dict[tuple[int, ...], float] | None
    weight_first: float | None


def _law_moments(law: dict[tuple[int, ...], float],
                 d: int) -> tuple[np.ndarray, np.ndarray]:
    mean = np.zeros(d)
    second = np.zeros((d, d))
    for s, p in law.items():
        sv = np.asarray(s, dtype=float)
        mean += p * sv
        second += p * np.outer(sv, sv)
    return mean, second - np.outer(mean, mean)


def c2_parameters(model: KrausModel,
                  initial_state: LatticeState | None = None,
                  tols: Tolerances = DEFAULT_TOLERANCES) -> C2Parameters:
    """Drift/covariance of a two-level walk through its invariant-ray form.

    * no common ray: generic spectral statistics (periodic maps get the
      two-alternating-laws form via the cyclic projections);
    * one common ray: the walk's statistics are those of the classical step
      law on the ray (the off-ray part decays);
    * two common rays: two classical branch laws mixed with the initial
      weight of the first ray.
    """
    cls = classify_c2(model, tols)
    d = model.lattice_dim

    if cls.situation == 1:
        pd = period(model, tols)
        if pd.period == 1:
            rho = invariant_state(model, tols)
            mean = drift(model, rho, tols)
            cov = covariance(model, rho, tols)
            return C2Parameters(1, False, mean, cov, None, None, None)
        if pd.period != 2:
            raise AssumptionError(
                f"two-level irreducible maps have period 1 or 2, got {pd.period}"
            )
        f1 = _projection_ray(pd.projections[0])
        f2 = _projection_ray(pd.projections[1])
        law_a = {
            s: float(abs(f2.conj() @ op @ f1) ** 2)
            for s, op in zip(model.displacements, model.operators)
        }
        law_b = {
            s: float(abs(f1.conj() @ op @ f2) ** 2)
            for s, op in zip(model.displacements, model.operators)
        }
        ma, va = _law_moments(law_a, d)
        mb, vb = _law_moments(law_b, d)
        return C2Parameters(1, True, (ma + mb) / 2, (va + vb) / 2, law_a, law_b, None)

    if cls.situation == 2:
        law_a = {
            s: float(abs(a) ** 2)
            for s, a in zip(model.displacements, cls.alpha)
        }
        mean, cov = _law_moments(law_a, d)
        return C2Parameters(2, False, mean, cov, law_a, None, None)

    # Two common rays.
    law_a = {s: float(abs(a) ** 2) for s, a in zip(model.displacements, cls.alpha)}
    law_b = {s: float(abs(b) ** 2) for s, b in zip(model.displacements, cls.beta)}
    ma, va = _law_moments(law_a, d)
    mb, vb = _law_moments(law_b, d)
    if initial_state is None:
        initial_state = default_initial_state(model)
    ray = cls.rays[0]
    weight = 0.0
    for block in initial_state.blocks.values():
        weight += float((ray.conj() @ block @ ray).real)
    mean = weight * ma + (1 - weight) * mb
    if (np.allclose(ma, mb, atol=1e-12)
            or weight <= 1e-12 or weight >= 1 - 1e-12):
        # Single Gaussian limit: branch means agree, or the initial state
        # sits (to rounding) on one invariant ray.
        cov = weight * va + (1 - weight) * vb
    else:
        cov = None
    return C2Parameters(3, False, mean, cov, law_a, law_b, weight)


def _projection_ray(p: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(p)
    if abs(vals[-1] - 1.0) > 1e-8 or int(np.sum(vals > 0.5)) != 1:
        raise AssumptionError("cyclic projection is not rank one")
    return vecs[:, -1]
