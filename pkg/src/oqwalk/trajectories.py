"""Seeded quantum-trajectory simulation and exact small-horizon oracles.

A trajectory alternates measurement-driven jumps: at each step the walker
moves by displacement s with probability Tr(L_s rho L_s^dag) and its internal
state collapses to the renormalized image.  The engine is vectorized over
trajectories but arranged so that each trajectory's arithmetic is independent
of the batch it runs in: trajectory i of a batch with root seed r is bit-for-
bit the trajectory of stream seed derive_seed(r, i) (same platform).

Two exact companions keep the sampler honest on small horizons: a path-sum
distribution (every displacement word enumerated) cross-checked against
iterating the lattice map, and the tilted-map identity for the moment
generating function.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    DegenerateStepError,
    PathBudgetError,
    ConvergenceError,
    StandardizationError,
    TraceDriftError,
)
from .model import KrausModel, LatticeState, default_initial_state
from .rng import derive_seeds, unit_draws_array
from .superop import apply_M, deform

__all__ = [
    "Trajectory",
    "sample_trajectory",
    "BatchStatistics",
    "batch_statistics",
    "write_batch_csv",
    "ExactDistribution",
    "exact_distribution",
    "MgfReport",
    "mgf_check",
    "PATH_BUDGET",
]

PATH_BUDGET = 2**20
_TRACE_CHECK_STRIDE = 64


def _engine(model: KrausModel, initial_state: LatticeState, n_steps: int,
            stream_seeds: np.ndarray, record: bool):
    """Vectorized trajectory kernel shared by single and batch entry points."""
    n = model.internal_dim
    d = model.lattice_dim
    k_steps = model.n_steps
    n_traj = len(stream_seeds)

    site_positions, weights = initial_state.site_weights()
    cum_sites = np.cumsum(weights) / weights.sum()

    u0 = unit_draws_array(stream_seeds, 0)
    site_idx = np.minimum(
        np.searchsorted(cum_sites, u0, side="right"), len(site_positions) - 1
    )
    x = np.array([site_positions[j] for j in site_idx], dtype=np.int64)
    x0 = x.copy()
    rho = np.empty((n_traj, n, n), dtype=complex)
    for j, pos in enumerate(site_positions):
        mask = site_idx == j
        if mask.any():
            block = initial_state.blocks[pos]
            rho[mask] = block / np.trace(block).real

    ops = np.stack([np.asarray(op) for op in model.operators])
    ops_dag = ops.conj().transpose(0, 2, 1)
    grams = np.stack([op.conj().T @ op for op in model.operators])
    steps = model.steps_array.astype(np.int64)

    if record:
        pos_hist = np.empty((n_traj, n_steps + 1, d), dtype=np.int64)
        state_hist = np.empty((n_traj, n_steps + 1, n, n), dtype=complex)
        idx_hist = np.empty((n_traj, n_steps), dtype=np.int64)
        pos_hist[:, 0] = x
        state_hist[:, 0] = rho

    for p in range(1, n_steps + 1):
        probs = np.einsum("kij,nji->nk", grams, rho).real
        dead = np.all(probs <= 1e-15, axis=1)
        if dead.any():
            raise DegenerateStepError(
                f"all step probabilities vanished at step {p} for "
                f"{int(dead.sum())} trajectory(ies)"
            )
        totals = probs.sum(axis=1)
        drift_off = float(np.max(np.abs(totals - 1.0)))
        if drift_off > 1e-9:
            raise TraceDriftError(
                f"step probabilities sum to 1 off by {drift_off:.3e} at step {p}"
            )
        cum = np.cumsum(probs, axis=1) / totals[:, None]
        u = unit_draws_array(stream_seeds, p)
        choice = np.minimum(np.sum(u[:, None] >= cum, axis=1), k_steps - 1)

        x += steps[choice]
        for k in range(k_steps):
            mask = choice == k
            if not mask.any():
                continue
            new = ops[k] @ rho[mask] @ ops_dag[k]
            tr = np.einsum("mii->m", new).real
            rho[mask] = new / tr[:, None, None]

        if p % _TRACE_CHECK_STRIDE == 0:
            tr = np.einsum("nii->n", rho).real
            if np.max(np.abs(tr - 1.0)) > 1e-8:
                raise TraceDriftError(
                    f"internal-state trace drifted by "
                    f"{float(np.max(np.abs(tr - 1.0))):.3e} at step {p}"
                )
            rho /= tr[:, None, None]

        if record:
            pos_hist[:, p] = x
            state_hist[:, p] = rho
            idx_hist[:, p - 1] = choice

    if record:
        return x0, x, rho, pos_hist, state_hist, idx_hist
    return x0, x, rho, None, None, None


@dataclass(frozen=True)
class Trajectory:
    """One sampled walk: positions and internal states after every step."""

    positions: np.ndarray
    states: np.ndarray
    step_indices: np.ndarray
    stream_seed: int


def sample_trajectory(model: KrausModel, n_steps: int, stream_seed: int,
                      initial_state: LatticeState | None = None,
                      tols: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Sample a single trajectory from its own stream seed.

    Note this takes the per-trajectory stream seed; trajectory i of
    :func:`batch_statistics` with root seed r corresponds to
    ``derive_seed(r, i)``.
    """
    if initial_state is None:
        initial_state = default_initial_state(model)
    seeds = np.array([stream_seed], dtype=np.uint64)
    _, _, _, pos, states, idx = _engine(model, initial_state, n_steps, seeds, True)
    return Trajectory(
        positions=pos[0], states=states[0], step_indices=idx[0],
        stream_seed=int(stream_seed),
    )


@dataclass(frozen=True)
class BatchStatistics:
    """Endpoint summary of a seeded batch of trajectories.

    ``standardized`` holds (X_P - X_0 - P m) / sqrt(P) whitened by the
    pseudo-inverse square root of the covariance; ``ks_distance`` compares its
    first coordinate against the standard normal.  Variance is the second
    moment about the sample mean (no ddof correction).
    """

    initials: np.ndarray
    finals: np.ndarray
    stream_seeds: np.ndarray
    standardized: np.ndarray
    mean_standardized: np.ndarray
    variance_standardized: np.ndarray
    ks_distance: float
    drift_used: np.ndarray
    covariance_used: np.ndarray
    n_steps: int
    n_traj: int
    root_seed: int


def batch_statistics(model: KrausModel, n_steps: int, n_traj: int, seed: int,
                     initial_state: LatticeState | None = None,
                     mean: np.ndarray | None = None,
                     covariance: np.ndarray | None = None,
                     tols: Tolerances = DEFAULT_TOLERANCES) -> BatchStatistics:
    """Run ``n_traj`` trajectories of ``n_steps`` steps from a root seed.

    Drift and covariance for standardization are computed from the model
    unless passed in (two-level callers may supply closed-form values when the
    spectral route is degenerate).
    """
    if initial_state is None:
        initial_state = default_initial_state(model)
    if mean is None or covariance is None:
        from .asymptotics import covariance as cov_fn
        from .asymptotics import drift as drift_fn
        from .asymptotics import invariant_state
        rho = invariant_state(model, tols)
        if mean is None:
            mean = drift_fn(model, rho, tols)
        if covariance is None:
            covariance = cov_fn(model, rho, tols)
    mean = np.asarray(mean, dtype=float)
    covariance = np.asarray(covariance, dtype=float)

    seeds = derive_seeds(seed, n_traj)
    x0, xf, _, _, _, _ = _engine(model, initial_state, n_steps, seeds, False)

    y = (xf - x0 - n_steps * mean) / np.sqrt(n_steps)
    w, v = np.linalg.eigh(covariance)
    support = w > 1e-12 * max(1.0, float(w.max()) if len(w) else 1.0)
    if not support.all():
        null_comp = y @ v[:, ~support]
        worst = float(np.max(np.abs(null_comp))) if null_comp.size else 0.0
        if worst > 1e-6:
            raise StandardizationError(
                f"displacements leave the covariance support by {worst:.3e}; "
                "cannot standardize"
            )
    root = v[:, support] @ np.diag(1.0 / np.sqrt(w[support])) @ v[:, support].T
    z = y @ root

    zs = np.sort(z[:, 0])
    grid = np.arange(1, n_traj + 1, dtype=float)
    cdf = ndtr(zs)
    ks = float(max(np.max(grid / n_traj - cdf), np.max(cdf - (grid - 1) / n_traj)))

    return BatchStatistics(
        initials=x0,
        finals=xf,
        stream_seeds=seeds,
        standardized=z,
        mean_standardized=z.mean(axis=0),
        variance_standardized=z.var(axis=0),
        ks_distance=ks,
        drift_used=mean,
        covariance_used=covariance,
        n_steps=int(n_steps),
        n_traj=int(n_traj),
        root_seed=int(seed),
    )


def write_batch_csv(batch: BatchStatistics, fileobj) -> None:
    """Write per-trajectory rows: index, seed, final position, standardized."""
    d = batch.finals.shape[1]
    writer = csv.writer(fileobj, lineterminator="\n")
    header = (
        ["index", "seed"]
        + [f"x_final_{i}" for i in range(d)]
        + [f"standardized_{i}" for i in range(d)]
    )
    writer.writerow(header)
    for i in range(batch.n_traj):
        row = [str(i), str(int(batch.stream_seeds[i]))]
        row += [str(int(val)) for val in batch.finals[i]]
        row += [repr(float(val)) for val in batch.standardized[i]]
        writer.writerow(row)


# --------------------------------------------------------------------------
# Exact small-horizon references.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactDistribution:
    """Position law after p steps, by two independent computations.

    ``masses`` comes from enumerating every displacement word (path sum);
    ``masses_iterated`` from iterating the lattice map; ``tv_gap`` is their
    total-variation distance (must be tiny or construction raises).
    """

    masses: dict[tuple[int, ...], float]
    masses_iterated: dict[tuple[int, ...], float]
    tv_gap: float
    final_state: LatticeState


def _num_paths(model: KrausModel, p: int) -> int:
    return model.n_steps**p


def exact_distribution(model: KrausModel, p: int,
                       initial_state: LatticeState | None = None,
                       max_paths: int = PATH_BUDGET,
                       tols: Tolerances = DEFAULT_TOLERANCES) -> ExactDistribution:
    """Exact position distribution after p steps (two routes, cross-checked)."""
    if initial_state is None:
        initial_state = default_initial_state(model)
    if _num_paths(model, p) > max_paths:
        raise PathBudgetError(
            f"{model.n_steps}^{p} paths exceed the budget of {max_paths}"
        )

    pairs = list(zip(model.displacements, model.operators))
    masses: dict[tuple[int, ...], float] = {}
    for pos, block in initial_state.blocks.items():
        stack = [(0, pos, np.asarray(block, dtype=complex))]
        while stack:
            depth, site, sigma = stack.pop()
            if depth == p:
                masses[site] = masses.get(site, 0.0) + float(np.trace(sigma).real)
                continue
            for s, op in pairs:
                target = tuple(a + b for a, b in zip(site, s))
                stack.append((depth + 1, target, op @ sigma @ op.conj().T))

    state = initial_state
    for _ in range(p):
        state = apply_M(model, state)
    masses_iter = {
        pos: float(np.trace(block).real) for pos, block in state.blocks.items()
    }

    keys = set(masses) | set(masses_iter)
    tv = 0.5 * sum(abs(masses.get(k, 0.0) - masses_iter.get(k, 0.0)) for k in keys)
    if tv > 1e-10:
        raise ConvergenceError(
            f"path-sum and iterated-map distributions disagree (TV {tv:.3e})"
        )
    total = sum(masses.values())
    if abs(total - 1.0) > 1e-10:
        raise ConvergenceError(
            f"path-sum distribution has total mass {total!r}, expected 1"
        )
    return ExactDistribution(masses, masses_iter, float(tv), state)


@dataclass(frozen=True)
class MgfReport:
    """Moment generating function of the p-step displacement, both routes."""

    path_value: float
    tilted_value: float
    relative_gap: float


def mgf_check(model: KrausModel, u, p: int,
              initial_state: LatticeState | None = None,
              max_paths: int = PATH_BUDGET,
              tols: Tolerances = DEFAULT_TOLERANCES) -> MgfReport:
    """E[exp(<u, X_p - X_0>)] by path enumeration vs the tilted-map power."""
    if initial_state is None:
        initial_state = default_initial_state(model)
    if _num_paths(model, p) > max_paths:
        raise PathBudgetError(
            f"{model.n_steps}^{p} paths exceed the budget of {max_paths}"
        )
    u = np.atleast_1d(np.asarray(u, dtype=float))

    pairs = list(zip(model.displacements, model.operators))
    path_value = 0.0
    for pos, block in initial_state.blocks.items():
        stack = [(0, np.zeros(model.lattice_dim), np.asarray(block, dtype=complex))]
        while stack:
            depth, disp, sigma = stack.pop()
            if depth == p:
                path_value += float(np.exp(u @ disp) * np.trace(sigma).real)
                continue
            for s, op in pairs:
                stack.append(
                    (depth + 1, disp + np.asarray(s), op @ sigma @ op.conj().T)
                )

    tilted = deform(model, u)
    tilted_value = 0.0
    for block in initial_state.blocks.values():
        tilted_value += float(np.trace(tilted.power_apply(block, p)).real)

    gap = abs(path_value - tilted_value) / max(
        abs(path_value), abs(tilted_value), np.finfo(float).tiny
    )
    return MgfReport(path_value, tilted_value, float(gap))
