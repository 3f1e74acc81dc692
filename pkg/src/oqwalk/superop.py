"""Superoperator layer: the auxiliary map of a walk, its tilted relatives, and
Perron data extraction.

For a model with operators ``L_s`` the auxiliary map is
``rho -> sum_s L_s rho L_s^dag``; the tilted map attaches a weight
``exp(<u, s>)`` to each Kraus term, and for weight-generating purposes the
fully general form attaches ``exp(t * phi_s)`` for an arbitrary per-step
functional ``phi``.  All of these are completely positive, so the leading
eigenvalue is a genuine spectral radius with (up to normalization) a PSD
eigenvector on either side; ``perron`` extracts that data with explicit
tolerance and degeneracy reporting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import SpectralIndeterminateError
from .model import KrausModel, LatticeState
from .numerics import (
    EigenSystem,
    eigendecompose,
    frob,
    kraus_superop,
    project_to_state,
    unvec,
    vec,
)

__all__ = [
    "Superoperator",
    "build_superop",
    "weighted_superop",
    "deform",
    "deform_weighted",
    "derivative_maps",
    "apply_L",
    "apply_M",
    "SpectralData",
    "perron",
    "spectral_radius",
]


@dataclass(frozen=True)
class Superoperator:
    """A linear map on n x n matrices in column-stacking matrix form."""

    matrix: np.ndarray
    dim: int

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    def adjoint(self) -> "Superoperator":
        return Superoperator(self.matrix.conj().T, self.dim)

    def power_apply(self, rho: np.ndarray, p: int) -> np.ndarray:
        v = vec(rho)
        for _ in range(p):
            v = self.matrix @ v
        return unvec(v, self.dim)


def _as_direction(model: KrausModel, u) -> np.ndarray:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (model.lattice_dim,):
        raise ValueError(
            f"direction shape {u.shape} does not match lattice dimension "
            f"{model.lattice_dim}"
        )
    return u


def weighted_superop(model: KrausModel, weights: np.ndarray) -> Superoperator:
    """Superoperator of ``rho -> sum_s w_s L_s rho L_s^dag``."""
    return Superoperator(kraus_superop(model.operators, np.asarray(weights, dtype=float)),
                         model.internal_dim)


def build_superop(model: KrausModel) -> Superoperator:
    """The untilted auxiliary map."""
    return weighted_superop(model, np.ones(model.n_steps))


def deform_weighted(model: KrausModel, phi: np.ndarray, t: float) -> Superoperator:
    """Tilted map with weights ``exp(t * phi_s)`` for a per-step functional phi."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (model.n_steps,):
        raise ValueError(f"phi must assign one weight per step, got shape {phi.shape}")
    return weighted_superop(model, np.exp(t * phi))


def deform(model: KrausModel, u) -> Superoperator:
    """Tilted map with weights ``exp(<u, s>)``."""
    u = _as_direction(model, u)
    phi = model.steps_array @ u
    return deform_weighted(model, phi, 1.0)


def derivative_maps(model: KrausModel, u) -> tuple[Superoperator, Superoperator]:
    """First and second derivative maps of ``t -> tilt(t*u)`` at t = 0.

    These weight each Kraus term by ``<u, s>`` respectively ``<u, s>^2``.
    """
    u = _as_direction(model, u)
    phi = model.steps_array @ u
    return weighted_superop(model, phi), weighted_superop(model, phi**2)


def apply_L(model: KrausModel, rho: np.ndarray) -> np.ndarray:
    """Direct Kraus application of the auxiliary map (no superoperator matrix)."""
    rho = np.asarray(rho, dtype=complex)
    acc = np.zeros_like(rho)
    for op in model.operators:
        acc += op @ rho @ op.conj().T
    return acc


def apply_M(model: KrausModel, state: LatticeState) -> LatticeState:
    """One step of the full lattice walk: mass at site i flows to i + s via L_s."""
    n = model.internal_dim
    out: dict[tuple[int, ...], np.ndarray] = {}
    for pos, block in state.blocks.items():
        for s, op in zip(model.displacements, model.operators):
            target = tuple(p + c for p, c in zip(pos, s))
            contrib = op @ block @ op.conj().T
            if target in out:
                out[target] = out[target] + contrib
            else:
                out[target] = contrib
    return LatticeState(out, check=False)


@dataclass(frozen=True)
class SpectralData:
    """Leading-eigenvalue data of a completely positive superoperator.

    * ``lambda_u``: the spectral radius (a real positive simple eigenvalue in
      the non-degenerate case).
    * ``rho_u``: right eigenvector as a trace-one density matrix.
    * ``m_u``: Hermitian left eigenvector, normalized so Tr(m_u rho_u) = 1.
    * ``degenerate``: another eigenvalue coincides with the radius itself
      (within 1e-9 relative).  Equal-modulus eigenvalues at a different phase
      (the periodic pattern) do *not* set this flag.
    * ``gap``: relative modulus gap to the next eigenvalue in sorted order;
      1.0 when there is no other eigenvalue.
    * ``residual``: relative eigen-residual of the returned rho_u.
    """

    lambda_u: float
    rho_u: np.ndarray
    m_u: np.ndarray
    degenerate: bool
    gap: float
    residual: float


def _hermitian_eigvec(eigensystem: EigenSystem, index: int, n: int) -> np.ndarray:
    """Extract a Hermitian representative from an eigenvector of a real-eigenvalue.

    The map preserves Hermiticity, so for a real simple eigenvalue the
    eigenvector is Hermitian up to a phase; in degenerate corners the Hermitian
    and anti-Hermitian parts are both eigenvectors and we keep the larger one.
    """
    a = unvec(eigensystem.vectors[:, index], n)
    h = (a + a.conj().T) / 2
    k = (a - a.conj().T) / 2j
    return h if frob(h) >= frob(k) else k


def spectral_radius(superoperator: Superoperator,
                    tols: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Just the spectral radius (cheapest query; used by curve scans)."""
    values = np.linalg.eigvals(superoperator.matrix)
    return float(np.max(np.abs(values)))


def perron(superoperator: Superoperator,
           tols: Tolerances = DEFAULT_TOLERANCES) -> SpectralData:
    """Extract the Perron triple (radius, right state, left weight) of a CP map.

    Raises :class:`SpectralIndeterminateError` when no real positive eigenvalue
    sits at the spectral radius (not a CP map, or hopeless noise), and
    :class:`PositivityError` via state projection when the eigenvector has
    negative parts beyond 1e-8.
    """
    m = superoperator.matrix
    n = superoperator.dim
    es = eigendecompose(m, tols)
    radius = float(np.max(np.abs(es.values)))
    if radius <= 0:
        raise SpectralIndeterminateError("zero spectral radius")
    # The peripheral eigenvalues may tie in modulus to rounding (e.g. a +/-
    # pair for a 2-periodic map), so the modulus sort alone cannot be trusted
    # to put the Perron root first: take the peripheral one of largest real
    # part and insist that it is the positive real point of the circle.
    tol_edge = 1e-9 * max(radius, 1.0)
    peripheral = np.flatnonzero(np.abs(es.values) >= radius - tol_edge)
    lead = int(peripheral[np.argmax(es.values[peripheral].real)])
    top = es.values[lead]
    if abs(top - radius) > tol_edge:
        raise SpectralIndeterminateError(
            f"no eigenvalue at the positive real point of the spectral "
            f"circle (closest {top}, radius {radius:.6e}); not a CP spectrum"
        )
    lam = float(top.real)
    others = np.delete(np.arange(len(es.values)), lead)
    same = np.abs(es.values[others] - top) <= tol_edge
    degenerate = bool(np.any(same))
    if others.size == 0:
        gap = 1.0
    else:
        second = float(np.max(np.abs(es.values[others])))
        gap = float((radius - second) / radius)

    rho = project_to_state(_hermitian_eigvec(es, lead, n), what="leading eigenvector")
    scale = max(frob(m), np.finfo(float).tiny)
    residual = frob(superoperator.apply(rho) - lam * rho) / scale
    if residual > tols.residual and not degenerate:
        raise SpectralIndeterminateError(
            f"leading eigenvector residual {residual:.3e} exceeds {tols.residual:.1e}"
        )

    es_adj = eigendecompose(m.conj().T, tols)
    idx = int(np.argmin(np.abs(es_adj.values - lam)))
    if abs(es_adj.values[idx] - lam) > 1e-8 * max(radius, 1.0):
        raise SpectralIndeterminateError("adjoint spectrum misses the Perron root")
    w = _hermitian_eigvec(es_adj, idx, n)
    pairing = float(np.trace(w @ rho).real)
    if abs(pairing) <= 1e-12 * max(frob(w), np.finfo(float).tiny):
        raise SpectralIndeterminateError(
            "left/right Perron eigenvectors pair to zero (defective root)"
        )
    m_u = w / pairing
    return SpectralData(
        lambda_u=lam,
        rho_u=rho,
        m_u=m_u,
        degenerate=degenerate,
        gap=gap,
        residual=residual,
    )
