"""Dense linear-algebra primitives shared by the rest of the package.

Conventions
-----------
* Matrices are vectorized by **column stacking**: ``vec(A) = A.flatten(order="F")``,
  so a sandwich map ``rho -> A rho B`` has superoperator ``kron(B.T, A)`` and a
  Kraus term ``rho -> L rho L^dag`` has superoperator ``kron(conj(L), L)``.
* Eigenvalues are always reported sorted by decreasing modulus, ties broken by
  decreasing real part and then increasing imaginary part.
* Norms are Frobenius unless stated otherwise.

Everything here wraps LAPACK (via numpy) and adds the residual / tolerance
contracts the higher layers rely on; no iterative or randomized solvers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    HermiticityError,
    PositivityError,
    SingularRestrictionError,
    TraceGaugeError,
)

__all__ = [
    "vec",
    "unvec",
    "frob",
    "kraus_superop",
    "adjoint_superop",
    "choi_from_superop",
    "choi_matrix",
    "EigenSystem",
    "eigendecompose",
    "traceless_basis",
    "solve_on_traceless",
    "PsdReport",
    "psd_check",
    "project_to_state",
]

#: Maximum matrix side length the dense eigensolver path is meant for (n^2 <= 64).
DENSE_DIM_LIMIT = 64


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(matrix).flatten(order="F")


def unvec(vector: np.ndarray, n: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`; ``n`` defaults to the square root of the length."""
    vector = np.asarray(vector)
    if n is None:
        n = int(round(np.sqrt(vector.size)))
    return vector.reshape((n, n), order="F")


def frob(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix))


def kraus_superop(operators: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """Superoperator matrix of ``rho -> sum_k w_k L_k rho L_k^dag`` (column stacking)."""
    operators = np.asarray(operators, dtype=complex)
    if weights is None:
        weights = np.ones(len(operators))
    acc = np.zeros((operators.shape[1] ** 2,) * 2, dtype=complex)
    for w, op in zip(weights, operators):
        acc += w * np.kron(op.conj(), op)
    return acc


def adjoint_superop(matrix: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt adjoint of a superoperator given in column-stacking form."""
    return np.asarray(matrix).conj().T


def choi_from_superop(matrix: np.ndarray) -> np.ndarray:
    """Reshuffle a superoperator matrix into its Choi matrix.

    With column stacking the Choi matrix is ``J = sum_k vec(L_k) vec(L_k)^dag``
    for a Kraus-presented map; the map is completely positive iff J is PSD.
    """
    matrix = np.asarray(matrix)
    n2 = matrix.shape[0]
    n = int(round(np.sqrt(n2)))
    m4 = matrix.reshape(n, n, n, n)
    return m4.transpose((3, 1, 2, 0)).reshape(n2, n2)


def choi_matrix(operators: np.ndarray) -> np.ndarray:
    """Choi matrix built directly from Kraus operators (oracle for the reshuffle)."""
    vs = [vec(op) for op in np.asarray(operators, dtype=complex)]
    return sum(np.outer(v, v.conj()) for v in vs)


@dataclass(frozen=True)
class EigenSystem:
    """Full spectrum of a (small) dense matrix.

    ``values`` are sorted by decreasing modulus (ties: decreasing real part,
    then increasing imaginary part); ``vectors[:, k]`` is the unit right
    eigenvector for ``values[k]``; ``residuals[k] = ||A v_k - lambda_k v_k||``.
    ``leading_tie`` is set when the top two moduli agree within 1e-9 relative.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    leading_tie: bool


def _sort_order(values: np.ndarray) -> np.ndarray:
    # lexsort uses the last key as primary.
    return np.lexsort((values.imag, -values.real, -np.abs(values)))


def eigendecompose(matrix: np.ndarray, tols: Tolerances = DEFAULT_TOLERANCES) -> EigenSystem:
    """Dense eigendecomposition with the package's ordering and residual contract.

    Raises :class:`HermiticityError` never; raises ``ValueError`` for non-square
    input and :class:`SingularRestrictionError` if residuals exceed
    ``tols.residual * ||A||_F`` (which would indicate a defective solve).
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > DENSE_DIM_LIMIT:
        raise ValueError(
            f"dense eigensolver limited to side {DENSE_DIM_LIMIT}, got {a.shape[0]}"
        )
    values, vectors = np.linalg.eig(a)
    order = _sort_order(values)
    values = values[order]
    vectors = vectors[:, order]
    # Fix each eigenvector's phase: largest-modulus component made real positive.
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        pivot = col[np.argmax(np.abs(col))]
        if abs(pivot) > 0:
            vectors[:, k] = col * (abs(pivot) / pivot)
    residuals = np.linalg.norm(a @ vectors - vectors * values[None, :], axis=0)
    scale = max(frob(a), np.finfo(float).tiny)
    if np.any(residuals > tols.residual * scale):
        raise SingularRestrictionError(
            f"eigendecomposition residual {residuals.max():.3e} exceeds "
            f"{tols.residual:.1e} * ||A|| = {tols.residual * scale:.3e}"
        )
    leading_tie = False
    if len(values) > 1:
        top = abs(values[0])
        leading_tie = top > 0 and (top - abs(values[1])) <= 1e-9 * top
    return EigenSystem(values=values, vectors=vectors, residuals=residuals, leading_tie=leading_tie)


def traceless_basis(n: int) -> np.ndarray:
    """Orthonormal basis (as columns of an ``n^2 x (n^2-1)`` array) of the
    traceless subspace of ``n x n`` matrices, in vectorized form."""
    row = vec(np.eye(n, dtype=complex)).conj()[None, :]
    return scipy.linalg.null_space(row)


def solve_on_traceless(
    a: np.ndarray,
    b: np.ndarray,
    tols: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Solve ``a(x) = b`` for the unique traceless matrix ``x``.

    ``a`` is a superoperator matrix whose restriction to the traceless subspace
    must be invertible (smallest restricted singular value > 1e-12 ||a||); ``b``
    must be traceless up to 1e-10.  The returned ``x`` has |trace| <= 1e-12 and
    relative residual ||a(x) - b|| <= 1e-10 ||b||.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    if a.shape != (n * n, n * n):
        raise ValueError(f"superoperator shape {a.shape} does not match matrix side {n}")
    tr_b = abs(complex(np.trace(b)))
    if tr_b > 1e-10:
        raise TraceGaugeError(f"right-hand side has |trace| = {tr_b:.3e} > 1e-10")
    if n == 1:
        # The traceless subspace of 1x1 matrices is {0}.
        return np.zeros((1, 1), dtype=complex)
    basis = traceless_basis(n)
    restricted = basis.conj().T @ a @ basis
    smin = np.linalg.svd(restricted, compute_uv=False)[-1]
    scale = max(frob(a), np.finfo(float).tiny)
    if smin <= 1e-12 * scale:
        raise SingularRestrictionError(
            f"restriction to the traceless subspace is singular "
            f"(sigma_min = {smin:.3e} <= 1e-12 * ||a|| = {1e-12 * scale:.3e})"
        )
    y = np.linalg.solve(restricted, basis.conj().T @ vec(b))
    x = unvec(basis @ y, n)
    norm_b = frob(b)
    residual = frob(unvec(a @ vec(x), n) - b)
    if norm_b > 0 and residual > 1e-10 * norm_b:
        raise SingularRestrictionError(
            f"traceless solve residual {residual:.3e} exceeds 1e-10 * ||b||"
        )
    if abs(complex(np.trace(x))) > max(1e-12, 1e-12 * frob(x)):
        raise TraceGaugeError("solution drifted off the traceless gauge")
    return x


@dataclass(frozen=True)
class PsdReport:
    is_psd: bool
    min_eigenvalue: float
    hermitian_defect: float


def psd_check(matrix: np.ndarray, tol: float | None = None,
              tols: Tolerances = DEFAULT_TOLERANCES) -> PsdReport:
    """Check positive semidefiniteness of a Hermitian matrix.

    The matrix must be Hermitian within ``tol`` relative to its norm (raises
    :class:`HermiticityError` otherwise); ``is_psd`` holds iff the minimum
    eigenvalue is >= ``-tol``.
    """
    if tol is None:
        tol = tols.positivity
    m = np.asarray(matrix, dtype=complex)
    defect = frob(m - m.conj().T)
    scale = max(frob(m), np.finfo(float).tiny)
    if defect > tol * scale:
        raise HermiticityError(
            f"matrix deviates from Hermitian by {defect:.3e} (> {tol:.1e} * ||m||)"
        )
    eigenvalues = np.linalg.eigvalsh((m + m.conj().T) / 2)
    min_eig = float(eigenvalues[0])
    return PsdReport(is_psd=min_eig >= -tol, min_eigenvalue=min_eig, hermitian_defect=defect)


def project_to_state(
    matrix: np.ndarray,
    clip_tol: float = 1e-12,
    fail_tol: float = 1e-8,
    what: str = "state",
) -> np.ndarray:
    """Turn an approximately-PSD eigenvector matrix into a bona fide density matrix.

    Hermitizes, flips the overall sign so the trace is positive, clips
    eigenvalues in ``[-fail_tol, 0)`` to zero (raising :class:`PositivityError`
    below ``-fail_tol``), and renormalizes to unit trace.  ``clip_tol`` only
    controls which negatives are silently absorbed without being counted as
    clipping at all.
    """
    m = np.asarray(matrix, dtype=complex)
    h = (m + m.conj().T) / 2
    tr = float(np.trace(h).real)
    if tr < 0:
        h = -h
        tr = -tr
    if tr <= 0 or not np.isfinite(tr):
        raise PositivityError(f"{what} has non-positive trace {tr:.3e}")
    h = h / tr
    w, v = np.linalg.eigh(h)
    if w[0] < -fail_tol:
        raise PositivityError(
            f"{what} eigenvector has negative part {w[0]:.3e} beyond {fail_tol:.1e}"
        )
    if w[0] < -clip_tol:
        w = np.clip(w, 0.0, None)
    else:
        w = np.where(w < 0, 0.0, w)
    h = (v * w[None, :]) @ v.conj().T
    return h / float(np.trace(h).real)
