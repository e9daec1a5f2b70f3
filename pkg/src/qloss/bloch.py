"""Bloch decomposition, normal-form filtering, and correlation-matrix SVD.

A bipartite N x M density matrix decomposes over the SU(N) and SU(M)
generator bases as

    rho = 1/(NM) I(x)I + 1/(2M) sum_u a_u g_u(x)I + 1/(2N) sum_v b_v I(x)h_v
          + 1/4 sum_uv t_uv g_u(x)h_v

with real local vectors a, b and a real correlation matrix t. The local
vectors vanish exactly for maximally mixed marginals; iterative local
filtering drives any full-local-rank state to that normal form, which is
entangled iff the original state is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotPSDError,
    RankDeficientError,
)
from .states import DensityMatrix, partial_trace
from .su_basis import generators

NF_TOL = 1e-9
NF_MAX_ITER = 500


def _basis_stack(dim: int) -> np.ndarray:
    """Stacked generators for dim >= 2, or an empty stack for a trivial side."""
    if dim < 2:
        return np.zeros((0, dim, dim), dtype=complex)
    return generators(dim).stacked()


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors and correlation matrix of a bipartite state."""

    dims: tuple[int, int]
    a: np.ndarray          # length N^2 - 1
    b: np.ndarray          # length M^2 - 1
    t: np.ndarray          # (N^2 - 1) x (M^2 - 1) correlation matrix


@dataclass(frozen=True)
class CorrelationSVD:
    """SVD of the correlation matrix; rank counts singular values above tol."""

    u: np.ndarray
    tau: np.ndarray        # descending, nonnegative
    v: np.ndarray
    rank: int


def bloch_decompose(rho: DensityMatrix) -> BlochForm:
    """Extract (a, b, t) via generator traces.

    a_u = Tr[rho (g_u (x) I)], b_v = Tr[rho (I (x) h_v)],
    t_uv = Tr[rho (g_u (x) h_v)]; all are real for Hermitian input.
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"Bloch decomposition needs bipartite dims, got {rho.dims}")
    n, m = rho.dims
    gl = _basis_stack(n)
    gr = _basis_stack(m)
    tensor = rho.matrix.reshape(n, m, n, m)
    a = np.einsum("jmkm,akj->a", tensor, gl).real
    b = np.einsum("jmjn,bnm->b", tensor, gr).real
    t = np.einsum("jmkn,akj,bnm->ab", tensor, gl, gr).real
    return BlochForm(dims=(n, m), a=a, b=b, t=t)


def reconstruct(bf: BlochForm) -> np.ndarray:
    """Rebuild the density matrix from its Bloch form."""
    n, m = bf.dims
    gl = _basis_stack(n)
    gr = _basis_stack(m)
    rho = np.eye(n * m, dtype=complex) / (n * m)
    if len(gl):
        rho += np.kron(np.einsum("a,aij->ij", bf.a, gl), np.eye(m)) / (2 * m)
    if len(gr):
        rho += np.kron(np.eye(n), np.einsum("b,bij->ij", bf.b, gr)) / (2 * n)
    if len(gl) and len(gr):
        corr = np.einsum("ab,aij,bkl->ikjl", bf.t, gl, gr).reshape(n * m, n * m)
        rho += corr / 4.0
    return rho


def marginals(rho: DensityMatrix) -> tuple[DensityMatrix, DensityMatrix]:
    """Both reduced one-party states of a bipartite density matrix."""
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"marginals need bipartite dims, got {rho.dims}")
    return partial_trace(rho, [0]), partial_trace(rho, [1])


def _marginal_mats(mat: np.ndarray, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    tensor = mat.reshape(n, m, n, m)
    return np.einsum("jmkm->jk", tensor), np.einsum("jmjn->mn", tensor)


def _normal_form_steps(
    rho: DensityMatrix,
    tol: float = NF_TOL,
    max_iter: int = NF_MAX_ITER,
    rank_tol: float = numerics.RANK_TOL,
) -> tuple[DensityMatrix, int]:
    """Filtering loop; returns the filtered state and the iteration count."""
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"normal form needs bipartite dims, got {rho.dims}")
    n, m = rho.dims
    mat = rho.matrix.copy()
    rho_a, rho_b = _marginal_mats(mat, n, m)
    for side, dim in ((rho_a, n), (rho_b, m)):
        w = np.linalg.eigvalsh((side + side.conj().T) / 2.0)
        if int((w > rank_tol * float(w.max())).sum()) < dim:
            raise RankDeficientError(
                f"marginal of dimension {dim} is rank deficient; reduce the support first")
    eye_a = np.eye(n) / n
    eye_b = np.eye(m) / m
    stalled = 0
    for iteration in range(max_iter):
        deviation = max(
            float(np.abs(rho_a - eye_a).max()), float(np.abs(rho_b - eye_b).max()))
        if deviation <= tol:
            return DensityMatrix.create(mat, (n, m)), iteration
        try:
            filt = np.kron(numerics.inv_sqrt_psd(n * rho_a, rank_tol),
                           numerics.inv_sqrt_psd(m * rho_b, rank_tol))
        except NotPSDError as exc:
            # divergent trajectories on rank-deficient states amplify noise
            # until a marginal leaves the PSD cone: a filtering breakdown
            raise NoConvergenceError(
                f"normal-form filtering broke down numerically after {iteration} "
                f"iterations ({exc})", iterations=iteration) from exc
        mat = filt @ mat @ filt.conj().T
        mat = (mat + mat.conj().T) / 2.0     # large filters amplify rounding drift
        trace = float(mat.trace().real)
        if not np.isfinite(trace) or trace <= 1e-12:
            raise NoConvergenceError(
                f"normal-form filtering collapsed the state after {iteration} iterations",
                iterations=iteration)
        mat /= trace
        prev_a, prev_b = rho_a, rho_b
        rho_a, rho_b = _marginal_mats(mat, n, m)
        change = max(float(np.abs(rho_a - prev_a).max()), float(np.abs(rho_b - prev_b).max()))
        # the stop criterion sees only the marginals: once they are frozen
        # above tol the iteration can never succeed, so report early
        stalled = stalled + 1 if change < 1e-13 else 0
        if stalled >= 30:
            raise NoConvergenceError(
                f"normal-form filtering stalled after {iteration + 1} iterations "
                f"(marginals frozen at deviation {deviation:.3e})",
                iterations=iteration + 1)
    raise NoConvergenceError(
        f"normal form not reached within {max_iter} iterations", iterations=max_iter)


def normal_form(
    rho: DensityMatrix,
    tol: float = NF_TOL,
    max_iter: int = NF_MAX_ITER,
    rank_tol: float = numerics.RANK_TOL,
) -> DensityMatrix:
    """Filter a full-local-rank state to maximally mixed marginals.

    Repeats rho -> (F_A (x) F_B) rho (F_A (x) F_B)^dag / trace with
    F_A = (N rho_A)^(-1/2), F_B = (M rho_B)^(-1/2) until both marginals are
    within ``tol`` (max-entry distance) of I/d.

    Raises :class:`RankDeficientError` if a marginal is rank deficient and
    :class:`NoConvergenceError` if the cap is hit; callers may fall back to
    analyzing the unfiltered state (the filtering cannot create or destroy
    entanglement, so nothing is lost except the filtered-only criteria).
    """
    filtered, _ = _normal_form_steps(rho, tol=tol, max_iter=max_iter, rank_tol=rank_tol)
    return filtered


def correlation_svd(bf: BlochForm, rank_tol: float = numerics.RANK_TOL) -> CorrelationSVD:
    """SVD of the correlation matrix with its numerical rank.

    The rank is bounded by min(N^2-1, M^2-1); for separable states it is
    also capped by the number of product terms (Sylvester's inequality).
    """
    if bf.t.size == 0:
        shape = bf.t.shape
        return CorrelationSVD(
            u=np.zeros((shape[0], 0)), tau=np.zeros(0), v=np.zeros((shape[1], 0)), rank=0)
    u, tau, v = numerics.svd(bf.t)
    top = float(tau.max()) if tau.size else 0.0
    rank = int((tau > rank_tol * top).sum()) if top > 0 else 0
    return CorrelationSVD(u=u, tau=tau, v=v, rank=rank)
