"""Dense complex matrix kernel used by every other module.

All functions operate on plain ``numpy.ndarray`` values (complex128) and are
pure: inputs are never mutated, so everything here is thread-safe.

Conventions, fixed once to avoid cross-module sign/order bugs:

* eigenvalues are returned ascending,
* singular values are returned descending,
* spectra are computed from the explicitly symmetrized matrix (h + h†)/2,
  because downstream entanglement criteria are eigenvalue-sign-sensitive.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceFailureError, NotHermitianError, NotPSDError

#: Absolute tolerance for Hermiticity checks.
HERMITIAN_ATOL = 1e-12

#: Eigenvalues below -PSD_ATOL fail positive-semidefiniteness checks.
PSD_ATOL = 1e-10

#: Default relative eigenvalue threshold for rank decisions.
RANK_TOL = 1e-10


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, dims (a.rows*b.rows) x (a.cols*b.cols)."""
    return np.kron(np.asarray(a), np.asarray(b))


def is_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    """True if max |m[i,j] - conj(m[j,i])| <= atol."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.abs(m - m.conj().T).max() <= atol)


def eigh(h: np.ndarray, atol: float = HERMITIAN_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` ascending and ``h = V diag(w) V†``.
    Raises :class:`NotHermitianError` if the symmetry check fails at ``atol``.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, atol):
        dev = float(np.abs(h - h.conj().T).max())
        raise NotHermitianError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    w, v = np.linalg.eigh((h + h.conj().T) / 2.0)
    return w, v


def svd(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``m = U diag(s) V†`` (economy form).

    ``s`` is descending and nonnegative; ``U`` and ``V`` hold min(rows, cols)
    orthonormal columns, ``V`` being the right singular vectors (not the
    conjugate transpose).
    """
    m = np.asarray(m, dtype=complex)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailureError(f"SVD failed to converge: {exc}") from exc
    return u, s, vh.conj().T


def singular_values(m: np.ndarray) -> np.ndarray:
    """Descending singular values of ``m``."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailureError(f"SVD failed to converge: {exc}") from exc


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values; equals sum |eigenvalue| for Hermitian input.

    Hermitian matrices go through :func:`eigh` rather than the SVD so that
    the value stays consistent with eigenvalue-based quantities downstream.
    """
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    if is_hermitian(m):
        w, _ = eigh(m)
        return float(np.abs(w).sum())
    return float(singular_values(m).sum())


#: Sum of singular values of a matrix unfolding; for matrices this is the
#: trace norm, the alias is kept because the detection criteria are stated
#: in terms of it.
ky_fan_norm = trace_norm


def _psd_spectrum(h: np.ndarray, atol: float = PSD_ATOL) -> tuple[np.ndarray, np.ndarray]:
    w, v = eigh(h, atol=max(HERMITIAN_ATOL, atol))
    if w[0] < -atol:
        raise NotPSDError(f"matrix has negative eigenvalue {w[0]:.3e}")
    return w, v


def sqrt_psd(h: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix (support only)."""
    w, v = _psd_spectrum(h)
    wmax = float(w.max()) if w.size else 0.0
    root = np.where(w > rank_tol * max(wmax, 0.0), np.sqrt(np.clip(w, 0.0, None)), 0.0)
    return (v * root) @ v.conj().T


def inv_sqrt_psd(h: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Pseudo-inverse square root of a PSD matrix on its support.

    Eigenvalues below ``rank_tol * max(eigenvalue)`` are treated as zero and
    projected out (their inverse contribution is 0). Raises
    :class:`NotPSDError` if an eigenvalue is below -1e-10.
    """
    w, v = _psd_spectrum(h)
    wmax = float(w.max()) if w.size else 0.0
    keep = w > rank_tol * max(wmax, 0.0)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.conj().T
