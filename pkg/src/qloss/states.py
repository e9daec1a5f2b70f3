"""Pure tripartite states, bipartite density matrices, and their reductions.

Basis order for a (d0, d1, d2) state vector is row-major over the labels
|i>|j>|k> with k fastest, which makes the two qubit blocks of the amplitude
vector contiguous row-major N x M matrices (the Gamma blocks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ketparse, numerics
from .errors import (
    DimensionMismatchError,
    EmptyStateError,
    InvalidDimensionError,
    InvalidParamsError,
    InvalidSubsystemError,
    NotHermitianError,
    NotPSDError,
    StateFileError,
)

NORM_ATOL = 1e-12


@dataclass(frozen=True)
class DimSpec:
    """Dimensions of a tripartite qubit x N x M system, with N <= M.

    Inputs given as (2, a, b) with a > b are stored swapped and flagged, so
    downstream code can always assume the smaller qunit comes first.
    """

    d0: int
    d1: int
    d2: int
    swapped: bool = False

    def __post_init__(self):
        if self.d0 != 2:
            raise InvalidDimensionError(f"first subsystem must be a qubit, got {self.d0}")
        if not (2 <= self.d1 <= self.d2):
            raise InvalidDimensionError(
                f"qunit dimensions must satisfy 2 <= N <= M, got ({self.d1}, {self.d2})")

    @classmethod
    def from_dims(cls, dims) -> "DimSpec":
        d0, d1, d2 = (int(d) for d in dims)
        if d1 > d2:
            return cls(d0, d2, d1, swapped=True)
        return cls(d0, d1, d2)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over a tensor-product basis."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        if amps.ndim != 1 or amps.size != int(np.prod(dims)):
            raise DimensionMismatchError(
                f"amplitude vector of length {amps.size} does not match dims {dims}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise InvalidParamsError(f"state vector is not normalized (|psi|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def create(cls, amplitudes, dims, normalize: bool = True) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
        if normalize:
            norm = float(np.linalg.norm(amps))
            if norm <= 1e-300:
                raise EmptyStateError("state vector has zero norm")
            amps /= norm
        return cls(tuple(int(d) for d in dims), amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix with subsystem dimensions attached."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        d = int(np.prod(dims))
        if mat.shape != (d, d):
            raise DimensionMismatchError(f"matrix shape {mat.shape} does not match dims {dims}")
        if not numerics.is_hermitian(mat):
            dev = float(np.abs(mat - mat.conj().T).max())
            raise NotHermitianError(f"density matrix is not Hermitian (deviation {dev:.3e})")
        if abs(mat.trace().real - 1.0) > NORM_ATOL:
            raise InvalidParamsError(f"density matrix trace is {mat.trace().real!r}, not 1")
        w = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
        if w[0] < -numerics.PSD_ATOL:
            raise NotPSDError(f"density matrix has negative eigenvalue {w[0]:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def create(cls, matrix, dims, atol: float = numerics.HERMITIAN_ATOL) -> "DensityMatrix":
        """Symmetrize, renormalize the trace, validate, and wrap."""
        mat = np.asarray(matrix, dtype=complex)
        if not numerics.is_hermitian(mat, atol):
            dev = float(np.abs(mat - mat.conj().T).max())
            raise NotHermitianError(f"matrix is not Hermitian (deviation {dev:.3e})")
        mat = (mat + mat.conj().T) / 2.0
        tr = float(mat.trace().real)
        if abs(tr) <= 1e-300:
            raise InvalidParamsError("matrix has zero trace, cannot normalize")
        return cls(tuple(int(d) for d in dims), mat / tr)


@dataclass(frozen=True)
class GammaBlocks:
    """The two N x M amplitude blocks of a qubit x N x M pure state."""

    g1: np.ndarray
    g2: np.ndarray


def as_tripartite(state: StateVector) -> tuple[StateVector, DimSpec]:
    """Validate a 2 x N x M state and canonicalize to N <= M.

    If the two qunit dimensions arrive in the wrong order, the subsystems
    are permuted (amplitudes reindexed) and the swap is flagged in the
    returned :class:`DimSpec`.
    """
    if len(state.dims) != 3:
        raise DimensionMismatchError(f"expected 3 subsystems, got dims {state.dims}")
    spec = DimSpec.from_dims(state.dims)
    if not spec.swapped:
        return state, spec
    amps = state.amplitudes.reshape(state.dims).transpose(0, 2, 1).reshape(-1)
    return StateVector.create(amps, (spec.d0, spec.d1, spec.d2), normalize=False), spec


def gamma_blocks(state: StateVector) -> GammaBlocks:
    """Split a tripartite state's amplitudes into its two qubit blocks."""
    if len(state.dims) != 3 or state.dims[0] != 2:
        raise DimensionMismatchError(f"expected dims (2, N, M), got {state.dims}")
    _, n, m = state.dims
    tensor = state.amplitudes.reshape(2, n, m)
    return GammaBlocks(g1=tensor[0].copy(), g2=tensor[1].copy())


def density(state: StateVector) -> DensityMatrix:
    """Rank-1 projector |psi><psi| of a pure state."""
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    return DensityMatrix.create(rho, state.dims)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out the subsystems not in ``keep``; output dims follow input order."""
    dims = rho.dims
    nd = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= nd for k in keep):
        raise InvalidSubsystemError(f"keep={keep} invalid for {nd} subsystems")
    tensor = rho.matrix.reshape(dims + dims)
    row = [chr(ord("a") + i) for i in range(nd)]
    col = [chr(ord("a") + nd + i) for i in range(nd)]
    for i in range(nd):
        if i not in keep:
            col[i] = row[i]
    subscripts = "".join(row + col) + "->" + "".join(row[i] for i in keep) + "".join(
        chr(ord("a") + nd + i) for i in keep)
    out_dims = tuple(dims[i] for i in keep)
    d = int(np.prod(out_dims))
    reduced = np.einsum(subscripts, tensor).reshape(d, d)
    return DensityMatrix.create(reduced, out_dims)


def partial_transpose(rho: DensityMatrix, subsystem: int = 0) -> np.ndarray:
    """Transpose one side of a bipartite density matrix.

    The output is Hermitian with unit trace but in general not PSD; a
    negative eigenvalue witnesses entanglement.
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"partial transpose needs bipartite dims, got {rho.dims}")
    if subsystem not in (0, 1):
        raise InvalidSubsystemError(f"subsystem must be 0 or 1, got {subsystem}")
    n, m = rho.dims
    tensor = rho.matrix.reshape(n, m, n, m)
    if subsystem == 0:
        out = tensor.transpose(2, 1, 0, 3)
    else:
        out = tensor.transpose(0, 3, 2, 1)
    return out.reshape(n * m, n * m).copy()


def local_ranks(rho: DensityMatrix, rank_tol: float = numerics.RANK_TOL) -> tuple[int, int]:
    """Ranks of the two marginals at the relative eigenvalue threshold."""
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"local ranks need bipartite dims, got {rho.dims}")
    counts = []
    for side in (0, 1):
        w, _ = numerics.eigh(partial_trace(rho, [side]).matrix)
        counts.append(int((w > rank_tol * float(w.max())).sum()))
    return counts[0], counts[1]


@dataclass(frozen=True)
class SupportReduction:
    """Record of the local rotation + projection applied by reduce_support."""

    u_a: np.ndarray
    u_b: np.ndarray
    dims_before: tuple[int, int]
    dims_after: tuple[int, int]
    reduced: bool = False


def reduce_support(
    rho: DensityMatrix, rank_tol: float = numerics.RANK_TOL
) -> tuple[DensityMatrix, SupportReduction]:
    """Project a bipartite state onto the support of its marginals.

    Each marginal is diagonalized with eigenvalues descending so the support
    occupies the leading indices, and the state is compressed to the n x m
    support block. This is a local-unitary rotation followed by a projection
    onto a subspace containing the whole state, so entanglement (and in
    particular negativity) is unchanged. Full-rank input is returned as-is
    with an identity record. Degenerate marginal eigenvalues only permute
    vectors inside the support subspace, which the compression is blind to.
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"support reduction needs bipartite dims, got {rho.dims}")
    big_n, big_m = rho.dims
    basis = []
    ranks = []
    for side, dim in ((0, big_n), (1, big_m)):
        w, v = numerics.eigh(partial_trace(rho, [side]).matrix)
        w, v = w[::-1], v[:, ::-1]
        rank = int((w > rank_tol * float(w.max())).sum())
        basis.append(v)
        ranks.append(rank)
    n, m = ranks
    if (n, m) == (big_n, big_m):
        record = SupportReduction(
            u_a=np.eye(big_n, dtype=complex), u_b=np.eye(big_m, dtype=complex),
            dims_before=(big_n, big_m), dims_after=(big_n, big_m), reduced=False)
        return rho, record
    iso = np.kron(basis[0][:, :n], basis[1][:, :m])
    compressed = iso.conj().T @ rho.matrix @ iso
    record = SupportReduction(
        u_a=basis[0], u_b=basis[1],
        dims_before=(big_n, big_m), dims_after=(n, m), reduced=True)
    return DensityMatrix.create(compressed, (n, m)), record


def parse_ket(text: str, dims, normalize: bool = True) -> StateVector:
    """Parse a ket expression (see :mod:`qloss.ketparse`) into a state vector.

    With ``normalize`` off the amplitudes are kept exactly as written and
    must already have unit norm.
    """
    amps = ketparse.parse_ket_amplitudes(text, dims)
    return StateVector.create(amps, dims, normalize=normalize)


# --- state file format -----------------------------------------------------
#
#   dims: d0 d1 d2        (or "dims: n m" for a bipartite density input)
#   ket: <expression>     (or "rho:" followed by rows of 'a+bi' entries)


@dataclass(frozen=True)
class StateFile:
    """Parsed content of a state file."""

    kind: str                     # "ket" or "rho"
    dims: tuple[int, ...]
    state: object                 # StateVector or DensityMatrix
    text: str
    ket_expression: str | None = None


def parse_state_file(text: str) -> StateFile:
    """Parse the text state-file format into a state object."""
    lines = text.splitlines()
    idx = 0

    def next_line():
        nonlocal idx
        while idx < len(lines) and lines[idx].strip() == "":
            idx += 1
        if idx >= len(lines):
            return None, idx
        idx += 1
        return lines[idx - 1], idx

    header, lineno = next_line()
    if header is None or not header.strip().startswith("dims:"):
        raise StateFileError("expected a 'dims:' header line", lineno if header else 1)
    try:
        dims = tuple(int(tok) for tok in header.strip()[len("dims:"):].split())
    except ValueError:
        raise StateFileError("dims must be integers", lineno) from None
    if len(dims) not in (2, 3) or any(d < 1 for d in dims):
        raise StateFileError(f"unsupported dims {dims}", lineno)

    body, lineno = next_line()
    if body is None:
        raise StateFileError("missing 'ket:' or 'rho:' section", lineno)
    stripped = body.strip()
    if stripped.startswith("ket:"):
        expr = stripped[len("ket:"):].strip()
        state = parse_ket(expr, dims)
        return StateFile("ket", dims, state, text, ket_expression=expr)
    if stripped.startswith("rho:"):
        d = int(np.prod(dims))
        rows = []
        while True:
            line, lineno = next_line()
            if line is None:
                break
            tokens = line.split()
            try:
                rows.append([ketparse.parse_complex(tok) for tok in tokens])
            except ValueError as exc:
                raise StateFileError(f"bad matrix entry: {exc}", lineno) from None
        if len(rows) != d or any(len(r) != d for r in rows):
            raise StateFileError(f"rho section must be a {d}x{d} matrix")
        mat = np.array(rows, dtype=complex)
        return StateFile("rho", dims, DensityMatrix.create(mat, dims), text)
    raise StateFileError("expected 'ket:' or 'rho:' section", lineno)


def read_state_file(path) -> StateFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_state_file(fh.read())
