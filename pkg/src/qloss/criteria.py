"""Entanglement detection tests and measures for bipartite mixed states.

Two correlation-matrix tests are exposed:

* the Ky Fan criterion: a normal-form N x M state with
  ``(sum of correlation singular values)^2 > 4(N-1)(M-1)/(NM)`` is entangled;
* the singular-value length bound ``K = sqrt(N(N-1)M(M-1))/2 * sum tau <= 1``
  claimed necessary for separable normal forms.

The second test empirically fires on provably separable states (for the
3 x 3 isotropic state at its separability boundary K = 4), so the classifier
in :mod:`qloss.robustness` treats it as informational only; the Ky Fan test
showed no false positives over large separable samples.

Detection verdicts use a strict inequality with a 1e-10 deadband: statistics
inside the band report NotDetected rather than a knife-edge claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import numerics
from .bloch import BlochForm, CorrelationSVD
from .errors import DimensionMismatchError, QlossError
from .states import DensityMatrix, StateVector, partial_transpose
from .su_basis import generators

DEADBAND = 1e-10


class Verdict(str, Enum):
    DETECTED = "EntanglementDetected"
    NOT_DETECTED = "NotDetected"
    SEPARABLE = "SeparabilityCertified"


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one detection test."""

    name: str
    statistic: float
    threshold: float
    verdict: Verdict
    notes: str = ""


@dataclass(frozen=True)
class MeasureValue:
    """Value of an entanglement measure, exact or an upper bound."""

    name: str
    value: float
    kind: str                   # "exact" or "upper_bound"
    notes: str = ""


def _detection(statistic: float, threshold: float) -> Verdict:
    return Verdict.DETECTED if statistic > threshold + DEADBAND else Verdict.NOT_DETECTED


def kf_criterion(bf: BlochForm, normal_form: bool = True) -> CriterionResult:
    """Ky Fan norm test on the correlation matrix of a normal-form state.

    ``normal_form=False`` records that the caller skipped the filtering
    gate; the threshold is only justified for maximally mixed marginals.
    Never certifies separability.
    """
    n, m = bf.dims
    statistic = float(numerics.ky_fan_norm(bf.t)) ** 2
    threshold = 4.0 * (n - 1) * (m - 1) / (n * m)
    notes = "squared Ky Fan norm of the correlation matrix"
    if not normal_form:
        notes += "; applied without normal-form gating (caller override)"
    return CriterionResult("ky_fan", statistic, threshold, _detection(statistic, threshold),
                           notes=notes)


def length_bound_criterion(
    csvd: CorrelationSVD, dims: tuple[int, int], normal_form: bool = True
) -> CriterionResult:
    """Rescaled singular-value sum K; K > 1 flags entanglement.

    Reported informationally by the classifier: the bound demonstrably
    exceeds 1 on some separable states, so it must not certify on its own.
    """
    n, m = dims
    scale = np.sqrt(n * (n - 1) * m * (m - 1)) / 2.0
    statistic = float(scale * csvd.tau.sum())
    notes = "rescaled correlation singular values (informational)"
    if not normal_form:
        notes += "; applied without normal-form gating (caller override)"
    return CriterionResult("length_bound", statistic, 1.0,
                           _detection(statistic, 1.0), notes=notes)


def ppt_negativity(rho: DensityMatrix) -> tuple[CriterionResult, MeasureValue]:
    """Partial-transpose test plus the negativity measure.

    Negativity is computed both as |sum of negative PT eigenvalues| and as
    (trace_norm(PT) - 1)/2; the two must agree to 1e-10. A PPT verdict
    certifies separability only where PPT is sufficient: N*M <= 6, or a
    trivial local side (min(N, M) = 1, where every state is separable).
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"PPT test needs bipartite dims, got {rho.dims}")
    n, m = rho.dims
    pt = partial_transpose(rho, 0)
    w, _ = numerics.eigh(pt)
    neg_sum = float(-w[w < 0].sum())
    from_norm = (numerics.trace_norm(pt) - 1.0) / 2.0
    if abs(neg_sum - from_norm) > 1e-10:
        raise QlossError(
            f"negativity cross-check failed: {neg_sum!r} vs {from_norm!r}")
    negativity = max(0.0, neg_sum)
    if negativity > DEADBAND:
        verdict = Verdict.DETECTED
        notes = "negative partial-transpose eigenvalue"
    elif n * m <= 6 or min(n, m) == 1:
        verdict = Verdict.SEPARABLE
        notes = "PPT in a dimension regime where PPT implies separability"
    else:
        verdict = Verdict.NOT_DETECTED
        notes = "PPT; bound entanglement not excluded at these dimensions"
    return (CriterionResult("ppt", negativity, 0.0, verdict, notes=notes),
            MeasureValue("negativity", negativity, "exact"))


def concurrence_pure(state: StateVector) -> MeasureValue:
    """Concurrence of a pure bipartite state, sqrt(2 (1 - Tr rho_A^2))."""
    if len(state.dims) != 2:
        raise DimensionMismatchError(f"expected a bipartite pure state, got dims {state.dims}")
    n, m = state.dims
    block = state.amplitudes.reshape(n, m)
    rho_a = block @ block.conj().T
    purity = float(np.einsum("ij,ji->", rho_a, rho_a).real)
    value = float(np.sqrt(max(0.0, 2.0 * (1.0 - purity))))
    return MeasureValue("concurrence", value, "exact")


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Exact two-qubit concurrence via the spin-flip eigenvalue formula."""
    if rho.dims != (2, 2):
        raise DimensionMismatchError(f"spin-flip formula needs dims (2, 2), got {rho.dims}")
    sy = generators(2)[1]
    flip = np.kron(sy, sy)
    root = numerics.sqrt_psd(rho.matrix)
    herm = root @ flip @ rho.matrix.conj() @ flip @ root
    w, _ = numerics.eigh(herm)
    lam = np.sqrt(np.clip(w, 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class RoofBudget:
    """Search budget for the convex-roof upper bound."""

    ensemble_size: int | None = None    # default: rank + 2
    restarts: int = 32
    iterations: int = 500
    seed: int = 0


def _pure_concurrence_unnormalized(column: np.ndarray, n: int, m: int) -> float:
    """p * C(psi/sqrt(p)) for an unnormalized ensemble member (p = |psi|^2)."""
    p = float(np.vdot(column, column).real)
    if p <= 1e-30:
        return 0.0
    block = column.reshape(n, m)
    gram = block.conj().T @ block
    purity = float(np.einsum("ij,ji->", gram, gram).real)
    return p * np.sqrt(max(0.0, 2.0 * (1.0 - purity / (p * p))))


def _orthonormal_columns(x: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(x)
    d = np.diagonal(r).copy()
    d = np.where(np.abs(d) > 1e-300, d / np.abs(d), 1.0)
    return q * d


def concurrence_roof(rho: DensityMatrix, budget: RoofBudget | None = None) -> MeasureValue:
    """Convex-roof upper bound on the concurrence of a bipartite mixed state.

    Ensembles {p_j, psi_j} are generated by isometry mixing of the
    eigendecomposition (every size-K decomposition of rho arises this way),
    and the average pure-state concurrence is minimized by a seeded
    multi-start random local search. The result is an upper bound on the
    convex-roof infimum; no convergence claim is made. Seed and budget are
    recorded in the output notes for reproducibility.
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"concurrence needs bipartite dims, got {rho.dims}")
    budget = budget or RoofBudget()
    n, m = rho.dims
    w, v = numerics.eigh(rho.matrix)
    keep = w > numerics.RANK_TOL * float(w.max())
    lam = w[keep]
    vecs = v[:, keep]
    rank = int(lam.size)
    sub = vecs * np.sqrt(lam)                       # columns are subnormalized
    size = budget.ensemble_size or (rank + 2)
    size = max(size, rank)

    def cost(mix: np.ndarray) -> float:
        members = sub @ mix.T                       # one unnormalized state per column
        return sum(_pure_concurrence_unnormalized(members[:, j], n, m)
                   for j in range(members.shape[1]))

    eigen_mix = np.zeros((size, rank), dtype=complex)
    eigen_mix[:rank, :rank] = np.eye(rank)
    best = cost(eigen_mix)
    for restart in range(budget.restarts):
        rng = np.random.default_rng(
            np.random.SeedSequence([budget.seed & (2**63 - 1), restart]))
        x = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
        value = cost(_orthonormal_columns(x))
        step = 0.5
        for _ in range(budget.iterations):
            proposal = x + step * (rng.normal(size=x.shape) + 1j * rng.normal(size=x.shape))
            trial = cost(_orthonormal_columns(proposal))
            if trial < value:
                x, value = proposal, trial
            else:
                step = max(step * 0.97, 1e-3)
        best = min(best, value)
    notes = (f"convex-roof local search: seed={budget.seed} restarts={budget.restarts} "
             f"iterations={budget.iterations} ensemble={size}")
    return MeasureValue("concurrence", float(best), "upper_bound", notes=notes)


def concurrence_mixed(rho: DensityMatrix, budget: RoofBudget | None = None) -> MeasureValue:
    """Concurrence of a bipartite mixed state.

    Two-qubit input gets the exact spin-flip value; anything larger gets the
    convex-roof upper bound (flagged as such in the result).
    """
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"concurrence needs bipartite dims, got {rho.dims}")
    if rho.dims == (2, 2):
        return MeasureValue("concurrence", wootters_concurrence(rho), "exact",
                            notes="spin-flip eigenvalue formula")
    return concurrence_roof(rho, budget)


def example1_region(t1: float, t2: float, t3: float, alpha) -> bool:
    """Sufficient separability region for the 2 x 4 correlation family.

    True iff t1^2/a1^2 + t3^2/a3^2 <= 1/4, t2^2/a2^2 <= 1/4 and
    a1^2 + a2^2 + a3^2 <= 1. A zero alpha component with a nonzero matching
    t fails the region; with a zero t the term contributes nothing.
    """
    a1, a2, a3 = (float(a) for a in alpha)

    def quotient(t, a):
        if a == 0.0:
            return None if t != 0.0 else 0.0
        return (t * t) / (a * a)

    q1 = quotient(t1, a1)
    q2 = quotient(t2, a2)
    q3 = quotient(t3, a3)
    if q1 is None or q2 is None or q3 is None:
        return False
    return (q1 + q3 <= 0.25) and (q2 <= 0.25) and (a1 * a1 + a2 * a2 + a3 * a3 <= 1.0)


def build_example1_state(t1: float, t2: float, t3: float) -> DensityMatrix:
    """Three-parameter 2 x 4 family with maximally mixed marginals.

    rho = I/8 + 1/4 (t1 p1 (x) g1 + t2 p2 (x) g13 + t3 p3 (x) g3) with Pauli
    p_i on the qubit. The three SU(4) generators are chosen so that g1, g3
    act as Pauli x/z on levels {0, 1} and g13 as Pauli x on levels {2, 3}
    (basis indices 1, 13 and 6 in this library's ordering: the reading under
    which the separable-region statement holds; see the region docs). The
    family is its own normal form: both local Bloch vectors vanish.

    Raises :class:`NotPSDError` for parameters outside the physical range
    (|t1| + |t3| <= 1/2 and |t2| <= 1/2).
    """
    pauli = generators(2)
    su4 = generators(4)
    g1 = su4[0]     # symmetric (0, 1)
    g13 = su4[5]    # symmetric (2, 3)
    g3 = su4[12]    # diag(1, -1, 0, 0)
    mat = np.eye(8, dtype=complex) / 8.0
    mat += (t1 * np.kron(pauli[0], g1) + t2 * np.kron(pauli[1], g13)
            + t3 * np.kron(pauli[2], g3)) / 4.0
    return DensityMatrix.create(mat, (2, 4))
