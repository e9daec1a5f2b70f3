"""State types, Gamma blocks, reductions, and transposes."""

import numpy as np
import pytest

from qloss import (
    DensityMatrix,
    DimSpec,
    StateVector,
    as_tripartite,
    density,
    gamma_blocks,
    local_ranks,
    parse_ket,
    partial_trace,
    partial_transpose,
    reduce_support,
)
from qloss.errors import (
    DimensionMismatchError,
    EmptyStateError,
    InvalidDimensionError,
    InvalidParamsError,
    InvalidSubsystemError,
    NotHermitianError,
    NotPSDError,
)

from oracles import (
    negativity_oracle,
    pt_brute,
    ptrace_brute,
    random_density_oracle,
    random_pure,
    random_unitary_oracle,
)

BELL = StateVector.create([1, 0, 0, 1], (2, 2))
EX4 = parse_ket("|010> + |001> + |112> + |121>", (2, 3, 3))


def _residual(state: StateVector) -> DensityMatrix:
    return partial_trace(density(state), keep=(1, 2))


def test_dimspec_swaps_and_flags():
    spec = DimSpec.from_dims((2, 4, 3))
    assert (spec.d1, spec.d2, spec.swapped) == (3, 4, True)
    spec = DimSpec.from_dims((2, 3, 4))
    assert (spec.d1, spec.d2, spec.swapped) == (3, 4, False)


def test_dimspec_rejects_bad_dims():
    with pytest.raises(InvalidDimensionError):
        DimSpec.from_dims((3, 2, 2))
    with pytest.raises(InvalidDimensionError):
        DimSpec.from_dims((2, 1, 4))


def test_as_tripartite_permutes_amplitudes():
    rng = np.random.default_rng(0)
    amps = random_pure(rng, 2 * 4 * 3)
    state = StateVector.create(amps, (2, 4, 3))
    canonical, spec = as_tripartite(state)
    assert spec.swapped and canonical.dims == (2, 3, 4)
    original = amps.reshape(2, 4, 3)
    np.testing.assert_allclose(
        canonical.amplitudes.reshape(2, 3, 4), original.transpose(0, 2, 1), atol=1e-15)


def test_state_vector_validation():
    with pytest.raises(EmptyStateError):
        StateVector.create(np.zeros(4), (2, 2))
    with pytest.raises(DimensionMismatchError):
        StateVector.create(np.ones(3), (2, 2))
    with pytest.raises(InvalidParamsError):
        StateVector((2, 2), np.array([1.0, 1.0, 0, 0]))


def test_density_matrix_create_normalizes_and_symmetrizes():
    rho = DensityMatrix.create(4.0 * np.eye(2), (2,))
    np.testing.assert_allclose(rho.matrix, np.eye(2) / 2)
    with pytest.raises(NotHermitianError):
        DensityMatrix.create(np.array([[1.0, 1.0], [0.0, 1.0]]), (2,))
    with pytest.raises(NotPSDError):
        DensityMatrix.create(np.diag([1.5, -0.5]), (2,))


def test_gamma_blocks_ghz():
    from qloss import ghz
    blocks = gamma_blocks(ghz())
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(blocks.g1, [[s, 0], [0, 0]], atol=1e-15)
    np.testing.assert_allclose(blocks.g2, [[0, 0], [0, s]], atol=1e-15)


def test_gamma_blocks_product_state():
    state = parse_ket("|000>", (2, 2, 2))
    blocks = gamma_blocks(state)
    np.testing.assert_allclose(blocks.g1, [[1, 0], [0, 0]])
    np.testing.assert_allclose(blocks.g2, np.zeros((2, 2)))


def test_gamma_blocks_four_term_state():
    blocks = gamma_blocks(EX4)
    want1 = np.zeros((3, 3))
    want1[1, 0] = want1[0, 1] = 0.5
    want2 = np.zeros((3, 3))
    want2[1, 2] = want2[2, 1] = 0.5
    np.testing.assert_allclose(blocks.g1, want1, atol=1e-15)
    np.testing.assert_allclose(blocks.g2, want2, atol=1e-15)


def test_gamma_block_norms_sum_to_one():
    rng = np.random.default_rng(1)
    state = StateVector.create(random_pure(rng, 2 * 3 * 4), (2, 3, 4))
    blocks = gamma_blocks(state)
    total = np.linalg.norm(blocks.g1) ** 2 + np.linalg.norm(blocks.g2) ** 2
    assert total == pytest.approx(1.0, abs=1e-12)


def test_density_is_projector():
    rho = density(BELL)
    assert rho.matrix.trace().real == pytest.approx(1.0)
    np.testing.assert_allclose(rho.matrix @ rho.matrix, rho.matrix, atol=1e-12)


def test_density_blocks_are_vec_outer_products():
    rng = np.random.default_rng(2)
    for dims in ((2, 2, 2), (2, 3, 3), (2, 2, 4)):
        state = StateVector.create(random_pure(rng, int(np.prod(dims))), dims)
        blocks = gamma_blocks(state)
        rho = density(state).matrix
        nm = dims[1] * dims[2]
        vecs = [blocks.g1.reshape(-1), blocks.g2.reshape(-1)]
        for i in range(2):
            for j in range(2):
                block = rho[i * nm:(i + 1) * nm, j * nm:(j + 1) * nm]
                np.testing.assert_allclose(block, np.outer(vecs[i], vecs[j].conj()),
                                           atol=1e-12)


def test_partial_trace_product_state():
    rng = np.random.default_rng(3)
    rho_a = random_density_oracle(rng, 2)
    rho_b = random_density_oracle(rng, 3)
    rho = DensityMatrix.create(np.kron(rho_a, rho_b), (2, 3))
    np.testing.assert_allclose(partial_trace(rho, [0]).matrix, rho_a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, [1]).matrix, rho_b, atol=1e-12)


def test_partial_trace_ghz_residual():
    from qloss import ghz
    residual = _residual(ghz())
    want = np.zeros((4, 4))
    want[0, 0] = want[3, 3] = 0.5
    np.testing.assert_allclose(residual.matrix, want, atol=1e-12)


def test_partial_trace_w_residual():
    from qloss import w
    residual = _residual(w())
    psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
    want = np.outer(psi, psi) * (2 / 3)
    want[0, 0] = 1 / 3
    np.testing.assert_allclose(residual.matrix, want, atol=1e-12)


def test_partial_trace_matches_brute_oracle():
    rng = np.random.default_rng(4)
    for dims, keep in (((2, 3, 3), (1, 2)), ((2, 3, 3), (0,)), ((2, 2, 3, 3), (1, 3)),
                       ((6, 6), (0,))):
        rho = DensityMatrix.create(random_density_oracle(rng, int(np.prod(dims))), dims)
        got = partial_trace(rho, keep).matrix
        want = ptrace_brute(rho.matrix, dims, keep)
        np.testing.assert_allclose(got, want, atol=1e-12)
        assert got.trace().real == pytest.approx(1.0, abs=1e-10)


def test_partial_trace_invalid_subsystem():
    rho = density(BELL)
    with pytest.raises(InvalidSubsystemError):
        partial_trace(rho, [5])
    with pytest.raises(InvalidSubsystemError):
        partial_trace(rho, [])


def test_partial_transpose_of_product_state_is_psd():
    rng = np.random.default_rng(5)
    rho = DensityMatrix.create(
        np.kron(random_density_oracle(rng, 2), random_density_oracle(rng, 3)), (2, 3))
    w = np.linalg.eigvalsh(partial_transpose(rho, 0))
    assert w.min() >= -1e-12


def test_partial_transpose_four_term_residual_matrix():
    # the 3x3 residual's partial transpose: 1/4 entries on a fixed pattern
    pt = partial_transpose(_residual(EX4), 0)
    want = np.zeros((9, 9))
    for r, c in [(0, 4), (4, 0), (1, 1), (3, 3), (5, 5), (7, 7), (4, 8), (8, 4)]:
        want[r, c] = 0.25
    np.testing.assert_allclose(pt, want, atol=1e-14)


def test_partial_transpose_bell_min_eig():
    w = np.linalg.eigvalsh(partial_transpose(density(BELL), 0))
    assert w.min() == pytest.approx(-0.5, abs=1e-12)


def test_partial_transpose_involution_and_trace():
    rng = np.random.default_rng(6)
    rho = DensityMatrix.create(random_density_oracle(rng, 12), (3, 4))
    pt = partial_transpose(rho, 0)
    assert pt.trace().real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(pt).sum() == pytest.approx(1.0, abs=1e-10)
    back = partial_transpose(DensityMatrix((3, 4), rho.matrix), 0)  # same input again
    twice = pt.reshape(3, 4, 3, 4).transpose(2, 1, 0, 3).reshape(12, 12)
    np.testing.assert_allclose(twice, rho.matrix, atol=1e-14)
    assert np.abs(back - pt).max() == 0.0


def test_partial_transpose_matches_brute_oracle():
    rng = np.random.default_rng(7)
    rho = DensityMatrix.create(random_density_oracle(rng, 6), (2, 3))
    np.testing.assert_allclose(partial_transpose(rho, 0), pt_brute(rho.matrix, 2, 3),
                               atol=1e-14)


def test_partial_transpose_second_subsystem():
    rng = np.random.default_rng(8)
    rho = DensityMatrix.create(random_density_oracle(rng, 6), (2, 3))
    pt_b = partial_transpose(rho, 1)
    np.testing.assert_allclose(pt_b, partial_transpose(rho, 0).T, atol=1e-14)
    with pytest.raises(InvalidSubsystemError):
        partial_transpose(rho, 2)


def _embed(rho_small, dims_small, dims_big, rng):
    """Embed a state via random local isometries."""
    iso = []
    for small, big in zip(dims_small, dims_big):
        iso.append(random_unitary_oracle(rng, big)[:, :small])
    full = np.kron(iso[0], iso[1])
    return DensityMatrix.create(full @ rho_small @ full.conj().T, dims_big)


def test_local_ranks():
    assert local_ranks(density(BELL)) == (2, 2)
    assert local_ranks(density(StateVector.create([1, 0, 0, 0], (2, 2)))) == (1, 1)
    rng = np.random.default_rng(9)
    bell_in_2x3 = _embed(density(BELL).matrix, (2, 2), (2, 3), rng)
    assert local_ranks(bell_in_2x3) == (2, 2)


def test_reduce_support_full_rank_is_identity():
    rng = np.random.default_rng(10)
    rho = DensityMatrix.create(random_density_oracle(rng, 6, min_eig=0.02), (2, 3))
    reduced, record = reduce_support(rho)
    assert reduced is rho
    assert not record.reduced
    np.testing.assert_allclose(record.u_a, np.eye(2))


def test_reduce_support_bell_in_2x3():
    rng = np.random.default_rng(11)
    emb = _embed(density(BELL).matrix, (2, 2), (2, 3), rng)
    reduced, record = reduce_support(emb)
    assert reduced.dims == (2, 2) and record.reduced
    assert negativity_oracle(reduced.matrix, 2, 2) == pytest.approx(0.5, abs=1e-10)


def test_reduce_support_pure_product_to_scalar():
    rng = np.random.default_rng(12)
    ket = np.zeros(9)
    ket[0] = 1.0
    emb = _embed(np.outer(ket, ket), (3, 3), (3, 3), rng)
    reduced, record = reduce_support(emb)
    assert reduced.dims == (1, 1)
    np.testing.assert_allclose(reduced.matrix, [[1.0]], atol=1e-12)


def test_reduce_support_preserves_negativity():
    rng = np.random.default_rng(13)
    for dims_small, dims_big in (((2, 2), (2, 3)), ((2, 2), (3, 4)), ((2, 3), (3, 3))):
        small = random_density_oracle(rng, int(np.prod(dims_small)))
        before = negativity_oracle(small, *dims_small)
        emb = _embed(small, dims_small, dims_big, rng)
        reduced, record = reduce_support(emb)
        assert reduced.dims == dims_small
        after = negativity_oracle(reduced.matrix, *reduced.dims)
        assert after == pytest.approx(before, abs=1e-9)
