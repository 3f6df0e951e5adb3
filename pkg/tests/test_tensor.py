import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st
from conftest import dims_and_permutation, subsystem_dims
from shadowinv.tensor import (
    IndexedOperator, LayoutError, PAULI_X, PAULI_Z, SubsystemLayout, allclose, apply_channel,
    choi_operator, compose_permutations, dual_choi, haar_unitary, inverse_permutation, is_psd,
    is_unitary, kraus_to_choi, kron, link_product, partial_trace, partial_transpose,
    permutation_operator, random_density, reorder_matrix, reorder_vector, sample_unitaries,
    switch_operator
)

def _random_matrix(dim: int, seed: int = 7) -> np.ndarray:
    rng: np.random.Generator = np.random.default_rng(seed)
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))

def test_layout_rejects_duplicates():
    with pytest.raises(LayoutError):
        SubsystemLayout(['A', 'A'], [2, 2])
    with pytest.raises(LayoutError):
        SubsystemLayout(['A'], [2, 2])
    with pytest.raises(LayoutError):
        SubsystemLayout(['A'], [0])

def test_layout_dims():
    layout: SubsystemLayout = SubsystemLayout(['A', 'B', 'C'], [2, 3, 4])
    assert layout.total_dim == 24
    assert layout.dim_of(['A', 'C']) == 8
    assert layout.without(['B']) == SubsystemLayout(['A', 'C'], [2, 4])
    with pytest.raises(LayoutError):
        layout.index('D')

@given(dims_and_permutation())
def test_reorder_matches_permutation_operator(case):
    dims, order = case
    total: int = int(np.prod(dims))
    matrix: np.ndarray = _random_matrix(total)
    perm_op: np.ndarray = permutation_operator(order, dims)
    assert allclose(reorder_matrix(matrix, dims, order), perm_op @ matrix @ perm_op.T)

@given(dims_and_permutation())
def test_reorder_inverse(case):
    dims, order = case
    total: int = int(np.prod(dims))
    matrix: np.ndarray = _random_matrix(total)
    moved: np.ndarray = reorder_matrix(matrix, dims, order)
    moved_dims = [dims[k] for k in order]
    assert allclose(reorder_matrix(moved, moved_dims, inverse_permutation(order)), matrix)

@given(dims_and_permutation())
def test_reorder_vector_matches_operator(case):
    dims, order = case
    total: int = int(np.prod(dims))
    vec: np.ndarray = np.random.default_rng(3).standard_normal(total)
    assert allclose(reorder_vector(vec, dims, order), permutation_operator(order, dims) @ vec)

def test_permutation_operator_is_unitary():
    assert is_unitary(permutation_operator((2, 0, 1), [2, 3, 2]))
    with pytest.raises(LayoutError):
        permutation_operator((0, 0), [2, 2])

def test_permutation_operators_compose():
    dims: list = [2, 3, 2]
    perm, sigma = (1, 2, 0), (0, 2, 1)
    permuted: list = [dims[k] for k in sigma]
    assert allclose(permutation_operator(perm, permuted) @ permutation_operator(sigma, dims),
        permutation_operator(compose_permutations(sigma, perm), dims))
    assert compose_permutations(perm, inverse_permutation(perm)) == (0, 1, 2)

def test_switch_operator_swaps_factors():
    rng: np.random.Generator = np.random.default_rng(3)
    left, right = rng.standard_normal(2), rng.standard_normal(3)
    assert switch_operator(2, 3).shape == (6, 6)
    assert allclose(switch_operator(2, 3) @ np.kron(right, left), np.kron(left, right))
    assert allclose(switch_operator(3, 2) @ np.kron(left, right), np.kron(right, left))
    assert allclose(switch_operator(2, 3).T, switch_operator(3, 2))
    assert allclose(switch_operator(2, 2) @ switch_operator(2, 2), np.eye(4))

def test_partial_trace_of_product():
    first: np.ndarray = random_density(2, np.random.default_rng(1))
    second: np.ndarray = random_density(3, np.random.default_rng(2))
    third: np.ndarray = random_density(2, np.random.default_rng(3))
    joint: np.ndarray = kron(first, second, third)
    assert allclose(partial_trace(joint, [2, 3, 2], [1]), np.kron(first, third))
    assert allclose(partial_trace(joint, [2, 3, 2], [0, 2]), second)
    assert np.isclose(np.trace(partial_trace(joint, [2, 3, 2], [0, 1, 2])), 1.0)

@given(subsystem_dims(min_size = 2, max_size = 3))
def test_partial_transpose_twice_is_identity(dims):
    total: int = int(np.prod(dims))
    matrix: np.ndarray = _random_matrix(total)
    once: np.ndarray = partial_transpose(matrix, dims, [0])
    assert allclose(partial_transpose(once, dims, [0]), matrix)
    assert allclose(partial_transpose(matrix, dims, list(range(len(dims)))), matrix.T)

def test_indexed_operator_rejects_wrong_shape():
    with pytest.raises(LayoutError):
        IndexedOperator(np.eye(3), SubsystemLayout(['A'], [2]))

def test_apply_channel_of_unitary_choi():
    unitary: np.ndarray = haar_unitary(2, np.random.default_rng(5))
    choi: IndexedOperator = IndexedOperator(choi_operator(unitary), SubsystemLayout(['in', 'out'], [2, 2]))
    rho: np.ndarray = random_density(2, np.random.default_rng(6))
    assert allclose(apply_channel(choi, rho, 'in'), unitary @ rho @ unitary.conj().T)

def test_link_product_composes_channels():
    first: np.ndarray = haar_unitary(2, np.random.default_rng(8))
    second: np.ndarray = haar_unitary(2, np.random.default_rng(9))
    op_a: IndexedOperator = IndexedOperator(choi_operator(first), SubsystemLayout(['A', 'B'], [2, 2]))
    op_b: IndexedOperator = IndexedOperator(choi_operator(second), SubsystemLayout(['B', 'C'], [2, 2]))
    linked: IndexedOperator = link_product(op_a, op_b)
    assert linked.layout.labels == ('A', 'C')
    assert allclose(linked.matrix, choi_operator(second @ first))

def test_link_product_rejects_mismatch():
    op_a: IndexedOperator = IndexedOperator(np.eye(4), SubsystemLayout(['A', 'B'], [2, 2]))
    op_b: IndexedOperator = IndexedOperator(np.eye(3), SubsystemLayout(['B'], [3]))
    with pytest.raises(LayoutError):
        link_product(op_a, op_b)

def test_dual_choi_gives_heisenberg_picture():
    unitary: np.ndarray = haar_unitary(2, np.random.default_rng(10))
    choi: IndexedOperator = IndexedOperator(choi_operator(unitary), SubsystemLayout(['in', 'out'], [2, 2]))
    dual: IndexedOperator = dual_choi(choi, 'in', 'out')
    assert allclose(apply_channel(dual, PAULI_Z, 'out'), unitary.conj().T @ PAULI_Z @ unitary)

def test_kraus_to_choi_trace_preserving():
    kraus = [np.sqrt(0.5) * np.eye(2), np.sqrt(0.5) * PAULI_X]
    choi: np.ndarray = kraus_to_choi(kraus)
    assert is_psd(choi)
    assert allclose(partial_trace(choi, [2, 2], [1]), np.eye(2))

@given(st.integers(min_value = 1, max_value = 5), st.integers(min_value = 0, max_value = 10000))
def test_haar_unitary_is_unitary(dim, seed):
    assert is_unitary(haar_unitary(dim, np.random.default_rng(seed)))

def test_sample_unitaries_prefix_stable():
    few = sample_unitaries(2, 3, 42)
    many = sample_unitaries(2, 10, 42)
    for first, second in zip(few, many):
        assert allclose(first, second, tol = 0.0)
    assert not allclose(sample_unitaries(2, 1, 43)[0], few[0])

def test_haar_trace_moments():
    # Qubit Haar moments: E|tr U|^2 = 1 and E|tr U|^4 = 2
    traces: np.ndarray = np.abs([np.trace(unitary) for unitary in sample_unitaries(2, 20000, 17)])
    assert np.mean(traces ** 2) == pytest.approx(1.0, abs = 0.05)
    assert np.mean(traces ** 4) == pytest.approx(2.0, abs = 0.1)
    phases: np.ndarray = np.array([np.linalg.det(unitary) for unitary in sample_unitaries(2, 20000, 18)])
    assert abs(np.mean(phases)) < 0.05

def test_random_density_is_state():
    for pure in (False, True):
        rho: np.ndarray = random_density(3, np.random.default_rng(11), pure = pure)
        assert is_psd(rho)
        assert np.isclose(np.trace(rho).real, 1.0)
    pure_state: np.ndarray = random_density(3, np.random.default_rng(12), pure = True)
    assert np.isclose(np.trace(pure_state @ pure_state).real, 1.0)
