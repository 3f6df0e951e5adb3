from itertools import product
import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st
from shadowinv.tensor import haar_unitary, kron
from shadowinv.rep.partition import (
    compositions, conjugate, count_ssyt, count_syt, hook_length, multinomial, partitions
)
from shadowinv.rep.tableau import (
    Tableau, enumerate_ssyt, enumerate_syt, permutation_sign, row_reading_tableau, young_symmetrizer
)
from shadowinv.rep.schur import SchurBasis, schur_basis_unitary_group
from shadowinv.rep.centralizer import (
    SpectrumError, centralizer_decomposition, combined_schur_basis, decomposition_from_spectrum,
    sample_centralizer
)
from shadowinv.rep.counting import (
    full_variable_count, moment_centralizer, moment_unitary, variable_count, variable_count_bound
)

def test_partitions_order():
    assert partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert partitions(3, 2) == [(3,), (2, 1)]
    assert partitions(0) == [()]
    with pytest.raises(ValueError):
        partitions(-1)

def test_hook_lengths():
    assert hook_length((4, 3, 1)) == 576
    assert count_syt((4, 3, 1)) == 70
    assert count_syt((2, 1)) == 2
    assert count_ssyt((2, 1), 3) == 8
    assert count_ssyt((1, 1), 2) == 1
    assert count_ssyt((3,), 2) == 4

@given(st.integers(min_value = 1, max_value = 7))
def test_syt_counts_sum_to_factorial_moment(n):
    # sum over shapes of f_lambda^2 is n!
    assert sum(count_syt(shape) ** 2 for shape in partitions(n)) == int(np.prod(range(1, n + 1)))

@given(st.integers(min_value = 1, max_value = 6), st.integers(min_value = 1, max_value = 4))
def test_schur_weyl_dimension_count(n, dim):
    assert sum(count_syt(shape) * count_ssyt(shape, dim) for shape in partitions(n, dim)) == dim ** n

def test_conjugate_involution():
    for shape in partitions(6):
        assert conjugate(conjugate(shape)) == shape

def test_compositions():
    assert compositions(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert len(compositions(3, 3)) == 10
    assert multinomial((1, 2)) == 3

@pytest.mark.parametrize('shape', [(1,), (2, 1), (3, 1), (2, 2), (3, 2), (2, 1, 1)])
def test_enumerated_tableaux_match_counts(shape):
    syt = enumerate_syt(shape)
    assert len(syt) == count_syt(shape)
    assert all(tab.is_standard() for tab in syt)
    for dim in (2, 3):
        ssyt = enumerate_ssyt(shape, dim)
        assert len(ssyt) == count_ssyt(shape, dim)
        assert all(tab.is_semistandard() for tab in ssyt)

def test_tableau_validation():
    with pytest.raises(ValueError):
        Tableau([[1], [2, 3]])
    tab: Tableau = row_reading_tableau((2, 1))
    assert tab.rows == ((1, 2), (3,))
    assert tab.columns() == [(1, 3), (2,)]

def test_permutation_sign():
    assert permutation_sign((0, 1, 2)) == 1
    assert permutation_sign((1, 0, 2)) == -1
    assert permutation_sign((1, 2, 0)) == 1

def test_young_symmetrizer_commutes_with_unitaries():
    unitary: np.ndarray = haar_unitary(2, np.random.default_rng(0))
    tensor: np.ndarray = kron(unitary, unitary, unitary)
    sym: np.ndarray = young_symmetrizer(row_reading_tableau((2, 1)), 2)
    assert np.max(np.abs(sym @ tensor - tensor @ sym)) < 1e-12
    assert np.linalg.matrix_rank(sym) == count_ssyt((2, 1), 2)

@pytest.mark.parametrize('dim,n,expected', [
    (2, 2, {(2,): (3, 1), (1, 1): (1, 1)}),
    (3, 2, {(2,): (6, 1), (1, 1): (3, 1)}),
    (2, 3, {(3,): (4, 1), (2, 1): (2, 2)}),
    (3, 3, {(3,): (10, 1), (2, 1): (8, 2), (1, 1, 1): (1, 1)})
])
def test_schur_basis_blocks(dim, n, expected):
    basis: SchurBasis = schur_basis_unitary_group(dim, n)
    assert basis.block_table == expected
    assert basis.unitarity_residual() < 1e-10
    assert basis.imag_residual() < 1e-10
    assert basis.num_variables() == moment_unitary(n, dim)
    rng: np.random.Generator = np.random.default_rng(n)
    for _ in range(5):
        unitary: np.ndarray = haar_unitary(dim, rng)
        element: np.ndarray = kron(*([unitary] * n))
        assert basis.off_block_residual(element) < 1e-10
        assert basis.block_repetition_residual(element) < 1e-10

def test_schur_basis_column_index_covers_columns():
    basis: SchurBasis = schur_basis_unitary_group(2, 3)
    index = basis.column_index()
    assert len(index) == 8
    assert all(entry is not None for entry in index)
    assert sorted({entry[0] for entry in index}) == sorted(basis.labels)

def test_centralizer_decomposition():
    decomp = centralizer_decomposition(np.diag([1.0, -1.0]))
    assert decomp.multiplicities == (1, 1)
    assert decomp.eigenvalues == (1.0, -1.0)
    degenerate = centralizer_decomposition(np.diag([0.0, 1.0, 1.0]))
    assert degenerate.multiplicities == (2, 1)
    assert degenerate.offsets == (0, 2)
    with pytest.raises(SpectrumError):
        centralizer_decomposition(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(SpectrumError):
        decomposition_from_spectrum([2, 0])

def test_centralizer_samples_commute():
    observable: np.ndarray = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    decomp = centralizer_decomposition(observable)
    assert decomp.multiplicities == (1, 2)
    element: np.ndarray = sample_centralizer(decomp, np.random.default_rng(4))
    assert np.max(np.abs(element @ observable - observable @ element)) < 1e-10
    assert np.max(np.abs(element.conj().T @ element - np.eye(3))) < 1e-10

def test_counting_values():
    assert moment_unitary(2, 2) == 2
    assert moment_unitary(0, 3) == 1
    assert moment_centralizer(1, (1, 1)) == 2
    assert moment_centralizer(1, (3, 2, 1)) == 3
    assert variable_count(2, 1, (1, 1)) == 8
    assert variable_count(2, 2, (1, 1)) == 60
    assert variable_count(2, 3, (1, 1)) == 560
    assert variable_count(6, 3, (3, 3)) == 2304
    assert full_variable_count(2, 1) == 256
    with pytest.raises(SpectrumError):
        variable_count(3, 1, (1, 1))

def test_counting_bound():
    for dim, t in product(range(2, 7), range(1, 5)):
        for spectrum in ([dim], [1] * dim, [dim - 1, 1]):
            assert variable_count(dim, t, spectrum) <= variable_count_bound(dim, t)

def _combined_element(decomp, t: int, rng: np.random.Generator) -> np.ndarray:
    unitary: np.ndarray = haar_unitary(decomp.dim, rng)
    slot: np.ndarray = sample_centralizer(decomp, rng)
    output: np.ndarray = sample_centralizer(decomp, rng)
    return kron(*([unitary] * (t + 1) + [slot] * t + [output]))

@pytest.mark.parametrize('diagonal,t', [((1.0, -1.0), 1), ((1.0, -1.0), 2), ((1.0, 1.0, 0.0), 1)])
def test_combined_basis(diagonal, t):
    decomp = centralizer_decomposition(np.diag(diagonal))
    basis: SchurBasis = combined_schur_basis(decomp, t)
    assert basis.dimension == len(diagonal) ** (2 * t + 2)
    assert basis.unitarity_residual() < 1e-10
    assert basis.num_variables() == variable_count(len(diagonal), t, decomp.multiplicities)
    rng: np.random.Generator = np.random.default_rng(t)
    for _ in range(3):
        element: np.ndarray = _combined_element(decomp, t, rng)
        assert basis.off_block_residual(element) < 1e-10
        assert basis.block_repetition_residual(element) < 1e-10

@pytest.mark.slow
@pytest.mark.parametrize('diagonal,t', [((1.0, -1.0), 3), ((1.0, 1.0, 0.0), 2)])
def test_combined_basis_large(diagonal, t):
    decomp = centralizer_decomposition(np.diag(diagonal))
    basis: SchurBasis = combined_schur_basis(decomp, t)
    assert basis.num_variables() == variable_count(len(diagonal), t, decomp.multiplicities)
    assert basis.off_block_residual(_combined_element(decomp, t, np.random.default_rng(0))) < 1e-10

def test_combined_basis_rejects_zero_queries():
    with pytest.raises(ValueError):
        combined_schur_basis(np.diag([1.0, -1.0]), 0)
