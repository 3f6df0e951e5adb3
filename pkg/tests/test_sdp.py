from typing import Tuple
import numpy as np
import pytest
from shadowinv.tensor import PAULI_Z, haar_unitary, partial_trace, sample_unitaries
from shadowinv.formats import read_artifact, write_artifact
from shadowinv.comb.model import CombChoi, CombError, CombSpec, Observable
from shadowinv.comb.constraints import validate_comb
from shadowinv.comb.generate import random_comb, symmetrize, symmetry_element
from shadowinv.comb.channel import apply_comb, dual_on_observable, objective_estimate, shadow_residual
from shadowinv.rep.centralizer import combined_schur_basis
from shadowinv.solver.problem import ConicProblem, SolveResult
from shadowinv.solver.admm import solve
from shadowinv.sdp.permutation import PermutationChoice, default_permutations, grouped_labels
from shadowinv.sdp.coefficients import CoefficientTensor, coefficient_tensor
from shadowinv.sdp.reduced import (
    ReducedProblem, assemble_reduced, constraint_matrices_parallel, constraint_matrices_sequential,
    objective_blocks_parallel, objective_blocks_sequential, reduced_to_conic
)
from shadowinv.sdp.full import (
    DEFAULT_SIZE_CAP, FULL_BLOCK, SizeCapError, assemble_full, check_size_cap, choi_from_result
)
from shadowinv.sdp.reconstruct import (
    BlockAssignment, blocks_from_result, extract_blocks, reconstruct_choi
)

ARCHS = ['sequential', 'parallel']

TABLE = {
    ('sequential', 1): 0.7058, ('sequential', 2): 0.1894, ('sequential', 3): 0.0,
    ('parallel', 1): 0.7058, ('parallel', 2): 0.4707, ('parallel', 3): 0.3536
}

@pytest.fixture(scope = 'module', params = ARCHS)
def problem(request) -> ReducedProblem:
    return assemble_reduced(Observable.named('Z'), 1, request.param, samples = 3, seed = 5)

def _symmetric_comb(problem: ReducedProblem, seed: int) -> CombChoi:
    comb: CombChoi = random_comb(problem.spec, np.random.default_rng(seed))
    blocks: BlockAssignment = extract_blocks(comb, problem.tensor, problem.choice)
    return reconstruct_choi(blocks, problem.tensor, problem.choice, problem.spec.architecture)

def _packed(problem: ReducedProblem, blocks: BlockAssignment) -> np.ndarray:
    x: np.ndarray = np.zeros(problem.num_vars)
    for label, block in zip(problem.labels, problem.blocks):
        x[block.offset:block.stop] = block.embed(blocks[label])
    return x

def test_default_permutations():
    choice: PermutationChoice = default_permutations(1)
    assert choice.pi == (0, 2, 1, 3)
    assert choice.sigma == (0, 2, 1, 3)
    assert grouped_labels(2) == ['P', 'O1', 'O2', 'I1', 'I2', 'F']
    assert default_permutations(2).pi == (0, 3, 1, 4, 2, 5)
    assert default_permutations(2).sigma == (0, 3, 4, 1, 2, 5)
    with pytest.raises(CombError):
        PermutationChoice(1, (0, 1, 2, 3), (0, 2, 1, 3))
    with pytest.raises(CombError):
        default_permutations(0)

def test_coefficient_tensor_matches_basis():
    basis = combined_schur_basis(PAULI_Z, 1)
    tensor: CoefficientTensor = coefficient_tensor(basis, 2, 1)
    for index in (0, 5, 15):
        assert np.max(np.abs(tensor.column(index) - basis.matrix[:, index])) < 1e-9
    with pytest.raises(ValueError):
        coefficient_tensor(basis, 2, 2)

@pytest.mark.parametrize('t,expected', [(1, 8), (2, 60)])
def test_reduced_variable_count(t, expected):
    reduced: ReducedProblem = assemble_reduced(Observable.named('Z'), t, samples = 2, seed = 0)
    assert reduced.num_variables == expected
    assert reduced.num_samples == 2
    assert len(reduced.residual_maps) == 2
    assert reduced.blocks[-1].stop == reduced.num_vars

def test_reduced_rejects_no_samples():
    with pytest.raises(CombError):
        assemble_reduced(PAULI_Z, 1, samples = 0)

def test_extract_is_idempotent(problem):
    blocks: BlockAssignment = extract_blocks(random_comb(problem.spec, np.random.default_rng(1)),
        problem.tensor, problem.choice)
    assert blocks.min_eigenvalue() > -1e-10
    rebuilt: CombChoi = reconstruct_choi(blocks, problem.tensor, problem.choice, problem.spec.architecture)
    again: BlockAssignment = extract_blocks(rebuilt, problem.tensor, problem.choice)
    for label, mat in blocks.items():
        assert np.max(np.abs(again[label] - mat)) < 1e-10
    assert blocks.weighted_trace(problem.tensor) == pytest.approx(4.0)

def test_symmetric_comb_is_valid_and_invariant(problem):
    comb: CombChoi = _symmetric_comb(problem, 2)
    assert validate_comb(comb).valid
    rng: np.random.Generator = np.random.default_rng(3)
    element: np.ndarray = symmetry_element(problem.spec, haar_unitary(2, rng),
        np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 2))), np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 2))))
    assert np.max(np.abs(element @ comb.matrix @ element.conj().T - comb.matrix)) < 1e-10

def test_reduced_rows_match_comb(problem):
    comb: CombChoi = _symmetric_comb(problem, 4)
    x: np.ndarray = _packed(problem, extract_blocks(comb, problem.tensor, problem.choice))
    assert np.max(np.abs(problem.a_mat @ x - problem.b_vec)) < 1e-9

    residuals: np.ndarray = problem.g_mat @ x - problem.h_vec
    for sample, unitary in enumerate(sample_unitaries(2, 3, 5)):
        rows: np.ndarray = residuals[8 * sample:8 * (sample + 1)]
        found: np.ndarray = (rows[:4] + 1j * rows[4:]).reshape(2, 2)
        expected: np.ndarray = dual_on_observable(apply_comb(comb, unitary), PAULI_Z) \
            - unitary @ PAULI_Z @ unitary.conj().T
        assert np.max(np.abs(found - expected)) < 1e-9
        assert np.linalg.norm(found) == pytest.approx(shadow_residual(comb, PAULI_Z, unitary), abs = 1e-9)

def test_sequential_constraint_matrices():
    reduced: ReducedProblem = assemble_reduced(PAULI_Z, 1, samples = 1, seed = 0)
    comb: CombChoi = _symmetric_comb(reduced, 6)
    blocks: BlockAssignment = extract_blocks(comb, reduced.tensor, reduced.choice)
    marginal: np.ndarray = partial_trace(comb.matrix, [2] * 4, [3])
    matrices = constraint_matrices_sequential(reduced.tensor, reduced.choice, 2)
    for (u, v), per_block in matrices.items():
        value: complex = sum(np.trace(blocks[label] @ mat) for label, mat in per_block.items())
        assert value == pytest.approx(marginal[u, v], abs = 1e-10)
    missing = [(u, v) for u in range(8) for v in range(8) if (u, v) not in matrices]
    assert all(abs(marginal[u, v]) < 1e-10 for u, v in missing)
    with pytest.raises(CombError):
        constraint_matrices_sequential(reduced.tensor, reduced.choice, 3)
    assert constraint_matrices_parallel(reduced.tensor, reduced.choice, 2)
    with pytest.raises(CombError):
        constraint_matrices_parallel(reduced.tensor, reduced.choice, 4)

def test_objective_blocks_give_dual_channel(problem):
    comb: CombChoi = _symmetric_comb(problem, 7)
    blocks: BlockAssignment = extract_blocks(comb, problem.tensor, problem.choice)
    unitary: np.ndarray = haar_unitary(2, np.random.default_rng(8))
    objective = objective_blocks_sequential if problem.spec.architecture == 'sequential' \
        else objective_blocks_parallel
    matrices = objective(problem.tensor, problem.choice, unitary, PAULI_Z)
    dual: np.ndarray = dual_on_observable(apply_comb(comb, unitary), PAULI_Z)
    for p in range(2):
        for q in range(2):
            value: complex = sum(np.trace(blocks[label] @ mat[p, q]) for label, mat in matrices.items())
            assert value == pytest.approx(dual[p, q], abs = 1e-10)

def test_reduced_problem_artifact(tmp_path, problem):
    path: str = str(tmp_path / 'reduced.json')
    write_artifact(problem, path)
    loaded: ReducedProblem = read_artifact(path, expected = 'reduced-problem')
    assert loaded.spec == problem.spec
    assert loaded.labels == problem.labels
    assert loaded.mults == problem.mults
    assert loaded.choice == problem.choice
    assert loaded.num_samples == 3
    assert (loaded.a_mat != problem.a_mat).nnz == 0
    assert np.allclose(loaded.h_vec, problem.h_vec)
    assert loaded.tensor.basis.block_table == problem.tensor.basis.block_table

def test_full_problem_layout():
    conic: ConicProblem = assemble_full(PAULI_Z, 1, samples = 2, seed = 0)
    assert conic.blocks[0].name == FULL_BLOCK
    assert conic.blocks[0].size == 32
    assert conic.blocks[0].hermitian
    with pytest.raises(SizeCapError):
        assemble_full(PAULI_Z, 1, samples = 2, size_cap = 15)
    assert assemble_full(PAULI_Z, 1, samples = 2, size_cap = 16).blocks[0].side == 16
    with pytest.raises(CombError):
        assemble_full(PAULI_Z, 1, samples = 0)

@pytest.mark.parametrize('d,t', [(2, 5), (4, 2), (8, 1)])
def test_size_cap_admits_exactly_the_default_rows(d, t):
    spec: CombSpec = CombSpec(d, t)
    assert spec.total_dim == DEFAULT_SIZE_CAP
    check_size_cap(spec)
    with pytest.raises(SizeCapError):
        check_size_cap(spec, DEFAULT_SIZE_CAP - 1)

def test_size_cap_rejects_one_size_up():
    with pytest.raises(SizeCapError):
        check_size_cap(CombSpec(2, 6))

@pytest.fixture(scope = 'module', params = ARCHS)
def solved(request) -> Tuple[ReducedProblem, SolveResult, CombChoi]:
    reduced: ReducedProblem = assemble_reduced(PAULI_Z, 1, request.param, samples = 60, seed = 42)
    result: SolveResult = solve(reduced_to_conic(reduced))
    comb: CombChoi = reconstruct_choi(blocks_from_result(reduced, result), reduced.tensor, reduced.choice,
        request.param)
    return reduced, result, comb

def test_small_reduced_solve_converges(solved):
    _, result, comb = solved
    assert result.optimal
    assert 0.3 < result.objective < np.sqrt(2)
    assert abs(result.objective - result.dual_objective) < 1e-3
    assert result.objective == pytest.approx(objective_estimate(comb, PAULI_Z, 60, 42), abs = 1e-3)
    assert validate_comb(comb, tol = 1e-4).valid

def test_optimal_comb_commutes_with_the_group(solved):
    reduced, _, comb = solved
    rng: np.random.Generator = np.random.default_rng(11)
    for _ in range(3):
        phases: np.ndarray = np.exp(1j * rng.uniform(0, 2 * np.pi, (2, 2)))
        element: np.ndarray = symmetry_element(reduced.spec, haar_unitary(2, rng), np.diag(phases[0]),
            np.diag(phases[1]))
        assert np.max(np.abs(element @ comb.matrix @ element.conj().T - comb.matrix)) < 1e-8
    twirled: CombChoi = symmetrize(comb, Observable.named('Z'), 10, rng)
    assert np.max(np.abs(twirled.matrix - comb.matrix)) < 1e-8

@pytest.mark.parametrize('seed', [21, 22])
def test_twirl_does_not_raise_the_objective(problem, seed):
    comb: CombChoi = random_comb(problem.spec, np.random.default_rng(seed))
    twirled: CombChoi = _symmetric_comb(problem, seed)
    assert objective_estimate(twirled, PAULI_Z, 2000, 3) <= objective_estimate(comb, PAULI_Z, 2000, 3) + 0.03

@pytest.mark.slow
@pytest.mark.parametrize('architecture,t', sorted(TABLE))
def test_reduced_optimum(architecture, t):
    reduced: ReducedProblem = assemble_reduced(PAULI_Z, t, architecture, samples = 2000, seed = 42)
    result: SolveResult = solve(reduced_to_conic(reduced))
    if TABLE[(architecture, t)] == 0.0:
        assert result.objective <= 1e-3
    else:
        assert result.objective == pytest.approx(TABLE[(architecture, t)], abs = 0.02)
    comb: CombChoi = reconstruct_choi(blocks_from_result(reduced, result), reduced.tensor, reduced.choice,
        architecture)
    assert validate_comb(comb, tol = 1e-4).valid

@pytest.mark.slow
@pytest.mark.parametrize('architecture,t,samples', [
    ('sequential', 1, 2000), ('parallel', 1, 2000), ('sequential', 2, 200), ('parallel', 2, 200)
])
def test_full_matches_reduced(architecture, t, samples):
    reduced: SolveResult = solve(reduced_to_conic(assemble_reduced(PAULI_Z, t, architecture, samples, 42)))
    full_problem: ConicProblem = assemble_full(PAULI_Z, t, architecture, samples, 42)
    full: SolveResult = solve(full_problem)
    assert full.objective == pytest.approx(reduced.objective, abs = 5e-3)
    comb: CombChoi = choi_from_result(CombSpec(2, t, architecture), full)
    assert validate_comb(comb, tol = 1e-4).valid
