import numpy as np
import pytest
from scipy import sparse
from hypothesis import given
import hypothesis.strategies as st
from shadowinv.tensor import PAULI_Y, is_psd
from shadowinv.solver.problem import (
    ConicProblem, InfeasibleError, ProblemError, SocBlock, SolveResult, SolverSettings, VariableBlock,
    epigraph_formulate, hermitian_functionals, pack_blocks
)
from shadowinv.solver.cones import project_psd, project_soc
from shadowinv.solver.admm import _rebalance, solve
from shadowinv.solver.codec import export_problem, import_problem

TIGHT: SolverSettings = SolverSettings(eps_primal = 1e-9, eps_dual = 1e-9, eps_gap = 1e-9)

def test_settings_validation():
    with pytest.raises(ProblemError):
        SolverSettings(eps_primal = 0)
    with pytest.raises(ProblemError):
        SolverSettings(alpha = 2.0)
    with pytest.raises(ProblemError):
        SolverSettings(threads = 0)
    assert SolverSettings(seed = 7).to_dict()['seed'] == 7

def test_block_validation():
    with pytest.raises(ProblemError):
        VariableBlock('x', 'cone', 2)
    with pytest.raises(ProblemError):
        VariableBlock('x', 'psd', 3, hermitian = True)
    packed = pack_blocks([VariableBlock('a', 'psd', 2), VariableBlock('b', 'free', 3)])
    assert [block.offset for block in packed] == [0, 4]
    assert packed[-1].stop == 7

def test_hermitian_embedding():
    block: VariableBlock = VariableBlock('h', 'psd', 4, hermitian = True)
    value: np.ndarray = np.array([[2.0, 1 - 1j], [1 + 1j, 3.0]])
    x: np.ndarray = block.embed(value)
    assert np.max(np.abs(block.value(x) - value)) < 1e-12
    rows, cols, vals, count = block.structure_rows()
    ties: sparse.csr_matrix = sparse.csr_matrix((vals, (rows, cols)), shape = (count, block.length))
    assert np.max(np.abs(ties @ x)) < 1e-12

@pytest.mark.parametrize('side', [2, 3, 4])
def test_hermitian_ties_leave_one_variable_per_parameter(side):
    rng: np.random.Generator = np.random.default_rng(side)
    block: VariableBlock = VariableBlock('h', 'psd', 2 * side, hermitian = True)
    raw: np.ndarray = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
    rows, cols, vals, count = block.structure_rows()
    ties: np.ndarray = sparse.csr_matrix((vals, (rows, cols)), shape = (count, block.length)).toarray()
    assert np.max(np.abs(ties @ block.embed(raw + raw.conj().T))) < 1e-12
    assert block.length - np.linalg.matrix_rank(ties) == side * side
    # Every tied vector is a symmetric matrix in the embedding
    free: np.ndarray = np.linalg.svd(ties)[2][np.linalg.matrix_rank(ties):]
    for vec in free:
        mat: np.ndarray = vec.reshape(2 * side, 2 * side)
        assert np.max(np.abs(mat - mat.T)) < 1e-10

def test_hermitian_functionals_read_entries():
    block: VariableBlock = VariableBlock('h', 'psd', 4, hermitian = True)
    value: np.ndarray = np.array([[2.0, 1 - 1j], [1 + 1j, 3.0]])
    coeffs: np.ndarray = np.stack([np.eye(2), PAULI_Y.T])
    re_rows, im_rows = hermitian_functionals(block, coeffs, block.length)
    x: np.ndarray = block.embed(value)
    expected: np.ndarray = np.array([np.trace(value), np.trace(PAULI_Y @ value)])
    assert np.max(np.abs(re_rows @ x - expected.real)) < 1e-12
    assert np.max(np.abs(im_rows @ x - expected.imag)) < 1e-12

def test_problem_checks_shapes():
    blocks = [VariableBlock('x', 'free', 2)]
    with pytest.raises(ProblemError):
        ConicProblem(blocks, sparse.csr_matrix((1, 2)), np.zeros(2), np.zeros(2))
    with pytest.raises(ProblemError):
        ConicProblem(blocks, sparse.csr_matrix((0, 2)), np.zeros(0), np.zeros(3))
    with pytest.raises(ProblemError):
        ConicProblem(blocks, sparse.csr_matrix((0, 2)), np.zeros(0), np.zeros(2),
            sparse.csr_matrix(np.eye(2)), np.zeros(2), [SocBlock(5, 0, 2)])

def test_project_psd():
    matrix: np.ndarray = np.diag([1.0, -2.0, 3.0])
    projected: np.ndarray = project_psd(matrix)
    assert np.allclose(projected, np.diag([1.0, 0.0, 3.0]))
    assert np.allclose(project_psd(projected), projected)
    stack: np.ndarray = np.stack([matrix, -matrix])
    assert project_psd(stack).shape == (2, 3, 3)

def test_project_soc_cases():
    assert np.allclose(project_soc(np.array([2.0, 1.0, 0.0])), [2.0, 1.0, 0.0])
    assert np.allclose(project_soc(np.array([-2.0, 1.0, 0.0])), 0.0)
    assert np.allclose(project_soc(np.array([0.0, 2.0, 0.0])), [1.0, 1.0, 0.0])

@given(st.lists(st.floats(min_value = -10, max_value = 10), min_size = 2, max_size = 6))
def test_project_soc_lands_in_cone(values):
    out: np.ndarray = project_soc(np.asarray(values))
    assert np.linalg.norm(out[1:]) <= out[0] + 1e-9
    assert np.allclose(project_soc(out), out, atol = 1e-9)

def test_zero_residual_map():
    blocks = [VariableBlock('x', 'free', 2)]
    problem: ConicProblem = epigraph_formulate(blocks, None, None,
        [(sparse.csr_matrix((3, 2)), np.zeros(3))])
    result: SolveResult = solve(problem, TIGHT)
    assert result.optimal
    assert abs(result.objective) < 1e-8
    assert abs(result.block_values['epigraph'][0]) < 1e-8

def test_unconstrained_norm():
    target: np.ndarray = np.random.default_rng(0).standard_normal(3)
    problem: ConicProblem = epigraph_formulate([VariableBlock('x', 'free', 3)], None, None,
        [(sparse.identity(3, format = 'csr'), target)])
    result: SolveResult = solve(problem, TIGHT)
    assert result.optimal
    assert abs(result.objective) < 1e-7
    assert np.max(np.abs(result.block_values['x'] - target)) < 1e-6

def _trace_problem() -> ConicProblem:
    blocks = [VariableBlock('X', 'psd', 2)]
    # X11 = 1 and X12 = 2; X21 is tied to X12
    a_mat: sparse.csr_matrix = sparse.csr_matrix(([1.0, 1.0], ([0, 1], [0, 1])), shape = (2, 4))
    objective: np.ndarray = np.array([1.0, 0.0, 0.0, 1.0])
    return epigraph_formulate(blocks, a_mat, np.array([1.0, 2.0]), [], objective = objective,
        name = 'trace')

def test_trace_with_schur_complement():
    result: SolveResult = solve(_trace_problem(), TIGHT)
    assert result.optimal
    assert result.objective == pytest.approx(5.0, abs = 1e-6)
    assert result.block_values['X'][1, 1] == pytest.approx(4.0, abs = 1e-6)
    assert abs(result.objective - result.dual_objective) < 1e-5

def test_hermitian_min_eigenvalue():
    block: VariableBlock = pack_blocks([VariableBlock('H', 'psd', 4, hermitian = True)])[0]
    re_rows, _ = hermitian_functionals(block, np.stack([np.eye(2), PAULI_Y.T]), block.length)
    problem: ConicProblem = epigraph_formulate([block], re_rows[:1], np.array([1.0]), [],
        objective = re_rows[1].toarray().ravel())
    result: SolveResult = solve(problem, TIGHT)
    assert result.optimal
    assert result.objective == pytest.approx(-1.0, abs = 1e-6)
    assert is_psd(result.block_values['H'], 1e-6)

def test_inconsistent_equalities():
    blocks = [VariableBlock('x', 'free', 2)]
    problem: ConicProblem = ConicProblem(blocks, sparse.csr_matrix(np.array([[1.0, 1.0], [1.0, 1.0]])),
        np.array([1.0, 2.0]), np.zeros(2))
    with pytest.raises(InfeasibleError):
        solve(problem)
    empty_row: ConicProblem = ConicProblem(blocks, sparse.csr_matrix((1, 2)), np.array([1.0]), np.zeros(2))
    with pytest.raises(InfeasibleError):
        solve(empty_row)

def test_max_iter_returns_best_iterate():
    result: SolveResult = solve(_trace_problem(), SolverSettings(max_iter = 3, check_interval = 1,
        eps_primal = 1e-12, eps_dual = 1e-12, eps_gap = 1e-12))
    assert result.status == 'maxIter'
    assert result.iterations == 3
    assert len(result.merit) == 3

def test_solve_is_deterministic():
    first: SolveResult = solve(_trace_problem(), TIGHT)
    second: SolveResult = solve(_trace_problem(), TIGHT)
    assert first.iterations == second.iterations
    assert np.array_equal(first.x, second.x)

def test_export_and_import(tmp_path):
    problem: ConicProblem = _trace_problem()
    path: str = str(tmp_path / 'trace.json')
    export_problem(problem, path)
    with open(path, mode = 'r', encoding = 'UTF-8') as file:
        first: str = file.read()
    loaded: ConicProblem = import_problem(path)
    assert loaded.blocks == problem.blocks
    assert (loaded.a_mat != problem.a_mat).nnz == 0
    assert np.array_equal(loaded.c_vec, problem.c_vec)
    second: str = str(tmp_path / 'again.json')
    export_problem(_trace_problem(), second)
    with open(second, mode = 'r', encoding = 'UTF-8') as file:
        assert file.read() == first

def test_crosscheck_agrees():
    pytest.importorskip('cvxpy')
    from shadowinv.solver.crosscheck import solve_with_cvxpy
    status, value = solve_with_cvxpy(_trace_problem())
    assert status == 'optimal'
    assert value == pytest.approx(5.0, abs = 1e-3)

def test_step_size_rebalance_keeps_the_dual():
    assert _rebalance(1.0, 2.0, 1.0) == (1.0, 1.0)
    rho, scale = _rebalance(2.0, 100.0, 1.0)
    assert rho == pytest.approx(20.0)
    assert rho * scale == pytest.approx(2.0)
    rho, scale = _rebalance(1.0, 1e-30, 1.0)
    assert rho == pytest.approx(1e-6)
    assert _rebalance(1e5, 1.0, 0.0)[0] == pytest.approx(1e6)
