import os
import numpy as np
import pytest
from click.testing import CliRunner, Result
from shadowinv.cli import ShadowGroup, main
from shadowinv.formats import read_artifact, write_artifact
from shadowinv.comb.model import CombChoi, CombSpec
from shadowinv.comb.generate import maximally_mixed_comb, routing_comb
from shadowinv.record import ResultRecord
from shadowinv.sdp.reduced import ReducedProblem
from shadowinv.tensor import sample_unitaries
from shadowinv.qubit.gates import build_gates
from shadowinv.qubit.circuit import postselected_inversion

def _run(*args: str) -> Result:
    return CliRunner().invoke(main, list(args))

def test_count_prints_variables():
    result: Result = _run('count', '--d', '6', '--t', '3', '--spectrum', '3,3', '--out', 'count.json')
    assert result.exit_code == 0, result.output
    assert 'N = 2304' in result.output
    record: ResultRecord = read_artifact('count.json', expected = 'result')
    assert record.values['variables'] == 2304
    assert record.values['variables'] <= record.values['bound']

def test_count_defaults_to_split_spectrum():
    result: Result = _run('count', '--d', '2', '--t', '2')
    assert result.exit_code == 0, result.output
    assert 'N = 60' in result.output

@pytest.mark.parametrize('args', [
    ('count', '--d', '2', '--spectrum', '2,2'),
    ('count', '--spectrum', 'a,b'),
    ('count', '--t', '0'),
    ('count', '--unknown')
])
def test_invalid_input_exits_one(args):
    assert _run(*args).exit_code == 1

def test_verify_circuit(tmp_path):
    result: Result = _run('verify-circuit', '--trials', '3', '--states', '2', '--out', 'circuit.json')
    assert result.exit_code == 0, result.output
    record: ResultRecord = read_artifact('circuit.json')
    assert all(record.values['checks'].values())
    assert record.values['postselection_probability'] == pytest.approx(1 / 3)
    assert record.values['seeds']['unitaries'] == 42
    samples: list = record.values['samples']
    assert [entry['sample'] for entry in samples] == [0, 1, 2]
    for entry, unitary in zip(samples, sample_unitaries(2, 3, 42)):
        prob, _ = postselected_inversion(unitary, build_gates())
        assert entry['postselection_probability'] == pytest.approx(prob, abs = 1e-12)
        assert entry['postselection_probability'] == pytest.approx(1 / 3, abs = 1e-10)
        assert set(entry['fit']) == {'p', 'r', 'residual'}
    assert record.residuals['postselection_probability'] < 1e-10
    assert _run('verify-circuit', '--trials', '0').exit_code == 1
    assert _run('verify-circuit', '--completion', 'random').exit_code == 1

def test_schur_check():
    assert _run('schur-check', '--d', '2', '--n', '3', '--elements', '3').exit_code == 0
    result: Result = _run('schur-check', '--d', '2', '--t', '1', '--elements', '3', '--out', 'schur.json')
    assert result.exit_code == 0, result.output
    assert read_artifact('schur.json').values['variables'] == 8
    assert _run('schur-check', '--n', '2', '--t', '1').exit_code == 1
    assert _run('schur-check').exit_code == 1

def test_validate_comb_exit_codes():
    write_artifact(routing_comb(CombSpec(2, 2)), 'valid.json')
    assert _run('validate-comb', 'valid.json').exit_code == 0
    spec: CombSpec = CombSpec(2, 1)
    write_artifact(CombChoi(spec, 2 * maximally_mixed_comb(spec).matrix), 'invalid.json')
    assert _run('validate-comb', 'invalid.json').exit_code == 2
    assert _run('validate-comb', 'missing.json').exit_code == 1

def test_solve_rejects_bad_observables():
    assert _run('solve', '--obs', 'W').exit_code == 1
    assert _run('solve', '--d', '3', '--obs', 'Z').exit_code == 1
    assert _run('solve', '--obs', '1,x').exit_code == 1
    assert _run('solve', '--t', '2', '--full', '--size-cap', '63').exit_code == 1

def test_solve_small_program():
    result: Result = _run('-q', 'solve', '--t', '1', '--samples', '20', '--seed', '3', '--out', 'solve.json',
        '--comb-out', 'comb.json')
    assert result.exit_code == 0, result.output
    record: ResultRecord = read_artifact('solve.json')
    assert record.values['status'] == 'optimal'
    assert record.values['variables'] == 8
    assert record.values['evaluation_seed'] == 4
    assert os.path.exists('comb.json')
    assert _run('validate-comb', 'comb.json', '--tol', '1e-4').exit_code == 0

def test_solve_reads_matrix_file():
    with open('obs.json', mode = 'w', encoding = 'UTF-8') as file:
        file.write('{"real": [[1, 0], [0, -1]]}')
    result: Result = _run('-q', 'solve', '--obs', 'obs.json', '--samples', '5', '--out', 'solve.json')
    assert result.exit_code == 0, result.output
    assert read_artifact('solve.json').config['observable'] == 'obs.json'

def test_export_problem():
    assert _run('-q', 'export-problem', '--samples', '3', 'conic.json').exit_code == 0
    assert read_artifact('conic.json', expected = 'conic-problem').blocks[0].hermitian
    assert _run('-q', 'export-problem', '--kind', 'reduced', '--samples', '3', 'reduced.json').exit_code == 0
    problem: ReducedProblem = read_artifact('reduced.json', expected = 'reduced-problem')
    assert problem.num_variables == 8
    assert _run('export-problem', '--kind', 'reduced', '--full', 'bad.json').exit_code == 1

def test_crosscheck_command():
    pytest.importorskip('cvxpy')
    assert _run('-q', 'export-problem', '--samples', '3', 'conic.json').exit_code == 0
    result: Result = _run('-q', 'crosscheck', 'conic.json', '--internal')
    assert result.exit_code == 0, result.output
    assert 'cvxpy: optimal' in result.output

def test_config_commands():
    assert _run('config', 'loc').exit_code == 1
    assert _run('config', 'value', 'sampling.samples').exit_code == 1
    assert _run('config', 'create').exit_code == 0
    assert os.path.exists('.shadowinv.toml')
    assert _run('config', 'loc').exit_code == 0
    assert _run('config', 'value', 'sampling.samples', '100').exit_code == 0
    result: Result = _run('config', 'value', 'sampling.samples')
    assert result.exit_code == 0
    assert 'sampling.samples -> 100' in result.output
    assert _run('config', 'value', 'sampling.bogus').exit_code == 1
    assert 'Skip' in _run('config', 'create').output
    assert 'runtime.size_cap' in _run('config', 'list').output

@pytest.mark.slow
def test_table1_command():
    result: Result = _run('-q', 'table1', '--t-max', '1', '--samples', '2000', '--csv', 'table.csv',
        '--out', 'table.json')
    assert result.exit_code == 0, result.output
    with open('table.csv', encoding = 'UTF-8') as file:
        lines = file.read().splitlines()
    assert lines[0] == 'architecture,t=1,time_t=1,tolerance,zero_confirmed'
    assert lines[1].startswith('sequential,') and lines[1].split(',')[3] == '0.02'
    record: ResultRecord = read_artifact('table.json')
    assert record.values['confirmations'] == {}
    assert record.values['tolerance'] == 0.02
    for architecture in ('sequential', 'parallel'):
        assert abs(record.values['objectives'][architecture][0] - 0.7058) < 0.02
    assert np.all(np.asarray(record.residuals['deviation']['sequential']) < 0.02)

@pytest.mark.slow
def test_table1_confirms_the_zero_cell():
    result: Result = _run('-q', 'table1', '--t-max', '3', '--samples', '200', '--csv', 'table.csv',
        '--out', 'table.json')
    assert result.exit_code == 0, result.output
    record: ResultRecord = read_artifact('table.json')
    confirmation: dict = record.values['confirmations']['sequential/t=3']
    assert confirmation['zero']
    assert confirmation['seed'] == 43
    assert list(record.values['confirmations']) == ['sequential/t=3']
    with open('table.csv', encoding = 'UTF-8') as file:
        rows = [line.split(',') for line in file.read().splitlines()]
    assert rows[0][-1] == 'zero_confirmed'
    assert rows[1][-1] == 'true'
    assert rows[2][-1] == ''

def test_linear_algebra_failures_exit_two():
    group: ShadowGroup = ShadowGroup()

    @group.command()
    def singular() -> None:
        raise np.linalg.LinAlgError('Matrix is singular.')

    @group.command()
    def invalid() -> None:
        raise ValueError('Not a number.')

    assert CliRunner().invoke(group, ['singular']).exit_code == 2
    assert CliRunner().invoke(group, ['invalid']).exit_code == 1

def test_solver_linear_algebra_failure_exits_two(monkeypatch):
    def _fail(*args, **kwargs):
        raise np.linalg.LinAlgError('Eigenvalues did not converge.')
    monkeypatch.setattr('shadowinv.cli.solve', _fail)
    result: Result = _run('solve', '--t', '1', '--samples', '2')
    assert result.exit_code == 2
    assert 'Eigenvalues did not converge.' in result.output
