import numpy as np
import pytest
from shadowinv.tensor import PAULI_Z, choi_operator, haar_unitary, sample_unitaries
from shadowinv.formats import read_artifact, write_artifact
from shadowinv.comb.model import (
    CombChoi, CombError, CombSpec, Observable, marginal_chain, parallel_labels, parallel_layout,
    sequential_layout
)
from shadowinv.comb.constraints import (
    CombReport, validate_comb, validate_parallel_comb, validate_sequential_comb
)
from shadowinv.comb.generate import (
    bypass_comb, discard_comb, maximally_mixed_comb, random_comb, routing_comb, symmetrize,
    symmetry_element, to_sequential
)
from shadowinv.comb.channel import (
    apply_comb, dual_on_observable, objective_estimate, shadow_residual, shadow_residuals
)
from shadowinv.rep.centralizer import SpectrumError

ARCHS = ['sequential', 'parallel']

def test_comb_spec_layouts():
    assert CombSpec(2, 2).labels == ['P', 'I1', 'O1', 'I2', 'O2', 'F']
    assert CombSpec(2, 2, 'parallel').labels == ['P', 'I1', 'I2', 'O1', 'O2', 'F']
    assert CombSpec(3, 1).total_dim == 81
    assert CombSpec(2, 2).slot_labels == ['I1', 'O1', 'I2', 'O2']
    assert sequential_layout(2, 1).labels == ('P', 'I1', 'O1', 'F')
    assert parallel_layout(3, 2) == CombSpec(3, 2, 'parallel').layout
    assert parallel_layout(3, 2).total_dim == 3 ** 6
    for args in [(1, 1), (2, 0), (2, 1, 'diagonal')]:
        with pytest.raises(CombError):
            CombSpec(*args)

def test_comb_choi_shape_checked():
    with pytest.raises(CombError):
        CombChoi(CombSpec(2, 1), np.eye(8))

def test_observables():
    assert Observable.named('z').spectrum == (1, 1)
    assert Observable.from_diagonal([1, 1, 0]).spectrum == (2, 1)
    assert Observable.from_diagonal([1, 1, 0]).dim == 3
    with pytest.raises(SpectrumError):
        Observable.named('W')
    with pytest.raises(SpectrumError):
        Observable(np.array([[0, 1], [0, 0]]))

def test_marginal_chain_shapes():
    steps = marginal_chain(CombSpec(2, 2))
    assert [step.removed for step in steps] == [('O2',), ('O1',), ('P',)]
    assert steps[0].kept == ('P', 'I1', 'O1', 'I2')
    assert steps[0].traced == ('F',)
    assert steps[1].traced == ('I2', 'O2', 'F')
    parallel = marginal_chain(CombSpec(2, 2, 'parallel'))
    assert [step.removed for step in parallel] == [('O1', 'O2'), ('P',)]
    assert parallel[0].kept == ('P', 'I1', 'I2')

@pytest.mark.parametrize('architecture', ARCHS)
@pytest.mark.parametrize('t', [1, 2])
def test_constructed_combs_are_valid(architecture, t):
    spec: CombSpec = CombSpec(2, t, architecture)
    for comb in [routing_comb(spec), bypass_comb(spec), discard_comb(spec),
            maximally_mixed_comb(spec), random_comb(spec, np.random.default_rng(t))]:
        report: CombReport = validate_comb(comb)
        assert report.valid, report.to_dict()

def test_random_comb_qutrit():
    assert validate_comb(random_comb(CombSpec(3, 1), np.random.default_rng(0), aux_dim = 2)).valid

def test_validate_rejects_wrong_layout():
    comb: CombChoi = bypass_comb(CombSpec(2, 1))
    with pytest.raises(CombError):
        validate_parallel_comb(comb)
    assert validate_sequential_comb(comb).valid

def test_series_wiring_is_not_parallel():
    series: CombChoi = routing_comb(CombSpec(2, 2))
    reordered: CombChoi = CombChoi(CombSpec(2, 2, 'parallel'),
        series.operator.reorder(parallel_labels(2)).matrix)
    report: CombReport = validate_comb(reordered)
    assert not report.valid
    assert report.max_marginal_residual > 1e-3

def test_trace_violation_detected():
    spec: CombSpec = CombSpec(2, 1)
    report: CombReport = validate_comb(CombChoi(spec, 2 * maximally_mixed_comb(spec).matrix))
    assert not report.valid
    assert report.trace_residual == pytest.approx(4.0)

def test_parallel_combs_are_sequential():
    comb: CombChoi = random_comb(CombSpec(2, 2, 'parallel'), np.random.default_rng(3))
    sequential: CombChoi = to_sequential(comb)
    assert sequential.spec.architecture == 'sequential'
    assert validate_comb(sequential).valid
    assert to_sequential(sequential) is sequential

def test_routing_comb_implements_power():
    unitary: np.ndarray = haar_unitary(2, np.random.default_rng(5))
    channel: np.ndarray = apply_comb(routing_comb(CombSpec(2, 2)), unitary)
    assert np.max(np.abs(channel - choi_operator(unitary @ unitary))) < 1e-10
    parallel: np.ndarray = apply_comb(routing_comb(CombSpec(2, 2, 'parallel')), unitary)
    assert np.max(np.abs(parallel - choi_operator(unitary))) < 1e-10

def test_bypass_comb_is_identity():
    unitary: np.ndarray = haar_unitary(2, np.random.default_rng(6))
    for architecture in ARCHS:
        channel: np.ndarray = apply_comb(bypass_comb(CombSpec(2, 2, architecture)), unitary)
        assert np.max(np.abs(channel - choi_operator(np.eye(2)))) < 1e-10

def test_apply_comb_rejects_non_unitary():
    comb: CombChoi = bypass_comb(CombSpec(2, 1))
    with pytest.raises(CombError):
        apply_comb(comb, np.diag([1.0, 0.5]))
    with pytest.raises(CombError):
        apply_comb(comb, np.eye(3))

def test_dual_on_observable_of_unitary_channel():
    unitary: np.ndarray = haar_unitary(2, np.random.default_rng(7))
    dual: np.ndarray = dual_on_observable(choi_operator(unitary), PAULI_Z)
    assert np.max(np.abs(dual - unitary.conj().T @ PAULI_Z @ unitary)) < 1e-12

def test_discard_comb_objective():
    comb: CombChoi = discard_comb(CombSpec(2, 1))
    residuals: np.ndarray = shadow_residuals(comb, Observable.named('Z'), 5, 11)
    assert np.allclose(residuals, np.sqrt(2))
    assert objective_estimate(comb, PAULI_Z, 5, 11) == pytest.approx(np.sqrt(2))
    with pytest.raises(CombError):
        objective_estimate(comb, PAULI_Z, 0, 11)

def test_objective_estimate_is_thread_independent():
    comb: CombChoi = random_comb(CombSpec(2, 1), np.random.default_rng(8))
    single: float = objective_estimate(comb, PAULI_Z, 6, 3, threads = 1)
    assert objective_estimate(comb, PAULI_Z, 6, 3, threads = 3) == pytest.approx(single, abs = 1e-12)

def test_symmetry_element_fixes_maximally_mixed():
    spec: CombSpec = CombSpec(2, 1)
    rng: np.random.Generator = np.random.default_rng(9)
    element: np.ndarray = symmetry_element(spec, haar_unitary(2, rng), np.diag([1, 1j]), np.diag([-1, 1]))
    comb: np.ndarray = maximally_mixed_comb(spec).matrix
    assert np.max(np.abs(element @ comb @ element.conj().T - comb)) < 1e-12

@pytest.mark.parametrize('architecture', ARCHS)
def test_symmetrize_keeps_validity(architecture):
    spec: CombSpec = CombSpec(2, 1, architecture)
    comb: CombChoi = random_comb(spec, np.random.default_rng(10))
    twirled: CombChoi = symmetrize(comb, Observable.named('Z'), 4, np.random.default_rng(11))
    assert validate_comb(twirled).valid
    with pytest.raises(CombError):
        symmetrize(comb, Observable.named('Z'), 0, np.random.default_rng(0))

def test_depolarizing_comb_residual_is_constant():
    # The maximally mixed comb depolarizes completely, so every unitary scores the same
    spec: CombSpec = CombSpec(2, 1)
    comb: CombChoi = maximally_mixed_comb(spec)
    first, second = sample_unitaries(2, 2, 12)
    assert shadow_residual(comb, PAULI_Z, first) == pytest.approx(shadow_residual(comb, PAULI_Z, second))

def test_comb_artifact(tmp_path):
    comb: CombChoi = random_comb(CombSpec(2, 1, 'parallel'), np.random.default_rng(13))
    path: str = str(tmp_path / 'comb.json')
    write_artifact(comb, path)
    loaded: CombChoi = read_artifact(path, expected = 'comb')
    assert loaded.spec == comb.spec
    assert np.max(np.abs(loaded.matrix - comb.matrix)) < 1e-12
