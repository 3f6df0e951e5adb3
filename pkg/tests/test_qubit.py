import numpy as np
import pytest
from shadowinv.tensor import PAULI_Z, choi_operator, is_psd, partial_trace, random_density, \
    sample_unitaries
from shadowinv.comb.model import Observable
from shadowinv.comb.constraints import validate_comb
from shadowinv.comb.channel import apply_comb, shadow_residual
from shadowinv.qubit.gates import COMPLETIONS, CircuitGates, GateError, build_gates
from shadowinv.qubit.circuit import (
    circuit_comb, circuit_kraus, circuit_stages, first_ancilla_population, postselected_inversion,
    simulate_shadow_channel
)
from shadowinv.qubit.fit import (
    StructureFit, apply_choi, fit_structure, fit_trajectory, mixture_channel, pauli_transfer, z_twirl
)

@pytest.fixture(scope = 'module', params = COMPLETIONS)
def gates(request) -> CircuitGates:
    return build_gates(request.param)

def test_gates_are_unitary(gates):
    assert gates.unitarity_residual() < 1e-10
    assert gates.v0.shape == (16, 16)

def test_unknown_completion():
    with pytest.raises(GateError):
        build_gates('random')

def test_stages_are_isometries(gates):
    unitary: np.ndarray = sample_unitaries(2, 1, 0)[0]
    for stage in circuit_stages(unitary, gates):
        assert np.max(np.abs(stage.conj().T @ stage - np.eye(2))) < 1e-10
    assert len(circuit_kraus(unitary, gates)) == 8

def test_rejects_non_unitary_query(gates):
    with pytest.raises(GateError):
        simulate_shadow_channel(np.diag([1.0, 0.0]), gates)

def test_channel_is_trace_preserving(gates):
    for unitary in sample_unitaries(2, 5, 1):
        choi: np.ndarray = simulate_shadow_channel(unitary, gates)
        assert is_psd(choi, 1e-10)
        assert np.max(np.abs(partial_trace(choi, [2, 2], [1]) - np.eye(2))) < 1e-10

def test_shadow_identity(gates):
    rng: np.random.Generator = np.random.default_rng(2)
    for unitary in sample_unitaries(2, 20, 2):
        choi: np.ndarray = simulate_shadow_channel(unitary, gates)
        for _ in range(5):
            rho: np.ndarray = random_density(2, rng)
            expected: float = np.trace(unitary.conj().T @ rho @ unitary @ PAULI_Z).real
            assert abs(np.trace(apply_choi(choi, rho) @ PAULI_Z).real - expected) < 1e-10

def test_structure_fit(gates):
    for unitary in sample_unitaries(2, 10, 3):
        fit: StructureFit = fit_structure(simulate_shadow_channel(unitary, gates), unitary)
        assert fit.valid(), fit.to_dict()

def test_postselection(gates):
    for unitary in sample_unitaries(2, 10, 4):
        probability, conditional = postselected_inversion(unitary, gates)
        assert probability == pytest.approx(1 / 3, abs = 1e-10)
        assert np.max(np.abs(conditional - choi_operator(unitary.conj().T))) < 1e-10

def test_first_ancilla_returns_to_zero(gates):
    rng: np.random.Generator = np.random.default_rng(6)
    for unitary in sample_unitaries(2, 5, 6):
        state: np.ndarray = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        assert first_ancilla_population(unitary, state, gates) == pytest.approx(1.0, abs = 1e-10)

def test_channel_independent_of_completion():
    canonical, reversed_ = (build_gates(name) for name in COMPLETIONS)
    for unitary in sample_unitaries(2, 5, 7):
        assert np.max(np.abs(simulate_shadow_channel(unitary, canonical)
            - simulate_shadow_channel(unitary, reversed_))) < 1e-10

def test_circuit_comb_matches_simulation():
    comb = circuit_comb()
    assert validate_comb(comb).valid
    for unitary in sample_unitaries(2, 5, 5):
        assert np.max(np.abs(apply_comb(comb, unitary) - simulate_shadow_channel(unitary))) < 1e-10
        assert shadow_residual(comb, Observable.named('Z'), unitary) < 1e-9

def test_mixture_channel_fits():
    unitary: np.ndarray = sample_unitaries(2, 1, 6)[0]
    choi: np.ndarray = mixture_channel(unitary)
    fit: StructureFit = fit_structure(choi, unitary)
    assert fit.valid()
    assert fit.p == pytest.approx(0.5, abs = 1e-10)
    assert np.max(np.abs(z_twirl(choi) - choi)) < 1e-12

def test_pauli_transfer_of_identity():
    assert np.max(np.abs(pauli_transfer(choi_operator(np.eye(2))) - np.eye(4))) < 1e-12

def test_unitary_channel_does_not_fit():
    unitary: np.ndarray = sample_unitaries(2, 1, 7)[0]
    assert not fit_structure(choi_operator(unitary), unitary).valid()

def test_fit_trajectory():
    fits = fit_trajectory(4, 8, threads = 2)
    assert len(fits) == 4
    assert all(fit.valid() for fit in fits)
