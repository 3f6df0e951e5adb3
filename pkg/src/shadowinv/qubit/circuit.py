"""A script containing the simulation of the 3-query qubit shadow inversion
circuit: the induced channel, the postselected exact inversion, and the
circuit packaged as a sequential comb.
"""

from typing import List, Tuple
import numpy as np
from shadowinv.tensor import (
    IndexedOperator, SubsystemLayout, PAULI_I, choi_operator, is_unitary, kraus_to_choi,
    link_product
)
from shadowinv.comb.model import CombChoi, CombSpec, input_label, output_label
from shadowinv.qubit.gates import CircuitGates, GateError, build_gates

ANCILLA_DIM: int = 8
"""The dimension of the three ancilla qubits."""

def _check_unitary(unitary: np.ndarray) -> np.ndarray:
    unitary = np.asarray(unitary, dtype = complex)
    if unitary.shape != (2, 2) or not is_unitary(unitary, 1e-8):
        raise GateError(f'The queried operator must be a qubit unitary, found shape {unitary.shape}.')
    return unitary

def circuit_stages(unitary: np.ndarray, gates: CircuitGates | None = None) -> List[np.ndarray]:
    """Returns the isometry from the data qubit into all four qubits after each
    stage of the circuit, in order: after the first query, the second query,
    the third query, and `V3`.

    Parameters
    ----------
    unitary : numpy.ndarray
        The queried qubit unitary.
    gates : CircuitGates | None (default `None`)
        The gates, or the canonical completion when `None`.

    Returns
    -------
    list[numpy.ndarray]
        Four 16 by 2 isometries.
    """
    unitary = _check_unitary(unitary)
    gates = build_gates() if gates is None else gates
    query: np.ndarray = np.kron(np.eye(ANCILLA_DIM), unitary)
    # Ancillas start in |000>, so the data qubit enters the first two rows
    state: np.ndarray = np.eye(16, dtype = complex)[:, :2]
    stages: List[np.ndarray] = []
    state = query @ np.kron(PAULI_I, gates.v0) @ state
    stages.append(state)
    state = query @ gates.v1 @ state
    stages.append(state)
    state = query @ gates.v2 @ state
    stages.append(state)
    state = np.kron(PAULI_I, gates.v3) @ state
    stages.append(state)
    return stages

def circuit_kraus(unitary: np.ndarray, gates: CircuitGates | None = None) -> List[np.ndarray]:
    """Returns the Kraus operators of the induced channel, one per ancilla basis state."""
    final: np.ndarray = circuit_stages(unitary, gates)[-1]
    return [final[2 * anc:2 * anc + 2, :] for anc in range(ANCILLA_DIM)]

def simulate_shadow_channel(unitary: np.ndarray, gates: CircuitGates | None = None) -> np.ndarray:
    """Returns the Choi operator (ordered input, output) of the channel obtained
    by querying the unitary three times and tracing out the ancillas.

    Parameters
    ----------
    unitary : numpy.ndarray
        The queried qubit unitary.
    gates : CircuitGates | None (default `None`)
        The gates, or the canonical completion when `None`.

    Returns
    -------
    numpy.ndarray
        The 4 by 4 Choi operator.
    """
    return kraus_to_choi(circuit_kraus(unitary, gates))

def postselected_inversion(unitary: np.ndarray,
        gates: CircuitGates | None = None) -> Tuple[float, np.ndarray]:
    """Postselects the `|j>` register (qubits 2 and 3) on `|00>`.

    Parameters
    ----------
    unitary : numpy.ndarray
        The queried qubit unitary.
    gates : CircuitGates | None (default `None`)
        The gates, or the canonical completion when `None`.

    Returns
    -------
    (float, numpy.ndarray)
        The outcome probability, which is independent of the input state,
        and the Choi operator of the conditional channel.
    """
    kraus: List[np.ndarray] = circuit_kraus(unitary, gates)
    # Ancilla index 4 q1 + 2 q2 + q3 with q2 = q3 = 0
    selected: List[np.ndarray] = [kraus[0], kraus[4]]
    effect: np.ndarray = sum(op.conj().T @ op for op in selected)
    probability: float = float(np.real(np.trace(effect)) / 2)
    return probability, kraus_to_choi(selected) / probability

def first_ancilla_population(unitary: np.ndarray, state: np.ndarray,
        gates: CircuitGates | None = None) -> float:
    """Returns the probability that qubit 1 is in `|0>` after the third query."""
    after: np.ndarray = circuit_stages(unitary, gates)[2] @ np.asarray(state, dtype = complex)
    return float(np.linalg.norm(after[:8]) ** 2 / np.linalg.norm(after) ** 2)

def circuit_comb(gates: CircuitGates | None = None) -> CombChoi:
    """Packages the circuit as a sequential comb with three slots, linking the
    Choi operators of `V0`, `V1`, `V2` and `V3` through the ancilla memory.

    Returns
    -------
    CombChoi
        The comb on `(P, I1, O1, I2, O2, I3, O3, F)`.
    """
    gates = build_gates() if gates is None else gates
    spec: CombSpec = CombSpec(2, 3, 'sequential')

    def _choi(matrix: np.ndarray, inputs: List[Tuple[str, int]],
            outputs: List[Tuple[str, int]]) -> IndexedOperator:
        return IndexedOperator(choi_operator(matrix), SubsystemLayout(
            [name for name, _ in inputs + outputs], [dim for _, dim in inputs + outputs]))

    encoder: IndexedOperator = _choi(np.kron(PAULI_I, gates.v0)[:, :2], [('P', 2)],
        [('A0', ANCILLA_DIM), (input_label(1), 2)])
    first: IndexedOperator = _choi(gates.v1, [('A0', ANCILLA_DIM), (output_label(1), 2)],
        [('A1', ANCILLA_DIM), (input_label(2), 2)])
    second: IndexedOperator = _choi(gates.v2, [('A1', ANCILLA_DIM), (output_label(2), 2)],
        [('A2', ANCILLA_DIM), (input_label(3), 2)])
    decoder: IndexedOperator = _choi(np.kron(PAULI_I, gates.v3),
        [('A2', ANCILLA_DIM), (output_label(3), 2)], [('E', ANCILLA_DIM), ('F', 2)]) \
        .partial_trace(['E'])

    linked: IndexedOperator = link_product(link_product(link_product(encoder, first), second),
        decoder)
    return CombChoi(spec, linked.reorder(spec.labels).matrix)
