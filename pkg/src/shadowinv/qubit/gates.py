"""A script containing the gates of the 3-query qubit shadow inversion circuit.

The circuit acts on four qubits: three ancillas (qubit 1 on top, then the
two-qubit register `|j>` on qubits 2 and 3) and the data qubit 4, ordered
as `q1 ⊗ q2 ⊗ q3 ⊗ q4`. `V0` and `V3` act on qubits 2 to 4, `V1` and `V2`
on all four. `V1` and `G` are only fixed on a subspace; the rest of each
is a Gram-Schmidt completion.
"""

from typing import Dict, List, Literal, TypeAlias
import numpy as np
from scipy.linalg import block_diag
from shadowinv.tensor import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, kron, is_unitary

Completion: TypeAlias = Literal['canonical', 'reversed']
"""The order in which the canonical basis seeds the completion of a partial isometry."""

COMPLETIONS: List[str] = ['canonical', 'reversed']
"""The supported completions."""

PAULI_SEQUENCE: List[np.ndarray] = [PAULI_I, PAULI_X, PAULI_Y, PAULI_Z]
"""`P_0, ..., P_3 = I, X, Y, Z`."""

HADAMARD: np.ndarray = np.array([[1, 1], [1, -1]], dtype = complex) / np.sqrt(2)
"""The Hadamard gate."""

_GS_TOL: float = 1e-10
"""The norm below which a Gram-Schmidt candidate is dropped."""

class GateError(Exception):
    """Raised when a gate cannot be completed to a unitary."""

def _ket(index: int, dim: int) -> np.ndarray:
    vec: np.ndarray = np.zeros(dim, dtype = complex)
    vec[index] = 1
    return vec

def pair_vectors() -> Dict[tuple, np.ndarray]:
    """Returns the three-qubit vectors `|v_jk>` for `j != k`, with `|v_kj> = -|v_jk>`."""
    root: float = np.sqrt(3) / 2
    upper: Dict[tuple, np.ndarray] = {
        (0, 1): _ket(0b000, 8),
        (0, 2): _ket(0b001, 8),
        (0, 3): _ket(0b010, 8),
        (1, 2): root * _ket(0b110, 8) + 0.5j * _ket(0b010, 8),
        (1, 3): root * _ket(0b101, 8) - 0.5j * _ket(0b001, 8),
        (2, 3): root * _ket(0b100, 8) + 0.5j * _ket(0b000, 8)
    }
    vectors: Dict[tuple, np.ndarray] = dict(upper)
    for (j, k), vec in upper.items():
        vectors[(k, j)] = -vec
    return vectors

def controlled_paulis(order: List[int], left: np.ndarray | None = None) -> np.ndarray:
    """Returns `sum_j |j><j| ⊗ L P_{order[j]}` on the `|j>` register and the data qubit."""
    left = PAULI_I if left is None else left
    return block_diag(*[left @ PAULI_SEQUENCE[idx] for idx in order])

def _gram_schmidt(basis: List[np.ndarray], dim: int, completion: Completion) -> List[np.ndarray]:
    """Extends an orthonormal list to a basis of `C^dim` from the canonical basis."""
    out: List[np.ndarray] = list(basis)
    seeds: range = range(dim) if completion == 'canonical' else range(dim - 1, -1, -1)
    for idx in seeds:
        if len(out) == dim:
            break
        vec: np.ndarray = _ket(idx, dim)
        for prev in out:
            vec = vec - (prev.conj() @ vec) * prev
        if (norm := np.linalg.norm(vec)) > _GS_TOL:
            out.append(vec / norm)
    if len(out) != dim:
        raise GateError(f'Completion produced {len(out)} of {dim} basis vectors.')
    return out

def extend_to_unitary(preimages: np.ndarray, images: np.ndarray,
        completion: Completion = 'canonical') -> np.ndarray:
    """Completes the partial isometry mapping each preimage column to the matching
    image column into a unitary.

    Parameters
    ----------
    preimages : numpy.ndarray
        The orthonormal defining inputs, one per column.
    images : numpy.ndarray
        The orthonormal defining outputs, one per column.
    completion : 'canonical' | 'reversed' (default 'canonical')
        The order of the canonical basis vectors seeding both completions.

    Returns
    -------
    numpy.ndarray
        The unitary, which maps the complement of the preimages onto the
        complement of the images in completion order.

    Raises
    ------
    GateError
        If either set of columns is not orthonormal.
    """
    dim, count = preimages.shape
    for name, cols in (('preimages', preimages), ('images', images)):
        if np.max(np.abs(cols.conj().T @ cols - np.eye(count))) > _GS_TOL * 100:
            raise GateError(f'The defining {name} are not orthonormal.')
    pre: np.ndarray = np.stack(_gram_schmidt(list(preimages.T), dim, completion), axis = 1)
    img: np.ndarray = np.stack(_gram_schmidt(list(images.T), dim, completion), axis = 1)
    return img @ pre.conj().T

class CircuitGates:
    """The gates `V0`, `V1`, `V2`, `V3`, and the base change `G` inside `V2`."""

    def __init__(self, v0: np.ndarray, v1: np.ndarray, v2: np.ndarray, v3: np.ndarray,
            g: np.ndarray, completion: Completion) -> None:
        self.v0: np.ndarray = v0
        self.v1: np.ndarray = v1
        self.v2: np.ndarray = v2
        self.v3: np.ndarray = v3
        self.g: np.ndarray = g
        self.completion: Completion = completion

    def unitarity_residual(self) -> float:
        """The largest entry of `V^†V - I` over all gates."""
        return max(float(np.max(np.abs(gate.conj().T @ gate - np.eye(gate.shape[0]))))
            for gate in (self.v0, self.v1, self.v2, self.v3, self.g))

def v1_columns() -> np.ndarray:
    """Returns the 8 defining columns of `V1`: `|0,k,b> -> (1/sqrt3) sum_{j != k} |v_jk> ⊗ P_j|b>`."""
    vectors: Dict[tuple, np.ndarray] = pair_vectors()
    columns: List[np.ndarray] = []
    for k in range(4):
        for b in range(2):
            col: np.ndarray = sum(np.kron(vectors[(j, k)], PAULI_SEQUENCE[j] @ _ket(b, 2))
                for j in range(4) if j != k)
            columns.append(col / np.sqrt(3))
    return np.stack(columns, axis = 1)

def g_vectors() -> tuple:
    """Returns the four inputs of `G` and their images, unnormalized."""
    vectors: Dict[tuple, np.ndarray] = pair_vectors()
    inputs: List[np.ndarray] = [
        -vectors[(0, 1)] + 1j * vectors[(2, 3)] - vectors[(0, 2)] - 1j * vectors[(1, 3)]
            - vectors[(0, 3)] + 1j * vectors[(1, 2)],
        vectors[(0, 1)] + 1j * vectors[(2, 3)],
        vectors[(0, 2)] - 1j * vectors[(1, 3)],
        vectors[(0, 3)] + 1j * vectors[(1, 2)]
    ]
    signs: List[List[int]] = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]
    scales: List[float] = [1.5, 0.5, 0.5, 0.5]
    outputs: List[np.ndarray] = [np.kron(_ket(0, 2), scale * np.asarray(sign, dtype = complex))
        for sign, scale in zip(signs, scales)]
    return inputs, outputs

def build_gates(completion: Completion = 'canonical') -> CircuitGates:
    """Builds the four gates of the circuit.

    Parameters
    ----------
    completion : 'canonical' | 'reversed' (default 'canonical')
        How `V1` and `G` are completed from their defining subspaces.

    Returns
    -------
    CircuitGates
        The gates.

    Raises
    ------
    GateError
        If a completion fails or a gate is not unitary.
    """
    if completion not in COMPLETIONS:
        raise GateError(f'Unknown completion \'{completion}\'; expected one of {COMPLETIONS}.')
    hadamards: np.ndarray = kron(HADAMARD, HADAMARD, PAULI_I)

    v0: np.ndarray = controlled_paulis([0, 1, 2, 3]) @ hadamards

    v1: np.ndarray = extend_to_unitary(np.eye(16, dtype = complex)[:, :8], v1_columns(),
        completion)

    inputs, outputs = g_vectors()
    norms: List[float] = [float(np.linalg.norm(vec)) for vec in inputs]
    g: np.ndarray = extend_to_unitary(
        np.stack([vec / norm for vec, norm in zip(inputs, norms)], axis = 1),
        np.stack([vec / norm for vec, norm in zip(outputs, norms)], axis = 1),
        completion)
    v2: np.ndarray = np.kron(PAULI_I, controlled_paulis([0, 1, 2, 3], left = PAULI_Z)) \
        @ np.kron(g, PAULI_I) @ np.kron(PAULI_I, controlled_paulis([1, 2, 3, 0]))

    toffoli: np.ndarray = np.eye(8, dtype = complex)
    toffoli[6:, 6:] = PAULI_X
    phases: np.ndarray = block_diag(PAULI_Z, -1j * PAULI_Y, 1j * PAULI_X, -PAULI_I)
    v3: np.ndarray = toffoli @ hadamards @ phases

    gates: CircuitGates = CircuitGates(v0, v1, v2, v3, g, completion)
    for name, gate in (('V0', v0), ('V1', v1), ('V2', v2), ('V3', v3), ('G', g)):
        if not is_unitary(gate, 1e-12):
            raise GateError(f'{name} is not unitary.')
    return gates
