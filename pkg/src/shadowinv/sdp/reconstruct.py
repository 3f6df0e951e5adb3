"""A script containing the block assignments of the reduced program and the
maps between them and the full Choi operator of a comb.
"""

from typing import Any, Dict, Iterator, List, Tuple
import numpy as np
from shadowinv.struct.codec import encode_complex, encode_label
from shadowinv.rep.schur import Label
from shadowinv.comb.model import Architecture, CombChoi, CombError, CombSpec
from shadowinv.solver.problem import SolveResult
from shadowinv.sdp.permutation import PermutationChoice
from shadowinv.sdp.coefficients import CoefficientTensor
from shadowinv.sdp.reduced import ReducedProblem

class BlockAssignment:
    """A Hermitian matrix `C^(r)` for every irrep block."""

    def __init__(self, blocks: Dict[Label, np.ndarray]) -> None:
        self.blocks: Dict[Label, np.ndarray] = {label: np.asarray(mat, dtype = complex)
            for label, mat in blocks.items()}

    @property
    def labels(self) -> List[Label]:
        return list(self.blocks)

    def __getitem__(self, label: Label) -> np.ndarray:
        return self.blocks[label]

    def items(self) -> Iterator[Tuple[Label, np.ndarray]]:
        return iter(self.blocks.items())

    def min_eigenvalue(self) -> float:
        """Returns the smallest eigenvalue over every block."""
        return min(float(np.linalg.eigvalsh((mat + mat.conj().T) / 2)[0]) for mat in self.blocks.values())

    def weighted_trace(self, tensor: CoefficientTensor) -> float:
        """Returns `sum_r dim(V_r) tr C^(r)`, the trace of the represented comb."""
        return float(sum(tensor.basis.dim(label) * np.trace(mat).real for label, mat in self.blocks.items()))

    def to_dict(self) -> List[Dict[str, Any]]:
        return [{'label': encode_label(label), 'value': encode_complex(mat)} for label, mat in self.blocks.items()]

    def __repr__(self) -> str:
        return f'BlockAssignment({len(self.blocks)} blocks)'

def reconstruct_choi(blocks: BlockAssignment, tensor: CoefficientTensor, choice: PermutationChoice,
        architecture: Architecture = 'sequential') -> CombChoi:
    """Rebuilds the Choi operator `sum_r sum_{alpha,beta} c_{alpha,beta} sum_a
    |v_{r,a,alpha}><v_{r,a,beta}|` in the causal layout.

    Parameters
    ----------
    blocks : BlockAssignment
        The block matrices.
    tensor : CoefficientTensor
        The coefficients of the combined basis.
    choice : PermutationChoice
        The causal to grouped permutations.
    architecture : 'sequential' | 'parallel' (default 'sequential')
        The causal layout to rebuild in.

    Returns
    -------
    CombChoi
        The comb.
    """
    spec: CombSpec = CombSpec(tensor.d, tensor.t, architecture)
    order: Tuple[int, ...] = choice.order(architecture)
    matrix: np.ndarray = np.zeros((spec.total_dim, spec.total_dim), dtype = complex)
    for label, mat in blocks.items():
        if label not in tensor.basis.block_table:
            raise CombError(f'No block {label} in the basis.')
        weights: np.ndarray = tensor.causal_block(label, order)
        matrix += np.einsum('xaA,AB,yaB->xy', weights, mat, weights.conj(), optimize = True)
    return CombChoi(spec, matrix)

def extract_blocks(comb: CombChoi, tensor: CoefficientTensor, choice: PermutationChoice) -> BlockAssignment:
    """Projects a comb onto the symmetric operators, returning the blocks
    `c_{alpha,beta} = (1/dim) sum_a <v_{r,a,alpha}| C |v_{r,a,beta}>`.

    The projection is exact and idempotent: extracting the blocks of a
    reconstructed comb returns the same blocks.
    """
    if (comb.spec.d, comb.spec.t) != (tensor.d, tensor.t):
        raise CombError(f'A comb {comb.spec} does not fit a basis for d = {tensor.d}, t = {tensor.t}.')
    order: Tuple[int, ...] = choice.order(comb.spec.architecture)
    blocks: Dict[Label, np.ndarray] = {}
    for label in tensor.labels:
        weights: np.ndarray = tensor.causal_block(label, order)
        blocks[label] = np.einsum('xaA,xy,yaB->AB', weights.conj(), comb.matrix, weights,
            optimize = True) / weights.shape[1]
    return BlockAssignment(blocks)

def blocks_from_result(problem: ReducedProblem, result: SolveResult) -> BlockAssignment:
    """Reads the block matrices of a solved reduced program."""
    return BlockAssignment({label: result.block_values[block.name]
        for label, block in zip(problem.labels, problem.blocks)})
