"""A script containing the subsystem permutations between the causal layout
of a comb and the grouped layout `(P, O_1..O_t, I_1..I_t, F)` of the
combined Schur basis.
"""

from typing import Dict, List, Sequence, Tuple
import numpy as np
from shadowinv.tensor import inverse_permutation, permutation_operator
from shadowinv.comb.model import Architecture, CombError, CombSpec, input_label, output_label

def grouped_labels(t: int) -> List[str]:
    """Returns the subsystem labels of the grouped layout."""
    return ['P'] + [output_label(k) for k in range(1, t + 1)] \
        + [input_label(k) for k in range(1, t + 1)] + ['F']

def _label_permutation(spec: CombSpec) -> Tuple[int, ...]:
    grouped: List[str] = grouped_labels(spec.t)
    return tuple(grouped.index(label) for label in spec.labels)

class PermutationChoice:
    """The grouped position of every causal position, for both architectures.

    `pi[k]` is the position in the grouped layout of the `k`-th subsystem of the
    sequential layout; `sigma[k]` likewise for the parallel layout.
    """

    def __init__(self, t: int, pi: Sequence[int], sigma: Sequence[int]) -> None:
        """
        Parameters
        ----------
        t : int
            The number of slots.
        pi : Sequence[int]
            The sequential permutation, zero-based.
        sigma : Sequence[int]
            The parallel permutation, zero-based.

        Raises
        ------
        CombError
            If a permutation does not send each subsystem to a grouped
            position of the same kind.
        """
        self.t: int = t
        self.pi: Tuple[int, ...] = tuple(int(val) for val in pi)
        self.sigma: Tuple[int, ...] = tuple(int(val) for val in sigma)
        kinds: List[str] = [label[0] for label in grouped_labels(t)]
        for name, perm, architecture in (('pi', self.pi, 'sequential'), ('sigma', self.sigma, 'parallel')):
            labels: List[str] = CombSpec(2, t, architecture).labels
            if sorted(perm) != list(range(2 * t + 2)) \
                    or any(kinds[perm[k]] != label[0] for k, label in enumerate(labels)):
                raise CombError(f'{name} = {perm} does not map {labels} onto the grouped layout.')

    def order(self, architecture: Architecture) -> Tuple[int, ...]:
        """Returns the permutation of the given architecture."""
        return self.pi if architecture == 'sequential' else self.sigma

    def operator(self, d: int, architecture: Architecture) -> np.ndarray:
        """Returns the permutation matrix taking grouped vectors to the causal layout."""
        return permutation_operator(self.order(architecture), [d] * (2 * self.t + 2))

    def inverse(self, architecture: Architecture) -> Tuple[int, ...]:
        """Returns the causal position of every grouped position."""
        return inverse_permutation(self.order(architecture))

    def to_dict(self) -> Dict[str, List[int]]:
        return {'t': self.t, 'pi': list(self.pi), 'sigma': list(self.sigma)}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PermutationChoice) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f'PermutationChoice(t={self.t}, pi={self.pi}, sigma={self.sigma})'

def default_permutations(t: int) -> PermutationChoice:
    """Returns the permutations sending `I_j` to grouped position `t + j` and
    `O_j` to position `j`, with `P` and `F` fixed.

    Parameters
    ----------
    t : int
        The number of slots.

    Returns
    -------
    PermutationChoice
        For `t = 1` both permutations are `(0, 2, 1, 3)`.
    """
    if t < 1:
        raise CombError(f'The number of slots must be at least 1, found {t}.')
    return PermutationChoice(t, _label_permutation(CombSpec(2, t, 'sequential')),
        _label_permutation(CombSpec(2, t, 'parallel')))
