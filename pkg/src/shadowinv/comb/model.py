"""A script containing the quantum comb model: comb shapes and subsystem
layouts, Choi operators of combs, observables, and the marginal chain
that defines a valid comb.

A sequential comb with `t` slots acts on `(P, I_1, O_1, ..., I_t, O_t, F)`
in causal order; a parallel comb on `(P, I_1, ..., I_t, O_1, ..., O_t, F)`.
The unknown unitary maps `I_k` to `O_k`.
"""

from functools import cached_property
from typing import List, Literal, Sequence, Tuple, TypeAlias
import numpy as np
from shadowinv.tensor import IndexedOperator, SubsystemLayout, PAULIS
from shadowinv.rep.centralizer import (
    CentralizerDecomposition, SpectrumError, centralizer_decomposition
)

Architecture: TypeAlias = Literal['sequential', 'parallel']
"""The causal structure of a comb."""

ARCHITECTURES: Tuple[str, ...] = ('sequential', 'parallel')
"""The supported comb architectures."""

class CombError(ValueError):
    """Raised when a comb, its shape, or its inputs are invalid."""

def input_label(k: int) -> str:
    """Returns the label of the input of slot `k` (1-based)."""
    return f'I{k}'

def output_label(k: int) -> str:
    """Returns the label of the output of slot `k` (1-based)."""
    return f'O{k}'

def sequential_labels(t: int) -> List[str]:
    """Returns the subsystem labels of a sequential comb in causal order."""
    return ['P'] + [label for k in range(1, t + 1)
        for label in (input_label(k), output_label(k))] + ['F']

def parallel_labels(t: int) -> List[str]:
    """Returns the subsystem labels of a parallel comb."""
    return ['P'] + [input_label(k) for k in range(1, t + 1)] \
        + [output_label(k) for k in range(1, t + 1)] + ['F']

def sequential_layout(d: int, t: int) -> SubsystemLayout:
    """Returns the layout of a sequential comb with `t` slots of dimension `d`."""
    return CombSpec(d, t, 'sequential').layout

def parallel_layout(d: int, t: int) -> SubsystemLayout:
    """Returns the layout of a parallel comb with `t` slots of dimension `d`."""
    return CombSpec(d, t, 'parallel').layout

class CombSpec:
    """The shape of a comb: local dimension, number of slots, and architecture."""

    def __init__(self, d: int, t: int, architecture: Architecture = 'sequential') -> None:
        """
        Parameters
        ----------
        d : int
            The dimension of every subsystem.
        t : int
            The number of slots.
        architecture : 'sequential' | 'parallel' (default 'sequential')
            The causal structure of the comb.

        Raises
        ------
        CombError
            If `d < 2`, `t < 1`, or the architecture is unknown.
        """
        if d < 2:
            raise CombError(f'The dimension must be at least 2, found {d}.')
        if t < 1:
            raise CombError(f'The number of slots must be at least 1, found {t}.')
        if architecture not in ARCHITECTURES:
            raise CombError(f'Unknown architecture \'{architecture}\'; '
                + f'expected one of {list(ARCHITECTURES)}.')
        self.d: int = d
        self.t: int = t
        self.architecture: Architecture = architecture

    @property
    def labels(self) -> List[str]:
        """The subsystem labels in layout order."""
        return sequential_labels(self.t) if self.architecture == 'sequential' \
            else parallel_labels(self.t)

    @property
    def layout(self) -> SubsystemLayout:
        """The subsystem layout of the comb's Choi operator."""
        return SubsystemLayout(self.labels, [self.d] * (2 * self.t + 2))

    @property
    def total_dim(self) -> int:
        """The side of the Choi operator, `d^(2t+2)`."""
        return self.d ** (2 * self.t + 2)

    @property
    def slot_labels(self) -> List[str]:
        """The labels between `P` and `F`, in layout order."""
        return self.labels[1:-1]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CombSpec) and (self.d, self.t, self.architecture) \
            == (other.d, other.t, other.architecture)

    def __repr__(self) -> str:
        return f'CombSpec(d={self.d}, t={self.t}, architecture={self.architecture!r})'

class CombChoi:
    """The Choi operator of a comb together with its shape."""

    def __init__(self, spec: CombSpec, matrix: np.ndarray) -> None:
        """
        Parameters
        ----------
        spec : CombSpec
            The shape of the comb.
        matrix : numpy.ndarray
            The Choi operator in the layout order of the spec.
        """
        matrix = np.asarray(matrix, dtype = complex)
        if matrix.shape != (spec.total_dim, spec.total_dim):
            raise CombError(f'Choi operator of shape {matrix.shape} does not match {spec}.')
        self.spec: CombSpec = spec
        self.matrix: np.ndarray = matrix

    @property
    def operator(self) -> IndexedOperator:
        """The Choi operator with its labeled layout."""
        return IndexedOperator(self.matrix, self.spec.layout)

    def __repr__(self) -> str:
        return f'CombChoi({self.spec})'

class Observable:
    """A Hermitian observable measured on the output of the comb."""

    def __init__(self, matrix: np.ndarray, name: str | None = None) -> None:
        """
        Parameters
        ----------
        matrix : numpy.ndarray
            The Hermitian matrix.
        name : str | None (default `None`)
            A display name.

        Raises
        ------
        SpectrumError
            If the matrix is not Hermitian.
        """
        self.matrix: np.ndarray = np.asarray(matrix, dtype = complex)
        self.name: str | None = name
        # Validates hermiticity eagerly
        _ = self.decomposition

    @classmethod
    def named(cls, name: str) -> 'Observable':
        """Returns the qubit Pauli observable with the given name ('I', 'X', 'Y', 'Z')."""
        if (key := name.strip().upper()) not in PAULIS:
            raise SpectrumError(f'Unknown observable \'{name}\'; expected one of {list(PAULIS)}.')
        return Observable(PAULIS[key], name = key)

    @classmethod
    def from_diagonal(cls, values: Sequence[float]) -> 'Observable':
        """Returns the diagonal observable with the given eigenvalues."""
        if len(values) < 2:
            raise SpectrumError(f'A diagonal observable needs at least 2 entries, found {len(values)}.')
        return Observable(np.diag(np.asarray(values, dtype = float)).astype(complex),
            name = 'diag(' + ','.join(f'{val:g}' for val in values) + ')')

    @property
    def dim(self) -> int:
        """The dimension of the space the observable acts on."""
        return self.matrix.shape[0]

    @cached_property
    def decomposition(self) -> CentralizerDecomposition:
        """The eigenspace decomposition of the observable."""
        return centralizer_decomposition(self.matrix)

    @property
    def spectrum(self) -> Tuple[int, ...]:
        """The dimension of each eigenspace, in descending eigenvalue order."""
        return self.decomposition.multiplicities

    def __repr__(self) -> str:
        return f'Observable({self.name or self.matrix.tolist()})'

class MarginalStep:
    """One constraint of the marginal chain: `tr_T C = tr_{X T} C ⊗ I_X / d_X`,
    where `R`, `X`, `T` are contiguous runs of the layout."""

    def __init__(self, kept: Sequence[str], removed: Sequence[str], traced: Sequence[str]) -> None:
        """
        Parameters
        ----------
        kept : Sequence[str]
            The subsystems `R` before `X`.
        removed : Sequence[str]
            The subsystems `X` replaced by a maximally mixed marginal.
        traced : Sequence[str]
            The subsystems `T` after `X`, traced out on both sides.
        """
        self.kept: Tuple[str, ...] = tuple(kept)
        self.removed: Tuple[str, ...] = tuple(removed)
        self.traced: Tuple[str, ...] = tuple(traced)

    @property
    def name(self) -> str:
        """A readable name of the step."""
        traced: str = ','.join(self.traced) if self.traced else '-'
        return f'tr[{traced}] on {",".join(self.removed)}'

    def __repr__(self) -> str:
        return f'MarginalStep(R={list(self.kept)}, X={list(self.removed)}, T={list(self.traced)})'

def marginal_chain(spec: CombSpec) -> List[MarginalStep]:
    """Returns the marginal chain of the comb's constraints, outermost first.

    A sequential comb contributes one step per slot output, from `O_t` down
    to `O_1`, and a final step on `P`; a parallel comb contributes a decoder
    step on all outputs and an encoder step on `P`. Together with the trace
    condition `tr C = d^(t+1)`, these define the valid combs.
    """
    labels: List[str] = spec.labels
    steps: List[MarginalStep] = []
    if spec.architecture == 'sequential':
        for k in range(spec.t, 0, -1):
            pos: int = labels.index(output_label(k))
            steps.append(MarginalStep(labels[:pos], [labels[pos]], labels[pos + 1:]))
    else:
        outputs: List[str] = [output_label(k) for k in range(1, spec.t + 1)]
        steps.append(MarginalStep(labels[:spec.t + 1], outputs, ['F']))
    steps.append(MarginalStep([], ['P'], labels[1:]))
    return steps
