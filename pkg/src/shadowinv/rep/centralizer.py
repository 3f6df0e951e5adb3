"""A script containing the centralizer of an observable, and the combined
Schur basis of `U^{⊗(t+1)} ⊗ V^{⊗t} ⊗ W` with `U` unitary and `V`, `W`
in the centralizer of the observable.

The combined basis acts on subsystems grouped as
`(P, O_1, ..., O_t | I_1, ..., I_t | F)`.
"""

from functools import cached_property
from itertools import permutations
from typing import Dict, List, Sequence, Tuple
import numpy as np
from shadowinv.log import Logger, SILENT
from shadowinv.rep.partition import Partition, partitions, compositions, multinomial
from shadowinv.rep.schur import SchurBasis, Label, schur_basis_unitary_group, tensor_product_basis
from shadowinv.tensor import reorder_vector, haar_unitary, inverse_permutation

_MERGE_TOL: float = 1e-8
"""The relative tolerance under which eigenvalues are merged into one eigenspace."""

class SpectrumError(ValueError):
    """Raised when an observable or spectrum is invalid."""

class CentralizerDecomposition:
    """The eigenspace decomposition of a Hermitian observable, which identifies its
    centralizer with a product of unitary groups over the eigenspaces."""

    def __init__(self, eigenvalues: Sequence[float], multiplicities: Sequence[int],
            eigenvectors: np.ndarray) -> None:
        """
        Parameters
        ----------
        eigenvalues : Sequence[float]
            The distinct eigenvalues, in descending order.
        multiplicities : Sequence[int]
            The dimension of each eigenspace.
        eigenvectors : numpy.ndarray
            The unitary whose columns span the eigenspaces in order.
        """
        self.eigenvalues: Tuple[float, ...] = tuple(float(val) for val in eigenvalues)
        self.multiplicities: Tuple[int, ...] = tuple(int(mult) for mult in multiplicities)
        self.eigenvectors: np.ndarray = eigenvectors

    @property
    def dim(self) -> int:
        """The dimension of the space the observable acts on."""
        return sum(self.multiplicities)

    @property
    def num_eigenspaces(self) -> int:
        """The number of distinct eigenvalues."""
        return len(self.multiplicities)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        """The first column of each eigenspace in the eigenvector matrix."""
        return tuple(int(val) for val in np.concatenate([[0], np.cumsum(self.multiplicities)[:-1]]))

    def embedding(self, eigenspace: int) -> np.ndarray:
        """Returns the isometry from an eigenspace into the full space."""
        start: int = self.offsets[eigenspace]
        return self.eigenvectors[:, start:start + self.multiplicities[eigenspace]]

def centralizer_decomposition(observable: np.ndarray) -> CentralizerDecomposition:
    """Decomposes a Hermitian observable into its eigenspaces.

    Diagonal observables keep computational basis vectors as eigenvectors,
    sorted by descending eigenvalue; otherwise the eigenvectors come from
    `numpy.linalg.eigh`. Eigenvalues closer than `1e-8` (relative) are merged.

    Parameters
    ----------
    observable : numpy.ndarray
        A Hermitian matrix.

    Returns
    -------
    CentralizerDecomposition
        The eigenspace decomposition.

    Raises
    ------
    SpectrumError
        If the observable is not square or not Hermitian.
    """
    observable = np.asarray(observable, dtype = complex)
    if observable.ndim != 2 or observable.shape[0] != observable.shape[1]:
        raise SpectrumError(f'Observable of shape {observable.shape} is not square.')
    scale: float = max(1.0, float(np.max(np.abs(observable))))
    if np.max(np.abs(observable - observable.conj().T)) > _MERGE_TOL * scale:
        raise SpectrumError('Observable is not Hermitian.')

    if np.count_nonzero(observable - np.diag(np.diagonal(observable))) == 0:
        diag: np.ndarray = np.diagonal(observable).real
        order: np.ndarray = np.argsort(-diag, kind = 'stable')
        values: np.ndarray = diag[order]
        vectors: np.ndarray = np.eye(len(diag), dtype = complex)[:, order]
    else:
        values, vectors = np.linalg.eigh(observable)
        values, vectors = values[::-1], vectors[:, ::-1]

    # Merge close eigenvalues into eigenspaces
    distinct: List[float] = []
    mults: List[int] = []
    for value in values:
        if distinct and abs(distinct[-1] - value) <= _MERGE_TOL * scale:
            mults[-1] += 1
        else:
            distinct.append(float(value))
            mults.append(1)
    return CentralizerDecomposition(distinct, mults, vectors)

def decomposition_from_spectrum(multiplicities: Sequence[int]) -> CentralizerDecomposition:
    """Returns a decomposition with the given eigenspace dimensions, using
    computational basis eigenvectors and eigenvalues `m-1, ..., 0`.

    Raises
    ------
    SpectrumError
        If a multiplicity is not positive.
    """
    if not multiplicities or any(mult < 1 for mult in multiplicities):
        raise SpectrumError(f'Spectrum multiplicities must be positive: {list(multiplicities)}')
    count: int = len(multiplicities)
    return CentralizerDecomposition(list(range(count - 1, -1, -1)), multiplicities,
        np.eye(sum(multiplicities), dtype = complex))

def sample_centralizer(decomp: CentralizerDecomposition, rng: np.random.Generator) -> np.ndarray:
    """Samples a Haar-random element `E (⊕_r U_r) E^†` of the centralizer."""
    block: np.ndarray = np.zeros((decomp.dim, decomp.dim), dtype = complex)
    for start, mult in zip(decomp.offsets, decomp.multiplicities):
        block[start:start + mult, start:start + mult] = haar_unitary(mult, rng)
    return decomp.eigenvectors @ block @ decomp.eigenvectors.conj().T

def _arrangements(counts: Sequence[int]) -> List[Tuple[int, ...]]:
    """Returns the distinct sequences with `counts[r]` copies of `r`, in lexicographic order."""
    base: List[int] = [r for r, count in enumerate(counts) for _ in range(count)]
    return sorted(set(permutations(base)))

def centralizer_power_basis(decomp: CentralizerDecomposition, t: int,
        logger: Logger = SILENT) -> SchurBasis:
    """Builds the Schur basis of `V^{⊗t}` for `V` in the centralizer of the observable.

    Each block is labeled by a tuple of partitions, one per eigenspace, whose
    sizes form a composition of `t`. A copy is determined by an arrangement of
    the eigenspaces over the tensor positions together with a copy of each
    eigenspace's unitary group irrep.

    Parameters
    ----------
    decomp : CentralizerDecomposition
        The eigenspace decomposition of the observable.
    t : int
        The number of tensor factors.
    logger : Logger (default `SILENT`)
        A logger for reporting on information.

    Returns
    -------
    SchurBasis
        The orthonormal basis of `(C^d)^{⊗t}`.
    """
    dim: int = decomp.dim
    spaces: int = decomp.num_eigenspaces
    factor_bases: Dict[Tuple[int, int], SchurBasis] = {}

    def _factor(eigenspace: int, size: int) -> SchurBasis:
        if (eigenspace, size) not in factor_bases:
            factor_bases[(eigenspace, size)] = schur_basis_unitary_group(
                decomp.multiplicities[eigenspace], size)
        return factor_bases[(eigenspace, size)]

    columns: List[np.ndarray] = []
    labels: List[Label] = []
    block_table: Dict[Label, Tuple[int, int]] = {}
    block_columns: Dict[Label, np.ndarray] = {}

    for counts in compositions(t, spaces):
        arrangements: List[Tuple[int, ...]] = _arrangements(counts)
        shape_choices: List[List[Partition]] = [
            partitions(count, decomp.multiplicities[r]) if count > 0 else [()]
            for r, count in enumerate(counts)
        ]

        def _shapes(r: int) -> List[Tuple[Partition, ...]]:
            if r == spaces:
                return [()]
            return [(shape,) + rest for shape in shape_choices[r] for rest in _shapes(r + 1)]

        for shapes in _shapes(0):
            # Canonical copies: eigenspace r occupies a contiguous run of counts[r] positions
            canonical: np.ndarray = np.ones((1, 1, 1), dtype = complex)
            for r, (count, shape) in enumerate(zip(counts, shapes)):
                if count == 0:
                    continue
                basis: SchurBasis = _factor(r, count)
                cols: np.ndarray = basis.block_columns(shape)
                embed: np.ndarray = np.ones((1, 1), dtype = complex)
                for _ in range(count):
                    embed = np.kron(embed, decomp.embedding(r))
                vectors: np.ndarray = (embed @ basis.matrix)[:, cols]
                canonical = np.einsum('vab,wcd->vwacbd', canonical, vectors).reshape(
                    canonical.shape[0] * vectors.shape[0],
                    canonical.shape[1] * vectors.shape[1],
                    canonical.shape[2] * vectors.shape[2])

            irrep_dim, local_mult = canonical.shape[1], canonical.shape[2]
            block: List[np.ndarray] = []
            for arrangement in arrangements:
                # Position k of the arrangement reads from the canonical slot holding it
                order: List[int] = sorted(range(t), key = lambda k: (arrangement[k], k))
                perm: Tuple[int, ...] = inverse_permutation(order)
                moved: np.ndarray = reorder_vector(
                    canonical.reshape(dim ** t, irrep_dim * local_mult), [dim] * t, perm)
                block.append(moved.reshape(dim ** t, irrep_dim, local_mult))
            # Copies run over arrangements (outer) then local copies (inner)
            stacked: np.ndarray = np.stack(block, axis = 2).reshape(
                dim ** t, irrep_dim, len(arrangements) * local_mult)
            mult: int = stacked.shape[2]

            offset: int = sum(col.shape[1] for col in columns)
            columns.append(stacked.transpose(0, 2, 1).reshape(dim ** t, mult * irrep_dim))
            labels.append(shapes)
            block_table[shapes] = (irrep_dim, mult)
            block_columns[shapes] = offset + np.arange(mult)[None, :] * irrep_dim \
                + np.arange(irrep_dim)[:, None]
            logger.debug(f'Centralizer^{t} block {shapes}: dim {irrep_dim}, mult {mult}')

    matrix: np.ndarray = np.concatenate(columns, axis = 1)
    return SchurBasis(matrix, labels, block_table, block_columns)

def eigenspace_basis(decomp: CentralizerDecomposition) -> SchurBasis:
    """Builds the Schur basis of `W` in the centralizer: one block per eigenspace."""
    block_table: Dict[Label, Tuple[int, int]] = {}
    block_columns: Dict[Label, np.ndarray] = {}
    for r, (start, mult) in enumerate(zip(decomp.offsets, decomp.multiplicities)):
        block_table[r] = (mult, 1)
        block_columns[r] = (start + np.arange(mult))[:, None]
    return SchurBasis(decomp.eigenvectors, list(range(decomp.num_eigenspaces)),
        block_table, block_columns)

def combined_schur_basis(observable: np.ndarray | CentralizerDecomposition, t: int,
        logger: Logger = SILENT) -> SchurBasis:
    """Builds the Schur basis of `U^{⊗(t+1)} ⊗ V^{⊗t} ⊗ W` on the grouped
    subsystems `(P, O_1..O_t | I_1..I_t | F)`, with `U` unitary and `V`, `W` in
    the centralizer of the observable.

    Blocks are labeled `(lambda, (mu_1, ..., mu_m), r)` for the unitary group
    partition, the per-eigenspace partitions, and the output eigenspace.

    Parameters
    ----------
    observable : numpy.ndarray | CentralizerDecomposition
        The observable, or its eigenspace decomposition.
    t : int
        The number of queries.
    logger : Logger (default `SILENT`)
        A logger for reporting on information.

    Returns
    -------
    SchurBasis
        The combined basis of side `d^(2t+2)`.

    Raises
    ------
    ValueError
        If `t < 1`.
    """
    if t < 1:
        raise ValueError(f'The number of queries must be at least 1, found {t}.')
    decomp: CentralizerDecomposition = observable \
        if isinstance(observable, CentralizerDecomposition) \
        else centralizer_decomposition(observable)
    logger.debug(f'Building combined basis for spectrum {decomp.multiplicities}, t = {t}')
    return tensor_product_basis([
        schur_basis_unitary_group(decomp.dim, t + 1, logger = logger),
        centralizer_power_basis(decomp, t, logger = logger),
        eigenspace_basis(decomp)
    ])
