"""A script containing the Schur basis of a representation: an orthonormal
basis whose columns are grouped into isotypic blocks, each block spanned by
`mult` aligned copies of an irrep of dimension `dim`.

Within a block, column `(a, alpha)` is the `a`-th vector of the
`alpha`-th copy. Copies are aligned, so any operator commuting with the
group acts on a block as `I_dim ⊗ C` for some `mult` by `mult` matrix `C`.
"""

from itertools import permutations
from typing import Any, Dict, Hashable, List, Sequence, Tuple, TypeAlias
import numpy as np
from shadowinv.log import Logger, SILENT
from shadowinv.rep.partition import partitions, count_syt, count_ssyt
from shadowinv.rep.tableau import (
    enumerate_ssyt, row_reading_tableau, apply_symmetrizer
)
from shadowinv.tensor import reorder_vector

Label: TypeAlias = Hashable
"""The label of an isotypic block (a partition, or a tuple of labels)."""

_NORM_TOL: float = 1e-10
"""The norm below which a candidate vector is treated as zero."""

_ALIGN_TOL: float = 1e-8
"""The relative tolerance of the scalar Gram matrix of a new aligned copy."""

class SchurError(Exception):
    """Raised when a Schur basis fails its dimension or multiplicity checks."""

class SchurBasis:
    """An orthonormal basis grouped into isotypic blocks of aligned irrep copies."""

    def __init__(self, matrix: np.ndarray, labels: Sequence[Label],
            block_table: Dict[Label, Tuple[int, int]],
            block_columns: Dict[Label, np.ndarray]) -> None:
        """
        Parameters
        ----------
        matrix : numpy.ndarray
            The square basis matrix, one basis vector per column.
        labels : Sequence[Label]
            The block labels in column order.
        block_table : dict[Label, (int, int)]
            The irrep dimension and multiplicity of each block.
        block_columns : dict[Label, numpy.ndarray]
            For each block, a `dim` by `mult` integer array of column indices.
        """
        self.matrix: np.ndarray = matrix
        self.labels: List[Label] = list(labels)
        self.block_table: Dict[Label, Tuple[int, int]] = block_table
        self._columns: Dict[Label, np.ndarray] = block_columns

    @property
    def dimension(self) -> int:
        """The dimension of the represented space."""
        return self.matrix.shape[0]

    def block_columns(self, label: Label) -> np.ndarray:
        """Returns the `dim` by `mult` array of column indices of a block."""
        return self._columns[label]

    def dim(self, label: Label) -> int:
        """Returns the irrep dimension of a block."""
        return self.block_table[label][0]

    def mult(self, label: Label) -> int:
        """Returns the multiplicity of a block."""
        return self.block_table[label][1]

    def num_variables(self) -> int:
        """Returns the number of complex entries of the block matrices, `sum mult^2`."""
        return sum(mult ** 2 for _, mult in self.block_table.values())

    def column_index(self) -> List[Tuple[Label, int, int]]:
        """Returns `(label, a, alpha)` for every column of the basis, in column order."""
        index: List[Tuple[Label, int, int] | None] = [None] * self.matrix.shape[1]
        for label in self.labels:
            cols: np.ndarray = self._columns[label]
            for a in range(cols.shape[0]):
                for alpha in range(cols.shape[1]):
                    index[cols[a, alpha]] = (label, a, alpha)
        return index

    def unitarity_residual(self) -> float:
        """Returns `max |Q^† Q - I|`."""
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix
            - np.eye(self.matrix.shape[1]))))

    def imag_residual(self) -> float:
        """Returns the largest imaginary part of the basis."""
        return float(np.max(np.abs(np.imag(self.matrix)), initial = 0.0))

    def _same_copy_mask(self) -> np.ndarray:
        """Returns the mask of entries `(i, j)` whose columns belong to the same block
        and the same copy."""
        owner: np.ndarray = np.zeros(self.matrix.shape[1], dtype = np.int64)
        next_id: int = 0
        for label in self.labels:
            cols: np.ndarray = self._columns[label]
            for alpha in range(cols.shape[1]):
                owner[cols[:, alpha]] = next_id
                next_id += 1
        return owner[:, None] == owner[None, :]

    def off_block_residual(self, group_element: np.ndarray) -> float:
        """Returns the largest entry of `Q^† g Q` outside the irrep-copy blocks.

        Parameters
        ----------
        group_element : numpy.ndarray
            The representation of a group element on the space.

        Returns
        -------
        float
            The off-block residual.
        """
        rotated: np.ndarray = self.matrix.conj().T @ group_element @ self.matrix
        return float(np.max(np.abs(np.where(self._same_copy_mask(), 0.0, rotated)),
            initial = 0.0))

    def block_repetition_residual(self, group_element: np.ndarray) -> float:
        """Returns how far the copies of each irrep are from carrying the same matrix
        under `Q^† g Q`, i.e. the alignment of the copies.
        """
        rotated: np.ndarray = self.matrix.conj().T @ group_element @ self.matrix
        residual: float = 0.0
        for label in self.labels:
            cols: np.ndarray = self._columns[label]
            first: np.ndarray = rotated[np.ix_(cols[:, 0], cols[:, 0])]
            for alpha in range(1, cols.shape[1]):
                copy: np.ndarray = rotated[np.ix_(cols[:, alpha], cols[:, alpha])]
                residual = max(residual, float(np.max(np.abs(copy - first))))
        return residual

    def table(self) -> List[Dict[str, Any]]:
        """Returns one row per block with its label, dimension, and multiplicity."""
        return [{'label': label, 'dim': self.dim(label), 'mult': self.mult(label)}
            for label in self.labels]

def _orthonormalize(candidates: np.ndarray, basis: List[np.ndarray], limit: int) -> List[np.ndarray]:
    """Gram-Schmidt (applied twice) over the candidate columns against an existing
    list of orthonormal vectors, stopping once `limit` new vectors are found."""
    found: List[np.ndarray] = []
    for k in range(candidates.shape[1]):
        vec: np.ndarray = candidates[:, k].astype(complex)
        for _ in range(2):
            for other in basis + found:
                vec = vec - np.vdot(other, vec) * other
        if (norm := np.linalg.norm(vec)) > _NORM_TOL:
            found.append(vec / norm)
            if len(found) == limit:
                break
    return found

def _digits_vector(digits: Sequence[int], dim: int) -> np.ndarray:
    """Returns the computational basis vector `|digits>` of `(C^dim)^{⊗n}`."""
    vec: np.ndarray = np.zeros(dim ** len(digits))
    vec[int(np.ravel_multi_index(tuple(digits), [dim] * len(digits)))] = 1.0
    return vec

def schur_basis_unitary_group(dim: int, n: int, logger: Logger = SILENT) -> SchurBasis:
    """Builds the Schur basis of `U^{⊗n}` on `(C^dim)^{⊗n}`.

    For each partition with at most `dim` rows, a seed copy is obtained by
    orthonormalizing the Young symmetrizer of the row-reading tableau applied
    to the semistandard product vectors. Further copies are permuted images
    of the seed, projected against the copies found so far; the image of an
    irrep under a permutation operator is an aligned copy.

    Parameters
    ----------
    dim : int
        The local dimension.
    n : int
        The number of tensor factors.
    logger : Logger (default `SILENT`)
        A logger for reporting on information.

    Returns
    -------
    SchurBasis
        The real orthonormal basis with blocks labeled by partitions.

    Raises
    ------
    SchurError
        If the number of copies or the dimension of an irrep does not match
        the counting formulas.
    """
    dims: List[int] = [dim] * n
    columns: List[np.ndarray] = []
    labels: List[Label] = []
    block_table: Dict[Label, Tuple[int, int]] = {}
    block_columns: Dict[Label, np.ndarray] = {}

    for shape in partitions(n, dim):
        irrep_dim: int = count_ssyt(shape, dim)
        mult: int = count_syt(shape)
        seed_tab = row_reading_tableau(shape)

        # Seed copy from semistandard product vectors, falling back to all basis vectors
        candidates: np.ndarray = np.stack([_digits_vector([val - 1 for val in ssyt.reading_word()],
            dim) for ssyt in enumerate_ssyt(shape, dim)], axis = 1)
        seed: List[np.ndarray] = _orthonormalize(
            apply_symmetrizer(seed_tab, dim, candidates), [], irrep_dim)
        if len(seed) < irrep_dim:
            seed += _orthonormalize(apply_symmetrizer(seed_tab, dim, np.eye(dim ** n)),
                seed, irrep_dim - len(seed))
        if len(seed) != irrep_dim:
            raise SchurError(f'Irrep {shape} of U({dim}) has dimension {len(seed)}, '
                + f'expected {irrep_dim}.')
        seed_mat: np.ndarray = np.stack(seed, axis = 1)

        # Aligned copies from permuted images of the seed
        copies: List[np.ndarray] = [seed_mat]
        for perm in permutations(range(n)):
            if len(copies) == mult:
                break
            image: np.ndarray = reorder_vector(seed_mat, dims, perm)
            for _ in range(2):
                for copy in copies:
                    image = image - copy @ (copy.conj().T @ image)
            gram: np.ndarray = image.conj().T @ image
            scale: float = float(np.trace(gram).real) / irrep_dim
            if scale < _NORM_TOL:
                continue
            if np.max(np.abs(gram - scale * np.eye(irrep_dim))) > _ALIGN_TOL * max(scale, 1.0):
                raise SchurError(f'Permuted copy of irrep {shape} is not aligned.')
            copies.append(image / np.sqrt(scale))
        if len(copies) != mult:
            raise SchurError(f'Irrep {shape} has {len(copies)} copies, expected {mult}.')

        offset: int = sum(col.shape[1] for col in columns)
        block: np.ndarray = np.concatenate(copies, axis = 1)
        columns.append(block)
        labels.append(shape)
        block_table[shape] = (irrep_dim, mult)
        # Columns run over copies (outer) then irrep vectors (inner)
        block_columns[shape] = offset + np.arange(mult)[None, :] * irrep_dim \
            + np.arange(irrep_dim)[:, None]
        logger.debug(f'U({dim})^{n} irrep {shape}: dim {irrep_dim}, mult {mult}')

    matrix: np.ndarray = np.concatenate(columns, axis = 1)
    if matrix.shape[1] != dim ** n:
        raise SchurError(f'Schur basis has {matrix.shape[1]} columns, expected {dim ** n}.')
    return SchurBasis(np.real_if_close(matrix, tol = 1000), labels, block_table, block_columns)

def tensor_product_basis(bases: Sequence[SchurBasis]) -> SchurBasis:
    """Returns the Schur basis of a tensor product of representations of a product group.

    Blocks are labeled by tuples of the factor labels, in C-order of the
    factors. Irrep and copy indices are the C-order flattening of the
    factor indices.

    Parameters
    ----------
    bases : Sequence[SchurBasis]
        The Schur bases of the factors.

    Returns
    -------
    SchurBasis
        The Schur basis of the product.
    """
    matrix: np.ndarray = np.ones((1, 1))
    labels: List[Tuple[Label, ...]] = [()]
    table: Dict[Tuple[Label, ...], Tuple[int, int]] = {(): (1, 1)}
    columns: Dict[Tuple[Label, ...], np.ndarray] = {(): np.zeros((1, 1), dtype = np.int64)}

    for basis in bases:
        width: int = basis.matrix.shape[1]
        new_labels: List[Tuple[Label, ...]] = []
        new_table: Dict[Tuple[Label, ...], Tuple[int, int]] = {}
        new_columns: Dict[Tuple[Label, ...], np.ndarray] = {}
        for label in labels:
            dim_a, mult_a = table[label]
            cols_a: np.ndarray = columns[label]
            for other in basis.labels:
                dim_b, mult_b = basis.block_table[other]
                cols_b: np.ndarray = basis.block_columns(other)
                combined: np.ndarray = (cols_a[:, None, :, None] * width
                    + cols_b[None, :, None, :]).reshape(dim_a * dim_b, mult_a * mult_b)
                new_label: Tuple[Label, ...] = label + (other,)
                new_labels.append(new_label)
                new_table[new_label] = (dim_a * dim_b, mult_a * mult_b)
                new_columns[new_label] = combined
        matrix = np.kron(matrix, basis.matrix)
        labels, table, columns = new_labels, new_table, new_columns

    # Reindex the columns so each block is contiguous, copies outer and irrep vectors inner
    order: List[int] = []
    final_columns: Dict[Tuple[Label, ...], np.ndarray] = {}
    for label in labels:
        dim_r, mult_r = table[label]
        final_columns[label] = len(order) + np.arange(mult_r)[None, :] * dim_r \
            + np.arange(dim_r)[:, None]
        order += list(columns[label].T.reshape(-1))
    return SchurBasis(matrix[:, order], labels, table, final_columns)
