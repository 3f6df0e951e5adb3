"""A script containing the multipartite linear algebra used throughout
the package: labeled subsystem layouts, permutation operators, partial
traces and transposes, Choi representations, the link product, and
Haar sampling.

Operators act on ordered tensor products of subsystems. Index `i` of a
space with dims `(d_0, ..., d_{n-1})` is the C-order flattening of the
multi-index, so the first subsystem is the most significant.
"""

from typing import List, Sequence, Tuple, Dict
import numpy as np
from scipy.linalg import qr

DEFAULT_TOL: float = 1e-10
"""The default tolerance of the numerical predicates."""

PAULI_I: np.ndarray = np.eye(2, dtype = complex)
"""The single-qubit identity."""

PAULI_X: np.ndarray = np.array([[0, 1], [1, 0]], dtype = complex)
"""The Pauli X matrix."""

PAULI_Y: np.ndarray = np.array([[0, -1j], [1j, 0]], dtype = complex)
"""The Pauli Y matrix."""

PAULI_Z: np.ndarray = np.array([[1, 0], [0, -1]], dtype = complex)
"""The Pauli Z matrix."""

PAULIS: Dict[str, np.ndarray] = {'I': PAULI_I, 'X': PAULI_X, 'Y': PAULI_Y, 'Z': PAULI_Z}
"""The single-qubit Paulis by name."""

class LayoutError(ValueError):
    """Raised when subsystem labels or dimensions are inconsistent."""

class SubsystemLayout:
    """An ordered list of labeled subsystems and their dimensions."""

    def __init__(self, labels: Sequence[str], dims: Sequence[int]) -> None:
        """
        Parameters
        ----------
        labels : Sequence[str]
            The unique name of each subsystem, in tensor order.
        dims : Sequence[int]
            The dimension of each subsystem.
        """
        if len(labels) != len(dims):
            raise LayoutError(f'{len(labels)} labels given for {len(dims)} dimensions.')
        if len(set(labels)) != len(labels):
            raise LayoutError(f'Subsystem labels must be unique: {list(labels)}')
        if any(dim < 1 for dim in dims):
            raise LayoutError(f'Subsystem dimensions must be positive: {list(dims)}')
        self.labels: Tuple[str, ...] = tuple(labels)
        self.dims: Tuple[int, ...] = tuple(int(dim) for dim in dims)

    @property
    def total_dim(self) -> int:
        """The dimension of the whole space."""
        return int(np.prod(self.dims, dtype = np.int64)) if self.dims else 1

    def index(self, label: str) -> int:
        """Returns the tensor position of a subsystem.

        Raises
        ------
        LayoutError
            If the label is not part of the layout.
        """
        if label not in self.labels:
            raise LayoutError(f'Unknown subsystem \'{label}\'; layout has {list(self.labels)}.')
        return self.labels.index(label)

    def dim_of(self, labels: Sequence[str]) -> int:
        """Returns the product of the dimensions of the given subsystems."""
        return int(np.prod([self.dims[self.index(label)] for label in labels], dtype = np.int64))

    def subset(self, labels: Sequence[str]) -> 'SubsystemLayout':
        """Returns the layout restricted to the given subsystems, in the given order."""
        return SubsystemLayout(labels, [self.dims[self.index(label)] for label in labels])

    def without(self, labels: Sequence[str]) -> 'SubsystemLayout':
        """Returns the layout with the given subsystems removed."""
        for label in labels:
            self.index(label)
        return self.subset([label for label in self.labels if label not in labels])

    def __add__(self, other: 'SubsystemLayout') -> 'SubsystemLayout':
        return SubsystemLayout(self.labels + other.labels, self.dims + other.dims)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SubsystemLayout) \
            and self.labels == other.labels and self.dims == other.dims

    def __repr__(self) -> str:
        return f'SubsystemLayout({list(self.labels)}, {list(self.dims)})'

class IndexedOperator:
    """A square operator together with the layout of the space it acts on."""

    def __init__(self, matrix: np.ndarray, layout: SubsystemLayout) -> None:
        """
        Parameters
        ----------
        matrix : numpy.ndarray
            The operator, of side `layout.total_dim`.
        layout : SubsystemLayout
            The labeled subsystems of the space.
        """
        matrix = np.asarray(matrix)
        if matrix.shape != (layout.total_dim, layout.total_dim):
            raise LayoutError(f'Operator of shape {matrix.shape} does not act on {layout}.')
        self.matrix: np.ndarray = matrix
        self.layout: SubsystemLayout = layout

    def dim_of(self, labels: Sequence[str]) -> int:
        """Returns the product of the dimensions of the given subsystems."""
        return self.layout.dim_of(labels)

    def reorder(self, labels: Sequence[str]) -> 'IndexedOperator':
        """Returns the same operator with its subsystems permuted into the given order.

        Parameters
        ----------
        labels : Sequence[str]
            A permutation of the layout's labels.

        Returns
        -------
        IndexedOperator
            The reordered operator.
        """
        if sorted(labels) != sorted(self.layout.labels):
            raise LayoutError(f'{list(labels)} is not a permutation of {list(self.layout.labels)}.')
        order: List[int] = [self.layout.index(label) for label in labels]
        return IndexedOperator(reorder_matrix(self.matrix, self.layout.dims, order),
            self.layout.subset(labels))

    def kron(self, other: 'IndexedOperator') -> 'IndexedOperator':
        """Returns the tensor product with another operator on disjoint subsystems."""
        return IndexedOperator(np.kron(self.matrix, other.matrix), self.layout + other.layout)

    def partial_trace(self, labels: Sequence[str]) -> 'IndexedOperator':
        """Traces out the given subsystems."""
        return IndexedOperator(
            partial_trace(self.matrix, self.layout.dims,
                [self.layout.index(label) for label in labels]),
            self.layout.without(labels))

    def partial_transpose(self, labels: Sequence[str]) -> 'IndexedOperator':
        """Transposes the given subsystems."""
        return IndexedOperator(
            partial_transpose(self.matrix, self.layout.dims,
                [self.layout.index(label) for label in labels]),
            self.layout)

    def __repr__(self) -> str:
        return f'IndexedOperator({self.layout})'

def kron(*mats: np.ndarray) -> np.ndarray:
    """Returns the Kronecker product of the given matrices, in order."""
    out: np.ndarray = np.ones((1, 1), dtype = complex)
    for mat in mats:
        out = np.kron(out, mat)
    return out

def compose_permutations(second: Sequence[int], first: Sequence[int]) -> Tuple[int, ...]:
    """Returns the permutation `second ∘ first`, i.e. `k -> second[first[k]]`."""
    return tuple(second[k] for k in first)

def inverse_permutation(perm: Sequence[int]) -> Tuple[int, ...]:
    """Returns the inverse of a permutation given as a tuple of images."""
    inverse: List[int] = [0] * len(perm)
    for k, image in enumerate(perm):
        inverse[image] = k
    return tuple(inverse)

def _check_permutation(perm: Sequence[int], length: int) -> None:
    if len(perm) != length:
        raise LayoutError(f'Permutation {tuple(perm)} has length {len(perm)}, expected {length}.')
    if sorted(perm) != list(range(length)):
        raise LayoutError(f'{tuple(perm)} is not a permutation of range({length}).')

def reorder_matrix(matrix: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Permutes the subsystems of an operator so that output position `k`
    holds input subsystem `order[k]`.

    Parameters
    ----------
    matrix : numpy.ndarray
        The operator on the ordered subsystems with the given dims.
    dims : Sequence[int]
        The dimension of each subsystem.
    order : Sequence[int]
        The input subsystem placed at each output position.

    Returns
    -------
    numpy.ndarray
        The reordered operator.
    """
    num: int = len(dims)
    _check_permutation(order, num)
    total: int = int(np.prod(dims, dtype = np.int64))
    tensor: np.ndarray = np.asarray(matrix).reshape(list(dims) * 2)
    axes: List[int] = list(order) + [num + k for k in order]
    return tensor.transpose(axes).reshape(total, total)

def reorder_vector(vec: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Permutes the subsystems of a vector (or of the rows of a matrix) so that
    output position `k` holds input subsystem `order[k]`."""
    _check_permutation(order, len(dims))
    vec = np.asarray(vec)
    trailing: Tuple[int, ...] = vec.shape[1:]
    tensor: np.ndarray = vec.reshape(list(dims) + list(trailing))
    axes: List[int] = list(order) + list(range(len(dims), len(dims) + len(trailing)))
    return tensor.transpose(axes).reshape(vec.shape)

def permutation_operator(perm: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Returns the operator A(perm) mapping `|i_0, ..., i_{n-1}>` to
    `|i_perm(0), ..., i_perm(n-1)>`, i.e. output position `k` carries the
    state of input position `perm[k]`.

    The operators compose as `A(perm) A(sigma) = A(sigma ∘ perm)`.

    Parameters
    ----------
    perm : Sequence[int]
        A permutation of `range(len(dims))`.
    dims : Sequence[int]
        The dimension of each subsystem of the input.

    Returns
    -------
    numpy.ndarray
        The permutation operator as a real matrix.

    Raises
    ------
    LayoutError
        If the permutation and dims have different lengths.
    """
    num: int = len(dims)
    _check_permutation(perm, num)
    total: int = int(np.prod(dims, dtype = np.int64))
    return np.eye(total).reshape(list(dims) + [total]) \
        .transpose(list(perm) + [num]).reshape(total, total)

def switch_operator(dim_a: int, dim_b: int) -> np.ndarray:
    """Returns the swap F mapping `|b>|a>` on B ⊗ A to `|a>|b>` on A ⊗ B."""
    return permutation_operator((1, 0), [dim_b, dim_a])

def _positions(num: int, positions: Sequence[int]) -> List[int]:
    out: List[int] = sorted(set(positions))
    if any(pos < 0 or pos >= num for pos in out):
        raise LayoutError(f'Subsystem positions {list(positions)} outside range({num}).')
    return out

def partial_trace(matrix: np.ndarray, dims: Sequence[int], positions: Sequence[int]) -> np.ndarray:
    """Traces out the subsystems at the given positions.

    Parameters
    ----------
    matrix : numpy.ndarray
        The operator on the ordered subsystems.
    dims : Sequence[int]
        The dimension of each subsystem.
    positions : Sequence[int]
        The positions of the subsystems to trace out.

    Returns
    -------
    numpy.ndarray
        The reduced operator on the remaining subsystems, in their original order.
    """
    num: int = len(dims)
    traced: List[int] = _positions(num, positions)
    kept: List[int] = [pos for pos in range(num) if pos not in traced]
    tensor: np.ndarray = np.asarray(matrix).reshape(list(dims) * 2)

    # Shared subscripts contract the traced row and column indices
    rows: List[int] = list(range(num))
    cols: List[int] = [pos if pos in traced else num + pos for pos in range(num)]
    out_sub: List[int] = kept + [num + pos for pos in kept]
    kept_dim: int = int(np.prod([dims[pos] for pos in kept], dtype = np.int64))
    return np.einsum(tensor, rows + cols, out_sub).reshape(kept_dim, kept_dim)

def partial_transpose(matrix: np.ndarray, dims: Sequence[int],
        positions: Sequence[int]) -> np.ndarray:
    """Transposes the subsystems at the given positions.

    Parameters
    ----------
    matrix : numpy.ndarray
        The operator on the ordered subsystems.
    dims : Sequence[int]
        The dimension of each subsystem.
    positions : Sequence[int]
        The positions of the subsystems to transpose.

    Returns
    -------
    numpy.ndarray
        The partially transposed operator.
    """
    num: int = len(dims)
    swapped: List[int] = _positions(num, positions)
    tensor: np.ndarray = np.asarray(matrix).reshape(list(dims) * 2)
    axes: List[int] = list(range(2 * num))
    for pos in swapped:
        axes[pos], axes[num + pos] = num + pos, pos
    return tensor.transpose(axes).reshape(np.asarray(matrix).shape)

def choi_vector(op: np.ndarray) -> np.ndarray:
    """Returns the Choi vector `|op>> = sum_i |i> ⊗ op|i>` of a
    (possibly rectangular) operator, ordered input then output."""
    op = np.asarray(op)
    return op.T.reshape(-1).astype(complex)

def choi_operator(op: np.ndarray) -> np.ndarray:
    """Returns the Choi operator `|op>><<op|` of a single-Kraus map."""
    vec: np.ndarray = choi_vector(op)
    return np.outer(vec, vec.conj())

def kraus_to_choi(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Returns the Choi operator `sum_k |K_k>><<K_k|`, ordered input then output."""
    return sum(choi_operator(op) for op in kraus)

def link_product(first: IndexedOperator, second: IndexedOperator) -> IndexedOperator:
    """Returns the link product `first * second`, contracting the subsystems
    the two operators share.

    The result is `tr_shared[(first^{T_shared} ⊗ I)(I ⊗ second)]`, computed
    without the embedding. Its subsystems are those only in `first`, in
    their order, followed by those only in `second`.

    Parameters
    ----------
    first : IndexedOperator
        The first operator.
    second : IndexedOperator
        The second operator.

    Returns
    -------
    IndexedOperator
        The link product.

    Raises
    ------
    LayoutError
        If a shared subsystem has different dimensions in each operator.
    """
    shared: List[str] = [label for label in first.layout.labels if label in second.layout.labels]
    for label in shared:
        if first.layout.dims[first.layout.index(label)] \
                != second.layout.dims[second.layout.index(label)]:
            raise LayoutError(f'Subsystem \'{label}\' has mismatched dimensions.')
    only_a: List[str] = [label for label in first.layout.labels if label not in shared]
    only_b: List[str] = [label for label in second.layout.labels if label not in shared]

    # Bring the shared subsystems to the back of the first and the front of the second
    op_a: IndexedOperator = first.reorder(only_a + shared)
    op_b: IndexedOperator = second.reorder(shared + only_b)
    dim_a: int = op_a.dim_of(only_a) if only_a else 1
    dim_s: int = op_a.dim_of(shared) if shared else 1
    dim_b: int = op_b.dim_of(only_b) if only_b else 1

    tens_a: np.ndarray = op_a.matrix.reshape(dim_a, dim_s, dim_a, dim_s)
    tens_b: np.ndarray = op_b.matrix.reshape(dim_s, dim_b, dim_s, dim_b)
    # C[(xa,xb),(ya,yb)] = sum_{r,s} A[(xa,r),(ya,s)] B[(r,xb),(s,yb)]
    out: np.ndarray = np.einsum('arcs,rbsd->abcd', tens_a, tens_b, optimize = True) \
        .reshape(dim_a * dim_b, dim_a * dim_b)
    layout: SubsystemLayout = op_a.layout.subset(only_a) + op_b.layout.subset(only_b)
    return IndexedOperator(out, layout)

def apply_channel(choi: IndexedOperator, rho: np.ndarray, input_label: str) -> np.ndarray:
    """Applies the channel with the given Choi operator to a state on its input.

    Parameters
    ----------
    choi : IndexedOperator
        The Choi operator, with input and output subsystems.
    rho : numpy.ndarray
        The state on the input subsystem.
    input_label : str
        The label of the input subsystem.

    Returns
    -------
    numpy.ndarray
        The output state, on the remaining subsystems in order.
    """
    state: IndexedOperator = IndexedOperator(np.asarray(rho, dtype = complex),
        choi.layout.subset([input_label]))
    return link_product(state, choi).matrix

def dual_choi(choi: IndexedOperator, input_label: str, output_label: str) -> IndexedOperator:
    """Returns the Choi operator of the dual (Heisenberg picture) map.

    With the Choi ordered (input, output), the dual from the output space to
    the input space has Choi `F E^T F`; it is returned ordered
    (output, input) under the same labels.
    """
    ordered: IndexedOperator = choi.reorder([input_label, output_label])
    swapped: IndexedOperator = ordered.reorder([output_label, input_label])
    return IndexedOperator(swapped.matrix.T, swapped.layout)

def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Samples a Haar-random unitary via the QR decomposition of a Ginibre matrix,
    with the phases of the diagonal of R divided out."""
    ginibre: np.ndarray = (rng.standard_normal((dim, dim))
        + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q_mat, r_mat = qr(ginibre)
    diag: np.ndarray = np.diagonal(r_mat)
    return q_mat * (diag / np.abs(diag))

def random_isometry(dim_in: int, dim_out: int, rng: np.random.Generator) -> np.ndarray:
    """Samples a Haar-random isometry from `dim_in` to `dim_out` dimensions."""
    if dim_out < dim_in:
        raise LayoutError(f'No isometry from dimension {dim_in} into {dim_out}.')
    return haar_unitary(dim_out, rng)[:, :dim_in]

def random_density(dim: int, rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    """Samples a random density matrix.

    Parameters
    ----------
    dim : int
        The dimension of the state.
    rng : numpy.random.Generator
        The source of randomness.
    pure : bool (default `False`)
        When `True`, returns a Haar-random pure state; otherwise a
        Hilbert-Schmidt random mixed state.

    Returns
    -------
    numpy.ndarray
        The density matrix.
    """
    if pure:
        vec: np.ndarray = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        vec /= np.linalg.norm(vec)
        return np.outer(vec, vec.conj())
    ginibre: np.ndarray = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho: np.ndarray = ginibre @ ginibre.conj().T
    return rho / np.trace(rho).real

def sample_unitaries(dim: int, count: int, seed: int) -> List[np.ndarray]:
    """Samples Haar-random unitaries from independent child streams of the seed,
    so sample `k` does not depend on how many samples are drawn.

    Parameters
    ----------
    dim : int
        The dimension of each unitary.
    count : int
        The number of samples.
    seed : int
        The root seed.

    Returns
    -------
    list[numpy.ndarray]
        The sampled unitaries.
    """
    children: List[np.random.SeedSequence] = np.random.SeedSequence(seed).spawn(count)
    return [haar_unitary(dim, np.random.default_rng(child)) for child in children]

def is_hermitian(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Checks whether a matrix equals its conjugate transpose within tolerance."""
    matrix = np.asarray(matrix)
    return matrix.shape[0] == matrix.shape[1] and np.max(np.abs(matrix - matrix.conj().T),
        initial = 0.0) <= tol

def is_unitary(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Checks whether a square matrix is unitary within tolerance."""
    matrix = np.asarray(matrix)
    return matrix.shape[0] == matrix.shape[1] \
        and np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))) <= tol

def is_psd(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Checks whether a Hermitian matrix has no eigenvalue below `-tol`."""
    return is_hermitian(matrix, tol) and min_eigenvalue(matrix) >= -tol

def min_eigenvalue(matrix: np.ndarray) -> float:
    """Returns the smallest eigenvalue of the Hermitian part of a matrix."""
    matrix = np.asarray(matrix)
    return float(np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)[0])

def allclose(first: np.ndarray, second: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Checks whether two arrays agree entrywise within an absolute tolerance."""
    return np.max(np.abs(np.asarray(first) - np.asarray(second)), initial = 0.0) <= tol
