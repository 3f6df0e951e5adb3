"""A script containing the conic problem data: variable blocks, second-order
cone blocks, solver settings and results, and the epigraph formulation of
a sum of Euclidean norms.

A problem reads

    minimize c^T x  subject to  A x = b,  x_psd in PSD,  ||G_k x - h_k|| <= x[tau_k],

over a vector `x` split into named blocks. A PSD block of side `n` stores
all `n^2` entries of its matrix in row-major order. A Hermitian block
stores the real symmetric embedding `[[Re X, -Im X], [Im X, Re X]]` of side
`2n`; the entries of the embedding that repeat another entry are tied to it
by equality rows, so linear functionals only ever reference the canonical
entries `Re X[i, j]` (`i <= j`) and `Im X[i, j]` (`i > j`).
"""

from typing import Any, Dict, List, Literal, Sequence, Tuple, TypeAlias
import numpy as np
from scipy import sparse

BlockKind: TypeAlias = Literal['free', 'psd']
"""The cone of a variable block."""

Status: TypeAlias = Literal['optimal', 'maxIter', 'infeasibleLikely']
"""The termination status of a solve."""

class ProblemError(ValueError):
    """Raised when a conic problem or its settings are malformed."""

class SolverError(Exception):
    """Raised when the solver fails numerically."""

class InfeasibleError(SolverError):
    """Raised when the equality constraints are inconsistent."""

class SolverSettings:
    """The settings of the operator-splitting solver."""

    def __init__(self, max_iter: int = 200000, eps_primal: float = 1e-6,
            eps_dual: float = 1e-6, eps_gap: float = 1e-5, scaling: bool = True,
            seed: int = 42, rho: float = 1.0, alpha: float = 1.6,
            adaptive_rho: bool = True, check_interval: int = 25, threads: int = 1) -> None:
        """
        Parameters
        ----------
        max_iter : int (default 200000)
            The maximum number of iterations.
        eps_primal : float (default 1e-6)
            The relative primal residual tolerance.
        eps_dual : float (default 1e-6)
            The relative dual residual tolerance.
        eps_gap : float (default 1e-5)
            The relative duality gap tolerance.
        scaling : bool (default `True`)
            When `True`, equilibrates the equality rows and the objective.
        seed : int (default 42)
            The seed echoed in the result.
        rho : float (default 1.0)
            The initial penalty parameter.
        alpha : float (default 1.6)
            The over-relaxation factor in (0, 2).
        adaptive_rho : bool (default `True`)
            When `True`, rescales the penalty to balance the residuals.
        check_interval : int (default 25)
            The number of iterations between convergence checks.
        threads : int (default 1)
            The maximum number of workers for the cone projections.

        Raises
        ------
        ProblemError
            If a tolerance, count, or factor is out of range.
        """
        if min(eps_primal, eps_dual, eps_gap) <= 0:
            raise ProblemError('Solver tolerances must be positive.')
        if max_iter < 1 or check_interval < 1 or threads < 1:
            raise ProblemError('Iteration counts and threads must be positive.')
        if rho <= 0 or not 0 < alpha < 2:
            raise ProblemError(f'Expected rho > 0 and alpha in (0, 2), found {rho} and {alpha}.')
        self.max_iter: int = max_iter
        self.eps_primal: float = eps_primal
        self.eps_dual: float = eps_dual
        self.eps_gap: float = eps_gap
        self.scaling: bool = scaling
        self.seed: int = seed
        self.rho: float = rho
        self.alpha: float = alpha
        self.adaptive_rho: bool = adaptive_rho
        self.check_interval: int = check_interval
        self.threads: int = threads

    def to_dict(self) -> Dict[str, Any]:
        """Returns the settings as a JSON-serializable dictionary."""
        return dict(vars(self))

class VariableBlock:
    """A named, contiguous block of the variable vector."""

    def __init__(self, name: str, kind: BlockKind, size: int, offset: int = 0,
            hermitian: bool = False) -> None:
        """
        Parameters
        ----------
        name : str
            The name of the block.
        kind : 'free' | 'psd'
            The cone of the block.
        size : int
            The length of a free block, or the side of the stored PSD matrix
            (twice the side of a Hermitian matrix).
        offset : int (default 0)
            The index of the first entry in the variable vector.
        hermitian : bool (default `False`)
            Whether a PSD block stores the embedding of a Hermitian matrix.
        """
        if kind not in ('free', 'psd'):
            raise ProblemError(f'Unknown block kind \'{kind}\'.')
        if size < 1 or (hermitian and (kind != 'psd' or size % 2)):
            raise ProblemError(f'Invalid size {size} for block \'{name}\'.')
        self.name: str = name
        self.kind: BlockKind = kind
        self.size: int = size
        self.offset: int = offset
        self.hermitian: bool = hermitian

    @property
    def length(self) -> int:
        """The number of entries in the variable vector."""
        return self.size if self.kind == 'free' else self.size * self.size

    @property
    def stop(self) -> int:
        """One past the index of the last entry."""
        return self.offset + self.length

    @property
    def side(self) -> int:
        """The side of the represented matrix."""
        return self.size // 2 if self.hermitian else self.size

    def moved(self, offset: int) -> 'VariableBlock':
        """Returns the same block starting at another offset."""
        return VariableBlock(self.name, self.kind, self.size, offset, self.hermitian)

    def _index(self, row: int, col: int) -> int:
        return self.offset + row * self.size + col

    def entry_maps(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Returns the canonical variable of each entry of the represented matrix.

        Returns
        -------
        (numpy.ndarray, numpy.ndarray, numpy.ndarray, numpy.ndarray)
            `re_index`, `re_sign`, `im_index`, `im_sign`, each of shape
            `(side, side)`, such that `Re X[i, j] = re_sign * x[re_index]` and
            `Im X[i, j] = im_sign * x[im_index]`. A zero sign marks an entry
            that vanishes.
        """
        if self.kind != 'psd':
            raise ProblemError(f'Block \'{self.name}\' is not a matrix block.')
        side: int = self.side
        rows, cols = np.meshgrid(np.arange(side), np.arange(side), indexing = 'ij')
        low: np.ndarray = np.minimum(rows, cols)
        high: np.ndarray = np.maximum(rows, cols)
        re_index: np.ndarray = self.offset + low * self.size + high
        re_sign: np.ndarray = np.ones((side, side), dtype = np.int64)
        if not self.hermitian:
            return re_index, re_sign, np.full((side, side), self.offset), \
                np.zeros((side, side), dtype = np.int64)
        im_index: np.ndarray = self.offset + (side + high) * self.size + low
        im_sign: np.ndarray = np.sign(rows - cols).astype(np.int64)
        return re_index, re_sign, im_index, im_sign

    def _canonical(self, row: int, col: int) -> Tuple[int, int]:
        """Returns the canonical index and sign of a stored matrix entry."""
        if not self.hermitian:
            return self._index(min(row, col), max(row, col)), 1
        side: int = self.side
        if (row < side) == (col < side):
            i, j = row % side, col % side
            return self._index(min(i, j), max(i, j)), 1
        # The upper right quadrant is the transpose of the lower left one, Im X
        low_row, low_col = (row, col) if row >= side else (col, row)
        i, j = low_row - side, low_col
        if i == j:
            return self._index(row, col), 0
        sign: int = 1 if i > j else -1
        return self._index(side + max(i, j), min(i, j)), sign

    def structure_rows(self) -> Tuple[List[int], List[int], List[float], int]:
        """Returns the equality rows tying the repeated entries of a PSD block
        to their canonical entry.

        Returns
        -------
        (list[int], list[int], list[float], int)
            The row indices, column indices, and values of the sparse rows,
            each with a zero right-hand side, and the number of rows.
        """
        rows: List[int] = []
        cols: List[int] = []
        vals: List[float] = []
        if self.kind != 'psd':
            return rows, cols, vals, 0
        count: int = 0
        for row in range(self.size):
            for col in range(self.size):
                index: int = self._index(row, col)
                canon, sign = self._canonical(row, col)
                if canon == index and sign != 0:
                    continue
                rows.append(count)
                cols.append(index)
                vals.append(1.0)
                if sign != 0:
                    rows.append(count)
                    cols.append(canon)
                    vals.append(-float(sign))
                count += 1
        return rows, cols, vals, count

    def value(self, x: np.ndarray) -> np.ndarray:
        """Returns the represented value of the block within a variable vector."""
        entries: np.ndarray = np.asarray(x)[self.offset:self.stop]
        if self.kind == 'free':
            return entries.copy()
        mat: np.ndarray = entries.reshape(self.size, self.size)
        mat = (mat + mat.T) / 2
        if not self.hermitian:
            return mat
        side: int = self.side
        out: np.ndarray = mat[:side, :side] + 1j * mat[side:, :side]
        return (out + out.conj().T) / 2

    def embed(self, value: np.ndarray) -> np.ndarray:
        """Returns the stored entries representing a value of the block."""
        value = np.asarray(value)
        if self.kind == 'free':
            return value.astype(float).reshape(-1)
        if not self.hermitian:
            return np.real(value).astype(float).reshape(-1)
        return np.block([[value.real, -value.imag], [value.imag, value.real]]).reshape(-1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'kind': self.kind,
            'size': self.size,
            'offset': self.offset,
            'hermitian': self.hermitian
        }

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VariableBlock) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f'VariableBlock({self.name!r}, {self.kind}, size={self.size}, offset={self.offset})'

def pack_blocks(blocks: Sequence[VariableBlock]) -> List[VariableBlock]:
    """Returns the blocks laid out contiguously in order, starting at zero."""
    packed: List[VariableBlock] = []
    offset: int = 0
    for block in blocks:
        packed.append(block.moved(offset))
        offset = packed[-1].stop
    return packed

def gather_matrices(block: VariableBlock, num_vars: int) -> Tuple[sparse.csr_matrix,
        sparse.csr_matrix]:
    """Returns the sparse maps from the canonical variables to the real and
    imaginary parts of the represented matrix, flattened row-major.

    Parameters
    ----------
    block : VariableBlock
        A PSD block.
    num_vars : int
        The length of the variable vector.

    Returns
    -------
    (scipy.sparse.csr_matrix, scipy.sparse.csr_matrix)
        Matrices of shape `(side^2, num_vars)`.
    """
    re_index, re_sign, im_index, im_sign = block.entry_maps()
    count: int = re_index.size
    rows: np.ndarray = np.arange(count)
    real: sparse.csr_matrix = sparse.csr_matrix(
        (re_sign.ravel().astype(float), (rows, re_index.ravel())), shape = (count, num_vars))
    mask: np.ndarray = im_sign.ravel() != 0
    imag: sparse.csr_matrix = sparse.csr_matrix(
        (im_sign.ravel()[mask].astype(float), (rows[mask], im_index.ravel()[mask])),
        shape = (count, num_vars))
    return real, imag

def hermitian_functionals(block: VariableBlock, coeffs: np.ndarray,
        num_vars: int) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Returns the real rows of the complex linear functionals
    `X -> sum_{ij} coeffs[k, i, j] X[i, j]` of a matrix block.

    Parameters
    ----------
    block : VariableBlock
        A PSD block.
    coeffs : numpy.ndarray
        The coefficients, of shape `(count, side, side)`.
    num_vars : int
        The length of the variable vector.

    Returns
    -------
    (scipy.sparse.csr_matrix, scipy.sparse.csr_matrix)
        The rows of the real and imaginary parts of each functional.
    """
    real, imag = gather_matrices(block, num_vars)
    flat: np.ndarray = np.asarray(coeffs).reshape(len(coeffs), -1)
    coeff_re: sparse.csr_matrix = sparse.csr_matrix(flat.real)
    coeff_im: sparse.csr_matrix = sparse.csr_matrix(flat.imag)
    return (coeff_re @ real - coeff_im @ imag).tocsr(), (coeff_im @ real + coeff_re @ imag).tocsr()

class SocBlock:
    """A second-order cone `||G[start:stop] x - h[start:stop]|| <= x[epigraph]`."""

    def __init__(self, epigraph: int, start: int, stop: int) -> None:
        self.epigraph: int = epigraph
        self.start: int = start
        self.stop: int = stop

    @property
    def length(self) -> int:
        """The dimension of the cone, including the epigraph entry."""
        return self.stop - self.start + 1

    def to_dict(self) -> Dict[str, Any]:
        return {'epigraph': self.epigraph, 'start': self.start, 'stop': self.stop}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SocBlock) and self.to_dict() == other.to_dict()

class ConicProblem:
    """A linear objective over free, PSD, and second-order cone constraints."""

    def __init__(self, blocks: Sequence[VariableBlock], a_mat: sparse.spmatrix, b_vec: np.ndarray,
            c_vec: np.ndarray, g_mat: sparse.spmatrix | None = None, h_vec: np.ndarray | None = None,
            soc: Sequence[SocBlock] = (), name: str = 'problem') -> None:
        """
        Parameters
        ----------
        blocks : Sequence[VariableBlock]
            The contiguous variable blocks, covering the variable vector.
        a_mat : scipy.sparse.spmatrix
            The equality rows.
        b_vec : numpy.ndarray
            The equality right-hand side.
        c_vec : numpy.ndarray
            The objective.
        g_mat : scipy.sparse.spmatrix | None (default `None`)
            The rows of the second-order cone residuals.
        h_vec : numpy.ndarray | None (default `None`)
            The offsets of the second-order cone residuals.
        soc : Sequence[SocBlock] (default `()`)
            The second-order cones over slices of `G x - h`.
        name : str (default 'problem')
            A display name.

        Raises
        ------
        ProblemError
            If the data do not fit the blocks.
        """
        self.blocks: List[VariableBlock] = list(blocks)
        self.num_vars: int = self.blocks[-1].stop if self.blocks else 0
        self.a_mat: sparse.csr_matrix = sparse.csr_matrix(a_mat, shape = (a_mat.shape[0], self.num_vars))
        self.b_vec: np.ndarray = np.asarray(b_vec, dtype = float).reshape(-1)
        self.c_vec: np.ndarray = np.asarray(c_vec, dtype = float).reshape(-1)
        self.g_mat: sparse.csr_matrix = sparse.csr_matrix((0, self.num_vars)) if g_mat is None \
            else sparse.csr_matrix(g_mat)
        self.h_vec: np.ndarray = np.zeros(self.g_mat.shape[0]) if h_vec is None \
            else np.asarray(h_vec, dtype = float).reshape(-1)
        self.soc: List[SocBlock] = list(soc)
        self.name: str = name
        self._check()

    def _check(self) -> None:
        offset: int = 0
        for block in self.blocks:
            if block.offset != offset:
                raise ProblemError(f'Block \'{block.name}\' starts at {block.offset}, expected {offset}.')
            offset = block.stop
        if self.a_mat.shape[0] != self.b_vec.size:
            raise ProblemError(f'{self.a_mat.shape[0]} equality rows but {self.b_vec.size} right-hand sides.')
        if self.c_vec.size != self.num_vars or self.g_mat.shape[1] != self.num_vars:
            raise ProblemError('Objective or cone rows do not match the variable count.')
        if self.g_mat.shape[0] != self.h_vec.size:
            raise ProblemError('Cone rows and offsets differ in length.')
        for cone in self.soc:
            if not (0 <= cone.start < cone.stop <= self.h_vec.size and 0 <= cone.epigraph < self.num_vars):
                raise ProblemError(f'Second-order cone {cone.to_dict()} is out of range.')

    @property
    def psd_blocks(self) -> List[VariableBlock]:
        """The PSD blocks in order."""
        return [block for block in self.blocks if block.kind == 'psd']

    def block(self, name: str) -> VariableBlock:
        """Returns the block with the given name."""
        for block in self.blocks:
            if block.name == name:
                return block
        raise ProblemError(f'No block named \'{name}\'.')

    def block_values(self, x: np.ndarray) -> Dict[str, np.ndarray]:
        """Returns the represented value of every block within a variable vector."""
        return {block.name: block.value(x) for block in self.blocks}

    def cone_counts(self) -> Dict[str, int]:
        """Returns the number of equality rows and of each kind of cone."""
        return {
            'zero': int(self.a_mat.shape[0]),
            'psd': len(self.psd_blocks),
            'soc': len(self.soc),
            'free': sum(block.length for block in self.blocks if block.kind == 'free')
        }

    def __repr__(self) -> str:
        return f'ConicProblem({self.name!r}, vars={self.num_vars}, {self.cone_counts()})'

class SolveResult:
    """The outcome of a solve."""

    def __init__(self, status: Status, objective: float, dual_objective: float, x: np.ndarray,
            block_values: Dict[str, np.ndarray], residuals: Tuple[float, float, float],
            iterations: int, merit: List[float], settings: SolverSettings,
            solve_time: float) -> None:
        """
        Parameters
        ----------
        status : 'optimal' | 'maxIter' | 'infeasibleLikely'
            The termination status.
        objective : float
            The primal objective.
        dual_objective : float
            The dual objective.
        x : numpy.ndarray
            The primal variable vector.
        block_values : dict[str, numpy.ndarray]
            The represented value of every block.
        residuals : (float, float, float)
            The relative primal, dual, and gap residuals at termination.
        iterations : int
            The number of iterations run.
        merit : list[float]
            The fixed-point residual at each convergence check.
        settings : SolverSettings
            The settings used.
        solve_time : float
            The wall time in seconds.
        """
        self.status: Status = status
        self.objective: float = objective
        self.dual_objective: float = dual_objective
        self.x: np.ndarray = x
        self.block_values: Dict[str, np.ndarray] = block_values
        self.residuals: Tuple[float, float, float] = residuals
        self.iterations: int = iterations
        self.merit: List[float] = merit
        self.settings: SolverSettings = settings
        self.solve_time: float = solve_time

    @property
    def optimal(self) -> bool:
        """Whether the solve met every tolerance."""
        return self.status == 'optimal'

    def to_dict(self, include_blocks: bool = False) -> Dict[str, Any]:
        """Returns the result as a JSON-serializable dictionary."""
        obj: Dict[str, Any] = {
            'status': self.status,
            'objective': self.objective,
            'dual_objective': self.dual_objective,
            'residuals': {
                'primal': self.residuals[0],
                'dual': self.residuals[1],
                'gap': self.residuals[2]
            },
            'iterations': self.iterations,
            'solve_time': self.solve_time,
            'merit': [float(val) for val in self.merit],
            'settings': self.settings.to_dict()
        }
        if include_blocks:
            obj['blocks'] = {name: {'real': np.real(val).tolist(), 'imag': np.imag(val).tolist()}
                for name, val in self.block_values.items()}
        return obj

    def __repr__(self) -> str:
        return f'SolveResult({self.status}, objective={self.objective:.6g}, iterations={self.iterations})'

def epigraph_formulate(blocks: Sequence[VariableBlock], a_mat: sparse.spmatrix | None,
        b_vec: np.ndarray | None, residual_maps: Sequence[Tuple[sparse.spmatrix, np.ndarray]],
        objective: np.ndarray | None = None, name: str = 'problem') -> ConicProblem:
    """Formulates `min objective^T x + (1/N) sum_s ||G_s x - h_s||` over the blocks as
    a conic problem with one epigraph variable and second-order cone per residual.

    Parameters
    ----------
    blocks : Sequence[VariableBlock]
        The variable blocks, packed contiguously in order.
    a_mat : scipy.sparse.spmatrix | None
        The equality rows over the blocks, or `None` for none.
    b_vec : numpy.ndarray | None
        The equality right-hand side.
    residual_maps : Sequence[(scipy.sparse.spmatrix, numpy.ndarray)]
        The affine residual `(G_s, h_s)` of each sample.
    objective : numpy.ndarray | None (default `None`)
        An additional linear objective over the blocks.
    name : str (default 'problem')
        A display name.

    Returns
    -------
    ConicProblem
        The problem over the blocks followed by a free 'epigraph' block. The
        equality rows include the ties of every PSD block.
    """
    packed: List[VariableBlock] = pack_blocks(blocks)
    num_vars: int = packed[-1].stop if packed else 0
    count: int = len(residual_maps)
    all_blocks: List[VariableBlock] = packed + ([VariableBlock('epigraph', 'free', count, num_vars)]
        if count else [])
    total: int = num_vars + count

    pieces: List[sparse.csr_matrix] = []
    rhs: List[np.ndarray] = []
    if a_mat is not None and a_mat.shape[0]:
        pieces.append(sparse.csr_matrix(sparse.hstack([sparse.csr_matrix(a_mat),
            sparse.csr_matrix((a_mat.shape[0], count))])))
        rhs.append(np.asarray(b_vec, dtype = float).reshape(-1))
    for block in packed:
        rows, cols, vals, num_rows = block.structure_rows()
        if num_rows:
            pieces.append(sparse.csr_matrix((vals, (rows, cols)), shape = (num_rows, total)))
            rhs.append(np.zeros(num_rows))
    a_full: sparse.csr_matrix = sparse.csr_matrix(sparse.vstack(pieces)) if pieces \
        else sparse.csr_matrix((0, total))
    b_full: np.ndarray = np.concatenate(rhs) if rhs else np.zeros(0)

    c_vec: np.ndarray = np.zeros(total)
    if objective is not None:
        c_vec[:num_vars] = np.asarray(objective, dtype = float).reshape(-1)
    c_vec[num_vars:] = 1 / count if count else 0

    cones: List[SocBlock] = []
    g_rows: List[sparse.csr_matrix] = []
    h_rows: List[np.ndarray] = []
    start: int = 0
    for sample, (g_s, h_s) in enumerate(residual_maps):
        g_s = sparse.csr_matrix(g_s)
        g_rows.append(sparse.csr_matrix(sparse.hstack([g_s, sparse.csr_matrix((g_s.shape[0], count))])))
        h_rows.append(np.asarray(h_s, dtype = float).reshape(-1))
        cones.append(SocBlock(num_vars + sample, start, start + g_s.shape[0]))
        start += g_s.shape[0]
    g_full: sparse.csr_matrix = sparse.csr_matrix(sparse.vstack(g_rows)) if g_rows \
        else sparse.csr_matrix((0, total))
    h_full: np.ndarray = np.concatenate(h_rows) if h_rows else np.zeros(0)
    return ConicProblem(all_blocks, a_full, b_full, c_vec, g_full, h_full, cones, name)
