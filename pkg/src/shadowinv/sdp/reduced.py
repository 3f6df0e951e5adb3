"""A script containing the symmetry-reduced semidefinite program for shadow
inversion.

A comb commuting with the symmetry group of the observable has the form
`C = sum_r sum_a W_{r,a} C^(r) W_{r,a}^†`, where `W_{r,a}` holds the `a`-th
vectors of the `mult_r` copies of irrep `r` in the causal layout. Every
linear function of `C` (the marginal chain, the trace, and the dual
channel on the observable) becomes a sum of `tr[C^(r) M^(r)]`, so the
program runs over the small Hermitian blocks `C^(r)` only.

The assembly is written over any list of causal block arrays, so the
unreduced program is the special case of one block of multiplicity
`d^(2t+2)` with the identity as its array.
"""

from functools import cached_property
from typing import Dict, List, Sequence, Tuple
import numpy as np
from scipy import sparse
from shadowinv.log import Logger, SILENT
from shadowinv.tensor import sample_unitaries
from shadowinv.utils import parallel_map
from shadowinv.rep.schur import Label
from shadowinv.rep.centralizer import combined_schur_basis
from shadowinv.comb.model import Architecture, CombError, CombSpec, MarginalStep, Observable, \
    marginal_chain
from shadowinv.comb.channel import slot_vector
from shadowinv.solver.problem import ConicProblem, VariableBlock, epigraph_formulate, \
    hermitian_functionals, pack_blocks
from shadowinv.sdp.permutation import PermutationChoice, default_permutations
from shadowinv.sdp.coefficients import CoefficientTensor, coefficient_tensor

SUPPORT_TOL: float = 1e-12
"""The magnitude below which a constraint functional is treated as zero."""

_DEDUP_DECIMALS: int = 12
"""The decimals kept when comparing normalized constraint rows."""

CausalBlock = Tuple[Label, np.ndarray]
"""A block label and its causal array `W[x, a, alpha]`."""

def _step_dims(spec: CombSpec, step: MarginalStep) -> Tuple[int, int, int]:
    return spec.d ** len(step.kept), spec.d ** len(step.removed), spec.d ** len(step.traced)

def _marginal_gram(weights: np.ndarray, dims: Tuple[int, int, int]) -> np.ndarray:
    """Returns `G[u, v, alpha, beta] = sum_{t,a} W[(u,t), a, alpha] conj(W[(v,t), a, beta])`,
    the coefficient of `C^(r)[alpha, beta]` in `tr_T C [u, v]` with `u = (i_R, x)`."""
    d_r, d_x, d_t = dims
    tens: np.ndarray = weights.reshape(d_r * d_x, d_t, *weights.shape[1:])
    return np.einsum('utaA,vtaB->uvAB', tens, tens.conj(), optimize = True)

def _marginal_functionals(gram: np.ndarray, dims: Tuple[int, int, int]) -> np.ndarray:
    """Subtracts `delta_xy / d_X sum_z G[(i_R,z),(j_R,z)]` from every entry."""
    d_r, d_x, _ = dims
    size: int = gram.shape[-1]
    view: np.ndarray = gram.reshape(d_r, d_x, d_r, d_x, size, size).copy()
    diagonal: np.ndarray = np.einsum('izjzAB->ijAB', view) / d_x
    for x in range(d_x):
        view[:, x, :, x] -= diagonal
    return view.reshape(d_r * d_x, d_r * d_x, size, size)

def _chain_step(spec: CombSpec, k: int) -> MarginalStep:
    """Returns the marginal step comparing the trace over the last `K - 1`
    subsystems with the trace over the last `K`."""
    chain: List[MarginalStep] = marginal_chain(spec)
    t: int = spec.t
    if spec.architecture == 'sequential':
        valid: List[int] = list(range(2, 2 * t + 3, 2))
        index: int = k // 2 - 1
    else:
        valid = [t + 1, 2 * t + 1]
        index = valid.index(k) if k in valid else -1
    if k not in valid:
        raise CombError(f'K = {k} is not a constraint of a {spec.architecture} comb; expected one of {valid}.')
    return chain[index]

def _constraint_matrices(tensor: CoefficientTensor, choice: PermutationChoice,
        architecture: Architecture, k: int) -> Dict[Tuple[int, int], Dict[Label, np.ndarray]]:
    spec: CombSpec = CombSpec(tensor.d, tensor.t, architecture)
    step: MarginalStep = _chain_step(spec, k)
    dims: Tuple[int, int, int] = _step_dims(spec, step)
    out: Dict[Tuple[int, int], Dict[Label, np.ndarray]] = {}
    for label in tensor.labels:
        gram: np.ndarray = _marginal_gram(tensor.causal_block(label, choice.order(architecture)), dims)
        for u, v in zip(*np.nonzero(np.max(np.abs(gram), axis = (2, 3)) > SUPPORT_TOL)):
            out.setdefault((int(u), int(v)), {})[label] = gram[u, v].T
    return out

def constraint_matrices_sequential(tensor: CoefficientTensor, choice: PermutationChoice,
        k: int) -> Dict[Tuple[int, int], Dict[Label, np.ndarray]]:
    """Returns the marginal matrices of the sequential constraint `K`.

    Parameters
    ----------
    tensor : CoefficientTensor
        The coefficients of the combined basis.
    choice : PermutationChoice
        The causal to grouped permutations.
    k : int
        One of `2, 4, ..., 2t+2`; constraint `K` compares the trace over the
        last `K - 1` subsystems with the trace over the last `K`.

    Returns
    -------
    dict[(int, int), dict[Label, numpy.ndarray]]
        For each index pair `(u, v)` with `u = (i_R, x)` and `v = (j_R, y)`
        flattened, the matrices `M^(r)` with `(tr_T C)[u, v] =
        sum_r tr[C^(r) M^(r)]`. Blocks with disjoint supports are omitted.
    """
    return _constraint_matrices(tensor, choice, 'sequential', k)

def constraint_matrices_parallel(tensor: CoefficientTensor, choice: PermutationChoice,
        k: int) -> Dict[Tuple[int, int], Dict[Label, np.ndarray]]:
    """Returns the marginal matrices of the parallel constraint `K`, one of
    `t+1` (the decoder step on all outputs) and `2t+1` (the encoder step on `P`).
    See `constraint_matrices_sequential`."""
    return _constraint_matrices(tensor, choice, 'parallel', k)

def _slot_contraction(weights: np.ndarray, spec: CombSpec, vectors: np.ndarray) -> np.ndarray:
    """Returns `Y[n, i, f, a, alpha] = sum_s v_n[s] W[(i, s, f), a, alpha]`."""
    d: int = spec.d
    tens: np.ndarray = weights.reshape(d, d ** (2 * spec.t), d, *weights.shape[1:])
    return np.einsum('ns,isfaA->nifaA', vectors, tens, optimize = True)

def _objective_coefficients(weights: np.ndarray, spec: CombSpec, observable: np.ndarray,
        vectors: np.ndarray) -> np.ndarray:
    """Returns `g[n, p, q, alpha, beta]`, the coefficient of `C^(r)[alpha, beta]` in
    `N_{U_n}^†(O)[p, q]`."""
    contracted: np.ndarray = _slot_contraction(weights, spec, vectors)
    return np.einsum('nqfaA,gf,npgaB->npqAB', contracted, observable, contracted.conj(),
        optimize = True)

def _objective_blocks(tensor: CoefficientTensor, choice: PermutationChoice,
        architecture: Architecture, unitary: np.ndarray, observable: np.ndarray) -> Dict[Label, np.ndarray]:
    spec: CombSpec = CombSpec(tensor.d, tensor.t, architecture)
    vectors: np.ndarray = slot_vector(spec, np.asarray(unitary, dtype = complex))[None, :]
    obs: np.ndarray = np.asarray(observable, dtype = complex)
    return {label: _objective_coefficients(tensor.causal_block(label, choice.order(architecture)),
        spec, obs, vectors)[0].swapaxes(-1, -2) for label in tensor.labels}

def objective_blocks_sequential(tensor: CoefficientTensor, choice: PermutationChoice,
        unitary: np.ndarray, observable: np.ndarray) -> Dict[Label, np.ndarray]:
    """Returns the objective matrices of a sequential comb at one unitary.

    Parameters
    ----------
    tensor : CoefficientTensor
        The coefficients of the combined basis.
    choice : PermutationChoice
        The causal to grouped permutations.
    unitary : numpy.ndarray
        The inserted unitary `U`.
    observable : numpy.ndarray
        The observable `O`.

    Returns
    -------
    dict[Label, numpy.ndarray]
        Arrays `M[j1, i1]` of shape `(d, d, mult, mult)` with
        `N_U^†(O)[j1, i1] = sum_r tr[C^(r) M^(r)[j1, i1]]`.
    """
    return _objective_blocks(tensor, choice, 'sequential', unitary, observable)

def objective_blocks_parallel(tensor: CoefficientTensor, choice: PermutationChoice,
        unitary: np.ndarray, observable: np.ndarray) -> Dict[Label, np.ndarray]:
    """Returns the objective matrices of a parallel comb at one unitary.
    See `objective_blocks_sequential`."""
    return _objective_blocks(tensor, choice, 'parallel', unitary, observable)

def _compact_rows(a_mat: sparse.csr_matrix, b_vec: np.ndarray) -> Tuple[sparse.csr_matrix, np.ndarray]:
    """Drops empty rows and rows equal to an earlier one up to scaling."""
    a_mat = sparse.csr_matrix(a_mat)
    a_mat.data[np.abs(a_mat.data) < SUPPORT_TOL] = 0
    a_mat.eliminate_zeros()
    seen: set = set()
    kept: List[int] = []
    for row in range(a_mat.shape[0]):
        lo, hi = a_mat.indptr[row], a_mat.indptr[row + 1]
        if lo == hi:
            continue
        vals: np.ndarray = a_mat.data[lo:hi]
        scale: float = vals[np.argmax(np.abs(vals))]
        key: tuple = (a_mat.indices[lo:hi].tobytes(),
            (np.round(vals / scale, _DEDUP_DECIMALS) + 0.0).tobytes(),
            round(b_vec[row] / scale, _DEDUP_DECIMALS) + 0.0)
        if key not in seen:
            seen.add(key)
            kept.append(row)
    return a_mat[kept], b_vec[kept]

def block_variables(sources: Sequence[CausalBlock]) -> List[VariableBlock]:
    """Returns the packed Hermitian variable blocks of the causal block arrays."""
    return pack_blocks([VariableBlock(f'block{idx}', 'psd', 2 * weights.shape[2], hermitian = True)
        for idx, (_, weights) in enumerate(sources)])

def constraint_rows(spec: CombSpec, sources: Sequence[CausalBlock], variables: Sequence[VariableBlock],
        num_vars: int, threads: int = 1, logger: Logger = SILENT) -> Tuple[sparse.csr_matrix, np.ndarray]:
    """Returns the real equality rows of the marginal chain and the trace condition.

    Parameters
    ----------
    spec : CombSpec
        The shape of the comb.
    sources : Sequence[(Label, numpy.ndarray)]
        The causal array of every block.
    variables : Sequence[VariableBlock]
        The variable block of every source, in the same order.
    num_vars : int
        The length of the variable vector.
    threads : int (default 1)
        The maximum number of workers over blocks.
    logger : Logger (default `SILENT`)
        A logger reporting every marginal step.

    Returns
    -------
    (scipy.sparse.csr_matrix, numpy.ndarray)
        The deduplicated rows and right-hand side.
    """
    pieces: List[sparse.csr_matrix] = []
    rhs: List[np.ndarray] = []
    for index, step in enumerate(marginal_chain(spec)):
        dims: Tuple[int, int, int] = _step_dims(spec, step)
        size: int = dims[0] * dims[1]

        def _block_rows(item: Tuple[CausalBlock, VariableBlock]) -> Tuple[np.ndarray, sparse.coo_matrix,
                sparse.coo_matrix] | None:
            (_, weights), block = item
            functionals: np.ndarray = _marginal_functionals(_marginal_gram(weights, dims), dims)
            support: np.ndarray = np.triu(np.max(np.abs(functionals), axis = (2, 3)) > SUPPORT_TOL)
            rows, cols = np.nonzero(support)
            if rows.size == 0:
                return None
            real, imag = hermitian_functionals(block, functionals[rows, cols], num_vars)
            return rows * size + cols, real.tocoo(), imag.tocoo()

        results = [res for res in parallel_map(_block_rows, list(zip(sources, variables)), threads)
            if res is not None]
        pairs: np.ndarray = np.unique(np.concatenate([res[0] for res in results])) if results \
            else np.zeros(0, dtype = np.int64)
        position: Dict[int, int] = {int(pair): idx for idx, pair in enumerate(pairs)}
        for part in (1, 2):
            row_idx: List[np.ndarray] = []
            col_idx: List[np.ndarray] = []
            vals: List[np.ndarray] = []
            for res in results:
                mapped: np.ndarray = np.asarray([position[int(pair)] for pair in res[0]], dtype = np.int64)
                row_idx.append(mapped[res[part].row])
                col_idx.append(res[part].col)
                vals.append(res[part].data)
            pieces.append(sparse.csr_matrix((np.concatenate(vals) if vals else np.zeros(0),
                (np.concatenate(row_idx) if row_idx else np.zeros(0, dtype = np.int64),
                np.concatenate(col_idx) if col_idx else np.zeros(0, dtype = np.int64))),
                shape = (pairs.size, num_vars)))
            rhs.append(np.zeros(pairs.size))
        logger.progress('constraints', step = index + 1, removed = ','.join(step.removed),
            pairs = pairs.size)

    ## Trace normalization
    trace_row: sparse.csr_matrix = sparse.csr_matrix((1, num_vars))
    for (_, weights), block in zip(sources, variables):
        dim, mult = weights.shape[1], weights.shape[2]
        real, _ = hermitian_functionals(block, dim * np.eye(mult)[None, :, :], num_vars)
        trace_row = trace_row + real
    pieces.append(sparse.csr_matrix(trace_row))
    rhs.append(np.asarray([float(spec.d ** (spec.t + 1))]))

    a_mat, b_vec = _compact_rows(sparse.vstack(pieces).tocsr(), np.concatenate(rhs))
    logger.debug(f'Kept {a_mat.shape[0]} distinct equality rows.')
    return a_mat, b_vec

def objective_rows(spec: CombSpec, sources: Sequence[CausalBlock], variables: Sequence[VariableBlock],
        num_vars: int, observable: np.ndarray, unitaries: Sequence[np.ndarray],
        threads: int = 1) -> Tuple[sparse.csr_matrix, np.ndarray]:
    """Returns the affine residual `N_U^†(O) - U O U^†` at every sampled unitary.

    Returns
    -------
    (scipy.sparse.csr_matrix, numpy.ndarray)
        The stacked rows `G` and offsets `h`. Sample `n` owns rows
        `2 d^2 n` to `2 d^2 (n + 1)`: the real parts of the `d^2` entries in
        row-major order, then the imaginary parts.
    """
    d: int = spec.d
    count: int = len(unitaries)
    obs: np.ndarray = np.asarray(observable, dtype = complex)
    vectors: np.ndarray = np.stack([slot_vector(spec, unitary) for unitary in unitaries])

    def _block_rows(item: Tuple[CausalBlock, VariableBlock]) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
        (_, weights), block = item
        coeffs: np.ndarray = _objective_coefficients(weights, spec, obs, vectors)
        size: int = coeffs.shape[-1]
        return hermitian_functionals(block, coeffs.reshape(-1, size, size), num_vars)

    real: sparse.csr_matrix = sparse.csr_matrix((count * d * d, num_vars))
    imag: sparse.csr_matrix = sparse.csr_matrix((count * d * d, num_vars))
    for part_re, part_im in parallel_map(_block_rows, list(zip(sources, variables)), threads):
        real = real + part_re
        imag = imag + part_im

    entries: np.ndarray = np.arange(d * d)
    order: np.ndarray = np.concatenate([np.concatenate([n * d * d + entries, (count + n) * d * d + entries])
        for n in range(count)]) if count else np.zeros(0, dtype = np.int64)
    g_mat: sparse.csr_matrix = sparse.vstack([real, imag]).tocsr()[order]
    targets: List[np.ndarray] = [unitary @ obs @ unitary.conj().T for unitary in unitaries]
    h_vec: np.ndarray = np.concatenate([np.concatenate([target.real.ravel(), target.imag.ravel()])
        for target in targets]) if count else np.zeros(0)
    return g_mat, h_vec

def split_residuals(g_mat: sparse.csr_matrix, h_vec: np.ndarray,
        rows_per_sample: int) -> List[Tuple[sparse.csr_matrix, np.ndarray]]:
    """Splits stacked residual rows into one affine map per sample."""
    return [(g_mat[start:start + rows_per_sample], h_vec[start:start + rows_per_sample])
        for start in range(0, g_mat.shape[0], rows_per_sample)]

class ReducedProblem:
    """The reduced program: one Hermitian block `C^(r)` per irrep, the equality rows
    over their entries, and the sampled objective residuals."""

    def __init__(self, spec: CombSpec, observable: Observable, labels: Sequence[Label],
            dims: Sequence[int], mults: Sequence[int], a_mat: sparse.spmatrix, b_vec: np.ndarray,
            g_mat: sparse.spmatrix, h_vec: np.ndarray, seed: int, choice: PermutationChoice | None = None,
            tensor: CoefficientTensor | None = None) -> None:
        """
        Parameters
        ----------
        spec : CombSpec
            The shape of the comb.
        observable : Observable
            The observable.
        labels : Sequence[Label]
            The irrep label of every block.
        dims : Sequence[int]
            The irrep dimension of every block.
        mults : Sequence[int]
            The multiplicity (block side) of every block.
        a_mat : scipy.sparse.spmatrix
            The equality rows over the packed block entries.
        b_vec : numpy.ndarray
            The equality right-hand side.
        g_mat : scipy.sparse.spmatrix
            The stacked objective residual rows.
        h_vec : numpy.ndarray
            The stacked objective residual offsets.
        seed : int
            The seed of the sampled unitaries.
        choice : PermutationChoice | None (default `None`)
            The permutations, or the defaults when `None`.
        tensor : CoefficientTensor | None (default `None`)
            The coefficients of the basis, rebuilt from the observable when `None`.
        """
        self.spec: CombSpec = spec
        self.observable: Observable = observable
        self.labels: List[Label] = list(labels)
        self.dims: List[int] = [int(val) for val in dims]
        self.mults: List[int] = [int(val) for val in mults]
        self.blocks: List[VariableBlock] = pack_blocks([VariableBlock(f'block{idx}', 'psd', 2 * mult,
            hermitian = True) for idx, mult in enumerate(self.mults)])
        self.a_mat: sparse.csr_matrix = sparse.csr_matrix(a_mat)
        self.b_vec: np.ndarray = np.asarray(b_vec, dtype = float)
        self.g_mat: sparse.csr_matrix = sparse.csr_matrix(g_mat)
        self.h_vec: np.ndarray = np.asarray(h_vec, dtype = float)
        self.seed: int = seed
        self.choice: PermutationChoice = default_permutations(spec.t) if choice is None else choice
        if tensor is not None:
            self.__dict__['tensor'] = tensor

    @cached_property
    def tensor(self) -> CoefficientTensor:
        """The coefficients of the combined basis."""
        basis = combined_schur_basis(self.observable.decomposition, self.spec.t)
        return coefficient_tensor(basis, self.spec.d, self.spec.t)

    @property
    def num_vars(self) -> int:
        """The length of the packed block entries."""
        return self.blocks[-1].stop

    @property
    def num_variables(self) -> int:
        """The number of complex block entries, `sum mult^2`."""
        return sum(mult * mult for mult in self.mults)

    @property
    def rows_per_sample(self) -> int:
        """The number of real residual rows of one sample."""
        return 2 * self.spec.d ** 2

    @property
    def num_samples(self) -> int:
        """The number of sampled unitaries."""
        return self.g_mat.shape[0] // self.rows_per_sample

    @property
    def residual_maps(self) -> List[Tuple[sparse.csr_matrix, np.ndarray]]:
        """The affine residual of every sample."""
        return split_residuals(self.g_mat, self.h_vec, self.rows_per_sample)

    def block_of(self, label: Label) -> VariableBlock:
        """Returns the variable block of an irrep."""
        return self.blocks[self.labels.index(label)]

    def __repr__(self) -> str:
        return f'ReducedProblem({self.spec}, blocks={len(self.blocks)}, variables={self.num_variables}, ' \
            + f'rows={self.a_mat.shape[0]}, samples={self.num_samples})'

def causal_blocks(tensor: CoefficientTensor, order: Sequence[int]) -> List[CausalBlock]:
    """Returns the causal array of every block of the basis."""
    return [(label, tensor.causal_block(label, tuple(order))) for label in tensor.labels]

def assemble_reduced(observable: Observable | np.ndarray, t: int, architecture: Architecture = 'sequential',
        samples: int = 2000, seed: int = 42, choice: PermutationChoice | None = None,
        threads: int = 1, logger: Logger = SILENT) -> ReducedProblem:
    """Assembles the reduced program of a comb with `t` slots.

    Parameters
    ----------
    observable : Observable | numpy.ndarray
        The Hermitian observable.
    t : int
        The number of slots.
    architecture : 'sequential' | 'parallel' (default 'sequential')
        The causal structure of the comb.
    samples : int (default 2000)
        The number of Haar-random unitaries in the objective.
    seed : int (default 42)
        The seed of the unitary samples.
    choice : PermutationChoice | None (default `None`)
        The permutations, or the defaults when `None`.
    threads : int (default 1)
        The maximum number of workers.
    logger : Logger (default `SILENT`)
        A logger for reporting on progress.

    Returns
    -------
    ReducedProblem
        The reduced program.
    """
    obs: Observable = observable if isinstance(observable, Observable) else Observable(observable)
    spec: CombSpec = CombSpec(obs.dim, t, architecture)
    if samples < 1:
        raise CombError(f'At least one sample is needed, found {samples}.')
    choice = default_permutations(t) if choice is None else choice
    basis = combined_schur_basis(obs.decomposition, t, logger = logger)
    tensor: CoefficientTensor = coefficient_tensor(basis, spec.d, t)
    sources: List[CausalBlock] = causal_blocks(tensor, choice.order(architecture))
    variables: List[VariableBlock] = block_variables(sources)
    num_vars: int = variables[-1].stop
    logger.debug(f'Reduced program over {len(variables)} blocks, {basis.num_variables()} variables.')

    a_mat, b_vec = constraint_rows(spec, sources, variables, num_vars, threads, logger)
    logger.progress('sampling', samples = samples, seed = seed)
    g_mat, h_vec = objective_rows(spec, sources, variables, num_vars, obs.matrix,
        sample_unitaries(spec.d, samples, seed), threads)
    return ReducedProblem(spec, obs, [label for label, _ in sources],
        [weights.shape[1] for _, weights in sources], [weights.shape[2] for _, weights in sources],
        a_mat, b_vec, g_mat, h_vec, seed, choice, tensor)

def reduced_to_conic(problem: ReducedProblem) -> ConicProblem:
    """Returns the epigraph form of the reduced program."""
    return epigraph_formulate(problem.blocks, problem.a_mat, problem.b_vec, problem.residual_maps,
        name = f'reduced-{problem.spec.architecture}-d{problem.spec.d}-t{problem.spec.t}')
