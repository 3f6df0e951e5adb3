"""A script containing the unreduced semidefinite program over the full Choi
operator of a comb, used as a reference for the reduced program at small
sizes.
"""

from typing import List
import numpy as np
from shadowinv.log import Logger, SILENT
from shadowinv.tensor import sample_unitaries
from shadowinv.comb.model import Architecture, CombChoi, CombError, CombSpec, Observable
from shadowinv.solver.problem import ConicProblem, SolveResult, VariableBlock, epigraph_formulate, \
    pack_blocks
from shadowinv.sdp.reduced import CausalBlock, constraint_rows, objective_rows, \
    split_residuals

FULL_BLOCK: str = 'choi'
"""The label of the single block of the unreduced program."""

DEFAULT_SIZE_CAP: int = 4096
"""The largest number of Choi operator rows assembled by default."""

class SizeCapError(ValueError):
    """Raised when an unreduced program would exceed the size cap."""

def check_size_cap(spec: CombSpec, size_cap: int = DEFAULT_SIZE_CAP) -> None:
    """Raises a `SizeCapError` when the Choi operator of the comb has more than
    `size_cap` rows."""
    if spec.total_dim > size_cap:
        raise SizeCapError(f'The full Choi operator has {spec.total_dim} rows, above the cap of '
            + f'{size_cap}; use the reduced program instead.')

def full_blocks(spec: CombSpec) -> List[CausalBlock]:
    """Returns the unreduced program as one block: the identity array of side `d^(2t+2)`."""
    side: int = spec.total_dim
    return [(FULL_BLOCK, np.eye(side).reshape(side, 1, side))]

def assemble_full(observable: Observable | np.ndarray, t: int, architecture: Architecture = 'sequential',
        samples: int = 2000, seed: int = 42, size_cap: int = DEFAULT_SIZE_CAP, threads: int = 1,
        logger: Logger = SILENT) -> ConicProblem:
    """Assembles the unreduced program in epigraph form.

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
        The seed of the unitary samples, shared with the reduced program.
    size_cap : int (default 4096)
        The largest number of Choi operator rows `d^(2t+2)` allowed.
    threads : int (default 1)
        The maximum number of workers.
    logger : Logger (default `SILENT`)
        A logger for reporting on progress.

    Returns
    -------
    ConicProblem
        The program with a Hermitian block 'choi' holding the Choi operator.

    Raises
    ------
    SizeCapError
        If the Choi operator has more than `size_cap` rows.
    """
    obs: Observable = observable if isinstance(observable, Observable) else Observable(observable)
    spec: CombSpec = CombSpec(obs.dim, t, architecture)
    check_size_cap(spec, size_cap)
    if samples < 1:
        raise CombError(f'At least one sample is needed, found {samples}.')

    sources: List[CausalBlock] = full_blocks(spec)
    variables: List[VariableBlock] = pack_blocks([VariableBlock(FULL_BLOCK, 'psd', 2 * spec.total_dim,
        hermitian = True)])
    num_vars: int = variables[-1].stop
    a_mat, b_vec = constraint_rows(spec, sources, variables, num_vars, threads, logger)
    logger.progress('sampling', samples = samples, seed = seed)
    g_mat, h_vec = objective_rows(spec, sources, variables, num_vars, obs.matrix,
        sample_unitaries(spec.d, samples, seed), threads)
    return epigraph_formulate(variables, a_mat, b_vec, split_residuals(g_mat, h_vec, 2 * spec.d ** 2),
        name = f'full-{architecture}-d{spec.d}-t{t}')

def choi_from_result(spec: CombSpec, result: SolveResult) -> CombChoi:
    """Returns the comb held by the 'choi' block of a solved unreduced program."""
    return CombChoi(spec, result.block_values[FULL_BLOCK])
