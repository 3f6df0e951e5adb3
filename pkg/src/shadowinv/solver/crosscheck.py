"""A script containing the optional re-solve of a conic problem with cvxpy.
"""

from typing import Any, List, Tuple
from shadowinv.module import lazy_import
from shadowinv.solver.problem import ConicProblem

def solve_with_cvxpy(problem: ConicProblem, solver: str | None = None,
        **kwargs: Any) -> Tuple[str, float]:
    """Solves the problem with cvxpy, as an independent check of the internal solver.

    Parameters
    ----------
    problem : ConicProblem
        The problem to solve.
    solver : str | None (default `None`)
        The cvxpy solver name, or cvxpy's choice when `None`.
    **kwargs : Any
        Forwarded to `cvxpy.Problem.solve`.

    Returns
    -------
    (str, float)
        The cvxpy status and optimal value.

    Raises
    ------
    MissingModuleError
        If cvxpy is not installed.
    """
    cp = lazy_import('cvxpy', 'crosscheck')
    x = cp.Variable(problem.num_vars)
    constraints: List[Any] = []
    if problem.a_mat.shape[0]:
        constraints.append(problem.a_mat @ x == problem.b_vec)
    for block in problem.psd_blocks:
        mat = cp.reshape(x[block.offset:block.stop], (block.size, block.size), order = 'C')
        constraints.append((mat + mat.T) / 2 >> 0)
    for cone in problem.soc:
        constraints.append(cp.SOC(x[cone.epigraph],
            problem.g_mat[cone.start:cone.stop] @ x - problem.h_vec[cone.start:cone.stop]))
    program = cp.Problem(cp.Minimize(problem.c_vec @ x), constraints)
    value = program.solve(solver = solver, **kwargs)
    return str(program.status), float(value)
