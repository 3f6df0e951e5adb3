"""A script containing the operator-splitting solver for conic problems.

The iterate is the stacked vector `w = (x, s)` of the variables and the
slacks `s = G' x - h'`, where `G'` prepends the epigraph entry to every
second-order cone. Each iteration projects onto the affine set of `w`
(the equalities and the slack definition) with a cached factorization,
then onto the cone product, and updates the scaled dual.
"""

import time
from typing import Dict, List, Tuple
import numpy as np
from scipy import sparse
from scipy.linalg import cho_factor, cho_solve, qr
from shadowinv.log import Logger, SILENT
from shadowinv.solver.problem import (
    ConicProblem, InfeasibleError, ProblemError, SolveResult, SolverError, SolverSettings, Status
)
from shadowinv.solver.cones import ConeLayout

_TIE_TOL: float = 1e-12
"""The relative difference below which two coefficients of a row are equal."""

_RANK_TOL: float = 1e-9
"""The relative magnitude below which a pivot of the equality rows is dropped."""

_CONSISTENCY_TOL: float = 1e-7
"""The residual above which the equality rows are declared inconsistent."""

_DIVERGENCE: float = 1e12
"""The dual norm above which the problem is declared likely infeasible."""

_DENSE_FILL: float = 0.2
"""The fill ratio above which a sparse operator is stored densely."""

_RHO_TRIGGER: float = 5.0
"""The ratio of the residuals beyond which the step size is rebalanced."""

_RHO_BOUNDS: Tuple[float, float] = (1e-6, 1e6)
"""The range the step size is kept within."""

def _rebalance(rho: float, primal: float, dual: float) -> Tuple[float, float]:
    """Returns the rebalanced step size and the factor the scaled dual is
    multiplied by to keep the unscaled dual unchanged."""
    ratio: float = float(np.sqrt(primal / max(dual, np.finfo(float).tiny)))
    if 1 / _RHO_TRIGGER <= ratio <= _RHO_TRIGGER:
        return rho, 1.0
    new_rho: float = float(np.clip(rho * ratio, *_RHO_BOUNDS))
    return new_rho, rho / new_rho

def _dense_if_filled(mat: sparse.spmatrix) -> sparse.csr_matrix | np.ndarray:
    mat = sparse.csr_matrix(mat)
    size: int = mat.shape[0] * mat.shape[1]
    return mat.toarray() if size and mat.nnz > _DENSE_FILL * size else mat

class _Presolve:
    """The elimination of equality rows that tie one variable to another or
    force one to zero: `x = T y` with `T` having one signed entry per row."""

    def __init__(self, a_mat: sparse.csr_matrix, b_vec: np.ndarray) -> None:
        num_vars: int = a_mat.shape[1]
        self._parent: np.ndarray = np.arange(num_vars)
        self._parity: np.ndarray = np.ones(num_vars, dtype = np.int64)
        zero: np.ndarray = np.zeros(num_vars, dtype = bool)
        rest: List[int] = []

        for row in range(a_mat.shape[0]):
            lo, hi = a_mat.indptr[row], a_mat.indptr[row + 1]
            cols: np.ndarray = a_mat.indices[lo:hi]
            vals: np.ndarray = a_mat.data[lo:hi]
            keep: np.ndarray = vals != 0
            cols, vals = cols[keep], vals[keep]
            rhs: float = b_vec[row]
            if cols.size == 0:
                if abs(rhs) > _CONSISTENCY_TOL:
                    raise InfeasibleError(f'Equality row {row} reads 0 = {rhs}.')
            elif cols.size == 1 and rhs == 0:
                zero[self._find(cols[0])] = True
            elif cols.size == 2 and rhs == 0 \
                    and abs(abs(vals[0]) - abs(vals[1])) <= _TIE_TOL * abs(vals[0]):
                # x_a = sign * x_b
                sign: int = -1 if vals[0] * vals[1] > 0 else 1
                root_a, root_b = self._find(cols[0]), self._find(cols[1])
                link: int = self._parity[cols[0]] * sign * self._parity[cols[1]]
                if root_a == root_b:
                    if link != 1:
                        zero[root_a] = True
                else:
                    self._parent[root_a] = root_b
                    self._parity[root_a] = link
                    zero[root_b] |= zero[root_a]
            else:
                rest.append(row)

        roots: np.ndarray = np.asarray([self._find(idx) for idx in range(num_vars)], dtype = np.int64)
        live: np.ndarray = ~zero[roots]
        columns: Dict[int, int] = {}
        col_of: np.ndarray = np.full(num_vars, -1)
        for idx in np.flatnonzero(live):
            col_of[idx] = columns.setdefault(int(roots[idx]), len(columns))
        rows: np.ndarray = np.flatnonzero(live)
        self.transform: sparse.csr_matrix = sparse.csr_matrix(
            (self._parity[rows].astype(float), (rows, col_of[rows])),
            shape = (num_vars, len(columns)))
        self.diag: np.ndarray = np.asarray(
            self.transform.multiply(self.transform).sum(axis = 0)).ravel()
        self.rest: np.ndarray = np.asarray(rest, dtype = np.int64)

    def _find(self, idx: int) -> int:
        path: List[int] = []
        while self._parent[idx] != idx:
            path.append(idx)
            idx = self._parent[idx]
        acc: int = 1
        for node in reversed(path):
            acc *= self._parity[node]
            self._parity[node] = acc
            self._parent[node] = idx
        return idx

class _NormalFactor:
    """A factorization of `H = D + G^T G`, diagonal on the uncoupled columns
    and dense Cholesky on the rest."""

    def __init__(self, h_mat: sparse.spmatrix) -> None:
        h_mat = sparse.csr_matrix(h_mat)
        diagonal: np.ndarray = h_mat.diagonal()
        off: sparse.csr_matrix = sparse.csr_matrix(h_mat - sparse.diags(diagonal))
        off.eliminate_zeros()
        coupled: np.ndarray = np.zeros(h_mat.shape[0], dtype = bool)
        coupled[off.nonzero()[1]] = True
        self.coupled: np.ndarray = np.flatnonzero(coupled)
        self.uncoupled: np.ndarray = np.flatnonzero(~coupled)
        self.diag_vals: np.ndarray = diagonal[self.uncoupled]
        if np.any(self.diag_vals <= 0):
            raise SolverError('The normal matrix has a non-positive diagonal entry.')
        self.factor = None
        if self.coupled.size:
            try:
                self.factor = cho_factor(h_mat[self.coupled][:, self.coupled].toarray())
            except np.linalg.LinAlgError as err:
                raise SolverError('The normal matrix is not positive definite.') from err

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        out: np.ndarray = np.empty_like(rhs, dtype = float)
        shape: Tuple[int, ...] = (-1,) + (1,) * (rhs.ndim - 1)
        out[self.uncoupled] = rhs[self.uncoupled] / self.diag_vals.reshape(shape)
        if self.factor is not None:
            out[self.coupled] = cho_solve(self.factor, rhs[self.coupled])
        return out

def _independent_rows(a_dense: np.ndarray, b_vec: np.ndarray) -> np.ndarray:
    """Returns the indices of a maximal independent subset of the rows,
    raising if the dropped rows are inconsistent with the kept ones."""
    if a_dense.shape[0] == 0:
        return np.zeros(0, dtype = np.int64)
    r_mat, pivots = qr(a_dense.T, mode = 'r', pivoting = True)
    diag: np.ndarray = np.abs(np.diag(r_mat))
    rank: int = int(np.sum(diag > _RANK_TOL * diag[0])) if diag.size and diag[0] > 0 else 0
    particular, *_ = np.linalg.lstsq(a_dense, b_vec, rcond = None)
    if (residual := np.linalg.norm(a_dense @ particular - b_vec)) \
            > _CONSISTENCY_TOL * (1 + np.linalg.norm(b_vec)):
        raise InfeasibleError(f'The equality rows are inconsistent (residual {residual:.3e}).')
    return np.sort(pivots[:rank])

def _cone_rows(problem: ConicProblem) -> Tuple[sparse.csr_matrix, np.ndarray, List[int]]:
    """Stacks the epigraph entry above the rows of every second-order cone."""
    num_rows: int = problem.g_mat.shape[0]
    position: np.ndarray = np.full(num_rows, -1)
    tau_rows: List[int] = []
    lengths: List[int] = []
    start: int = 0
    for cone in problem.soc:
        if np.any(position[cone.start:cone.stop] >= 0):
            raise ProblemError(f'Second-order cones overlap at rows {cone.start}:{cone.stop}.')
        tau_rows.append(start)
        position[cone.start:cone.stop] = start + 1 + np.arange(cone.stop - cone.start)
        lengths.append(cone.length)
        start += cone.length
    if np.any(position < 0):
        raise ProblemError('Every cone row must belong to a second-order cone.')
    g_coo: sparse.coo_matrix = problem.g_mat.tocoo()
    rows: np.ndarray = np.concatenate([position[g_coo.row], np.asarray(tau_rows, dtype = np.int64)])
    cols: np.ndarray = np.concatenate([g_coo.col, [cone.epigraph for cone in problem.soc]]).astype(np.int64)
    vals: np.ndarray = np.concatenate([g_coo.data, np.ones(len(tau_rows))])
    g_full: sparse.csr_matrix = sparse.csr_matrix((vals, (rows, cols)),
        shape = (start, problem.num_vars))
    h_full: np.ndarray = np.zeros(start)
    h_full[position] = problem.h_vec
    return g_full, h_full, lengths

def solve(problem: ConicProblem, settings: SolverSettings | None = None,
        logger: Logger = SILENT) -> SolveResult:
    """Solves a conic problem by operator splitting.

    Parameters
    ----------
    problem : ConicProblem
        The problem to solve.
    settings : SolverSettings | None (default `None`)
        The solver settings, or the defaults when `None`.
    logger : Logger (default `SILENT`)
        A logger reporting every convergence check.

    Returns
    -------
    SolveResult
        The result. When the tolerances are not met within the iteration
        limit, the status is 'maxIter' and the best checked iterate is
        returned.

    Raises
    ------
    InfeasibleError
        If the equality rows are inconsistent.
    SolverError
        If the affine projection cannot be factorized.
    """
    settings = SolverSettings() if settings is None else settings
    begin: float = time.perf_counter()

    ## Presolve
    presolve: _Presolve = _Presolve(problem.a_mat, problem.b_vec)
    transform: sparse.csr_matrix = presolve.transform
    transform_t: sparse.csr_matrix = transform.T.tocsr()
    a_red: np.ndarray = (problem.a_mat[presolve.rest] @ transform).toarray()
    b_red: np.ndarray = problem.b_vec[presolve.rest].copy()
    if settings.scaling and a_red.shape[0]:
        norms: np.ndarray = np.linalg.norm(a_red, axis = 1)
        norms[norms == 0] = 1
        a_red /= norms[:, None]
        b_red /= norms
    kept: np.ndarray = _independent_rows(a_red, b_red)
    a_red, b_red = a_red[kept], b_red[kept]
    c_scale: float = float(np.max(np.abs(problem.c_vec))) if settings.scaling else 1.0
    c_scale = c_scale if c_scale > 0 else 1.0
    c_bar: np.ndarray = problem.c_vec / c_scale
    logger.debug(f'Presolve kept {transform.shape[1]} of {problem.num_vars} variables '
        + f'and {a_red.shape[0]} of {problem.a_mat.shape[0]} equality rows.')

    ## Factorization of the affine projection
    g_full, h_full, lengths = _cone_rows(problem)
    g_red: sparse.csr_matrix = (g_full @ transform).tocsr()
    factor: _NormalFactor = _NormalFactor(sparse.diags(presolve.diag) + g_red.T @ g_red)
    g_op = _dense_if_filled(g_red)
    g_op_t = g_op.T if isinstance(g_op, np.ndarray) else g_op.T.tocsr()
    kkt_factor = None
    h_inv_at: np.ndarray = np.zeros((transform.shape[1], 0))
    if a_red.shape[0]:
        h_inv_at = factor.solve(a_red.T.copy())
        try:
            kkt_factor = cho_factor(a_red @ h_inv_at)
        except np.linalg.LinAlgError as err:
            raise SolverError('The reduced equality system is singular.') from err
    cones: ConeLayout = ConeLayout(problem.blocks, lengths)

    ## Iteration
    num_vars, num_slack = problem.num_vars, h_full.size
    z_x, u_x = np.zeros(num_vars), np.zeros(num_vars)
    z_s, u_s = np.zeros(num_slack), np.zeros(num_slack)
    rho, alpha = settings.rho, settings.alpha
    kappa: np.ndarray = np.zeros(a_red.shape[0])
    c_red_norm: float = float(np.linalg.norm(transform_t @ c_bar))
    merit: List[float] = []
    status: Status = 'maxIter'
    best: Tuple[float, np.ndarray, Tuple[float, float, float], float] | None = None
    residuals: Tuple[float, float, float] = (np.inf, np.inf, np.inf)
    dual_objective: float = np.nan
    iteration: int = 0

    for iteration in range(1, settings.max_iter + 1):
        v_x: np.ndarray = z_x - u_x - c_bar / rho
        v_s: np.ndarray = z_s - u_s
        rhs: np.ndarray = transform_t @ v_x + g_op_t @ (v_s + h_full)
        y_vec: np.ndarray = factor.solve(rhs)
        if kkt_factor is not None:
            kappa = cho_solve(kkt_factor, b_red - a_red @ y_vec)
            y_vec = y_vec + h_inv_at @ kappa
        x_aff: np.ndarray = transform @ y_vec
        s_aff: np.ndarray = g_op @ y_vec - h_full

        x_hat: np.ndarray = alpha * x_aff + (1 - alpha) * z_x
        s_hat: np.ndarray = alpha * s_aff + (1 - alpha) * z_s
        checking: bool = iteration % settings.check_interval == 0 or iteration == settings.max_iter
        if checking:
            prev_z, prev_u = np.concatenate([z_x, z_s]), np.concatenate([u_x, u_s])
        z_x = cones.project_variables(x_hat + u_x, settings.threads)
        z_s = cones.project_slacks(s_hat + u_s)
        u_x += x_hat - z_x
        u_s += s_hat - z_s
        if not checking:
            continue

        ## Convergence check
        merit.append(float(np.sum((np.concatenate([z_x, z_s]) - prev_z) ** 2)
            + np.sum((np.concatenate([u_x, u_s]) - prev_u) ** 2)))
        mu_x, mu_s = -rho * u_x, -rho * u_s
        nu: np.ndarray = rho * kappa
        primal: float = float(np.sqrt(np.sum((x_aff - z_x) ** 2) + np.sum((s_aff - z_s) ** 2))) \
            / (1 + max(np.sqrt(np.sum(x_aff ** 2) + np.sum(s_aff ** 2)),
                np.sqrt(np.sum(z_x ** 2) + np.sum(z_s ** 2))))
        stationarity: np.ndarray = transform_t @ (c_bar - mu_x) - g_op_t @ mu_s - a_red.T @ nu
        dual: float = float(np.linalg.norm(stationarity)) / (1 + c_red_norm)
        p_obj: float = float(c_bar @ z_x)
        d_obj: float = float(b_red @ nu + h_full @ mu_s)
        gap: float = abs(p_obj - d_obj) / (1 + abs(p_obj) + abs(d_obj))
        residuals = (primal, dual, gap)
        dual_objective = d_obj * c_scale
        logger.progress('solver', iteration = iteration, primal = f'{primal:.3e}',
            dual = f'{dual:.3e}', gap = f'{gap:.3e}', rho = f'{rho:.3g}')

        worst: float = max(primal / settings.eps_primal, dual / settings.eps_dual, gap / settings.eps_gap)
        if best is None or worst < best[0]:
            best = (worst, z_x.copy(), residuals, dual_objective)
        if worst < 1:
            status = 'optimal'
            break
        if np.sqrt(np.sum(mu_x ** 2) + np.sum(mu_s ** 2)) > _DIVERGENCE:
            status = 'infeasibleLikely'
            break

        if settings.adaptive_rho:
            rho, scale = _rebalance(rho, primal, dual)
            u_x *= scale
            u_s *= scale

    x_out: np.ndarray = z_x
    if status == 'maxIter' and best is not None:
        _, x_out, residuals, dual_objective = best
    elapsed: float = time.perf_counter() - begin
    logger.debug(f'Solver finished with status {status} after {iteration} iterations in {elapsed:.2f}s.')
    return SolveResult(status, float(problem.c_vec @ x_out), float(dual_objective), x_out,
        problem.block_values(x_out), residuals, iteration, merit, settings, elapsed)
