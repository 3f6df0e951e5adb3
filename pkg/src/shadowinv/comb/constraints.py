"""A script containing the validation of comb Choi operators against the
positivity, trace, and marginal chain constraints.
"""

from typing import Any, Dict, List, Tuple
import numpy as np
from shadowinv.tensor import IndexedOperator, min_eigenvalue
from shadowinv.comb.model import CombChoi, CombError, CombSpec, MarginalStep, marginal_chain

DEFAULT_COMB_TOL: float = 1e-8
"""The default tolerance of the comb constraint suite."""

def marginal_residual(op: IndexedOperator, step: MarginalStep) -> float:
    """Returns `max |tr_T C - tr_{X T} C ⊗ I_X / d_X|` for one step of the chain.

    The kept, removed, and traced subsystems must be contiguous runs in the
    operator's layout, in that order.
    """
    kept_dim: int = op.dim_of(step.kept) if step.kept else 1
    removed_dim: int = op.dim_of(step.removed)
    traced_dim: int = op.dim_of(step.traced) if step.traced else 1
    tens: np.ndarray = op.matrix.reshape(kept_dim, removed_dim, traced_dim,
        kept_dim, removed_dim, traced_dim)
    partial: np.ndarray = np.einsum('axkbyk->axby', tens)
    marginal: np.ndarray = np.einsum('azbz->ab', partial)
    expected: np.ndarray = np.einsum('ab,xy->axby', marginal, np.eye(removed_dim)) / removed_dim
    return float(np.max(np.abs(partial - expected)))

class CombReport:
    """The outcome of checking a Choi operator against the comb constraints."""

    def __init__(self, architecture: str, min_eigenvalue: float, hermiticity: float,
            marginals: List[Tuple[str, float]], trace_residual: float,
            tol: float = DEFAULT_COMB_TOL) -> None:
        """
        Parameters
        ----------
        architecture : str
            The architecture checked against.
        min_eigenvalue : float
            The smallest eigenvalue of the Hermitian part.
        hermiticity : float
            The largest entry of `C - C^†`.
        marginals : list[(str, float)]
            The name and residual of each marginal step.
        trace_residual : float
            `|tr C - d^(t+1)|`.
        tol : float (default 1e-8)
            The tolerance of every check.
        """
        self.architecture: str = architecture
        self.min_eigenvalue: float = min_eigenvalue
        self.hermiticity: float = hermiticity
        self.marginals: List[Tuple[str, float]] = marginals
        self.trace_residual: float = trace_residual
        self.tol: float = tol

    @property
    def max_marginal_residual(self) -> float:
        """The largest residual over the marginal chain."""
        return max((residual for _, residual in self.marginals), default = 0.0)

    @property
    def valid(self) -> bool:
        """Whether every check passes within tolerance."""
        return self.min_eigenvalue >= -self.tol and self.hermiticity <= self.tol \
            and self.max_marginal_residual <= self.tol and self.trace_residual <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        """Returns the report as a JSON-serializable dictionary."""
        return {
            'architecture': self.architecture,
            'valid': self.valid,
            'tolerance': self.tol,
            'min_eigenvalue': self.min_eigenvalue,
            'hermiticity_residual': self.hermiticity,
            'trace_residual': self.trace_residual,
            'marginal_residuals': [{'step': name, 'residual': residual}
                for name, residual in self.marginals]
        }

def _validate(comb: CombChoi, architecture: str, tol: float) -> CombReport:
    spec: CombSpec = comb.spec
    if spec.architecture != architecture:
        raise CombError(f'Expected a {architecture} comb layout, found {spec.architecture}.')
    matrix: np.ndarray = comb.matrix
    op: IndexedOperator = comb.operator
    return CombReport(
        architecture = architecture,
        min_eigenvalue = min_eigenvalue(matrix),
        hermiticity = float(np.max(np.abs(matrix - matrix.conj().T))),
        marginals = [(step.name, marginal_residual(op, step)) for step in marginal_chain(spec)],
        trace_residual = float(abs(np.trace(matrix) - spec.d ** (spec.t + 1))),
        tol = tol
    )

def validate_sequential_comb(comb: CombChoi, tol: float = DEFAULT_COMB_TOL) -> CombReport:
    """Checks a Choi operator in the sequential layout against the comb constraints.

    Parameters
    ----------
    comb : CombChoi
        The comb to check.
    tol : float (default 1e-8)
        The tolerance of every check.

    Returns
    -------
    CombReport
        The per-check residuals and overall validity.

    Raises
    ------
    CombError
        If the comb is not in the sequential layout.
    """
    return _validate(comb, 'sequential', tol)

def validate_parallel_comb(comb: CombChoi, tol: float = DEFAULT_COMB_TOL) -> CombReport:
    """Checks a Choi operator in the parallel layout against the comb constraints.

    Parameters
    ----------
    comb : CombChoi
        The comb to check.
    tol : float (default 1e-8)
        The tolerance of every check.

    Returns
    -------
    CombReport
        The per-check residuals and overall validity.

    Raises
    ------
    CombError
        If the comb is not in the parallel layout.
    """
    return _validate(comb, 'parallel', tol)

def validate_comb(comb: CombChoi, tol: float = DEFAULT_COMB_TOL) -> CombReport:
    """Checks a comb against the constraints of its own architecture."""
    return _validate(comb, comb.spec.architecture, tol)
