"""A script containing the coefficient tensor of a Schur basis: the entries
of every basis column in the computational basis of the grouped layout,
and the causal-ordered block arrays read off from it.
"""

from typing import List
import numpy as np
from scipy import sparse
from shadowinv.tensor import reorder_vector
from shadowinv.rep.schur import Label, SchurBasis

COEFF_TOL: float = 1e-12
"""The magnitude below which a coefficient is dropped."""

class CoefficientTensor:
    """The sparse coefficients `p[i_1..i_n; (r, a, alpha)]` of a Schur basis."""

    def __init__(self, basis: SchurBasis, entries: sparse.csc_matrix, d: int, t: int) -> None:
        """
        Parameters
        ----------
        basis : SchurBasis
            The combined basis on the grouped layout.
        entries : scipy.sparse.csc_matrix
            The basis matrix with negligible entries dropped.
        d : int
            The local dimension.
        t : int
            The number of slots.
        """
        self.basis: SchurBasis = basis
        self.entries: sparse.csc_matrix = entries
        self.d: int = d
        self.t: int = t

    @property
    def labels(self) -> List[Label]:
        """The block labels of the basis."""
        return self.basis.labels

    @property
    def nnz(self) -> int:
        """The number of stored coefficients."""
        return int(self.entries.nnz)

    @property
    def is_real(self) -> bool:
        """Whether every coefficient is real."""
        return not np.iscomplexobj(self.entries.data)

    def column(self, index: int) -> np.ndarray:
        """Returns one basis column rebuilt from its coefficients."""
        return self.entries[:, index].toarray().ravel()

    def causal_block(self, label: Label, order: tuple) -> np.ndarray:
        """Returns the columns of a block reordered into a causal layout.

        Parameters
        ----------
        label : Label
            The block label.
        order : tuple
            The grouped position of each causal position.

        Returns
        -------
        numpy.ndarray
            An array `W[x, a, alpha]` of shape `(d^(2t+2), dim, mult)`.
        """
        cols: np.ndarray = self.basis.block_columns(label)
        grouped: np.ndarray = self.entries[:, cols.ravel()].toarray()
        causal: np.ndarray = reorder_vector(grouped, [self.d] * (2 * self.t + 2), order)
        return causal.reshape(-1, *cols.shape)

def coefficient_tensor(basis: SchurBasis, d: int, t: int, tol: float = COEFF_TOL) -> CoefficientTensor:
    """Reads the coefficients of a combined Schur basis.

    Parameters
    ----------
    basis : SchurBasis
        The combined basis of side `d^(2t+2)`.
    d : int
        The local dimension.
    t : int
        The number of slots.
    tol : float (default 1e-12)
        The magnitude below which a coefficient is dropped.

    Returns
    -------
    CoefficientTensor
        The coefficients, stored as reals when the basis is real.
    """
    if basis.dimension != d ** (2 * t + 2):
        raise ValueError(f'A basis of side {basis.dimension} does not fit d = {d}, t = {t}.')
    matrix: np.ndarray = basis.matrix
    if basis.imag_residual() <= 1e-10:
        matrix = np.real(matrix)
    kept: np.ndarray = np.where(np.abs(matrix) > tol, matrix, 0)
    return CoefficientTensor(basis, sparse.csc_matrix(kept), d, t)
