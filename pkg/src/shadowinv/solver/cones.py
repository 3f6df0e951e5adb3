"""A script containing the Euclidean projections onto the PSD and
second-order cones.
"""

from typing import Dict, List, Sequence, Tuple
import numpy as np
from shadowinv.utils import parallel_map
from shadowinv.solver.problem import VariableBlock

def project_psd(matrix: np.ndarray) -> np.ndarray:
    """Returns the Frobenius-nearest positive semidefinite matrix.

    Parameters
    ----------
    matrix : numpy.ndarray
        A square matrix, or a stack of square matrices along the first axis.
        Only the Hermitian part is used.

    Returns
    -------
    numpy.ndarray
        The projection, with the input's shape.
    """
    matrix = np.asarray(matrix)
    herm: np.ndarray = (matrix + np.swapaxes(matrix, -1, -2).conj()) / 2
    vals, vecs = np.linalg.eigh(herm)
    vals = np.clip(vals, 0, None)
    return (vecs * vals[..., None, :]) @ np.swapaxes(vecs, -1, -2).conj()

def project_soc(vec: np.ndarray) -> np.ndarray:
    """Returns the projection onto the second-order cone `{(t, v) : ||v|| <= t}`.

    Parameters
    ----------
    vec : numpy.ndarray
        A vector `(t, v)`, or a stack of such vectors along the first axis.

    Returns
    -------
    numpy.ndarray
        The projection, with the input's shape.
    """
    vec = np.asarray(vec, dtype = float)
    stack: np.ndarray = np.atleast_2d(vec)
    head: np.ndarray = stack[:, 0]
    norms: np.ndarray = np.linalg.norm(stack[:, 1:], axis = 1)
    out: np.ndarray = stack.copy()

    ## Polar cone maps to the origin
    out[norms <= -head] = 0

    ## Outside both cones, project onto the boundary ray
    mask: np.ndarray = norms > np.abs(head)
    scale: np.ndarray = (norms[mask] + head[mask]) / 2
    out[mask, 0] = scale
    out[mask, 1:] = stack[mask, 1:] * (scale / norms[mask])[:, None]
    return out.reshape(vec.shape)

class ConeLayout:
    """The cone structure of a stacked vector: PSD blocks of the variables grouped
    by side, and contiguous second-order cones of the slacks grouped by length."""

    def __init__(self, blocks: Sequence[VariableBlock], soc_lengths: Sequence[int]) -> None:
        """
        Parameters
        ----------
        blocks : Sequence[VariableBlock]
            The variable blocks; only PSD blocks are projected.
        soc_lengths : Sequence[int]
            The length of each consecutive second-order cone of the slacks.
        """
        self.psd_groups: Dict[int, np.ndarray] = {}
        for side in sorted({block.size for block in blocks if block.kind == 'psd'}):
            starts: List[int] = [block.offset for block in blocks
                if block.kind == 'psd' and block.size == side]
            self.psd_groups[side] = np.asarray(starts)[:, None] + np.arange(side * side)[None, :]

        self.soc_groups: List[Tuple[int, np.ndarray]] = []
        starts_by_length: Dict[int, List[int]] = {}
        start: int = 0
        for length in soc_lengths:
            starts_by_length.setdefault(length, []).append(start)
            start += length
        self.soc_size: int = start
        for length, starts in sorted(starts_by_length.items()):
            self.soc_groups.append((length,
                np.asarray(starts)[:, None] + np.arange(length)[None, :]))

    def project_variables(self, x: np.ndarray, threads: int = 1) -> np.ndarray:
        """Projects every PSD block of the variable vector, leaving free entries unchanged."""
        out: np.ndarray = x.copy()
        items: List[Tuple[int, np.ndarray]] = list(self.psd_groups.items())

        def _project(item: Tuple[int, np.ndarray]) -> np.ndarray:
            side, index = item
            return project_psd(x[index].reshape(-1, side, side)).reshape(index.shape)

        for (_, index), proj in zip(items, parallel_map(_project, items, threads)):
            out[index] = proj
        return out

    def project_slacks(self, s: np.ndarray) -> np.ndarray:
        """Projects the slack vector onto the product of second-order cones."""
        out: np.ndarray = s.copy()
        for _, index in self.soc_groups:
            out[index] = project_soc(s[index])
        return out
