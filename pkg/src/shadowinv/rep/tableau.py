"""A script containing Young tableaux, their enumeration, and the
Young symmetrizers acting on tensor powers of C^d.

Tableau entry `k` labels tensor position `k - 1`.
"""

from itertools import permutations, product
from math import prod, factorial
from typing import List, Tuple, Iterator, Sequence
import numpy as np
from shadowinv.rep.partition import Partition
from shadowinv.tensor import reorder_vector

class Tableau:
    """A filling of a Young diagram, stored row by row."""

    def __init__(self, rows: Sequence[Sequence[int]]) -> None:
        """
        Parameters
        ----------
        rows : Sequence[Sequence[int]]
            The entries of each row, top to bottom.
        """
        self.rows: Tuple[Tuple[int, ...], ...] = tuple(tuple(row) for row in rows)
        if any(len(self.rows[i]) < len(self.rows[i + 1]) for i in range(len(self.rows) - 1)):
            raise ValueError(f'Rows {self.rows} do not form a Young diagram.')

    @property
    def shape(self) -> Partition:
        """The Young diagram of the tableau."""
        return tuple(len(row) for row in self.rows)

    @property
    def n(self) -> int:
        """The number of boxes."""
        return sum(self.shape)

    def columns(self) -> List[Tuple[int, ...]]:
        """Returns the entries of each column, left to right."""
        return [tuple(row[col] for row in self.rows if len(row) > col)
            for col in range(len(self.rows[0]) if self.rows else 0)]

    def reading_word(self) -> Tuple[int, ...]:
        """Returns the entries read row by row."""
        return tuple(entry for row in self.rows for entry in row)

    def is_standard(self) -> bool:
        """Checks whether the entries are `1..n`, increasing along rows and columns."""
        if sorted(self.reading_word()) != list(range(1, self.n + 1)):
            return False
        return self.is_semistandard() and all(
            row[i] < row[i + 1] for row in self.rows for i in range(len(row) - 1))

    def is_semistandard(self) -> bool:
        """Checks whether rows weakly increase and columns strictly increase."""
        return all(row[i] <= row[i + 1] for row in self.rows for i in range(len(row) - 1)) \
            and all(col[i] < col[i + 1] for col in self.columns() for i in range(len(col) - 1))

    def __getitem__(self, box: Tuple[int, int]) -> int:
        return self.rows[box[0]][box[1]]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tableau) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f'Tableau({[list(row) for row in self.rows]})'

def row_reading_tableau(shape: Partition) -> Tableau:
    """Returns the standard tableau filled with `1..n` row by row."""
    rows: List[List[int]] = []
    start: int = 1
    for length in shape:
        rows.append(list(range(start, start + length)))
        start += length
    return Tableau(rows)

def enumerate_syt(shape: Partition) -> List[Tableau]:
    """Returns the standard Young tableaux of the shape. Each entry is placed in
    the topmost row that can accept it first, so the row-reading tableau
    comes first.
    """
    n: int = sum(shape)

    def _fill(filled: List[List[int]], entry: int) -> Iterator[Tableau]:
        if entry > n:
            yield Tableau(filled)
            return
        for row, length in enumerate(shape):
            if len(filled[row]) < length and (row == 0 or len(filled[row - 1]) > len(filled[row])):
                filled[row].append(entry)
                yield from _fill(filled, entry + 1)
                filled[row].pop()

    return list(_fill([[] for _ in shape], 1))

def enumerate_ssyt(shape: Partition, dim: int) -> List[Tableau]:
    """Returns the semistandard Young tableaux of the shape with entries in `1..dim`,
    in lexicographic order of their reading words."""
    boxes: List[Tuple[int, int]] = [(row, col) for row, length in enumerate(shape)
        for col in range(length)]

    def _fill(filled: List[List[int]], box: int) -> Iterator[Tableau]:
        if box == len(boxes):
            yield Tableau(filled)
            return
        row, col = boxes[box]
        low: int = 1
        if col > 0:
            low = max(low, filled[row][col - 1])
        if row > 0:
            low = max(low, filled[row - 1][col] + 1)
        for value in range(low, dim + 1):
            filled[row].append(value)
            yield from _fill(filled, box + 1)
            filled[row].pop()

    return list(_fill([[] for _ in shape], 0))

def permutation_sign(perm: Sequence[int]) -> int:
    """Returns the sign of a permutation from its cycle decomposition."""
    seen: List[bool] = [False] * len(perm)
    sign: int = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length: int = 0
        pos: int = start
        while not seen[pos]:
            seen[pos] = True
            pos = perm[pos]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign

def _group_permutations(blocks: Sequence[Sequence[int]], n: int) -> List[Tuple[int, ...]]:
    """Returns every permutation of `range(n)` that permutes positions within each block."""
    perms: List[Tuple[int, ...]] = []
    for images in product(*(permutations(block) for block in blocks)):
        perm: List[int] = list(range(n))
        for block, image in zip(blocks, images):
            for pos, target in zip(block, image):
                perm[pos] = target
        perms.append(tuple(perm))
    return perms

def row_group(tab: Tableau) -> List[Tuple[int, ...]]:
    """Returns the permutations of tensor positions preserving each row of the tableau."""
    return _group_permutations([[entry - 1 for entry in row] for row in tab.rows], tab.n)

def column_group(tab: Tableau) -> List[Tuple[int, ...]]:
    """Returns the permutations of tensor positions preserving each column of the tableau."""
    return _group_permutations([[entry - 1 for entry in col] for col in tab.columns()], tab.n)

def apply_symmetrizer(tab: Tableau, dim: int, vectors: np.ndarray) -> np.ndarray:
    """Applies the Young symmetrizer of a standard tableau to the columns of a matrix.

    Parameters
    ----------
    tab : Tableau
        A standard tableau with `n` boxes.
    dim : int
        The local dimension.
    vectors : numpy.ndarray
        A `dim^n` by `k` matrix (or a vector of length `dim^n`).

    Returns
    -------
    numpy.ndarray
        The symmetrized columns.
    """
    dims: List[int] = [dim] * tab.n
    col_norm: int = prod(factorial(len(col)) for col in tab.columns())
    row_norm: int = prod(factorial(len(row)) for row in tab.rows)

    antisym: np.ndarray = sum(permutation_sign(perm) * reorder_vector(vectors, dims, perm)
        for perm in column_group(tab)) / col_norm
    return sum(reorder_vector(antisym, dims, perm) for perm in row_group(tab)) / row_norm

def young_symmetrizer(tab: Tableau, dim: int) -> np.ndarray:
    """Returns the Young symmetrizer `R C` of a standard tableau on `(C^dim)^{⊗n}`,
    where `R` averages over the row group and `C` signs-averages over the column group.

    Parameters
    ----------
    tab : Tableau
        A standard tableau.
    dim : int
        The local dimension.

    Returns
    -------
    numpy.ndarray
        The real `dim^n` square symmetrizer.
    """
    return apply_symmetrizer(tab, dim, np.eye(dim ** tab.n))
