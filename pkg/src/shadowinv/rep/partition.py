"""A script containing integer partitions, compositions, and the
counting formulas of Young diagrams.
"""

from math import factorial, prod
from typing import List, Tuple, TypeAlias, Iterator

Partition: TypeAlias = Tuple[int, ...]
"""A weakly decreasing tuple of positive integers (a Young diagram)."""

def partitions(n: int, max_rows: int | None = None) -> List[Partition]:
    """Returns the partitions of `n` with at most `max_rows` rows, in
    reverse lexicographic order (largest first). `partitions(0)` is `[()]`.

    Parameters
    ----------
    n : int
        The integer to partition.
    max_rows : int | None (default `None`)
        The maximum number of rows, or unbounded when `None`.

    Returns
    -------
    list[Partition]
        The partitions.
    """
    if n < 0:
        raise ValueError(f'Cannot partition a negative integer: {n}')
    rows: int = n if max_rows is None else max_rows

    def _build(remaining: int, largest: int, rows_left: int) -> Iterator[Partition]:
        if remaining == 0:
            yield ()
            return
        if rows_left == 0:
            return
        for part in range(min(remaining, largest), 0, -1):
            for rest in _build(remaining - part, part, rows_left - 1):
                yield (part,) + rest

    return list(_build(n, n, rows))

def conjugate(shape: Partition) -> Partition:
    """Returns the conjugate (transposed) partition."""
    return tuple(sum(1 for row in shape if row > col) for col in range(shape[0])) if shape else ()

def hook_length(shape: Partition) -> int:
    """Returns the product of the hook lengths of all boxes of the diagram.

    Examples
    --------
    >>> hook_length((4, 3, 1))
    576
    """
    columns: Partition = conjugate(shape)
    return prod(
        (row - col - 1) + (columns[col] - row_idx - 1) + 1
        for row_idx, row in enumerate(shape) for col in range(row)
    )

def count_syt(shape: Partition) -> int:
    """Returns the number of standard Young tableaux of the shape, `n!/H`."""
    return factorial(sum(shape)) // hook_length(shape)

def count_ssyt(shape: Partition, dim: int) -> int:
    """Returns the number of semistandard Young tableaux of the shape with entries
    in `1..dim`, i.e. the dimension of the unitary group irrep."""
    return prod(dim + col - row_idx
        for row_idx, row in enumerate(shape) for col in range(row)) // hook_length(shape)

def multinomial(parts: Tuple[int, ...]) -> int:
    """Returns the multinomial coefficient `(sum parts)! / prod(part!)`."""
    return factorial(sum(parts)) // prod(factorial(part) for part in parts)

def compositions(n: int, parts: int) -> List[Tuple[int, ...]]:
    """Returns the weak compositions of `n` into `parts` non-negative parts,
    in lexicographic order."""
    if parts == 0:
        return [()] if n == 0 else []
    if parts == 1:
        return [(n,)]
    return [(first,) + rest for first in range(n + 1) for rest in compositions(n - first, parts - 1)]
