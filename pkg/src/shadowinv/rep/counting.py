"""A script containing the closed-form variable counts of the
symmetry-reduced problem."""

from math import factorial, prod
from typing import Sequence
from shadowinv.rep.partition import partitions, count_syt, compositions, multinomial
from shadowinv.rep.centralizer import SpectrumError

def moment_unitary(k: int, dim: int) -> int:
    """Returns `I_k(d)`, the sum of squared multiplicities of `U^{⊗k}` on `(C^d)^{⊗k}`
    (with `I_0 = 1`)."""
    return sum(count_syt(shape) ** 2 for shape in partitions(k, dim))

def moment_centralizer(t: int, spectrum: Sequence[int]) -> int:
    """Returns `J_t`, the sum of squared multiplicities of `V^{⊗t}` for `V` in the
    centralizer of an observable with the given eigenspace dimensions."""
    return sum(
        multinomial(counts) ** 2 * prod(moment_unitary(count, mult)
            for count, mult in zip(counts, spectrum))
        for counts in compositions(t, len(spectrum))
    )

def _check_spectrum(dim: int, spectrum: Sequence[int]) -> None:
    if not spectrum or any(mult < 1 for mult in spectrum) or sum(spectrum) != dim:
        raise SpectrumError(f'Spectrum {list(spectrum)} is not a partition of d = {dim} '
            + 'into positive eigenspace dimensions.')

def variable_count(dim: int, t: int, spectrum: Sequence[int]) -> int:
    """Returns `N = m I_{t+1}(d) J_t`, the number of complex block entries of the
    reduced problem.

    Parameters
    ----------
    dim : int
        The dimension of the unitary.
    t : int
        The number of queries.
    spectrum : Sequence[int]
        The dimension of each eigenspace of the observable.

    Returns
    -------
    int
        The number of variables.

    Raises
    ------
    SpectrumError
        If the spectrum does not sum to the dimension.
    """
    _check_spectrum(dim, spectrum)
    return len(spectrum) * moment_unitary(t + 1, dim) * moment_centralizer(t, spectrum)

def variable_count_bound(dim: int, t: int) -> int:
    """Returns the upper bound `(t+1)! t! d^(t+1)` on the reduced variable count."""
    return factorial(t + 1) * factorial(t) * dim ** (t + 1)

def full_variable_count(dim: int, t: int) -> int:
    """Returns `d^(4t+4)`, the number of real parameters of the full Choi operator."""
    return dim ** (4 * t + 4)
