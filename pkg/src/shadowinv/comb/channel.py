"""A script containing the action of a comb on a unitary, the dual channel
on the observable, and the Monte-Carlo objective.

Inserting `U` into every slot of a comb `C` yields the channel from `P`
to `F` with Choi `tr_slots[C (I ⊗ (|U>><<U|^{⊗t})^T ⊗ I)]`. The comb
performs shadow inversion of `U` for the observable `O` when its dual
channel maps `O` to `U O U^†`.
"""

from typing import List
import numpy as np
from shadowinv.log import Logger, SILENT
from shadowinv.tensor import choi_vector, is_unitary, sample_unitaries, kron
from shadowinv.utils import parallel_map
from shadowinv.comb.model import CombChoi, CombError, CombSpec, Observable

_UNITARY_TOL: float = 1e-8
"""The tolerance of the unitarity check of an inserted operator."""

def slot_vector(spec: CombSpec, unitary: np.ndarray) -> np.ndarray:
    """Returns `|U>>^{⊗t}` ordered as the slot subsystems of the comb layout."""
    d, t = spec.d, spec.t
    vec: np.ndarray = kron(*([choi_vector(unitary).reshape(-1, 1)] * t)).reshape(-1)
    if spec.architecture == 'parallel':
        # (I_1, O_1, ..., I_t, O_t) -> (I_1, ..., I_t, O_1, ..., O_t)
        order: List[int] = list(range(0, 2 * t, 2)) + list(range(1, 2 * t, 2))
        vec = vec.reshape([d] * (2 * t)).transpose(order).reshape(-1)
    return vec

def apply_comb(comb: CombChoi, unitary: np.ndarray) -> np.ndarray:
    """Returns the Choi operator (ordered `P`, `F`) of the channel obtained by
    inserting the unitary into every slot of the comb.

    Parameters
    ----------
    comb : CombChoi
        The comb.
    unitary : numpy.ndarray
        The `d` by `d` unitary.

    Returns
    -------
    numpy.ndarray
        The `d^2` square Choi operator of the channel.

    Raises
    ------
    CombError
        If the operator is not a `d`-dimensional unitary.
    """
    spec: CombSpec = comb.spec
    unitary = np.asarray(unitary, dtype = complex)
    if unitary.shape != (spec.d, spec.d) or not is_unitary(unitary, _UNITARY_TOL):
        raise CombError('The inserted operator must be a unitary of dimension '
            + f'{spec.d}, found shape {unitary.shape}.')
    d: int = spec.d
    slots: int = d ** (2 * spec.t)
    vec: np.ndarray = slot_vector(spec, unitary)
    tens: np.ndarray = comb.matrix.reshape(d, slots, d, d, slots, d)
    # Contract the slots with (|U>><<U|)^T: rows with |U>>, columns with its conjugate
    return np.einsum('aribsj,r,s->aibj', tens, vec, vec.conj(), optimize = True) \
        .reshape(d * d, d * d)

def dual_on_observable(choi: np.ndarray, observable: np.ndarray) -> np.ndarray:
    """Returns `E^†(O)` for the channel with the given Choi operator (ordered input, output).

    `E^†(O)[p, q] = sum_{f,g} J[(q,f),(p,g)] O[g,f]`, which agrees with the
    dual Choi `F J^T F` applied to `O`.
    """
    dim: int = observable.shape[0]
    tens: np.ndarray = np.asarray(choi).reshape(dim, dim, dim, dim)
    return np.einsum('pfqg,gf->pq', tens, observable).T

def shadow_residual(comb: CombChoi, observable: Observable | np.ndarray,
        unitary: np.ndarray) -> float:
    """Returns `||N_U^†(O) - U O U^†||_F`, the shadow inversion error of the comb at `U`.

    Parameters
    ----------
    comb : CombChoi
        The comb.
    observable : Observable | numpy.ndarray
        The observable.
    unitary : numpy.ndarray
        The inserted unitary.

    Returns
    -------
    float
        The unsquared Frobenius residual.
    """
    obs: np.ndarray = observable.matrix if isinstance(observable, Observable) \
        else np.asarray(observable, dtype = complex)
    dual: np.ndarray = dual_on_observable(apply_comb(comb, unitary), obs)
    return float(np.linalg.norm(dual - unitary @ obs @ unitary.conj().T))

def shadow_residuals(comb: CombChoi, observable: Observable | np.ndarray,
        samples: int, seed: int, threads: int = 1) -> np.ndarray:
    """Returns the shadow inversion residual at each of the Haar-random unitaries
    drawn from the seed."""
    unitaries: List[np.ndarray] = sample_unitaries(comb.spec.d, samples, seed)
    return np.asarray(parallel_map(lambda unitary: shadow_residual(comb, observable, unitary),
        unitaries, threads))

def objective_estimate(comb: CombChoi, observable: Observable | np.ndarray, samples: int,
        seed: int, threads: int = 1, logger: Logger = SILENT) -> float:
    """Returns the Monte-Carlo estimate of the mean unsquared Frobenius residual
    of the comb over Haar-random unitaries.

    Parameters
    ----------
    comb : CombChoi
        The comb.
    observable : Observable | numpy.ndarray
        The observable.
    samples : int
        The number of Haar-random unitaries.
    seed : int
        The seed of the unitary samples.
    threads : int (default 1)
        The maximum number of workers.
    logger : Logger (default `SILENT`)
        A logger for reporting on information.

    Returns
    -------
    float
        The mean residual.
    """
    if samples < 1:
        raise CombError(f'At least one sample is needed, found {samples}.')
    logger.progress('sampling', samples = samples, seed = seed)
    return float(np.mean(shadow_residuals(comb, observable, samples, seed, threads)))
