"""A script containing constructions of valid combs: random combs built
from linked isometries, simple routing combs, and the twirl over the
symmetry group of the objective.
"""

from typing import List, Sequence, Tuple
import numpy as np
from shadowinv.tensor import (
    IndexedOperator, SubsystemLayout, choi_operator, haar_unitary, kron, link_product,
    random_isometry
)
from shadowinv.rep.centralizer import sample_centralizer
from shadowinv.comb.model import (
    CombChoi, CombError, CombSpec, Observable, input_label, output_label
)

def _identity_choi(dim: int) -> np.ndarray:
    """Returns `|I>><<I|` of the identity channel on dimension `dim`."""
    return choi_operator(np.eye(dim))

def _assemble(spec: CombSpec, factors: Sequence[Tuple[Sequence[str], np.ndarray]]) -> CombChoi:
    """Returns the tensor product of operators on labeled subsystems, reordered
    into the comb layout."""
    labels: List[str] = [label for names, _ in factors for label in names]
    matrix: np.ndarray = kron(*(mat for _, mat in factors))
    op: IndexedOperator = IndexedOperator(matrix, SubsystemLayout(labels, [spec.d] * len(labels)))
    return CombChoi(spec, op.reorder(spec.labels).matrix)

def _isometry_choi(iso: np.ndarray, inputs: Sequence[Tuple[str, int]],
        outputs: Sequence[Tuple[str, int]]) -> IndexedOperator:
    """Returns the Choi operator of an isometry on labeled input and output subsystems."""
    layout: SubsystemLayout = SubsystemLayout([name for name, _ in inputs]
        + [name for name, _ in outputs], [dim for _, dim in inputs] + [dim for _, dim in outputs])
    return IndexedOperator(choi_operator(iso), layout)

def random_comb(spec: CombSpec, rng: np.random.Generator, aux_dim: int | None = None) -> CombChoi:
    """Samples a random valid comb by linking Haar-random isometries through a memory.

    A sequential comb links an encoder `P -> (I_1, A_1)`, unitaries
    `(O_k, A_k) -> (I_{k+1}, A_{k+1})`, and a decoder `(O_t, A_t) -> (F, E)` with
    the environment `E` traced out. A parallel comb links an encoder
    `P -> (I_1..I_t, A)` with a decoder `(O_1..O_t, A) -> (F, E)`.

    Parameters
    ----------
    spec : CombSpec
        The shape of the comb.
    rng : numpy.random.Generator
        The source of randomness.
    aux_dim : int | None (default `None`)
        The memory dimension, or `d^2` when `None`.

    Returns
    -------
    CombChoi
        The random comb.
    """
    d: int = spec.d
    mem: int = d * d if aux_dim is None else aux_dim
    if mem < 1:
        raise CombError(f'The memory dimension must be positive, found {mem}.')

    if spec.architecture == 'sequential':
        current: IndexedOperator = _isometry_choi(random_isometry(d, d * mem, rng),
            [('P', d)], [(input_label(1), d), ('A1', mem)])
        for k in range(1, spec.t):
            step: IndexedOperator = _isometry_choi(haar_unitary(d * mem, rng),
                [(output_label(k), d), (f'A{k}', mem)],
                [(input_label(k + 1), d), (f'A{k + 1}', mem)])
            current = link_product(current, step)
        decoder_in: List[Tuple[str, int]] = [(output_label(spec.t), d), (f'A{spec.t}', mem)]
        env: int = mem
    else:
        current = _isometry_choi(random_isometry(d, d ** spec.t * mem, rng), [('P', d)],
            [(input_label(k), d) for k in range(1, spec.t + 1)] + [('A1', mem)])
        decoder_in = [(output_label(k), d) for k in range(1, spec.t + 1)] + [('A1', mem)]
        env = d ** (spec.t - 1) * mem

    in_dim: int = int(np.prod([dim for _, dim in decoder_in]))
    decoder: IndexedOperator = _isometry_choi(random_isometry(in_dim, d * env, rng),
        decoder_in, [('F', d), ('E', env)]).partial_trace(['E'])
    linked: IndexedOperator = link_product(current, decoder)
    return CombChoi(spec, linked.reorder(spec.labels).matrix)

def routing_comb(spec: CombSpec) -> CombChoi:
    """Returns the comb that wires its slots in series, so it implements `U^t`.

    A parallel comb routes `P` through the first slot only and discards
    the other slots with maximally mixed inputs.
    """
    d: int = spec.d
    if spec.architecture == 'sequential':
        chain: List[str] = ['P'] + [label for k in range(1, spec.t + 1)
            for label in (input_label(k), output_label(k))] + ['F']
        return _assemble(spec, [((chain[2 * k], chain[2 * k + 1]), _identity_choi(d))
            for k in range(spec.t + 1)])

    factors: List[Tuple[Sequence[str], np.ndarray]] = [
        (('P', input_label(1)), _identity_choi(d)),
        ((output_label(1), 'F'), _identity_choi(d))
    ]
    for k in range(2, spec.t + 1):
        factors.append(((input_label(k),), np.eye(d) / d))
        factors.append(((output_label(k),), np.eye(d)))
    return _assemble(spec, factors)

def bypass_comb(spec: CombSpec) -> CombChoi:
    """Returns the comb that sends `P` straight to `F`, feeding maximally mixed
    states into the slots and discarding their outputs."""
    d: int = spec.d
    factors: List[Tuple[Sequence[str], np.ndarray]] = [(('P', 'F'), _identity_choi(d))]
    for k in range(1, spec.t + 1):
        factors.append(((input_label(k),), np.eye(d) / d))
        factors.append(((output_label(k),), np.eye(d)))
    return _assemble(spec, factors)

def discard_comb(spec: CombSpec, state: np.ndarray | None = None) -> CombChoi:
    """Returns the comb that discards every input and prepares a fixed output state.

    Parameters
    ----------
    spec : CombSpec
        The shape of the comb.
    state : numpy.ndarray | None (default `None`)
        The output density matrix, or maximally mixed when `None`.
    """
    d: int = spec.d
    sigma: np.ndarray = np.eye(d) / d if state is None else np.asarray(state, dtype = complex)
    factors: List[Tuple[Sequence[str], np.ndarray]] = [(('P',), np.eye(d))]
    for k in range(1, spec.t + 1):
        factors.append(((input_label(k),), np.eye(d) / d))
        factors.append(((output_label(k),), np.eye(d)))
    factors.append((('F',), sigma))
    return _assemble(spec, factors)

def maximally_mixed_comb(spec: CombSpec) -> CombChoi:
    """Returns the comb `I / d^(t+1)`, which is valid for either architecture."""
    return CombChoi(spec, np.eye(spec.total_dim, dtype = complex) / spec.d ** (spec.t + 1))

def symmetry_element(spec: CombSpec, unitary: np.ndarray, slot_input: np.ndarray,
        output: np.ndarray) -> np.ndarray:
    """Returns the group element acting on the comb layout: `unitary` on `P` and
    every `O_k`, `slot_input` on every `I_k`, and `output` on `F`."""
    factors: List[np.ndarray] = []
    for label in spec.labels:
        if label == 'P' or label.startswith('O'):
            factors.append(unitary)
        elif label == 'F':
            factors.append(output)
        else:
            factors.append(slot_input)
    return kron(*factors)

def symmetrize(comb: CombChoi, observable: Observable, samples: int,
        rng: np.random.Generator) -> CombChoi:
    """Returns a Monte-Carlo estimate of the twirl of a comb over the symmetry group
    of the objective, `U ⊗ (V ⊗ U)^{⊗t} ⊗ W` for a sequential comb and
    `U ⊗ V^{⊗t} ⊗ U^{⊗t} ⊗ W` for a parallel one, with `U` Haar-random and
    `V`, `W` Haar-random in the centralizer of the observable.

    Parameters
    ----------
    comb : CombChoi
        The comb to twirl.
    observable : Observable
        The observable whose centralizer is sampled.
    samples : int
        The number of group elements averaged.
    rng : numpy.random.Generator
        The source of randomness.

    Returns
    -------
    CombChoi
        The averaged comb, valid whenever the input comb is.
    """
    if samples < 1:
        raise CombError(f'At least one sample is needed to symmetrize, found {samples}.')
    spec: CombSpec = comb.spec
    total: np.ndarray = np.zeros_like(comb.matrix)
    for _ in range(samples):
        element: np.ndarray = symmetry_element(spec, haar_unitary(spec.d, rng),
            sample_centralizer(observable.decomposition, rng),
            sample_centralizer(observable.decomposition, rng))
        total += element @ comb.matrix @ element.conj().T
    return CombChoi(spec, total / samples)

def to_sequential(comb: CombChoi) -> CombChoi:
    """Reorders a parallel comb into the sequential layout. Every parallel comb
    is a valid sequential comb."""
    if comb.spec.architecture == 'sequential':
        return comb
    spec: CombSpec = CombSpec(comb.spec.d, comb.spec.t, 'sequential')
    return CombChoi(spec, comb.operator.reorder(spec.labels).matrix)
