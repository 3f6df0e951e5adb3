"""A script containing the 'reduced-problem' artifact codec.

The coefficient tensor is not stored; a decoded problem rebuilds it from
the observable on first use.
"""

import numpy as np
from shadowinv.struct.codec import (
    DictObject, ArtifactCodec, FormatError, encode_complex, decode_complex, encode_floats,
    encode_label, decode_label
)
from shadowinv.comb.model import CombSpec, Observable
from shadowinv.solver.codec import encode_triplets, decode_triplets
from shadowinv.sdp.permutation import PermutationChoice
from shadowinv.sdp.reduced import ReducedProblem

_REGISTRY_NAME: str = 'reduced-problem'
"""The registry name of the artifact format."""

def setup(registrar) -> None:
    """A setup method used to register the artifact format.

    Parameters
    ----------
    registrar : `FormatRegistrar`
        The registrar holding the artifact codecs.
    """
    registrar.register_format(_REGISTRY_NAME, ReducedProblemCodec(), ReducedProblem)

class ReducedProblemCodec(ArtifactCodec[ReducedProblem]):
    """A codec for encoding and decoding a ReducedProblem.
    """

    def __init__(self) -> None:
        super().__init__(_REGISTRY_NAME)

    def encode_type(self, obj: ReducedProblem, dict_obj: DictObject) -> DictObject:
        dict_obj['d'] = obj.spec.d
        dict_obj['t'] = obj.spec.t
        dict_obj['architecture'] = obj.spec.architecture
        dict_obj['observable'] = {
            'name': obj.observable.name,
            'matrix': encode_complex(obj.observable.matrix)
        }
        dict_obj['permutations'] = obj.choice.to_dict()
        dict_obj['blocks'] = [{
            'label': encode_label(label),
            'dim': dim,
            'mult': mult
        } for label, dim, mult in zip(obj.labels, obj.dims, obj.mults)]
        dict_obj['constraints'] = encode_triplets(obj.a_mat)
        dict_obj['constraints']['rhs'] = encode_floats(obj.b_vec)
        dict_obj['objective'] = encode_triplets(obj.g_mat)
        dict_obj['objective']['targets'] = encode_floats(obj.h_vec)
        dict_obj['samples'] = obj.num_samples
        dict_obj['seed'] = obj.seed
        return dict_obj

    def decode_type(self, obj: DictObject) -> ReducedProblem:
        spec: CombSpec = CombSpec(int(obj['d']), int(obj['t']), obj['architecture'])
        observable: Observable = Observable(decode_complex(obj['observable']['matrix']),
            obj['observable'].get('name'))
        perms: DictObject = obj['permutations']
        choice: PermutationChoice = PermutationChoice(int(perms['t']), perms['pi'], perms['sigma'])
        problem: ReducedProblem = ReducedProblem(spec, observable,
            [decode_label(block['label']) for block in obj['blocks']],
            [int(block['dim']) for block in obj['blocks']],
            [int(block['mult']) for block in obj['blocks']],
            decode_triplets(obj['constraints']), np.asarray(obj['constraints']['rhs'], dtype = float),
            decode_triplets(obj['objective']), np.asarray(obj['objective']['targets'], dtype = float),
            int(obj['seed']), choice)
        if problem.a_mat.shape[1] != problem.num_vars or problem.g_mat.shape[1] != problem.num_vars:
            raise FormatError(f'Constraint columns do not match {problem.num_vars} block entries.')
        if problem.num_samples != int(obj['samples']):
            raise FormatError(f'Expected {obj["samples"]} samples, found {problem.num_samples}.')
        return problem
