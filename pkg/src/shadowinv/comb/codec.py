"""A script containing the 'comb' artifact codec.
"""

import numpy as np
from shadowinv.struct.codec import (
    DictObject, ArtifactCodec, FormatError, encode_complex, decode_complex
)
from shadowinv.comb.model import CombChoi, CombSpec

_REGISTRY_NAME: str = 'comb'
"""The registry name of the artifact format."""

def setup(registrar) -> None:
    """A setup method used to register the artifact format.

    Parameters
    ----------
    registrar : `FormatRegistrar`
        The registrar holding the artifact codecs.
    """
    registrar.register_format(_REGISTRY_NAME, CombCodec(), CombChoi)

class CombCodec(ArtifactCodec[CombChoi]):
    """A codec for encoding and decoding a CombChoi.
    """

    def __init__(self) -> None:
        super().__init__(_REGISTRY_NAME)

    def encode_type(self, obj: CombChoi, dict_obj: DictObject) -> DictObject:
        dict_obj['architecture'] = obj.spec.architecture
        dict_obj['d'] = obj.spec.d
        dict_obj['t'] = obj.spec.t
        dict_obj['layout'] = {
            'labels': obj.spec.labels,
            'dims': [obj.spec.d] * len(obj.spec.labels)
        }
        dict_obj['matrix'] = encode_complex(obj.matrix)
        return dict_obj

    def decode_type(self, obj: DictObject) -> CombChoi:
        spec: CombSpec = CombSpec(int(obj['d']), int(obj['t']), obj['architecture'])
        if (labels := list(obj['layout']['labels'])) != spec.labels:
            raise FormatError(f'Layout {labels} does not match {spec}.')
        matrix: np.ndarray = decode_complex(obj['matrix'])
        return CombChoi(spec, matrix)
