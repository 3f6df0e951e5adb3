"""A script containing the 'schur-basis' artifact codec.
"""

from typing import Dict, List, Tuple
import numpy as np
from shadowinv.struct.codec import (
    DictObject, ArtifactCodec, FormatError, encode_complex, decode_complex, encode_label, decode_label
)
from shadowinv.rep.schur import SchurBasis, Label

_REGISTRY_NAME: str = 'schur-basis'
"""The registry name of the artifact format."""

def setup(registrar) -> None:
    """A setup method used to register the artifact format.

    Parameters
    ----------
    registrar : `FormatRegistrar`
        The registrar holding the artifact codecs.
    """
    registrar.register_format(_REGISTRY_NAME, SchurBasisCodec(), SchurBasis)

class SchurBasisCodec(ArtifactCodec[SchurBasis]):
    """A codec for encoding and decoding a SchurBasis.
    """

    def __init__(self) -> None:
        super().__init__(_REGISTRY_NAME)

    def encode_type(self, obj: SchurBasis, dict_obj: DictObject) -> DictObject:
        dict_obj['blocks'] = [{
            'label': encode_label(label),
            'dim': obj.dim(label),
            'mult': obj.mult(label),
            'columns': obj.block_columns(label).tolist()
        } for label in obj.labels]
        dict_obj['matrix'] = encode_complex(obj.matrix)
        return dict_obj

    def decode_type(self, obj: DictObject) -> SchurBasis:
        matrix: np.ndarray = np.real_if_close(decode_complex(obj['matrix']), tol = 1000)
        labels: List[Label] = []
        table: Dict[Label, Tuple[int, int]] = {}
        columns: Dict[Label, np.ndarray] = {}
        for block in obj['blocks']:
            label: Label = decode_label(block['label'])
            cols: np.ndarray = np.asarray(block['columns'], dtype = np.int64)
            if cols.shape != (block['dim'], block['mult']):
                raise FormatError(f'Block {label} columns have shape {cols.shape}.')
            labels.append(label)
            table[label] = (int(block['dim']), int(block['mult']))
            columns[label] = cols
        return SchurBasis(matrix, labels, table, columns)
