"""A script containing the 'conic-problem' artifact codec and the problem
export used for cross-checking with external solvers.

Schema (all indices zero-based):

    format, version, name
    variables : [{name, kind, size, offset, hermitian}]
    cones     : {zero: #equality rows, psd: [block names], soc: [{epigraph, start, stop}]}
    equality  : {rows, cols, vals, rhs}       sparse triplets of A x = b
    objective : {indices, values}             sparse entries of c
    residual  : {rows, cols, vals, offset}    sparse triplets of G and the vector h
"""

from typing import Any, Dict
import numpy as np
from scipy import sparse
from shadowinv.struct.codec import DictObject, ArtifactCodec, FormatError, encode_floats
from shadowinv.utils import read_json, write_json
from shadowinv.solver.problem import ConicProblem, ProblemError, SocBlock, VariableBlock

_REGISTRY_NAME: str = 'conic-problem'
"""The registry name of the artifact format."""

def setup(registrar) -> None:
    """A setup method used to register the artifact format.

    Parameters
    ----------
    registrar : `FormatRegistrar`
        The registrar holding the artifact codecs.
    """
    registrar.register_format(_REGISTRY_NAME, ConicProblemCodec(), ConicProblem)

def encode_triplets(mat: sparse.spmatrix) -> Dict[str, Any]:
    """Encodes a sparse matrix as row-major triplets."""
    coo: sparse.coo_matrix = sparse.csr_matrix(mat).tocoo()
    return {
        'shape': list(coo.shape),
        'rows': [int(val) for val in coo.row],
        'cols': [int(val) for val in coo.col],
        'vals': encode_floats(coo.data)
    }

def decode_triplets(obj: DictObject) -> sparse.csr_matrix:
    """Decodes a sparse matrix written by `encode_triplets`."""
    return sparse.csr_matrix((np.asarray(obj['vals'], dtype = float),
        (np.asarray(obj['rows'], dtype = np.int64), np.asarray(obj['cols'], dtype = np.int64))),
        shape = tuple(obj['shape']))

class ConicProblemCodec(ArtifactCodec[ConicProblem]):
    """A codec for encoding and decoding a ConicProblem.
    """

    def __init__(self) -> None:
        super().__init__(_REGISTRY_NAME)

    def encode_type(self, obj: ConicProblem, dict_obj: DictObject) -> DictObject:
        dict_obj['name'] = obj.name
        dict_obj['variables'] = [block.to_dict() for block in obj.blocks]
        dict_obj['cones'] = {
            'zero': int(obj.a_mat.shape[0]),
            'psd': [block.name for block in obj.psd_blocks],
            'soc': [cone.to_dict() for cone in obj.soc]
        }
        dict_obj['equality'] = encode_triplets(obj.a_mat)
        dict_obj['equality']['rhs'] = encode_floats(obj.b_vec)
        support: np.ndarray = np.flatnonzero(obj.c_vec)
        dict_obj['objective'] = {
            'indices': [int(val) for val in support],
            'values': encode_floats(obj.c_vec[support])
        }
        dict_obj['residual'] = encode_triplets(obj.g_mat)
        dict_obj['residual']['offset'] = encode_floats(obj.h_vec)
        return dict_obj

    def decode_type(self, obj: DictObject) -> ConicProblem:
        blocks = [VariableBlock(block['name'], block['kind'], int(block['size']),
            int(block['offset']), bool(block['hermitian'])) for block in obj['variables']]
        num_vars: int = blocks[-1].stop if blocks else 0
        c_vec: np.ndarray = np.zeros(num_vars)
        c_vec[np.asarray(obj['objective']['indices'], dtype = np.int64)] = obj['objective']['values']
        soc = [SocBlock(int(cone['epigraph']), int(cone['start']), int(cone['stop']))
            for cone in obj['cones']['soc']]
        try:
            problem: ConicProblem = ConicProblem(blocks, decode_triplets(obj['equality']),
                np.asarray(obj['equality']['rhs'], dtype = float), c_vec,
                decode_triplets(obj['residual']), np.asarray(obj['residual']['offset'], dtype = float),
                soc, obj.get('name', 'problem'))
        except ProblemError as err:
            raise FormatError(f'Inconsistent conic problem: {err}') from err
        if problem.a_mat.shape[0] != int(obj['cones']['zero']):
            raise FormatError('The zero cone count does not match the equality rows.')
        return problem

def export_problem(problem: ConicProblem, path: str) -> str:
    """Writes a conic problem to a JSON file.

    Parameters
    ----------
    problem : ConicProblem
        The problem to write.
    path : str
        The location of the file.

    Returns
    -------
    str
        The path written to.
    """
    return write_json(ConicProblemCodec().encode(problem), path)

def import_problem(path: str) -> ConicProblem:
    """Reads a conic problem written by `export_problem`."""
    return ConicProblemCodec().decode(read_json(path))
