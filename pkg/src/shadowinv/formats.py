"""A script containing the registrar of the artifact formats and the
helpers reading and writing artifact files.
"""

from typing import Any, Dict, List
from shadowinv.log import Logger, SILENT
from shadowinv.utils import read_json, write_json
from shadowinv.struct.codec import ArtifactCodec, DictObject, FormatError
from shadowinv.struct.registry import Registry, RegistryError

import shadowinv.rep.codec as fmt_schur
import shadowinv.comb.codec as fmt_comb
import shadowinv.solver.codec as fmt_conic
import shadowinv.sdp.codec as fmt_reduced
import shadowinv.record as fmt_result

class FormatRegistrar:
    """A registrar holding the codec of every artifact format, keyed by
    format name and by the artifact type.
    """

    def __init__(self) -> None:
        # 0: Open
        # 1: Frozen
        self.__stager: int = 0
        self.codecs: Registry[ArtifactCodec] = Registry()
        self.types: Dict[type, str] = {}

    @property
    def frozen(self) -> bool:
        """Whether no more formats can be registered."""
        return self.__stager > 0

    def register_format(self, name: str, codec: ArtifactCodec, data_type: type) -> None:
        """Registers the codec of an artifact format.

        Parameters
        ----------
        name : str
            The format name, written to the 'format' key of the artifact.
        codec : `ArtifactCodec`
            The codec of the format.
        data_type : type
            The type of the objects the codec encodes.

        Raises
        ------
        RegistryError
            If the registrar is frozen, or the name or type is already registered.
        """
        if self.frozen:
            raise RegistryError(f'{name} could not be registered; the registry has been frozen.')
        if data_type in self.types:
            raise RegistryError(f'{data_type.__name__} is already encoded by {self.types[data_type]}.')
        self.codecs[name] = codec
        self.types[data_type] = name

    def get_codec(self, name: str) -> ArtifactCodec:
        """Returns the codec of a format name."""
        if name not in self.codecs:
            raise FormatError(f'Unknown artifact format \'{name}\'; expected one of {self.names()}.')
        return self.codecs[name]

    def codec_for(self, obj: Any) -> ArtifactCodec:
        """Returns the codec encoding the type of an object."""
        if (name := self.types.get(type(obj))) is None:
            raise FormatError(f'No artifact format encodes {type(obj).__name__}.')
        return self.codecs[name]

    def names(self) -> List[str]:
        """Returns the registered format names."""
        return list(self.codecs.keys())

    def freeze(self) -> None:
        """Freezes the registrar."""
        self.__stager = 1

REGISTRAR: FormatRegistrar = FormatRegistrar()

def setup(logger: Logger = SILENT) -> FormatRegistrar:
    """Registers the artifact formats of the package once and freezes the registrar.

    Parameters
    ----------
    logger : `Logger` (default `SILENT`)
        A logger for reporting on information.

    Returns
    -------
    `FormatRegistrar`
        The populated registrar.
    """
    if REGISTRAR.frozen:
        return REGISTRAR
    logger.debug('Registering artifact formats...')
    fmt_schur.setup(REGISTRAR)
    fmt_comb.setup(REGISTRAR)
    fmt_conic.setup(REGISTRAR)
    fmt_reduced.setup(REGISTRAR)
    fmt_result.setup(REGISTRAR)
    REGISTRAR.freeze()
    return REGISTRAR

def write_artifact(obj: Any, path: str) -> str:
    """Writes an object to a JSON artifact file in its registered format.

    Parameters
    ----------
    obj : Any
        An object of a registered type.
    path : str
        The location of the file.

    Returns
    -------
    str
        The path written to.
    """
    return write_json(setup().codec_for(obj).encode(obj), path)

def read_artifact(path: str, expected: str | None = None) -> Any:
    """Reads a JSON artifact file, dispatching on its 'format' key.

    Parameters
    ----------
    path : str
        The location of the file.
    expected : str | None (default `None`)
        The required format name, or any format when `None`.

    Returns
    -------
    Any
        The decoded object.

    Raises
    ------
    FormatError
        If the file is not an artifact of a known (or the expected) format.
    """
    obj: DictObject = read_json(path)
    if not isinstance(obj, dict) or 'format' not in obj:
        raise FormatError(f'\'{path}\' is not an artifact file.')
    if expected is not None and obj['format'] != expected:
        raise FormatError(f'Expected a \'{expected}\' artifact, found \'{obj["format"]}\' in \'{path}\'.')
    return setup().get_codec(obj['format']).decode(obj)
