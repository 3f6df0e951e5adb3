"""A script containing a generic implementation of an encoder and decoder
for an object and a dictionary, along with the versioned artifact codec
shared by every file written by the package.
"""

from abc import ABC, abstractmethod
from typing import TypeVar, Type, Dict, Any, Generic, List, Sequence
import numpy as np

DataObject = TypeVar('DataObject')
"""The type of the object holding data."""

DictObject: Type[Dict[str, Any]] = Dict[str, Any]
"""A generic intermediate object for reading or writing to a file."""

ARTIFACT_VERSION: int = 1
"""The schema version written into every artifact."""

class FormatError(ValueError):
    """Raised when an artifact does not match its documented schema."""

class DictCodec(ABC, Generic[DataObject]):
    """An abstract, generic encoder and decoder between a dictionary and a data object.

    Types
    -----
    DataObject
        The type of the data object to be encoded or decoded to.
    """

    @abstractmethod
    def decode(self, obj: DictObject) -> DataObject:
        """Decodes a dictionary to the data object.

        Parameters
        ----------
        obj : Dict[str, Any]
            The dictionary containing the data for the object.

        Returns
        -------
        DataObject
            The decoded data object.
        """

    @abstractmethod
    def encode(self, obj: DataObject) -> DictObject:
        """Encodes a data object to a dictionary.

        Parameters
        ----------
        obj : DataObject
            The object containing the data.

        Returns
        -------
        Dict[str, Any]
            The encoded data object in a dictionary.
        """

class ArtifactCodec(DictCodec[DataObject]):
    """An abstract codec for a versioned artifact. Every encoded artifact
    holds a 'format' and a 'version' key; decoding checks both before
    handing the dictionary to the specific type.

    Types
    -----
    DataObject
        The type of the data object to be encoded or decoded to.
    """

    def __init__(self, format_name: str) -> None:
        """
        Parameters
        ----------
        format_name : str
            The name written to the 'format' key of the artifact.
        """
        self.format_name: str = format_name

    def decode(self, obj: DictObject) -> DataObject:
        if obj.get('format') != self.format_name:
            raise FormatError(f'Expected format \'{self.format_name}\', '
                + f'found \'{obj.get("format")}\'.')
        if obj.get('version') != ARTIFACT_VERSION:
            raise FormatError(f'Unsupported {self.format_name} version: {obj.get("version")}')
        try:
            return self.decode_type(obj)
        except (KeyError, TypeError, IndexError) as err:
            raise FormatError(f'Malformed {self.format_name} artifact: {err!r}') from err

    @abstractmethod
    def decode_type(self, obj: DictObject) -> DataObject:
        """Decodes a dictionary to the specific artifact type.

        Parameters
        ----------
        obj : Dict[str, Any]
            The dictionary containing the data for the artifact.

        Returns
        -------
        DataObject
            The decoded artifact.
        """

    def encode(self, obj: DataObject) -> DictObject:
        dict_obj: DictObject = {
            'format': self.format_name,
            'version': ARTIFACT_VERSION
        }
        return self.encode_type(obj, dict_obj)

    @abstractmethod
    def encode_type(self, obj: DataObject, dict_obj: DictObject) -> DictObject:
        """Encodes a specific artifact type to the dictionary.

        Parameters
        ----------
        obj : DataObject
            The artifact containing the data.
        dict_obj : Dict[str, Any]
            The dictionary containing the common 'format' and 'version' keys.

        Returns
        -------
        Dict[str, Any]
            The encoded artifact in a dictionary.
        """

def encode_complex(arr: np.ndarray) -> DictObject:
    """Encodes a complex array as its shape and interleaved
    real / imaginary parts in row-major order.

    Parameters
    ----------
    arr : numpy.ndarray
        The array to encode.

    Returns
    -------
    Dict[str, Any]
        The encoded array.
    """
    arr = np.asarray(arr, dtype = complex)
    data: np.ndarray = np.stack([arr.real.ravel(), arr.imag.ravel()], axis = -1).ravel()
    return {
        'shape': list(arr.shape),
        'data': [float(val) for val in data]
    }

def decode_complex(obj: DictObject) -> np.ndarray:
    """Decodes a complex array written by `encode_complex`.

    Parameters
    ----------
    obj : Dict[str, Any]
        The encoded array.

    Returns
    -------
    numpy.ndarray
        The decoded complex array.
    """
    shape: List[int] = [int(dim) for dim in obj['shape']]
    data: np.ndarray = np.asarray(obj['data'], dtype = float)
    if data.size != 2 * int(np.prod(shape)):
        raise FormatError(f'Array data of length {data.size} does not match shape {shape}.')
    return (data[0::2] + 1j * data[1::2]).reshape(shape)

def encode_label(label: Any) -> Any:
    """Encodes a (possibly nested) tuple label as nested lists."""
    if isinstance(label, tuple):
        return [encode_label(item) for item in label]
    return label

def decode_label(obj: Any) -> Any:
    """Decodes nested lists back to a (possibly nested) tuple label."""
    if isinstance(obj, list):
        return tuple(decode_label(item) for item in obj)
    return obj

def encode_floats(values: Sequence[float]) -> List[float]:
    """Encodes a sequence of reals as plain floats."""
    return [float(val) for val in values]
