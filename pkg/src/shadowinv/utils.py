"""A script containing helper methods used throughout the package.
"""

import os
import json
from datetime import datetime, timezone
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Callable, Iterable, List, TypeVar

def utc_timestamp() -> str:
    """Returns the current time as an ISO-8601 string in UTC."""
    return datetime.now(timezone.utc).isoformat(timespec = 'seconds')

def write_json(obj: Dict[str, Any], path: str) -> str:
    """Writes a dictionary to a JSON file, creating missing directories.

    Keys keep their insertion order, so identical objects produce
    identical bytes.

    Parameters
    ----------
    obj : Dict[str, Any]
        The object to write.
    path : str
        The location of the file.

    Returns
    -------
    str
        The path written to.
    """
    if dirname := os.path.dirname(path):
        os.makedirs(dirname, exist_ok = True)
    with open(path, mode = 'w', encoding = 'UTF-8') as file:
        json.dump(obj, file, indent = 4)
        file.write('\n')
    return path

def read_json(path: str) -> Dict[str, Any]:
    """Reads a JSON file into a dictionary.

    Parameters
    ----------
    path : str
        The location of the file.

    Returns
    -------
    Dict[str, Any]
        The decoded JSON object.
    """
    with open(path, mode = 'r', encoding = 'UTF-8') as file:
        return json.load(file)

I = TypeVar('I')
"""The type of the input."""

O = TypeVar('O')
"""The type of the output."""

def parallel_map(func: Callable[[I], O], items: Iterable[I], threads: int = 1) -> List[O]:
    """Maps the function over the items, using a thread pool when more than one
    worker is requested. Results keep the order of the items.

    Parameters
    ----------
    func : (I) -> O
        The function to apply.
    items : Iterable[I]
        The inputs of the function.
    threads : int (default 1)
        The maximum number of workers.

    Returns
    -------
    list[O]
        The outputs of the function.
    """
    if threads <= 1:
        return list(map(func, items))
    with ThreadPoolExecutor(max_workers = threads) as executor:
        return list(executor.map(func, items))
