"""A script which holds lazy references to optional dependencies,
such as the external conic solver used for cross-checking."""

import sys
from types import ModuleType
from typing import Callable
from importlib.machinery import ModuleSpec
from importlib.util import find_spec, LazyLoader, module_from_spec

class MissingModuleError(ImportError):
    """Raised when an optional dependency is requested but not installed."""

def has_module(name: str) -> bool:
    """Checks whether the module is currently loaded or can be imported.

    Parameters
    ----------
    name : str
        The name of the module.

    Returns
    -------
    bool
        `True` if the module exists, `False` otherwise.
    """
    return (name in sys.modules) or (find_spec(name) is not None)

def _load_module(module_name: str, spec_getter: Callable[[str], ModuleSpec]) -> ModuleType:
    """Loads a module based on its name and getter for the spec,
    reusing the module if it is already loaded.
    """
    if module_name in sys.modules:
        return sys.modules[module_name]

    spec: ModuleSpec = spec_getter(module_name)
    module: ModuleType = module_from_spec(spec)
    sys.modules[module_name] = module
    spec.loader.exec_module(module)
    return module

def lazy_import(name: str, extra: str | None = None) -> ModuleType:
    """Sets up an optional module to be lazily imported if it is not already loaded.

    Parameters
    ----------
    name : str
        The name of the module to lazily load.
    extra : str | None (default `None`)
        The optional dependency group providing the module, used in the error message.

    Returns
    -------
    types.ModuleType
        The module which will be loaded on first attribute access.

    Raises
    ------
    MissingModuleError
        If the module cannot be found.
    """
    if not has_module(name):
        hint: str = f' (install \'shadowinv[{extra}]\')' if extra else ''
        raise MissingModuleError(f'Optional module \'{name}\' is not installed{hint}.')

    def _set_lazy(module_name: str) -> ModuleSpec:
        spec: ModuleSpec = find_spec(module_name)
        spec.loader = LazyLoader(spec.loader)
        return spec

    return _load_module(name, _set_lazy)
