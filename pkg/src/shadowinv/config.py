"""A script containing the configuration information.

Configurations are read from, in order of precedence, the project
(`./.shadowinv.toml`), the directory named by `SHADOWINV_CONFIG_DIR`,
the virtual environment site, the user, and the global config
directories. Values in more specific scopes override broader ones.
"""

import sys
import os
from typing import Any, Tuple, List, Dict
from platformdirs import site_config_dir, user_config_dir
from tomlkit import table, document, comment, TOMLDocument, load, dump, boolean, integer, float_
from tomlkit.items import Table
from shadowinv.struct.codec import DictObject
from shadowinv.solver.problem import SolverSettings

_ENV_VAR: str = 'SHADOWINV_CONFIG_DIR'
"""The environment variable pointing to the config directory."""

_THREADS_ENV_VAR: str = 'SHADOWINV_THREADS'
"""The environment variable holding the default worker count."""

_CONFIG_DIR: str = 'shadowinv'
"""The config directory for shadowinv."""

_CONFIG_FILE: str = 'shadowinv.toml'
"""The name of the config file."""

_PROJECT_CONFIG_FILE: str = '.shadowinv.toml'
"""The name of the config file within a project directory."""

SCOPES: List[str] = ['project', 'site', 'user', 'global']
"""The names of the configuration scopes, indexed by their scope number."""

def _project_config(dirpath: str, path : str) -> str:
    """Returns the path relative to the project configuration.

    Parameters
    ----------
    dirpath : str
        The root directory of the project.
    path : str
        The relativized path.

    Returns
    -------
    str
        The path relative to the project configuration.
    """
    return os.sep.join([dirpath, path])

def _env_var_config(path : str) -> str | None:
    """Returns the path relative to the environment variable configuration.

    Parameters
    ----------
    path : str
        The relativized path.

    Returns
    -------
    str
        The path relative to the environment variable configuration.
    """
    if env_dir := os.getenv(_ENV_VAR):
        return os.sep.join([env_dir, path])
    return None

def _site_config(path : str) -> str | None:
    """Returns the path relative to the site configuration, if
    running within a virtual environment.
    """
    return os.sep.join([sys.prefix, _CONFIG_DIR, path]) if sys.prefix != sys.base_prefix else None

def _user_config(path : str) -> str:
    """Returns the path relative to the user configuration."""
    return user_config_dir(os.sep.join([_CONFIG_DIR, path]), appauthor = False, roaming = True)

def _global_config(path : str) -> str:
    """Returns the path relative to the global configuration."""
    return site_config_dir(os.sep.join([_CONFIG_DIR, path]), appauthor = False, multipath = True)

def _default_threads() -> int:
    """Returns the worker count from the environment, or one if unset."""
    try:
        return max(1, int(os.getenv(_THREADS_ENV_VAR, '1')))
    except ValueError:
        return 1

class SamplingConfig:
    """Configurations within the 'sampling' table."""

    def __init__(self, samples: int = 2000, seed: int = 42) -> None:
        """
        Parameters
        ----------
        samples : int (default 2000)
            The number of Haar-random unitaries in the Monte-Carlo objective.
        seed : int (default 42)
            The seed of the unitary samples.
        """
        self.samples: int = samples
        self.seed: int = seed

    def list_vals(self) -> List[str]:
        """Lists all configuration options.

        Returns
        -------
        list[str]
            A list of all config options.
        """
        return ['samples', 'seed']

    def encode_toml(self) -> Table:
        """Encodes the 'sampling' config into a table.

        Returns
        -------
        Table
            The encoded 'sampling' config.
        """
        sampling: Table = table()
        sampling.comment('Monte-Carlo sampling of the objective')
        sampling.add('samples', integer(self.samples).comment('Number of Haar-random unitaries'))
        sampling.add('seed', integer(self.seed).comment('Seed of the unitary samples'))
        return sampling

    @classmethod
    def decode_toml(cls, obj: DictObject) -> 'SamplingConfig':
        """Decodes the 'sampling' table.

        Parameters
        ----------
        obj : dict[str, any]
            The encoded 'sampling' table.

        Returns
        -------
        SamplingConfig
            The decoded 'sampling' table.
        """
        return SamplingConfig(**obj)

class SolverConfig:
    """Configurations within the 'solver' table."""

    def __init__(self, max_iter: int = 200000, eps_primal: float = 1e-6,
            eps_dual: float = 1e-6, eps_gap: float = 1e-5, scaling: bool = True,
            rho: float = 1.0, alpha: float = 1.6, adaptive_rho: bool = True,
            check_interval: int = 25) -> None:
        """
        Parameters
        ----------
        max_iter : int (default 200000)
            The maximum number of splitting iterations.
        eps_primal : float (default 1e-6)
            The relative primal residual tolerance.
        eps_dual : float (default 1e-6)
            The relative dual residual tolerance.
        eps_gap : float (default 1e-5)
            The relative duality gap tolerance.
        scaling : bool (default `True`)
            When `True`, equilibrates the equality rows and the objective.
        rho : float (default 1.0)
            The initial penalty parameter.
        alpha : float (default 1.6)
            The over-relaxation factor in (0, 2).
        adaptive_rho : bool (default `True`)
            When `True`, balances the primal and dual residuals by rescaling the penalty.
        check_interval : int (default 25)
            The number of iterations between convergence checks.
        """
        self.max_iter: int = max_iter
        self.eps_primal: float = eps_primal
        self.eps_dual: float = eps_dual
        self.eps_gap: float = eps_gap
        self.scaling: bool = scaling
        self.rho: float = rho
        self.alpha: float = alpha
        self.adaptive_rho: bool = adaptive_rho
        self.check_interval: int = check_interval

    def list_vals(self) -> List[str]:
        """Lists all configuration options.

        Returns
        -------
        list[str]
            A list of all config options.
        """
        return ['max_iter', 'eps_primal', 'eps_dual', 'eps_gap', 'scaling',
            'rho', 'alpha', 'adaptive_rho', 'check_interval']

    def encode_toml(self) -> Table:
        """Encodes the 'solver' config into a table.

        Returns
        -------
        Table
            The encoded 'solver' config.
        """
        solver: Table = table()
        solver.comment('Operator-splitting conic solver settings')
        solver.add('max_iter', integer(self.max_iter).comment('Maximum iterations'))
        solver.add('eps_primal', float_(self.eps_primal).comment('Relative primal tolerance'))
        solver.add('eps_dual', float_(self.eps_dual).comment('Relative dual tolerance'))
        solver.add('eps_gap', float_(self.eps_gap).comment('Relative duality gap tolerance'))
        solver.add('scaling', boolean(str(self.scaling).casefold()).comment(
            'When true, equilibrates equality rows and the objective'
        ))
        solver.add('rho', float_(self.rho).comment('Initial penalty parameter'))
        solver.add('alpha', float_(self.alpha).comment('Over-relaxation factor in (0, 2)'))
        solver.add('adaptive_rho', boolean(str(self.adaptive_rho).casefold()).comment(
            'When true, rescales the penalty to balance residuals'
        ))
        solver.add('check_interval', integer(self.check_interval).comment(
            'Iterations between convergence checks'
        ))
        return solver

    @classmethod
    def decode_toml(cls, obj: DictObject) -> 'SolverConfig':
        """Decodes the 'solver' table.

        Parameters
        ----------
        obj : dict[str, any]
            The encoded 'solver' table.

        Returns
        -------
        SolverConfig
            The decoded 'solver' table.
        """
        return SolverConfig(**obj)

    def settings(self, seed: int = 42, threads: int = 1) -> SolverSettings:
        """Creates the solver settings described by this table.

        Parameters
        ----------
        seed : int (default 42)
            The seed echoed by the solver.
        threads : int (default 1)
            The maximum number of workers for the cone projections.

        Returns
        -------
        SolverSettings
            The settings passed to the solver.
        """
        return SolverSettings(max_iter = self.max_iter, eps_primal = self.eps_primal,
            eps_dual = self.eps_dual, eps_gap = self.eps_gap, scaling = self.scaling,
            seed = seed, rho = self.rho, alpha = self.alpha,
            adaptive_rho = self.adaptive_rho, check_interval = self.check_interval,
            threads = threads)

class RuntimeConfig:
    """Configurations within the 'runtime' table."""

    def __init__(self, threads: int | None = None, size_cap: int = 4096) -> None:
        """
        Parameters
        ----------
        threads : int | None (default `None`)
            The maximum number of workers. When `None`, read from `SHADOWINV_THREADS`,
            or one if unset.
        size_cap : int (default 4096)
            The largest number of Choi operator rows of a full-space program that will be assembled.
        """
        self.threads: int = _default_threads() if threads is None else threads
        self.size_cap: int = size_cap

    def list_vals(self) -> List[str]:
        """Lists all configuration options.

        Returns
        -------
        list[str]
            A list of all config options.
        """
        return ['threads', 'size_cap']

    def encode_toml(self) -> Table:
        """Encodes the 'runtime' config into a table.

        Returns
        -------
        Table
            The encoded 'runtime' config.
        """
        runtime: Table = table()
        runtime.comment('Worker and memory limits')
        runtime.add('threads', integer(self.threads).comment('Maximum number of workers'))
        runtime.add('size_cap', integer(self.size_cap).comment(
            'Largest full Choi operator (rows) that will be assembled'
        ))
        return runtime

    @classmethod
    def decode_toml(cls, obj: DictObject) -> 'RuntimeConfig':
        """Decodes the 'runtime' table.

        Parameters
        ----------
        obj : dict[str, any]
            The encoded 'runtime' table.

        Returns
        -------
        RuntimeConfig
            The decoded 'runtime' table.
        """
        return RuntimeConfig(**obj)

class ShadowConfig:
    """Configurations for shadowinv."""

    def __init__(self, sampling: SamplingConfig | None = None,
            solver: SolverConfig | None = None, runtime: RuntimeConfig | None = None,
            dirpath: str = os.curdir) -> None:
        """
        Parameters
        ----------
        sampling : SamplingConfig | None (default `None`)
            The 'sampling' table within the configuration.
        solver : SolverConfig | None (default `None`)
            The 'solver' table within the configuration.
        runtime : RuntimeConfig | None (default `None`)
            The 'runtime' table within the configuration.
        dirpath : str (default '.')
            The root directory of the project.
        """
        self.sampling: SamplingConfig = SamplingConfig() if sampling is None else sampling
        self.solver: SolverConfig = SolverConfig() if solver is None else solver
        self.runtime: RuntimeConfig = RuntimeConfig() if runtime is None else runtime
        self.dirpath: str = dirpath

    def list_vals(self) -> List[str]:
        """Lists all configuration options.

        Returns
        -------
        list[str]
            A list of all config options.
        """
        output: List[str] = []
        output += map(lambda s: f'sampling.{s}', self.sampling.list_vals())
        output += map(lambda s: f'solver.{s}', self.solver.list_vals())
        output += map(lambda s: f'runtime.{s}', self.runtime.list_vals())
        return output

    def get_val(self, name: str) -> Tuple[bool, str]:
        """Gets the value associated with the config name.

        Parameters
        ----------
        name : str
            The key associated with the config value.

        Returns
        -------
        (bool, str)
            A tuple containing whether the operation was successful
            and the associated message.
        """
        if name not in self.list_vals():
            return (False, f'\'{name}\' is not a valid config option.')

        val: Any = self
        for key in name.split('.'):
            val = getattr(val, key)
        return (True, str(val))

    def set_val(self, name: str, new_value: Any) -> Tuple[bool, str]:
        """Sets the value for the associated config name.

        Parameters
        ----------
        name : str
            The key associated with the config value.
        new_value : Any
            The value, cast to the type of the previous value.

        Returns
        -------
        (bool, str)
            A tuple containing whether the operation was successful
            and the associated message.
        """
        if name not in self.list_vals():
            return (False, f'\'{name}\' is not a valid config option.')

        table_name, final_name = name.split('.')
        val: Any = getattr(self, table_name)

        # Store previous value for update and cast type
        prev: Any = getattr(val, final_name)
        try:
            new_value = str(new_value).casefold() == 'True'.casefold() \
                if isinstance(prev, bool) else type(prev)(new_value)
        except ValueError:
            return (False, f'\'{new_value}\' is not a valid {type(prev).__name__} for \'{name}\'.')
        setattr(val, final_name, new_value)

        return (True, f'{str(prev)} -> {str(new_value)}')

    def encode_toml(self) -> TOMLDocument:
        """Encodes the configuration.

        Returns
        -------
        TOMLDocument
            The encoded configuration.
        """
        doc: TOMLDocument = document()
        doc.add(comment('The configuration file for shadowinv'))
        doc.add('sampling', self.sampling.encode_toml())
        doc.add('solver', self.solver.encode_toml())
        doc.add('runtime', self.runtime.encode_toml())
        return doc

    @classmethod
    def decode_toml(cls, obj: DictObject) -> 'ShadowConfig':
        """Decodes the configuration.

        Parameters
        ----------
        obj : dict[str, any]
            The encoded configuration.

        Returns
        -------
        ShadowConfig
            The decoded configuration.
        """
        return ShadowConfig(
            sampling = SamplingConfig.decode_toml(obj.get('sampling', {})),
            solver = SolverConfig.decode_toml(obj.get('solver', {})),
            runtime = RuntimeConfig.decode_toml(obj.get('runtime', {})),
            dirpath = obj.get('dirpath', os.curdir)
        )

    def write_config(self, scope: int = 0) -> str:
        """Writes the configuration to a file within the specified scope.

        Parameters
        ----------
        scope : int (default '0')
            A number [0, 3] representing the project, site, user, or global config, respectively.

        Returns
        -------
        str
            The path of the written configuration.
        """
        output_path: str = config_loc(dirpath = self.dirpath, scope = scope)

        # Create directories that are missing
        if dirname := os.path.dirname(output_path):
            os.makedirs(dirname, exist_ok = True)

        with open(output_path, mode = 'w', encoding = 'UTF-8') as file:
            dump(self.encode_toml(), file)
        return output_path

def _update_dict(original: Dict[str, Any], merging: Dict[str, Any]) -> Dict[str, Any]:
    """Merges the second dictionary into the first, recursing into tables.

    Parameters
    ----------
    original : dict[str, any]
        The dictionary to merge into.
    merging : dict[str, any]
        The dictionary whose values take precedence.

    Returns
    -------
    dict[str, any]
        The merged dictionary.
    """
    for key, value in merging.items():
        if isinstance(value, dict) and isinstance(original.get(key), dict):
            original[key] = _update_dict(original[key], value)
        else:
            original[key] = value
    return original

def _read_and_update_dict(original: Dict[str, Any], path: str | None) -> Dict[str, Any]:
    """Reads a TOML file, if present, and merges it into the dictionary.

    Parameters
    ----------
    original : dict[str, any]
        The dictionary to merge into.
    path : str | None
        The location of the TOML file.

    Returns
    -------
    dict[str, any]
        The merged dictionary.
    """
    if path and os.path.exists(path):
        with open(path, mode = 'r', encoding = 'UTF-8') as file:
            original = _update_dict(original, load(file).unwrap())
    return original

def load_config(dirpath: str = os.curdir) -> ShadowConfig:
    """Loads the configuration, merging the global, user, site, environment
    variable, and project scopes in increasing order of precedence.

    Parameters
    ----------
    dirpath : str (default '.')
        The root directory of the project.

    Returns
    -------
    ShadowConfig
        The merged configuration.
    """
    config_dict: Dict[str, Any] = {}
    config_dict = _read_and_update_dict(config_dict, _global_config(_CONFIG_FILE))
    config_dict = _read_and_update_dict(config_dict, _user_config(_CONFIG_FILE))
    config_dict = _read_and_update_dict(config_dict, _site_config(_CONFIG_FILE))
    config_dict = _read_and_update_dict(config_dict, _env_var_config(_CONFIG_FILE))
    config_dict = _read_and_update_dict(config_dict,
        _project_config(dirpath, _PROJECT_CONFIG_FILE))
    config_dict['dirpath'] = dirpath
    return ShadowConfig.decode_toml(config_dict)

def config_loc(dirpath: str = os.curdir, scope: int = 0) -> str:
    """Returns the location of the configuration file within the specified scope.

    Parameters
    ----------
    dirpath : str (default '.')
        The root directory of the project.
    scope : int (default '0')
        A number [0, 3] representing the project, site, user, or global config, respectively.

    Returns
    -------
    str
        The location of the configuration file.
    """
    match scope:
        case 0:
            return _project_config(dirpath, _PROJECT_CONFIG_FILE)
        case 1:
            # Site falls back to the environment variable, then the user
            if (path := _env_var_config(_CONFIG_FILE)) is not None:
                return path
            if (path := _site_config(_CONFIG_FILE)) is not None:
                return path
            return _user_config(_CONFIG_FILE)
        case 2:
            return _user_config(_CONFIG_FILE)
        case 3:
            return _global_config(_CONFIG_FILE)
        case _:
            raise ValueError(f'Scope {scope} is not within [0, 3].')
