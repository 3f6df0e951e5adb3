"""A script containing the methods needed for command line integration.

Exit codes: 0 on success, 1 when the input is invalid, 2 when a numerical
check or solve fails.
"""

import os
import time
from typing import Any, Callable, Dict, List, Tuple
import click
import numpy as np
from tomlkit import load as load_toml
from shadowinv.log import Logger
from shadowinv.config import SCOPES, ShadowConfig, load_config, config_loc as cloc
from shadowinv.module import MissingModuleError
from shadowinv.formats import read_artifact, write_artifact
from shadowinv.record import ResultRecord
from shadowinv.utils import read_json
from shadowinv.struct.codec import decode_complex
from shadowinv.tensor import PAULI_Z, choi_operator, haar_unitary, kron, random_density, \
    sample_unitaries
from shadowinv.rep.schur import SchurBasis, SchurError, schur_basis_unitary_group
from shadowinv.rep.centralizer import combined_schur_basis, sample_centralizer
from shadowinv.rep.counting import full_variable_count, moment_unitary, variable_count, \
    variable_count_bound
from shadowinv.comb.model import ARCHITECTURES, CombChoi, CombSpec, Observable
from shadowinv.comb.channel import objective_estimate
from shadowinv.comb.constraints import CombReport, validate_comb
from shadowinv.qubit.gates import COMPLETIONS, CircuitGates, GateError, build_gates
from shadowinv.qubit.circuit import postselected_inversion, simulate_shadow_channel
from shadowinv.qubit.fit import StructureFit, apply_choi, fit_structure
from shadowinv.solver.problem import ConicProblem, SolveResult, SolverError, SolverSettings
from shadowinv.solver.admm import solve
from shadowinv.solver.codec import export_problem, import_problem
from shadowinv.solver.crosscheck import solve_with_cvxpy
from shadowinv.sdp.reduced import ReducedProblem, assemble_reduced, reduced_to_conic
from shadowinv.sdp.full import assemble_full, choi_from_result
from shadowinv.sdp.reconstruct import blocks_from_result, reconstruct_choi

ZERO_THRESHOLD: float = 1e-3
"""The optimum below which an objective is declared zero under Monte-Carlo noise."""

CIRCUIT_TOL: float = 1e-10
"""The tolerance of the circuit checks."""

SCHUR_TOL: float = 1e-10
"""The tolerance of the Schur basis checks."""

TABLE1_TARGETS: Dict[str, Tuple[float, float, float]] = {
    'sequential': (0.7058, 0.1894, 0.0),
    'parallel': (0.7058, 0.4707, 0.3536)
}
"""The reference optima for `d = 2`, `O = Z`, and `t = 1, 2, 3`."""

TABLE1_TOL: float = 0.02
"""The agreement expected with the reference optima."""

class NumericalFailure(click.ClickException):
    """Raised when a numerical check or solve fails."""
    exit_code = 2

class ShadowGroup(click.Group):
    """A command group mapping invalid input to exit code 1 and numerical
    failures to exit code 2."""

    def make_context(self, info_name: str | None, args: List[str], parent: click.Context | None = None,
            **extra: Any) -> click.Context:
        try:
            return super().make_context(info_name, args, parent = parent, **extra)
        except click.UsageError as err:
            err.exit_code = 1
            raise

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as err:
            err.exit_code = 1
            raise
        # LinAlgError subclasses ValueError
        except np.linalg.LinAlgError as err:
            raise NumericalFailure(str(err)) from err
        except (ValueError, MissingModuleError) as err:
            raise click.ClickException(str(err)) from err
        except (SolverError, SchurError, GateError) as err:
            raise NumericalFailure(str(err)) from err

@click.group(cls = ShadowGroup)
@click.option('--verbose', '-v', is_flag = True, help = 'When \'true\', displays debug messages.')
@click.option('--quiet', '-q', is_flag = True, help = 'When \'true\', hides progress lines.')
@click.option('--threads', type = click.IntRange(min = 1), default = None,
    help = 'The maximum number of workers. Defaults to the runtime config.')
@click.pass_context
def main(ctx: click.Context, verbose: bool = False, quiet: bool = False,
        threads: int | None = None) -> None:
    """A command line interface to build and verify shadow inversion circuits,
    count and solve the symmetry-reduced programs, and reproduce the comparison
    of sequential and parallel combs.
    """
    ctx.ensure_object(dict)
    ctx.obj['logger'] = Logger(verbose = verbose, quiet = quiet)
    ctx.obj['threads'] = threads

def _session(ctx: click.Context) -> Tuple[Logger, ShadowConfig, int]:
    """Returns the logger, the merged configuration, and the worker count of a command."""
    prj_config: ShadowConfig = load_config()
    threads: int | None = ctx.obj.get('threads')
    return ctx.obj['logger'], prj_config, prj_config.runtime.threads if threads is None else threads

def parse_observable(text: str, dim: int | None = None) -> Observable:
    """Parses an observable from a name ('Z'), a comma-separated diagonal
    ('1,1,0'), or a JSON matrix file.

    A matrix file holds a nested list of reals, an object with 'real' and
    'imag' nested lists, or an encoded complex array with 'shape' and 'data'.

    Parameters
    ----------
    text : str
        The observable option.
    dim : int | None (default `None`)
        The dimension the observable must act on, or any when `None`.

    Returns
    -------
    Observable
        The parsed observable.
    """
    if os.path.isfile(text):
        obj: Any = read_json(text)
        if isinstance(obj, dict) and 'data' in obj:
            matrix: np.ndarray = decode_complex(obj)
        elif isinstance(obj, dict):
            matrix = np.asarray(obj['real'], dtype = float) \
                + 1j * np.asarray(obj.get('imag', np.zeros_like(obj['real'])), dtype = float)
        else:
            matrix = np.asarray(obj, dtype = complex)
        observable: Observable = Observable(matrix, name = os.path.basename(text))
    elif ',' in text:
        try:
            values: List[float] = [float(val) for val in text.split(',') if val.strip()]
        except ValueError as err:
            raise click.BadParameter(f'\'{text}\' is not a list of reals.', param_hint = '--obs') from err
        observable = Observable.from_diagonal(values)
    else:
        observable = Observable.named(text)
    if dim is not None and observable.dim != dim:
        raise click.BadParameter(f'The observable acts on dimension {observable.dim}, not d = {dim}.',
            param_hint = '--obs')
    return observable

def _settings(prj_config: ShadowConfig, seed: int, threads: int, **overrides: Any) -> SolverSettings:
    """Returns the solver settings of the config with the given options applied."""
    for name, value in overrides.items():
        if value is not None:
            setattr(prj_config.solver, name, value)
    return prj_config.solver.settings(seed = seed, threads = threads)

def _finish(logger: Logger, record: ResultRecord, out: str | None) -> None:
    """Writes the record when an output path is given."""
    if out is not None:
        record.artifacts['result'] = out
        write_artifact(record, out)
        logger.debug(f'Wrote result to \'{out}\'')

def _solve_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Adds the options shared by the commands that assemble a program."""
    options: List[Callable[..., Any]] = [
        click.option('--d', 'dim', type = click.IntRange(min = 2), default = 2, show_default = True,
            help = 'The dimension of the unitary.'),
        click.option('--t', 'slots', type = click.IntRange(min = 1), default = 1, show_default = True,
            help = 'The number of queries.'),
        click.option('--arch', 'architecture', type = click.Choice(list(ARCHITECTURES)),
            default = 'sequential', show_default = True, help = 'The causal structure of the comb.'),
        click.option('--obs', 'obs_text', default = 'Z', show_default = True,
            help = 'A name, a comma-separated diagonal, or a JSON matrix file.'),
        click.option('--samples', type = click.IntRange(min = 1), default = None,
            help = 'The number of sampled unitaries. Defaults to the sampling config.'),
        click.option('--seed', type = int, default = None,
            help = 'The seed of the sampled unitaries. Defaults to the sampling config.'),
        click.option('--reduced/--full', default = True, show_default = True,
            help = 'Whether to assemble the symmetry-reduced or the full program.'),
        click.option('--size-cap', type = click.IntRange(min = 1), default = None,
            help = 'The largest full Choi operator (in rows). Defaults to the runtime config.')
    ]
    for option in reversed(options):
        func = option(func)
    return func

def _assemble(observable: Observable, slots: int, architecture: str, samples: int, seed: int,
        reduced: bool, size_cap: int, threads: int,
        logger: Logger) -> Tuple[ReducedProblem | None, ConicProblem]:
    if reduced:
        problem: ReducedProblem = assemble_reduced(observable, slots, architecture, samples, seed,
            threads = threads, logger = logger)
        return problem, reduced_to_conic(problem)
    return None, assemble_full(observable, slots, architecture, samples, seed, size_cap = size_cap,
        threads = threads, logger = logger)

def _confirm_zero(observable: Observable, slots: int, architecture: str, samples: int, seed: int,
        reduced: bool, size_cap: int, threads: int, prj_config: ShadowConfig,
        logger: Logger) -> SolveResult:
    """Re-solves a program at the next seed to confirm a vanishing optimum."""
    logger.debug(f'Confirming the zero optimum at seed {seed + 1}')
    _, second = _assemble(observable, slots, architecture, samples, seed + 1, reduced, size_cap,
        threads, logger)
    return solve(second, _settings(prj_config, seed + 1, threads), logger)

def _comb_of(problem: ReducedProblem | None, conic_spec: CombSpec, result: SolveResult) -> CombChoi:
    if problem is None:
        return choi_from_result(conic_spec, result)
    return reconstruct_choi(blocks_from_result(problem, result), problem.tensor, problem.choice,
        problem.spec.architecture)

@main.command(name = 'solve')
@_solve_options
@click.option('--max-iter', type = click.IntRange(min = 1), default = None, help = 'The iteration limit.')
@click.option('--eps-primal', type = float, default = None, help = 'The primal residual tolerance.')
@click.option('--eps-dual', type = float, default = None, help = 'The dual residual tolerance.')
@click.option('--eps-gap', type = float, default = None, help = 'The duality gap tolerance.')
@click.option('--confirm', is_flag = True,
    help = 'When \'true\', re-solves at the next seed when the optimum is below 1e-3.')
@click.option('--out', '-o', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the JSON result.')
@click.option('--comb-out', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the reconstructed comb.')
@click.pass_context
def solve_cmd(ctx: click.Context, dim: int, slots: int, architecture: str, obs_text: str,
        samples: int | None, seed: int | None, reduced: bool, size_cap: int | None,
        max_iter: int | None, eps_primal: float | None, eps_dual: float | None,
        eps_gap: float | None, confirm: bool, out: str | None, comb_out: str | None) -> None:
    """Assembles and solves the shadow inversion program, then evaluates the
    reconstructed comb on fresh unitaries drawn from the next seed.
    """
    logger, prj_config, threads = _session(ctx)
    observable: Observable = parse_observable(obs_text, dim)
    samples = prj_config.sampling.samples if samples is None else samples
    seed = prj_config.sampling.seed if seed is None else seed
    size_cap = prj_config.runtime.size_cap if size_cap is None else size_cap
    settings: SolverSettings = _settings(prj_config, seed, threads, max_iter = max_iter,
        eps_primal = eps_primal, eps_dual = eps_dual, eps_gap = eps_gap)
    begin: float = time.perf_counter()

    problem, conic = _assemble(observable, slots, architecture, samples, seed, reduced, size_cap,
        threads, logger)
    result: SolveResult = solve(conic, settings, logger)
    spec: CombSpec = CombSpec(dim, slots, architecture)
    record: ResultRecord = ResultRecord('solve', config = {
        'd': dim, 't': slots, 'architecture': architecture,
        'observable': observable.name or obs_text, 'samples': samples, 'seed': seed,
        'reduced': reduced, 'threads': threads, 'solver': settings.to_dict()
    })
    record.values['status'] = result.status
    record.values['objective'] = result.objective
    record.values['dual_objective'] = result.dual_objective
    record.values['iterations'] = result.iterations
    record.values['variables'] = problem.num_variables if problem is not None else spec.total_dim ** 2
    record.residuals['solver'] = result.to_dict()['residuals']
    record.residuals['merit'] = result.merit

    if not result.optimal:
        record.wall_time = time.perf_counter() - begin
        _finish(logger, record, out)
        raise NumericalFailure(f'The solver stopped with status \'{result.status}\' after '
            + f'{result.iterations} iterations (objective {result.objective:.6g}).')

    comb: CombChoi = _comb_of(problem, spec, result)
    report: CombReport = validate_comb(comb, tol = 1e-5)
    record.residuals['comb'] = report.to_dict()
    record.values['evaluation_seed'] = seed + 1
    record.values['evaluation'] = objective_estimate(comb, observable, samples, seed + 1, threads, logger)

    if confirm and result.objective < ZERO_THRESHOLD:
        confirmed: SolveResult = _confirm_zero(observable, slots, architecture, samples, seed, reduced,
            size_cap, threads, prj_config, logger)
        record.values['confirm_objective'] = confirmed.objective
        record.values['confirm_status'] = confirmed.status
        record.values['zero'] = confirmed.optimal and confirmed.objective < ZERO_THRESHOLD

    if comb_out is not None:
        write_artifact(comb, comb_out)
        record.artifacts['comb'] = comb_out
    record.wall_time = time.perf_counter() - begin
    _finish(logger, record, out)
    logger.success(f'objective = {result.objective:.6f}, evaluation = {record.values["evaluation"]:.6f} '
        + f'({result.iterations} iterations)')

@main.command(name = 'verify-circuit')
@click.option('--trials', type = int, default = 100, show_default = True,
    help = 'The number of Haar-random unitaries.')
@click.option('--states', type = click.IntRange(min = 1), default = 10, show_default = True,
    help = 'The number of random states per unitary.')
@click.option('--seed', type = int, default = 42, show_default = True, help = 'The seed of the samples.')
@click.option('--completion', type = click.Choice(COMPLETIONS), default = 'canonical', show_default = True,
    help = 'The completion of the partially specified gates.')
@click.option('--out', '-o', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the JSON result.')
@click.pass_context
def verify_circuit(ctx: click.Context, trials: int, states: int, seed: int, completion: str,
        out: str | None) -> None:
    """Checks the three-query circuit: the shadow identity for Z on random
    states, the structure of the induced channel, and the postselected inversion.
    """
    logger, _, threads = _session(ctx)
    if trials < 1:
        raise click.BadParameter(f'At least one trial is needed, found {trials}.', param_hint = '--trials')
    begin: float = time.perf_counter()
    gates: CircuitGates = build_gates(completion)
    rng: np.random.Generator = np.random.default_rng(seed)

    per_sample: List[Dict[str, Any]] = []
    fits: List[StructureFit] = []
    for index, unitary in enumerate(sample_unitaries(2, trials, seed)):
        choi: np.ndarray = simulate_shadow_channel(unitary, gates)
        identity: float = 0.0
        for _ in range(states):
            rho: np.ndarray = random_density(2, rng)
            expected: float = np.trace(unitary.conj().T @ rho @ unitary @ PAULI_Z).real
            identity = max(identity, abs(np.trace(apply_choi(choi, rho) @ PAULI_Z).real - expected))
        fit: StructureFit = fit_structure(choi, unitary)
        fits.append(fit)
        prob, conditional = postselected_inversion(unitary, gates)
        per_sample.append({
            'sample': index,
            'shadow_identity': identity,
            'fit': fit.to_dict(),
            'postselection_probability': prob,
            'postselection_channel': float(np.max(np.abs(conditional - choi_operator(unitary.conj().T))))
        })

    probabilities: np.ndarray = np.asarray([entry['postselection_probability'] for entry in per_sample])
    identity_max: float = max(entry['shadow_identity'] for entry in per_sample)
    probability_dev: float = float(np.max(np.abs(probabilities - 1 / 3)))
    inversion: float = max(entry['postselection_channel'] for entry in per_sample)
    checks: Dict[str, bool] = {
        'gates': bool(gates.unitarity_residual() < CIRCUIT_TOL),
        'shadow_identity': bool(identity_max < CIRCUIT_TOL),
        'structure': bool(all(fit.valid() for fit in fits)),
        'postselection': bool(probability_dev < CIRCUIT_TOL and inversion < CIRCUIT_TOL)
    }
    record: ResultRecord = ResultRecord('verify-circuit', config = {
        'trials': trials, 'states': states, 'seed': seed, 'completion': completion, 'threads': threads
    }, values = {
        'checks': checks,
        'postselection_probability': float(np.mean(probabilities)),
        'seeds': {'unitaries': seed, 'states': seed, 'child_streams': trials},
        'samples': per_sample
    }, residuals = {
        'gates': gates.unitarity_residual(),
        'shadow_identity': identity_max,
        'structure_fit': max(fit.residual for fit in fits),
        'postselection_probability': probability_dev,
        'postselection_channel': inversion
    }, wall_time = time.perf_counter() - begin)
    _finish(logger, record, out)

    for name, passed in checks.items():
        if passed:
            logger.success(f'{name}: passed')
        else:
            logger.error(f'{name}: failed')
    if not all(checks.values()):
        raise NumericalFailure('The circuit failed its checks.')

@main.command(name = 'count')
@click.option('--d', 'dim', type = click.IntRange(min = 2), default = 2, show_default = True,
    help = 'The dimension of the unitary.')
@click.option('--t', 'slots', type = click.IntRange(min = 1), default = 1, show_default = True,
    help = 'The number of queries.')
@click.option('--spectrum', default = None,
    help = 'Comma-separated eigenspace dimensions of the observable. Defaults to a split into two.')
@click.option('--out', '-o', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the JSON result.')
@click.pass_context
def count(ctx: click.Context, dim: int, slots: int, spectrum: str | None, out: str | None) -> None:
    """Counts the variables of the reduced program, its upper bound, and the
    variables of the full program.
    """
    logger, _, _ = _session(ctx)
    if spectrum is None:
        parts: List[int] = [dim - dim // 2, dim // 2]
    else:
        try:
            parts = [int(val) for val in spectrum.split(',') if val.strip()]
        except ValueError as err:
            raise click.BadParameter(f'\'{spectrum}\' is not a list of integers.',
                param_hint = '--spectrum') from err
    reduced: int = variable_count(dim, slots, parts)
    bound: int = variable_count_bound(dim, slots)
    full: int = full_variable_count(dim, slots)
    record: ResultRecord = ResultRecord('count', config = {'d': dim, 't': slots, 'spectrum': parts},
        values = {'variables': reduced, 'bound': bound, 'full': full})
    _finish(logger, record, out)
    logger.success(f'N = {reduced}', f'bound = {bound}', f'full = {full}', sep = '\n')

def _group_element(basis_kind: str, dim: int, size: int, observable: Observable | None,
        rng: np.random.Generator) -> np.ndarray:
    """Samples a representation matrix of the symmetry group of a basis."""
    unitary: np.ndarray = haar_unitary(dim, rng)
    if basis_kind == 'unitary':
        return kron(*([unitary] * size))
    slot_input: np.ndarray = sample_centralizer(observable.decomposition, rng)
    output: np.ndarray = sample_centralizer(observable.decomposition, rng)
    return kron(*([unitary] * (size + 1) + [slot_input] * size + [output]))

@main.command(name = 'schur-check')
@click.option('--d', 'dim', type = click.IntRange(min = 2), default = 2, show_default = True,
    help = 'The dimension of the unitary.')
@click.option('--n', 'copies', type = click.IntRange(min = 1), default = None,
    help = 'The number of tensor copies of the unitary group basis.')
@click.option('--t', 'slots', type = click.IntRange(min = 1), default = None,
    help = 'The number of queries of the combined basis.')
@click.option('--obs', 'obs_text', default = 'Z', show_default = True,
    help = 'The observable of the combined basis.')
@click.option('--elements', type = click.IntRange(min = 1), default = 20, show_default = True,
    help = 'The number of random group elements checked.')
@click.option('--seed', type = int, default = 42, show_default = True, help = 'The seed of the group elements.')
@click.option('--out', '-o', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the JSON result.')
@click.pass_context
def schur_check(ctx: click.Context, dim: int, copies: int | None, slots: int | None, obs_text: str,
        elements: int, seed: int, out: str | None) -> None:
    """Builds the Schur basis of `U^{⊗n}` (with `--n`) or the combined basis of
    a comb (with `--t`) and checks that it block-diagonalizes its group.
    """
    logger, _, _ = _session(ctx)
    if (copies is None) == (slots is None):
        raise click.UsageError('Exactly one of --n and --t must be given.')
    begin: float = time.perf_counter()
    observable: Observable | None = None
    if copies is not None:
        basis: SchurBasis = schur_basis_unitary_group(dim, copies, logger = logger)
        expected: int = moment_unitary(copies, dim)
        kind, size = 'unitary', copies
    else:
        observable = parse_observable(obs_text, dim)
        basis = combined_schur_basis(observable.decomposition, slots, logger = logger)
        expected = variable_count(dim, slots, observable.spectrum)
        kind, size = 'combined', slots

    rng: np.random.Generator = np.random.default_rng(seed)
    off_block: float = 0.0
    repetition: float = 0.0
    for _ in range(elements):
        element: np.ndarray = _group_element(kind, dim, size, observable, rng)
        off_block = max(off_block, basis.off_block_residual(element))
        repetition = max(repetition, basis.block_repetition_residual(element))
    residuals: Dict[str, float] = {
        'unitarity': basis.unitarity_residual(),
        'imaginary': basis.imag_residual(),
        'off_block': off_block,
        'repetition': repetition
    }
    checks: Dict[str, bool] = {name: val < SCHUR_TOL for name, val in residuals.items()}
    checks['multiplicity'] = basis.num_variables() == expected
    record: ResultRecord = ResultRecord('schur-check', config = {
        'd': dim, 'n': copies, 't': slots, 'observable': None if observable is None else observable.name,
        'elements': elements, 'seed': seed
    }, values = {
        'blocks': [{'label': str(row['label']), 'dim': row['dim'], 'mult': row['mult']}
            for row in basis.table()],
        'variables': basis.num_variables(),
        'expected_variables': expected,
        'checks': checks
    }, residuals = residuals, wall_time = time.perf_counter() - begin)
    _finish(logger, record, out)

    for row in basis.table():
        logger.debug(f'{row["label"]}: dim {row["dim"]}, mult {row["mult"]}')
    if not all(checks.values()):
        failed: List[str] = [name for name, passed in checks.items() if not passed]
        raise NumericalFailure(f'The Schur basis failed the checks {failed}.')
    logger.success(f'{len(basis.labels)} irreps, sum of squared multiplicities = {basis.num_variables()}')

@main.command(name = 'table1')
@click.option('--samples', type = click.IntRange(min = 1), default = None,
    help = 'The number of sampled unitaries. Defaults to the sampling config.')
@click.option('--seed', type = int, default = None, help = 'The seed. Defaults to the sampling config.')
@click.option('--t-max', type = click.IntRange(min = 1, max = 3), default = 3, show_default = True,
    help = 'The largest number of queries solved.')
@click.option('--csv', 'csv_path', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the CSV table.')
@click.option('--out', '-o', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the JSON result.')
@click.pass_context
def table1(ctx: click.Context, samples: int | None, seed: int | None, t_max: int,
        csv_path: str | None, out: str | None) -> None:
    """Solves the reduced programs for d = 2 and O = Z with sequential and
    parallel combs for every number of queries up to `--t-max`.
    """
    logger, prj_config, threads = _session(ctx)
    samples = prj_config.sampling.samples if samples is None else samples
    seed = prj_config.sampling.seed if seed is None else seed
    settings: SolverSettings = _settings(prj_config, seed, threads)
    observable: Observable = Observable.named('Z')
    begin: float = time.perf_counter()

    cells: Dict[str, List[float]] = {}
    timings: Dict[str, List[float]] = {}
    statuses: Dict[str, List[str]] = {}
    confirmations: Dict[str, Dict[str, Any]] = {}
    for architecture in ARCHITECTURES:
        cells[architecture], timings[architecture], statuses[architecture] = [], [], []
        for slots in range(1, t_max + 1):
            start: float = time.perf_counter()
            problem: ReducedProblem = assemble_reduced(observable, slots, architecture, samples, seed,
                threads = threads, logger = logger)
            result: SolveResult = solve(reduced_to_conic(problem), settings, logger)
            if TABLE1_TARGETS[architecture][slots - 1] == 0.0 and result.objective < ZERO_THRESHOLD:
                confirmed: SolveResult = _confirm_zero(observable, slots, architecture, samples, seed,
                    True, prj_config.runtime.size_cap, threads, prj_config, logger)
                confirmations[f'{architecture}/t={slots}'] = {
                    'seed': seed + 1,
                    'objective': confirmed.objective,
                    'status': confirmed.status,
                    'zero': confirmed.optimal and confirmed.objective < ZERO_THRESHOLD
                }
            cells[architecture].append(result.objective)
            timings[architecture].append(time.perf_counter() - start)
            statuses[architecture].append(result.status)
            logger.debug(f'{architecture} t={slots}: {result.objective:.6f} ({result.status})')

    deviations: Dict[str, List[float]] = {arch: [abs(val - target)
        for val, target in zip(vals, TABLE1_TARGETS[arch])] for arch, vals in cells.items()}
    record: ResultRecord = ResultRecord('table1', config = {
        'd': 2, 'observable': 'Z', 'samples': samples, 'seed': seed, 't_max': t_max,
        'threads': threads, 'solver': settings.to_dict()
    }, values = {
        'objectives': cells,
        'targets': {arch: list(vals[:t_max]) for arch, vals in TABLE1_TARGETS.items()},
        'tolerance': TABLE1_TOL,
        'statuses': statuses,
        'timings': timings,
        'confirmations': confirmations
    }, residuals = {'deviation': deviations}, wall_time = time.perf_counter() - begin)

    header: List[str] = ['architecture'] + [f't={slots}' for slots in range(1, t_max + 1)] \
        + [f'time_t={slots}' for slots in range(1, t_max + 1)] + ['tolerance', 'zero_confirmed']
    lines: List[str] = [','.join(header)]
    for arch, vals in cells.items():
        zero: List[str] = [str(entry['zero']).lower() for name, entry in confirmations.items()
            if name.startswith(f'{arch}/')]
        lines.append(','.join([arch] + [f'{val:.4f}' for val in vals]
            + [f'{val:.2f}' for val in timings[arch]] + [f'{TABLE1_TOL:g}', ';'.join(zero)]))
    if csv_path is not None:
        if dirname := os.path.dirname(csv_path):
            os.makedirs(dirname, exist_ok = True)
        with open(csv_path, mode = 'w', encoding = 'UTF-8') as file:
            file.write('\n'.join(lines) + '\n')
        record.artifacts['csv'] = csv_path
    _finish(logger, record, out)

    failed: List[str] = [f'{arch} t={slots + 1}' for arch, vals in statuses.items()
        for slots, status in enumerate(vals) if status != 'optimal']
    failed += [name for name, entry in confirmations.items() if not entry['zero']]
    if failed:
        raise NumericalFailure(f'The table did not converge or confirm for {failed}.')
    logger.success(*lines, sep = '\n')

@main.command(name = 'validate-comb')
@click.argument('path', type = click.Path(exists = True, dir_okay = False))
@click.option('--tol', type = float, default = 1e-8, show_default = True, help = 'The tolerance of every check.')
@click.option('--out', '-o', type = click.Path(dir_okay = False), default = None,
    help = 'The path of the JSON result.')
@click.pass_context
def validate_comb_cmd(ctx: click.Context, path: str, tol: float, out: str | None) -> None:
    """Checks a comb file against the constraints of its architecture."""
    logger, _, _ = _session(ctx)
    comb: CombChoi = read_artifact(path, expected = 'comb')
    report: CombReport = validate_comb(comb, tol = tol)
    record: ResultRecord = ResultRecord('validate-comb', config = {'path': path, 'tol': tol},
        values = {'valid': report.valid}, residuals = report.to_dict())
    _finish(logger, record, out)

    for name, residual in report.marginals:
        logger.debug(f'{name}: {residual:.3g}')
    if not report.valid:
        raise NumericalFailure(f'The comb is not a valid {comb.spec.architecture} comb '
            + f'(min eigenvalue {report.min_eigenvalue:.3g}, marginal {report.max_marginal_residual:.3g}, '
            + f'trace {report.trace_residual:.3g}).')
    logger.success(f'\'{path}\' is a valid {comb.spec.architecture} comb.')

@main.command(name = 'export-problem')
@_solve_options
@click.option('--kind', type = click.Choice(['conic', 'reduced']), default = 'conic', show_default = True,
    help = 'Whether to write the epigraph conic problem or the reduced problem.')
@click.argument('path', type = click.Path(dir_okay = False))
@click.pass_context
def export_problem_cmd(ctx: click.Context, dim: int, slots: int, architecture: str, obs_text: str,
        samples: int | None, seed: int | None, reduced: bool, size_cap: int | None, kind: str,
        path: str) -> None:
    """Assembles a program and writes it to a JSON file for external solvers."""
    logger, prj_config, threads = _session(ctx)
    if kind == 'reduced' and not reduced:
        raise click.UsageError('--kind reduced cannot be combined with --full.')
    observable: Observable = parse_observable(obs_text, dim)
    samples = prj_config.sampling.samples if samples is None else samples
    seed = prj_config.sampling.seed if seed is None else seed
    size_cap = prj_config.runtime.size_cap if size_cap is None else size_cap
    problem, conic = _assemble(observable, slots, architecture, samples, seed, reduced, size_cap,
        threads, logger)
    if kind == 'reduced':
        write_artifact(problem, path)
    else:
        export_problem(conic, path)
    logger.success(f'Wrote {conic!r} to \'{path}\'')

@main.command(name = 'crosscheck')
@click.argument('path', type = click.Path(exists = True, dir_okay = False))
@click.option('--solver', 'solver_name', default = None, help = 'The cvxpy solver name.')
@click.option('--internal', is_flag = True,
    help = 'When \'true\', also solves with the internal solver and reports the difference.')
@click.pass_context
def crosscheck(ctx: click.Context, path: str, solver_name: str | None, internal: bool) -> None:
    """Re-solves an exported conic problem with cvxpy."""
    logger, prj_config, threads = _session(ctx)
    problem: ConicProblem = import_problem(path)
    status, value = solve_with_cvxpy(problem, solver = solver_name)
    logger.success(f'cvxpy: {status}, optimum = {value:.6f}')
    if internal:
        result: SolveResult = solve(problem, _settings(prj_config, prj_config.sampling.seed, threads), logger)
        logger.success(f'internal: {result.status}, optimum = {result.objective:.6f}, '
            + f'difference = {abs(result.objective - value):.3g}')

@main.group(cls = ShadowGroup)
def config() -> None:
    """Helpers to generate, read, and write to a config.
    """

def _scope_index(scope: str) -> int:
    return SCOPES.index(scope.casefold())

@config.command(name = 'create')
@click.option('--project', '-p', is_flag = True,
    help = 'Generates a config for the current directory.')
@click.option('--site', '-s', is_flag = True,
    help = 'Generates a config for the set environment variable, ' \
    + 'virtual environment, or user if neither are specified.')
@click.option('--user', '-u', is_flag = True, help = 'Generates a config for the current user.')
@click.option('--global', '-g', '_global', is_flag = True, help = 'Generates a global config.')
@click.pass_context
def config_create(ctx: click.Context, project: bool = False, site: bool = False,
        user: bool = False, _global: bool = False) -> None:
    """Creates a configuration for the specified scope if it doesn't already
    exist. If no scope is specified, a config will be generated for the project
    scope.
    """
    logger: Logger = ctx.obj['logger']
    prj_config: ShadowConfig = ShadowConfig()
    requested: List[bool] = [project or not (project or site or user or _global), site, user, _global]

    configs_written: bool = False
    for scope, wanted in enumerate(requested):
        if not wanted:
            continue
        if os.path.exists(config_path := cloc(dirpath = prj_config.dirpath, scope = scope)):
            logger.skip(f'Config exists within {SCOPES[scope]} \'{config_path}\'')
        else:
            logger.debug(f'Creating config at {SCOPES[scope]} \'{config_path}\'')
            prj_config.write_config(scope = scope)
            configs_written = True

    if configs_written:
        logger.success('Configs have been generated!')
    else:
        logger.skip('Configs are already generated!')

@config.command(name = 'loc')
@click.option('--scope', '-s', type = click.Choice(SCOPES, case_sensitive = False),
    default = 'project',
    help = 'The configuration to look for. If none is specified, ' \
    + 'it will default to the project config.'
)
@click.pass_context
def config_loc(ctx: click.Context, scope: str = 'project') -> None:
    """Returns the location of the config file, if it exists."""
    logger: Logger = ctx.obj['logger']
    if os.path.exists(config_path := cloc(scope = _scope_index(scope))):
        logger.success(config_path)
    else:
        logger.error(
            f'No config for {scope}. Create the config using:',
            f'-> shadowinv config create --{scope}',
            sep = '\n'
        )
        raise click.UsageError(f'No config for {scope}.')

@config.command(name = 'list')
@click.pass_context
def config_list(ctx: click.Context) -> None:
    """Lists all available configuration options."""
    logger: Logger = ctx.obj['logger']
    top_message: List[str] = ['Available config options']
    top_message += map(lambda s: f'-> {s}', ShadowConfig().list_vals())
    logger.success(
        *top_message,
        sep = '\n'
    )

@config.command(name = 'value')
@click.argument('name')
@click.argument('value', required = False)
@click.option('--scope', '-s', type = click.Choice(SCOPES, case_sensitive = False),
    default = 'project',
    help = 'The configuration to look for. If none is specified, ' \
    + 'it will default to the project config.'
)
@click.pass_context
def config_value(ctx: click.Context, name: str, value: str | None = None, scope: str = 'project') -> None:
    """Gets the configuration value associated with the name in the
    specified scope. If the value is specified, the name will be updated
    to hold that value.
    """
    logger: Logger = ctx.obj['logger']
    scope_val: int = _scope_index(scope)
    if not os.path.exists(config_path := cloc(scope = scope_val)):
        logger.error(
            f'No config for {scope}. Create the config using:',
            f'-> shadowinv config create --{scope}',
            sep = '\n'
        )
        raise click.UsageError(f'No config for {scope}.')

    with open(config_path, mode = 'r', encoding = 'UTF-8') as file:
        loaded: dict = load_toml(file).unwrap()
        loaded['dirpath'] = os.curdir
        prj_config: ShadowConfig = ShadowConfig.decode_toml(loaded)

    if value:
        success, val = prj_config.set_val(name, value)
        if not success:
            raise click.BadParameter(f'[{scope}] {val}', param_hint = 'NAME')
        prj_config.write_config(scope = scope_val)
        logger.success(f'[{scope}] {name}: {val}')
    else:
        success, val = prj_config.get_val(name)
        if not success:
            raise click.BadParameter(f'[{scope}] {val}', param_hint = 'NAME')
        logger.success(f'[{scope}] {name} -> {val}')
