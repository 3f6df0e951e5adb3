import os
from shadowinv.config import (
    RuntimeConfig, SamplingConfig, ShadowConfig, SolverConfig, config_loc, load_config
)

def test_defaults():
    config: ShadowConfig = ShadowConfig()
    assert config.sampling.samples == 2000
    assert config.sampling.seed == 42
    assert config.solver.eps_primal == 1e-6
    assert config.runtime.threads == 1
    assert config.runtime.size_cap == 4096
    assert 'solver.check_interval' in config.list_vals()

def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv('SHADOWINV_THREADS', '4')
    assert RuntimeConfig().threads == 4
    monkeypatch.setenv('SHADOWINV_THREADS', 'many')
    assert RuntimeConfig().threads == 1
    assert RuntimeConfig(threads = 3).threads == 3

def test_get_and_set_values():
    config: ShadowConfig = ShadowConfig()
    assert config.get_val('sampling.seed') == (True, '42')
    assert config.set_val('sampling.samples', '500') == (True, '2000 -> 500')
    assert config.sampling.samples == 500
    assert config.set_val('solver.scaling', 'false')[0]
    assert config.solver.scaling is False
    assert not config.set_val('sampling.samples', 'lots')[0]
    assert not config.get_val('sampling.missing')[0]
    assert not config.set_val('solver', '1')[0]

def test_solver_settings_follow_table():
    settings = SolverConfig(max_iter = 10, alpha = 1.2).settings(seed = 3, threads = 2)
    assert settings.max_iter == 10
    assert settings.alpha == 1.2
    assert settings.seed == 3
    assert settings.threads == 2

def test_project_config_round_trip():
    config: ShadowConfig = ShadowConfig(sampling = SamplingConfig(samples = 77, seed = 9))
    path: str = config.write_config(0)
    assert path == config_loc(scope = 0)
    assert os.path.exists(path)
    loaded: ShadowConfig = load_config()
    assert loaded.sampling.samples == 77
    assert loaded.sampling.seed == 9
    assert loaded.solver.max_iter == SolverConfig().max_iter

def test_project_overrides_environment_scope(tmp_path):
    ShadowConfig(sampling = SamplingConfig(samples = 10, seed = 1)).write_config(1)
    assert config_loc(scope = 1) == os.sep.join([str(tmp_path / 'site'), 'shadowinv.toml'])
    assert load_config().sampling.samples == 10
    ShadowConfig(sampling = SamplingConfig(samples = 20, seed = 1)).write_config(0)
    loaded: ShadowConfig = load_config()
    assert loaded.sampling.samples == 20
    assert loaded.sampling.seed == 1

def test_partial_tables_keep_defaults(tmp_path):
    with open(tmp_path / '.shadowinv.toml', mode = 'w', encoding = 'UTF-8') as file:
        file.write('[solver]\neps_gap = 1e-4\n')
    loaded: ShadowConfig = load_config()
    assert loaded.solver.eps_gap == 1e-4
    assert loaded.solver.eps_dual == 1e-6
    assert loaded.sampling.samples == 2000
