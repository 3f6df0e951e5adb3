import json
import pytest
from shadowinv.formats import FormatRegistrar, read_artifact, setup, write_artifact
from shadowinv.record import ResultRecord, ResultRecordCodec
from shadowinv.struct.codec import ARTIFACT_VERSION, FormatError
from shadowinv.struct.registry import Registry, RegistryError
from shadowinv.utils import parallel_map, read_json, write_json
from shadowinv.module import MissingModuleError, has_module, lazy_import

def test_registry_is_bidirectional():
    registry: Registry[object] = Registry()
    value: object = object()
    registry['a'] = value
    assert registry.get_key(value) == 'a'
    with pytest.raises(RegistryError):
        registry['b'] = value
    with pytest.raises(RegistryError):
        registry['a'] = object()
    del registry['a']
    registry['b'] = value
    assert registry.get_key(value) == 'b'

def test_registrar_freezes():
    registrar: FormatRegistrar = FormatRegistrar()
    registrar.register_format('result', ResultRecordCodec(), ResultRecord)
    with pytest.raises(RegistryError):
        registrar.register_format('other', ResultRecordCodec(), ResultRecord)
    registrar.freeze()
    with pytest.raises(RegistryError):
        registrar.register_format('late', ResultRecordCodec(), dict)
    with pytest.raises(FormatError):
        registrar.get_codec('missing')
    with pytest.raises(FormatError):
        registrar.codec_for(1.0)

def test_package_formats():
    assert set(setup().names()) == {'schur-basis', 'comb', 'conic-problem', 'reduced-problem', 'result'}
    assert setup() is setup()

def test_result_record_artifact(tmp_path):
    record: ResultRecord = ResultRecord('count', config = {'d': 2}, values = {'variables': 8},
        wall_time = 0.5)
    path: str = str(tmp_path / 'nested' / 'count.json')
    write_artifact(record, path)
    loaded: ResultRecord = read_artifact(path, expected = 'result')
    assert loaded.command == 'count'
    assert loaded.values == {'variables': 8}
    assert loaded.timestamp == record.timestamp
    assert read_json(path)['version'] == ARTIFACT_VERSION
    with pytest.raises(FormatError):
        read_artifact(path, expected = 'comb')

def test_rejects_bad_artifacts(tmp_path):
    plain: str = write_json({'command': 'count'}, str(tmp_path / 'plain.json'))
    with pytest.raises(FormatError):
        read_artifact(plain)
    future: str = write_json({'format': 'result', 'version': ARTIFACT_VERSION + 1, 'command': 'x'},
        str(tmp_path / 'future.json'))
    with pytest.raises(FormatError):
        read_artifact(future)
    malformed: str = write_json({'format': 'result', 'version': ARTIFACT_VERSION},
        str(tmp_path / 'malformed.json'))
    with pytest.raises(FormatError):
        read_artifact(malformed)
    unknown: str = write_json({'format': 'spreadsheet', 'version': ARTIFACT_VERSION},
        str(tmp_path / 'unknown.json'))
    with pytest.raises(FormatError):
        read_artifact(unknown)

def test_write_json_is_stable(tmp_path):
    first: str = write_json({'b': 1, 'a': [1.5, 2]}, str(tmp_path / 'one.json'))
    second: str = write_json({'b': 1, 'a': [1.5, 2]}, str(tmp_path / 'two.json'))
    with open(first, encoding = 'UTF-8') as file_one, open(second, encoding = 'UTF-8') as file_two:
        text: str = file_one.read()
        assert text == file_two.read()
    assert list(json.loads(text)) == ['b', 'a']

@pytest.mark.parametrize('threads', [1, 3])
def test_parallel_map_keeps_order(threads):
    assert parallel_map(lambda val: val * val, range(10), threads) == [val * val for val in range(10)]

def test_optional_modules():
    assert has_module('json')
    assert not has_module('shadowinv_missing_module')
    with pytest.raises(MissingModuleError):
        lazy_import('shadowinv_missing_module', 'crosscheck')
