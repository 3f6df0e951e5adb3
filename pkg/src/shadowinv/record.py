"""A script containing the record written by every command and its
'result' artifact codec.
"""

from typing import Any, Dict
from shadowinv.struct.codec import DictObject, ArtifactCodec
from shadowinv.utils import utc_timestamp

_REGISTRY_NAME: str = 'result'
"""The registry name of the artifact format."""

def setup(registrar) -> None:
    """A setup method used to register the artifact format.

    Parameters
    ----------
    registrar : `FormatRegistrar`
        The registrar holding the artifact codecs.
    """
    registrar.register_format(_REGISTRY_NAME, ResultRecordCodec(), ResultRecord)

class ResultRecord:
    """The outcome of a command: its echo and configuration, the values it
    computed, and the files it wrote."""

    def __init__(self, command: str, config: Dict[str, Any] | None = None,
            values: Dict[str, Any] | None = None, residuals: Dict[str, Any] | None = None,
            wall_time: float = 0.0, artifacts: Dict[str, str] | None = None,
            timestamp: str | None = None) -> None:
        """
        Parameters
        ----------
        command : str
            The name of the command.
        config : dict[str, Any] | None (default `None`)
            The resolved configuration of the run.
        values : dict[str, Any] | None (default `None`)
            The computed objectives, counts, or checks.
        residuals : dict[str, Any] | None (default `None`)
            The residual summaries.
        wall_time : float (default 0.0)
            The wall time of the run in seconds.
        artifacts : dict[str, str] | None (default `None`)
            The paths of the files written, by kind.
        timestamp : str | None (default `None`)
            The UTC ISO-8601 time of the run, or now when `None`.
        """
        self.command: str = command
        self.config: Dict[str, Any] = {} if config is None else config
        self.values: Dict[str, Any] = {} if values is None else values
        self.residuals: Dict[str, Any] = {} if residuals is None else residuals
        self.wall_time: float = wall_time
        self.artifacts: Dict[str, str] = {} if artifacts is None else artifacts
        self.timestamp: str = utc_timestamp() if timestamp is None else timestamp

    def __repr__(self) -> str:
        return f'ResultRecord({self.command!r}, values={self.values})'

class ResultRecordCodec(ArtifactCodec[ResultRecord]):
    """A codec for encoding and decoding a ResultRecord.
    """

    def __init__(self) -> None:
        super().__init__(_REGISTRY_NAME)

    def encode_type(self, obj: ResultRecord, dict_obj: DictObject) -> DictObject:
        dict_obj['command'] = obj.command
        dict_obj['config'] = obj.config
        dict_obj['values'] = obj.values
        dict_obj['residuals'] = obj.residuals
        dict_obj['wall_time'] = obj.wall_time
        dict_obj['artifacts'] = obj.artifacts
        dict_obj['timestamp'] = obj.timestamp
        return dict_obj

    def decode_type(self, obj: DictObject) -> ResultRecord:
        return ResultRecord(obj['command'], config = obj.get('config'), values = obj.get('values'),
            residuals = obj.get('residuals'), wall_time = float(obj.get('wall_time', 0.0)),
            artifacts = obj.get('artifacts'), timestamp = obj.get('timestamp'))
