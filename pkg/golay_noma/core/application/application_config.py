from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from golay_noma.commons.json_config_repository import JsonConfigRepository


class LogLevel(str, Enum):
    TRACE = "TRACE"
    DEBUG = "DEBUG"
    INFO = "INFO"
    SUCCESS = "SUCCESS"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class LoguruConfig(BaseModel):
    """
    stderr always gets a sink at `log_level`. Long campaigns can keep a rotating file sink as
    well, usually at a more verbose `file_log_level`.
    """

    model_config = ConfigDict(extra="forbid")

    log_format: str = (
        "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{module}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
        "<level>{message}</level>"
    )
    log_level: LogLevel = LogLevel.INFO
    log_file_path: Optional[str] = None
    file_log_level: Optional[LogLevel] = None  # falls back to log_level
    log_rotation: Optional[str] = "100 MB"
    log_retention: Optional[str] = "7 days"
    enable_backtrace: bool = True
    enable_diagnose: bool = False

    @property
    def effective_file_log_level(self) -> LogLevel:
        return self.file_log_level or self.log_level


class ApplicationConfig(BaseModel):
    """
    Attributes:
        loguru_config: log sinks and level.
        properties_file_path: JSON or YAML file with the `analysis`, `search` and `simulation`
            sections; None runs on the built-in defaults.
        workers: default number of worker processes.
    """

    model_config = ConfigDict(extra="forbid")

    loguru_config: LoguruConfig = Field(default_factory=LoguruConfig)
    properties_file_path: Optional[str] = None
    workers: int = Field(default=1, ge=1)


class ApplicationConfigRepository(JsonConfigRepository[ApplicationConfig]):
    """The application configuration stored as a JSON file."""

    ...
