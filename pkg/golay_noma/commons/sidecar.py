from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, Field

from golay_noma.commons.json_config_repository import JsonConfigRepository


class ArtifactSidecar(BaseModel):
    """
    Written next to every artifact: the command, the resolved arguments (seed included) and
    the configuration actually used, so the artifact can be regenerated from this file alone.
    """

    command: str
    argv: list[str]
    seed: Optional[int] = None
    version: str
    config: dict[str, Any] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)


class SidecarRepository(JsonConfigRepository[ArtifactSidecar]): ...


def sidecar_path(artifact_path: Union[str, Path]) -> Path:
    path = Path(artifact_path)
    return path.with_name(path.name + ".json")


def write_sidecar(artifact_path: Union[str, Path], sidecar: ArtifactSidecar) -> Path:
    path = sidecar_path(artifact_path)
    SidecarRepository.create(path, sidecar)
    return path


def read_sidecar(path: Union[str, Path]) -> ArtifactSidecar:
    return SidecarRepository(path).get_config()
