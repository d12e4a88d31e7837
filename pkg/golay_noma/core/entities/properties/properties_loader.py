import json
from pathlib import Path
from typing import Any, Callable, Optional, Type, Union

import cachetools
import yaml
from loguru import logger

from golay_noma.commons.errors import GolayNomaError
from golay_noma.core.entities.properties.properties import Properties


class InvalidPropertiesKeyError(GolayNomaError): ...


_EXTENSION_LOADERS: dict[str, Callable[[str], Any]] = {
    "json": json.loads,
    "yaml": yaml.safe_load,
    "yml": yaml.safe_load,
}


@cachetools.cached(cache=cachetools.LRUCache(maxsize=32))
def _parse_properties_content(file_extension: str, file_content: str) -> dict[str, dict]:
    loader = _EXTENSION_LOADERS.get(file_extension)
    if loader is None:
        raise ValueError(f"[INVALID FILE EXTENSION] Unsupported file extension: {file_extension}")
    document = loader(file_content)
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ValueError("[INVALID PROPERTIES FILE] The top level must be a mapping of properties keys")
    return document


class _PropertiesLoader:
    """
    Builds one instance of every registered `Properties` class. Sections come from a JSON or
    YAML file when a path is given; sections absent from the file (or every section, without a
    file) use the class defaults.
    """

    def __init__(
        self, properties_path: Optional[Union[str, Path]], properties_classes: list[Type[Properties]]
    ) -> None:
        self.properties_path = None if properties_path is None else Path(properties_path)
        self.properties_classes = properties_classes
        self.properties_class_map = {_cls.get_key(): _cls for _cls in properties_classes}

    @property
    def available_properties_keys(self) -> list[str]:
        return list(self.properties_class_map.keys())

    def _read_sections(self) -> dict[str, dict]:
        if self.properties_path is None:
            return {}
        file_extension = self.properties_path.suffix.lstrip(".")
        if not file_extension:
            raise ValueError(
                f"[UNABLE TO LOAD PROPERTIES] Invalid file path: {self.properties_path}, no file extension found"
            )
        sections = _parse_properties_content(file_extension, self.properties_path.read_text())
        logger.debug(f"[PROPERTIES LOADED] {self.properties_path}: sections {list(sections)}")
        return sections

    def load_properties(self) -> dict[str, Properties]:
        sections = self._read_sections()
        for key in sections:
            if key not in self.properties_class_map:
                raise InvalidPropertiesKeyError(
                    f"[INVALID PROPERTIES KEY] Invalid properties key: {key}, please enter one of the following [{','.join(self.available_properties_keys)}]"
                )
        properties: dict[str, Properties] = {}
        for key, properties_cls in self.properties_class_map.items():
            properties[key] = properties_cls.from_section(sections.get(key))
        return properties
