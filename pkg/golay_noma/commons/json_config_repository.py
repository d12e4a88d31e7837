import json
from pathlib import Path
from typing import Generic, Optional, Type, TypeVar, Union, get_args

from loguru import logger
from pydantic import BaseModel

T = TypeVar("T", bound=BaseModel)


class JsonConfigRepository(Generic[T]):
    """
    Loads and saves one pydantic model of type `T` as a JSON document, optionally stored under
    `target_key` of a larger document. Subclasses bind `T`:

        class ApplicationConfigRepository(JsonConfigRepository[ApplicationConfig]): ...
    """

    def __init__(self, file_path: Union[str, Path], target_key: Optional[str] = None) -> None:
        self.base_model_cls: Type[T] = self.__class__._get_model_cls()
        self.file_path = Path(file_path)
        self.target_key = target_key
        self._config: T = self._load_config()

    @classmethod
    def _get_model_cls(cls) -> Type[T]:
        return get_args(cls.__orig_bases__[0])[0]  # type: ignore

    @classmethod
    def create(cls, file_path: Union[str, Path], config: T) -> "JsonConfigRepository[T]":
        """Writes `config` to a new file and returns a repository bound to it."""
        model_cls = cls._get_model_cls()
        if not isinstance(config, model_cls):
            raise TypeError(
                f"[BASE MODEL CLASS TYPE MISMATCH] Repository model: {model_cls.__name__} mismatch with config class: {config.__class__.__name__}"
            )
        path = Path(file_path)
        path.write_text(config.model_dump_json(indent=4))
        logger.debug(f"[CONFIG SAVED] {model_cls.__name__} written to {path}")
        return cls(path)

    def get_config(self) -> T:
        return self._config

    def reload_config(self) -> None:
        self._config = self._load_config()

    def save_config(self) -> None:
        self.save_config_to_target_path(self.file_path)

    def save_config_to_target_path(self, file_path: Union[str, Path]) -> None:
        if not isinstance(self._config, self.base_model_cls):
            raise TypeError(
                f"[BASE MODEL CLASS TYPE MISMATCH] Repository model: {self.base_model_cls.__name__} mismatch with config class: {self._config.__class__.__name__}"
            )
        Path(file_path).write_text(self._config.model_dump_json(indent=4))

    def _load_config(self) -> T:
        if BaseModel not in self.base_model_cls.__mro__:
            raise TypeError(
                "[BASE MODEL INHERITANCE REQUIRED] JsonConfigRepository requires a pydantic.BaseModel subclass"
            )
        content = self.file_path.read_text()
        if self.target_key is None:
            return self.base_model_cls.model_validate_json(content)
        document = json.loads(content)
        if self.target_key not in document:
            raise ValueError(f"[TARGET KEY NOT FOUND] Target key: {self.target_key} not found in {self.file_path}")
        return self.base_model_cls.model_validate(document[self.target_key])
