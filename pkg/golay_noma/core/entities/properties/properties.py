from typing import Any, ClassVar, Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict


class Properties(BaseModel):
    """
    A keyed section of the properties file. Subclasses set `__key__` to the top-level key they
    read and give every field a default, so a missing section or field falls back to it.
    Unknown fields are rejected.
    """

    model_config = ConfigDict(extra="forbid")

    __key__: ClassVar[str] = ""

    @classmethod
    def get_key(cls) -> str:
        if not cls.__key__:
            raise ValueError(f"[KEY NOT SET] Properties key is not set for class: {cls.__name__}")
        return cls.__key__

    @classmethod
    def from_section(cls, section: Optional[dict[str, Any]]) -> "Properties":
        if section is None:
            logger.debug(f"[PROPERTIES DEFAULTS] No section {cls.get_key()!r}, using defaults of {cls.__name__}")
        return cls.model_validate(section or {})
