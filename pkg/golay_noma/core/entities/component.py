from enum import Enum
from typing import final

from loguru import logger


class ComponentLifeCycle(Enum):
    Init = "initialization"
    Destruction = "destruction"


class ComponentScope(Enum):
    Singleton = "Singleton"
    Prototype = "Prototype"  # built fresh on every lookup


class Component:
    """
    Base class of the application services. Collaborators are declared as class annotations,
    either other components or keyed properties, and are injected by the application context
    before `post_construct` runs:

        class SearchService(Component):
            search_properties: SearchProperties
    """

    class Config:
        scope: ComponentScope = ComponentScope.Singleton

    @classmethod
    def get_name(cls) -> str:
        return cls.__name__

    @classmethod
    def get_scope(cls) -> ComponentScope:
        return cls.Config.scope

    def post_construct(self) -> None:
        pass

    def pre_destroy(self) -> None:
        pass

    @final
    def finish_initialization_cycle(self) -> None:
        self.post_construct()
        logger.debug(f"[COMPONENT READY] {self.get_name()}")

    @final
    def finish_destruction_cycle(self) -> None:
        self.pre_destroy()
        logger.debug(f"[COMPONENT CLOSED] {self.get_name()}")
