from inspect import isclass
from typing import Optional, Type, TypeVar, cast

from loguru import logger
from pydantic import BaseModel

from golay_noma.core.entities.component import Component, ComponentScope
from golay_noma.core.entities.properties.properties import Properties
from golay_noma.core.entities.properties.properties_loader import _PropertiesLoader

T = TypeVar("T", bound=Component)
PT = TypeVar("PT", bound=Properties)


class ComponentNotFoundError(Exception): ...


class ApplicationContextConfig(BaseModel):
    properties_path: Optional[str] = None  # None: every properties class keeps its defaults


class ApplicationContextView(BaseModel):
    config: ApplicationContextConfig
    component_cls_container: list[str]
    singleton_component_instance_container: list[str]
    properties_keys: list[str]


class ApplicationContext:
    """
    Holds the registered service components and keyed properties of one application run:
        1. registers component and properties classes,
        2. loads properties (file sections or class defaults),
        3. instantiates singleton components,
        4. injects the components' annotated dependencies.
    """

    def __init__(self, config: ApplicationContextConfig) -> None:
        self.primitive_types = (bool, str, int, float, type(None))
        self.config = config
        self.component_cls_container: dict[str, Type[Component]] = {}
        self.singleton_component_instance_container: dict[str, Component] = {}
        self.properties_cls_container: dict[str, Type[Properties]] = {}
        self.singleton_properties_instance_container: dict[str, Properties] = {}

    def as_view(self) -> ApplicationContextView:
        return ApplicationContextView(
            config=self.config,
            component_cls_container=list(self.component_cls_container.keys()),
            singleton_component_instance_container=list(self.singleton_component_instance_container.keys()),
            properties_keys=list(self.properties_cls_container.keys()),
        )

    def get_component(self, component_cls: Type[T]) -> Optional[T]:
        if not issubclass(component_cls, Component):
            return None
        component_cls_name = component_cls.get_name()
        if component_cls_name not in self.component_cls_container:
            return None

        match component_cls.get_scope():
            case ComponentScope.Singleton:
                return cast(T, self.singleton_component_instance_container.get(component_cls_name))
            case ComponentScope.Prototype:
                return component_cls()

    def require_component(self, component_cls: Type[T]) -> T:
        optional_component = self.get_component(component_cls)
        if optional_component is None:
            raise ComponentNotFoundError(
                f"[COMPONENT NOT FOUND] Component: {component_cls.__name__} is not registered or not initialized"
            )
        return optional_component

    def get_properties(self, properties_cls: Type[PT]) -> Optional[PT]:
        properties_key = properties_cls.get_key()
        if properties_key not in self.properties_cls_container:
            return None
        return cast(PT, self.singleton_properties_instance_container.get(properties_key))

    def register_component(self, component_cls: Type[Component]) -> None:
        if not isclass(component_cls) or not issubclass(component_cls, Component):
            raise TypeError(
                f"[COMPONENT REGISTRATION ERROR] Component: {component_cls} is not a subclass of Component"
            )
        self.component_cls_container[component_cls.get_name()] = component_cls

    def register_properties(self, properties_cls: Type[Properties]) -> None:
        if not isclass(properties_cls) or not issubclass(properties_cls, Properties):
            raise TypeError(
                f"[PROPERTIES REGISTRATION ERROR] Properties: {properties_cls} is not a subclass of Properties"
            )
        self.properties_cls_container[properties_cls.get_key()] = properties_cls

    def get_singleton_component_instances(self) -> list[Component]:
        return list(self.singleton_component_instance_container.values())

    def load_properties(self) -> None:
        loader = _PropertiesLoader(self.config.properties_path, list(self.properties_cls_container.values()))
        for properties_key, properties in loader.load_properties().items():
            if properties_key in self.singleton_properties_instance_container:
                continue
            logger.debug(f"[INITIALIZING SINGLETON PROPERTIES] Init singleton properties: {properties_key}")
            self.singleton_properties_instance_container[properties_key] = properties

    def init_ioc_container(self) -> None:
        for component_cls_name, component_cls in self.component_cls_container.items():
            if component_cls.get_scope() != ComponentScope.Singleton:
                continue
            logger.debug(f"[INITIALIZING SINGLETON COMPONENT] Init singleton component: {component_cls_name}")
            self.singleton_component_instance_container[component_cls_name] = component_cls()

    def _inject_entity_dependencies(self, entity: Type[Component]) -> None:
        for attr_name, annotated_cls in entity.__annotations__.items():
            if annotated_cls in self.primitive_types:
                logger.warning(
                    f"[DEPENDENCY INJECTION SKIPPED] Skip inject dependency for attribute: {attr_name} because {annotated_cls.__name__} is a primitive type"
                )
                continue
            if not isclass(annotated_cls):
                continue

            if issubclass(annotated_cls, Properties):
                optional_properties = self.get_properties(annotated_cls)
                if optional_properties is None:
                    raise TypeError(
                        f"[PROPERTIES INJECTION ERROR] Properties: {annotated_cls.__name__} with key: {annotated_cls.get_key()} is not registered"
                    )
                setattr(entity, attr_name, optional_properties)
                continue

            optional_component = self.get_component(annotated_cls) if issubclass(annotated_cls, Component) else None
            if optional_component is not None:
                setattr(entity, attr_name, optional_component)
                logger.debug(
                    f"[DEPENDENCY INJECTION SUCCESS] Inject {annotated_cls.__name__} into {entity.__name__}.{attr_name}"
                )
                continue

            error_message = f"[DEPENDENCY INJECTION FAILED] Fail to inject dependency for attribute: {attr_name} with dependency: {annotated_cls.__name__}, consider registering it as a component"
            logger.critical(error_message)
            raise ValueError(error_message)

    def inject_dependencies_for_components(self) -> None:
        for component_cls in self.component_cls_container.values():
            self._inject_entity_dependencies(component_cls)
