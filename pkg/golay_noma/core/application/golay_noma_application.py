import sys
from typing import Iterable, Optional, Type, TypeVar

from loguru import logger

from golay_noma.core.application.application_config import ApplicationConfig, ApplicationConfigRepository
from golay_noma.core.application.context.application_context import ApplicationContext, ApplicationContextConfig
from golay_noma.core.entities.component import Component, ComponentLifeCycle
from golay_noma.core.entities.properties.properties import Properties
from golay_noma.services import DEFAULT_COMPONENTS, DEFAULT_PROPERTIES

T = TypeVar("T", bound=Component)


class GolayNomaApplication:
    """
    Bootstraps the services behind the command line:
    - reads the application config (JSON file, or defaults when no path is given),
    - configures the loguru sinks,
    - registers the service components and properties with the application context,
    - loads properties, builds the singletons, injects dependencies and runs their hooks.

    Use `start()`/`close()` or the context-manager form:

        with GolayNomaApplication(config_path) as app:
            app.get_component(SearchService).rank_pmf(5, seed=7)
    """

    def __init__(
        self,
        app_config_path: Optional[str] = None,
        app_config: Optional[ApplicationConfig] = None,
        components: Iterable[Type[Component]] = DEFAULT_COMPONENTS,
        properties: Iterable[Type[Properties]] = DEFAULT_PROPERTIES,
    ) -> None:
        if app_config is None and app_config_path is not None:
            logger.debug(f"[APP INIT] Initialize the app from config path: {app_config_path}")
            app_config = ApplicationConfigRepository(app_config_path).get_config()
        self.app_config = app_config or ApplicationConfig()
        self.components = list(components)
        self.properties = list(properties)
        self.app_context = ApplicationContext(
            ApplicationContextConfig(properties_path=self.app_config.properties_file_path)
        )
        self._started = False

    def _configure_logging(self) -> None:
        config = self.app_config.loguru_config
        logger.remove()
        logger.add(
            sys.stderr,
            format=config.log_format,
            level=config.log_level.value,
            backtrace=config.enable_backtrace,
            diagnose=config.enable_diagnose,
        )
        if not config.log_file_path:
            return
        logger.add(
            config.log_file_path,
            format=config.log_format,
            level=config.effective_file_log_level.value,
            rotation=config.log_rotation,
            retention=config.log_retention,
            backtrace=config.enable_backtrace,
            diagnose=config.enable_diagnose,
        )

    def _handle_singleton_components_life_cycle(self, life_cycle: ComponentLifeCycle) -> None:
        for component in self.app_context.get_singleton_component_instances():
            match life_cycle:
                case ComponentLifeCycle.Init:
                    component.finish_initialization_cycle()
                case ComponentLifeCycle.Destruction:
                    component.finish_destruction_cycle()

    def start(self) -> "GolayNomaApplication":
        if self._started:
            return self
        self._configure_logging()
        for properties_cls in self.properties:
            self.app_context.register_properties(properties_cls)
        for component_cls in self.components:
            self.app_context.register_component(component_cls)
        self.app_context.load_properties()
        self.app_context.init_ioc_container()
        self.app_context.inject_dependencies_for_components()
        self._handle_singleton_components_life_cycle(ComponentLifeCycle.Init)
        self._started = True
        logger.debug(f"[APP STARTED] {self.app_context.as_view().model_dump()}")
        return self

    def close(self) -> None:
        if not self._started:
            return
        self._handle_singleton_components_life_cycle(ComponentLifeCycle.Destruction)
        self._started = False

    def get_component(self, component_cls: Type[T]) -> T:
        return self.app_context.require_component(component_cls)

    def __enter__(self) -> "GolayNomaApplication":
        return self.start()

    def __exit__(self, *exc_info: object) -> None:
        self.close()
