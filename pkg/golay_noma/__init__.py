from golay_noma.core.application.golay_noma_application import GolayNomaApplication
from golay_noma.core.entities.component import Component, ComponentScope
from golay_noma.core.entities.properties.properties import Properties

__version__ = "0.1.0"
