from golay_noma.services.analysis_service import AnalysisService
from golay_noma.services.matrix_service import MatrixService
from golay_noma.services.properties import AnalysisProperties, SearchProperties, SimulationProperties
from golay_noma.services.search_service import SearchService
from golay_noma.services.simulation_service import SimulationService
from golay_noma.services.verification_service import VerificationService

DEFAULT_COMPONENTS = [MatrixService, AnalysisService, SearchService, SimulationService, VerificationService]
DEFAULT_PROPERTIES = [AnalysisProperties, SearchProperties, SimulationProperties]
