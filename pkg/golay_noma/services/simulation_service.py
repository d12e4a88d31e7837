from loguru import logger

from golay_noma.core.entities.component import Component
from golay_noma.noma.campaign import CampaignConfig, CampaignRow, SimulationSettings, run_campaign
from golay_noma.services.properties import SearchProperties, SimulationProperties


class SimulationService(Component):
    simulation_properties: SimulationProperties
    search_properties: SearchProperties

    def settings(self) -> SimulationSettings:
        return SimulationSettings(
            degeneracy_tolerance=self.simulation_properties.degeneracy_tolerance,
            residual_floor=self.simulation_properties.residual_floor,
            frame_chunk=self.simulation_properties.frame_chunk,
            max_trials=self.search_properties.max_trials,
        )

    def resolve(self, campaign: CampaignConfig) -> CampaignConfig:
        """Applies the configured stopping rule when the campaign does not name one."""
        if "stopping_rule" in campaign.model_fields_set:
            return campaign
        return campaign.model_copy(update={"stopping_rule": self.simulation_properties.stopping_rule})

    def run(self, campaign: CampaignConfig, workers: int = 1) -> list[CampaignRow]:
        campaign = self.resolve(campaign)
        logger.info(f"[SIMULATION] {len(campaign.points())} grid points, {campaign.frames} frames each")
        return run_campaign(campaign, workers, self.settings())
