from golay_noma.noma.campaign import (
    CampaignConfig,
    CampaignRow,
    SimulationSettings,
    format_campaign_csv,
    run_campaign,
    run_scenario,
    write_campaign_csv,
)
from golay_noma.noma.metrics import FrameMetrics, MetricsRecord, aggregate_metrics, evaluate_metrics
from golay_noma.noma.recovery import RankDeficiencyError, RecoveryResult, StoppingRule, oracle_ls, somp_recover
from golay_noma.noma.scenario import EmptyFrameError, FrameScenario, ScenarioConfig, generate_frame, scenario_matrix
