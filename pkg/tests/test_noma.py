import numpy as np
import pytest
from pydantic import ValidationError
from pytest_mock import MockerFixture

from golay_noma.commons.errors import DimensionMismatchError, GolayNomaError
from golay_noma.gf2 import Permutation
from golay_noma.noma import (
    CampaignConfig,
    EmptyFrameError,
    FrameScenario,
    RankDeficiencyError,
    RecoveryResult,
    ScenarioConfig,
    StoppingRule,
    aggregate_metrics,
    evaluate_metrics,
    format_campaign_csv,
    generate_frame,
    oracle_ls,
    run_campaign,
    run_scenario,
    scenario_matrix,
    somp_recover,
)
from golay_noma.noma.campaign import CampaignRow
from golay_noma.noma.metrics import FrameMetrics, MetricsRecord
from golay_noma.noma.recovery import slice_qpsk, stopping_threshold
from golay_noma.noma.scenario import qpsk_symbols
from golay_noma.search.reference_tables import REFERENCE_PERMUTATION_SETS
from golay_noma.sequences import SequenceFamily, spreading_matrix
from golay_noma.sequences.baselines import nearest_prime


@pytest.fixture
def golay_matrix():
    return spreading_matrix(REFERENCE_PERMUTATION_SETS[0].permutations[:2])


@pytest.fixture
def scenario() -> ScenarioConfig:
    return ScenarioConfig(M=32, L=2, J=7, p_a=0.1, snr_db=15.0, frames=10, seed=99)


def single_device_frame(matrix, device: int, J: int = 4) -> FrameScenario:
    h = np.zeros(matrix.N, dtype=np.complex128)
    h[device] = 0.8 - 0.6j
    U = np.zeros((matrix.N, J), dtype=np.complex128)
    U[device, 0] = 1.0
    U[device, 1:] = qpsk_symbols(np.array([[0, 1], [1, 1], [1, 0]][: J - 1]))
    Y = matrix.entries @ (h[:, None] * U)
    return FrameScenario(frame_index=0, active_set=np.array([device]), h=h, U=U, Y=Y, sigma_n2=0.0)


class TestScenarioConfig:
    def test_golay_needs_power_of_two(self):
        with pytest.raises(DimensionMismatchError):
            ScenarioConfig(M=100, L=2, p_a=0.1, snr_db=10, frames=1)

    def test_other_families_accept_any_length(self):
        assert ScenarioConfig(M=100, L=2, p_a=0.1, snr_db=10, frames=1, family="zc").family == SequenceFamily.Zc

    def test_permutation_count_must_match_blocks(self):
        with pytest.raises(DimensionMismatchError):
            ScenarioConfig(M=8, L=2, p_a=0.1, snr_db=10, frames=1, permutations=["1,2,3"])

    def test_permutations_parse_from_text(self):
        cfg = ScenarioConfig(M=8, L=2, p_a=0.1, snr_db=10, frames=1, permutations=["1,2,3", [2, 1, 3]])
        assert cfg.permutations == [Permutation.of(1, 2, 3), Permutation.of(2, 1, 3)]

    def test_unknown_keys_are_rejected(self):
        with pytest.raises(ValidationError):
            ScenarioConfig.model_validate({"M": 8, "L": 1, "p_a": 0.1, "snr_db": 0, "frames": 1, "snr": 3})

    def test_derived_quantities(self, scenario: ScenarioConfig):
        assert scenario.m == 5
        assert scenario.snr_linear == pytest.approx(10**1.5)

    def test_missing_seed(self):
        with pytest.raises(ValueError, match="MISSING SEED"):
            ScenarioConfig(M=8, L=1, p_a=0.1, snr_db=0, frames=1).required_seed()


class TestScenarioMatrix:
    def test_golay_uses_reference_set(self, scenario: ScenarioConfig):
        matrix = scenario_matrix(scenario)
        assert matrix.permutations == REFERENCE_PERMUTATION_SETS[0].permutations[:2]

    def test_zadoff_chu_length_is_nearest_prime(self, scenario: ScenarioConfig):
        matrix = scenario_matrix(scenario.model_copy(update={"family": SequenceFamily.Zc}))
        assert (matrix.M, matrix.N) == (31, 62)

    def test_random_matrix_depends_on_seed(self, scenario: ScenarioConfig):
        bipolar = scenario.model_copy(update={"family": SequenceFamily.Bipolar})
        np.testing.assert_array_equal(scenario_matrix(bipolar).entries, scenario_matrix(bipolar).entries)
        other = bipolar.model_copy(update={"seed": 100})
        assert not np.array_equal(scenario_matrix(bipolar).entries, scenario_matrix(other).entries)


class TestGenerateFrame:
    def test_deterministic_per_frame(self, scenario: ScenarioConfig, golay_matrix):
        first = generate_frame(scenario, golay_matrix, 3)
        second = generate_frame(scenario, golay_matrix, 3)
        np.testing.assert_array_equal(first.Y, second.Y)
        np.testing.assert_array_equal(first.active_set, second.active_set)
        assert not np.array_equal(first.Y, generate_frame(scenario, golay_matrix, 4).Y)

    def test_joint_sparsity_and_pilot(self, scenario: ScenarioConfig, golay_matrix):
        frame = generate_frame(scenario, golay_matrix, 0)
        assert frame.K >= 1
        inactive = np.setdiff1d(np.arange(frame.N), frame.active_set)
        assert not frame.U[inactive].any()
        np.testing.assert_array_equal(frame.U[frame.active_set, 0], 1.0)
        np.testing.assert_allclose(np.abs(frame.U[frame.active_set, 1:]), 1.0)

    def test_noise_meets_per_device_snr(self, scenario: ScenarioConfig, golay_matrix):
        ratios = []
        for index in range(300):
            frame = generate_frame(scenario, golay_matrix, index)
            energy = np.sum(np.abs(frame.Y) ** 2)
            ratios.append(energy / (frame.K * frame.J * frame.Y.shape[0] * frame.sigma_n2))
        assert abs(10 * np.log10(np.mean(ratios)) - scenario.snr_db) < 0.5

    def test_mean_activity(self, golay_matrix):
        cfg = ScenarioConfig(M=32, L=2, p_a=0.25, snr_db=10, frames=1, seed=7)
        counts = [generate_frame(cfg, golay_matrix, index).K for index in range(400)]
        expected = 0.25 * 64
        assert abs(np.mean(counts) - expected) < 3 * np.sqrt(expected * 0.75 / 400) + 0.1

    def test_zero_activity_requires_override(self, golay_matrix):
        cfg = ScenarioConfig(M=32, L=2, p_a=0.0, snr_db=10, frames=1, seed=1)
        with pytest.raises(EmptyFrameError):
            generate_frame(cfg, golay_matrix, 0)

        frame = generate_frame(cfg.model_copy(update={"allow_empty_frames": True}), golay_matrix, 0)
        assert frame.K == 0
        assert frame.sigma_n2 == pytest.approx(1 / (32 * 10.0))
        result = somp_recover(golay_matrix, frame.Y, frame.sigma_n2)
        assert len(result.support) <= 16


class TestSomp:
    def test_zero_observation(self, golay_matrix):
        result = somp_recover(golay_matrix, np.zeros((32, 7)), 0.0)
        assert result.support == []
        assert result.iterations == 0
        assert result.X_hat.shape == (0, 7)

    @pytest.mark.parametrize("device", [0, 17, 45])
    def test_noiseless_single_device(self, golay_matrix, device: int):
        frame = single_device_frame(golay_matrix, device)
        result = somp_recover(golay_matrix, frame.Y, 0.0)
        assert result.support == [device]
        assert result.iterations == 1
        np.testing.assert_allclose(result.X_hat, frame.X[[device]], atol=1e-12)
        np.testing.assert_allclose(result.U_hat, frame.U[[device], 1:])

    def test_never_repeats_columns_and_residual_decreases(self, golay_matrix):
        cfg = ScenarioConfig(M=32, L=2, p_a=0.2, snr_db=5.0, frames=1, seed=3)
        for index in range(20):
            frame = generate_frame(cfg, golay_matrix, index)
            result = somp_recover(golay_matrix, frame.Y, frame.sigma_n2, max_iter=24)
            assert len(result.support) == len(set(result.support)) <= 24
            assert np.all(np.diff(result.residual_history) <= 1e-9)

    def test_frobenius_threshold_is_looser(self):
        assert stopping_threshold(0.1, 7, 32, StoppingRule.Frobenius) == pytest.approx(
            np.sqrt(32) * stopping_threshold(0.1, 7, 32, StoppingRule.RowMax)
        )

    def test_slot_count_mismatch(self, golay_matrix):
        with pytest.raises(DimensionMismatchError):
            somp_recover(golay_matrix, np.zeros((32, 7)), 0.0, J=5)

    def test_dependent_columns_flag_degeneracy(self):
        A = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        Y = np.array([[1.0], [1.0]])
        result = somp_recover(A, Y, 0.0, max_iter=2, residual_floor=0.0)
        assert len(result.support) == 2
        assert not result.degenerate

        duplicated = np.array([[1.0, 1.0], [0.0, 0.0]])
        result = somp_recover(duplicated, np.ones((2, 1)), 0.0, max_iter=2)
        assert result.support == [0]
        assert result.degenerate

    def test_slicing(self):
        values = np.array([0.3 + 0.1j, -2 - 0.5j, 0.2 - 0.9j])
        np.testing.assert_allclose(slice_qpsk(values) * np.sqrt(2), [1 + 1j, -1 - 1j, 1 - 1j])


class TestOracle:
    def test_noiseless_fit_is_exact(self, scenario: ScenarioConfig, golay_matrix):
        cfg = scenario.model_copy(update={"snr_db": 300.0})
        frame = generate_frame(cfg, golay_matrix, 2)
        result = oracle_ls(golay_matrix, frame.Y, frame.active_set)
        np.testing.assert_allclose(result.X_hat, frame.X[frame.active_set], atol=1e-9)

    def test_empty_support(self, golay_matrix):
        result = oracle_ls(golay_matrix, np.zeros((32, 3)), [])
        assert result.support == [] and result.X_hat.shape == (0, 3)

    def test_support_larger_than_rows(self, golay_matrix):
        with pytest.raises(RankDeficiencyError):
            oracle_ls(golay_matrix, np.zeros((32, 3)), range(33))


class TestMetrics:
    def test_perfect_recovery(self, golay_matrix):
        frame = single_device_frame(golay_matrix, 5)
        metrics = evaluate_metrics(frame, oracle_ls(golay_matrix, frame.Y, frame.active_set))
        assert (metrics.aer, metrics.ser, metrics.missed, metrics.false_alarms) == (0.0, 0.0, 0, 0)
        assert metrics.nmse == pytest.approx(0.0, abs=1e-20)

    def test_false_alarm(self, golay_matrix):
        frame = single_device_frame(golay_matrix, 5)
        exact = oracle_ls(golay_matrix, frame.Y, frame.active_set)
        with_alarm = RecoveryResult(
            support=[5, 9],
            X_hat=np.vstack([exact.X_hat, np.full((1, 4), 0.01 + 0.01j)]),
        )
        metrics = evaluate_metrics(frame, with_alarm)
        assert metrics.aer == pytest.approx(1 / 64)
        assert metrics.ser == 0.0

    def test_missed_device_counts_every_symbol(self):
        J = 3
        h = np.array([1.0 + 0j, 0.5j, 0.0, 0.0])
        U = np.zeros((4, J), dtype=np.complex128)
        U[:2, 0] = 1.0
        U[:2, 1:] = qpsk_symbols(np.array([[[0, 0], [1, 1]], [[0, 1], [1, 0]]]))
        truth = FrameScenario(
            frame_index=0, active_set=np.array([0, 1]), h=h, U=U, Y=np.zeros((2, J)), sigma_n2=0.1
        )
        detected = RecoveryResult(support=[0], X_hat=(h[0] * U[0])[None, :])
        metrics = evaluate_metrics(truth, detected)
        assert metrics.missed == 1
        assert metrics.symbol_errors == J - 1
        assert metrics.ser == pytest.approx(1 / 2)
        assert metrics.aer == pytest.approx(1 / 4)
        assert metrics.nmse == pytest.approx(0.25 / 1.25)

    def test_empty_frames_only_count_for_activity(self):
        truth = FrameScenario(
            frame_index=0,
            active_set=np.array([], dtype=np.int64),
            h=np.ones(4, dtype=np.complex128),
            U=np.zeros((4, 3), dtype=np.complex128),
            Y=np.zeros((2, 3)),
            sigma_n2=0.1,
        )
        metrics = evaluate_metrics(truth, RecoveryResult(support=[2], X_hat=np.ones((1, 3), dtype=np.complex128)))
        assert metrics.nmse is None and metrics.ser is None
        assert metrics.aer == 0.25

        record = aggregate_metrics([metrics, metrics.model_copy(update={"aer": 0.0, "nmse": 0.1, "ser": 0.0})])
        assert record.aer == pytest.approx(0.125)
        assert record.nmse_frames == 1
        assert record.nmse_db == pytest.approx(-10.0)

    def test_aggregate_requires_frames(self):
        with pytest.raises(ValueError):
            aggregate_metrics([])

    def test_frame_metrics_aggregate_into_reported_record(self, golay_matrix):
        frame = single_device_frame(golay_matrix, 3)
        metrics = evaluate_metrics(frame, somp_recover(golay_matrix, frame.Y, 0.0, J=4))
        assert isinstance(metrics, FrameMetrics)
        record = aggregate_metrics([metrics])
        assert isinstance(record, MetricsRecord)
        assert (record.frames, record.aer, record.ser, record.aer_sem) == (1, metrics.aer, metrics.ser, 0.0)


class TestCampaign:
    @pytest.fixture
    def campaign(self) -> CampaignConfig:
        return CampaignConfig(M=32, L=2, J=4, p_a=0.1, snr_db=[5.0, 20.0], frames=12, family=["golay", "bipolar"], seed=5)

    def test_grid_order(self, campaign: CampaignConfig):
        points = campaign.points()
        assert [(point.family.value, point.snr_db) for point in points] == [
            ("golay", 5.0), ("golay", 20.0), ("bipolar", 5.0), ("bipolar", 20.0)
        ]
        assert [point.index for point in points] == [0, 1, 2, 3]

    def test_same_seed_same_csv(self, campaign: CampaignConfig):
        assert format_campaign_csv(run_campaign(campaign)) == format_campaign_csv(run_campaign(campaign))

    def test_worker_count_does_not_change_csv(self, campaign: CampaignConfig):
        assert format_campaign_csv(run_campaign(campaign, workers=1)) == format_campaign_csv(
            run_campaign(campaign, workers=2)
        )

    def test_csv_header(self, campaign: CampaignConfig):
        text = format_campaign_csv(
            run_campaign(campaign.model_copy(update={"snr_db": 10.0, "family": SequenceFamily.Golay}))
        )
        header, row = text.splitlines()
        assert header.split(",")[:14] == [
            "family", "M", "N", "L", "J", "p_a", "snr_db", "frames", "seed",
            "aer", "nmse_db", "ser", "oracle_nmse_db", "oracle_ser",
        ]
        assert row.startswith("golay,32,64,2,4,0.1,10,12,5,")

    def test_infeasible_point_does_not_abort_grid(self):
        campaign = CampaignConfig(M=8, L=4, p_a=0.2, snr_db=10.0, frames=3, family=["golay", "bipolar"], seed=1)
        golay, bipolar = run_campaign(campaign)
        assert golay.error and "INFEASIBLE" in golay.error
        assert golay.somp is None
        assert bipolar.error is None and bipolar.somp is not None

    def test_missing_seed_is_drawn(self, campaign: CampaignConfig):
        rows = run_campaign(campaign.model_copy(update={"seed": None, "family": SequenceFamily.Golay, "snr_db": 10.0}))
        assert isinstance(rows[0].seed, int)

    def test_oracle_is_never_worse(self):
        cfg = ScenarioConfig(M=32, L=2, J=7, p_a=0.1, snr_db=10.0, frames=40, seed=21)
        row = run_scenario(cfg)
        assert isinstance(row, CampaignRow)
        assert row.oracle.nmse <= row.somp.nmse  # type: ignore[union-attr,operator]

    @pytest.mark.slow
    def test_golay_detects_activity_better_than_gaussian(self):
        campaign = CampaignConfig(
            M=128, L=4, J=7, p_a=0.1, snr_db=15.0, frames=200, family=["golay", "gaussian"], seed=2024
        )
        golay, gaussian = run_campaign(campaign, workers=2)
        assert golay.somp.aer < 0.1  # type: ignore[union-attr]
        assert golay.somp.aer <= gaussian.somp.aer  # type: ignore[union-attr]

    @pytest.mark.slow
    def test_metrics_improve_with_snr(self):
        campaign = CampaignConfig(M=128, L=4, J=7, p_a=0.1, snr_db=[5.0, 10.0, 15.0, 20.0], frames=200, seed=77)
        rows = run_campaign(campaign, workers=2)
        for low, high in zip(rows, rows[1:]):
            assert high.somp.aer <= low.somp.aer + 2 * (low.somp.aer_sem + high.somp.aer_sem)  # type: ignore[union-attr]
            assert high.oracle.nmse <= high.somp.nmse  # type: ignore[union-attr,operator]

    def test_overfull_support_only_drops_oracle_frames(self):
        # Binomial(256, 0.1) activity exceeds M=32 in a few of these frames
        campaign = CampaignConfig(M=32, L=8, p_a=0.1, snr_db=15.0, frames=60, seed=3)
        (row,) = run_campaign(campaign)
        assert row.error is None
        assert row.somp is not None and row.somp.frames == 60
        assert row.oracle is not None and 0 < row.oracle.frames < 60

    def test_rank_deficient_oracle_keeps_somp_metrics(self, mocker: MockerFixture):
        mocker.patch(
            "golay_noma.noma.campaign.oracle_ls",
            side_effect=RankDeficiencyError("[ORACLE LS] Support columns are linearly dependent"),
        )
        cfg = ScenarioConfig(M=32, L=2, J=4, p_a=0.1, snr_db=10.0, frames=6, seed=8)
        row = run_scenario(cfg)
        assert row.error is None
        assert row.somp is not None and row.somp.frames == 6
        assert row.oracle is None
        assert row.to_csv_row()[12:14] == ["", ""]

    def test_failed_zadoff_chu_point_reports_prime_device_count(self, mocker: MockerFixture):
        mocker.patch("golay_noma.noma.campaign.scenario_matrix", side_effect=GolayNomaError("no matrix"))
        campaign = CampaignConfig(M=32, L=3, p_a=0.1, snr_db=10.0, frames=2, family=["zc", "gaussian"], seed=4)
        zc, gaussian = run_campaign(campaign)
        assert zc.error == "no matrix" and gaussian.error == "no matrix"
        assert zc.N == nearest_prime(32) * 3 == 93
        assert gaussian.N == 32 * 3

    @pytest.mark.slow
    def test_golay_activity_detection_against_baselines(self):
        campaign = CampaignConfig(
            M=128, L=4, J=7, p_a=0.1, snr_db=15.0, frames=150, family=["golay", "bipolar", "zc"], seed=11
        )
        golay, bipolar, zc = run_campaign(campaign, workers=2)
        assert golay.somp and bipolar.somp and zc.somp
        assert golay.somp.aer <= bipolar.somp.aer + 2 * (golay.somp.aer_sem + bipolar.somp.aer_sem)
        assert golay.somp.aer <= 2 * zc.somp.aer + 2 * (golay.somp.aer_sem + zc.somp.aer_sem)
