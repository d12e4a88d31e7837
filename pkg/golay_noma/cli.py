import csv
import io
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import click
import typer
from loguru import logger
from pydantic import BaseModel, ValidationError

from golay_noma import __version__
from golay_noma.analysis.characterize import CharacterizationRow, TrialSelection
from golay_noma.commons.errors import GolayNomaError
from golay_noma.commons.matrix_io import read_matrix, write_matrix, write_matrix_csv
from golay_noma.commons.permutation_io import read_permutations, write_permutations
from golay_noma.commons.rng import draw_master_seed
from golay_noma.commons.sidecar import ArtifactSidecar, read_sidecar, write_sidecar
from golay_noma.core.application.application_config import ApplicationConfig, ApplicationConfigRepository, LogLevel
from golay_noma.core.application.golay_noma_application import GolayNomaApplication
from golay_noma.gf2.permutation import Permutation
from golay_noma.noma.campaign import CampaignConfig, format_campaign_csv
from golay_noma.noma.recovery import StoppingRule
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix
from golay_noma.services import (
    AnalysisService,
    MatrixService,
    SearchService,
    SimulationService,
    VerificationService,
)

WORKERS_ENVVAR = "GOLAY_NOMA_WORKERS"
USAGE_EXIT_CODE = 2
MISMATCH_EXIT_CODE = 1

app = typer.Typer(
    name="golay-noma",
    help="Golay complementary spreading sequences for grant-free NOMA.",
    add_completion=False,
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)


class CliState(BaseModel):
    argv: list[str]
    app_config_path: Optional[str] = None
    log_level: Optional[LogLevel] = None

    def application(self) -> GolayNomaApplication:
        config = (
            ApplicationConfigRepository(self.app_config_path).get_config()
            if self.app_config_path
            else ApplicationConfig()
        )
        if self.log_level is not None:
            config.loguru_config.log_level = self.log_level
        return GolayNomaApplication(app_config=config)

    def resolved_argv(self, seed: Optional[int]) -> list[str]:
        """The invocation with an auto-drawn seed made explicit."""
        if seed is None or "--seed" in self.argv:
            return list(self.argv)
        return [*self.argv, "--seed", str(seed)]


_invocation_argv: list[str] = []

WorkersOption = typer.Option(None, "--workers", envvar=WORKERS_ENVVAR, min=1, help="Worker processes.")
SeedOption = typer.Option(None, "--seed", help="Master seed; drawn and recorded when omitted.")


def _state(ctx: typer.Context) -> CliState:
    return ctx.find_root().obj


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    drawn = draw_master_seed()
    logger.info(f"[SEED] No --seed given, drew {drawn}")
    return drawn


def _resolve_workers(application: GolayNomaApplication, workers: Optional[int]) -> int:
    return workers if workers is not None else application.app_config.workers


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.write_text(text)
    logger.success(f"[ARTIFACT WRITTEN] {out}")


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _record(
    ctx: typer.Context,
    out: Optional[Path],
    seed: Optional[int],
    config: Optional[dict[str, Any]] = None,
    results: Optional[dict[str, Any]] = None,
) -> None:
    state = _state(ctx)
    sidecar = ArtifactSidecar(
        command=ctx.info_name or "",
        argv=state.resolved_argv(seed),
        seed=seed,
        version=__version__,
        config=config or {},
        results=results or {},
    )
    logger.info(f"[RESOLVED CONFIGURATION] {sidecar.model_dump_json()}")
    if out is not None:
        path = write_sidecar(out, sidecar)
        logger.debug(f"[SIDECAR WRITTEN] {path}")


def _parse_roots(zc_roots: Optional[str]) -> Optional[list[int]]:
    if not zc_roots:
        return None
    return [int(token) for token in zc_roots.split(",")]


def _load_permutations(path: Optional[Path]) -> Optional[list[Permutation]]:
    return None if path is None else read_permutations(path)


def _matrix(
    application: GolayNomaApplication,
    family: SequenceFamily,
    m: int,
    L: int,
    seed: int,
    permutations: Optional[Path],
    zc_roots: Optional[str],
    N: Optional[int] = None,
    workers: int = 1,
) -> SpreadingMatrix:
    return application.get_component(MatrixService).build(
        family,
        m,
        L,
        seed,
        permutations=_load_permutations(permutations),
        zc_roots=_parse_roots(zc_roots),
        N=N,
        workers=workers,
    )


@app.callback()
def main_options(
    ctx: typer.Context,
    app_config: Optional[Path] = typer.Option(None, "--app-config", help="Application config JSON."),
    log_level: Optional[LogLevel] = typer.Option(None, "--log-level", case_sensitive=False),
) -> None:
    ctx.obj = CliState(
        argv=list(_invocation_argv),
        app_config_path=None if app_config is None else str(app_config),
        log_level=log_level,
    )


@app.command("gen")
def gen(
    ctx: typer.Context,
    out: Path = typer.Option(..., "--out", help="Binary matrix file, or CSV when the name ends in .csv."),
    family: SequenceFamily = typer.Option(SequenceFamily.Golay, "--family"),
    m: int = typer.Option(..., "--m", min=1, help="Sequence length M = 2^m."),
    L: int = typer.Option(1, "--L", min=1, help="Overloading factor."),
    N: Optional[int] = typer.Option(None, "--N", min=1, help="Number of columns kept."),
    permutations: Optional[Path] = typer.Option(None, "--permutations", exists=True, dir_okay=False),
    zc_roots: Optional[str] = typer.Option(None, "--zc-roots", help="Comma separated ZC roots."),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
) -> None:
    """Export a spreading matrix."""
    resolved_seed = _resolve_seed(seed)
    with _state(ctx).application() as application:
        matrix = _matrix(
            application, family, m, L, resolved_seed, permutations, zc_roots, N,
            _resolve_workers(application, workers),
        )
    if out.suffix == ".csv":
        write_matrix_csv(matrix, out)
    else:
        write_matrix(matrix, out)
    logger.success(f"[ARTIFACT WRITTEN] {out}")
    _record(
        ctx,
        out,
        resolved_seed,
        results={
            "M": matrix.M,
            "N": matrix.N,
            "permutations": [p.to_text() for p in matrix.permutations or []],
            "zc_roots": matrix.zc_roots,
        },
    )


@app.command("coherence")
def coherence(
    ctx: typer.Context,
    family: SequenceFamily = typer.Option(SequenceFamily.Golay, "--family"),
    m: Optional[int] = typer.Option(None, "--m", min=1),
    L: int = typer.Option(1, "--L", min=1),
    matrix_path: Optional[Path] = typer.Option(None, "--matrix", exists=True, dir_okay=False),
    permutations: Optional[Path] = typer.Option(None, "--permutations", exists=True, dir_okay=False),
    zc_roots: Optional[str] = typer.Option(None, "--zc-roots"),
    by_rank: bool = typer.Option(False, "--by-rank", help="Golay only: use symplectic ranks."),
    trials: int = typer.Option(1, "--trials", min=1, help="Seeded draws of a randomized family."),
    selection: Optional[TrialSelection] = typer.Option(None, "--selection"),
    rank_x: int = typer.Option(1, "--rank-x", min=1, help="rank(X) for the joint-sparse bound."),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = typer.Option(None, "--out"),
) -> None:
    """Coherence of a spreading matrix with the recovery guarantees it implies."""
    resolved_seed = _resolve_seed(seed)
    header = ("family", "M", "N", "L", "mu", "r_min", "spark_min", "k_max_smv", "k_max_mmv")
    with _state(ctx).application() as application:
        analysis = application.get_component(AnalysisService)
        n_workers = _resolve_workers(application, workers)
        if matrix_path is not None:
            matrix = read_matrix(matrix_path)
            report = analysis.coherence(matrix, n_workers)
            M, N, mu, r_min, family_name, blocks = matrix.M, matrix.N, report.mu, report.r_min, matrix.family.value, matrix.L
        elif m is None:
            raise typer.BadParameter("either --m or --matrix is required", param_hint="--m")
        elif family == SequenceFamily.Golay and by_rank:
            perms = _load_permutations(permutations) or application.get_component(MatrixService).build(
                family, m, L, resolved_seed, workers=n_workers
            ).permutations
            assert perms is not None
            report = analysis.coherence_by_rank(perms)
            M, N, mu, r_min, family_name, blocks = 1 << m, len(perms) << m, report.mu, report.r_min, family.value, len(perms)
        elif trials > 1 and family != SequenceFamily.Golay:
            row = analysis.baseline(
                lambda trial_seed: _matrix(application, family, m, L, trial_seed, None, zc_roots),
                resolved_seed,
                trials,
                selection,
                workers=n_workers,
            )
            M, N, mu, r_min, family_name, blocks = row.M, row.N, row.mu, row.r_min, row.family, row.L
        else:
            matrix = _matrix(application, family, m, L, resolved_seed, permutations, zc_roots, workers=n_workers)
            report = analysis.coherence(matrix, n_workers)
            M, N, mu, r_min, family_name, blocks = matrix.M, matrix.N, report.mu, report.r_min, family.value, matrix.L
        bounds = analysis.recovery_bounds(mu, rank_x, M)
    row_values = (
        family_name, M, N, blocks, f"{mu:.12g}", "" if r_min is None else r_min,
        "" if bounds.spark_min is None else bounds.spark_min, bounds.k_max_smv, bounds.k_max_mmv,
    )
    _emit(_csv_text(header, [row_values]), out)
    _record(ctx, out, resolved_seed, results={"mu": mu, "r_min": r_min, "bounds": bounds.model_dump(mode="json")})


@app.command("papr")
def papr(
    ctx: typer.Context,
    family: SequenceFamily = typer.Option(SequenceFamily.Golay, "--family"),
    m: Optional[int] = typer.Option(None, "--m", min=1),
    L: int = typer.Option(1, "--L", min=1),
    matrix_path: Optional[Path] = typer.Option(None, "--matrix", exists=True, dir_okay=False),
    permutations: Optional[Path] = typer.Option(None, "--permutations", exists=True, dir_okay=False),
    zc_roots: Optional[str] = typer.Option(None, "--zc-roots"),
    oversample: Optional[int] = typer.Option(None, "--oversample", min=1),
    trials: int = typer.Option(1, "--trials", min=1),
    selection: Optional[TrialSelection] = typer.Option(None, "--selection"),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = typer.Option(None, "--out"),
) -> None:
    """Largest column PAPR of a spreading matrix."""
    resolved_seed = _resolve_seed(seed)
    header = ("family", "M", "N", "L", "oversample", "max_papr_db", "column")
    with _state(ctx).application() as application:
        analysis = application.get_component(AnalysisService)
        n_workers = _resolve_workers(application, workers)
        factor = oversample or analysis.analysis_properties.oversample
        if matrix_path is not None:
            matrix = read_matrix(matrix_path)
        elif m is None:
            raise typer.BadParameter("either --m or --matrix is required", param_hint="--m")
        elif trials > 1 and family != SequenceFamily.Golay:
            row = analysis.baseline(
                lambda trial_seed: _matrix(application, family, m, L, trial_seed, None, zc_roots),
                resolved_seed,
                trials,
                selection,
                factor,
                n_workers,
            )
            _emit(_csv_text(header, [(row.family, row.M, row.N, row.L, factor, f"{row.max_papr_db:.6f}", "")]), out)
            _record(ctx, out, resolved_seed, results={"max_papr_db": row.max_papr_db, "trials": trials})
            return
        else:
            matrix = _matrix(application, family, m, L, resolved_seed, permutations, zc_roots, workers=n_workers)
        report = analysis.papr(matrix, factor)
    _emit(
        _csv_text(
            header,
            [(matrix.family.value, matrix.M, matrix.N, matrix.L, factor, f"{report.papr_db:.6f}", report.column)],
        ),
        out,
    )
    _record(ctx, out, resolved_seed, results={"max_papr_db": report.papr_db, "column": report.column})


@app.command("characterize")
def characterize(
    ctx: typer.Context,
    family: SequenceFamily = typer.Option(SequenceFamily.Golay, "--family"),
    m: Optional[int] = typer.Option(None, "--m", min=1),
    L: int = typer.Option(1, "--L", min=1),
    matrix_path: Optional[Path] = typer.Option(None, "--matrix", exists=True, dir_okay=False),
    permutations: Optional[Path] = typer.Option(None, "--permutations", exists=True, dir_okay=False),
    zc_roots: Optional[str] = typer.Option(None, "--zc-roots"),
    oversample: Optional[int] = typer.Option(None, "--oversample", min=1),
    trials: int = typer.Option(1, "--trials", min=1, help="Seeded draws of a randomized family."),
    selection: Optional[TrialSelection] = typer.Option(None, "--selection"),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = typer.Option(None, "--out"),
) -> None:
    """Coherence, minimum symplectic rank and peak PAPR of a spreading matrix in one row."""
    resolved_seed = _resolve_seed(seed)
    with _state(ctx).application() as application:
        analysis = application.get_component(AnalysisService)
        n_workers = _resolve_workers(application, workers)
        if matrix_path is not None:
            row = analysis.characterize(read_matrix(matrix_path), oversample, n_workers)
        elif m is None:
            raise typer.BadParameter("either --m or --matrix is required", param_hint="--m")
        elif trials > 1 and family != SequenceFamily.Golay:
            row = analysis.baseline(
                lambda trial_seed: _matrix(application, family, m, L, trial_seed, None, zc_roots),
                resolved_seed,
                trials,
                selection,
                oversample,
                n_workers,
            )
        else:
            matrix = _matrix(application, family, m, L, resolved_seed, permutations, zc_roots, workers=n_workers)
            row = analysis.characterize(matrix, oversample, n_workers)
    _emit(_csv_text(CharacterizationRow.CSV_HEADER, [row.to_csv_row()]), out)
    _record(ctx, out, resolved_seed, results={**row.model_dump(mode="json"), "trials": trials})


@app.command("pr-table")
def pr_table(
    ctx: typer.Context,
    m: list[int] = typer.Option(..., "--m", min=3, help="Repeat for several dimensions."),
    trials: Optional[int] = typer.Option(None, "--trials", min=1),
    L: Optional[int] = typer.Option(None, "--L", min=2, help="Also report trial budgets for this set size."),
    eps: Optional[float] = typer.Option(None, "--eps", min=0.0, max=1.0),
    distribution: bool = typer.Option(
        False, "--distribution", help="Instead report the coherence distribution of random sets of size --L."
    ),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = typer.Option(None, "--out"),
) -> None:
    """
    Monte-Carlo probability of each symplectic rank for a random permutation pair. With
    --distribution, the probability of each minimum pairwise rank of a random set of --L
    permutations, with the coherence it yields.
    """
    if distribution and L is None:
        raise typer.BadParameter("--distribution needs --L", param_hint="--L")
    resolved_seed = _resolve_seed(seed)
    rows: list[tuple[Any, ...]] = []
    budgets: list[dict[str, Any]] = []
    with _state(ctx).application() as application:
        search = application.get_component(SearchService)
        n_workers = _resolve_workers(application, workers)
        for dimension in m:
            if distribution:
                assert L is not None
                observed = search.coherence_distribution(dimension, L, resolved_seed, trials, n_workers)
                rows.extend(
                    (dimension, L, rank, f"{mu:.12g}", f"{p:.7e}", observed.trials, resolved_seed)
                    for rank, mu, p in observed.entries()
                )
                continue
            pmf = search.rank_pmf(dimension, resolved_seed, trials, n_workers)
            rows.extend((dimension, rank, f"{p:.7e}", pmf.trials, resolved_seed) for rank, p in sorted(pmf.p.items()))
            if L is not None:
                budgets.extend(row.model_dump() for row in search.trial_budgets(pmf, L, eps))
    header = ("m", "L", "r_min", "mu", "p", "trials", "seed") if distribution else ("m", "r", "p_r", "trials", "seed")
    _emit(_csv_text(header, rows), out)
    _record(ctx, out, resolved_seed, results={"trial_budgets": budgets} if budgets else None)


@app.command("search")
def search(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=2),
    L: int = typer.Option(..., "--L", min=2),
    target_r: Optional[int] = typer.Option(None, "--target-r", help="Defaults to the recommended rank for (m, L)."),
    trials: Optional[int] = typer.Option(None, "--trials", min=1, help="Trial budget."),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = typer.Option(None, "--out", help="Permutation text file."),
) -> None:
    """Randomized search for a permutation set with a target minimum symplectic rank."""
    resolved_seed = _resolve_seed(seed)
    with _state(ctx).application() as application:
        outcome = application.get_component(SearchService).search(
            m, L, resolved_seed, target_r, trials, _resolve_workers(application, workers)
        )
    if out is None:
        sys.stdout.write("".join(f"{permutation.to_text()}\n" for permutation in outcome.gamma))
    else:
        write_permutations(outcome.gamma, out)
        logger.success(f"[ARTIFACT WRITTEN] {out}")
    _record(
        ctx,
        out,
        resolved_seed,
        results={
            "target_r": outcome.target_r,
            "achieved_r_min": outcome.achieved_r_min,
            "achieved": outcome.achieved,
            "mu": outcome.mu,
            "trials_used": outcome.trials_used,
        },
    )


@app.command("verify-tables")
def verify_tables(
    ctx: typer.Context,
    table: list[int] = typer.Option([1, 2, 3], "--table", help="Repeat to select tables 1, 2 and 3."),
    trials: Optional[int] = typer.Option(None, "--trials", min=1, help="Trials per dimension for table 2."),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = typer.Option(None, "--out"),
) -> None:
    """Recompute the published reference values and report any difference."""
    resolved_seed = _resolve_seed(seed)
    with _state(ctx).application() as application:
        reports = application.get_component(VerificationService).verify(
            table, resolved_seed, trials, _resolve_workers(application, workers)
        )
    lines = [f"table {report.table}: {'all match' if report.ok else 'MISMATCH'} ({report.checked} checks)" for report in reports]
    lines += [mismatch.to_diff_line() for report in reports for mismatch in report.mismatches]
    _emit("".join(f"{line}\n" for line in lines), out)
    _record(ctx, out, resolved_seed, results={"reports": [report.model_dump(mode="json") for report in reports]})
    if not all(report.ok for report in reports):
        raise typer.Exit(code=MISMATCH_EXIT_CODE)


@app.command("simulate")
def simulate(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", exists=True, dir_okay=False, help="Campaign JSON."),
    m: Optional[int] = typer.Option(None, "--m", min=1),
    L: Optional[list[int]] = typer.Option(None, "--L", min=1),
    family: Optional[list[SequenceFamily]] = typer.Option(None, "--family"),
    p_a: Optional[list[float]] = typer.Option(None, "--p-a", min=0.0, max=1.0),
    snr: Optional[list[float]] = typer.Option(None, "--snr", help="Per-device SNR in dB."),
    frames: Optional[int] = typer.Option(None, "--frames", min=1),
    J: Optional[int] = typer.Option(None, "--J", min=2),
    max_iter: Optional[int] = typer.Option(None, "--max-iter", min=1),
    stopping_rule: Optional[StoppingRule] = typer.Option(None, "--stopping-rule"),
    seed: Optional[int] = SeedOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = typer.Option(None, "--out"),
) -> None:
    """Run a grant-free NOMA campaign and write one CSV row per grid point."""
    document: dict[str, Any] = {}
    if config is not None:
        document = CampaignConfig.model_validate_json(config.read_text()).model_dump(exclude_unset=True)
    overrides: dict[str, Any] = {
        "M": None if m is None else 1 << m,
        "L": L or None,
        "family": family or None,
        "p_a": p_a or None,
        "snr_db": snr or None,
        "frames": frames,
        "J": J,
        "max_iter": max_iter,
        "stopping_rule": stopping_rule,
        "seed": seed,
    }
    document.update({key: value for key, value in overrides.items() if value is not None})
    document["seed"] = _resolve_seed(document.get("seed"))
    campaign = CampaignConfig.model_validate(document)

    with _state(ctx).application() as application:
        simulation = application.get_component(SimulationService)
        campaign = simulation.resolve(campaign)
        rows = simulation.run(campaign, _resolve_workers(application, workers))
    _emit(format_campaign_csv(rows), out)
    _record(
        ctx,
        out,
        campaign.seed,
        config=campaign.model_dump(mode="json"),
        results={"failed_points": sum(row.error is not None for row in rows)},
    )


@app.command("replay")
def replay(
    sidecar: Path = typer.Argument(..., exists=True, dir_okay=False, help="Sidecar JSON of an artifact."),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the regenerated artifact here instead."),
) -> None:
    """Regenerate an artifact from its sidecar."""
    recorded = read_sidecar(sidecar)
    argv = list(recorded.argv)
    if recorded.command == "simulate" and recorded.config:
        # the campaign file may have changed since; replay the recorded configuration
        campaign_path = sidecar.with_name(sidecar.stem + ".campaign.json")
        campaign_path.write_text(CampaignConfig.model_validate(recorded.config).model_dump_json(indent=4))
        argv = _replace_option(argv, "--config", str(campaign_path))
    if out is not None:
        argv = _replace_option(argv, "--out", str(out))
    logger.info(f"[REPLAY] {' '.join(argv)}")
    code = dispatch(argv)
    if code:
        raise typer.Exit(code=code)


def _replace_option(argv: list[str], option: str, value: str) -> list[str]:
    if option in argv:
        index = argv.index(option)
        return [*argv[: index + 1], value, *argv[index + 2 :]]
    return [*argv, option, value]


def dispatch(argv: Sequence[str]) -> int:
    """
    Runs one command line and returns its exit status: 0 on success, 1 when verify-tables
    finds a mismatch, 2 for usage errors, invalid configuration, missing files and domain errors.
    """
    global _invocation_argv
    previous = _invocation_argv
    _invocation_argv = list(argv)
    command = typer.main.get_command(app)
    try:
        result = command.main(args=list(argv), prog_name="golay-noma", standalone_mode=False)
    except click.ClickException as error:
        error.show()
        return error.exit_code
    except click.exceptions.Abort:
        return USAGE_EXIT_CODE
    except ValidationError as error:
        typer.echo(f"[INVALID CONFIGURATION] {error}", err=True)
        return USAGE_EXIT_CODE
    except (GolayNomaError, ValueError, OSError) as error:
        typer.echo(f"[{type(error).__name__}] {error}", err=True)
        return USAGE_EXIT_CODE
    finally:
        _invocation_argv = previous
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
