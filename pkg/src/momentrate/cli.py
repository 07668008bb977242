"""CLI entry point for MomentRate."""

import csv
import io
import itertools
import json
import logging
from importlib.metadata import version
from pathlib import Path
from typing import Annotated, NoReturn

import numpy as np
import typer

from momentrate.config import OUTPUT_FORMATS, RunConfig, default_config, load_config
from momentrate.constants import (
    ENV_CONFIG,
    ENV_SEED,
    ENV_WORKERS,
    EXIT_ERROR,
    EXIT_INFINITE,
    EXIT_OK,
)
from momentrate.errors import MaxIterations, MomentRateError
from momentrate.helper import format_float, json_number, parse_grid, parse_int_list
from momentrate.lie_core import DualVector
from momentrate.measurement_sim import RegionSpec, run_simulation, system_family
from momentrate.moment_geometry import chamber_decompose, dual_from_flat, moment_map
from momentrate.rate_function import (
    RATE_METHODS,
    RateResult,
    compute_rate,
    rate_keyl_werner,
)
from momentrate.representations import Spin, Standard, rep_to_dict, weight_data
from momentrate.selftest import SUITES, SelftestOptions, run_selftest


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        typer.echo(f"MomentRate v{version('MomentRate')}")
        raise typer.Exit()


app = typer.Typer(
    name="MomentRate",
    help="Large-deviation rate functions for moment map estimation and POVM simulation.",
    add_completion=False,
)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger(__name__)

ConfigOption = Annotated[
    Path | None,
    typer.Option("--config", "-c", help="JSON run configuration", envvar=ENV_CONFIG),
]
SeedOption = Annotated[
    int | None, typer.Option("--seed", help="Master random seed", envvar=ENV_SEED)
]
WorkersOption = Annotated[
    int | None,
    typer.Option("--workers", help="Monte Carlo worker threads", envvar=ENV_WORKERS),
]
OutOption = Annotated[
    Path | None, typer.Option("--out", "-o", help="Write output here instead of stdout")
]
FormatOption = Annotated[
    str | None, typer.Option("--format", "-f", help="Output format: json or csv")
]

# cross-check partner per primary method
CROSS_CHECKS = {
    "numeric": "an",
    "an": "numeric",
    "keyl": "an",
    "cramer": "numeric",
    "mixed": "numeric",
    "bipartite": "numeric",
}


def fail(message: str) -> NoReturn:
    """Report an error on stderr and exit with the error code."""
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(EXIT_ERROR)


def resolve_config(
    config_path: Path | None,
    seed: int | None,
    workers: int | None,
    output_format: str | None,
    out: Path | None,
) -> RunConfig:
    """Load the configuration (or the built-in qubit case) and apply flag overrides."""
    if output_format is not None and output_format not in OUTPUT_FORMATS:
        raise typer.BadParameter(f"format must be one of {', '.join(OUTPUT_FORMATS)}")
    config = load_config(config_path) if config_path else default_config()
    return config.with_overrides(
        seed=seed, workers=workers, output_format=output_format, output_path=out
    )


def emit(text: str, config: RunConfig) -> None:
    """Write command output to the configured path or stdout."""
    if config.output_path is not None:
        config.output_path.write_text(text)
        logger.info("Wrote %s", config.output_path)
    else:
        typer.echo(text, nl=False)


def to_json(data: object) -> str:
    return json.dumps(data, indent=2) + "\n"


def to_csv(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def csv_value(value: float | None) -> str:
    return "" if value is None else format_float(value)


TOLERANCE_COLUMNS = ["gradient_tolerance", "acceptance_tolerance"]


def tolerance_values(config: RunConfig) -> list[str]:
    opts = config.optimizer
    return [format_float(opts.gradient_tolerance), format_float(opts.acceptance_tolerance)]


def parse_point(text: str, config: RunConfig) -> DualVector:
    """Flat chamber coordinates from the command line, e.g. '0.9,0.1'."""
    try:
        coords = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise typer.BadParameter(f"invalid point {text!r}") from None
    rank = config.group.cartan_rank
    if coords.shape != (rank,):
        raise typer.BadParameter(f"point needs {rank} chamber coordinates, got {coords.size}")
    return dual_from_flat(config.group, coords)


def target_point(point: str | None, config: RunConfig) -> DualVector:
    if point is not None:
        return parse_point(point, config)
    if config.point is not None:
        return config.point
    logger.info("No point given; evaluating at the moment map J(rho)")
    return moment_map(config.representation, config.state)


def cross_check(method: str, config: RunConfig, x: DualVector) -> dict | None:
    """Second, independent evaluation when one applies to this representation."""
    rep, rho = config.representation, config.state
    if method == "contracted":
        if not isinstance(rep, Standard | Spin) or (isinstance(rep, Spin) and rep.two_j != 1):
            return None
        partner = "keyl"
        value = rate_keyl_werner(rho, chamber_decompose(x).sorted_flat(), rep)
    else:
        partner = CROSS_CHECKS.get(method)
        if partner is None:
            return None
        try:
            value = compute_rate(partner, rep, rho, x, config.optimizer).value
        except (MomentRateError, ValueError) as exc:
            logger.warning("Cross-check with %s unavailable: %s", partner, exc)
            return None
    return {"method": partner, "value": json_number(value)}


def rate_record(result: RateResult, config: RunConfig, x: DualVector) -> dict:
    record = result.to_dict()
    record["point"] = [float(v) for v in chamber_decompose(x).sorted_flat()]
    record["representation"] = rep_to_dict(config.representation)
    record["tolerance"] = config.optimizer.acceptance_tolerance
    return record


@app.callback()
def main(
    verbose: Annotated[
        bool,
        typer.Option("--verbose", "-v", help="Enable verbose/debug logging", envvar="DEBUG"),
    ] = False,
    _version: Annotated[
        bool,
        typer.Option(
            "--version",
            "-V",
            callback=version_callback,
            is_eager=True,
            help="Show version and exit.",
        ),
    ] = False,
) -> None:
    """Evaluate rate functions, scan them on chamber grids and simulate measurements.

    Without --config the built-in qubit case is used: U(2) acting on C^2 in the state
    diag(0.7, 0.3).

    Examples:
        # Rate at a chamber point, cross-checked by a second method
        momentrate rate --point 0.9,0.1 --method an

        # Tabulate a Bernoulli rate for plotting
        momentrate scan -c bernoulli.json --method cramer --grid 0:1:101

        # Monte Carlo of the measurement on tensor powers
        momentrate simulate --m-list 2:12 --region half_space:1,0:0.9 --samples 20000
    """
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


@app.command()
def rate(
    config_path: ConfigOption = None,
    method: Annotated[
        str, typer.Option("--method", "-m", help=f"One of: {', '.join(RATE_METHODS)}")
    ] = "numeric",
    point: Annotated[
        str | None,
        typer.Option("--point", "-x", help="Flat chamber coordinates, e.g. 0.9,0.1"),
    ] = None,
    contracted: Annotated[
        bool, typer.Option("--contracted", help="Evaluate the contracted rate at the point")
    ] = False,
    check: Annotated[
        bool, typer.Option("--cross-check/--no-cross-check", help="Compare with a second method")
    ] = True,
    seed: SeedOption = None,
    out: OutOption = None,
    output_format: FormatOption = None,
) -> None:
    """Evaluate the rate function at one point.

    Exits with 2 when the rate is certified infinite.
    """
    if contracted:
        method = "contracted"
    if method not in RATE_METHODS:
        fail(f"unknown method {method!r}; choose from {', '.join(RATE_METHODS)}")
    try:
        config = resolve_config(config_path, seed, None, output_format, out)
        x = target_point(point, config)
        logger.info("Evaluating %s rate for %s", method, config.representation)
        result = compute_rate(method, config.representation, config.state, x, config.optimizer)
        record = rate_record(result, config, x)
        if check and not result.is_infinite:
            record["cross_check"] = cross_check(method, config, x)
    except (typer.BadParameter, MomentRateError, ValueError) as e:
        fail(str(e))
    if config.output_format == "csv":
        emit(
            to_csv(
                ["method", "value", "certificate", "evaluations", *TOLERANCE_COLUMNS],
                [
                    [
                        method,
                        format_float(result.value),
                        result.certificate.tag,
                        result.evaluations,
                        *tolerance_values(config),
                    ]
                ],
            ),
            config,
        )
    else:
        emit(to_json(record), config)
    if result.is_infinite:
        raise typer.Exit(EXIT_INFINITE)


def _check_grid_box(axes: list[np.ndarray], config: RunConfig) -> None:
    """Grid must lie in the bounding box of the weight polytope inflated by 10%."""
    points = weight_data(config.representation).points
    lo, hi = points.min(axis=0), points.max(axis=0)
    pad = 0.1 * np.maximum(hi - lo, 1e-12)
    for i, axis in enumerate(axes):
        if axis.min() < lo[i] - pad[i] - 1e-12 or axis.max() > hi[i] + pad[i] + 1e-12:
            raise typer.BadParameter(
                f"grid axis {i} leaves [{lo[i] - pad[i]:.6g}, {hi[i] + pad[i]:.6g}]"
            )


@app.command()
def scan(
    grid: Annotated[
        str, typer.Option("--grid", "-g", help="start:stop:count per chamber coordinate")
    ],
    config_path: ConfigOption = None,
    method: Annotated[
        str, typer.Option("--method", "-m", help="Rate method per point")
    ] = "numeric",
    contracted: Annotated[
        bool, typer.Option("--contracted", help="Add a contracted-rate column")
    ] = False,
    seed: SeedOption = None,
    out: OutOption = None,
) -> None:
    """Tabulate the rate on a chamber grid as CSV ('inf' for certified infinities)."""
    if method not in RATE_METHODS:
        fail(f"unknown method {method!r}; choose from {', '.join(RATE_METHODS)}")
    try:
        config = resolve_config(config_path, seed, None, "csv", out)
        axes = parse_grid(grid)
        rank = config.group.cartan_rank
        if len(axes) != rank:
            raise typer.BadParameter(f"grid needs {rank} axes, got {len(axes)}")
        _check_grid_box(axes, config)
    except (typer.BadParameter, MomentRateError, ValueError) as e:
        fail(str(e))

    header = [f"x{i + 1}" for i in range(rank)] + ["value", "certificate", "evaluations"]
    if contracted:
        header.append("contracted")
    header += TOLERANCE_COLUMNS
    tolerances = tolerance_values(config)
    rows = []
    for coords in itertools.product(*axes):
        coords = np.array(coords)
        x = dual_from_flat(config.group, coords)
        try:
            result = compute_rate(
                method, config.representation, config.state, x, config.optimizer
            )
            row = [format_float(c) for c in coords]
            row += [format_float(result.value), result.certificate.tag, result.evaluations]
        except MaxIterations as e:
            logger.warning("No convergence at %s: %s", coords, e)
            row = [format_float(c) for c in coords] + ["nan", "failed", 0]
        except (MomentRateError, ValueError) as e:
            fail(str(e))
        if contracted:
            try:
                value = compute_rate(
                    "contracted", config.representation, config.state, x, config.optimizer
                ).value
                row.append(format_float(value))
            except MaxIterations:
                row.append("nan")
        row += tolerances
        rows.append(row)
    logger.info("Scanned %d grid points", len(rows))
    emit(to_csv(header, rows), config)


@app.command()
def simulate(
    config_path: ConfigOption = None,
    m_list: Annotated[
        str, typer.Option("--m-list", help="Tensor powers, e.g. 2,4,8 or 2:12")
    ] = "2:12",
    region: Annotated[
        str | None,
        typer.Option(
            "--region",
            "-r",
            help=(
                "everything | chamber_ball:C:R | ball:C:R | half_space:N:OFFSET"
                " | complement:REGION"
            ),
        ),
    ] = None,
    samples: Annotated[int, typer.Option("--samples", "-n", help="Samples per m")] = 10_000,
    seed: SeedOption = None,
    workers: WorkersOption = None,
    out: OutOption = None,
    output_format: FormatOption = None,
) -> None:
    """Sample the covariant measurement on tensor powers and check the rate bounds.

    Default region: the chamber ball of radius 0.15 around J(rho).
    """
    try:
        config = resolve_config(config_path, seed, workers, output_format or "csv", out)
        powers = parse_int_list(m_list)
        if not powers or min(powers) < 1:
            raise typer.BadParameter("m-list needs positive tensor powers")
        if samples < 1:
            raise typer.BadParameter("samples must be positive")
        rep, rho = config.representation, config.state
        system_family(rep)
        if region is None:
            center = chamber_decompose(moment_map(rep, rho)).sorted_flat()
            region_spec = RegionSpec.chamber_ball(center, 0.15)
        else:
            region_spec = RegionSpec.parse(region)
        logger.info(
            "Simulating %s over m=%s in %s with %d samples",
            rep,
            powers,
            region_spec.describe(),
            samples,
        )
        report = run_simulation(
            rep,
            rho,
            powers,
            region_spec,
            samples,
            seed=config.seed,
            workers=config.workers,
            options=config.optimizer,
        )
    except (typer.BadParameter, MomentRateError, ValueError) as e:
        fail(str(e))

    summary = {
        "region": region_spec.describe(),
        "samples": samples,
        "seed": config.seed,
        "workers": config.workers,
        "inf_rate": json_number(report.inf_rate),
        "lln_nondecreasing": report.lln_nondecreasing,
        "upper_bound_holds": report.bound_holds,
    }
    header = [
        "m",
        "mu_hat",
        "ci_low",
        "ci_high",
        "mu_exact",
        "empirical_rate",
        "inf_rate",
        "bound_rhs",
        "passed",
        *TOLERANCE_COLUMNS,
    ]
    tolerances = tolerance_values(config)
    rows = [
        [
            r.m,
            format_float(r.mu_hat),
            format_float(r.ci_low),
            format_float(r.ci_high),
            csv_value(r.mu_exact),
            format_float(r.empirical_rate),
            format_float(r.inf_rate),
            format_float(r.rhs),
            "pass" if r.passed else "fail",
            *tolerances,
        ]
        for r in report.rows
    ]
    if config.output_format == "csv":
        emit(to_csv(header, rows), config)
        typer.echo(json.dumps(summary), err=True)
    else:
        records = [dict(zip(header, row, strict=True)) for row in rows]
        emit(to_json({"rows": records, "summary": summary}), config)


@app.command()
def selftest(
    suite: Annotated[
        list[str] | None,
        typer.Option("--suite", "-s", help=f"Suite to run (repeatable): {', '.join(SUITES)}"),
    ] = None,
    trials: Annotated[int, typer.Option("--trials", help="Random instances per case")] = 100,
    seed: SeedOption = None,
    out: OutOption = None,
    perturb_iwasawa: Annotated[
        float, typer.Option("--perturb-iwasawa", hidden=True)
    ] = 0.0,
) -> None:
    """Run the invariant suites; exits with 1 if any suite fails."""
    if trials < 1:
        fail("trials must be positive")
    options = SelftestOptions(trials=trials, seed=seed or 0, perturb_iwasawa=perturb_iwasawa)
    try:
        results = run_selftest(suite, options)
    except ValueError as e:
        fail(str(e))
    report = {
        "passed": all(r.passed for r in results),
        "suites": [r.to_dict() for r in results],
    }
    config = default_config().with_overrides(output_path=out)
    emit(to_json(report), config)
    raise typer.Exit(EXIT_OK if report["passed"] else EXIT_ERROR)


if __name__ == "__main__":
    app()
