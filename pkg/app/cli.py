"""``flask homology ...`` commands."""

import functools
from pathlib import Path

import click
from flask import current_app
from flask.cli import AppGroup

from app.errors import HomologyError
from app.labels import format_level
from app.pipeline import run as run_pipeline
from app.pipeline import single_cobordism, single_level
from app.report import FORMATS, Report
from app.scenario import builtin_scenario, load_scenario

homology_cli = AppGroup("homology", help="Homology of S^1-manifolds from moment-map data.")


def _output_options(command):
    command = click.option(
        "--format",
        "fmt",
        type=click.Choice(FORMATS),
        default=None,
        help="Report format; defaults to REPORT_FORMAT.",
    )(command)
    command = click.option(
        "--emit-ledger", is_flag=True, help="Print the relation ledger."
    )(command)
    command = click.option(
        "--check", is_flag=True, help="Run every audit and fail if one does not hold."
    )(command)
    return command


def _reports_errors(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except HomologyError as exc:
            current_app.logger.error("%s", exc)
            click.echo(f"Error: {exc}", err=True)
            raise SystemExit(1)

    return wrapper


def _format(fmt):
    return fmt or current_app.config["REPORT_FORMAT"]


def _finish_audits(audits, check):
    failed = [name for name, passed, _ in audits if not passed]
    for name in failed:
        click.echo(f"audit failed: {name}", err=True)
    if check and failed:
        raise SystemExit(2)


def _space_lines(stage, space, fmt):
    if fmt == "machine":
        lines = [f"RANK {stage} {space.degree} {space.rank}"]
        lines += [f"GEN {stage} {space.degree} {l.display}" for l in space.generators()]
        lines += [f"REL {stage} {c.render()} = 0" for c in space.relation_combinations()]
        return lines
    names = ", ".join(label.display for label in space.generators()) or "0"
    lines = [f"H{space.degree} {stage}: rank {space.rank}", f"  generators: {names}"]
    lines += [f"  {c.render()} = 0" for c in space.relation_combinations()]
    return lines


@homology_cli.command("gysin")
@click.option("--euler", required=True, help="Euler class, e.g. '-s31 - s42'.")
@click.option("--degree", type=int, required=True)
@click.option("--base-dim", type=int, default=4, show_default=True)
@click.option("--level", default="0", show_default=True)
@_output_options
@_reports_errors
def gysin_command(euler, degree, base_dim, level, fmt, emit_ledger, check):
    """Labeled homology of one regular level set."""
    homology = single_level(base_dim, euler, level)
    stage = f"level@{format_level(homology.level)}"
    space = homology.space(degree)
    for line in _space_lines(stage, space, _format(fmt)):
        click.echo(line)
    if emit_ledger:
        for combination in space.relation_combinations():
            click.echo(f"LEDGER [{stage}] {combination.render()} = 0")
    _finish_audits([homology.exactness_audit(degree)], check)


@homology_cli.command("cobordism")
@click.option("--interval", nargs=2, required=True, help="Sample levels a b.")
@click.option("--critical", required=True)
@click.option("--image", required=True, help="Image torus of the fixed set, e.g. L13.")
@click.option("--below", required=True, help="Euler class below the critical level.")
@click.option("--above", required=True, help="Euler class above the critical level.")
@click.option("--lift", "lifts", multiple=True, help="'stage : label : degree : boundary'")
@click.option("--base-dim", type=int, default=4, show_default=True)
@_output_options
@_reports_errors
def cobordism_command(
    interval, critical, image, below, above, lifts, base_dim, fmt, emit_ledger, check
):
    """Homology of one elementary cobordism and its relation ledger."""
    a, b = interval
    piece = single_cobordism(a, b, critical, image, below, above, lifts, base_dim)
    fmt = _format(fmt)
    for degree in sorted(piece.homology):
        for line in _space_lines(piece.stage, piece.space(degree), fmt):
            click.echo(line)
    if emit_ledger:
        for relation in piece.ledger:
            click.echo(f"REL {relation.stage} {relation.render()}")
    _finish_audits(piece.audits, check)


def _run_and_print(scenario, fmt, emit_ledger, check):
    checks = check or current_app.config["RUN_CHECKS"]
    report = Report(run_pipeline(scenario, checks=checks))
    click.echo(report.render(_format(fmt)), nl=False)
    if emit_ledger and _format(fmt) == "machine":
        for line in report.ledger_lines():
            click.echo(f"LEDGER {line}")
    _finish_audits(report.result.audits, check)


@homology_cli.command("run")
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False))
@_output_options
@_reports_errors
def run_command(scenario_file, fmt, emit_ledger, check):
    """Compute H_*(W) for a scenario file."""
    scenario = load_scenario(Path(scenario_file))
    current_app.logger.info("running %s from %s", scenario.name, scenario_file)
    _run_and_print(scenario, fmt, emit_ledger, check)


@homology_cli.command("mcduff")
@_output_options
@_reports_errors
def mcduff_command(fmt, emit_ledger, check):
    """Compute H_*(W) for the built-in McDuff scenario."""
    scenario = builtin_scenario("mcduff", current_app.config["SCENARIO_DIR"])
    _run_and_print(scenario, fmt, emit_ledger, check)
