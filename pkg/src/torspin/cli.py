"""Command-line interface: ``check``, ``gauge``, ``decompose``, ``counts``, ``scenarios``.

Exit codes: 0 when every check passes, 1 on a check failure, 2 on an input error.
"""

from __future__ import annotations

import itertools
import json
import sys

import click
import numpy as np

from . import __version__
from . import jet
from .counts import DEFAULT_SAMPLES, component_counts
from .errors import ConstraintViolated, InsufficientSamples, ScenarioParseError, TorspinError, ValidationError
from .scenario import bundled_scenarios, load_scenario, resolve_path
from .state import GeometryState
from .suite import TAGS, count_table, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (ScenarioParseError, ValidationError, ConstraintViolated, InsufficientSamples)


def _fail_input(err: Exception):
    click.echo(f"input error: {err}", err=True)
    sys.exit(EXIT_INPUT)


def _load(path: str, points, seed):
    try:
        return load_scenario(resolve_path(path), count=points, seed=seed)
    except INPUT_ERRORS as err:
        _fail_input(err)


def _split_only(only: str | None):
    return [o.strip() for o in only.split(",") if o.strip()] if only else None


def report_json(report) -> str:
    """The residual table as a JSON array, one entry per line."""
    rows = [json.dumps(e, sort_keys=True) for e in report.as_json()]
    return "[\n" + ",\n".join(rows) + "\n]\n"


def _run(path, seed, points, json_out, only, workers, counts, samples):
    scenario = _load(path, points, seed)
    try:
        report = run_suite(scenario, only=only, workers=workers, counts=counts, count_samples=samples)
    except (ValueError, InsufficientSamples) as err:
        _fail_input(err)
    click.echo(report.summary())
    if json_out:
        with open(json_out, "w") as fh:
            fh.write(report_json(report))
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)


@click.group()
@click.version_option(__version__, prog_name="torspin")
def main():
    """Verify spinor-calculus identities with torsion on analytic scenarios."""


_common = [
    click.argument("scenario_file"),
    click.option("--seed", type=int, default=None, help="Seed for sampled points (and counts)."),
    click.option("--points", type=click.IntRange(min=1), default=None, help="Number of evaluation points."),
    click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None,
                 help="Write the residual table as JSON."),
    click.option("--workers", type=click.IntRange(min=1), default=1, help="Worker processes."),
]


def _apply(options):
    def deco(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return deco


@main.command()
@_apply(_common)
@click.option("--only", default=None, help=f"Comma-separated check tags or names ({', '.join(TAGS)}).")
@click.option("--counts/--no-counts", default=False, help="Also run the component-count table.")
@click.option("--samples", type=int, default=None, help="Random scenarios for the count table.")
def check(scenario_file, seed, points, json_out, workers, only, counts, samples):
    """Run the identity, gauge and (optionally) count checks on SCENARIO_FILE."""
    _run(scenario_file, seed, points, json_out, _split_only(only), workers, counts, samples)


@main.command()
@_apply(_common)
def gauge(scenario_file, seed, points, json_out, workers):
    """Run only the gauge commuting squares on SCENARIO_FILE."""
    _run(scenario_file, seed, points, json_out, ["gauge"], workers, False, None)


def _format(z: complex) -> str:
    z = complex(z)
    return f"{z.real:+.12e} {z.imag:+.12e}i"


def _components(name: str, arr, out):
    arr = np.atleast_1d(np.asarray(arr))
    for idx in itertools.product(*(range(n) for n in arr.shape)):
        label = "".join(str(i) for i in idx)
        out.append(f"{name}[{label}] = {_format(arr[idx])}")


@main.command()
@click.argument("scenario_file")
@click.option("--point", "point_text", required=True, help='Evaluation point "t,x,y,z".')
def decompose(scenario_file, point_text):
    """Print curvature spinors, Psi, xi, kappa and F at one point."""
    try:
        point = tuple(float(p) for p in point_text.split(","))
    except ValueError:
        _fail_input(ValueError(f"--point must be four comma-separated numbers, got {point_text!r}"))
    if len(point) != 4:
        _fail_input(ValueError(f"--point needs four coordinates, got {len(point)}"))
    scenario = _load(scenario_file, None, None)
    try:
        st = GeometryState(scenario, point)
        psi, xi, kappa = st.decomposition
        lines = []
        _components("w_ABCD", jet.value(st.spinors.unprimed), lines)
        _components("w_A'B'CD", jet.value(st.spinors.primed), lines)
        _components("Psi", psi, lines)
        _components("xi", xi, lines)
        lines.append(f"kappa = {_format(kappa)}")
        _components("F", jet.value(st.mixed.f), lines)
    except TorspinError as err:
        _fail_input(err)
    click.echo(f"scenario {scenario.name} at {point}")
    click.echo("\n".join(lines))


@main.command()
@click.option("--seed", type=int, default=0, help="Seed of the random scenario generator.")
@click.option("--samples", type=int, default=DEFAULT_SAMPLES, help="Number of random scenarios.")
def counts(seed, samples):
    """Print the independent-component rank table."""
    try:
        rows = component_counts(seed=seed, samples=samples)
    except InsufficientSamples as err:
        _fail_input(err)
    click.echo(count_table(rows))
    sys.exit(EXIT_PASS if all(r.passed for r in rows) else EXIT_FAIL)


@main.command()
def scenarios():
    """List the bundled scenarios."""
    for name, path in bundled_scenarios().items():
        click.echo(f"{name}\t{path}")


if __name__ == "__main__":
    main()
