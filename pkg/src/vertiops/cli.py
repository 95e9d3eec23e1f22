"""Batch entry points: solve programs, run scenarios, diff goldens,
serve the operator API, print explanations.

Exit codes for `solve` follow the documented convention: 10 when
satisfiable, 20 when unsatisfiable, 65 on any input error.
"""
from __future__ import annotations

import json
import sys
from importlib.resources import files

import click
import yaml

from . import scenario as scenario_mod
from .domain import load_config
from .engine import answer_sets, render_report, sorted_atoms
from .errors import VertiopsError
from .explain import explain as explain_atom
from .explain import render_tree
from .grounding import ground
from .logic.ast import Program
from .logic.parser import parse_program
from .service import _parse_atom, create_app

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_INPUT = 65

CONFIG_ENVVAR = "VERTIOPS_CONFIG"


def _load_programs(paths) -> Program:
    program = Program((), ())
    for path in paths:
        try:
            with open(path) as f:
                text = f.read()
            program = program + parse_program(text)
        except OSError as exc:
            click.echo(f"{path}: {exc.strerror}", err=True)
            sys.exit(EXIT_INPUT)
        except VertiopsError as exc:
            click.echo(f"{path}:{exc}", err=True)
            sys.exit(EXIT_INPUT)
    return program


def _read_config(config):
    if config is None:
        return files("vertiops.fixtures").joinpath("network.yaml").read_text()
    with open(config) as f:
        return f.read()


@click.group()
def main():
    """Vertiport closure handling: solver, scenarios, and service."""


@main.command()
@click.argument("paths", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--models", default=1, show_default=True,
              help="Number of answer sets to enumerate (0 for all).")
@click.option("--json", "as_json", is_flag=True,
              help="Emit a machine-readable report.")
def solve(paths, models, as_json):
    """Solve the concatenation of the given programs."""
    program = _load_programs(paths)
    try:
        gp = ground(program)
        report = answer_sets(gp, limit=models)
    except VertiopsError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT)
    if as_json:
        click.echo(json.dumps({
            "satisfiable": report.satisfiable,
            "models": [
                [str(a) for a in sorted_atoms(m.shown)] for m in report.models
            ],
            "violated": list(report.violated_constraints),
            "stats": {
                "ground_rules": report.stats.ground_rules,
                "atoms": report.stats.atoms,
                "branches": report.stats.branch_count,
            },
        }, sort_keys=True))
    else:
        click.echo(render_report(report))
    sys.exit(EXIT_SAT if report.satisfiable else EXIT_UNSAT)


def _run_script(session, events):
    for event in events:
        kind = event.get("kind")
        if kind == "close":
            scenario_mod.close_vertiport(session, int(event["vp"]))
        elif kind == "reopen":
            scenario_mod.reopen_vertiport(session, int(event["vp"]))
        elif kind == "advance":
            scenario_mod.advance_step(session)
        elif kind == "landing_request":
            scenario_mod.inject_landing_request(
                session, int(event["agent"]),
                tuple(event["corridor"]), int(event["waypoint"]),
            )
        else:
            raise VertiopsError(f"unknown event kind {kind!r}")


@main.command()
@click.option("--config", envvar=CONFIG_ENVVAR,
              type=click.Path(exists=True, dir_okay=False),
              help="Network config (defaults to the bundled fixture).")
@click.option("--script", "script_path",
              type=click.Path(exists=True, dir_okay=False),
              help="Event script; without it the bundled closure episode runs.")
@click.option("--out", type=click.Path(dir_okay=False),
              help="Write the transcript here instead of stdout.")
def scenario(config, script_path, out):
    """Run a scenario and print its structured transcript."""
    try:
        network, fleet = load_config(_read_config(config))
        if script_path is None:
            session = scenario_mod.golden_scenario(network, fleet)
        else:
            with open(script_path) as f:
                events = yaml.safe_load(f) or []
            session = scenario_mod.new_session(network, fleet)
            _run_script(session, events)
    except VertiopsError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT)
    text = scenario_mod.transcript_text(session)
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--config", envvar=CONFIG_ENVVAR,
              type=click.Path(exists=True, dir_okay=False),
              help="Network config (defaults to the bundled fixture).")
def golden(config):
    """Replay the bundled closure episode and diff each solve stage
    against the recorded shown-atom sets."""
    goldens = json.loads(
        files("vertiops.fixtures").joinpath("goldens.json").read_text()
    )
    try:
        network, fleet = load_config(_read_config(config))
        session = scenario_mod.golden_scenario(network, fleet)
    except VertiopsError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT)

    failed = 0
    for expected, actual in zip(goldens["stages"], session.transcript):
        want = set(expected["shown"])
        got = set(actual["shown"])
        ok = want == got and actual["verdict"] == "SATISFIABLE"
        status = "pass" if ok else "FAIL"
        click.echo(f"{status}  stage {expected['name']}: "
                   f"{len(got)}/{len(want)} shown atoms, {actual['verdict']}")
        for atom in sorted(want - got):
            click.echo(f"      missing   {atom}")
        for atom in sorted(got - want):
            click.echo(f"      unexpected {atom}")
        for text in actual["violated"]:
            click.echo(f"      violated  {text}")
        if not ok:
            failed += 1
    click.echo(f"{len(goldens['stages']) - failed}/{len(goldens['stages'])} "
               f"stages match")
    sys.exit(1 if failed else 0)


@main.command()
@click.argument("paths", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.argument("atom")
def explain(paths, atom):
    """Solve the given programs and print a derivation tree for ATOM."""
    program = _load_programs(paths)
    try:
        target = _parse_atom(atom)
        gp = ground(program)
        report = answer_sets(gp, limit=1)
    except VertiopsError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT)
    if not report.satisfiable:
        click.echo("UNSATISFIABLE", err=True)
        sys.exit(EXIT_UNSAT)
    try:
        tree = explain_atom(target, report.models[0], gp)
    except VertiopsError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INPUT)
    click.echo(render_tree(tree))
    sys.exit(EXIT_SAT)


@main.command()
@click.option("--config", envvar=CONFIG_ENVVAR,
              type=click.Path(exists=True, dir_okay=False),
              help="Network config (defaults to the bundled fixture).")
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(config, port, host):
    """Start the operator service."""
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port)


if __name__ == "__main__":
    main()
