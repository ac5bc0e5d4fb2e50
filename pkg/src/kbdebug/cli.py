"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 no diagnosis needed, 4 resource
limit exceeded.
"""

from __future__ import annotations

import json
import sys

import click

from .alignment import AlignmentError, build_aligned_dpi, fix_target_diagnosis, load_alignment_csv
from .bench import run_benchmark
from .diagnosis import Dpi
from .formulas import KBError, parse_kb
from .queries import NO, YES
from .reasoner import ResourceLimitExceeded
from .session import Session, SessionConfig, SessionError, simulated_oracle
from .strategy import CautiousnessParams, STRATEGIES

EXIT_INPUT = 2
EXIT_NO_DIAGNOSIS = 3
EXIT_RESOURCE = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_kb(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_kb(fh.read())
    except OSError as exc:
        _fail(EXIT_INPUT, f"cannot read {path}: {exc}")
    except KBError as exc:
        _fail(EXIT_INPUT, f"{path}: {exc}")


def _session_options(f):
    options = [
        click.option("--strategy", type=click.Choice(STRATEGIES), default="entropy",
                     show_default=True),
        click.option("--n", type=int, default=9, show_default=True,
                     help="Leading-diagnosis bound."),
        click.option("--sigma", type=float, default=85.0, show_default=True,
                     help="Acceptance threshold (percent)."),
        click.option("--c", type=float, default=0.25, show_default=True),
        click.option("--c-min", type=float, default=0.0, show_default=True),
        click.option("--c-max", type=float, default=0.5, show_default=True),
        click.option("--epsilon", type=float, default=0.25, show_default=True),
        click.option("--stop", type=click.Choice(["singleton", "threshold", "both"]),
                     default="singleton", show_default=True),
        click.option("--oracle", default="interactive", show_default=True,
                     help="'interactive' or 'target:ax2,ax5'."),
        click.option("--transcript", type=click.Path(dir_okay=False), default=None,
                     help="Write the session transcript (JSON) here."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _build_config(dpi, strategy, n, sigma, c, c_min, c_max, epsilon, stop):
    try:
        return SessionConfig(
            dpi=dpi,
            strategy=strategy,
            n=n,
            sigma=sigma,
            cautiousness=CautiousnessParams(c=c, c_min=c_min, c_max=c_max, epsilon=epsilon),
            stop_mode=stop,
        )
    except ValueError as exc:
        _fail(EXIT_INPUT, str(exc))


def _interactive_oracle(session, query):
    literals = " AND ".join(sorted(str(l) for l in query.literals))
    while True:
        reply = click.prompt(f"Is [{literals}] entailed by your intended KB? [yes/no]",
                             type=str).strip().lower()
        if reply in (YES, NO):
            return reply
        click.echo("please answer yes or no")


def _resolve_oracle(oracle: str, dpi):
    if oracle == "interactive":
        return _interactive_oracle
    if oracle.startswith("target:"):
        ids = frozenset(x.strip() for x in oracle[len("target:"):].split(",") if x.strip())
        unknown = ids - set(dpi.kb.by_id)
        if unknown:
            _fail(EXIT_INPUT, f"oracle target references unknown axioms: {sorted(unknown)}")
        return simulated_oracle(ids)
    _fail(EXIT_INPUT, f"bad --oracle value {oracle!r}")


def _run_session(dpi, strategy, n, sigma, c, c_min, c_max, epsilon, stop, oracle, transcript):
    cfg = _build_config(dpi, strategy, n, sigma, c, c_min, c_max, epsilon, stop)
    answer = _resolve_oracle(oracle, dpi)
    try:
        session = Session(cfg)
        result = session.run_to_completion(answer)
    except SessionError as exc:
        _fail(EXIT_NO_DIAGNOSIS, str(exc))
    except ResourceLimitExceeded as exc:
        _fail(EXIT_RESOURCE, str(exc))
    if transcript:
        with open(transcript, "w", encoding="utf-8") as fh:
            fh.write(session.transcript_json())
    doc = session.transcript()
    click.echo(f"diagnosis: {' '.join(dpi.kb.sort_ids(result.ids))}")
    click.echo(f"queries: {doc['metrics']['queries']}")


@click.group()
def main():
    """Interactive knowledge-base debugger."""


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True, dir_okay=False))
@_session_options
def debug(kb_path, strategy, n, sigma, c, c_min, c_max, epsilon, stop, oracle, transcript):
    """Debug a single KB file interactively or against a simulated target."""
    kb = _load_kb(kb_path)
    _run_session(Dpi(kb), strategy, n, sigma, c, c_min, c_max, epsilon, stop,
                 oracle, transcript)


@main.command()
@click.option("--kb1", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kb2", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mapping", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reference", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Reference alignment; fixes the simulated target diagnosis.")
@click.option("--background-ontologies", is_flag=True,
              help="Place both input ontologies into the background knowledge.")
@_session_options
def align(kb1, kb2, mapping, reference, background_ontologies, strategy, n, sigma,
          c, c_min, c_max, epsilon, stop, oracle, transcript):
    """Debug the aligned ontology built from two KBs and a mapping CSV."""
    kb_1, kb_2 = _load_kb(kb1), _load_kb(kb2)
    try:
        with open(mapping, encoding="utf-8") as fh:
            alignment = load_alignment_csv(fh.read())
        dpi = build_aligned_dpi(kb_1, kb_2, alignment,
                                ontologies_in_background=background_ontologies)
    except (AlignmentError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
    if reference is not None:
        try:
            with open(reference, encoding="utf-8") as fh:
                ref = load_alignment_csv(fh.read())
            target = fix_target_diagnosis(dpi, alignment, ref)
        except AlignmentError as exc:
            _fail(EXIT_NO_DIAGNOSIS, str(exc))
        except OSError as exc:
            _fail(EXIT_INPUT, str(exc))
        oracle = "target:" + ",".join(sorted(target.ids))
        click.echo(f"target diagnosis fixed from reference: {' '.join(sorted(target.ids))}")
    _run_session(dpi, strategy, n, sigma, c, c_min, c_max, epsilon, stop,
                 oracle, transcript)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def bench(config_path, out_path):
    """Run a batch benchmark and write the report CSV."""
    try:
        with open(config_path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(EXIT_INPUT, f"cannot load benchmark config: {exc}")
    try:
        rows, report = run_benchmark(cfg)
    except ResourceLimitExceeded as exc:
        _fail(EXIT_RESOURCE, str(exc))
    except (KeyError, ValueError) as exc:
        _fail(EXIT_INPUT, f"bad benchmark config: {exc}")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(report)
    failures = [r for r in rows if r.error]
    click.echo(f"{len(rows)} runs, {len(failures)} failed; report written to {out_path}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--transcript-dir", type=click.Path(file_okay=False), default=None)
def serve(port, host, transcript_dir):
    """Start the HTTP session service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(transcript_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
