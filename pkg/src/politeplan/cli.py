"""Command-line interface.

Exit codes: 0 success, 1 domain error (infeasible plan, bad data, ...),
2 usage error.
"""

from __future__ import annotations

import json
import sys

import click

from .channel import RoundTripPair, profile_channel, save_channel
from .errors import ConfigError, PoliteplanError
from .evaluation import load_experiment_config, render_table, run_experiment, write_reports
from .extraction import extract_strategies, tokenize
from .perception import (
    fit_individual_model,
    fit_model,
    load_annotations,
    perceive,
    save_model,
)
from .planner import Circumstance, build_problem, plan_greedy, plan_ilp, plan_none, plan_oracle, plan_retrieval
from .realizer import realize_alternatives
from .registry import resolve_channel, resolve_lexicon, resolve_model
from .service import Api, ServiceConfig, load_service_config, render_json


def _echo_json(payload: dict) -> None:
    click.echo(render_json(payload).decode("utf-8"))


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@click.group(invoke_without_command=True)
@click.pass_context
def main(ctx):
    """Politeness-preserving paraphrase planning."""
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        ctx.exit(2)


def _circumstance(sender, receiver, channel, lexicon):
    lex = resolve_lexicon(lexicon)
    return Circumstance(
        sender=resolve_model(sender),
        receiver=resolve_model(receiver),
        channel=resolve_channel(channel, lex),
        lexicon=lex,
    )


_PLANNERS = {
    "ilp": plan_ilp,
    "greedy": plan_greedy,
    "oracle": plan_oracle,
    "none": plan_none,
}


def _run_planner(method, problem, circ, corpus_path):
    if method == "retrieval":
        from .evaluation import load_corpus

        if not corpus_path:
            raise click.UsageError("--method retrieval requires --corpus FILE")
        corpus = [t for _, t in load_corpus(corpus_path)]
        return plan_retrieval(problem, circ, corpus)
    return _PLANNERS[method](problem, circ)


@main.command()
@click.option("--message", required=True)
@click.option("--lexicon", default="builtin", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def extract(message, lexicon, as_json):
    """List the politeness strategies a message uses."""
    lex = resolve_lexicon(lexicon)
    m = tokenize(message)
    ex = extract_strategies(m, lex)
    ids = lex.sort_ids(ex.strategies)
    if as_json:
        _echo_json(
            {
                "message": message,
                "strategies": ids,
                "occurrences": [
                    {"strategy": o.strategy, "text": o.text(m)} for o in ex.occurrences
                ],
            }
        )
    else:
        click.echo(", ".join(ids) if ids else "(none)")


@main.command(name="perceive")
@click.option("--message")
@click.option("--strategies", help="comma-separated strategy ids (alternative to --message)")
@click.option("--model", default="builtin:average", show_default=True)
@click.option("--lexicon", default="builtin", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def perceive_cmd(message, strategies, model, lexicon, as_json):
    """Politeness level a perception model assigns."""
    if message is None and strategies is None:
        raise click.UsageError("provide --message or --strategies")
    lex = resolve_lexicon(lexicon)
    mdl = resolve_model(model)
    try:
        if strategies is not None:
            s_set = frozenset(s.strip() for s in strategies.split(",") if s.strip())
        else:
            s_set = extract_strategies(tokenize(message), lex).strategies
        level = perceive(mdl, s_set)
    except PoliteplanError as exc:
        _fail(exc)
    if as_json:
        _echo_json({"strategies": sorted(s_set), "level": round(level, 6)})
    else:
        click.echo(f"{level:.6f}")


_PLAN_OPTIONS = [
    click.option("--message", required=True),
    click.option("--sender", default="builtin:average", show_default=True),
    click.option("--receiver", default="builtin:average", show_default=True),
    click.option("--channel", default="builtin:all-safe", show_default=True),
    click.option("--lexicon", default="builtin", show_default=True),
    click.option(
        "--method",
        default="ilp",
        show_default=True,
        type=click.Choice(["ilp", "greedy", "retrieval", "oracle", "none"]),
    ),
    click.option("--corpus", default=None, help="retrieval corpus (JSONL), for --method retrieval"),
    click.option("--max-added", default=3, show_default=True),
    click.option("--no-negativity", is_flag=True, help="disable the negativity constraint"),
    click.option("--no-subj-ind", is_flag=True, help="disable the request-form constraint"),
]


def _with_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return wrap


@main.command()
@_with_options(_PLAN_OPTIONS)
@click.option("--json", "as_json", is_flag=True)
def plan(message, sender, receiver, channel, lexicon, method, corpus, max_added,
         no_negativity, no_subj_ind, as_json):
    """Compute the target strategy set for a circumstance."""
    try:
        circ = _circumstance(sender, receiver, channel, lexicon)
        problem = build_problem(
            message,
            circ,
            max_added=max_added,
            negativity=False if no_negativity else None,
            subj_ind=not no_subj_ind,
        )
        result = _run_planner(method, problem, circ, corpus)
    except click.UsageError:
        raise
    except PoliteplanError as exc:
        _fail(exc)
    lex = circ.lexicon
    if as_json:
        _echo_json(
            {
                "message": message,
                "method": result.method,
                "s_in": lex.sort_ids(problem.s_in),
                "target": round(problem.target, 6),
                "s_out": lex.sort_ids(result.s_out),
                "achieved": round(result.achieved, 6),
                "gap": round(result.gap, 6),
                "added": lex.sort_ids(result.added),
                "removed": lex.sort_ids(result.removed),
                "nodes": result.nodes,
            }
        )
    else:
        click.echo(f"s_in:   {', '.join(lex.sort_ids(problem.s_in)) or '(none)'}")
        click.echo(f"target: {problem.target:.6f}")
        click.echo(f"s_out:  {', '.join(lex.sort_ids(result.s_out)) or '(none)'}")
        click.echo(f"gap:    {result.gap:.6f}")


@main.command()
@_with_options(_PLAN_OPTIONS)
@click.option("--beam", default=3, show_default=True)
@click.option("--show-trace", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
def rewrite(message, sender, receiver, channel, lexicon, method, corpus, max_added,
            no_negativity, no_subj_ind, beam, show_trace, as_json):
    """Plan and realize a paraphrase for a message."""
    try:
        circ = _circumstance(sender, receiver, channel, lexicon)
        problem = build_problem(
            message,
            circ,
            max_added=max_added,
            negativity=False if no_negativity else None,
            subj_ind=not no_subj_ind,
        )
        result = _run_planner(method, problem, circ, corpus)
        candidate = realize_alternatives(message, result, circ, beam=beam)[0]
    except click.UsageError:
        raise
    except PoliteplanError as exc:
        _fail(exc)
    lex = circ.lexicon
    if as_json:
        payload = {
            "message": message,
            "text": candidate.text,
            "strategies": lex.sort_ids(candidate.realized),
            "predicted": round(candidate.predicted, 6),
            "gap": round(candidate.gap, 6),
            "shortfall": candidate.shortfall,
        }
        if show_trace:
            payload["trace"] = [
                {"strategy": s.strategy, "template": s.template_text, "anchor": s.anchor}
                for s in candidate.trace
            ]
        _echo_json(payload)
    else:
        click.echo(candidate.text)
        if show_trace:
            for step in candidate.trace:
                click.echo(f"  + {step.strategy} via {step.template_text!r} at {step.anchor}")
        if candidate.shortfall:
            click.echo(
                f"note: could not realize {', '.join(lex.sort_ids(candidate.missing))}",
                err=True,
            )


@main.group()
def channel():
    """Channel profiling commands."""


@channel.command(name="profile")
@click.option("--pairs", "pairs_path", required=True, help="JSONL {original, round_trip}")
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--lexicon", default="builtin", show_default=True)
@click.option("-o", "--output", required=True, help="where to write the channel spec")
def channel_profile(pairs_path, threshold, lexicon, output):
    """Estimate per-strategy safety bits from round-trip pairs."""
    lex = resolve_lexicon(lexicon)
    pairs = []
    try:
        with open(pairs_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                pairs.append(
                    RoundTripPair(original=str(rec["original"]), round_trip=str(rec["round_trip"]))
                )
        spec = profile_channel(pairs, lex, threshold=threshold)
        save_channel(spec, output)
    except (PoliteplanError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        _fail(exc)
    at_risk = lex.sort_ids(spec.at_risk())
    click.echo(f"wrote {output}; at-risk: {', '.join(at_risk) or '(none)'}")
    if spec.unsupported:
        click.echo(
            f"warning: no supporting pairs for {', '.join(spec.unsupported)}; defaulted to safe",
            err=True,
        )


@main.group()
def model():
    """Perception model commands."""


@model.command(name="fit")
@click.option("--annotations", required=True, help="JSONL {text, score, annotator?}")
@click.option("--lexicon", default="builtin", show_default=True)
@click.option("--annotator", default=None, help="fit an individual model for this annotator id")
@click.option("--fallback", default="builtin:average", show_default=True,
              help="fallback model for under-annotated strategies (individual fit)")
@click.option("--min-count", default=15, show_default=True)
@click.option("-o", "--output", required=True)
def model_fit(annotations, lexicon, annotator, fallback, min_count, output):
    """Fit a linear perception model from annotated utterances."""
    lex = resolve_lexicon(lexicon)
    try:
        data = load_annotations(annotations)
        if annotator is not None:
            data = [u for u in data if u.annotator == annotator]
            fitted = fit_individual_model(
                data, resolve_model(fallback), lex, min_count=min_count,
                provenance=f"individual:{annotator}",
            )
        else:
            fitted = fit_model(data, lex)
        save_model(fitted, output)
    except (PoliteplanError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote {output} ({fitted.provenance})")


@main.group(name="eval")
def eval_group():
    """Experiment evaluation commands."""


@eval_group.command(name="run")
@click.option("--config", "config_path", required=True)
@click.option("-o", "--output", "out_dir", required=True)
def eval_run(config_path, out_dir):
    """Run a configured experiment and write per-method reports."""
    try:
        config = load_experiment_config(config_path)
        reports = run_experiment(config)
        write_reports(reports, out_dir)
    except (PoliteplanError, OSError) as exc:
        _fail(exc)
    click.echo(render_table(reports))


@main.command()
@click.option("--config", "config_path", default=None)
@click.option("--host", default=None, help="overrides config and POLITEPLAN_HOST")
@click.option("--port", default=None, type=int, help="overrides config and POLITEPLAN_PORT")
@click.option("--static", "static_dir", default=None,
              help="serve a built frontend directory at the web root")
def serve(config_path, host, port, static_dir):
    """Run the HTTP service."""
    import os

    from .service import serve as run_service

    try:
        config = load_service_config(config_path) if config_path else ServiceConfig()
        Api(config)  # fail fast on bad registry references
        host = host or os.environ.get("POLITEPLAN_HOST")
        env_port = os.environ.get("POLITEPLAN_PORT")
        port = port if port is not None else (int(env_port) if env_port else None)
        if static_dir and not os.path.isdir(static_dir):
            raise ConfigError(f"static directory {static_dir!r} does not exist")
    except (PoliteplanError, OSError, ValueError) as exc:
        _fail(exc)
    run_service(config, host=host, port=port, static_dir=static_dir)


if __name__ == "__main__":
    main()
