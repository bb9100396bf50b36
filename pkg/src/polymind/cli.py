"""Command-line entry points."""
from __future__ import annotations

import sys
from pathlib import Path

import click

from .engine import SchedulerConfig
from .errors import PolymindError
from .llm import DEFAULT_API_KEY_ENV
from .persistence import dump_events, load, save
from .service import create_app, create_provider
from .simulate import TraceScript, simulate


@click.group()
def main():
    """Visual prewriting engine: serve a canvas, simulate traces, print outlines."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--provider", "provider_kind", default="mock", show_default=True,
              type=click.Choice(["mock", "remote"]))
@click.option("--base-url", default=None, help="Chat-completions base URL (remote provider).")
@click.option("--model", default="gpt-3.5-turbo", show_default=True)
@click.option("--api-key-env", default=DEFAULT_API_KEY_ENV, show_default=True,
              help="Environment variable holding the API key.")
@click.option("--tick-seconds", default=5.0, show_default=True, type=float)
@click.option("--doc", "doc_path", default=None, type=click.Path(path_type=Path),
              help="Document file to load (if it exists) and save on shutdown.")
@click.option("--seed", default=0, show_default=True, type=int)
def serve(host, port, provider_kind, base_url, model, api_key_env, tick_seconds,
          doc_path, seed):
    """Run the WebSocket/HTTP service."""
    import uvicorn

    try:
        provider = create_provider(provider_kind, base_url=base_url, model=model,
                                   api_key_env=api_key_env, seed=seed)
        config = SchedulerConfig(tick_seconds=tick_seconds)
        doc = None
        if doc_path is not None and doc_path.exists():
            doc = load(doc_path)
        app = create_app(doc=doc, config=config, provider=provider,
                         doc_path=doc_path, seed=seed)
    except PolymindError as exc:
        raise click.ClickException(str(exc)) from None
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command("simulate")
@click.option("--trace", "trace_path", required=True, type=click.Path(path_type=Path, exists=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", default=None, type=click.Path(path_type=Path),
              help="Where to write the event log (default: stdout).")
@click.option("--latency", default=0.0, show_default=True, type=float,
              help="Simulated provider latency in seconds.")
@click.option("--save-doc", "save_doc_path", default=None, type=click.Path(path_type=Path),
              help="Also save the final document here.")
def simulate_cmd(trace_path, seed, out_path, latency, save_doc_path):
    """Run a trace deterministically and emit the event log."""
    try:
        script = TraceScript.from_path(trace_path)
        doc = simulate(script, seed=seed, latency=latency)
    except PolymindError as exc:
        raise click.ClickException(str(exc)) from None
    payload = dump_events(doc.event_log)
    if out_path is None:
        sys.stdout.write(payload)
    else:
        out_path.write_text(payload, encoding="utf-8")
    if save_doc_path is not None:
        save(doc, save_doc_path)


@main.command()
@click.option("--doc", "doc_path", required=True, type=click.Path(path_type=Path, exists=True))
@click.option("--section", "section_id", required=True)
def outline(doc_path, section_id):
    """Print the hierarchical outline of one section."""
    try:
        document = load(doc_path)
        click.echo(document.section_outline(section_id))
    except PolymindError as exc:
        raise click.ClickException(str(exc)) from None


if __name__ == "__main__":
    main()
