"""Command-line entry point."""

from __future__ import annotations

import click

from .server import ServerConfig, serve


@click.command(name="model-server")
@click.option("--model", required=True, help="Checkpoint path or model identifier.")
@click.option("--device", default="cpu", show_default=True)
@click.option(
    "--max-new-tokens",
    "cap",
    type=int,
    default=256,
    show_default=True,
    help="Upper bound on tokens generated per input; larger requests are clamped.",
)
@click.option("--port", type=int, default=8008, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--sample", is_flag=True, help="Sample instead of decoding greedily.")
def main(model, device, cap, port, host, sample):
    """Serve a text-to-text model behind the generation wire protocol."""
    try:
        config = ServerConfig(
            model=model,
            device=device,
            max_new_tokens_cap=cap,
            port=port,
            host=host,
            sample=sample,
        )
    except ValueError as err:
        raise click.UsageError(str(err)) from err
    try:
        serve(config)
    except RuntimeError as err:
        raise click.ClickException(str(err)) from err


if __name__ == "__main__":
    main()
