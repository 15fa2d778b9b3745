"""Inference shim exposing a seq2seq model behind the wire protocol."""

from .server import Generator, ServerConfig, create_app, serve

__version__ = "0.1.0"

__all__ = [
    "Generator",
    "ServerConfig",
    "create_app",
    "serve",
]
