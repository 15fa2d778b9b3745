import os

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_VERBOSITY", "error")

import threading
import time

import pytest
import torch
import uvicorn
from transformers import ByT5Tokenizer, T5Config, T5ForConditionalGeneration

from model_server import Generator, ServerConfig, create_app

CAP = 16


@pytest.fixture(scope="session")
def cap():
    """Token budget cap the test server is configured with."""
    return CAP


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    """A tiny randomly initialized byte-level seq2seq checkpoint.

    Built fresh per session; useless for output quality, sufficient for
    protocol, ordering and determinism checks.
    """
    path = tmp_path_factory.mktemp("tiny-checkpoint")
    config = T5Config(
        vocab_size=384,
        d_model=32,
        d_kv=8,
        d_ff=64,
        num_layers=2,
        num_heads=2,
        decoder_start_token_id=0,
        pad_token_id=0,
        eos_token_id=1,
        tie_word_embeddings=False,
        feed_forward_proj="gated-gelu",
    )
    torch.manual_seed(7)
    T5ForConditionalGeneration(config).save_pretrained(path)
    ByT5Tokenizer().save_pretrained(path)
    return path


@pytest.fixture(scope="session")
def running_server(checkpoint):
    """The shim serving the tiny checkpoint on an ephemeral port."""
    config = ServerConfig(model=str(checkpoint), max_new_tokens_cap=CAP, port=0)
    generator = Generator(config)
    app = create_app(generator, config.model, config.max_new_tokens_cap)
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 60
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start in time")
        time.sleep(0.05)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=10)
