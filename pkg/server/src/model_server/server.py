"""Inference shim: a text-to-text model behind the generation protocol.

POST /generate takes {"inputs": [...], "max_new_tokens": n,
"request_id": "..."} and answers {"outputs": [...], "model_id": "..."}
with outputs aligned to inputs; GET /health reports readiness. Decoding
is greedy by default, so identical inputs produce identical outputs
within a server lifetime. Model execution is serialized through one
lock; the HTTP layer accepts concurrently.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

import torch
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

logger = logging.getLogger(__name__)


@dataclass
class ServerConfig:
    model: str
    device: str = "cpu"
    max_new_tokens_cap: int = 256
    port: int = 8008
    host: str = "127.0.0.1"
    sample: bool = False

    def __post_init__(self):
        if self.max_new_tokens_cap < 1:
            raise ValueError("max_new_tokens cap must be at least 1")
        if not 0 <= self.port <= 65535:
            raise ValueError(f"port {self.port} is out of range")


class Generator:
    """Loads a seq2seq checkpoint and decodes batches behind a lock."""

    def __init__(self, config: ServerConfig):
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(config.model)
            self.model = AutoModelForSeq2SeqLM.from_pretrained(config.model)
        except Exception as err:
            raise RuntimeError(f"cannot load model {config.model!r}: {err}") from err
        self.model.to(config.device)
        self.model.eval()
        self.device = config.device
        self.sample = config.sample
        self._lock = threading.Lock()

    def generate(self, inputs: list[str], max_new_tokens: int) -> list[str]:
        if not inputs:
            return []
        with self._lock:
            encoded = self.tokenizer(
                list(inputs), return_tensors="pt", padding=True
            ).to(self.device)
            with torch.no_grad():
                output_ids = self.model.generate(
                    **encoded,
                    max_new_tokens=max_new_tokens,
                    do_sample=self.sample,
                    num_beams=1,
                )
            return self.tokenizer.batch_decode(output_ids, skip_special_tokens=True)


class GenerateRequest(BaseModel):
    inputs: list[str]
    max_new_tokens: int = Field(ge=1, strict=True)
    request_id: str = Field(min_length=1)


def create_app(generator: Generator, model_id: str, max_new_tokens_cap: int) -> FastAPI:
    app = FastAPI(title="model-server", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "malformed generate request"}
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "model_id": model_id}

    @app.post("/generate")
    def generate(request: GenerateRequest, response: Response):
        budget = request.max_new_tokens
        if budget > max_new_tokens_cap:
            budget = max_new_tokens_cap
            response.headers["Warning"] = (
                f'299 model-server "max_new_tokens clamped to {max_new_tokens_cap}"'
            )
            logger.warning(
                "request %s: max_new_tokens %d clamped to %d",
                request.request_id,
                request.max_new_tokens,
                max_new_tokens_cap,
            )
        outputs = generator.generate(request.inputs, budget)
        return {"outputs": outputs, "model_id": model_id}

    return app


def serve(config: ServerConfig) -> None:
    """Load the model and serve until interrupted."""
    import uvicorn

    generator = Generator(config)
    app = create_app(generator, config.model, config.max_new_tokens_cap)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
