"""HTTP client side of the generation wire protocol.

The protocol has two routes. POST {endpoint}/generate takes
{"inputs": [str], "max_new_tokens": int, "request_id": str} and returns
{"outputs": [str], "model_id": str} with outputs aligned to inputs.
GET {endpoint}/health returns {"status": "ok", "model_id": str}.
Any server speaking this protocol is interchangeable here.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

import requests

from .errors import BackendError, ContractViolation, ProtocolError, TransportError

# Statuses worth a retry: the request itself was acceptable.
RETRYABLE_STATUSES = frozenset({429, 502, 503, 504})


@dataclass
class GenerationRequest:
    inputs: list[str]
    max_new_tokens: int = 64
    # Kept stable across retries so the server can deduplicate.
    request_id: str = field(default_factory=lambda: uuid.uuid4().hex)


@dataclass
class GenerationResponse:
    outputs: list[str]
    model_id: str


@dataclass
class RetryPolicy:
    """How generate_batch reacts to transient failure.

    attempts counts every try including the first. Sleeps grow as
    backoff_base * backoff_factor ** (try_number - 1).
    """

    attempts: int = 3
    backoff_base: float = 0.1
    backoff_factor: float = 2.0
    timeout: float = 30.0


def _validate_request(request: GenerationRequest) -> None:
    if request.max_new_tokens < 1:
        raise ContractViolation(
            f"max_new_tokens must be >= 1, got {request.max_new_tokens}"
        )
    if not all(isinstance(text, str) for text in request.inputs):
        raise ContractViolation("inputs must all be strings")
    if not request.request_id:
        raise ContractViolation("request_id must be non-empty")


def _parse_response(payload, expected_count: int) -> GenerationResponse:
    if not isinstance(payload, dict):
        raise ProtocolError("response body is not a JSON object")
    outputs = payload.get("outputs")
    model_id = payload.get("model_id")
    if not isinstance(outputs, list) or not all(
        isinstance(item, str) for item in outputs
    ):
        raise ProtocolError("response field 'outputs' is not a list of strings")
    if not isinstance(model_id, str):
        raise ProtocolError("response field 'model_id' is not a string")
    if len(outputs) != expected_count:
        raise ProtocolError(
            f"got {len(outputs)} outputs for {expected_count} inputs"
        )
    return GenerationResponse(outputs=outputs, model_id=model_id)


def generate_batch(
    endpoint: str,
    request: GenerationRequest,
    policy: RetryPolicy | None = None,
    *,
    session=None,
    sleep=time.sleep,
) -> GenerationResponse:
    """Send one generation request, retrying transient failures.

    Connection errors, timeouts and retryable statuses (429, 5xx
    gateway family) are retried with exponential backoff under the same
    request_id. Exhausted network retries raise TransportError; any
    other non-2xx response raises BackendError; a 2xx response that
    breaks the contract raises ProtocolError.
    """
    policy = policy or RetryPolicy()
    _validate_request(request)
    post = (session or requests).post
    url = endpoint.rstrip("/") + "/generate"
    body = {
        "inputs": list(request.inputs),
        "max_new_tokens": request.max_new_tokens,
        "request_id": request.request_id,
    }

    last_error: Exception | None = None
    last_status: int | None = None
    for attempt in range(1, policy.attempts + 1):
        if attempt > 1:
            sleep(policy.backoff_base * policy.backoff_factor ** (attempt - 2))
        try:
            response = post(url, json=body, timeout=policy.timeout)
        except (requests.ConnectionError, requests.Timeout) as err:
            last_error = err
            continue
        if response.status_code in RETRYABLE_STATUSES:
            last_status = response.status_code
            last_error = None
            continue
        if not 200 <= response.status_code < 300:
            raise BackendError(
                "backend rejected the request",
                status=response.status_code,
                body=response.text,
            )
        try:
            payload = response.json()
        except ValueError as err:
            raise ProtocolError(f"response is not JSON: {err}") from err
        return _parse_response(payload, expected_count=len(request.inputs))

    if last_error is not None:
        raise TransportError(
            f"giving up on {url} after {policy.attempts} attempts: {last_error}"
        )
    raise BackendError(
        f"backend still failing after {policy.attempts} attempts",
        status=last_status,
    )


def check_health(endpoint: str, timeout: float = 5.0, *, session=None) -> str:
    """Return the model_id reported by a healthy backend."""
    get = (session or requests).get
    url = endpoint.rstrip("/") + "/health"
    try:
        response = get(url, timeout=timeout)
    except (requests.ConnectionError, requests.Timeout) as err:
        raise TransportError(f"health check failed for {url}: {err}") from err
    if response.status_code != 200:
        raise BackendError(
            "health check rejected", status=response.status_code, body=response.text
        )
    try:
        payload = response.json()
    except ValueError as err:
        raise ProtocolError(f"health response is not JSON: {err}") from err
    if not isinstance(payload, dict) or payload.get("status") != "ok":
        raise ProtocolError(f"unexpected health payload: {payload!r}")
    model_id = payload.get("model_id")
    if not isinstance(model_id, str):
        raise ProtocolError("health field 'model_id' is not a string")
    return model_id


class GenerationClient:
    """A bounded client for one endpoint.

    At most max_concurrency generate requests are in flight at a time;
    extra callers block. Reuses one HTTP session.
    """

    def __init__(
        self,
        endpoint: str,
        policy: RetryPolicy | None = None,
        max_concurrency: int = 4,
    ):
        if max_concurrency < 1:
            raise ContractViolation(
                f"max_concurrency must be >= 1, got {max_concurrency}"
            )
        self.endpoint = endpoint
        self.policy = policy or RetryPolicy()
        self._gate = threading.BoundedSemaphore(max_concurrency)
        self._session = requests.Session()

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        with self._gate:
            return generate_batch(
                self.endpoint, request, self.policy, session=self._session
            )

    def health(self) -> str:
        return check_health(self.endpoint, session=self._session)

    def close(self) -> None:
        self._session.close()

    def __enter__(self) -> "GenerationClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
