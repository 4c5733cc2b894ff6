"""Text-generation providers.

Every provider answers ``complete(prompt, model=..., temperature=...,
max_tokens=...)`` with the response text and appends a
:class:`ProviderExchange` to ``exchanges``.  The replay provider serves
recorded responses keyed by the SHA-256 of the prompt text.
"""
from __future__ import annotations

import json
import logging
import os
import time
import urllib.error
import urllib.request
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

from .prompts import prompt_hash

log = logging.getLogger(__name__)

ENDPOINT_ENV = "FPVKIT_ENDPOINT"
API_KEY_ENV = "FPVKIT_API_KEY"


class ProviderError(RuntimeError):
    """Transport-level failure; retried."""


class ProviderExhausted(RuntimeError):
    """No usable response could be obtained."""


@dataclass
class ProviderExchange:
    prompt_hash: str
    request: dict
    response: str
    latency: float
    provider: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GenerationParams:
    model: str = "replay"
    temperature: float = 0.0
    max_tokens: int = 2048


class Provider:
    provider_id = "provider"

    def __init__(self) -> None:
        self.exchanges: list[ProviderExchange] = []

    def _send(self, prompt: str, params: GenerationParams) -> str:
        raise NotImplementedError

    def complete(self, prompt: str, params: GenerationParams | None = None) -> str:
        params = params or GenerationParams()
        start = time.perf_counter()
        text = self._send(prompt, params)
        self.exchanges.append(ProviderExchange(
            prompt_hash(prompt),
            {"model": params.model, "temperature": params.temperature, "max_tokens": params.max_tokens,
             "prompt": prompt},
            text, round(time.perf_counter() - start, 6), self.provider_id))
        return text


class ReplayProvider(Provider):
    provider_id = "replay"

    def __init__(self, transcript: str | Path | list[dict]):
        super().__init__()
        records = transcript if isinstance(transcript, list) else json.loads(Path(transcript).read_text("utf-8"))
        if not isinstance(records, list):
            raise ValueError("transcript must be a JSON array of exchanges")
        self.responses: dict[str, str] = {}
        for r in records:
            self.responses.setdefault(r["prompt_hash"], r["response"])

    def _send(self, prompt: str, params: GenerationParams) -> str:
        h = prompt_hash(prompt)
        if h not in self.responses:
            raise ProviderExhausted(f"no recorded response for prompt {h[:12]}")
        return self.responses[h]

    def complete(self, prompt: str, params: GenerationParams | None = None) -> str:
        text = super().complete(prompt, params)
        self.exchanges[-1].latency = 0.0
        return text


class ScriptedProvider(Provider):
    """Returns the given responses in order (used to author transcripts)."""

    provider_id = "scripted"

    def __init__(self, responses: list[str]):
        super().__init__()
        self._queue = list(responses)

    def _send(self, prompt: str, params: GenerationParams) -> str:
        if not self._queue:
            raise ProviderExhausted("scripted responses exhausted")
        return self._queue.pop(0)


class HttpProvider(Provider):
    """Chat-completions style JSON endpoint.

    The endpoint and credential come from the config or the environment;
    the credential is only placed in the request header.
    """

    provider_id = "http"

    def __init__(self, endpoint: str | None = None, api_key: str | None = None, timeout: float = 60.0):
        super().__init__()
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        self._api_key = api_key or os.environ.get(API_KEY_ENV)
        self.timeout = timeout
        if not self.endpoint:
            raise ValueError(f"HTTP provider needs an endpoint (config or ${ENDPOINT_ENV})")

    def _send(self, prompt: str, params: GenerationParams) -> str:
        body = json.dumps({
            "model": params.model,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "messages": [{"role": "user", "content": prompt}],
        }).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        req = urllib.request.Request(self.endpoint, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, ConnectionError, json.JSONDecodeError) as exc:
            raise ProviderError(f"request to {self.endpoint} failed: {exc}") from None
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            if isinstance(payload, dict) and isinstance(payload.get("text"), str):
                return payload["text"]
            raise ProviderError("response has no completion text") from None


def complete_with_retry(provider: Provider, prompt: str, params: GenerationParams | None = None,
                        attempts: int = 3, base_delay: float = 0.5,
                        sleep: Callable[[float], None] = time.sleep) -> str:
    """Call the provider, retrying transport failures with exponential backoff."""
    if attempts < 1:
        raise ValueError("attempts must be at least 1")
    for i in range(attempts):
        try:
            return provider.complete(prompt, params)
        except ProviderError as exc:
            if i == attempts - 1:
                raise ProviderExhausted(f"provider failed after {attempts} attempts: {exc}") from exc
            delay = base_delay * (2 ** i)
            log.warning("provider call failed (%s); retrying in %.2fs", exc, delay)
            sleep(delay)
    raise AssertionError("unreachable")


@dataclass
class ProviderConfig:
    kind: str = "replay"
    transcript: str | None = None
    endpoint: str | None = None
    model: str = "replay"
    temperature: float = 0.0
    max_tokens: int = 2048
    timeout: float = 60.0
    attempts: int = 3
    base_delay: float = 0.5
    extra: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "ProviderConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise ValueError("provider config must be a JSON object")
        known = {k: doc[k] for k in cls.__dataclass_fields__ if k in doc and k != "extra"}
        if "api_key" in doc:
            raise ValueError("put the credential in $" + API_KEY_ENV + ", not in the config file")
        return cls(**known, extra={k: v for k, v in doc.items() if k not in known})

    def params(self) -> GenerationParams:
        return GenerationParams(self.model, self.temperature, self.max_tokens)

    def build(self) -> Provider:
        if self.kind == "replay":
            if not self.transcript:
                raise ValueError("replay provider needs a transcript")
            return ReplayProvider(self.transcript)
        if self.kind == "http":
            return HttpProvider(self.endpoint, timeout=self.timeout)
        raise ValueError(f"unknown provider kind {self.kind!r}")
