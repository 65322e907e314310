"""Chat-completion client for OpenAI-compatible HTTP endpoints.

Request: ``POST {base_url}/chat/completions`` with
``{"model", "messages": [{"role": "system"}, {"role": "user"}], "max_tokens", "temperature"}``.
Response: text is read from ``choices[0].message.content``.
"""

from __future__ import annotations

import logging
import os
import threading
import time

import requests

from .base import GenerationRequest, RetryableBackendError, TerminalBackendError
from .embedding import DEFAULT_DIM, EmbeddingVector, HashingEmbedder

log = logging.getLogger(__name__)

API_KEY_ENV = "SALT_API_KEY"
API_BASE_ENV = "SALT_API_BASE"


class HttpBackend:
    def __init__(
        self,
        model: str = "gpt-4o",
        base_url: str | None = None,
        api_key: str | None = None,
        *,
        max_retries: int = 3,
        backoff: float = 1.0,
        timeout: float = 60.0,
        max_in_flight: int = 4,
        dim: int = DEFAULT_DIM,
        session: requests.Session | None = None,
    ) -> None:
        self.model = model
        self.base_url = (base_url or os.environ.get(API_BASE_ENV) or "https://api.openai.com/v1").rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.max_retries = max_retries
        self.backoff = backoff
        self.timeout = timeout
        self.embedder = HashingEmbedder(dim)
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._session = session or requests.Session()

    def embed(self, text: str) -> EmbeddingVector:
        return self.embedder.embed(text)

    def payload(self, request: GenerationRequest) -> dict:
        return {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }

    def _attempt(self, request: GenerationRequest, attempt: int) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            with self._slots:
                resp = self._session.post(
                    f"{self.base_url}/chat/completions",
                    json=self.payload(request),
                    headers=headers,
                    timeout=self.timeout,
                )
        except requests.RequestException as exc:
            raise RetryableBackendError(f"transport error: {exc}", attempt) from exc
        if not 200 <= resp.status_code < 300:
            raise RetryableBackendError(f"HTTP {resp.status_code}: {resp.text[:200]}", attempt)
        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise RetryableBackendError(f"malformed response: {exc}", attempt) from exc
        if not content or not content.strip():
            raise RetryableBackendError("empty completion", attempt)
        return content

    def generate(self, request: GenerationRequest) -> str:
        last: RetryableBackendError | None = None
        for attempt in range(1, self.max_retries + 1):
            try:
                return self._attempt(request, attempt)
            except RetryableBackendError as exc:
                last = exc
                log.warning("chat completion attempt %d/%d failed: %s", attempt, self.max_retries, exc)
                if attempt < self.max_retries and self.backoff > 0:
                    time.sleep(self.backoff * 2 ** (attempt - 1))
        raise TerminalBackendError(f"giving up after {self.max_retries} attempts: {last}", self.max_retries)
