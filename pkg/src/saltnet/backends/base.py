from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .embedding import EmbeddingVector, HashingEmbedder


class BackendError(RuntimeError):
    """A generation call failed."""

    def __init__(self, message: str, attempts: int = 1) -> None:
        super().__init__(message)
        self.attempts = attempts


class RetryableBackendError(BackendError):
    """A single attempt failed (transport error, non-2xx status)."""


class TerminalBackendError(BackendError):
    """Retries are exhausted; callers should stop using this backend."""


@dataclass(frozen=True)
class GenerationRequest:
    system_prompt: str
    user_prompt: str
    max_tokens: int = 512
    temperature: float = 0.0
    # call-site label; the mock dispatches on it, live backends ignore it
    task: str = "generic"

    def __post_init__(self) -> None:
        if not self.system_prompt.strip() or not self.user_prompt.strip():
            raise ValueError("prompts must be non-empty")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


class Backend(Protocol):
    embedder: HashingEmbedder

    def generate(self, request: GenerationRequest) -> str: ...

    def embed(self, text: str) -> EmbeddingVector: ...
