"""Hashed bag-of-words embeddings and cosine similarity."""

from __future__ import annotations

import hashlib
import math
import threading
from dataclasses import dataclass

import numpy as np

from .text import content_words

DEFAULT_DIM = 256


class ZeroInformationError(ValueError):
    """Raised when a text has no content words left to embed."""


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A unit-norm vector of fixed dimension."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("embedding must be a non-empty 1-d vector")
        norm = float(np.linalg.norm(values))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"embedding must be unit norm, got {norm:.8f}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return int(self.values.size)

    @classmethod
    def normalized(cls, raw) -> "EmbeddingVector":
        arr = np.asarray(raw, dtype=np.float64)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ZeroInformationError("cannot normalize the zero vector")
        return cls(arr / norm)

    def tolist(self) -> list[float]:
        return [float(v) for v in self.values]


def bucket(token: str, dim: int) -> int:
    """Stable bucket index of a token (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dim


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    # ordered dot so cosine(a, b) == cosine(b, a) bit for bit
    value = math.fsum(a.values * b.values)
    return min(1.0, max(-1.0, value))


class HashingEmbedder:
    """Tokenize, drop stopwords, hash tokens into ``dim`` buckets, count, L2-normalize."""

    def __init__(self, dim: int = DEFAULT_DIM) -> None:
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self._cache: dict[str, EmbeddingVector] = {}
        self._lock = threading.Lock()

    def embed(self, text: str) -> EmbeddingVector:
        cached = self._cache.get(text)
        if cached is not None:
            return cached
        tokens = content_words(text)
        if not tokens:
            raise ZeroInformationError(f"no content words in {text[:40]!r}")
        counts = np.zeros(self.dim, dtype=np.float64)
        for tok in tokens:
            counts[bucket(tok, self.dim)] += 1.0
        vec = EmbeddingVector.normalized(counts)
        with self._lock:
            self._cache[text] = vec
        return vec

    def try_embed(self, text: str) -> EmbeddingVector | None:
        try:
            return self.embed(text)
        except ZeroInformationError:
            return None
