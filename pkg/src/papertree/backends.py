"""Summarizer backends.

A backend turns a SummaryRequest into raw response text in the shape the
pipeline parses (a JSON object with a "points" list).  The extractive
backend is the deterministic offline default: it selects verbatim
sentences, so every evidence string anchors exactly.  Remote chat backends
render the role's prompt template and POST it to a chat-completions style
endpoint.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import httpx

from .errors import BackendUnavailable, ContentTooShort
from .prompts import render_prompt, template_for_role
from .summarize import SummaryRequest
from .textnorm import split_sentences

_WORD = re.compile(r"[^\W\d_]{3,}")


@runtime_checkable
class SummarizerBackend(Protocol):
    backend_id: str

    def complete(self, request: SummaryRequest) -> str: ...


def _vocabulary(text: str) -> set[str]:
    return {w.casefold() for w in _WORD.findall(text)}


@dataclass
class ExtractiveBackend:
    """Deterministic sentence-extraction backend.

    Sentences are scored by position (first and last boosted) plus lexical
    overlap with the abstract, and the top clamp(n, 2, 5) are returned in
    document order with point = evidence = the sentence.  Sentences without
    a single letter are not candidates.
    """

    backend_id: str = "extractive"

    def complete(self, request: SummaryRequest) -> str:
        content = request.content
        spans = [
            (s, e)
            for s, e in split_sentences(content)
            if any(ch.isalpha() for ch in content[s:e])
        ]
        if not spans:
            raise ContentTooShort("content has no sentences")
        sentences = [content[s:e] for s, e in spans]
        abstract_vocab = _vocabulary(request.abstract_text)
        scored: list[tuple[float, int]] = []
        for idx, sentence in enumerate(sentences):
            position = 0.0
            if idx == 0:
                position = 1.0
            elif idx == len(sentences) - 1:
                position = 0.5
            vocab = _vocabulary(sentence)
            overlap = len(vocab & abstract_vocab) / max(1, len(vocab))
            scored.append((position + overlap, idx))
        k = min(len(sentences), min(5, max(2, len(sentences))))
        chosen = sorted(sorted(scored, key=lambda t: (-t[0], t[1]))[:k], key=lambda t: t[1])
        points = [
            {"point": sentences[idx], "evidence": sentences[idx]}
            for _, idx in chosen
        ]
        return json.dumps({"points": points}, ensure_ascii=False)


@dataclass
class HttpChatBackend:
    """Adapter for an OpenAI-style chat completions endpoint.

    The credential is read from ``credential_env`` at call time; transport
    failures are retried up to ``max_retries`` times before raising
    BackendUnavailable.
    """

    backend_id: str
    endpoint: str
    model: str
    credential_env: str = "PAPERTREE_API_KEY"
    timeout_s: float = 60.0
    max_retries: int = 1
    temperature: float = 0.0
    retry_wait_s: float = 1.0

    def available(self) -> bool:
        return bool(os.environ.get(self.credential_env))

    def complete(self, request: SummaryRequest) -> str:
        prompt = render_prompt(request, template_for_role(request.role))
        headers = {"Content-Type": "application/json"}
        credential = os.environ.get(self.credential_env)
        if credential:
            headers["Authorization"] = f"Bearer {credential}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                response = httpx.post(
                    self.endpoint, json=body, headers=headers, timeout=self.timeout_s
                )
                response.raise_for_status()
                payload = response.json()
                return payload["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                if attempt < self.max_retries:
                    time.sleep(self.retry_wait_s)
        raise BackendUnavailable(
            f"backend {self.backend_id!r} failed after "
            f"{self.max_retries + 1} attempts: {last_error}"
        )


@dataclass
class BackendRegistry:
    """Known backends by id; the extractive backend is always registered."""

    backends: dict[str, SummarizerBackend] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.backends.setdefault("extractive", ExtractiveBackend())

    def get(self, backend_id: str) -> SummarizerBackend | None:
        return self.backends.get(backend_id)

    def register(self, backend: SummarizerBackend) -> None:
        self.backends[backend.backend_id] = backend

    @classmethod
    def from_config(cls, backend_configs: dict[str, dict]) -> "BackendRegistry":
        registry = cls()
        for backend_id, spec in backend_configs.items():
            kind = spec.get("type", "http")
            if kind == "extractive":
                registry.register(ExtractiveBackend(backend_id=backend_id))
            elif kind == "http":
                registry.register(
                    HttpChatBackend(
                        backend_id=backend_id,
                        endpoint=spec["endpoint"],
                        model=spec.get("model", ""),
                        credential_env=spec.get("credential_env", "PAPERTREE_API_KEY"),
                        timeout_s=float(spec.get("timeout_s", 60.0)),
                        max_retries=int(spec.get("max_retries", 1)),
                        temperature=float(spec.get("temperature", 0.0)),
                    )
                )
            else:
                raise ValueError(f"unknown backend type {kind!r}")
        return registry
