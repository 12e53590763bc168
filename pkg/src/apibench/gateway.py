"""Uniform gateway to completion backends.

Live HTTP endpoints and a content-addressed record/replay store sit behind the
same generate() call. A request digest is a pure function of the request, so a
strict-replay run is fully deterministic end to end.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Protocol

import requests as _requests

from .errors import BackendUnavailable, BudgetExceeded, ReplayMiss


class GenMode(str, Enum):
    FILL_IN_MIDDLE = "fill_in_middle"
    LEFT_TO_RIGHT = "left_to_right"
    CHAT = "chat"


@dataclass(frozen=True)
class GenParams:
    temperature: float
    top_p: float
    max_new_tokens: int

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.top_p <= 1):
            raise ValueError("top_p must be in (0, 1]")
        if self.max_new_tokens <= 0:
            raise ValueError("max_new_tokens must be positive")


# completion defaults follow the studied IDE configurations; repair runs greedy
PARAM_PRESETS = {
    "starcoder": GenParams(temperature=0.2, top_p=0.95, max_new_tokens=150),
    "qwen": GenParams(temperature=0.3, top_p=0.95, max_new_tokens=150),
    "repair": GenParams(temperature=0.0, top_p=0.95, max_new_tokens=2048),
}


@dataclass(frozen=True)
class GenRequest:
    mode: GenMode
    model_name: str
    params: GenParams
    prefix: str = ""
    suffix: str | None = None
    messages: tuple[tuple[str, str], ...] = ()  # (role, content) pairs

    def __post_init__(self):
        if self.mode is GenMode.FILL_IN_MIDDLE and self.suffix is None:
            raise ValueError("fill-in-middle requests need a suffix")
        if self.mode is GenMode.CHAT and not self.messages:
            raise ValueError("chat requests need a non-empty message list")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "model_name": self.model_name,
            "params": {
                "temperature": self.params.temperature,
                "top_p": self.params.top_p,
                "max_new_tokens": self.params.max_new_tokens,
            },
            "prompt_parts": {
                "prefix": self.prefix,
                "suffix": self.suffix,
                "messages": [list(m) for m in self.messages],
            },
        }


@dataclass(frozen=True)
class GenResponse:
    text: str
    backend: str
    latency_ms: int
    cached: bool


@dataclass(frozen=True)
class CompletionRecord:
    task_id: str
    model: str
    backend: str
    text: str
    cached: bool
    latency_ms: int

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "model": self.model,
            "backend": self.backend,
            "text": self.text,
            "cached": self.cached,
            "latency_ms": self.latency_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompletionRecord":
        return cls(d["task_id"], d["model"], d["backend"], d["text"], d["cached"], d["latency_ms"])


def request_digest(req: GenRequest) -> str:
    blob = json.dumps(req.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Backend(Protocol):
    name: str

    def complete(self, req: GenRequest) -> str: ...


class ScriptedBackend:
    """Deterministic in-process backend for tests and fixture recording."""

    def __init__(self, name: str, fn: Callable[[GenRequest], str]):
        self.name = name
        self.fn = fn

    def complete(self, req: GenRequest) -> str:
        return self.fn(req)


class HttpBackend:
    """POSTs a JSON body with model/prompt-or-messages/suffix and sampling
    params; bearer token and endpoint come from the environment unless given.

    The fill-in-the-middle sentinel format is model specific, so a per-backend
    template with {prefix}/{suffix} markers can replace the suffix field.
    """

    def __init__(
        self,
        name: str,
        base_url: str | None = None,
        api_key: str | None = None,
        fim_template: str | None = None,
        timeout: float = 120.0,
        session: object | None = None,
    ):
        self.name = name
        self.base_url = base_url or os.environ.get("MODEL_API_BASE", "")
        self.api_key = api_key or os.environ.get("MODEL_API_KEY", "")
        self.fim_template = fim_template
        self.timeout = timeout
        self.session = session or _requests.Session()

    def _payload(self, req: GenRequest) -> dict:
        body = {
            "model": req.model_name,
            "temperature": req.params.temperature,
            "top_p": req.params.top_p,
            "max_tokens": req.params.max_new_tokens,
        }
        if req.mode is GenMode.CHAT:
            body["messages"] = [{"role": r, "content": c} for r, c in req.messages]
        elif req.mode is GenMode.FILL_IN_MIDDLE and self.fim_template:
            body["prompt"] = self.fim_template.replace("{prefix}", req.prefix).replace(
                "{suffix}", req.suffix or ""
            )
        else:
            body["prompt"] = req.prefix
            if req.mode is GenMode.FILL_IN_MIDDLE:
                body["suffix"] = req.suffix
        return body

    def complete(self, req: GenRequest) -> str:
        if not self.base_url:
            raise BackendUnavailable("MODEL_API_BASE is not configured")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self.session.post(
                self.base_url, json=self._payload(req), headers=headers, timeout=self.timeout
            )
            resp.raise_for_status()
            data = resp.json()
        except (_requests.RequestException, ValueError) as exc:
            raise BackendUnavailable(str(exc)) from exc
        if isinstance(data.get("text"), str):
            return data["text"]
        choices = data.get("choices") or []
        if choices:
            first = choices[0]
            if isinstance(first.get("text"), str):
                return first["text"]
            message = first.get("message") or {}
            if isinstance(message.get("content"), str):
                return message["content"]
        raise BackendUnavailable("unrecognized response shape")


class ReplayStore:
    """Content-addressed JSONL file of {digest, request, response} records.

    Reads are lock-free over an in-memory index; writes are serialized and
    idempotent per digest.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._index: dict[str, dict] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        self._index[rec["digest"]] = rec

    def __len__(self) -> int:
        return len(self._index)

    def get(self, digest: str) -> dict | None:
        return self._index.get(digest)

    def put(self, digest: str, request: dict, response: dict) -> None:
        with self._lock:
            if digest in self._index:
                return
            rec = {"digest": digest, "request": request, "response": response}
            self._index[digest] = rec
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


class Gateway:
    """Shared front door enforcing an in-flight ceiling, an optional per-minute
    rate limit, and a live-request budget."""

    def __init__(
        self,
        backend: Backend | None = None,
        store: ReplayStore | None = None,
        mode: str = "live",
        max_in_flight: int = 8,
        requests_per_minute: int | None = None,
        max_requests: int | None = None,
        retries: int = 3,
        backoff: float = 0.5,
    ):
        if mode not in ("live", "record", "replay"):
            raise ValueError(f"unknown gateway mode {mode!r}")
        if mode in ("record", "replay") and store is None:
            raise ValueError(f"{mode} mode needs a replay store")
        if mode in ("live", "record") and backend is None:
            raise ValueError(f"{mode} mode needs a backend")
        self.backend = backend
        self.store = store
        self.mode = mode
        self.retries = retries
        self.backoff = backoff
        self._sem = threading.BoundedSemaphore(max_in_flight)
        self._budget_lock = threading.Lock()
        self._live_requests = 0
        self.max_requests = max_requests
        self.requests_per_minute = requests_per_minute
        self._stamps: deque[float] = deque()
        self._rate_lock = threading.Lock()

    @property
    def live_requests(self) -> int:
        return self._live_requests

    def generate(self, req: GenRequest) -> GenResponse:
        digest = request_digest(req)
        if self.mode in ("record", "replay") and self.store is not None:
            hit = self.store.get(digest)
            if hit is not None:
                resp = hit["response"]
                return GenResponse(resp["text"], resp["backend"], resp["latency_ms"], True)
            if self.mode == "replay":
                raise ReplayMiss(digest)

        with self._budget_lock:
            self._live_requests += 1
            if self.max_requests is not None and self._live_requests > self.max_requests:
                raise BudgetExceeded(f"request budget of {self.max_requests} exhausted")

        with self._sem:
            self._rate_wait()
            start = time.monotonic()
            text = self._call_with_retries(req)
            latency_ms = int((time.monotonic() - start) * 1000)

        if self.mode == "record" and self.store is not None:
            self.store.put(
                digest,
                req.to_dict(),
                {"text": text, "backend": self.backend.name, "latency_ms": latency_ms},
            )
        return GenResponse(text, self.backend.name, latency_ms, False)

    def _call_with_retries(self, req: GenRequest) -> str:
        for attempt in range(self.retries + 1):
            try:
                return self.backend.complete(req)
            except BackendUnavailable:
                if attempt == self.retries:
                    raise
                time.sleep(self.backoff * (2**attempt))
        raise BackendUnavailable("unreachable")

    def _rate_wait(self) -> None:
        if self.requests_per_minute is None:
            return
        while True:
            with self._rate_lock:
                now = time.monotonic()
                while self._stamps and now - self._stamps[0] >= 60.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.requests_per_minute:
                    self._stamps.append(now)
                    return
                wait = 60.0 - (now - self._stamps[0])
            time.sleep(max(wait, 0.01))
