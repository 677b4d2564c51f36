"""Chat-completions client for remote or local OpenAI-compatible servers, with cassettes."""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template

import httpx

from ..pddl import domain_text
from .base import (
    BudgetExceeded,
    Mode,
    ModelRefusal,
    TranslatorError,
    TranslatorRequest,
    TranslatorResponse,
    TransportError,
)

API_KEY_ENV = "PDDLEGO_API_KEY"
GOALS = {
    "coin": "Your goal is to find the coin and take it.",
    "cooking": "Your goal is to find the cookbook, follow its recipe, then prepare and eat the meal.",
}


def load_prompt(name: str) -> str:
    return resources.files("pddlego.translator.prompts").joinpath(name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class LLMConfig:
    endpoint: str = "https://api.openai.com/v1"
    model: str = "gpt-4"
    temperature: float = 1.0
    force_json: bool = True
    timeout: float = 60.0
    max_requests: int | None = None
    max_tokens: int | None = None
    max_concurrent: int = 4
    min_interval: float = 0.0


class RateLimiter:
    """Caps in-flight requests and spaces request starts by ``min_interval`` seconds."""

    def __init__(self, max_concurrent: int = 4, min_interval: float = 0.0):
        self._sem = threading.BoundedSemaphore(max_concurrent)
        self._lock = threading.Lock()
        self._interval = min_interval
        self._next = 0.0

    def __enter__(self) -> RateLimiter:
        self._sem.acquire()
        with self._lock:
            now = time.monotonic()
            wait = self._next - now
            self._next = max(now, self._next) + self._interval
        if wait > 0:
            time.sleep(wait)
        return self

    def __exit__(self, *exc) -> None:
        self._sem.release()


def request_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class Cassette:
    """JSON-lines store of ``{"request_hash", "response_text"}`` records.

    Identical requests inside one episode are answered in recording order.
    """

    def __init__(self, path: str | Path, mode: str = "replay"):
        if mode not in ("replay", "record"):
            raise ValueError(f"cassette mode must be replay or record, got {mode!r}")
        self.path = Path(path)
        self.mode = mode
        self._entries: dict[str, list[str]] = {}
        self._lock = threading.Lock()
        if mode == "replay":
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    rec = json.loads(line)
                    self._entries.setdefault(rec["request_hash"], []).append(rec["response_text"])
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("", encoding="utf-8")

    def lookup(self, key: str) -> str:
        with self._lock:
            queue = self._entries.get(key)
            if not queue:
                raise TransportError(f"no cassette entry for request {key[:12]}")
            return queue.pop(0)

    def record(self, key: str, text: str) -> None:
        with self._lock, self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"request_hash": key, "response_text": text}) + "\n")


def build_messages(request: TranslatorRequest) -> list[dict]:
    if request.mode == Mode.ACTION:
        system = Template(load_prompt("action.txt")).substitute(goal=GOALS.get(request.domain, ""))
        user = "".join(request.history) + request.observation
        user += "\nValid actions: " + ", ".join(request.valid_actions)
        return [{"role": "system", "content": system.strip()}, {"role": "user", "content": user}]
    template = "init.txt" if request.mode == Mode.INIT else "delta.txt"
    extra = load_prompt("cooking-extra.txt") if request.domain == "cooking" else ""
    system = Template(load_prompt(template)).substitute(domain=domain_text(request.domain).strip(), extra=extra)
    user = ""
    if request.problem:
        user += f"Previous problem file:\n{request.problem.strip()}\n\n"
    user += f"Observations:\n{request.observation.strip()}\n"
    return [{"role": "system", "content": system.strip()}, {"role": "user", "content": user}]


def extract(mode: Mode, text: str) -> str:
    """Pull the payload for ``mode`` out of a chatty reply."""
    body = re.sub(r"```[a-zA-Z]*", "", text).strip()
    if mode == Mode.DELTA:
        start, end = body.find("{"), body.rfind("}")
        return body[start : end + 1] if start != -1 and end > start else body
    if mode == Mode.INIT:
        start = body.lower().find("(define")
        return body[start:].strip() + "\n" if start != -1 else body
    first = body.splitlines()[0] if body else ""
    return first.strip().strip(".'\"`").lower()


_REFUSAL = re.compile(r"^(i'm sorry|i am sorry|i cannot|i can't|as an ai)", re.I)


@dataclass
class LLMTranslator:
    config: LLMConfig = field(default_factory=LLMConfig)
    cassette: Cassette | None = None
    transport: httpx.BaseTransport | None = None
    limiter: RateLimiter | None = None
    name: str = "llm"

    def __post_init__(self) -> None:
        self.requests_made = 0
        self.tokens_used = 0
        self._lock = threading.Lock()
        if self.limiter is None:
            self.limiter = RateLimiter(self.config.max_concurrent, self.config.min_interval)

    def payload(self, request: TranslatorRequest) -> dict:
        data = {
            "model": self.config.model,
            "messages": build_messages(request),
            "temperature": self.config.temperature,
        }
        if self.config.force_json and request.mode == Mode.DELTA:
            data["response_format"] = {"type": "json_object"}
        return data

    def _check_budget(self) -> None:
        cfg = self.config
        if cfg.max_requests is not None and self.requests_made >= cfg.max_requests:
            raise BudgetExceeded(f"request cap of {cfg.max_requests} reached")
        if cfg.max_tokens is not None and self.tokens_used >= cfg.max_tokens:
            raise BudgetExceeded(f"token cap of {cfg.max_tokens} reached")

    def _post(self, payload: dict) -> str:
        key = os.environ.get(API_KEY_ENV)
        if not key and self.transport is None:
            raise TranslatorError(f"set {API_KEY_ENV} to call a remote model")
        with self._lock:
            self._check_budget()
            self.requests_made += 1
        headers = {"Authorization": f"Bearer {key or 'unused'}"}
        url = self.config.endpoint.rstrip("/") + "/chat/completions"
        try:
            with self.limiter, httpx.Client(transport=self.transport, timeout=self.config.timeout) as client:
                resp = client.post(url, json=payload, headers=headers)
        except httpx.HTTPError as exc:
            raise TransportError(f"request failed: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"server returned {resp.status_code}")
        if resp.status_code >= 400:
            raise TranslatorError(f"server rejected request ({resp.status_code}): {resp.text[:200]}")
        try:
            data = resp.json()
            message = data["choices"][0]["message"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion payload: {exc}") from exc
        usage = data.get("usage") or {}
        with self._lock:
            self.tokens_used += int(usage.get("total_tokens", 0))
        if message.get("refusal"):
            raise ModelRefusal(str(message["refusal"]))
        content = message.get("content")
        if content is None:
            raise ModelRefusal("empty completion")
        return content

    def translate(self, request: TranslatorRequest) -> TranslatorResponse:
        payload = self.payload(request)
        key = request_hash(payload)
        if self.cassette is not None and self.cassette.mode == "replay":
            raw = self.cassette.lookup(key)
        else:
            raw = self._post(payload)
            if self.cassette is not None:
                self.cassette.record(key, raw)
        if _REFUSAL.match(raw.strip()):
            raise ModelRefusal(raw.strip()[:200])
        return TranslatorResponse(request.mode, extract(request.mode, raw), raw)
