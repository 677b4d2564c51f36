"""An in-process chat-completions server answering with the oracle.

Useful for recording cassettes and exercising `LLMTranslator` without a network.
"""

from __future__ import annotations

import json
import re

import httpx

from .base import Mode, TranslatorRequest
from .oracle import OracleTranslator


def request_from_messages(payload: dict) -> TranslatorRequest:
    system = payload["messages"][0]["content"]
    user = payload["messages"][-1]["content"]
    domain = "cooking" if "obj_at" in system else "coin"
    if "Valid actions: " in user:
        body, _, acts = user.rpartition("\nValid actions: ")
        if "cookbook" in system:
            domain = "cooking"
        return TranslatorRequest(Mode.ACTION, "", history=(body,), valid_actions=tuple(acts.split(", ")), domain=domain)
    mode = Mode.DELTA if "JSON object" in system else Mode.INIT
    m = re.match(r"Previous problem file:\n(.*?)\n\nObservations:\n(.*)\Z", user, re.S)
    problem, observation = (m.group(1), m.group(2)) if m else (None, user.split("Observations:\n", 1)[-1])
    return TranslatorRequest(mode, observation, problem=problem, domain=domain)


def oracle_transport(oracle: OracleTranslator | None = None) -> httpx.MockTransport:
    oracle = oracle or OracleTranslator()

    def handler(request: httpx.Request) -> httpx.Response:
        if not request.url.path.endswith("/chat/completions"):
            return httpx.Response(404, json={"error": "not found"})
        payload = json.loads(request.content)
        text = oracle.translate(request_from_messages(payload)).text
        body = {
            "id": "mock",
            "object": "chat.completion",
            "model": payload.get("model", "mock"),
            "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
            "usage": {"total_tokens": len(json.dumps(payload)) // 4 + len(text) // 4},
        }
        return httpx.Response(200, json=body)

    return httpx.MockTransport(handler)
