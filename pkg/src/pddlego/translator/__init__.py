from .base import (
    BudgetExceeded,
    Mode,
    ModelRefusal,
    Translator,
    TranslatorError,
    TranslatorRequest,
    TranslatorResponse,
    TransportError,
    UnrecognizedObservation,
    format_exchange,
    split_transcript,
)
from .faulty import FAULT_KINDS, Corruption, FaultProfile, FaultyTranslator
from .llm import API_KEY_ENV, Cassette, LLMConfig, LLMTranslator, RateLimiter, request_hash
from .mock import oracle_transport
from .oracle import OracleTranslator, compose_delta, pddl_name

__all__ = [
    "API_KEY_ENV",
    "BudgetExceeded",
    "Cassette",
    "Corruption",
    "FAULT_KINDS",
    "FaultProfile",
    "FaultyTranslator",
    "LLMConfig",
    "LLMTranslator",
    "Mode",
    "ModelRefusal",
    "OracleTranslator",
    "RateLimiter",
    "Translator",
    "TranslatorError",
    "TranslatorRequest",
    "TranslatorResponse",
    "TransportError",
    "UnrecognizedObservation",
    "compose_delta",
    "format_exchange",
    "oracle_transport",
    "pddl_name",
    "request_hash",
    "split_transcript",
]
