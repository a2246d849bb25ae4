"""LLM-assisted annotation: prompts, backends, budget, and batch driving.

The prompt carries a task description, one gold example per label, and the
target sentence, and asks for a `label:` line plus an `explanation:` line.
Responses whose label is not one of the four classes are rejected, never
raised. A send(payload) -> text backend abstraction keeps the pipeline
testable offline: the HTTP backend talks to a chat-completion endpoint,
the replay backend returns recorded responses from a fixture file.

Cost control is deliberately conservative: each request reserves its worst
case (prompt tokens plus the response-token cap) before dispatch, so the
spend never exceeds the cap no matter how concurrent completions land.
Token counts are whitespace-split counts of the serialized text, a
documented approximation.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import requests

from .corpus import AnnotatedExample, Label, LABEL_ORDER, Provenance, parse_label
from .errors import ConfigError, DataError, ParseError

DEFAULT_TASK_DESCRIPTION = (
    "You are labeling Latin sentences with their emotion polarity. "
    "Assign exactly one label: positive, negative, neutral, or mixed. "
    "A sentence carrying both positive and negative affect is mixed; "
    "a sentence carrying neither is neutral.")


class TransportError(Exception):
    """A request failed in transit; the caller may retry."""


class ThrottleError(TransportError):
    """The service asked us to slow down (rate limit)."""


@dataclass(frozen=True)
class PromptPayload:
    task_description: str
    few_shots: tuple[tuple[str, Label], ...]
    target_text: str
    model_name: str


@dataclass(frozen=True)
class LlmVerdict:
    raw: str
    label: Optional[Label]
    explanation: Optional[str]


@dataclass(frozen=True)
class Budget:
    cap: float
    price_per_1k_input_tokens: float
    price_per_1k_output_tokens: float
    spent: float = 0.0

    def __post_init__(self):
        if self.cap < 0 or self.spent < 0:
            raise ValueError("cap and spent must be non-negative")
        if self.price_per_1k_input_tokens < 0 or self.price_per_1k_output_tokens < 0:
            raise ValueError("prices must be non-negative")


@dataclass(frozen=True)
class ClientConfig:
    endpoint_url: str = ""
    api_key_env_var: str = "LLM_API_KEY"
    model_name: str = "gpt-4"
    max_in_flight: int = 4
    max_retries: int = 3
    backoff_base: float = 1.0
    max_response_tokens: int = 256
    request_timeout: float = 30.0

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be at least 1")
        if self.max_retries < 0 or self.backoff_base < 0:
            raise ValueError("retry settings must be non-negative")


def build_prompt(target_text: str, few_shots: Sequence[tuple[str, Label]],
                 task_description: str = DEFAULT_TASK_DESCRIPTION,
                 model_name: str = "gpt-4") -> PromptPayload:
    """Assemble the payload, with one few-shot example per label.

    The examples are stored in the fixed label order (positive, negative,
    neutral, mixed) so serialization is deterministic.
    """
    by_label: dict[Label, str] = {}
    for text, label in few_shots:
        if label in by_label:
            raise ValueError(f"duplicate few-shot example for label {label.value}")
        by_label[label] = text
    missing = [l.value for l in LABEL_ORDER if l not in by_label]
    if missing:
        raise ValueError(f"few-shot examples missing labels: {', '.join(missing)}")
    ordered = tuple((by_label[label], label) for label in LABEL_ORDER)
    return PromptPayload(task_description=task_description, few_shots=ordered,
                         target_text=target_text, model_name=model_name)


def render_prompt(payload: PromptPayload) -> str:
    """Deterministic text form of the prompt; same payload, same bytes."""
    parts = [payload.task_description, ""]
    for text, label in payload.few_shots:
        parts.append(f"Example ({label.value}): {text}")
    parts.append("")
    parts.append(f"Sentence: {payload.target_text}")
    parts.append("Answer with two lines:")
    parts.append("label: <positive|negative|neutral|mixed>")
    parts.append("explanation: <free text>")
    return "\n".join(parts)


def parse_response(raw: str) -> LlmVerdict:
    """Extract label and explanation; an unknown label yields label=None.

    Only the first `label:` line counts, case-insensitively; if its value
    is not one of the four classes the whole verdict is invalid.
    """
    label: Optional[Label] = None
    explanation: Optional[str] = None
    label_seen = False
    for line in raw.split("\n"):
        stripped = line.strip()
        lowered = stripped.lower()
        if not label_seen and lowered.startswith("label:"):
            label_seen = True
            try:
                label = parse_label(stripped[len("label:"):])
            except DataError:
                label = None
        elif explanation is None and lowered.startswith("explanation:"):
            explanation = stripped[len("explanation:"):].strip()
    return LlmVerdict(raw=raw, label=label, explanation=explanation)


def count_tokens(text: str) -> int:
    """Whitespace-separated piece count, the documented cost approximation."""
    return len(text.split())


def estimate_cost(payload: PromptPayload, response_token_estimate: int,
                  prices: Budget) -> float:
    input_tokens = count_tokens(render_prompt(payload))
    return (input_tokens / 1000.0 * prices.price_per_1k_input_tokens
            + response_token_estimate / 1000.0 * prices.price_per_1k_output_tokens)


class HttpBackend:
    """Chat-completion JSON client with bearer auth from the environment."""

    def __init__(self, config: ClientConfig):
        if not config.endpoint_url:
            raise ConfigError("HTTP backend requires an endpoint URL")
        api_key = os.environ.get(config.api_key_env_var, "")
        if not api_key:
            raise ConfigError(f"environment variable {config.api_key_env_var} "
                              "is not set; cannot authenticate")
        self._config = config
        self._api_key = api_key

    def send(self, payload: PromptPayload) -> str:
        body = {
            "model": payload.model_name,
            "messages": [{"role": "user", "content": render_prompt(payload)}],
        }
        headers = {"Authorization": f"Bearer {self._api_key}",
                   "Content-Type": "application/json"}
        try:
            response = requests.post(self._config.endpoint_url, json=body,
                                     headers=headers,
                                     timeout=self._config.request_timeout)
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from exc
        if response.status_code == 429:
            raise ThrottleError("rate limited (HTTP 429)")
        if response.status_code >= 500:
            raise TransportError(f"server error (HTTP {response.status_code})")
        if response.status_code != 200:
            raise DataError(f"unexpected HTTP status {response.status_code}: "
                            f"{response.text[:200]}")
        try:
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise DataError(f"malformed completion response: {exc}") from exc


class ReplayBackend:
    """Offline stand-in returning recorded responses keyed by target text.

    The fixture is JSONL of {"target": ..., "response": ...}; a record may
    additionally carry "errors_before": N to simulate N throttle failures
    before the recorded response is served, which exercises the retry path.
    """

    def __init__(self, records: Sequence[dict]):
        self._responses: dict[str, str] = {}
        self._errors_left: dict[str, int] = {}
        self._lock = threading.Lock()
        for record in records:
            target = record["target"]
            self._responses[target] = record["response"]
            self._errors_left[target] = int(record.get("errors_before", 0))

    @classmethod
    def from_file(cls, path) -> "ReplayBackend":
        file = Path(path)
        if not file.is_file():
            raise DataError(f"replay fixture not found: {file}")
        records = []
        with file.open("r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    record["target"], record["response"]
                except (json.JSONDecodeError, KeyError) as exc:
                    raise ParseError(f"invalid replay record: {exc}",
                                     path=str(file), line=line_no) from exc
                records.append(record)
        return cls(records)

    def send(self, payload: PromptPayload) -> str:
        target = payload.target_text
        with self._lock:
            if target not in self._responses:
                raise DataError(f"replay fixture has no recording for {target!r}")
            if self._errors_left[target] > 0:
                self._errors_left[target] -= 1
                raise ThrottleError("recorded throttle")
            return self._responses[target]


@dataclass
class BatchResult:
    examples: list[AnnotatedExample]
    rejected: int
    skipped_for_budget: int
    budget: Budget


def annotate_batch(texts: Sequence[str], few_shots: Sequence[tuple[str, Label]],
                   backend, budget: Budget, config: ClientConfig,
                   task_description: str = DEFAULT_TASK_DESCRIPTION,
                   sleep_fn: Callable[[float], None] = time.sleep) -> BatchResult:
    """Annotate texts in order, respecting the budget cap.

    Dispatch stops at the first text whose worst-case cost would cross the
    cap; everything after it is skipped. Transport and throttle failures
    are retried with doubling backoff up to max_retries, then the text
    counts as rejected. Output examples keep the input order regardless of
    completion order, and spent never exceeds cap.
    """
    if budget.spent > budget.cap:
        raise ValueError("budget already exhausted")
    n = len(texts)
    verdicts: list[Optional[LlmVerdict]] = [None] * n
    costs: list[float] = [0.0] * n
    lock = threading.Lock()
    state = {"spent": budget.spent}

    def worker(index: int, payload: PromptPayload):
        raw = None
        for attempt in range(config.max_retries + 1):
            try:
                raw = backend.send(payload)
                break
            except TransportError:
                if attempt < config.max_retries:
                    sleep_fn(config.backoff_base * (2 ** attempt))
        if raw is None:
            return
        actual = estimate_cost(
            payload, min(count_tokens(raw), config.max_response_tokens), budget)
        costs[index] = actual
        with lock:
            state["spent"] += actual
        verdicts[index] = parse_response(raw)

    # Worst-case reservations accumulate monotonically and are never
    # released within a batch, so the stop point is the same no matter how
    # the concurrent completions interleave.
    dispatched = 0
    committed = 0.0
    with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
        futures = []
        for index, text in enumerate(texts):
            payload = build_prompt(text, few_shots, task_description,
                                   config.model_name)
            reserve = estimate_cost(payload, config.max_response_tokens, budget)
            if budget.spent + committed + reserve > budget.cap:
                break
            committed += reserve
            futures.append(pool.submit(worker, index, payload))
            dispatched += 1
        for future in futures:
            future.result()

    examples: list[AnnotatedExample] = []
    rejected = 0
    for index in range(dispatched):
        verdict = verdicts[index]
        if verdict is None or verdict.label is None:
            rejected += 1
            continue
        examples.append(AnnotatedExample(text=texts[index], label=verdict.label,
                                         provenance=Provenance.LLM,
                                         explanation=verdict.explanation))
    final_spent = budget.spent + sum(costs[:dispatched])
    return BatchResult(examples=examples, rejected=rejected,
                       skipped_for_budget=n - dispatched,
                       budget=replace(budget, spent=final_spent))


def few_shots_from_gold(gold: Sequence[AnnotatedExample]) -> list[tuple[str, Label]]:
    """First gold occurrence of each label, in the fixed label order."""
    first: dict[Label, str] = {}
    for example in gold:
        if example.label not in first:
            first[example.label] = example.text
    missing = [l.value for l in LABEL_ORDER if l not in first]
    if missing:
        raise DataError("gold data lacks an example for label(s): "
                        + ", ".join(missing))
    return [(first[label], label) for label in LABEL_ORDER]
