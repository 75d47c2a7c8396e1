"""Decision oracles: where completions come from.

The engines only ever see the Oracle protocol, so a parse can be driven by
a gold-derivation replay, a scripted list, or a live completion endpoint
without the state machines knowing the difference.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, runtime_checkable

import requests

from .prompts import PROMPT_KINDS, PromptKind

logger = logging.getLogger(__name__)

TOKEN_ENV_VAR = "RSTKIT_API_TOKEN"

_INT_RE = re.compile(r"\d+")


class OracleFailure(RuntimeError):
    """Transport-level failure after retries are exhausted."""


class ReplayExhausted(RuntimeError):
    """A replay or scripted oracle ran out of answers."""


class KindMismatch(RuntimeError):
    """A replay oracle was asked a different kind of question than scripted."""


class StoreCorrupt(RuntimeError):
    """A cache record exists but cannot be decoded."""


@dataclass(frozen=True)
class OracleQuery:
    """One decision put to an oracle.

    ``valid_labels`` is the closed answer set, in canonical form and prompt
    order; oracles may use it (replay checks against it) but the engine does
    the resolution and correction itself.
    """

    kind: PromptKind
    prompt: str
    valid_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.kind not in PROMPT_KINDS:
            raise ValueError(f"unknown prompt kind {self.kind!r}")
        if not self.valid_labels:
            raise ValueError("query needs a non-empty label set")


def resolve_label(raw: str, valid_labels: Iterable[str]) -> str | None:
    """Map raw completion text onto a member of the valid set, or None.

    Only the first line counts; matching is case-insensitive after trimming,
    and purely numeric answers tolerate leading zeros ("02" matches "2").
    Returns the canonical member, never the raw spelling.
    """
    first = raw.split("\n", 1)[0].strip()
    if _INT_RE.fullmatch(first):
        first = str(int(first))
    folded = first.casefold()
    for label in valid_labels:
        if folded == label.casefold():
            return label
    return None


@runtime_checkable
class Oracle(Protocol):
    """Answer source for decision queries.

    ``fingerprint`` identifies the model and decoding configuration well
    enough to key a cache; it must change whenever answers could.
    """

    fingerprint: str

    def complete(self, query: OracleQuery) -> str: ...


class ReplayOracle:
    """Replays a scripted (kind, answer) sequence, verifying kinds.

    Built from a gold derivation, this drives an engine along the exact
    decision path that reconstructs the original tree. Any divergence in
    what the engine asks shows up immediately as KindMismatch.
    """

    fingerprint = "replay"

    def __init__(self, script: Iterable[tuple[PromptKind, str]]):
        self._script = list(script)
        self._next = 0

    def __len__(self) -> int:
        return len(self._script)

    @property
    def remaining(self) -> int:
        return len(self._script) - self._next

    def complete(self, query: OracleQuery) -> str:
        if self._next >= len(self._script):
            raise ReplayExhausted(
                f"no answer left for {query.kind} query #{self._next}"
            )
        kind, answer = self._script[self._next]
        if kind != query.kind:
            raise KindMismatch(
                f"step {self._next}: scripted {kind}, engine asked {query.kind}"
            )
        self._next += 1
        return answer


class ScriptedOracle:
    """Returns raw strings in order, ignoring what is asked.

    Useful for stress tests and for driving parses from a plain answers
    file. With ``cycle`` the sequence repeats forever.
    """

    fingerprint = "scripted"

    def __init__(self, answers: Iterable[str], cycle: bool = False):
        self._answers = list(answers)
        self._cycle = cycle
        self._next = 0
        self._lock = threading.Lock()

    def complete(self, query: OracleQuery) -> str:
        with self._lock:
            if self._next >= len(self._answers):
                if not self._cycle or not self._answers:
                    raise ReplayExhausted(f"no answer left for {query.kind} query")
                self._next = 0
            answer = self._answers[self._next]
            self._next += 1
            return answer


class CallableOracle:
    """Adapts a plain function (query -> raw text) to the protocol."""

    def __init__(self, fn, fingerprint: str = "callable"):
        self._fn = fn
        self.fingerprint = fingerprint

    def complete(self, query: OracleQuery) -> str:
        return self._fn(query)


class HttpOracle:
    """Client for a text-completion endpoint.

    Speaks the common completions wire shape: POST JSON with model, prompt,
    max_tokens, temperature, and stop; the answer text comes back under
    choices[0].text. Decoding is greedy (temperature 0) and stops at the
    first newline, since every valid answer is a single line.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        max_tokens: int = 16,
        temperature: float = 0.0,
        timeout: float = 60.0,
        retries: int = 3,
        backoff: float = 1.0,
        api_token: str | None = None,
    ):
        if retries < 0:
            raise ValueError("retries must be >= 0")
        self.endpoint = endpoint
        self.model = model
        self.max_tokens = max_tokens
        self.temperature = temperature
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.api_token = api_token or os.environ.get(TOKEN_ENV_VAR)
        self.fingerprint = (
            f"{model}|temperature={temperature}|max_tokens={max_tokens}|stop=nl"
        )

    def complete(self, query: OracleQuery) -> str:
        payload = {
            "model": self.model,
            "prompt": query.prompt,
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
            "stop": ["\n"],
        }
        headers = {"Content-Type": "application/json"}
        if self.api_token:
            headers["Authorization"] = f"Bearer {self.api_token}"
        last_error = "no attempt made"
        for attempt in range(self.retries + 1):
            if attempt:
                delay = self.backoff * (2 ** (attempt - 1))
                logger.info("retrying %s query in %.2fs", query.kind, delay)
                time.sleep(delay)
            try:
                response = requests.post(
                    self.endpoint, json=payload, headers=headers,
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = f"request failed: {exc}"
                continue
            if response.status_code != 200:
                last_error = f"HTTP {response.status_code}: {response.text[:200]}"
                continue
            try:
                body = response.json()
                return str(body["choices"][0]["text"])
            except (ValueError, LookupError, TypeError) as exc:
                last_error = f"malformed response body: {exc}"
                continue
        raise OracleFailure(
            f"{query.kind} query failed after {self.retries + 1} attempts: "
            f"{last_error}"
        )


class CachedOracle:
    """Persistent read-through cache in front of another oracle.

    Keys hash the question and the inner oracle's fingerprint, so changing
    the model or decoding setup never serves stale answers. Records are
    one JSON file per key, written atomically; concurrent misses on the
    same key store exactly one record.
    """

    def __init__(self, inner: Oracle, store_dir: str | Path):
        self.inner = inner
        self.store_dir = Path(store_dir)
        self.store_dir.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self._guard = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = {}

    @property
    def fingerprint(self) -> str:
        return self.inner.fingerprint

    def _key(self, query: OracleQuery) -> str:
        material = "\x1f".join((query.kind, self.inner.fingerprint, query.prompt))
        return hashlib.sha256(material.encode("utf-8")).hexdigest()

    def _record_path(self, key: str) -> Path:
        return self.store_dir / f"{key}.json"

    def _load(self, key: str) -> str | None:
        path = self._record_path(key)
        try:
            text = path.read_text()
        except FileNotFoundError:
            return None
        try:
            record = json.loads(text)
            return str(record["raw"])
        except (ValueError, KeyError, TypeError) as exc:
            raise StoreCorrupt(f"unreadable cache record {path}: {exc}") from None

    def complete(self, query: OracleQuery) -> str:
        key = self._key(query)
        cached = self._load(key)
        if cached is not None:
            with self._guard:
                self.hits += 1
            return cached
        with self._guard:
            lock = self._key_locks.setdefault(key, threading.Lock())
        with lock:
            cached = self._load(key)
            if cached is not None:
                with self._guard:
                    self.hits += 1
                return cached
            raw = self.inner.complete(query)
            record = {
                "kind": query.kind,
                "fingerprint": self.inner.fingerprint,
                "prompt": query.prompt,
                "raw": raw,
            }
            path = self._record_path(key)
            # unique temp name: concurrent processes may miss the same key
            tmp = path.with_name(
                f".{key}.{os.getpid()}.{threading.get_ident()}.tmp"
            )
            tmp.write_text(json.dumps(record, ensure_ascii=False))
            os.replace(tmp, path)
        with self._guard:
            self.misses += 1
        return raw

    def stats(self) -> dict[str, int]:
        with self._guard:
            return {"hits": self.hits, "misses": self.misses}
