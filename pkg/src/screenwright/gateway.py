"""Chat-completion gateway.

One :class:`Gateway` wraps a backend (live HTTP, record, replay or an
in-process mock) with a sliding-window rate limiter, a transcript of every
exchange, and retry-on-parse-failure for structured calls. Every failed
structured attempt lands in a :class:`FailureLog` so stage failure rates can
be reported later.
"""

from __future__ import annotations

import collections
import enum
import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Protocol, TypeVar

import httpx

from .errors import (
    FormatError,
    RateLimited,
    ReplayMiss,
    StructuredOutputFailure,
    TransportError,
)
from .tags import TagDocument, TagSchema, parse_tag_document

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_MAX_RETRIES = 2
DEFAULT_TIMEOUT = 120.0


class Stage(str, enum.Enum):
    PLANNING = "Stage1_Planning"
    EXPANSION = "Stage2_Expansion"
    SCREENPLAY = "Stage3_Screenplay"
    EVAL = "Eval"
    SYNTH = "Synth"


@dataclass(frozen=True)
class GenParams:
    model_id: str = "gpt-4-0613"
    temperature: float = 1.0
    top_p: float = 0.999
    max_tokens: int | None = None

    def __post_init__(self):
        if not 0 <= self.temperature <= 2:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p {self.top_p} outside (0, 1]")
        if self.max_tokens is not None and self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class Turn:
    role: str
    content: str


@dataclass(frozen=True)
class ChatRequest:
    system: str
    turns: tuple[Turn, ...]
    params: GenParams = field(default_factory=GenParams)

    def __post_init__(self):
        object.__setattr__(self, "turns", tuple(self.turns))
        if not self.turns:
            raise ValueError("a request needs at least one user turn")
        for i, t in enumerate(self.turns):
            expected = "user" if i % 2 == 0 else "assistant"
            if t.role != expected:
                raise ValueError(f"turn {i} has role {t.role!r}, expected {expected!r}")

    @classmethod
    def single(cls, system: str, user: str, params: GenParams) -> ChatRequest:
        return cls(system, (Turn("user", user),), params)

    @property
    def last_user(self) -> str:
        return self.turns[-1].content

    def messages(self) -> list[dict]:
        msgs = [{"role": "system", "content": self.system}] if self.system else []
        return msgs + [{"role": t.role, "content": t.content} for t in self.turns]

    def to_json(self) -> dict:
        return {
            "model": self.params.model_id,
            "temperature": self.params.temperature,
            "top_p": self.params.top_p,
            "system": self.system,
            "turns": [[t.role, t.content] for t in self.turns],
        }

    def digest(self) -> str:
        """Stable replay key over (model_id, temperature, top_p, system, turns)."""
        payload = json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Backend(Protocol):
    def complete(self, req: ChatRequest) -> str: ...


# -- failure accounting ---------------------------------------------------------

@dataclass(frozen=True)
class FailureRecord:
    stage: str
    attempt: int
    error_kind: str
    story_id: str

    def __post_init__(self):
        if self.attempt < 1:
            raise ValueError("attempt numbers start at 1")


class FailureLog:
    """Thread-safe log of failed attempts and of stages that gave up."""

    def __init__(self):
        self._lock = threading.Lock()
        self.records: list[FailureRecord] = []
        self.stage_failures: list[tuple[str, str]] = []

    def add(self, record: FailureRecord) -> None:
        with self._lock:
            self.records.append(record)

    def stage_failed(self, stage: str, story_id: str) -> None:
        with self._lock:
            self.stage_failures.append((str(getattr(stage, "value", stage)), story_id))

    def extend(self, other: FailureLog) -> None:
        with self._lock:
            self.records.extend(other.records)
            self.stage_failures.extend(other.stage_failures)

    def dump(self, path: Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for r in self.records:
                fh.write(json.dumps({"type": "attempt", **asdict(r)}) + "\n")
            for stage, story in self.stage_failures:
                fh.write(json.dumps({"type": "stage", "stage": stage, "story_id": story}) + "\n")

    @classmethod
    def load(cls, path: Path) -> FailureLog:
        log = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec.pop("type") == "attempt":
                log.add(FailureRecord(**rec))
            else:
                log.stage_failed(rec["stage"], rec["story_id"])
        return log


# -- rate limiting ----------------------------------------------------------------

class RateLimiter:
    """At most ``max_requests`` request starts in any sliding ``window`` seconds."""

    def __init__(self, max_requests: int, window: float = 60.0,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if max_requests < 1:
            raise ValueError("max_requests must be >= 1")
        self.max_requests = max_requests
        self.window = window
        self.clock = clock
        self.sleep = sleep
        self._starts: collections.deque[float] = collections.deque()
        self._lock = threading.Lock()

    def acquire(self) -> float:
        """Block until a slot is free; returns the start time recorded."""
        while True:
            with self._lock:
                now = self.clock()
                # the tolerance stops float rounding from leaving a sub-nanosecond wait forever
                while self._starts and now - self._starts[0] >= self.window - 1e-9:
                    self._starts.popleft()
                if len(self._starts) < self.max_requests:
                    self._starts.append(now)
                    return now
                wait = self.window - (now - self._starts[0])
            self.sleep(wait)


# -- backends -----------------------------------------------------------------------

class HTTPBackend:
    """POSTs to ``{base_url}/chat/completions`` in the common chat API shape."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None, *,
                 timeout: float = DEFAULT_TIMEOUT, client: httpx.Client | None = None,
                 max_rate_limit_waits: int = 3, sleep: Callable[[float], None] = time.sleep):
        self.base_url = (base_url or os.environ.get("LLM_BASE_URL") or "https://api.openai.com/v1").rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY", "")
        self.client = client or httpx.Client(timeout=timeout)
        self.max_rate_limit_waits = max_rate_limit_waits
        self.sleep = sleep

    def payload(self, req: ChatRequest) -> dict:
        body = {
            "model": req.params.model_id,
            "messages": req.messages(),
            "temperature": req.params.temperature,
            "top_p": req.params.top_p,
        }
        if req.params.max_tokens is not None:
            body["max_tokens"] = req.params.max_tokens
        return body

    def _post(self, body: dict) -> httpx.Response:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last: Exception | None = None
        for _ in range(2):  # one automatic transport-level retry
            try:
                return self.client.post(f"{self.base_url}/chat/completions", json=body, headers=headers)
            except httpx.TransportError as exc:
                last = exc
                logger.warning("transport error, retrying once: %s", exc)
        raise TransportError(str(last)) from last

    def complete(self, req: ChatRequest) -> str:
        body = self.payload(req)
        waits = 0
        while True:
            resp = self._post(body)
            if resp.status_code == 429:
                retry_after = _retry_after(resp)
                if waits >= self.max_rate_limit_waits:
                    raise RateLimited("rate limited by server", retry_after)
                waits += 1
                self.sleep(retry_after if retry_after is not None else 2.0 ** waits)
                continue
            if resp.status_code >= 400:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise TransportError(f"unexpected response body: {resp.text[:200]}") from exc


def _retry_after(resp: httpx.Response) -> float | None:
    value = resp.headers.get("retry-after")
    try:
        return float(value) if value is not None else None
    except ValueError:
        return None


class Cassette:
    """Newline-delimited ``{hash, request, response, timestamp}`` records.

    Replay serves the recorded responses for a hash in recording order and
    keeps returning the last one once they run out, so retried requests see
    the same sequence they saw when recorded.
    """

    def __init__(self, path: Path | str | None = None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._by_hash: dict[str, list[str]] = collections.defaultdict(list)
        self._served: collections.Counter[str] = collections.Counter()
        if self.path is not None and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    rec = json.loads(line)
                    self._by_hash[rec["hash"]].append(rec["response"])

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_hash.values())

    def append(self, req: ChatRequest, response: str) -> None:
        digest = req.digest()
        rec = {"hash": digest, "request": req.to_json(), "response": response, "timestamp": time.time()}
        with self._lock:
            self._by_hash[digest].append(response)
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    def lookup(self, req: ChatRequest) -> str:
        digest = req.digest()
        with self._lock:
            responses = self._by_hash.get(digest)
            if not responses:
                raise ReplayMiss(digest)
            i = min(self._served[digest], len(responses) - 1)
            self._served[digest] += 1
            return responses[i]


class RecordingBackend:
    def __init__(self, inner: Backend, cassette: Cassette):
        self.inner = inner
        self.cassette = cassette

    def complete(self, req: ChatRequest) -> str:
        response = self.inner.complete(req)
        self.cassette.append(req, response)
        return response


class ReplayBackend:
    def __init__(self, cassette: Cassette):
        self.cassette = cassette

    def complete(self, req: ChatRequest) -> str:
        return self.cassette.lookup(req)


class ScriptedBackend:
    """Mock backend fed from a list of replies or a ``request -> reply`` function."""

    def __init__(self, replies: Iterable[str] | Callable[[ChatRequest], str]):
        self._fn = replies if callable(replies) else None
        self._queue = collections.deque([] if callable(replies) else replies)
        self._lock = threading.Lock()
        self.requests: list[ChatRequest] = []

    def complete(self, req: ChatRequest) -> str:
        with self._lock:
            self.requests.append(req)
            if self._fn is not None:
                return self._fn(req)
            if not self._queue:
                raise AssertionError("scripted backend ran out of replies")
            return self._queue.popleft()


# -- gateway ------------------------------------------------------------------------

class Gateway:
    def __init__(self, backend: Backend, *, rate_limiter: RateLimiter | None = None,
                 failure_log: FailureLog | None = None, story_id: str = ""):
        self.backend = backend
        self.rate_limiter = rate_limiter
        self.failure_log = failure_log if failure_log is not None else FailureLog()
        self.story_id = story_id
        self.transcript: list[tuple[ChatRequest, str]] = []
        self._lock = threading.Lock()

    def complete(self, req: ChatRequest) -> str:
        if self.rate_limiter is not None:
            self.rate_limiter.acquire()
        response = self.backend.complete(req)
        with self._lock:
            self.transcript.append((req, response))
        return response

    def complete_structured(self, req: ChatRequest, schema: TagSchema, *,
                            max_retries: int = DEFAULT_MAX_RETRIES,
                            stage: Stage | str = Stage.PLANNING,
                            validate: Callable[[TagDocument], T] | None = None,
                            return_raw: bool = False):
        """Call, parse and (optionally) validate, resending the identical request on failure.

        Returns ``validate(doc)`` when a validator is given, else the parsed
        document; with ``return_raw`` the verbatim reply is returned alongside.
        Each failed attempt is logged; after ``max_retries + 1`` failed
        attempts :class:`StructuredOutputFailure` is raised.
        """
        if max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        stage_name = str(getattr(stage, "value", stage))
        last: FormatError | None = None
        for attempt in range(1, max_retries + 2):
            raw = self.complete(req)
            try:
                doc = parse_tag_document(raw, schema)
                value = validate(doc) if validate is not None else doc
            except FormatError as exc:
                last = exc
                self.failure_log.add(FailureRecord(stage_name, attempt, exc.kind, self.story_id))
                logger.info("%s attempt %d failed: %s", stage_name, attempt, exc)
                continue
            return (value, raw) if return_raw else value
        assert last is not None
        raise StructuredOutputFailure(stage_name, max_retries + 1, last)


@dataclass
class Agent:
    """A pipeline role: which gateway to call, with what sampling, how many retries."""

    gateway: Gateway
    params: GenParams = field(default_factory=GenParams)
    max_retries: int = DEFAULT_MAX_RETRIES

    def request(self, system: str, turns: Iterable[Turn] | str) -> ChatRequest:
        if isinstance(turns, str):
            turns = (Turn("user", turns),)
        return ChatRequest(system, tuple(turns), self.params)

    def structured(self, req: ChatRequest, schema: TagSchema, stage: Stage | str,
                   validate: Callable[[TagDocument], T] | None = None, return_raw: bool = False):
        return self.gateway.complete_structured(
            req, schema, max_retries=self.max_retries, stage=stage,
            validate=validate, return_raw=return_raw,
        )
