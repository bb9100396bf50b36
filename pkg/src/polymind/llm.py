"""Provider-agnostic LLM access.

Dialogue management, response parsing into typed generations, key-point and
summary extraction, and a deterministic mock provider so the whole engine runs
offline. Providers expose a single method:

    complete(dialogue, params) -> assistant text

The remote implementation speaks the common chat-completions JSON convention
(messages array of {role, content}) against a configurable base URL. The mock
implementation is a pure function of (dialogue, seed): identical inputs always
produce identical text, which the test suite and the simulation mode rely on.
"""
from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass
from typing import Callable, Protocol

import httpx

from .errors import InvalidOperationError, ParseError, ProviderError
from .tasks import CONSTRAINTS, PLACEHOLDER, GenerationConstraints, OutputType, TaskSpec

DEFAULT_API_KEY_ENV = "POLYMIND_API_KEY"

RETRY_BUDGET = 2
BACKOFF_SECONDS = 0.5

FEEDBACK_INSTRUCTIONS = {
    "be_creative": "Be creative.",
    "be_more_specific": "Be more specific.",
    "be_brief": "Be brief.",
}
REGENERATE_SUFFIX = "Regenerate one result under the same constraints."
EXPLAIN_PROMPT = "Explain briefly why you generated this result."

KEY_POINT_MAX_WORDS = 5
SUMMARY_MAX_WORDS = 25


@dataclass
class Turn:
    role: str  # system | user | assistant
    text: str

    def to_dict(self) -> dict:
        return {"role": self.role, "text": self.text}

    @classmethod
    def from_dict(cls, d: dict) -> "Turn":
        return cls(role=d["role"], text=d["text"])


Dialogue = list[Turn]


def check_dialogue(dialogue: Dialogue) -> None:
    """Roles must alternate user/assistant after an optional leading system turn."""
    turns = list(dialogue)
    if turns and turns[0].role == "system":
        turns = turns[1:]
    expected = "user"
    for turn in turns:
        if turn.role != expected:
            raise InvalidOperationError(
                f"dialogue roles must alternate user/assistant; got '{turn.role}' "
                f"where '{expected}' was expected"
            )
        expected = "assistant" if expected == "user" else "user"


@dataclass
class CompletionParams:
    temperature: float = 0.7
    max_output_tokens: int = 1024


class Provider(Protocol):
    def complete(self, dialogue: Dialogue, params: CompletionParams) -> str: ...


def complete(provider: Provider, dialogue: Dialogue, params: CompletionParams | None = None) -> str:
    """Run one completion. The dialogue must end with a user turn; the caller
    appends the returned text as the assistant turn."""
    if not dialogue or dialogue[-1].role != "user":
        raise InvalidOperationError("dialogue must end with a user turn")
    check_dialogue(dialogue)
    return provider.complete(dialogue, params or CompletionParams())


class RemoteChatProvider:
    """HTTP chat-completions client with a small retry budget.

    Transport failures, timeouts, 429 and 5xx responses are retried
    RETRY_BUDGET times with exponential backoff, then surfaced as
    ProviderError. The API key is read from an environment variable
    (default POLYMIND_API_KEY).
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = os.environ.get(api_key_env, "")
        self._sleep = sleep
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, dialogue: Dialogue, params: CompletionParams) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": t.role, "content": t.text} for t in dialogue],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Exception | None = None
        for attempt in range(RETRY_BUDGET + 1):
            if attempt:
                self._sleep(BACKOFF_SECONDS * 2 ** (attempt - 1))
            try:
                response = self._client.post(
                    f"{self.base_url}/chat/completions", json=payload, headers=headers
                )
                if response.status_code == 200:
                    body = response.json()
                    return body["choices"][0]["message"]["content"]
                last_error = ProviderError(f"HTTP {response.status_code}: {response.text[:200]}")
            except httpx.HTTPError as exc:
                last_error = exc
        raise ProviderError(f"completion failed after {RETRY_BUDGET + 1} attempts: {last_error}")


_LEXICON = [
    "amber", "anchor", "arc", "atlas", "aurora", "basalt", "beacon", "birch",
    "breeze", "canvas", "cedar", "cinder", "circuit", "cobalt", "comet", "coral",
    "crescent", "current", "delta", "drift", "echo", "ember", "fable", "fathom",
    "fern", "flint", "garnet", "glade", "harbor", "hollow", "index", "iris",
    "juniper", "keel", "lantern", "ledger", "lumen", "maple", "meadow", "mesa",
    "mosaic", "north", "oasis", "onyx", "orbit", "pebble", "pine", "prism",
    "quarry", "quill", "raven", "reef", "ridge", "river", "saffron", "sonnet",
    "spark", "summit", "thicket", "tide", "vale", "vertex", "willow", "zephyr",
]

_NAME_POOL = [
    "Synthesise", "Contrast", "Outline", "Question", "Translate", "Critique",
    "Expand", "Condense", "Reframe", "Illustrate", "Connect", "Polish",
]


class MockProvider:
    """Deterministic offline provider.

    Output is a pure function of (dialogue, seed). The last user turn is
    inspected for the fixed markers the engine embeds in its prompts (output
    constraint suffixes, the explain/regenerate instructions, the suggestion
    few-shot frames) and a well-formed reply for that request type is derived
    from a sha256 of the full dialogue. No state, no network.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def complete(self, dialogue: Dialogue, params: CompletionParams) -> str:
        request = dialogue[-1].text
        if EXPLAIN_PROMPT in request:
            return self._explanation(dialogue)
        if REGENERATE_SUFFIX in request:
            return self._regeneration(dialogue)
        if "Key point:" in request and "Summary:" in request:
            return self._summary_reply(request)
        if "Suggest one name for a new microtask" in request:
            return self._name_suggestion(dialogue)
        if "Write the prompt for the last microtask" in request:
            return self._prompt_suggestion(dialogue)
        if "each no more than 3 words" in request:
            return self._numbered(dialogue, count=3, max_words=3)
        if "each no more than 5 words" in request:
            return self._numbered(dialogue, count=3, max_words=5)
        if "no more than 150 words" in request:
            return self._paragraph(dialogue)
        return self._phrase(dialogue, "generic", 4)

    # -- derivation helpers ------------------------------------------------

    def _digest(self, dialogue: Dialogue, salt: str) -> bytes:
        h = hashlib.sha256()
        h.update(str(self.seed).encode())
        h.update(salt.encode())
        for turn in dialogue:
            h.update(b"\x1e")
            h.update(turn.role.encode())
            h.update(b":")
            h.update(turn.text.encode())
        return h.digest()

    def _words(self, dialogue: Dialogue, salt: str, n: int) -> list[str]:
        digest = self._digest(dialogue, salt)
        stream = []
        counter = 0
        while len(stream) < n:
            block = hashlib.sha256(digest + counter.to_bytes(4, "big")).digest()
            stream.extend(_LEXICON[b % len(_LEXICON)] for b in block)
            counter += 1
        return stream[:n]

    def _phrase(self, dialogue: Dialogue, salt: str, max_words: int) -> str:
        length = 1 + self._digest(dialogue, salt)[0] % max_words
        return " ".join(self._words(dialogue, salt, length))

    def _numbered(self, dialogue: Dialogue, count: int, max_words: int) -> str:
        lines = []
        for i in range(count):
            lines.append(f"{i + 1}. {self._phrase(dialogue, f'item{i}', max_words)}")
        return "\n".join(lines)

    def _paragraph(self, dialogue: Dialogue) -> str:
        length = 30 + self._digest(dialogue, "para")[0] % 60
        words = self._words(dialogue, "para", length)
        sentences = []
        for i in range(0, len(words), 10):
            chunk = " ".join(words[i:i + 10])
            sentences.append(chunk.capitalize() + ".")
        return " ".join(sentences)

    def _summary_reply(self, request: str) -> str:
        # Echo truncations of the submitted text so the reply visibly derives from it.
        body = request.split("\n\n", 1)[1] if "\n\n" in request else request
        words = body.split()
        key_point = " ".join(words[:KEY_POINT_MAX_WORDS])
        summary = " ".join(words[:SUMMARY_MAX_WORDS])
        return f"Key point: {key_point}\nSummary: {summary}"

    def _regeneration(self, dialogue: Dialogue) -> str:
        constraint = _latest_constraint(dialogue)
        max_words = constraint.max_words if constraint else 5
        if "Be brief." in dialogue[-1].text:
            previous = _first_prior_item(dialogue)
            if previous:
                return previous.split()[0]
            max_words = 1
        return self._phrase(dialogue, "regen", min(max_words, 8))

    def _explanation(self, dialogue: Dialogue) -> str:
        tag = self._digest(dialogue, "explain")[:4].hex()
        return (
            "The result follows from the terms in your request and their most "
            f"common associations (trace {tag})."
        )

    def _name_suggestion(self, dialogue: Dialogue) -> str:
        request = dialogue[-1].text
        unused = [n for n in _NAME_POOL if n not in request] or _NAME_POOL
        return unused[self._digest(dialogue, "name")[0] % len(unused)]

    def _prompt_suggestion(self, dialogue: Dialogue) -> str:
        verb = self._words(dialogue, "prompt", 1)[0]
        return f"Give {verb} ideas inspired by {PLACEHOLDER}."


def _latest_constraint(dialogue: Dialogue) -> GenerationConstraints | None:
    for turn in reversed(dialogue):
        if turn.role != "user":
            continue
        if "each no more than 3 words" in turn.text:
            return CONSTRAINTS[OutputType.KEYWORD]
        if "each no more than 5 words" in turn.text:
            return CONSTRAINTS[OutputType.CONCEPT]
        if "no more than 150 words" in turn.text:
            return CONSTRAINTS[OutputType.STICKY_NOTE]
    return None


def _first_prior_item(dialogue: Dialogue) -> str | None:
    for turn in reversed(dialogue):
        if turn.role == "assistant":
            try:
                items = _split_items(turn.text)
            except ParseError:
                continue
            if items:
                return items[0]
    return None


# -- parsing ----------------------------------------------------------------


def _strip_item(line: str) -> str:
    text = line.strip()
    for prefix_len in (3, 2):
        if len(text) > prefix_len and text[0].isdigit():
            head = text[:prefix_len]
            if head.rstrip().endswith((".", ")")):
                text = text[prefix_len:].strip()
                break
    if text.startswith(("- ", "* ")):
        text = text[2:].strip()
    return text.strip("\"'").strip()


def _split_items(text: str) -> list[str]:
    items = [_strip_item(line) for line in text.splitlines()]
    return [i for i in items if i]


def format_numbered(items: list[str]) -> str:
    return "\n".join(f"{i + 1}. {item}" for i, item in enumerate(items))


def parse_generations(text: str, output_type: OutputType) -> list[str]:
    """Parse completion text into generation items and enforce the output contract.

    Keyword/concept outputs must be a numbered list (bullets and bare lines are
    tolerated) with exactly the required count; sticky-note outputs are the
    whole text as a single item. A count mismatch or a word-limit violation is
    a ParseError: the orchestrator drops such results rather than showing them.
    """
    constraints = CONSTRAINTS[output_type]
    if output_type == OutputType.STICKY_NOTE:
        body = text.strip()
        if not body:
            raise ParseError("empty sticky note generation")
        items = [body]
    else:
        items = _split_items(text)
    if len(items) != constraints.count:
        raise ParseError(
            f"expected {constraints.count} generation(s) for {output_type.value}, got {len(items)}"
        )
    for item in items:
        words = len(item.split())
        if words > constraints.max_words:
            raise ParseError(
                f"generation exceeds {constraints.max_words} words for {output_type.value}: {words}"
            )
    return items


def parse_regeneration(text: str, output_type: OutputType) -> str:
    """Parse a single regenerated item; the count constraint is always 1 here
    because regeneration replaces one candidate in place."""
    limit = CONSTRAINTS[output_type].max_words
    if output_type == OutputType.STICKY_NOTE:
        item = text.strip()
    else:
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        item = _strip_item(lines[0]) if lines else ""
    if not item:
        raise ParseError("empty regeneration reply")
    words = len(item.split())
    if words > limit:
        raise ParseError(
            f"regenerated item exceeds {limit} words for {output_type.value}: {words}"
        )
    return item


def _truncate_words(text: str, limit: int) -> str:
    return " ".join(text.split()[:limit])


def summarize_result(
    provider: Provider, generations: list[str], output_type: OutputType
) -> tuple[str, str]:
    """Produce (key_point, summary) for a generation batch.

    Short outputs are summarised rule-based (first item / comma-joined list) to
    avoid a second completion; sticky notes ask the provider and fall back to
    word truncation on any failure, so this never raises and never returns
    empty strings.
    """
    if not generations:
        raise InvalidOperationError("cannot summarize an empty generation batch")
    if output_type != OutputType.STICKY_NOTE:
        key_point = _truncate_words(generations[0], KEY_POINT_MAX_WORDS)
        summary = _truncate_words(", ".join(generations), SUMMARY_MAX_WORDS)
        return key_point, summary
    body = generations[0]
    request = (
        f"Give a key point of no more than {KEY_POINT_MAX_WORDS} words and a summary of no "
        f"more than {SUMMARY_MAX_WORDS} words for the following text. Reply with two lines, "
        'prefixed "Key point:" and "Summary:".'
        f"\n\n{body}"
    )
    try:
        reply = complete(provider, [Turn("user", request)])
        key_point = summary = None
        for line in reply.splitlines():
            if line.lower().startswith("key point:"):
                key_point = line.split(":", 1)[1].strip()
            elif line.lower().startswith("summary:"):
                summary = line.split(":", 1)[1].strip()
        if (
            not key_point
            or not summary
            or len(key_point.split()) > KEY_POINT_MAX_WORDS
            or len(summary.split()) > SUMMARY_MAX_WORDS
        ):
            raise ParseError("malformed summary reply")
        return key_point, summary
    except (ProviderError, ParseError, InvalidOperationError):
        return _truncate_words(body, KEY_POINT_MAX_WORDS), _truncate_words(body, SUMMARY_MAX_WORDS)


# -- suggestion prompts (task delegation) ------------------------------------


def name_suggestion_prompt(existing: list[TaskSpec]) -> str:
    names = ", ".join(t.name for t in existing)
    return (
        f"Here are the names of existing microtasks: {names}. "
        "Suggest one name for a new microtask. Reply with the name only."
    )


def prompt_suggestion_prompt(existing: list[TaskSpec], name: str) -> str:
    pairs = []
    for task in existing:
        template = task.active_template().template.replace("\n", "\\n")
        pairs.append(f"Name: {task.name}\nPrompt: {template}")
    pairs.append(f"Name: {name}\nPrompt:")
    return (
        "Each microtask has a one-line prompt holding a \"[placeholder]\" marker. "
        "Write the prompt for the last microtask.\n\n" + "\n\n".join(pairs)
    )
