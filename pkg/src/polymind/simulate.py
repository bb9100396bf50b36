"""Deterministic discrete-event simulation.

A Session runs the engine against a virtual clock: timer ticks, curtain
deadlines, and provider completions become scheduled events processed in a
fixed order, so a given (trace, seed) pair always yields a byte-identical
event log. Traces are small JSON scripts of user actions with optional
absolute timestamps.

At any single instant the processing order is: provider completions (in
dispatch order), curtain expirations, the scheduler tick, then the trace
action that targeted that time.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from pathlib import Path
from random import Random

from .engine import COMMANDS, Engine, Job, SchedulerConfig, execute_job, run_command
from .errors import InvalidOperationError, ParseError, ProviderError, TraceError
from .llm import MockProvider, Provider
from .model import Document, new_document

TRACE_SCHEMA_VERSION = 1

#: Session-level composite ops that are not engine commands.
_SESSION_OPS = {"advance", "advance_ticks", "add_task"}


class VirtualClock:
    def __init__(self, start: float = 0.0):
        self._time = start

    def now(self) -> float:
        return self._time

    def set(self, t: float) -> None:
        if t < self._time:
            raise TraceError(f"time cannot run backwards: {t} < {self._time}")
        self._time = t


@dataclass
class TraceAction:
    op: str
    at: float | None
    args: dict


class TraceScript:
    def __init__(self, actions: list[TraceAction]):
        self.actions = actions

    @classmethod
    def from_dict(cls, data: dict) -> "TraceScript":
        if not isinstance(data, dict):
            raise TraceError("trace must be a JSON object")
        if data.get("schema_version") != TRACE_SCHEMA_VERSION:
            raise TraceError(f"unsupported trace schema_version: {data.get('schema_version')!r}")
        raw_actions = data.get("actions")
        if not isinstance(raw_actions, list):
            raise TraceError("trace must carry an actions list")
        known = set(COMMANDS) | _SESSION_OPS
        actions: list[TraceAction] = []
        last_at = float("-inf")
        for i, raw in enumerate(raw_actions):
            if not isinstance(raw, dict):
                raise TraceError(f"action {i}: must be an object")
            op = raw.get("op")
            if op not in known:
                raise TraceError(f"action {i}: unknown op {op!r}")
            at = raw.get("at")
            if at is not None:
                if isinstance(at, bool) or not isinstance(at, (int, float)):
                    raise TraceError(f"action {i}: 'at' must be a number")
                if at < last_at:
                    raise TraceError(f"action {i}: 'at' must be non-decreasing")
                last_at = at
            args = {k: v for k, v in raw.items() if k not in ("op", "at")}
            actions.append(TraceAction(op=op, at=at, args=args))
        return cls(actions)

    @classmethod
    def from_path(cls, path: str | Path) -> "TraceScript":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise TraceError(f"malformed trace JSON: {exc}") from None
        return cls.from_dict(data)


class Session:
    """Engine + virtual clock + synchronous-by-schedule provider execution."""

    def __init__(
        self,
        seed: int = 0,
        config: SchedulerConfig | None = None,
        provider: Provider | None = None,
        latency: float = 0.0,
        doc: Document | None = None,
    ):
        self.clock = VirtualClock()
        self.config = config or SchedulerConfig()
        self.doc = doc if doc is not None else new_document(now=self.clock.now)
        self.doc.now = self.clock.now
        self.engine = Engine(self.doc, self.config, Random(seed), self.clock.now)
        self.provider = provider if provider is not None else MockProvider(seed)
        self.latency = latency
        self._completions: list[tuple[float, int, Job]] = []
        self._dispatch_counter = 0
        self._next_tick = self.config.tick_seconds

    # -- scheduling --------------------------------------------------------

    def _schedule(self, jobs: list[Job]) -> None:
        for job in jobs:
            heapq.heappush(
                self._completions,
                (self.clock.now() + self.latency, self._dispatch_counter, job),
            )
            self._dispatch_counter += 1

    def _run_due_completions(self, t: float) -> None:
        while self._completions and self._completions[0][0] <= t:
            _, _, job = heapq.heappop(self._completions)
            try:
                outcome: object = execute_job(job, self.provider)
            except (ProviderError, ParseError, InvalidOperationError) as exc:
                outcome = exc
            self.engine.complete_job(job, outcome)

    def advance_to(self, target: float) -> None:
        """Run all scheduled work up to and including target time, in
        (time, completions-before-timers-before-tick) order."""
        if target < self.clock.now():
            raise TraceError(f"cannot advance to the past: {target}")
        while True:
            entries = []
            if self._completions:
                entries.append((self._completions[0][0], 0))
            deadline = self.engine.next_deadline()
            if deadline is not None:
                entries.append((deadline, 1))
            entries.append((self._next_tick, 2))
            entries = [e for e in entries if e[0] <= target]
            if not entries:
                break
            t, priority = min(entries)
            self.clock.set(t)
            if priority == 0:
                self._run_due_completions(t)
            elif priority == 1:
                self.engine.process_timers(t)
            else:
                self._schedule(self.engine.tick())
                self._next_tick += self.config.tick_seconds
        self.clock.set(target)

    def advance_by(self, seconds: float) -> None:
        self.advance_to(self.clock.now() + seconds)

    # -- actions ------------------------------------------------------------

    def run_action(self, action: TraceAction) -> object:
        if action.at is not None:
            self.advance_to(action.at)
        if action.op == "advance":
            self.advance_by(action.args["seconds"])
            return None
        if action.op == "advance_ticks":
            self.advance_by(action.args["ticks"] * self.config.tick_seconds)
            return None
        if action.op == "add_task":
            # Delegation is a synchronous composite in simulation: suggest,
            # execute inline, confirm.
            job = self.engine.suggest_task(action.args.get("name"))
            draft = execute_job(job, self.provider)
            return {"task_id": self.engine.confirm_task(draft)}
        try:
            result, jobs = run_command(self.engine, action.op, action.args)
        except KeyError as exc:
            raise TraceError(f"{action.op}: missing argument {exc.args[0]}") from None
        self._schedule(jobs)
        return result

    def run(self, script: TraceScript) -> Document:
        for action in script.actions:
            self.run_action(action)
        return self.doc


def simulate(
    script: TraceScript,
    seed: int = 0,
    config: SchedulerConfig | None = None,
    provider: Provider | None = None,
    latency: float = 0.0,
) -> Document:
    """Run a trace from an empty default document; returns the final document
    (its event_log is the simulation output)."""
    session = Session(seed=seed, config=config, provider=provider, latency=latency)
    return session.run(script)
